use super::*;
use crate::annuli::{build, identity_torus};
use crate::construct::{build_gos, GofgJson};
use crate::gen::{random_gos, GenParams};

fn hnn(edges: &str, hom: &str) -> Gos {
    let j: GofgJson = serde_json::from_str(&format!(r#"{{"alphabetRank":2,"vertices":[{{"rank":2}}],"edges":[{edges}],"hom":{{{hom}}}}}"#)).unwrap();
    build_gos(&j.to_data().unwrap()).unwrap().built.gos
}

fn conjugation() -> Gos {
    hnn(r#"{"type":"hnn","vertices":[0],"words":["a","b"]}"#, r#""0.a":"a","0.b":"baB","t0":"b""#)
}

fn torus() -> Gos {
    build(&identity_torus(&[1, 2], 2)).unwrap().gos
}

/// Betti numbers of the components of the horizontal graph, sorted.
fn horizontal_bettis(x: &Gos) -> Vec<i64> {
    let h = x.horizontal();
    let (comp, k) = h.graph.components();
    let mut nv = vec![0i64; k];
    let mut ne = vec![0i64; k];
    for &c in &comp {
        nv[c] += 1;
    }
    for &(a, _) in &h.graph.edges {
        ne[comp[a]] += 1;
    }
    let mut b: Vec<i64> = (0..k).map(|c| ne[c] - nv[c] + 1).collect();
    b.sort_unstable();
    b
}

/// Minimized random spaces that are separable.
fn separable_seeds(n: u64) -> impl Iterator<Item = (u64, Gos)> {
    (0..n).filter_map(|seed| {
        let m = random_gos(seed, &GenParams::default()).built.gos.minimize().ok()?;
        m.gos.separability().separable.then_some((seed, m.gos))
    })
}

#[test]
fn conjugation_instance_is_already_bad() {
    let x = conjugation().minimize().unwrap().gos;
    let r = split_to_bad(&x).unwrap();
    assert!(r.trace.is_empty());
    assert!(every_component_has_bad_cylinder(&r.gos));
}

#[test]
fn torus_has_no_splitting_vertex() {
    let x = torus();
    assert!(matches!(find_splitting_vertex(&x), Err(SplitError::Precondition(_))));
    let m = x.minimize().unwrap().gos;
    let r = split_to_bad(&m).unwrap();
    assert!(r.trace.is_empty());
}

#[test]
fn bad_cylinder_is_a_precondition_failure() {
    let x = conjugation().minimize().unwrap().gos;
    for comp in x.irreducible_components() {
        let err = find_splitting_vertex(&comp.gos.reduce().0).unwrap_err();
        assert!(matches!(err, SplitError::Precondition(_)), "{err}");
    }
}

#[test]
fn constant_push_is_identity() {
    let x = torus();
    let cyl = Cylinders::build(&x);
    let start = PushPoint {
        at_vertex: false,
        circle: 0,
        pos: 0,
    };
    let t = push(&x, &cyl, 0, start, &[]).unwrap();
    assert_eq!(t.points, vec![start]);
}

#[test]
fn one_edge_push_in_torus_moves_along_the_circle() {
    let x = torus();
    let cyl = Cylinders::build(&x);
    let start = PushPoint {
        at_vertex: false,
        circle: 0,
        pos: 0,
    };
    let (e, _) = cyl.circle_segment(0, 0);
    let fwd = cyl.circles[0].darts[0];
    let d = if is_forward(fwd) { 2 * e } else { 2 * e + 1 };
    let t = push(&x, &cyl, 0, start, &[d]).unwrap();
    assert_eq!(
        t.points[1],
        PushPoint {
            at_vertex: true,
            circle: 0,
            pos: 1
        }
    );
    let t = push(&x, &cyl, 0, start, &[d ^ 1]).unwrap();
    assert_eq!(
        t.points[1],
        PushPoint {
            at_vertex: true,
            circle: 0,
            pos: 0
        }
    );
}

#[test]
fn transverse_graphs_push_as_a_whole() {
    for (_, x) in separable_seeds(150) {
        let cyl = Cylinders::build(&x);
        for (k, c) in cyl.cylinders.iter().enumerate() {
            for f in &c.edge_spaces {
                let e = cyl.circle_segment(f.nodes[0].0, f.nodes[0].1).0;
                for d in [2 * e, 2 * e + 1] {
                    let landed: BTreeSet<usize> = f
                        .nodes
                        .iter()
                        .map(|&(circle, pos)| {
                            let p = PushPoint { at_vertex: false, circle, pos };
                            *push(&x, &cyl, k, p, &[d]).unwrap().fibers.last().unwrap()
                        })
                        .collect();
                    assert_eq!(landed.len(), 1);
                }
            }
        }
    }
}

#[test]
fn found_splitting_vertices_satisfy_the_definition() {
    let mut found = 0;
    for (seed, x) in separable_seeds(600) {
        for comp in x.irreducible_components() {
            let r = comp.gos.reduce().0;
            if r.chi_underlying() >= 0 || !Cylinders::build(&r).all_good() {
                continue;
            }
            let sv = find_splitting_vertex(&r).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            found += 1;
            let cyl = Cylinders::build(&r);
            let per = all_peripheral_elements(&r, &cyl).unwrap();
            assert_eq!(check_splitting_vertex(&r, &per, sv.vertex, sv.primary).unwrap().outgoing, sv.outgoing);
            assert!(per.contains(&sv.peripheral));
            assert_ne!(r.tail(sv.outgoing), sv.vertex);
            if let Some(t) = &sv.push {
                let last = t.points.last().unwrap();
                assert!(last.at_vertex);
                assert_eq!(cyl.circle_point(last.circle, last.pos), (sv.vertex, sv.w));
                assert_eq!(*t.path.last().unwrap(), sv.primary);
            }
        }
    }
    assert!(found > 0);
}

#[test]
fn splits_decrease_relative_weight_or_disconnect() {
    let mut moves = 0;
    for (seed, x) in separable_seeds(600) {
        let before = horizontal_bettis(&x);
        let r = split_to_bad(&x).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        r.gos.validate().unwrap();
        for m in &r.trace {
            assert!(m.weight_zero_edge || m.relative_after.is_some_and(|a| a < m.relative_before), "seed {seed}");
        }
        moves += r.trace.len();
        assert_eq!(horizontal_bettis(&r.gos), before, "seed {seed}");
        for comp in r.gos.irreducible_components() {
            let c = comp.gos.reduce().0;
            assert!(c.chi_underlying() >= 0 || !Cylinders::build(&c).all_good(), "seed {seed}");
        }
    }
    assert!(moves > 0);
}

#[test]
fn split_is_deterministic() {
    for (_, x) in separable_seeds(200).take(40) {
        let a = split_to_bad(&x).unwrap();
        let b = split_to_bad(&x).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.gos.canonical_form(), b.gos.canonical_form());
    }
}

#[test]
fn peripheral_elements_of_conjugation_instance() {
    // before minimizing every edge space is crossed by the one cylinder
    let x = conjugation();
    let cyl = Cylinders::build(&x);
    let mut total = 0;
    for e in 0..x.n_edges() {
        if x.edge_weight(e) > 0 {
            let p = peripheral_elements(&x, &cyl, e).unwrap();
            total += p.len();
            assert!(p.iter().all(|q| q.edge == e && q.cylinder == 0));
        }
    }
    assert!(total > 0);
}
