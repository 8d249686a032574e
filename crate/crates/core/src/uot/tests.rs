use super::*;
use proptest::prelude::*;

fn interval() -> Tree {
    Tree {
        parent: vec![None, Some(0)],
        boundary: vec![true, true],
        y: Vec::new(),
    }
}

/// Boundary leaf 0, marked leaf 1.
fn y_interval() -> Tree {
    Tree {
        parent: vec![None, Some(0)],
        boundary: vec![true, false],
        y: vec![false, true],
    }
}

/// Leaves 1, 2, 3 around the center 0.
fn tripod() -> Tree {
    Tree {
        parent: vec![None, Some(0), Some(0), Some(0)],
        boundary: vec![false, true, true, true],
        y: Vec::new(),
    }
}

fn at(tree: usize, path: &[usize]) -> Attach {
    Attach { tree, path: path.to_vec() }
}

fn rect(minus: Attach, plus: Attach) -> Rectangle {
    Rectangle { minus, plus }
}

fn mobius() -> UnionOfTrees {
    UnionOfTrees {
        trees: vec![interval(), interval()],
        rectangles: vec![rect(at(0, &[0, 1]), at(1, &[0, 1])), rect(at(0, &[0, 1]), at(1, &[1, 0]))],
    }
}

/// Three intervals in a row, the last glued back to the first with a twist.
fn rpath3() -> UnionOfTrees {
    UnionOfTrees {
        trees: vec![interval(), interval(), interval()],
        rectangles: vec![
            rect(at(0, &[0, 1]), at(1, &[0, 1])),
            rect(at(1, &[0, 1]), at(2, &[0, 1])),
            rect(at(2, &[0, 1]), at(0, &[1, 0])),
        ],
    }
}

/// A tripod with a marked interval hung on each of its three paths by a
/// rectangle turning back at the mark.
fn tripod_of_marks() -> UnionOfTrees {
    UnionOfTrees {
        trees: vec![tripod(), y_interval(), y_interval(), y_interval()],
        rectangles: vec![
            rect(at(0, &[1, 0, 2]), at(1, &[0, 1, 0])),
            rect(at(0, &[2, 0, 3]), at(2, &[0, 1, 0])),
            rect(at(0, &[3, 0, 1]), at(3, &[0, 1, 0])),
        ],
    }
}

#[test]
fn half_prints_and_round_trips() {
    assert_eq!(Half(3).to_string(), "3/2");
    assert_eq!(Half(-4).to_string(), "-2");
    let s = serde_json::to_string(&Half(1)).unwrap();
    assert_eq!(s, "0.5");
    assert_eq!(serde_json::from_str::<Half>(&s).unwrap(), Half(1));
    assert!(serde_json::from_str::<Half>("0.3").is_err());
}

#[test]
fn kappa_of_small_spaces() {
    assert_eq!(kappa(&interval()), Half(0));
    assert_eq!(kappa(&tripod()), Half(1));
    let mut rose = Graph::new(1);
    rose.add_edge(0, 0);
    rose.add_edge(0, 0);
    assert_eq!(kappa_graph(&rose, 0), Half(2));
    assert_eq!(kappa_graph(&tripod().graph(), 3), Half(1));
}

/// Breadth-first search from `a`, read back from `b`.
fn bfs_path(t: &Tree, a: usize, b: usize) -> Vec<usize> {
    let nb = t.neighbours();
    let mut prev = vec![usize::MAX; t.n()];
    prev[a] = a;
    let mut q = VecDeque::from([a]);
    while let Some(v) = q.pop_front() {
        for &w in &nb[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                q.push_back(w);
            }
        }
    }
    let mut p = vec![b];
    while *p.last().unwrap() != a {
        p.push(prev[*p.last().unwrap()]);
    }
    p.reverse();
    p
}

#[test]
fn tree_paths_match_breadth_first_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let t = random_tree(
            &UotParams {
                max_tree_vertices: 9,
                ..UotParams::default()
            },
            true,
            &mut rng,
        );
        for a in 0..t.n() {
            for b in 0..t.n() {
                assert_eq!(t.path(a, b), bfs_path(&t, a, b));
            }
        }
    }
}

#[test]
fn validation_rejects_malformed_input() {
    let mut z = mobius();
    assert!(z.validate().is_ok());
    z.trees[0].boundary[1] = false;
    assert!(matches!(z.validate(), Err(UotError::Tree(0, _))));

    let mut z = tripod_of_marks();
    z.rectangles[0].minus.path = vec![1, 0, 1];
    assert!(matches!(z.validate(), Err(UotError::Rectangle(0, _))));

    let mut z = mobius();
    z.trees.push(interval());
    assert_eq!(z.validate(), Err(UotError::Disconnected));

    let mut z = mobius();
    z.trees[1].parent = vec![Some(1), Some(0)];
    assert!(z.validate().is_err());
}

#[test]
fn twisted_pair_is_flagged() {
    let z = mobius();
    let d = deltas(&z);
    assert_eq!((d.class, d.q_minus, d.q_plus), (ZClass::Z2, Half(1), Half::ZERO));
    assert_eq!((d.p_minus, d.p_plus), (0, 1));
    assert!(d.z2_flag);
    assert!(!is_treelike(&z));
    assert!(matches!(product_decomposition(&z), Err(UotError::NotTreelike(_))));
    assert!(try_product_decomposition(&z).is_err());
    assert!(kappa_balance(&z).holds);
}

#[test]
fn rpath3_has_a_half_and_is_not_treelike() {
    let z = rpath3();
    z.validate().unwrap();
    let d = deltas(&z);
    assert_eq!((d.boundary_t, d.boundary), (2, 1));
    assert_eq!(d.q_minus, Half(1));
    assert!(d.z2_flag);
    assert!(!is_treelike(&z));
    let k = kappa_balance(&z);
    assert_eq!((k.lhs, k.rhs), (Half(-1), Half(-1)));
}

#[test]
fn tripod_of_marks_has_one_boundary_component() {
    let z = tripod_of_marks();
    z.validate().unwrap();
    let d = deltas(&z);
    assert_eq!(d.class, ZClass::Z3);
    assert_eq!((d.boundary_t, d.betti_t), (1, 1));
    assert_eq!(d.p_minus, 2);
    assert_eq!(d.q_plus, Half(1));
    let k = kappa_balance(&z);
    assert!(k.holds);
    assert_eq!(k.p_bound, Some(true));
    // with two marked pieces the bound is attained
    let two = UnionOfTrees {
        trees: vec![y_interval(), y_interval()],
        rectangles: vec![rect(at(0, &[0, 1, 0]), at(1, &[0, 1, 0]))],
    };
    let d = deltas(&two);
    assert_eq!((d.p_minus, d.q_plus), (1, Half(1)));
}

#[test]
fn untwisted_pair_is_one_band() {
    let mut z = mobius();
    z.rectangles[1].plus.path = vec![0, 1];
    let d = deltas(&z);
    assert_eq!((d.class, d.q_minus), (ZClass::Z1, Half::ZERO));
    let p = product_decomposition(&z).unwrap();
    assert_eq!(p.bands.len(), 1);
    assert_eq!(p.bands[0].nodes.len(), 2);
    assert_eq!(p.bands[0].edges.len(), 2);
    assert!(same_union(&reassemble(&z.trees, &p), &z));
    let l = leaf_space(&z).unwrap();
    assert!(l.all_hold());
    assert_eq!((l.graph.n_vertices, l.graph.n_edges()), (2, 1));
}

#[test]
fn interval_on_a_tripod_folds_into_it() {
    let z = UnionOfTrees {
        trees: vec![tripod(), interval()],
        rectangles: vec![rect(at(0, &[1, 0, 2]), at(1, &[1, 0]))],
    };
    z.validate().unwrap();
    let l = leaf_space(&z).unwrap();
    assert!(l.all_hold(), "{l:?}");
    assert_eq!((l.graph.n_vertices, l.graph.n_edges()), (4, 3));
    assert_eq!((l.kappa, l.kappa_z), (Half(1), Half(1)));
}

#[test]
fn json_round_trip() {
    let z = tripod_of_marks();
    let s = serde_json::to_string(&UotJson {
        format_version: FORMAT_VERSION,
        z: z.clone(),
    })
    .unwrap();
    assert!(s.contains("\"1-0-2\""));
    let back: UotJson = serde_json::from_str(&s).unwrap();
    assert_eq!(back.z, z);
}

#[test]
fn random_unions_are_valid_and_deterministic() {
    let p = UotParams::default();
    for seed in 0..200 {
        let z = random_union(seed, &p);
        z.validate().unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(z, random_union(seed, &p));
    }
}

#[test]
fn unmarked_deltas_do_not_depend_on_the_maximal_tree() {
    let p = UotParams::default();
    let (mut unmarked, mut marked_dependent) = (0, 0);
    for seed in 0..300 {
        let z = random_union(seed, &p);
        let d = deltas(&z);
        let trees = z.maximal_trees(64);
        if d.class == ZClass::Z3 {
            // only the common shift of Δ_q^- and Δ_q^+ may change
            for t in &trees {
                let e = deltas_with(&z, t);
                assert_eq!(e.q_plus - e.q_minus, d.q_plus - d.q_minus, "seed {seed}");
            }
            marked_dependent += trees.iter().any(|t| deltas_with(&z, t) != d) as usize;
            continue;
        }
        unmarked += 1;
        for t in &trees {
            assert_eq!(deltas_with(&z, t), d, "seed {seed}");
        }
    }
    assert!(unmarked >= 100 && marked_dependent > 0, "{unmarked} {marked_dependent}");
}

/// A marked interval and a path through a marked middle vertex, joined by
/// one rectangle turning back in both and one passing straight through.
fn marked_pair() -> UnionOfTrees {
    let through = Tree {
        parent: vec![None, Some(0), Some(1)],
        boundary: vec![true, false, true],
        y: vec![false, true, false],
    };
    UnionOfTrees {
        trees: vec![y_interval(), through],
        rectangles: vec![rect(at(0, &[0, 1, 0]), at(1, &[0, 1, 0])), rect(at(0, &[0, 1, 0]), at(1, &[0, 1, 2]))],
    }
}

#[test]
fn marked_deltas_depend_on_the_maximal_tree() {
    let z = marked_pair();
    z.validate().unwrap();
    let first = deltas_with(&z, &[true, false]);
    let second = deltas_with(&z, &[false, true]);
    assert_eq!((first.q_minus, first.q_plus, first.betti_t), (Half(1), Half(1), 1));
    assert_eq!((second.q_minus, second.q_plus, second.betti_t), (Half::ZERO, Half::ZERO, 0));
    assert_eq!(deltas(&z), first);
    assert!(kappa_balance(&z).holds);
}

#[test]
fn random_unions_satisfy_the_balance_and_structure() {
    let p = UotParams::default();
    let (mut treelike, mut spaces, mut z3) = (0, 0, 0);
    for seed in 0..200 {
        let z = random_union(seed, &p);
        let d = deltas(&z);
        let k = kappa_balance(&z);
        assert!(k.holds, "seed {seed}: {k:?}");
        if d.class == ZClass::Z3 {
            z3 += 1;
            assert_eq!(k.p_bound, Some(true), "seed {seed}");
        }
        if !is_treelike(&z) {
            continue;
        }
        treelike += 1;
        let pd = match product_decomposition(&z) {
            Ok(pd) => pd,
            Err(e) => {
                assert_eq!(d.class, ZClass::Z3, "seed {seed}: {e}");
                continue;
            }
        };
        assert!(same_union(&reassemble(&z.trees, &pd), &z), "seed {seed}");
        if d.class != ZClass::Z3 {
            let l = leaf_space(&z).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert!(l.all_hold(), "seed {seed}: {l:?}");
            spaces += 1;
        }
    }
    assert!(treelike >= 60 && spaces >= 40 && z3 >= 20, "{treelike} {spaces} {z3}");
}

#[test]
fn twisted_self_gluing_beside_a_mark_is_not_a_product() {
    let z = random_union(26, &UotParams::default());
    let d = deltas(&z);
    assert_eq!((d.class, d.q_minus), (ZClass::Z3, Half::ZERO));
    assert!(matches!(try_product_decomposition(&z), Err(UotError::NotProduct(_))));
}

proptest! {
    #[test]
    fn unmarked_product_structure_exactly_when_q_minus_vanishes(seed in any::<u64>()) {
        let z = random_union(seed, &UotParams::default());
        let d = deltas(&z);
        prop_assert!(d.q_minus >= Half::ZERO);
        if d.class != ZClass::Z3 {
            prop_assert_eq!(try_product_decomposition(&z).is_ok(), d.q_minus == Half::ZERO);
            prop_assert_eq!(d.betti_t, 0);
        }
        if d.class == ZClass::Z2 {
            prop_assert!(d.q_minus >= Half(1));
        }
    }

    #[test]
    fn each_tree_rectangle_adds_nothing_or_a_half(seed in any::<u64>()) {
        let z = random_union(seed, &UotParams::default());
        let steps = exhaustion(&z);
        prop_assert_eq!(steps.len(), z.trees.len() - 1);
        for s in &steps {
            prop_assert!(s.excess == Half::ZERO || s.excess == Half(1));
            prop_assert_eq!(s.excess == Half(1), s.closes_loop);
        }
        let total: Half = steps.iter().map(|s| s.excess).sum();
        prop_assert_eq!(total, Half(deltas(&z).betti_t));
    }
}
