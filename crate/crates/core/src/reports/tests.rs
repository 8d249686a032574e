use super::*;
use crate::construct::GofgJson;

fn gofg(json: &str) -> GraphOfFreeGroups {
    serde_json::from_str::<GofgJson>(json).unwrap().to_data().unwrap()
}

fn hnn() -> GraphOfFreeGroups {
    gofg(
        r#"{"alphabetRank":2,"vertices":[{"rank":2}],
            "edges":[{"type":"hnn","vertices":[0],"words":["a","b"]}],
            "hom":{"0.a":"a","0.b":"baB","t0":"b"}}"#,
    )
}

fn swap() -> GraphOfFreeGroups {
    gofg(
        r#"{"alphabetRank":2,"vertices":[{"rank":2}],
            "edges":[{"type":"hnn","vertices":[0],"words":["a","b"]},
                     {"type":"hnn","vertices":[0],"words":["b","a"]}],
            "hom":{"0.a":"a","0.b":"baB","t0":"b","t1":"B"}}"#,
    )
}

#[test]
fn hnn_splits_off_one_of_the_two_circles() {
    let r = corollary_report(&hnn()).unwrap();
    assert!(r.verdict, "{:#?}", r.claims);
    assert!(r.claims.iter().all(|c| c.holds), "{:#?}", r.claims);
    assert_eq!(r.f1.len(), 1);
    let zs = r.placements.iter().filter(|p| p.factor == Some(Factor::Z)).count();
    let fs = r.placements.iter().filter(|p| p.factor == Some(Factor::F1)).count();
    assert_eq!((zs, fs), (1, 1));
}

#[test]
fn corollary_report_is_deterministic() {
    let a = serde_json::to_string(&corollary_report(&hnn()).unwrap()).unwrap();
    let b = serde_json::to_string(&corollary_report(&hnn()).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn two_stable_letters_form_one_class() {
    let r = corollary_report(&swap()).unwrap();
    assert_eq!(r.class_of, vec![0, 0]);
    assert!(r.verdict, "{:#?}", r.claims);
}

#[test]
fn singleton_class_is_a_hypothesis_failure() {
    let d = gofg(
        r#"{"alphabetRank":2,"vertices":[{"rank":2}],
            "edges":[{"type":"hnn","vertices":[0],"words":["a","a"]}],
            "hom":{"0.a":"a","0.b":"b","t0":"b"}}"#,
    );
    assert!(matches!(corollary_report(&d), Err(ReportError::Hypothesis(_))));
}

#[test]
fn root_of_ab_is_a_free_factor() {
    let a = AdjoinRoot {
        rank: 2,
        roots: vec![(vec![1, 2], 2)],
    };
    let r = theorem_report(&a, None, 2, false).unwrap();
    assert!(r.verdict, "{:#?}", r);
    assert!(r.summary.contains(&"edge spaces: trees".to_string()));
    assert!(r.summary.contains(&"factor: ⟨ab⟩ primitive".to_string()));
}

#[test]
fn cube_root_of_a_letter() {
    let a = AdjoinRoot {
        rank: 2,
        roots: vec![(vec![1], 3)],
    };
    let r = theorem_report(&a, None, 3, false).unwrap();
    assert!(r.verdict, "{:#?}", r);
}

#[test]
fn root_of_aabb_has_no_short_homomorphism() {
    let a = AdjoinRoot {
        rank: 2,
        roots: vec![(vec![1, 1, 2, 2], 2)],
    };
    assert!(matches!(theorem_report(&a, None, 2, false), Err(ReportError::Hypothesis(_))));
}

#[test]
fn generated_primitive_roots_cross_an_edge_once() {
    use rand::SeedableRng;
    let mut hits = [0usize; 2];
    for seed in 0..40 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let k = 2 + (seed as usize % 2);
        let inst = crate::construct::primitive_root_instance(2 + (seed as usize % 2), k, &mut rng);
        let d = &inst.gofg;
        let phi = (d.images[0].clone(), d.images[1..].iter().map(|im| im[0].clone()).collect());
        let r = theorem_report(&inst.data, Some(phi), 0, false).unwrap();
        assert!(r.verdict, "seed {seed}: {:#?}", r);
        let c = r.roots[0].crossing.as_ref().unwrap();
        hits[usize::from(c.space == "built")] += 1;
    }
    eprintln!("crossings found in minimized/built: {hits:?}");
}

#[test]
fn hnn_factors_are_generated_by_basis_letters() {
    let r = corollary_report(&hnn()).unwrap();
    assert_eq!(r.circle_label, "a");
    assert_eq!(r.f1_coordinates.len(), 1);
    assert_eq!(r.f1_coordinates[0].len(), 1);
    assert_eq!(r.z_coordinates.len(), 1);
    assert_ne!(r.f1_coordinates[0].to_lowercase(), r.z_coordinates.to_lowercase());
}
