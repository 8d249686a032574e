use super::*;
use crate::construct::{apply_all, random_automorphism};
use crate::words::{cyclic_reduce, is_primitive, whitehead_minimize, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Vec<Letter> {
    Word::parse(s, 26).unwrap().0
}

#[test]
fn reduced_word_counts() {
    assert_eq!(all_reduced_words(2, 3).len(), 4 + 12 + 36);
    assert_eq!(whitehead_automorphisms(2).len(), 4 * 4 + 8);
}

#[test]
fn brute_roots() {
    assert_eq!(brute_root_exponent(&p("abab"), 2), Some(2));
    assert_eq!(brute_root_exponent(&p("aab"), 2), Some(1));
    assert_eq!(brute_root_exponent(&p("baBbaBbaB"), 2), Some(3));
    assert_eq!(brute_root_exponent(&p("abBA"), 2), None);
}

#[test]
fn brute_whitehead_lengths() {
    assert_eq!(brute_min_length(&p("abAB"), 2), 4);
    assert_eq!(brute_min_length(&p("ababb"), 2), 1);
    assert_eq!(brute_min_length(&p("aabb"), 2), 4);
    assert_eq!(brute_min_length(&p("aa"), 2), 2);
    assert!(brute_is_primitive(&p("abc"), 3));
    assert!(!brute_is_primitive(&p("abcABC"), 3));
}

#[test]
fn suite_is_green_and_scoped() {
    let mut c = Corpus::standard();
    c.spaces.truncate(6);
    c.unions.truncate(60);
    let rows = oracle_suite(&c, &Scope::default());
    assert_eq!(rows.len(), 7);
    for r in &rows {
        assert!(r.passed() && r.cases > 0, "{r}");
    }
    let rows = oracle_suite(
        &c,
        &Scope {
            modules: vec![Module::Words],
            fault: None,
        },
    );
    assert!(rows.iter().all(|r| r.module == Module::Words));
    assert_eq!(rows.len(), 2);
}

#[test]
fn mutated_fold_is_caught_with_its_location() {
    let mut c = Corpus::standard();
    c.spaces.truncate(6);
    let rows = oracle_suite(
        &c,
        &Scope {
            modules: vec![Module::Gos],
            fault: Some(Fault::MutatedFold),
        },
    );
    let trip = rows.iter().find(|r| r.oracle == "fold/collapse round trip").unwrap();
    assert!(!trip.passed());
    let at = trip.first_failure.as_ref().unwrap();
    assert!(at.starts_with("gos seed") && at.contains("vertex") && at.contains("J ="), "{at}");
    let mins = rows.iter().find(|r| r.oracle == "exhaustive fold minimality").unwrap();
    assert!(mins.passed());
}

fn word(rank: usize, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1..=rank as Letter, any::<bool>()), 1..=max)
        .prop_map(|v| crate::words::reduce(&v.into_iter().map(|(g, s)| if s { -g } else { g }).collect::<Vec<_>>()))
        .prop_filter("nontrivial", |w| !cyclic_reduce(w).is_empty())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn library_root_matches_brute_force(w in word(2, 8)) {
        let (_, k) = crate::words::root(&w).unwrap();
        prop_assert_eq!(Some(k), brute_root_exponent(&w, 2));
    }

    #[test]
    fn powers_have_their_exponent(w in word(2, 4), k in 1usize..4) {
        let r = crate::words::root(&w).unwrap().0;
        let pw: Vec<Letter> = std::iter::repeat(r.iter().copied()).take(k).flatten().collect();
        prop_assert_eq!(crate::words::root(&pw).unwrap().1, k);
    }

    #[test]
    fn whitehead_minimum_matches_exhaustive_rank_two(w in word(2, 7)) {
        prop_assert_eq!(whitehead_minimize(&w, 2).length, brute_min_length(&w, 2));
    }

    #[test]
    fn whitehead_minimum_matches_exhaustive_rank_three(w in word(3, 5)) {
        prop_assert_eq!(whitehead_minimize(&w, 3).length, brute_min_length(&w, 3));
    }

    #[test]
    fn images_of_basis_letters_are_primitive(seed in 0u64..10_000, rank in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = random_automorphism(rank, 4, &mut rng);
        let w = cyclic_reduce(&apply_all(&seq, &[1]));
        prop_assume!(w.len() <= 7);
        prop_assert!(is_primitive(&w, rank));
        prop_assert!(brute_is_primitive(&w, rank));
    }
}
