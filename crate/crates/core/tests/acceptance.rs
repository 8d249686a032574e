//! The nine acceptance criteria. Runs without the libtest harness so that
//! each criterion prints its line even when the run passes.

use std::collections::{HashSet, VecDeque};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gos_core::construct::{bounded_corank_search, build_gos, primitive_root_instance, AdjoinRoot, PrimitiveRootInstance};
use gos_core::cylinders::Cylinders;
use gos_core::gen::{random_gos, GenParams};
use gos_core::gos::{Gos, VertexClass};
use gos_core::graph::Graph;
use gos_core::io::Instance;
use gos_core::oracle::{brute_is_primitive, minimality_check, Corpus};
use gos_core::reports::{corollary_report, find_root_homomorphism, theorem_report, Factor};
use gos_core::splitting::split_to_bad;
use gos_core::uot::{self, Half, ZClass};
use gos_core::words::{is_conjugate, reduce, Letter, Word};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn primitive_roots() -> Vec<PrimitiveRootInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..20).map(|i| primitive_root_instance(2 + i % 2, 2 + (i / 2) % 2, &mut rng)).collect()
}

fn root_hom(p: &PrimitiveRootInstance) -> (Vec<Vec<Letter>>, Vec<Vec<Letter>>) {
    let d = &p.gofg;
    (d.images[0].clone(), d.images[1..].iter().map(|im| im[0].clone()).collect())
}

/// Graphs of spaces of the instance files shipped in `corpus/`, with the
/// root multiplicities of adjoin-root files. Files whose group-theoretic
/// preconditions fail are skipped.
fn file_spaces() -> (Vec<(String, Gos, Option<usize>)>, Vec<String>) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut names: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    for path in names {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let Ok((inst, _)) = Instance::load(&fs::read_to_string(&path).unwrap()) else {
            skipped.push(name);
            continue;
        };
        let entry = match inst {
            Instance::RawGos { gos, .. } => gos.validate().ok().map(|_| (gos, None)),
            Instance::HnnConjugacy(d) => build_gos(&d).ok().map(|b| (b.built.gos, None)),
            Instance::AdjoinRoot { data, hom } => {
                let k = data.roots[0].1;
                hom.or_else(|| find_root_homomorphism(&data, 3, false))
                    .and_then(|h| data.to_gofg(h.0, h.1, data.rank).ok())
                    .and_then(|d| build_gos(&d).ok())
                    .map(|b| (b.built.gos, Some(k)))
            }
            Instance::UnionOfTrees(_) => continue,
        };
        match entry {
            Some((x, k)) => out.push((name, x, k)),
            None => skipped.push(name),
        }
    }
    (out, skipped)
}

fn c1_euler() -> Outcome {
    let t = Instant::now();
    let bad: Vec<u64> = (0..500)
        .filter(|&s| {
            let x = random_gos(s, &GenParams::default()).built.gos;
            x.chi_horizontal() > x.chi_underlying()
        })
        .collect();
    let el = t.elapsed();
    outcome(
        bad.is_empty() && el < Duration::from_secs(10),
        format!("χ(Γ) ≤ χ(Γ_U) on {}/500 seeds in {}", 500 - bad.len(), secs(el)),
    )
}

fn c2_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut done, mut agreed) = (0, 0);
    let mut first = None;
    let mut seed = 0u64;
    while done < 200 {
        let x = random_gos(seed, &GenParams::default()).built.gos;
        seed += 1;
        let vs: Vec<usize> = (0..x.n_vertices()).filter(|&v| x.valence(v) >= 2).collect();
        let Some(&v) = vs.choose(&mut rng) else { continue };
        let mut inc = x.incident(v);
        inc.shuffle(&mut rng);
        let size = if inc.len() > 2 { rng.gen_range(1..=2) } else { 1 };
        let j = &inc[..size];
        let (y, _) = x.fold(v, j).unwrap();
        let new: Vec<usize> = (x.n_edges()..y.n_edges()).collect();
        let back = y.collapse_all(&new).unwrap();
        done += 1;
        if back.canonical_form() == x.canonical_form() {
            agreed += 1;
        } else if first.is_none() {
            first = Some(format!(", first failure seed {} vertex {v} J {j:?}", seed - 1));
        }
    }
    outcome(
        agreed == done,
        format!("{agreed}/{done} folds with |J| ≤ 2 crushed back to the same space{}", first.unwrap_or_default()),
    )
}

fn c3_minimality(corpus: &Corpus) -> Outcome {
    let t = Instant::now();
    let small: Vec<&(String, Gos)> = corpus.spaces.iter().filter(|(_, x)| x.n_edges() <= 5).collect();
    let (mut agreed, mut deeper) = (0, 0);
    let mut first = None;
    for (name, x) in &small {
        let m = x.minimize().unwrap();
        let unfoldable = (0..m.gos.n_vertices()).all(|v| !matches!(m.gos.classify_vertex(v), VertexClass::Foldable { .. }));
        match minimality_check(x, &m.complexity, 4, 6) {
            Ok(d) if unfoldable => {
                agreed += 1;
                deeper += usize::from(d > 4);
            }
            Ok(_) => {
                first.get_or_insert(format!("{name}: a minimized vertex is foldable"));
            }
            Err(e) => {
                first.get_or_insert(format!("{name}: {e}"));
            }
        }
    }
    let el = t.elapsed();
    let n = small.len();
    let mut d = format!("{agreed}/{n} instances with ≤ 5 edges match exhaustive search in {}", secs(el));
    if deeper > 0 {
        d += &format!("; {deeper} beat depth 4 and matched a deeper search");
    }
    if let Some(f) = first {
        d += &format!(", first failure {f}");
    }
    outcome(agreed == n && n >= 30 && el < Duration::from_secs(60), d)
}

fn c4_separability(corpus: &Corpus, roots: &[PrimitiveRootInstance]) -> Outcome {
    let mut spaces: Vec<Gos> = corpus.spaces.iter().map(|(_, x)| x.clone()).collect();
    spaces.extend((0..200).map(|s| random_gos(s, &GenParams::default()).built.gos));
    spaces.extend(roots.iter().map(|p| build_gos(&p.gofg).unwrap().built.gos));
    let (mut equal, mut separable, mut other) = (0, 0, 0);
    for x in &spaces {
        let m = x.minimize().unwrap().gos;
        other += (0..m.n_vertices()).filter(|&v| m.classify_vertex(v) == VertexClass::OtherUnfoldable).count();
        let s = m.separability();
        if s.chi_equal {
            equal += 1;
            separable += usize::from(s.separable);
        }
    }
    outcome(
        separable == equal && other == 0 && equal > 0,
        format!(
            "{separable}/{equal} minimized spaces with χ equality are separable ({} minimized); {other} unclassified vertices",
            spaces.len()
        ),
    )
}

fn c5_theorem(roots: &[PrimitiveRootInstance]) -> Outcome {
    let mut ok = 0;
    let mut first = None;
    for (i, p) in roots.iter().enumerate() {
        let r = theorem_report(&p.data, Some(root_hom(p)), 0, false).unwrap();
        let (gamma, _) = &p.data.roots[0];
        let trees = r.edge_trees_built && r.edge_trees_minimized;
        let factor = r.roots[0].primitive && brute_is_primitive(gamma, p.data.rank);
        if r.verdict && trees && factor {
            ok += 1;
        } else {
            first.get_or_insert(format!(", first failure instance {i}: trees {trees}, factor {factor}"));
        }
    }
    outcome(
        ok == roots.len(),
        format!(
            "{ok}/{} adjoin-root instances: edge spaces are trees and ⟨γ⟩ is a free factor{}",
            roots.len(),
            first.unwrap_or_default()
        ),
    )
}

/// Substitutes `images` for the generators of `w` and freely reduces.
fn substitute(images: &[Vec<Letter>], w: &[Letter]) -> Vec<Letter> {
    let mut out = Vec::new();
    for &l in w {
        let im = &images[l.unsigned_abs() as usize - 1];
        if l > 0 {
            out.extend(im.iter().copied());
        } else {
            out.extend(im.iter().rev().map(|x| -x));
        }
    }
    reduce(&out)
}

/// Whether every basis letter of the free group of rank `n` is a product of
/// at most `depth` of the given words and their inverses.
fn generates(words: &[Vec<Letter>], n: usize, depth: usize) -> bool {
    let mut gens: Vec<Vec<Letter>> = words.to_vec();
    gens.extend(words.iter().map(|w| w.iter().rev().map(|x| -x).collect()));
    let mut seen: HashSet<Vec<Letter>> = HashSet::from([Vec::new()]);
    let mut queue = VecDeque::from([(Vec::new(), 0)]);
    while let Some((w, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for g in &gens {
            let mut v = w.clone();
            v.extend(g.iter().copied());
            let v = reduce(&v);
            if seen.insert(v.clone()) {
                queue.push_back((v, d + 1));
            }
        }
    }
    (1..=n as Letter).all(|x| seen.contains(&vec![x]))
}

fn c6_corank() -> Outcome {
    let t = Instant::now();
    let commutator = AdjoinRoot {
        rank: 2,
        roots: vec![(vec![1, 2, -1, -2], 2)],
    }
    .presentation();
    let none = bounded_corank_search(&commutator, 2, 4, false).is_none();
    let ab = AdjoinRoot {
        rank: 2,
        roots: vec![(vec![1, 2], 2)],
    }
    .presentation();
    let witness = bounded_corank_search(&ab, 2, 2, false);
    let verified = witness
        .as_ref()
        .is_some_and(|w| ab.relators.iter().all(|r| substitute(w, r).is_empty()) && generates(w, 2, 4));
    let el = t.elapsed();
    outcome(
        none && verified && el < Duration::from_secs(120),
        format!(
            "c² = [a,b]: none up to length 4 {none}; c² = ab: witness at length 2 verified {verified}; {}",
            secs(el)
        ),
    )
}

fn c7_corollary() -> Outcome {
    let json = r#"{"formatVersion":1,"kind":"hnn-conjugacy","payload":{"alphabetRank":2,"vertices":[{"rank":2}],
        "edges":[{"type":"hnn","vertices":[0],"words":["a","b"]}],"hom":{"0.a":"a","0.b":"baB","t0":"b"}}}"#;
    let Ok((Instance::HnnConjugacy(d), _)) = Instance::load(json) else {
        return outcome(false, "instance did not load");
    };
    let x = build_gos(&d).unwrap().built.gos;
    let m = x.minimize().unwrap().gos;
    let split = split_to_bad(&m).map(|s| Cylinders::build(&s.gos).cylinders.iter().any(|c| !c.good));
    let r = corollary_report(&d).unwrap();
    let again = corollary_report(&d).unwrap();
    let deterministic = serde_json::to_string(&r).unwrap() == serde_json::to_string(&again).unwrap();
    let coords = |s: &str| Word::parse(s, 2).unwrap().0;
    let z = coords(&r.z_coordinates);
    let f1: Vec<Vec<Letter>> = r.f1_coordinates.iter().map(|s| coords(s)).collect();
    let mut basis = f1.clone();
    basis.push(z.clone());
    let factorization = brute_is_primitive(&z, 2) && basis.len() == 2 && generates(&basis, 2, 4);
    let power = |g: &[Letter], w: &[Letter]| {
        (1..=w.len()).any(|m| {
            let p: Vec<Letter> = g.iter().copied().cycle().take(m * g.len()).collect();
            let q: Vec<Letter> = p.iter().rev().map(|x| -x).collect();
            is_conjugate(w, &p) || is_conjugate(w, &q)
        })
    };
    let placed = !r.placements.is_empty()
        && r.placements.iter().all(|p| {
            let w = coords(&p.coordinates);
            match p.factor {
                Some(Factor::Z) => power(&z, &w),
                Some(Factor::F1) => f1.len() == 1 && power(&f1[0], &w),
                None => false,
            }
        });
    let bad = matches!(split, Ok(true));
    outcome(
        bad && r.verdict && factorization && placed && deterministic,
        format!(
            "t a t⁻¹ = b: bad cylinder after splitting {bad}; F = {} * ⟨{}⟩ with z primitive {factorization}; {} edge words placed by conjugacy {placed}; deterministic {deterministic}",
            r.f1.iter().map(|w| format!("⟨{w}⟩")).collect::<Vec<_>>().join(" * "),
            r.z,
            r.placements.len()
        ),
    )
}

fn c8_unions(corpus: &Corpus) -> Outcome {
    let zs: Vec<&uot::UnionOfTrees> = corpus.unions.iter().map(|(_, z)| z).collect();
    let (mut balance, mut products, mut zero, mut leaves, mut z3, mut pbound) = (0, 0, 0, 0, 0, 0);
    let mut marked_zero = 0;
    let mut marked_nonproduct = 0;
    for z in &zs {
        let d = uot::deltas(z);
        let kb = uot::kappa_balance(z);
        balance += usize::from(kb.holds);
        if d.class == ZClass::Z3 {
            z3 += 1;
            pbound += usize::from(Half(2 * d.p_minus) >= Half(2 * d.q_plus.0));
        }
        if d.q_minus != Half::ZERO {
            continue;
        }
        let p = uot::try_product_decomposition(z);
        if z.y_count() > 0 {
            marked_zero += 1;
            marked_nonproduct += usize::from(p.is_err());
            continue;
        }
        zero += 1;
        if let Ok(p) = p {
            if uot::same_union(z, &uot::reassemble(&z.trees, &p)) {
                products += 1;
            }
            leaves += usize::from(uot::leaf_space(z).is_ok_and(|l| l.all_hold()));
        }
    }
    let n = zs.len();
    outcome(
        n >= 200 && balance == n && products == zero && leaves == zero && pbound == z3,
        format!(
            "κ balance {balance}/{n}; unmarked Δ_q^- = 0: product and reassembly {products}/{zero}, leaf space a tree with matching κ {leaves}/{zero}; Δ_p^- ≥ 2Δ_q^+ {pbound}/{z3}; marked Δ_q^- = 0 not a product {marked_nonproduct}/{marked_zero}"
        ),
    )
}

fn partition_holds(x: &Gos) -> bool {
    let c = Cylinders::build(x);
    let total: usize = x.edge_graphs.iter().map(Graph::n_edges).sum();
    let mut seen = HashSet::new();
    let once = c.annuli.iter().flat_map(|a| &a.steps).all(|s| seen.insert((s.square.edge, s.square.cell)));
    once && seen.len() == total && c.square_count() == total
}

fn inner_windings(x: &Gos) -> Vec<usize> {
    let c = Cylinders::build(x);
    c.attachments.iter().filter(|a| !c.circles[a.circle].infinite).map(|a| a.winding).collect()
}

fn c9_cylinders(corpus: &Corpus, roots: &[PrimitiveRootInstance]) -> Outcome {
    let (files, skipped) = file_spaces();
    let mut spaces: Vec<(Gos, Option<usize>)> = corpus.spaces.iter().map(|(_, x)| (x.clone(), None)).collect();
    spaces.extend(files.into_iter().map(|(_, x, k)| (x, k)));
    spaces.extend(roots.iter().map(|p| (build_gos(&p.gofg).unwrap().built.gos, Some(p.data.roots[0].1))));
    let (mut parts, mut checked, mut winds, mut rooted) = (0, 0, 0, 0);
    for (x, k) in &spaces {
        let m = x.minimize().unwrap().gos;
        checked += 2;
        parts += usize::from(partition_holds(x)) + usize::from(partition_holds(&m));
        if let Some(k) = k {
            rooted += 1;
            let w = inner_windings(&m);
            winds += usize::from(!w.is_empty() && w.iter().all(|w| w == k));
        }
    }
    outcome(
        parts == checked && winds == rooted,
        format!("squares partitioned in {parts}/{checked} spaces (built and minimized); root circles wound k times in {winds}/{rooted}; corpus files failing their preconditions: {}", skipped.join(", ")),
    )
}

fn main() -> ExitCode {
    let corpus = Corpus::standard();
    let roots = primitive_roots();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("euler characteristic", Box::new(c1_euler)),
        ("fold/collapse round trip", Box::new(c2_round_trip)),
        ("minimization optimality", Box::new(|| c3_minimality(&corpus))),
        ("separability", Box::new(|| c4_separability(&corpus, &roots))),
        ("edge spaces are trees", Box::new(|| c5_theorem(&roots))),
        ("bounded corank search", Box::new(c6_corank)),
        ("bad cylinder factorization", Box::new(c7_corollary)),
        ("union-of-trees identities", Box::new(|| c8_unions(&corpus))),
        ("cylinder partition", Box::new(|| c9_cylinders(&corpus, &roots))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("criterion {} {:<28} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
