//! Brute-force cross-checks. Each oracle recomputes a library answer by
//! plain enumeration and shares no search code with the routine it checks.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::gen::{random_gos, GenParams};
use crate::gos::{Complexity, Gos, VertexClass};
use crate::graph::{Graph, Morphism};
use crate::uot::{self, random_union, UnionOfTrees, UotParams};
use crate::words::{self, Letter};

fn free_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn cyclically_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.pop();
        w.remove(0);
    }
    w
}

/// Smallest rotation of a cyclically reduced word, ordered by letter value.
fn cyclic_key(w: &[Letter]) -> Vec<Letter> {
    (0..w.len().max(1))
        .map(|i| w[i..].iter().chain(&w[..i]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Every reduced word over `rank` generators of length `1..=max`.
pub fn all_reduced_words(rank: usize, max: usize) -> Vec<Vec<Letter>> {
    let letters: Vec<Letter> = (1..=rank as Letter).flat_map(|i| [i, -i]).collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() != Some(&-l) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Largest `k` with `w` conjugate to some `u^k`, found by trying every
/// reduced `u` no longer than `w`.
pub fn brute_root_exponent(w: &[Letter], rank: usize) -> Option<usize> {
    let c = cyclically_reduce(w);
    if c.is_empty() {
        return None;
    }
    let target = cyclic_key(&c);
    let mut best = 1;
    for u in all_reduced_words(rank, c.len()) {
        for k in (best + 1)..=c.len() {
            let p: Vec<Letter> = std::iter::repeat(u.iter().copied()).take(k).flatten().collect();
            let p = cyclically_reduce(&p);
            if p.len() == c.len() && cyclic_key(&p) == target {
                best = k;
            }
        }
    }
    Some(best)
}

/// Generator images of the Whitehead automorphism `(A, a)`.
fn whitehead_images(rank: usize, set: &[Letter], a: Letter) -> Vec<Vec<Letter>> {
    (1..=rank as Letter)
        .map(|x| {
            if x == a || x == -a {
                return vec![x];
            }
            let mut img = Vec::new();
            if set.contains(&-x) {
                img.push(-a);
            }
            img.push(x);
            if set.contains(&x) {
                img.push(a);
            }
            img
        })
        .collect()
}

fn substitute(images: &[Vec<Letter>], w: &[Letter]) -> Vec<Letter> {
    let mut out = Vec::new();
    for &l in w {
        let img = &images[l.unsigned_abs() as usize - 1];
        if l > 0 {
            out.extend(img.iter().copied());
        } else {
            out.extend(img.iter().rev().map(|&x| -x));
        }
    }
    free_reduce(&out)
}

/// Every Whitehead automorphism of the given rank as generator images:
/// all pairs `(A, a)` with `a ∈ A` and `a⁻¹ ∉ A`, and all signed
/// permutations.
pub fn whitehead_automorphisms(rank: usize) -> Vec<Vec<Vec<Letter>>> {
    let letters: Vec<Letter> = (1..=rank as Letter).flat_map(|i| [i, -i]).collect();
    let mut out = Vec::new();
    for &a in &letters {
        let rest: Vec<Letter> = letters.iter().copied().filter(|&l| l != a && l != -a).collect();
        for subset in rest.iter().copied().powerset() {
            let mut set = subset;
            set.push(a);
            out.push(whitehead_images(rank, &set, a));
        }
    }
    for perm in (1..=rank as Letter).permutations(rank) {
        for signs in 0u32..(1 << rank) {
            out.push(perm.iter().enumerate().map(|(i, &g)| vec![if signs >> i & 1 == 1 { -g } else { g }]).collect());
        }
    }
    out
}

/// Minimal cyclic length in the automorphic orbit of `w`: breadth-first
/// search through every Whitehead automorphism, keeping the conjugacy
/// classes no longer than `w`. Peak reduction makes the bound harmless.
pub fn brute_min_length(w: &[Letter], rank: usize) -> usize {
    let start = cyclically_reduce(w);
    if start.is_empty() {
        return 0;
    }
    let autos = whitehead_automorphisms(rank);
    let n = start.len();
    let mut best = n;
    let mut seen = HashSet::from([cyclic_key(&start)]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for a in &autos {
            let c = cyclically_reduce(&substitute(a, &cur));
            if c.len() <= n && seen.insert(cyclic_key(&c)) {
                best = best.min(c.len());
                queue.push_back(c);
            }
        }
    }
    best
}

pub fn brute_is_primitive(w: &[Letter], rank: usize) -> bool {
    brute_min_length(w, rank) == 1
}

/// Smallest complexity over all fold sequences of length at most `depth`,
/// each fold along any proper nonempty subset of incident edges and
/// followed by reduction. Spaces are deduplicated up to isomorphism.
pub fn exhaustive_min(x: &Gos, depth: usize) -> Complexity {
    let mut bfs = FoldBfs::new(x);
    for _ in 0..depth {
        bfs.deepen();
    }
    bfs.best
}

/// Breadth-first search over fold sequences, one layer per `deepen`.
struct FoldBfs {
    best: Complexity,
    seen: HashSet<Vec<u64>>,
    frontier: Vec<Gos>,
}

impl FoldBfs {
    fn new(x: &Gos) -> FoldBfs {
        let (x, _, _) = x.reduce();
        FoldBfs {
            best: x.complexity().expect("reduced"),
            seen: HashSet::from([x.canonical_form()]),
            frontier: vec![x],
        }
    }

    fn deepen(&mut self) {
        let mut next = Vec::new();
        for y in &self.frontier {
            for v in 0..y.n_vertices() {
                let inc = y.incident(v);
                for mask in 1..(1u64 << inc.len()) - 1 {
                    let j: Vec<usize> = (0..inc.len()).filter(|i| mask >> i & 1 == 1).map(|i| inc[i]).collect();
                    let Ok((z, _)) = y.fold(v, &j) else { continue };
                    let (z, _, _) = z.reduce();
                    if self.seen.insert(z.canonical_form()) {
                        self.best = self.best.clone().min(z.complexity().expect("reduced"));
                        next.push(z);
                    }
                }
            }
        }
        self.frontier = next;
    }
}

/// Depth of the exhaustive search at which `c`, the complexity found by
/// `minimize`, is matched. The search runs to `depth` and is deepened,
/// up to `max_depth`, only while `c` is strictly smaller; a larger `c` is
/// an immediate failure.
pub fn minimality_check(x: &Gos, c: &Complexity, depth: usize, max_depth: usize) -> Result<usize, String> {
    let mut bfs = FoldBfs::new(x);
    for _ in 0..depth {
        bfs.deepen();
    }
    if c > &bfs.best {
        return Err(format!("minimize {:?}, exhaustive depth {depth} {:?}", c.0, bfs.best.0));
    }
    let mut d = depth;
    while c < &bfs.best && d < max_depth {
        bfs.deepen();
        d += 1;
    }
    if c == &bfs.best {
        Ok(d)
    } else {
        Err(format!("minimize {:?} unconfirmed, exhaustive depth {d} {:?}", c.0, bfs.best.0))
    }
}

/// The fold used by the round-trip oracle. `Mutated` crushes the edge graph
/// of the first new edge to a point, a deliberately wrong fold for the
/// fault-injection self-test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fault {
    MutatedFold,
}

fn fold_for_oracle(x: &Gos, v: usize, j: &[usize], fault: Option<Fault>) -> Gos {
    let (mut y, _) = x.fold(v, j).expect("proper fold set");
    if fault == Some(Fault::MutatedFold) && y.n_edges() > x.n_edges() {
        let e = x.n_edges();
        let point = Graph::point();
        let (a, b) = (y.to_dst[e].vmap[0], y.to_src[e].vmap[0]);
        y.edge_graphs[e] = point;
        y.to_dst[e] = Morphism { vmap: vec![a], emap: vec![] };
        y.to_src[e] = Morphism { vmap: vec![b], emap: vec![] };
    }
    y
}

/// Folds `x` at every vertex along every proper `J` with `|J| ≤ 2`, crushes
/// the new edges and compares with `x`. Returns the number of trials and the
/// first failure.
pub fn round_trip_check(x: &Gos, fault: Option<Fault>) -> (usize, Option<(usize, Vec<usize>)>) {
    let mut n = 0;
    for v in 0..x.n_vertices() {
        let inc = x.incident(v);
        for size in 1..=2 {
            for j in inc.iter().copied().combinations(size) {
                if j.len() == inc.len() {
                    continue;
                }
                let y = fold_for_oracle(x, v, &j, fault);
                let new: Vec<usize> = (x.n_edges()..y.n_edges()).collect();
                n += 1;
                let ok = y.collapse_all(&new).map(|z| z.canonical_form() == x.canonical_form()).unwrap_or(false);
                if !ok {
                    return (n, Some((v, j)));
                }
            }
        }
    }
    (n, None)
}

/// Every maximal tree (up to `limit`) gives the same `Δ_q^+ - Δ_q^-`, and
/// for unmarked spaces the same deltas.
pub fn delta_tree_independence(z: &UnionOfTrees, limit: usize) -> Result<usize, String> {
    let trees = z.maximal_trees(limit);
    let first = uot::deltas_with(z, &trees[0]);
    for (i, t) in trees.iter().enumerate().skip(1) {
        let d = uot::deltas_with(z, t);
        if d.q_plus - d.q_minus != first.q_plus - first.q_minus {
            return Err(format!("maximal tree {i} changes Δ_q^+ - Δ_q^-"));
        }
        if z.y_count() == 0 && d != first {
            return Err(format!("maximal tree {i} changes the deltas"));
        }
    }
    Ok(trees.len())
}

/// A treelike space reassembles from its product decomposition into the
/// same rectangles on the same trees.
pub fn reassembly_check(z: &UnionOfTrees) -> Result<bool, String> {
    match uot::try_product_decomposition(z) {
        Ok(p) => {
            let back = uot::reassemble(&z.trees, &p);
            if uot::same_union(z, &back) {
                Ok(true)
            } else {
                Err("reassembled rectangles differ".into())
            }
        }
        Err(_) => Ok(false),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Module {
    Words,
    Gos,
    Uot,
}

impl Module {
    pub const ALL: [Module; 3] = [Module::Words, Module::Gos, Module::Uot];

    pub fn parse(s: &str) -> Option<Module> {
        match s {
            "words" => Some(Module::Words),
            "gos" => Some(Module::Gos),
            "uot" | "union-of-trees" => Some(Module::Uot),
            _ => None,
        }
    }
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Module::Words => "words",
            Module::Gos => "gos",
            Module::Uot => "uot",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Scope {
    /// Empty means every module.
    pub modules: Vec<Module>,
    pub fault: Option<Fault>,
}

impl Scope {
    fn runs(&self, m: Module) -> bool {
        self.modules.is_empty() || self.modules.contains(&m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRow {
    pub module: Module,
    pub oracle: String,
    pub cases: usize,
    pub agreed: usize,
    /// The first disagreement, located precisely enough to reproduce.
    pub first_failure: Option<String>,
}

impl OracleRow {
    pub fn passed(&self) -> bool {
        self.cases == self.agreed
    }
}

impl fmt::Display for OracleRow {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let mark = if self.passed() { "ok  " } else { "FAIL" };
        write!(f, "{mark} {:<5} {:<32} {}/{}", self.module.to_string(), self.oracle, self.agreed, self.cases)?;
        if let Some(s) = &self.first_failure {
            write!(f, "  first failure: {s}")?;
        }
        Ok(())
    }
}

struct Tally {
    row: OracleRow,
}

impl Tally {
    fn new(module: Module, oracle: &str) -> Tally {
        Tally {
            row: OracleRow {
                module,
                oracle: oracle.into(),
                cases: 0,
                agreed: 0,
                first_failure: None,
            },
        }
    }

    fn record(&mut self, ok: bool, at: impl FnOnce() -> String) {
        self.row.cases += 1;
        if ok {
            self.row.agreed += 1;
        } else if self.row.first_failure.is_none() {
            self.row.first_failure = Some(at());
        }
    }
}

/// The instances the suite runs on.
#[derive(Clone, Debug)]
pub struct Corpus {
    /// `(word, rank)` pairs.
    pub words: Vec<(Vec<Letter>, usize)>,
    pub spaces: Vec<(String, Gos)>,
    pub unions: Vec<(String, UnionOfTrees)>,
}

/// Generator parameters of the small spaces in the standard corpus.
pub fn small_params() -> GenParams {
    GenParams {
        max_underlying_edges: 5,
        ..GenParams::default()
    }
}

impl Corpus {
    /// All cyclically reduced rank-2 words up to length 6, random small
    /// spaces for seeds `0..32` and random unions of trees for `0..200`.
    pub fn standard() -> Corpus {
        let words = all_reduced_words(2, 6)
            .into_iter()
            .filter(|w| w.len() < 2 || w[0] != -w[w.len() - 1])
            .map(|w| (w, 2))
            .chain(["abc", "abcABC", "aabbcc", "abCab"].iter().map(|s| (words::Word::parse(s, 3).unwrap().0, 3)))
            .collect();
        let spaces = (0..32).map(|s| (format!("gos seed {s}"), random_gos(s, &small_params()).built.gos)).collect();
        let unions = (0..200).map(|s| (format!("uot seed {s}"), random_union(s, &UotParams::default()))).collect();
        Corpus { words, spaces, unions }
    }
}

pub fn oracle_suite(corpus: &Corpus, scope: &Scope) -> Vec<OracleRow> {
    let mut rows = Vec::new();
    if scope.runs(Module::Words) {
        let mut root = Tally::new(Module::Words, "root brute force");
        let mut prim = Tally::new(Module::Words, "Whitehead exhaustive");
        for (w, rank) in &corpus.words {
            let text = words::format_letters(w);
            let lib = words::root(w).ok().map(|(_, k)| k);
            let brute = brute_root_exponent(w, *rank);
            root.record(lib == brute, || format!("{text}: library {lib:?}, brute force {brute:?}"));
            if !w.is_empty() {
                let lib = words::whitehead_minimize(w, *rank).length;
                let brute = brute_min_length(w, *rank);
                prim.record(lib == brute, || format!("{text} rank {rank}: library {lib}, brute force {brute}"));
            }
        }
        rows.push(root.row);
        rows.push(prim.row);
    }
    if scope.runs(Module::Gos) {
        let mut trip = Tally::new(Module::Gos, "fold/collapse round trip");
        let mut mins = Tally::new(Module::Gos, "exhaustive fold minimality");
        let mut unfold = Tally::new(Module::Gos, "minimized vertices unfoldable");
        for (name, x) in &corpus.spaces {
            let (_, fail) = round_trip_check(x, scope.fault);
            trip.record(fail.is_none(), || {
                let (v, j) = fail.clone().unwrap();
                format!("{name}, vertex {v}, J = {j:?}")
            });
            if x.n_edges() > 5 {
                continue;
            }
            let m = x.minimize().expect("valid corpus space");
            let r = minimality_check(x, &m.complexity, 4, 6);
            mins.record(r.is_ok(), || format!("{name}: {}", r.clone().unwrap_err()));
            let bad = (0..m.gos.n_vertices()).find(|&v| matches!(m.gos.classify_vertex(v), VertexClass::Foldable { .. }));
            unfold.record(bad.is_none(), || format!("{name}: vertex {} foldable", bad.unwrap()));
        }
        rows.extend([trip.row, mins.row, unfold.row]);
    }
    if scope.runs(Module::Uot) {
        let mut indep = Tally::new(Module::Uot, "Δ tree-independence");
        let mut reas = Tally::new(Module::Uot, "reassembly");
        for (name, z) in &corpus.unions {
            let r = delta_tree_independence(z, 64);
            indep.record(r.is_ok(), || format!("{name}: {}", r.clone().unwrap_err()));
            let r = reassembly_check(z);
            reas.record(r.is_ok(), || format!("{name}: {}", r.clone().unwrap_err()));
        }
        rows.extend([indep.row, reas.row]);
    }
    rows
}

#[cfg(test)]
mod tests;
