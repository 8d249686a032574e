//! Graphs of free groups over cyclic subgroups, their homomorphisms to a
//! free group, and the 2-covered graphs of spaces built from them.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annuli::{self, AnnulusComplex, Band, Built, Lift};
use crate::graph::{stallings_fold, subgroup_contains, subgroup_graph, subgroup_is_whole, Folded, LabeledGraph};
use crate::words::{
    concat_reduce, cyclic_reduce, cyclic_split, format_letters, inverse, letter_key, minimal_period, reduce, CyclicWord, Letter, Whitehead, Word, WordError,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error("homomorphism does not respect edge {0}")]
    Relation(usize),
    #[error("homomorphism is not injective on vertex group {0}")]
    NotEmbedding(usize),
    #[error("homomorphism is not onto the free group of rank {0}")]
    NotSurjective(usize),
    #[error("target rank {target} differs from the corank bound {bound}")]
    NotMaximal { target: usize, bound: usize },
    #[error("no lift of edge {0} into its vertex graphs")]
    NoLift(usize),
    #[error(transparent)]
    Build(#[from] annuli::BuildError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Identifies `words[0]` in one vertex group with `words[1]` in another.
    Amalgam,
    /// Stable letter `t` with `t words[0] t^-1 = words[1]`.
    Hnn,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GEdge {
    pub kind: EdgeKind,
    pub from: usize,
    pub to: usize,
    pub words: [Vec<Letter>; 2],
}

/// A graph of free groups with a homomorphism to the free group of rank
/// `rank`. Vertex `i` has generators `a, b, ...` up to `ranks[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphOfFreeGroups {
    pub rank: usize,
    pub ranks: Vec<usize>,
    pub edges: Vec<GEdge>,
    /// Image of each generator of each vertex group.
    pub images: Vec<Vec<Vec<Letter>>>,
    /// Image of the stable letter of each HNN edge.
    pub stable: BTreeMap<usize, Vec<Letter>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GofgJson {
    #[serde(default)]
    pub format_version: Option<u32>,
    pub alphabet_rank: usize,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<GEdgeJson>,
    pub hom: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexJson {
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GEdgeJson {
    #[serde(rename = "type")]
    pub kind: String,
    pub vertices: Vec<usize>,
    pub words: [String; 2],
}

impl GofgJson {
    pub fn to_data(&self) -> Result<GraphOfFreeGroups, ConstructError> {
        let ranks: Vec<usize> = self.vertices.iter().map(|v| v.rank).collect();
        let bad = |s: String| ConstructError::Malformed(s);
        let mut edges = Vec::new();
        for (j, e) in self.edges.iter().enumerate() {
            let kind = match e.kind.as_str() {
                "amalgam" => EdgeKind::Amalgam,
                "hnn" => EdgeKind::Hnn,
                k => return Err(bad(format!("edge {j}: unknown type {k}"))),
            };
            let (from, to) = match e.vertices[..] {
                [a] => (a, a),
                [a, b] => (a, b),
                _ => return Err(bad(format!("edge {j}: expected one or two vertices"))),
            };
            if from >= ranks.len() || to >= ranks.len() {
                return Err(bad(format!("edge {j}: vertex out of range")));
            }
            let w0 = Word::parse(&e.words[0], ranks[from])?.0;
            let w1 = Word::parse(&e.words[1], ranks[to])?.0;
            edges.push(GEdge {
                kind,
                from,
                to,
                words: [w0, w1],
            });
        }
        let mut images: Vec<Vec<Option<Vec<Letter>>>> = ranks.iter().map(|&r| vec![None; r]).collect();
        let mut stable = BTreeMap::new();
        for (k, v) in &self.hom {
            let w = Word::parse(v, self.alphabet_rank)?.0;
            if let Some(t) = k.strip_prefix('t') {
                let j: usize = t.parse().map_err(|_| bad(format!("bad key {k}")))?;
                stable.insert(j, w);
            } else {
                let (i, g) = k.split_once('.').ok_or_else(|| bad(format!("bad key {k}")))?;
                let i: usize = i.parse().map_err(|_| bad(format!("bad key {k}")))?;
                let g = Word::parse(g, *ranks.get(i).ok_or_else(|| bad(format!("bad key {k}")))?)?.0;
                match g[..] {
                    [l] if l > 0 => images[i][l as usize - 1] = Some(w),
                    _ => return Err(bad(format!("bad key {k}"))),
                }
            }
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, im)| {
                im.into_iter()
                    .enumerate()
                    .map(|(g, w)| w.ok_or_else(|| bad(format!("missing image of generator {g} of vertex {i}"))))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let d = GraphOfFreeGroups {
            rank: self.alphabet_rank,
            ranks,
            edges,
            images,
            stable,
        };
        d.check_shape()?;
        Ok(d)
    }

    pub fn from_data(d: &GraphOfFreeGroups) -> GofgJson {
        let mut hom = BTreeMap::new();
        for (i, im) in d.images.iter().enumerate() {
            for (g, w) in im.iter().enumerate() {
                hom.insert(format!("{i}.{}", format_letters(&[g as Letter + 1])), format_letters(w));
            }
        }
        for (j, w) in &d.stable {
            hom.insert(format!("t{j}"), format_letters(w));
        }
        GofgJson {
            format_version: Some(FORMAT_VERSION),
            alphabet_rank: d.rank,
            vertices: d.ranks.iter().map(|&rank| VertexJson { rank }).collect(),
            edges: d
                .edges
                .iter()
                .map(|e| GEdgeJson {
                    kind: match e.kind {
                        EdgeKind::Amalgam => "amalgam".into(),
                        EdgeKind::Hnn => "hnn".into(),
                    },
                    vertices: if e.from == e.to && e.kind == EdgeKind::Hnn {
                        vec![e.from]
                    } else {
                        vec![e.from, e.to]
                    },
                    words: [format_letters(&e.words[0]), format_letters(&e.words[1])],
                })
                .collect(),
            hom,
        }
    }
}

impl GraphOfFreeGroups {
    fn check_shape(&self) -> Result<(), ConstructError> {
        let bad = |s: String| ConstructError::Malformed(s);
        if self.ranks.is_empty() || self.ranks.iter().any(|&r| r == 0) {
            return Err(bad("vertex groups must have positive rank".into()));
        }
        let mut uf = crate::graph::UnionFind::new(self.ranks.len());
        for (j, e) in self.edges.iter().enumerate() {
            if e.words.iter().any(|w| w.is_empty()) {
                return Err(bad(format!("edge {j}: trivial edge word")));
            }
            match e.kind {
                EdgeKind::Amalgam => {
                    if !uf.union(e.from, e.to) {
                        return Err(bad(format!("amalgam edge {j} closes a cycle")));
                    }
                }
                EdgeKind::Hnn => {
                    if !self.stable.contains_key(&j) {
                        return Err(bad(format!("missing image of stable letter t{j}")));
                    }
                }
            }
        }
        if uf.labels().1 != 1 {
            return Err(bad("amalgam edges must span the vertices".into()));
        }
        Ok(())
    }

    /// `1 - Σχ(F_i)`.
    pub fn corank_bound(&self) -> usize {
        self.ranks.iter().sum::<usize>() + 1 - self.ranks.len()
    }

    pub fn image(&self, vertex: usize, w: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::new();
        for &l in w {
            let img = &self.images[vertex][l.unsigned_abs() as usize - 1];
            out = if l > 0 {
                concat_reduce(&out, img)
            } else {
                concat_reduce(&out, &inverse(img))
            };
        }
        out
    }

    fn stable_image(&self, j: usize) -> Vec<Letter> {
        match self.edges[j].kind {
            EdgeKind::Amalgam => Vec::new(),
            EdgeKind::Hnn => self.stable[&j].clone(),
        }
    }

    /// Checks the edge relations, injectivity on vertex groups, and
    /// surjectivity.
    pub fn check_hom(&self) -> Result<(), ConstructError> {
        self.check_shape()?;
        for (j, e) in self.edges.iter().enumerate() {
            let t = self.stable_image(j);
            let lhs = reduce(&[t.clone(), self.image(e.from, &e.words[0]), inverse(&t)].concat());
            if lhs != self.image(e.to, &e.words[1]) {
                return Err(ConstructError::Relation(j));
            }
        }
        for i in 0..self.ranks.len() {
            if subgroup_graph(&self.images[i]).graph.graph.betti() != self.ranks[i] as i64 {
                return Err(ConstructError::NotEmbedding(i));
            }
        }
        let mut all: Vec<Vec<Letter>> = self.images.iter().flatten().cloned().collect();
        all.extend(self.stable.values().cloned());
        if !subgroup_is_whole(&all, self.rank) {
            return Err(ConstructError::NotSurjective(self.rank));
        }
        Ok(())
    }

    pub fn is_maximal_corank(&self) -> bool {
        self.rank == self.corank_bound()
    }
}

/// The graph of spaces of a homomorphism, with where each vertex group's
/// base point ended up.
#[derive(Clone, Debug)]
pub struct BuiltGos {
    pub built: Built,
    pub vertex_graphs: Vec<Folded>,
    /// `(underlying vertex, local vertex)` of each base point.
    pub base_points: Vec<(usize, usize)>,
}

/// Labels of reduced paths from the base to every vertex of a folded graph.
fn path_labels(f: &Folded) -> Vec<Vec<Letter>> {
    let g = &f.graph;
    let mut lab: Vec<Option<Vec<Letter>>> = vec![None; g.graph.n_vertices];
    lab[f.base] = Some(Vec::new());
    let out = g.graph.out_darts();
    let mut q = VecDeque::from([f.base]);
    while let Some(v) = q.pop_front() {
        for &d in &out[v] {
            let w = g.graph.head(d);
            if lab[w].is_none() {
                let mut l = lab[v].clone().unwrap();
                l.push(g.label(d));
                lab[w] = Some(l);
                q.push_back(w);
            }
        }
    }
    lab.into_iter().map(Option::unwrap_or_default).collect()
}

fn power(w: &[Letter], k: usize) -> Vec<Letter> {
    reduce(&w.repeat(k))
}

/// Builds the graph of spaces of a maximal-corank homomorphism.
pub fn build_gos(d: &GraphOfFreeGroups) -> Result<BuiltGos, ConstructError> {
    d.check_hom()?;
    if !d.is_maximal_corank() {
        return Err(ConstructError::NotMaximal {
            target: d.rank,
            bound: d.corank_bound(),
        });
    }
    build_unchecked(d)
}

/// Builds the graph of spaces of any homomorphism satisfying the edge
/// relations and injective on vertex groups.
pub fn build_unchecked(d: &GraphOfFreeGroups) -> Result<BuiltGos, ConstructError> {
    let folded: Vec<Folded> = d.images.iter().map(|im| subgroup_graph(im)).collect();
    let labels: Vec<Vec<Vec<Letter>>> = folded.iter().map(path_labels).collect();
    let mut bands = Vec::new();
    for (j, e) in d.edges.iter().enumerate() {
        let w1 = d.image(e.from, &e.words[0]);
        let (u1, c) = cyclic_split(&w1);
        let f1 = &folded[e.from];
        let (p1, _) = f1.graph.read(f1.base, &u1).ok_or(ConstructError::NoLift(j))?;
        let (end, darts1) = f1.graph.read(p1, &c).ok_or(ConstructError::NoLift(j))?;
        if end != p1 {
            return Err(ConstructError::NoLift(j));
        }
        let g = concat_reduce(&d.stable_image(j), &u1);
        let rho = c[..minimal_period(&c)].to_vec();
        let k = c.len() / rho.len();
        let f2 = &folded[e.to];
        let mut found = None;
        'search: for jj in 0..k {
            for q in 0..f2.graph.graph.n_vertices {
                let Some((end, darts2)) = f2.graph.read(q, &c) else { continue };
                if end != q {
                    continue;
                }
                let h = reduce(&[labels[e.to][q].clone(), power(&rho, jj), inverse(&g)].concat());
                if subgroup_contains(f2, &h) {
                    found = Some(darts2);
                    break 'search;
                }
            }
        }
        let darts2 = found.ok_or(ConstructError::NoLift(j))?;
        bands.push(Band {
            word: c,
            minus: Lift { graph: e.from, darts: darts1 },
            plus: Lift { graph: e.to, darts: darts2 },
        });
    }
    let graphs: Vec<LabeledGraph> = folded.iter().map(|f| f.graph.clone()).collect();
    let built = annuli::build(&AnnulusComplex { rank: d.rank, graphs, bands })?;
    let base_points = folded.iter().enumerate().map(|(i, f)| built.point[i][f.base]).collect();
    Ok(BuiltGos {
        built,
        vertex_graphs: folded,
        base_points,
    })
}

/// A free group of rank `rank` with roots `r_i^{k_i} = γ_i` adjoined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjoinRoot {
    pub rank: usize,
    pub roots: Vec<(Vec<Letter>, usize)>,
}

impl AdjoinRoot {
    pub fn check(&self) -> Result<(), ConstructError> {
        let mut classes: Vec<CyclicWord> = Vec::new();
        for (g, k) in &self.roots {
            if *k < 2 {
                return Err(ConstructError::Malformed(format!("root order {k} < 2")));
            }
            let c = CyclicWord::new(g)?;
            if c.root().1 != 1 {
                return Err(ConstructError::Malformed(format!("{} is a proper power", format_letters(g))));
            }
            if classes.contains(&c) {
                return Err(ConstructError::Malformed(format!("{} repeats a class or its inverse", format_letters(g))));
            }
            classes.push(c);
        }
        Ok(())
    }

    /// Graph of free groups: the base group at vertex 0, a cyclic group
    /// per root, `φ` given by the images of the base generators and of the
    /// roots.
    pub fn to_gofg(&self, base_images: Vec<Vec<Letter>>, root_images: Vec<Vec<Letter>>, target: usize) -> Result<GraphOfFreeGroups, ConstructError> {
        self.check()?;
        let mut ranks = vec![self.rank];
        let mut edges = Vec::new();
        let mut images = vec![base_images];
        for (i, (g, k)) in self.roots.iter().enumerate() {
            ranks.push(1);
            edges.push(GEdge {
                kind: EdgeKind::Amalgam,
                from: 0,
                to: i + 1,
                words: [g.clone(), vec![1; *k]],
            });
            images.push(vec![root_images[i].clone()]);
        }
        Ok(GraphOfFreeGroups {
            rank: target,
            ranks,
            edges,
            images,
            stable: BTreeMap::new(),
        })
    }

    /// A presentation on the base generators followed by the roots.
    pub fn presentation(&self) -> Presentation {
        let n = self.rank;
        let relators = self
            .roots
            .iter()
            .enumerate()
            .map(|(i, (g, k))| {
                let r = (n + i + 1) as Letter;
                reduce(&[vec![r; *k], inverse(g)].concat())
            })
            .collect();
        Presentation {
            generators: n + self.roots.len(),
            relators,
        }
    }
}

/// Random automorphism of the free group as a product of Whitehead moves.
pub fn random_automorphism<R: Rng>(rank: usize, steps: usize, rng: &mut R) -> Vec<Whitehead> {
    let mults = Whitehead::multipliers(rank);
    let perms = Whitehead::permutations(rank);
    (0..steps)
        .map(|_| {
            if rng.gen_bool(0.8) {
                mults[rng.gen_range(0..mults.len())].clone()
            } else {
                perms[rng.gen_range(0..perms.len())].clone()
            }
        })
        .collect()
}

pub fn apply_all(seq: &[Whitehead], w: &[Letter]) -> Vec<Letter> {
    seq.iter().fold(reduce(w), |acc, a| a.apply(&acc))
}

pub fn invert_all(seq: &[Whitehead]) -> Vec<Whitehead> {
    seq.iter().rev().map(Whitehead::inverse).collect()
}

/// An adjoin-root instance with `γ = α(a)` for a random automorphism `α`
/// and the homomorphism `δ ∘ β ∘ α^-1` on the base group, where `β` sends
/// `a` to `a^k`; the root maps to `δ(a)`.
#[derive(Clone, Debug)]
pub struct PrimitiveRootInstance {
    pub data: AdjoinRoot,
    pub gofg: GraphOfFreeGroups,
}

pub fn primitive_root_instance<R: Rng>(rank: usize, k: usize, rng: &mut R) -> PrimitiveRootInstance {
    loop {
        let alpha = random_automorphism(rank, rng.gen_range(1..=4), rng);
        let delta = random_automorphism(rank, rng.gen_range(0..=2), rng);
        let gamma = apply_all(&alpha, &[1]);
        if gamma.len() > 8 {
            continue;
        }
        let ainv = invert_all(&alpha);
        let base_images: Vec<Vec<Letter>> = (1..=rank as Letter)
            .map(|x| {
                let w = apply_all(&ainv, &[x]);
                let b: Vec<Letter> = w.iter().flat_map(|&l| if l.abs() == 1 { vec![l; k] } else { vec![l] }).collect();
                apply_all(&delta, &b)
            })
            .collect();
        let root_image = apply_all(&delta, &[1]);
        let data = AdjoinRoot { rank, roots: vec![(gamma, k)] };
        if let Ok(gofg) = data.to_gofg(base_images, vec![root_image], rank) {
            return PrimitiveRootInstance { data, gofg };
        }
    }
}

/// A finite presentation; generator `i` is the letter `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: usize,
    pub relators: Vec<Vec<Letter>>,
}

impl Presentation {
    /// Parses relators such as `ccBAba` or `cc=abAB`.
    pub fn parse(generators: usize, relators: &[&str]) -> Result<Presentation, WordError> {
        let relators = relators
            .iter()
            .map(|r| match r.split_once('=') {
                Some((l, rhs)) => Ok(reduce(&[Word::parse(l, generators)?.0, inverse(&Word::parse(rhs, generators)?.0)].concat())),
                None => Ok(Word::parse(r, generators)?.0),
            })
            .collect::<Result<_, WordError>>()?;
        Ok(Presentation { generators, relators })
    }

    pub fn evaluate(&self, images: &[Vec<Letter>], w: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::new();
        for &l in w {
            let img = &images[l.unsigned_abs() as usize - 1];
            out = if l > 0 {
                concat_reduce(&out, img)
            } else {
                concat_reduce(&out, &inverse(img))
            };
        }
        out
    }

    pub fn is_witness(&self, images: &[Vec<Letter>], n: usize) -> bool {
        self.relators.iter().all(|r| self.evaluate(images, r).is_empty()) && subgroup_is_whole(images, n)
    }
}

/// Reduced words of length at most `max_len` in length-lexicographic order.
pub fn reduced_words(n: usize, max_len: usize) -> Vec<Vec<Letter>> {
    let letters: Vec<Letter> = {
        let mut l: Vec<Letter> = (1..=n as Letter).flat_map(|i| [i, -i]).collect();
        l.sort_by_key(|&x| letter_key(x));
        l
    };
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
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

/// First tuple of images, in order of total length and then
/// lexicographically by word index, satisfying the relators and onto
/// `F_n`. `None` means none exists with every image of length at most `max_len`.
pub fn bounded_corank_search(p: &Presentation, n: usize, max_len: usize, parallel: bool) -> Option<Vec<Vec<Letter>>> {
    bounded_search_with(p, n, max_len, parallel, &|_| true)
}

/// As [`bounded_corank_search`], keeping only witnesses accepted by `keep`.
pub fn bounded_search_with(
    p: &Presentation,
    n: usize,
    max_len: usize,
    parallel: bool,
    keep: &(dyn Fn(&[Vec<Letter>]) -> bool + Sync),
) -> Option<Vec<Vec<Letter>>> {
    let words = reduced_words(n, max_len);
    let g = p.generators;
    // word indices grouped by length
    let by_len: Vec<Vec<usize>> = (0..=max_len).map(|l| (0..words.len()).filter(|&i| words[i].len() == l).collect()).collect();
    for total in 0..=g * max_len {
        // length profiles with this total, lexicographic
        let mut profiles = Vec::new();
        let mut cur = vec![0usize; g];
        length_profiles(total, max_len, 0, &mut cur, &mut profiles);
        let try_first = |first: usize, prof: &Vec<usize>| -> Option<Vec<Vec<Letter>>> {
            let mut idx = vec![0usize; g];
            idx[0] = first;
            search_rest(p, n, keep, &words, &by_len, prof, 1, &mut idx)
        };
        // tuples ordered by their word indices; the length profile is a
        // function of the indices, so merge profiles by index order
        let mut candidates: Vec<(Vec<usize>, Vec<Vec<Letter>>)> = Vec::new();
        for prof in &profiles {
            let firsts = &by_len[prof[0]];
            let hit = if parallel {
                firsts.par_iter().find_map_first(|&f| try_first(f, prof))
            } else {
                firsts.iter().find_map(|&f| try_first(f, prof))
            };
            if let Some(w) = hit {
                let idx: Vec<usize> = w.iter().map(|x| words.iter().position(|y| y == x).unwrap()).collect();
                candidates.push((idx, w));
            }
        }
        if let Some((_, w)) = candidates.into_iter().min_by(|a, b| a.0.cmp(&b.0)) {
            return Some(w);
        }
    }
    None
}

fn length_profiles(rest: usize, max_len: usize, i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if i == cur.len() {
        if rest == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for l in 0..=max_len.min(rest) {
        cur[i] = l;
        length_profiles(rest - l, max_len, i + 1, cur, out);
    }
}

fn search_rest(
    p: &Presentation,
    n: usize,
    keep: &(dyn Fn(&[Vec<Letter>]) -> bool + Sync),
    words: &[Vec<Letter>],
    by_len: &[Vec<usize>],
    prof: &[usize],
    i: usize,
    idx: &mut Vec<usize>,
) -> Option<Vec<Vec<Letter>>> {
    if i == prof.len() {
        let images: Vec<Vec<Letter>> = idx.iter().map(|&j| words[j].clone()).collect();
        return (p.is_witness(&images, n) && keep(&images)).then_some(images);
    }
    for &j in &by_len[prof[i]] {
        idx[i] = j;
        if let Some(w) = search_rest(p, n, keep, words, by_len, prof, i + 1, idx) {
            return Some(w);
        }
    }
    None
}

/// Cyclic label of `w` after cyclic reduction, for reports.
pub fn cyclic_text(w: &[Letter]) -> String {
    let c = cyclic_reduce(w);
    if c.is_empty() {
        "1".into()
    } else {
        format_letters(&c)
    }
}

/// Stallings fold of a labelled graph at its base, as used for vertex graphs.
pub fn fold_at(g: &LabeledGraph, base: usize) -> Folded {
    stallings_fold(g, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinders::Cylinders;

    pub(crate) fn hnn_json() -> GofgJson {
        serde_json::from_str(
            r#"{"alphabetRank":2,"vertices":[{"rank":2}],
                "edges":[{"type":"hnn","vertices":[0],"words":["a","b"]}],
                "hom":{"0.a":"a","0.b":"baB","t0":"b"}}"#,
        )
        .unwrap()
    }

    pub(crate) fn root_ab() -> GraphOfFreeGroups {
        let data = AdjoinRoot {
            rank: 2,
            roots: vec![(vec![1, 2], 2)],
        };
        data.to_gofg(vec![vec![1, 1, -2], vec![2]], vec![vec![1]], 2).unwrap()
    }

    #[test]
    fn corank_bounds() {
        assert_eq!(hnn_json().to_data().unwrap().corank_bound(), 2);
        assert_eq!(root_ab().corank_bound(), 2);
    }

    #[test]
    fn json_round_trip() {
        let d = hnn_json().to_data().unwrap();
        assert_eq!(GofgJson::from_data(&d).to_data().unwrap(), d);
    }

    #[test]
    fn relation_failure_is_caught() {
        let mut d = hnn_json().to_data().unwrap();
        d.stable.insert(0, vec![1]);
        assert_eq!(d.check_hom(), Err(ConstructError::Relation(0)));
    }

    #[test]
    fn hnn_builds_with_equal_euler_characteristics() {
        let b = build_gos(&hnn_json().to_data().unwrap()).unwrap();
        let x = &b.built.gos;
        x.validate().unwrap();
        assert_eq!(x.chi_horizontal(), x.chi_underlying());
        let m = x.minimize().unwrap();
        assert!(m.gos.separability().separable);
    }

    #[test]
    fn adjoin_root_cylinder_meets_boundary_k_times() {
        let x = build_gos(&root_ab()).unwrap().built.gos.minimize().unwrap().gos;
        let cyl = Cylinders::build(&x);
        assert_eq!(cyl.cylinders.len(), 1);
        let c = &cyl.cylinders[0];
        for f in c.vertex_spaces.iter().chain(&c.edge_spaces) {
            assert_eq!(f.boundary_meets, 2);
        }
        // the cylinder is a whole irreducible component
        assert!(!c.good);
        let root = cyl.attachments.iter().find(|a| !cyl.circles[a.circle].infinite).unwrap();
        assert_eq!(root.winding, 2);
    }

    #[test]
    fn hnn_cylinder_after_minimizing_is_bad() {
        let b = build_gos(&hnn_json().to_data().unwrap()).unwrap();
        let m = b.built.gos.minimize().unwrap();
        let cyl = Cylinders::build(&m.gos);
        assert!(cyl.cylinders.iter().any(|c| !c.good));
    }

    #[test]
    fn proper_power_root_is_rejected() {
        let d = AdjoinRoot {
            rank: 2,
            roots: vec![(vec![1, 2, 1, 2], 2)],
        };
        assert!(d.check().is_err());
        let d = AdjoinRoot {
            rank: 2,
            roots: vec![(vec![1, 2], 2), (vec![-2, -1], 3)],
        };
        assert!(d.check().is_err());
    }

    #[test]
    fn generated_root_instances_are_maximal() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let inst = primitive_root_instance(2, 2, &mut rng);
            inst.gofg.check_hom().unwrap();
            assert!(inst.gofg.is_maximal_corank());
            build_gos(&inst.gofg).unwrap().built.gos.validate().unwrap();
        }
    }

    #[test]
    fn reduced_word_counts() {
        // 1 + 4 + 12 + 36
        assert_eq!(reduced_words(2, 3).len(), 53);
    }

    #[test]
    fn square_root_of_commutator_has_no_short_witness() {
        let p = Presentation::parse(3, &["cc=abAB"]).unwrap();
        assert_eq!(bounded_corank_search(&p, 2, 2, false), None);
    }

    #[test]
    fn square_root_of_product_has_witness() {
        let p = Presentation::parse(3, &["cc=ab"]).unwrap();
        let w = bounded_corank_search(&p, 2, 2, true).unwrap();
        assert!(p.is_witness(&w, 2));
        assert_eq!(bounded_corank_search(&p, 2, 2, false), Some(w));
    }
}
