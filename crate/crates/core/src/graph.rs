//! Finite graphs with oriented edges, graph maps and Stallings folding.
//!
//! Edge `e` runs from `edges[e].0` to `edges[e].1`. Its darts are `2e`
//! (forward) and `2e + 1` (backward); `bar` swaps them.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::words::{format_letters, minimal_period, Letter, Word, WordError};

pub type Dart = usize;

#[inline]
pub fn bar(d: Dart) -> Dart {
    d ^ 1
}

#[inline]
pub fn edge_of(d: Dart) -> usize {
    d >> 1
}

#[inline]
pub fn is_forward(d: Dart) -> bool {
    d & 1 == 0
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("edge {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("map size mismatch: {0}")]
    SizeMismatch(&'static str),
    #[error("map does not commute with endpoints at edge {0}")]
    NotAMorphism(usize),
    #[error("duplicate id {0}")]
    DuplicateId(u64),
    #[error("unknown vertex id {0}")]
    UnknownVertex(u64),
    #[error("bad label: {0}")]
    Label(#[from] WordError),
    #[error("edge {0} has no label")]
    MissingLabel(u64),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n_vertices: usize) -> Graph {
        Graph { n_vertices, edges: Vec::new() }
    }

    pub fn point() -> Graph {
        Graph::new(1)
    }

    pub fn add_vertex(&mut self) -> usize {
        self.n_vertices += 1;
        self.n_vertices - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize) -> usize {
        self.edges.push((from, to));
        self.edges.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_darts(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn tail(&self, d: Dart) -> usize {
        let (a, b) = self.edges[edge_of(d)];
        if is_forward(d) {
            a
        } else {
            b
        }
    }

    pub fn head(&self, d: Dart) -> usize {
        self.tail(bar(d))
    }

    /// Darts leaving each vertex, in increasing dart order.
    pub fn out_darts(&self) -> Vec<Vec<Dart>> {
        let mut out = vec![Vec::new(); self.n_vertices];
        for d in 0..self.n_darts() {
            out[self.tail(d)].push(d);
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| usize::from(a == v) + usize::from(b == v)).sum()
    }

    pub fn check(&self) -> Result<(), GraphError> {
        for &(a, b) in &self.edges {
            for x in [a, b] {
                if x >= self.n_vertices {
                    return Err(GraphError::VertexOutOfRange(x));
                }
            }
        }
        Ok(())
    }

    /// Component index of every vertex, and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.n_vertices);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        uf.labels()
    }

    pub fn is_connected(&self) -> bool {
        self.n_vertices > 0 && self.components().1 == 1
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.edges.len() as i64
    }

    /// First Betti number.
    pub fn betti(&self) -> i64 {
        self.edges.len() as i64 - self.n_vertices as i64 + self.components().1 as i64
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.n_vertices
    }

    /// Subgraph on the given vertices and edges (edges must have both ends
    /// kept). Returns the graph and the inclusion as old-to-new index maps.
    pub fn induced(&self, keep_v: &[bool], keep_e: &[bool]) -> (Graph, Vec<Option<usize>>, Vec<Option<usize>>) {
        let mut vmap = vec![None; self.n_vertices];
        let mut g = Graph::new(0);
        for v in 0..self.n_vertices {
            if keep_v[v] {
                vmap[v] = Some(g.add_vertex());
            }
        }
        let mut emap = vec![None; self.edges.len()];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if keep_e[e] {
                emap[e] = Some(g.add_edge(vmap[a].unwrap(), vmap[b].unwrap()));
            }
        }
        (g, vmap, emap)
    }

    pub fn disjoint_union(parts: &[&Graph]) -> (Graph, Vec<usize>, Vec<usize>) {
        let mut g = Graph::new(0);
        let mut voff = Vec::new();
        let mut eoff = Vec::new();
        for p in parts {
            let vo = g.n_vertices;
            voff.push(vo);
            eoff.push(g.edges.len());
            g.n_vertices += p.n_vertices;
            for &(a, b) in &p.edges {
                g.add_edge(a + vo, b + vo);
            }
        }
        (g, voff, eoff)
    }
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let n = self.parent[y];
            self.parent[y] = r;
            y = n;
        }
        r
    }

    /// Merges the classes; the smaller representative wins. Returns false if
    /// already merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Dense labels numbered by first occurrence, plus the class count.
    pub fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut id = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut k = 0;
        for x in 0..n {
            let r = self.find(x);
            if id[r] == usize::MAX {
                id[r] = k;
                k += 1;
            }
            out[x] = id[r];
        }
        (out, k)
    }
}

/// A combinatorial graph map: vertices to vertices, forward darts to darts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Morphism {
    pub vmap: Vec<usize>,
    pub emap: Vec<Dart>,
}

impl Morphism {
    pub fn identity(g: &Graph) -> Morphism {
        Morphism {
            vmap: (0..g.n_vertices).collect(),
            emap: (0..g.n_edges()).map(|e| 2 * e).collect(),
        }
    }

    pub fn dart(&self, d: Dart) -> Dart {
        let i = self.emap[edge_of(d)];
        if is_forward(d) {
            i
        } else {
            bar(i)
        }
    }

    pub fn check(&self, dom: &Graph, cod: &Graph) -> Result<(), GraphError> {
        if self.vmap.len() != dom.n_vertices {
            return Err(GraphError::SizeMismatch("vertex map"));
        }
        if self.emap.len() != dom.n_edges() {
            return Err(GraphError::SizeMismatch("edge map"));
        }
        if let Some(&v) = self.vmap.iter().find(|&&v| v >= cod.n_vertices) {
            return Err(GraphError::VertexOutOfRange(v));
        }
        for (e, &d) in self.emap.iter().enumerate() {
            if edge_of(d) >= cod.n_edges() {
                return Err(GraphError::EdgeOutOfRange(edge_of(d)));
            }
            let (a, b) = dom.edges[e];
            if cod.tail(d) != self.vmap[a] || cod.head(d) != self.vmap[b] {
                return Err(GraphError::NotAMorphism(e));
            }
        }
        Ok(())
    }

    /// Locally injective on darts.
    pub fn is_immersion(&self, dom: &Graph) -> bool {
        let mut seen: HashMap<(usize, Dart), ()> = HashMap::new();
        for d in 0..dom.n_darts() {
            if seen.insert((dom.tail(d), self.dart(d)), ()).is_some() {
                return false;
            }
        }
        true
    }

    pub fn is_embedding(&self, dom: &Graph) -> bool {
        let mut vs = self.vmap.clone();
        vs.sort_unstable();
        vs.dedup();
        let mut es: Vec<usize> = self.emap.iter().map(|&d| edge_of(d)).collect();
        es.sort_unstable();
        es.dedup();
        vs.len() == dom.n_vertices && es.len() == dom.n_edges()
    }

    pub fn is_isomorphism(&self, dom: &Graph, cod: &Graph) -> bool {
        self.is_embedding(dom) && dom.n_vertices == cod.n_vertices && dom.n_edges() == cod.n_edges()
    }

    /// `self` followed by `then`.
    pub fn compose(&self, then: &Morphism) -> Morphism {
        Morphism {
            vmap: self.vmap.iter().map(|&v| then.vmap[v]).collect(),
            emap: self.emap.iter().map(|&d| then.dart(d)).collect(),
        }
    }

    /// Image as vertex and edge masks of the codomain.
    pub fn image(&self, cod: &Graph) -> (Vec<bool>, Vec<bool>) {
        let mut v = vec![false; cod.n_vertices];
        let mut e = vec![false; cod.n_edges()];
        for &x in &self.vmap {
            v[x] = true;
        }
        for &d in &self.emap {
            e[edge_of(d)] = true;
        }
        (v, e)
    }
}

/// A graph over the rose: each edge carries the positive or negative letter
/// read along its forward dart.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<Letter>,
}

impl LabeledGraph {
    pub fn label(&self, d: Dart) -> Letter {
        let l = self.labels[edge_of(d)];
        if is_forward(d) {
            l
        } else {
            -l
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, label: Letter) -> usize {
        self.labels.push(label);
        self.graph.add_edge(from, to)
    }

    /// Immersion into the rose: no two darts at a vertex read the same letter.
    pub fn is_folded(&self) -> bool {
        let mut seen = HashMap::new();
        (0..self.graph.n_darts()).all(|d| seen.insert((self.graph.tail(d), self.label(d)), ()).is_none())
    }

    /// Outgoing dart at each vertex keyed by label; assumes folded.
    pub fn transitions(&self) -> Vec<BTreeMap<Letter, Dart>> {
        let mut t = vec![BTreeMap::new(); self.graph.n_vertices];
        for d in 0..self.graph.n_darts() {
            t[self.graph.tail(d)].entry(self.label(d)).or_insert(d);
        }
        t
    }

    /// Reads `w` from `start`, returning the end vertex and the darts used.
    pub fn read(&self, start: usize, w: &[Letter]) -> Option<(usize, Vec<Dart>)> {
        let t = self.transitions();
        read_with(&self.graph, &t, start, w)
    }

    pub fn path_label(&self, darts: &[Dart]) -> Vec<Letter> {
        darts.iter().map(|&d| self.label(d)).collect()
    }
}

pub fn read_with(g: &Graph, t: &[BTreeMap<Letter, Dart>], start: usize, w: &[Letter]) -> Option<(usize, Vec<Dart>)> {
    let mut v = start;
    let mut path = Vec::with_capacity(w.len());
    for &l in w {
        let d = *t[v].get(&l)?;
        path.push(d);
        v = g.head(d);
    }
    Some((v, path))
}

/// Result of Stallings folding: the folded core and the quotient map from
/// the input (elements pruned from the core map to `None`).
#[derive(Clone, Debug)]
pub struct Folded {
    pub graph: LabeledGraph,
    pub base: usize,
    pub vmap: Vec<Option<usize>>,
    pub emap: Vec<Option<Dart>>,
}

/// Folds the labelled graph until it immerses in the rose, always merging
/// the pair of darts with the smallest ids first, then prunes hanging trees
/// away from `base`.
pub fn stallings_fold(input: &LabeledGraph, base: usize) -> Folded {
    let g = &input.graph;
    let mut uf = UnionFind::new(g.n_vertices);
    let mut alive = vec![true; g.n_edges()];
    // where a dead edge's forward dart went
    let mut redirect: Vec<Dart> = (0..g.n_edges()).map(|e| 2 * e).collect();
    loop {
        let mut found = None;
        let mut seen: HashMap<(usize, Letter), Dart> = HashMap::new();
        'scan: for d in 0..g.n_darts() {
            if !alive[edge_of(d)] {
                continue;
            }
            let key = (uf.find(g.tail(d)), input.label(d));
            if let Some(&d0) = seen.get(&key) {
                if edge_of(d0) != edge_of(d) {
                    found = Some((d0, d));
                    break 'scan;
                }
            } else {
                seen.insert(key, d);
            }
        }
        let Some((d0, d1)) = found else { break };
        let (h0, h1) = (g.head(d0), g.head(d1));
        uf.union(h0, h1);
        alive[edge_of(d1)] = false;
        redirect[edge_of(d1)] = if is_forward(d1) { d0 } else { bar(d0) };
    }
    fn resolve(redirect: &[Dart], alive: &[bool], d: Dart) -> Dart {
        let mut d = d;
        while !alive[edge_of(d)] {
            let r = redirect[edge_of(d)];
            d = if is_forward(d) { r } else { bar(r) };
        }
        d
    }
    // prune
    let reps: Vec<usize> = (0..g.n_vertices).map(|v| uf.find(v)).collect();
    let base_rep = reps[base];
    let mut deg = vec![0usize; g.n_vertices];
    for e in 0..g.n_edges() {
        if alive[e] {
            let (a, b) = g.edges[e];
            deg[reps[a]] += 1;
            deg[reps[b]] += 1;
        }
    }
    let mut keep_v: Vec<bool> = (0..g.n_vertices).map(|v| reps[v] == v).collect();
    let mut queue: VecDeque<usize> = (0..g.n_vertices).filter(|&v| keep_v[v] && v != base_rep && deg[v] <= 1).collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.n_vertices];
    for e in 0..g.n_edges() {
        if alive[e] {
            let (a, b) = g.edges[e];
            incident[reps[a]].push(e);
            if reps[a] != reps[b] {
                incident[reps[b]].push(e);
            }
        }
    }
    let mut keep_e = alive.clone();
    while let Some(v) = queue.pop_front() {
        if !keep_v[v] {
            continue;
        }
        keep_v[v] = false;
        for &e in &incident[v] {
            if keep_e[e] {
                keep_e[e] = false;
                let (a, b) = g.edges[e];
                let other = if reps[a] == v { reps[b] } else { reps[a] };
                deg[other] -= 1;
                if other != base_rep && keep_v[other] && deg[other] <= 1 {
                    queue.push_back(other);
                }
            }
        }
    }
    let mut out = LabeledGraph::default();
    let mut newv = vec![None; g.n_vertices];
    for v in 0..g.n_vertices {
        if keep_v[v] {
            newv[v] = Some(out.graph.add_vertex());
        }
    }
    let mut newe = vec![None; g.n_edges()];
    for e in 0..g.n_edges() {
        if keep_e[e] {
            let (a, b) = g.edges[e];
            newe[e] = Some(out.add_edge(newv[reps[a]].unwrap(), newv[reps[b]].unwrap(), input.labels[e]));
        }
    }
    let vmap = (0..g.n_vertices).map(|v| newv[reps[v]]).collect();
    let emap = (0..g.n_edges())
        .map(|e| {
            let d = resolve(&redirect, &alive, 2 * e);
            newe[edge_of(d)].map(|ne| if is_forward(d) { 2 * ne } else { 2 * ne + 1 })
        })
        .collect();
    Folded {
        graph: out,
        base: newv[base_rep].expect("base survives"),
        vmap,
        emap,
    }
}

/// Bouquet of circles reading the given words at vertex 0.
pub fn bouquet(words: &[Vec<Letter>]) -> LabeledGraph {
    let mut g = LabeledGraph::default();
    g.graph.add_vertex();
    for w in words {
        let mut cur = 0;
        for (i, &l) in w.iter().enumerate() {
            let next = if i + 1 == w.len() { 0 } else { g.graph.add_vertex() };
            if l > 0 {
                g.add_edge(cur, next, l);
            } else {
                g.add_edge(next, cur, -l);
            }
            cur = next;
        }
    }
    g
}

/// Folded core graph of the subgroup generated by `words`.
pub fn subgroup_graph(words: &[Vec<Letter>]) -> Folded {
    stallings_fold(&bouquet(words), 0)
}

/// True when the words generate the whole free group of rank `rank`.
pub fn subgroup_is_whole(words: &[Vec<Letter>], rank: usize) -> bool {
    let f = subgroup_graph(words);
    let g = &f.graph;
    if g.graph.n_vertices != 1 || g.graph.n_edges() != rank {
        return false;
    }
    let mut ls: Vec<u32> = g.labels.iter().map(|l| l.unsigned_abs()).collect();
    ls.sort_unstable();
    ls.iter().enumerate().all(|(i, &l)| l == i as u32 + 1)
}

pub fn subgroup_contains(f: &Folded, w: &[Letter]) -> bool {
    matches!(f.graph.read(f.base, w), Some((v, _)) if v == f.base)
}

/// Free basis of the subgroup read off a BFS spanning tree from the base.
#[derive(Clone, Debug)]
pub struct SubgroupBasis {
    pub tree_path: Vec<Vec<Dart>>,
    /// Non-tree edges, in order; basis element `i` traverses `edges[i]` forward.
    pub edges: Vec<usize>,
    pub words: Vec<Vec<Letter>>,
}

pub fn subgroup_basis(f: &Folded) -> SubgroupBasis {
    let g = &f.graph;
    let n = g.graph.n_vertices;
    let mut tree_path: Vec<Option<Vec<Dart>>> = vec![None; n];
    let mut tree_edge = vec![false; g.graph.n_edges()];
    tree_path[f.base] = Some(Vec::new());
    let out = g.graph.out_darts();
    let mut queue = VecDeque::from([f.base]);
    while let Some(v) = queue.pop_front() {
        for &d in &out[v] {
            let w = g.graph.head(d);
            if tree_path[w].is_none() {
                let mut p = tree_path[v].clone().unwrap();
                p.push(d);
                tree_path[w] = Some(p);
                tree_edge[edge_of(d)] = true;
                queue.push_back(w);
            }
        }
    }
    let tree_path: Vec<Vec<Dart>> = tree_path.into_iter().map(|p| p.unwrap_or_default()).collect();
    let mut edges = Vec::new();
    let mut words = Vec::new();
    for e in 0..g.graph.n_edges() {
        if tree_edge[e] {
            continue;
        }
        let (a, b) = g.graph.edges[e];
        let mut w = g.path_label(&tree_path[a]);
        w.push(g.labels[e]);
        w.extend(crate::words::inverse(&g.path_label(&tree_path[b])));
        edges.push(e);
        words.push(crate::words::reduce(&w));
    }
    SubgroupBasis { tree_path, edges, words }
}

/// Expresses an element of the subgroup in the basis (letter `i` is basis
/// element `i - 1`). `None` if the word is not in the subgroup.
pub fn rewrite_in_basis(f: &Folded, basis: &SubgroupBasis, w: &[Letter]) -> Option<Vec<Letter>> {
    let (end, path) = f.graph.read(f.base, &crate::words::reduce(w))?;
    if end != f.base {
        return None;
    }
    let idx: HashMap<usize, usize> = basis.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut out = Vec::new();
    for d in path {
        if let Some(&i) = idx.get(&edge_of(d)) {
            let l = (i + 1) as Letter;
            out.push(if is_forward(d) { l } else { -l });
        }
    }
    Some(crate::words::reduce(&out))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi1Data {
    pub components: usize,
    pub betti: Vec<i64>,
    pub euler_characteristic: i64,
}

pub fn pi1_data(g: &Graph) -> Pi1Data {
    let (comp, k) = g.components();
    let mut nv = vec![0i64; k];
    let mut ne = vec![0i64; k];
    for &c in &comp {
        nv[c] += 1;
    }
    for &(a, _) in &g.edges {
        ne[comp[a]] += 1;
    }
    Pi1Data {
        components: k,
        betti: (0..k).map(|c| ne[c] - nv[c] + 1).collect(),
        euler_characteristic: g.euler_characteristic(),
    }
}

/// All closed reduced circuits in a folded labelled graph spelling `c`
/// (cyclically reduced), one per circuit up to rotation.
pub fn circle_immersion(c: &[Letter], target: &LabeledGraph) -> Vec<Vec<Dart>> {
    let t = target.transitions();
    let mut out: Vec<Vec<Dart>> = Vec::new();
    for v in 0..target.graph.n_vertices {
        if let Some((end, path)) = read_with(&target.graph, &t, v, c) {
            if end == v && !path.is_empty() {
                let p = minimal_period(c);
                let canon = (0..c.len() / p).map(|k| crate::words::rotate(&path, k * p)).min().unwrap();
                if !out.contains(&canon) {
                    out.push(canon);
                }
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<u64>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: u64,
    pub from: u64,
    pub to: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl GraphJson {
    pub fn from_graph(g: &Graph, labels: Option<&[Letter]>) -> GraphJson {
        GraphJson {
            vertices: (0..g.n_vertices as u64).collect(),
            edges: g
                .edges
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| EdgeJson {
                    id: i as u64,
                    from: a as u64,
                    to: b as u64,
                    label: labels.map(|l| format_letters(&[l[i]])),
                })
                .collect(),
        }
    }

    /// Vertices and edges are renumbered in the order listed.
    pub fn to_graph(&self) -> Result<Graph, GraphError> {
        let mut ids = HashMap::new();
        for (i, &v) in self.vertices.iter().enumerate() {
            if ids.insert(v, i).is_some() {
                return Err(GraphError::DuplicateId(v));
            }
        }
        let mut g = Graph::new(self.vertices.len());
        let mut seen = HashMap::new();
        for e in &self.edges {
            if seen.insert(e.id, ()).is_some() {
                return Err(GraphError::DuplicateId(e.id));
            }
            let a = *ids.get(&e.from).ok_or(GraphError::UnknownVertex(e.from))?;
            let b = *ids.get(&e.to).ok_or(GraphError::UnknownVertex(e.to))?;
            g.add_edge(a, b);
        }
        Ok(g)
    }

    pub fn to_labeled(&self, rank: usize) -> Result<LabeledGraph, GraphError> {
        let graph = self.to_graph()?;
        let mut labels = Vec::new();
        for e in &self.edges {
            let s = e.label.as_ref().ok_or(GraphError::MissingLabel(e.id))?;
            let w = Word::parse(s, rank)?;
            if w.len() != 1 {
                return Err(GraphError::Label(WordError::BadChar(s.chars().next().unwrap_or('?'))));
            }
            labels.push(w.0[0]);
        }
        Ok(LabeledGraph { graph, labels })
    }
}

pub fn to_dot(name: &str, g: &Graph, labels: Option<&[Letter]>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph \"{}\" {{", name);
    for v in 0..g.n_vertices {
        let _ = writeln!(s, "  v{};", v);
    }
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        match labels {
            Some(l) => {
                let _ = writeln!(s, "  v{} -> v{} [label=\"{}\"];", a, b, format_letters(&[l[e]]));
            }
            None => {
                let _ = writeln!(s, "  v{} -> v{} [label=\"e{}\"];", a, b, e);
            }
        }
    }
    s.push_str("}\n");
    s
}
