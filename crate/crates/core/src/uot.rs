//! Unions of trees: finite trees glued by rectangles along reduced edge
//! paths between boundary leaves. Vertices marked `y` stand for relative
//! spaces with nontrivial fundamental group; paths may turn back there.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, UnionFind};

pub const FORMAT_VERSION: u32 = 1;

/// A multiple of one half, stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(pub i64);

impl Half {
    pub const ZERO: Half = Half(0);

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl std::ops::Add for Half {
    type Output = Half;
    fn add(self, o: Half) -> Half {
        Half(self.0 + o.0)
    }
}

impl std::ops::Sub for Half {
    type Output = Half;
    fn sub(self, o: Half) -> Half {
        Half(self.0 - o.0)
    }
}

impl std::iter::Sum for Half {
    fn sum<I: Iterator<Item = Half>>(it: I) -> Half {
        Half(it.map(|h| h.0).sum())
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for Half {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Half {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Half, D::Error> {
        let x = f64::deserialize(d)?;
        let h = (x * 2.0).round();
        if (h - x * 2.0).abs() > 1e-9 {
            return Err(serde::de::Error::custom("not a multiple of 1/2"));
        }
        Ok(Half(h as i64))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UotError {
    #[error("tree {0}: {1}")]
    Tree(usize, String),
    #[error("rectangle {0}: {1}")]
    Rectangle(usize, String),
    #[error("the incidence graph is disconnected")]
    Disconnected,
    #[error("not treelike: {0}")]
    NotTreelike(String),
    #[error("no product structure: {0}")]
    NotProduct(String),
    #[error("leaf space: {0}")]
    LeafSpace(String),
}

/// A finite tree as a parent array. Boundary vertices are leaves; every
/// leaf is boundary or marked `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tree {
    pub parent: Vec<Option<usize>>,
    pub boundary: Vec<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub y: Vec<bool>,
}

impl Tree {
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn is_y(&self, v: usize) -> bool {
        self.y.get(v).copied().unwrap_or(false)
    }

    pub fn has_y(&self) -> bool {
        self.y.iter().any(|&b| b)
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.n()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                nb[v].push(p);
                nb[p].push(v);
            }
        }
        nb
    }

    pub fn graph(&self) -> Graph {
        let mut g = Graph::new(self.n());
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                g.add_edge(p, v);
            }
        }
        g
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }

    /// The reduced path between two vertices.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let up = |mut v: usize| {
            let mut p = vec![v];
            while let Some(q) = self.parent[v] {
                p.push(q);
                v = q;
            }
            p
        };
        let (mut pa, mut pb) = (up(a), up(b));
        let mut lca = a;
        while let (Some(&x), Some(&y)) = (pa.last(), pb.last()) {
            if x != y {
                break;
            }
            lca = x;
            pa.pop();
            pb.pop();
        }
        pa.push(lca);
        pa.extend(pb.iter().rev());
        pa
    }

    fn check(&self) -> Result<(), String> {
        let n = self.n();
        if n == 0 {
            return Err("empty".into());
        }
        if self.boundary.len() != n || (!self.y.is_empty() && self.y.len() != n) {
            return Err("flag arrays have the wrong length".into());
        }
        if self.parent.iter().filter(|p| p.is_none()).count() != 1 {
            return Err("needs exactly one root".into());
        }
        for v in 0..n {
            let mut seen = 0;
            let mut u = v;
            while let Some(p) = self.parent[u] {
                if p >= n {
                    return Err(format!("parent {p} out of range"));
                }
                u = p;
                seen += 1;
                if seen > n {
                    return Err("parent array has a cycle".into());
                }
            }
        }
        let nb = self.neighbours();
        for v in 0..n {
            let leaf = nb[v].len() == 1;
            if self.boundary[v] && (!leaf || self.is_y(v)) {
                return Err(format!("boundary vertex {v} is not an unmarked leaf"));
            }
            if leaf && !self.boundary[v] && !self.is_y(v) {
                return Err(format!("leaf {v} is neither boundary nor marked"));
            }
        }
        Ok(())
    }
}

/// A reduced edge path between boundary leaves of one tree, as vertices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Attach {
    pub tree: usize,
    #[serde(with = "path_string")]
    pub path: Vec<usize>,
}

mod path_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &[usize], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        let s = String::deserialize(d)?;
        s.split('-').map(|x| x.trim().parse().map_err(serde::de::Error::custom)).collect()
    }
}

impl Attach {
    pub fn first(&self) -> (usize, usize) {
        (self.tree, self.path[0])
    }

    pub fn last(&self) -> (usize, usize) {
        (self.tree, *self.path.last().unwrap())
    }

    pub fn reversed(&self) -> Attach {
        Attach {
            tree: self.tree,
            path: self.path.iter().rev().copied().collect(),
        }
    }

    /// Whether the path visits no vertex twice.
    pub fn is_embedded(&self) -> bool {
        let mut p = self.path.clone();
        p.sort_unstable();
        p.windows(2).all(|w| w[0] != w[1])
    }
}

/// Rectangle `I × [0, 1]` with `I × 0` on `minus` and `I × 1` on `plus`;
/// both paths are parametrized by `I` in the same direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rectangle {
    pub minus: Attach,
    pub plus: Attach,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionOfTrees {
    pub trees: Vec<Tree>,
    pub rectangles: Vec<Rectangle>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UotJson {
    pub format_version: u32,
    #[serde(flatten)]
    pub z: UnionOfTrees,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZClass {
    /// No marked vertex and `Δ_q^- = 0`.
    Z1,
    /// No marked vertex and `Δ_q^- > 0`.
    Z2,
    /// Some marked vertex.
    Z3,
}

/// `κ(S, ∂S) = #∂S / 2 - 1`.
pub fn kappa(t: &Tree) -> Half {
    Half(t.boundary_count() as i64 - 2)
}

/// `κ(Γ, ∂Γ) = -χ(Γ) + #∂Γ / 2`.
pub fn kappa_graph(g: &Graph, boundary: usize) -> Half {
    Half(-2 * g.euler_characteristic() + boundary as i64)
}

impl UnionOfTrees {
    pub fn validate(&self) -> Result<(), UotError> {
        for (i, t) in self.trees.iter().enumerate() {
            t.check().map_err(|e| UotError::Tree(i, e))?;
        }
        for (j, r) in self.rectangles.iter().enumerate() {
            for side in [&r.minus, &r.plus] {
                let bad = |m: String| UotError::Rectangle(j, m);
                let t = self.trees.get(side.tree).ok_or_else(|| bad(format!("no tree {}", side.tree)))?;
                let p = &side.path;
                if p.len() < 2 {
                    return Err(bad("path has no edges".into()));
                }
                if p.iter().any(|&v| v >= t.n()) {
                    return Err(bad("vertex out of range".into()));
                }
                if !t.boundary[p[0]] || !t.boundary[*p.last().unwrap()] {
                    return Err(bad("path does not end on the boundary".into()));
                }
                for w in p.windows(2) {
                    if t.parent[w[0]] != Some(w[1]) && t.parent[w[1]] != Some(w[0]) {
                        return Err(bad(format!("{} and {} are not adjacent", w[0], w[1])));
                    }
                }
                for i in 1..p.len() - 1 {
                    if p[i - 1] == p[i + 1] && !t.is_y(p[i]) {
                        return Err(bad(format!("path backtracks at unmarked vertex {}", p[i])));
                    }
                }
            }
        }
        if !self.incidence().is_connected() {
            return Err(UotError::Disconnected);
        }
        Ok(())
    }

    /// `G(Z)`: a vertex per tree, an edge per rectangle from minus to plus.
    pub fn incidence(&self) -> Graph {
        let mut g = Graph::new(self.trees.len());
        for r in &self.rectangles {
            g.add_edge(r.minus.tree, r.plus.tree);
        }
        g
    }

    pub fn y_count(&self) -> usize {
        self.trees.iter().map(|t| t.y.iter().filter(|&&b| b).count()).sum()
    }

    fn boundary_index(&self) -> BTreeMap<(usize, usize), usize> {
        let mut idx = BTreeMap::new();
        for (i, t) in self.trees.iter().enumerate() {
            for v in 0..t.n() {
                if t.boundary[v] {
                    let k = idx.len();
                    idx.insert((i, v), k);
                }
            }
        }
        idx
    }

    /// Boundary of the restriction to the chosen rectangles: boundary
    /// leaves joined by the vertical sides. Returns `(components, betti)`.
    pub fn boundary_graph(&self, keep: &[bool]) -> (usize, i64) {
        let idx = self.boundary_index();
        let mut g = Graph::new(idx.len());
        for (r, &k) in self.rectangles.iter().zip(keep) {
            if k {
                g.add_edge(idx[&r.minus.first()], idx[&r.plus.first()]);
                g.add_edge(idx[&r.minus.last()], idx[&r.plus.last()]);
            }
        }
        (g.components().1, g.betti())
    }

    /// Breadth-first maximal tree of `G(Z)` from tree 0, as a rectangle mask.
    pub fn bfs_tree(&self) -> Vec<bool> {
        let g = self.incidence();
        let mut keep = vec![false; self.rectangles.len()];
        let mut seen = vec![false; g.n_vertices];
        let out = g.out_darts();
        seen[0] = true;
        let mut q = VecDeque::from([0]);
        while let Some(v) = q.pop_front() {
            for &d in &out[v] {
                let w = g.head(d);
                if !seen[w] {
                    seen[w] = true;
                    keep[d / 2] = true;
                    q.push_back(w);
                }
            }
        }
        keep
    }

    /// Every maximal tree of `G(Z)`, up to `limit` of them.
    pub fn maximal_trees(&self, limit: usize) -> Vec<Vec<bool>> {
        let m = self.rectangles.len();
        let need = self.trees.len() - 1;
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        fn rec(z: &UnionOfTrees, i: usize, need: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<bool>>, limit: usize) {
            if out.len() >= limit {
                return;
            }
            if chosen.len() == need {
                let mut uf = UnionFind::new(z.trees.len());
                if chosen.iter().all(|&r| uf.union(z.rectangles[r].minus.tree, z.rectangles[r].plus.tree)) {
                    let mut keep = vec![false; z.rectangles.len()];
                    for &r in chosen.iter() {
                        keep[r] = true;
                    }
                    out.push(keep);
                }
                return;
            }
            if z.rectangles.len() - i < need - chosen.len() {
                return;
            }
            chosen.push(i);
            rec(z, i + 1, need, chosen, out, limit);
            chosen.pop();
            rec(z, i + 1, need, chosen, out, limit);
        }
        if m >= need {
            rec(self, 0, need, &mut chosen, &mut out, limit);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deltas {
    pub class: ZClass,
    pub q_minus: Half,
    pub q_plus: Half,
    pub p_minus: i64,
    pub p_plus: i64,
    /// `#∂Z_T`, `betti(∂Z_T)` and `#∂Z`.
    pub boundary_t: usize,
    pub betti_t: i64,
    pub boundary: usize,
    /// `Z ∈ 𝒵₂` with `Δ_q^- = 1/2`: the case with `π₁(Z̄) ≅ ℤ₂`.
    pub z2_flag: bool,
}

pub fn deltas_with(z: &UnionOfTrees, tree: &[bool]) -> Deltas {
    let (boundary_t, betti_t) = z.boundary_graph(tree);
    let (boundary, _) = z.boundary_graph(&vec![true; z.rectangles.len()]);
    let q_minus = Half(boundary_t as i64 - boundary as i64);
    let ys = z.y_count();
    let class = if ys > 0 {
        ZClass::Z3
    } else if q_minus == Half::ZERO {
        ZClass::Z1
    } else {
        ZClass::Z2
    };
    let (q_plus, p_minus, p_plus) = match class {
        ZClass::Z1 => (Half::ZERO, 0, 0),
        ZClass::Z2 => (Half::ZERO, 0, 1),
        ZClass::Z3 => (Half(betti_t), ys as i64 - 1, 0),
    };
    Deltas {
        class,
        q_minus,
        q_plus,
        p_minus,
        p_plus,
        boundary_t,
        betti_t,
        boundary,
        z2_flag: class == ZClass::Z2 && q_minus == Half(1),
    }
}

pub fn deltas(z: &UnionOfTrees) -> Deltas {
    deltas_with(z, &z.bfs_tree())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaBalance {
    /// `κ(Z̄, ∂Z̄) - Σ κ(S, ∂S)`, from the boundary of the whole space.
    pub lhs: Half,
    /// `Δ_q^+ - Δ_q^-`, from a maximal tree.
    pub rhs: Half,
    pub holds: bool,
    /// `Δ_p^- ≥ 2Δ_q^+`, for `𝒵₃`.
    pub p_bound: Option<bool>,
}

pub fn kappa_balance(z: &UnionOfTrees) -> KappaBalance {
    let (boundary, _) = z.boundary_graph(&vec![true; z.rectangles.len()]);
    let kappa_bar = Half(boundary as i64 - 2);
    let lhs = kappa_bar - z.trees.iter().map(kappa).sum::<Half>();
    let d = deltas(z);
    let rhs = d.q_plus - d.q_minus;
    KappaBalance {
        lhs,
        rhs,
        holds: lhs == rhs,
        p_bound: (d.class == ZClass::Z3).then(|| Half(2 * d.p_minus) >= Half(2 * d.q_plus.0)),
    }
}

/// One step of building `Z_T` along a maximal tree: the rectangle added,
/// the new tree, and the change of `κ` beyond `κ` of the new tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionStep {
    pub rectangle: usize,
    pub tree: usize,
    pub excess: Half,
    /// Both ends of the new side on one boundary component of the new
    /// tree, and both ends of the old side on one boundary component so far.
    pub closes_loop: bool,
}

pub fn exhaustion(z: &UnionOfTrees) -> Vec<ExhaustionStep> {
    let tree = z.bfs_tree();
    let idx = z.boundary_index();
    let mut uf = UnionFind::new(idx.len());
    let mut inside = vec![false; z.trees.len()];
    inside[0] = true;
    let mut kappa_so_far = kappa(&z.trees[0]);
    let mut components = z.trees[0].boundary_count() as i64;
    let mut steps = Vec::new();
    let mut pending: Vec<usize> = (0..z.rectangles.len()).filter(|&r| tree[r]).collect();
    while !pending.is_empty() {
        let pos = pending
            .iter()
            .position(|&r| inside[z.rectangles[r].minus.tree] != inside[z.rectangles[r].plus.tree])
            .expect("tree rectangles reach every tree");
        let r = pending.remove(pos);
        let rect = &z.rectangles[r];
        let (old, new) = if inside[rect.minus.tree] {
            (&rect.minus, &rect.plus)
        } else {
            (&rect.plus, &rect.minus)
        };
        inside[new.tree] = true;
        let t = &z.trees[new.tree];
        components += t.boundary_count() as i64;
        let closes_loop = new.first() == new.last() && uf.find(idx[&old.first()]) == uf.find(idx[&old.last()]);
        for (a, b) in [(old.first(), new.first()), (old.last(), new.last())] {
            if uf.union(idx[&a], idx[&b]) {
                components -= 1;
            }
        }
        let after = Half(components - 2);
        steps.push(ExhaustionStep {
            rectangle: r,
            tree: new.tree,
            excess: after - kappa_so_far - kappa(t),
            closes_loop,
        });
        kappa_so_far = after;
    }
    steps
}

/// An attaching path up to reversal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathNode {
    pub tree: usize,
    pub path: Vec<usize>,
}

fn canonical(a: &Attach) -> (PathNode, bool) {
    let r: Vec<usize> = a.path.iter().rev().copied().collect();
    if r < a.path {
        (PathNode { tree: a.tree, path: r }, true)
    } else {
        (
            PathNode {
                tree: a.tree,
                path: a.path.clone(),
            },
            false,
        )
    }
}

/// A product `G × I`: the vertices of `G` are attaching paths, all read in
/// the direction of `I`, and its edges are rectangles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductBand {
    pub nodes: Vec<Attach>,
    /// `(rectangle, minus node, plus node)`.
    pub edges: Vec<(usize, usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDecomposition {
    pub bands: Vec<ProductBand>,
}

/// Groups rectangles sharing an attaching path into bands, orients each
/// band coherently and checks that bands and trees are arranged as a tree.
pub fn try_product_decomposition(z: &UnionOfTrees) -> Result<ProductDecomposition, UotError> {
    let mut node_id: BTreeMap<PathNode, usize> = BTreeMap::new();
    let mut ends = Vec::new();
    for r in &z.rectangles {
        let mut e = [(0, false); 2];
        for (s, a) in [&r.minus, &r.plus].into_iter().enumerate() {
            let (node, flip) = canonical(a);
            let k = node_id.len();
            let id = *node_id.entry(node).or_insert(k);
            e[s] = (id, flip);
        }
        ends.push(e);
    }
    let nodes: Vec<PathNode> = {
        let mut v: Vec<(usize, PathNode)> = node_id.iter().map(|(n, &i)| (i, n.clone())).collect();
        v.sort();
        v.into_iter().map(|(_, n)| n).collect()
    };
    let mut uf = UnionFind::new(nodes.len());
    for e in &ends {
        uf.union(e[0].0, e[1].0);
    }
    let (band_of, k) = uf.labels();
    // orientation of each node relative to its canonical path; a path that
    // reads the same both ways fits either orientation
    let palindrome: Vec<bool> = nodes.iter().map(|n| n.path.iter().eq(n.path.iter().rev())).collect();
    let mut flip: Vec<Option<bool>> = vec![None; nodes.len()];
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nodes.len()];
    for e in &ends {
        if palindrome[e[0].0] || palindrome[e[1].0] {
            continue;
        }
        let rel = e[0].1 ^ e[1].1;
        adj[e[0].0].push((e[1].0, rel));
        adj[e[1].0].push((e[0].0, rel));
    }
    for s in 0..nodes.len() {
        if flip[s].is_some() {
            continue;
        }
        flip[s] = Some(false);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let fu = flip[u].unwrap();
            for &(w, rel) in &adj[u] {
                match flip[w] {
                    None => {
                        flip[w] = Some(fu ^ rel);
                        q.push_back(w);
                    }
                    Some(f) if f != fu ^ rel => {
                        return Err(UotError::NotProduct(format!("band through tree {} is not coherently oriented", nodes[w].tree)));
                    }
                    _ => {}
                }
            }
        }
    }
    // bands and trees form a tree: one incidence per node
    let mut inc = Graph::new(k + z.trees.len());
    for (i, n) in nodes.iter().enumerate() {
        inc.add_edge(band_of[i], k + n.tree);
    }
    if !inc.is_tree() {
        return Err(UotError::NotProduct("bands and trees do not form a tree".into()));
    }
    let mut bands: Vec<ProductBand> = vec![
        ProductBand {
            nodes: Vec::new(),
            edges: Vec::new()
        };
        k
    ];
    let mut local = vec![0; nodes.len()];
    for (i, n) in nodes.iter().enumerate() {
        let b = &mut bands[band_of[i]];
        local[i] = b.nodes.len();
        let a = Attach {
            tree: n.tree,
            path: n.path.clone(),
        };
        b.nodes.push(if flip[i].unwrap() { a.reversed() } else { a });
    }
    for (r, e) in ends.iter().enumerate() {
        bands[band_of[e[0].0]].edges.push((r, local[e[0].0], local[e[1].0]));
    }
    Ok(ProductDecomposition { bands })
}

pub fn is_treelike(z: &UnionOfTrees) -> bool {
    let d = deltas(z);
    d.q_minus == Half::ZERO && (d.class != ZClass::Z3 || d.q_plus == Half::ZERO)
}

pub fn product_decomposition(z: &UnionOfTrees) -> Result<ProductDecomposition, UotError> {
    if !is_treelike(z) {
        let d = deltas(z);
        return Err(UotError::NotTreelike(format!("Δ_q^- = {}, Δ_q^+ = {}", d.q_minus, d.q_plus)));
    }
    try_product_decomposition(z)
}

/// The union of trees glued back together from its bands.
pub fn reassemble(trees: &[Tree], p: &ProductDecomposition) -> UnionOfTrees {
    let mut rectangles = Vec::new();
    for b in &p.bands {
        for &(_, u, v) in &b.edges {
            rectangles.push(Rectangle {
                minus: b.nodes[u].clone(),
                plus: b.nodes[v].clone(),
            });
        }
    }
    UnionOfTrees {
        trees: trees.to_vec(),
        rectangles,
    }
}

/// Rectangles up to reversing `I` and swapping the two sides.
pub fn rectangle_multiset(z: &UnionOfTrees) -> Vec<(Attach, Attach)> {
    let mut out: Vec<(Attach, Attach)> = z
        .rectangles
        .iter()
        .map(|r| {
            let (m, p) = (r.minus.clone(), r.plus.clone());
            let (mr, pr) = (m.reversed(), p.reversed());
            [(m.clone(), p.clone()), (mr.clone(), pr.clone()), (p, m), (pr, mr)].into_iter().min().unwrap()
        })
        .collect();
    out.sort();
    out
}

/// Same trees and the same rectangles.
pub fn same_union(a: &UnionOfTrees, b: &UnionOfTrees) -> bool {
    a.trees == b.trees && rectangle_multiset(a) == rectangle_multiset(b)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeafSpace {
    pub graph: Graph,
    /// Image of each vertex of each tree.
    pub vertex_image: Vec<Vec<usize>>,
    /// Image of each boundary component of `Z`, in the order of the
    /// boundary leaves' first appearance.
    pub boundary_images: Vec<usize>,
    pub is_tree: bool,
    pub trees_embed: bool,
    pub intersections_are_intervals: bool,
    pub leaves_match_boundary: bool,
    pub kappa: Half,
    pub kappa_z: Half,
    pub preimages_connected: bool,
}

impl LeafSpace {
    pub fn all_hold(&self) -> bool {
        self.is_tree
            && self.trees_embed
            && self.intersections_are_intervals
            && self.leaves_match_boundary
            && self.kappa == self.kappa_z
            && self.preimages_connected
    }
}

/// Working copy of the leaf space while trees are glued in.
struct Gluing {
    g: Graph,
    /// Image of each edge of each placed tree, as darts of `g`.
    edge_image: Vec<Vec<Vec<usize>>>,
    vertex_image: Vec<Vec<usize>>,
    band_path: Vec<Vec<usize>>,
}

impl Gluing {
    fn subdivide(&mut self, e: usize, k: usize) {
        if k <= 1 {
            return;
        }
        let (a, b) = self.g.edges[e];
        let mut vs = vec![a];
        for _ in 1..k {
            vs.push(self.g.add_vertex());
        }
        vs.push(b);
        self.g.edges[e] = (vs[0], vs[1]);
        let mut new = vec![e];
        for i in 1..k {
            new.push(self.g.add_edge(vs[i], vs[i + 1]));
        }
        let fwd: Vec<usize> = new.iter().map(|&x| 2 * x).collect();
        let bwd: Vec<usize> = new.iter().rev().map(|&x| 2 * x + 1).collect();
        for im in self.edge_image.iter_mut().flatten() {
            let mut out = Vec::with_capacity(im.len());
            for &d in im.iter() {
                if d / 2 == e {
                    out.extend(if d % 2 == 0 { &fwd } else { &bwd });
                } else {
                    out.push(d);
                }
            }
            *im = out;
        }
    }

    /// Darts of the image of a path in a placed tree.
    fn path_darts(&self, t: &Tree, tree: usize, path: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        for w in path.windows(2) {
            let (e, fwd) = tree_edge(t, w[0], w[1]);
            let im = &self.edge_image[tree][e];
            if fwd {
                out.extend(im);
            } else {
                out.extend(im.iter().rev().map(|d| d ^ 1));
            }
        }
        out
    }
}

/// Edge id (the child vertex) of a tree edge, and whether `a → b` points
/// from parent to child.
fn tree_edge(t: &Tree, a: usize, b: usize) -> (usize, bool) {
    if t.parent[b] == Some(a) {
        (b, true)
    } else {
        (a, false)
    }
}

/// Leaf space of a treelike union of trees whose attaching paths are
/// embedded. The bands collapse to intervals; trees are glued along them
/// in the order of the band/tree incidence tree.
pub fn leaf_space(z: &UnionOfTrees) -> Result<LeafSpace, UotError> {
    if z.y_count() > 0 {
        return Err(UotError::LeafSpace("marked vertices have no leaf space".into()));
    }
    let p = product_decomposition(z)?;
    for r in &z.rectangles {
        if !r.minus.is_embedded() || !r.plus.is_embedded() {
            return Err(UotError::LeafSpace("attaching paths must be embedded".into()));
        }
    }
    let nt = z.trees.len();
    let mut gl = Gluing {
        g: Graph::new(0),
        edge_image: vec![Vec::new(); nt],
        vertex_image: vec![Vec::new(); nt],
        band_path: vec![Vec::new(); p.bands.len()],
    };
    let mut placed = vec![false; nt];
    place(z, &mut gl, 0, None);
    placed[0] = true;
    let mut band_done = vec![false; p.bands.len()];
    while let Some((b, anchor)) = p.bands.iter().enumerate().find_map(|(b, band)| {
        if band_done[b] {
            return None;
        }
        band.nodes.iter().position(|n| placed[n.tree]).map(|i| (b, i))
    }) {
        band_done[b] = true;
        let band = &p.bands[b];
        for (i, n) in band.nodes.iter().enumerate() {
            if i == anchor {
                continue;
            }
            if placed[n.tree] {
                return Err(UotError::LeafSpace("a band meets a tree twice".into()));
            }
            place(z, &mut gl, n.tree, Some((&band.nodes[anchor], &n.path)));
            placed[n.tree] = true;
        }
    }
    if placed.iter().any(|&x| !x) {
        return Err(UotError::LeafSpace("some tree is not reached by a band".into()));
    }
    for (b, band) in p.bands.iter().enumerate() {
        let a = &band.nodes[0];
        let darts = gl.path_darts(&z.trees[a.tree], a.tree, &a.path);
        gl.band_path[b] = std::iter::once(gl.g.tail(darts[0])).chain(darts.iter().map(|&d| gl.g.head(d))).collect();
    }
    Ok(inspect(z, &p, gl))
}

/// Adds tree `t` to the leaf space, glued along `glue.1` to the image of
/// the placed path `glue.0` when given.
fn place(z: &UnionOfTrees, gl: &mut Gluing, t: usize, glue: Option<(&Attach, &[usize])>) {
    let tree = &z.trees[t];
    let mut vimg = vec![usize::MAX; tree.n()];
    let mut eimg: Vec<Vec<usize>> = vec![Vec::new(); tree.n()];
    if let Some((anchor, path)) = glue {
        let at = &z.trees[anchor.tree];
        let before = gl.path_darts(at, anchor.tree, &anchor.path);
        let m = before.len();
        let l = path.len() - 1;
        for &d in &before {
            gl.subdivide(d / 2, l);
        }
        // m pieces for each edge of the new path
        let all = gl.path_darts(at, anchor.tree, &anchor.path);
        debug_assert_eq!(all.len(), m * l);
        for (i, w) in path.windows(2).enumerate() {
            let (e, fwd) = tree_edge(tree, w[0], w[1]);
            let seg = &all[i * m..(i + 1) * m];
            eimg[e] = if fwd { seg.to_vec() } else { seg.iter().rev().map(|d| d ^ 1).collect() };
            vimg[w[0]] = gl.g.tail(seg[0]);
            vimg[w[1]] = gl.g.head(seg[m - 1]);
        }
    }
    let nb = tree.neighbours();
    let start = (0..tree.n()).find(|&v| vimg[v] != usize::MAX).unwrap_or(0);
    if vimg[start] == usize::MAX {
        vimg[start] = gl.g.add_vertex();
    }
    let mut q = VecDeque::from([start]);
    let mut seen = vec![false; tree.n()];
    seen[start] = true;
    while let Some(v) = q.pop_front() {
        for &w in &nb[v] {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            let (e, fwd) = tree_edge(tree, v, w);
            if eimg[e].is_empty() {
                vimg[w] = gl.g.add_vertex();
                let (a, b) = if fwd { (vimg[v], vimg[w]) } else { (vimg[w], vimg[v]) };
                eimg[e] = vec![2 * gl.g.add_edge(a, b)];
            }
            q.push_back(w);
        }
    }
    gl.vertex_image[t] = vimg;
    gl.edge_image[t] = eimg;
}

fn inspect(z: &UnionOfTrees, p: &ProductDecomposition, gl: Gluing) -> LeafSpace {
    let g = gl.g;
    let is_tree = g.is_tree();
    // each tree embeds: injective on vertices, edge images disjoint
    let mut trees_embed = true;
    let mut cover: Vec<Vec<bool>> = Vec::new();
    let mut vcover: Vec<Vec<bool>> = Vec::new();
    for (t, ims) in gl.edge_image.iter().enumerate() {
        let mut ev = vec![false; g.n_edges()];
        let mut vv = vec![false; g.n_vertices];
        for im in ims {
            for &d in im {
                if std::mem::replace(&mut ev[d / 2], true) {
                    trees_embed = false;
                }
                vv[g.tail(d)] = true;
                vv[g.head(d)] = true;
            }
        }
        let mut seen = vec![false; g.n_vertices];
        for &v in &gl.vertex_image[t] {
            if std::mem::replace(&mut seen[v], true) {
                trees_embed = false;
            }
            vv[v] = true;
        }
        cover.push(ev);
        vcover.push(vv);
    }
    let mut intersections_are_intervals = true;
    for s in 0..cover.len() {
        for t in s + 1..cover.len() {
            let kv: Vec<bool> = (0..g.n_vertices).map(|v| vcover[s][v] && vcover[t][v]).collect();
            let ke: Vec<bool> = (0..g.n_edges()).map(|e| cover[s][e] && cover[t][e]).collect();
            if !kv.iter().any(|&x| x) {
                continue;
            }
            let (sub, _, _) = g.induced(&kv, &ke);
            let path_like = sub.is_tree() && (0..sub.n_vertices).all(|v| sub.degree(v) <= 2);
            if !path_like {
                intersections_are_intervals = false;
            }
        }
    }
    // boundary components of Z and their images
    let idx = z.boundary_index();
    let mut uf = UnionFind::new(idx.len());
    for r in &z.rectangles {
        uf.union(idx[&r.minus.first()], idx[&r.plus.first()]);
        uf.union(idx[&r.minus.last()], idx[&r.plus.last()]);
    }
    let mut comp_image: BTreeMap<usize, usize> = BTreeMap::new();
    let mut images_ok = true;
    let mut boundary_images = Vec::new();
    for (&(t, v), &i) in &idx {
        let c = uf.find(i);
        let img = gl.vertex_image[t][v];
        match comp_image.get(&c) {
            Some(&x) if x != img => images_ok = false,
            Some(_) => {}
            None => {
                comp_image.insert(c, img);
                boundary_images.push(img);
            }
        }
    }
    let mut imgs: Vec<usize> = comp_image.values().copied().collect();
    imgs.sort_unstable();
    let distinct = imgs.windows(2).all(|w| w[0] != w[1]);
    let leaves: Vec<usize> = (0..g.n_vertices).filter(|&v| g.degree(v) == 1).collect();
    let leaves_match_boundary = images_ok && distinct && leaves == imgs;
    let kappa = kappa_graph(&g, imgs.len());
    let kappa_z = Half(comp_image.len() as i64 - 2);
    // preimage of a point: the trees through it, linked by band leaves
    let mut preimages_connected = true;
    for x in 0..g.n_vertices {
        let ts: Vec<usize> = (0..vcover.len()).filter(|&t| vcover[t][x]).collect();
        if ts.len() <= 1 {
            continue;
        }
        let mut u = UnionFind::new(z.trees.len());
        for (b, band) in p.bands.iter().enumerate() {
            if gl.band_path[b].contains(&x) {
                for w in band.nodes.windows(2) {
                    u.union(w[0].tree, w[1].tree);
                }
            }
        }
        let r = u.find(ts[0]);
        if ts.iter().any(|&t| u.find(t) != r) {
            preimages_connected = false;
        }
    }
    LeafSpace {
        graph: g,
        vertex_image: gl.vertex_image,
        boundary_images,
        is_tree,
        trees_embed,
        intersections_are_intervals,
        leaves_match_boundary,
        kappa,
        kappa_z,
        preimages_connected,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UotParams {
    pub max_trees: usize,
    pub max_tree_vertices: usize,
    pub max_extra_rectangles: usize,
    pub y_probability: f64,
}

impl Default for UotParams {
    fn default() -> Self {
        UotParams {
            max_trees: 5,
            max_tree_vertices: 6,
            max_extra_rectangles: 4,
            y_probability: 0.3,
        }
    }
}

fn random_tree<R: Rng>(p: &UotParams, allow_y: bool, rng: &mut R) -> Tree {
    loop {
        let n = rng.gen_range(2..=p.max_tree_vertices);
        let parent: Vec<Option<usize>> = (0..n).map(|i| if i == 0 { None } else { Some(rng.gen_range(0..i)) }).collect();
        let mut t = Tree {
            parent,
            boundary: vec![false; n],
            y: Vec::new(),
        };
        let nb = t.neighbours();
        if allow_y && rng.gen_bool(p.y_probability) {
            let mut y = vec![false; n];
            y[rng.gen_range(0..n)] = true;
            t.y = y;
        }
        for v in 0..n {
            t.boundary[v] = nb[v].len() == 1 && !t.is_y(v);
        }
        let b = t.boundary_count();
        if b >= 2 || (b >= 1 && t.has_y()) {
            return t;
        }
    }
}

/// A random reduced path between boundary leaves, turning at a marked
/// vertex when the tree has one and the coin says so.
fn random_path<R: Rng>(t: &Tree, rng: &mut R) -> Vec<usize> {
    let bs: Vec<usize> = (0..t.n()).filter(|&v| t.boundary[v]).collect();
    let ys: Vec<usize> = (0..t.n()).filter(|&v| t.is_y(v)).collect();
    if !ys.is_empty() && (bs.len() < 2 || rng.gen_bool(0.5)) {
        let a = *bs.choose(rng).unwrap();
        let b = *bs.choose(rng).unwrap();
        let y = *ys.choose(rng).unwrap();
        let mut p = t.path(a, y);
        p.extend(&t.path(y, b)[1..]);
        return p;
    }
    let a = *bs.choose(rng).unwrap();
    let others: Vec<usize> = bs.iter().copied().filter(|&x| x != a).collect();
    t.path(a, *others.choose(rng).unwrap())
}

/// A random union of trees. Half of the seeds build it band by band so
/// that it is treelike.
pub fn random_union(seed: u64, p: &UotParams) -> UnionOfTrees {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let treelike = rng.gen_bool(0.5);
    let allow_y = !treelike || rng.gen_bool(0.5);
    let n = rng.gen_range(1..=p.max_trees);
    let mut trees = vec![random_tree(p, allow_y, &mut rng)];
    let mut rectangles = Vec::new();
    if treelike {
        while trees.len() < n {
            let s = rng.gen_range(0..trees.len());
            let base = Attach {
                tree: s,
                path: random_path(&trees[s], &mut rng),
            };
            let mut nodes = vec![base];
            for _ in 0..rng.gen_range(1..=2).min(n - trees.len()) {
                let t = random_tree(p, allow_y, &mut rng);
                let path = random_path(&t, &mut rng);
                trees.push(t);
                nodes.push(Attach { tree: trees.len() - 1, path });
            }
            for i in 1..nodes.len() {
                rectangles.push(Rectangle {
                    minus: nodes[0].clone(),
                    plus: nodes[i].clone(),
                });
            }
            for _ in 0..rng.gen_range(0..=1) {
                let i = rng.gen_range(0..nodes.len());
                let j = rng.gen_range(0..nodes.len());
                if i != j {
                    rectangles.push(Rectangle {
                        minus: nodes[i].clone(),
                        plus: nodes[j].clone(),
                    });
                }
            }
        }
    } else {
        for i in 1..n {
            trees.push(random_tree(p, allow_y, &mut rng));
            let j = rng.gen_range(0..i);
            let (a, b) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
            let minus = Attach {
                tree: a,
                path: random_path(&trees[a], &mut rng),
            };
            let plus = Attach {
                tree: b,
                path: random_path(&trees[b], &mut rng),
            };
            rectangles.push(Rectangle { minus, plus });
        }
        for _ in 0..rng.gen_range(0..=p.max_extra_rectangles) {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let minus = Attach {
                tree: a,
                path: random_path(&trees[a], &mut rng),
            };
            let plus = Attach {
                tree: b,
                path: random_path(&trees[b], &mut rng),
            };
            rectangles.push(Rectangle { minus, plus });
        }
    }
    UnionOfTrees { trees, rectangles }
}

#[cfg(test)]
mod tests;
