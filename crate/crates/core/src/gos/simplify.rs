use std::cmp::Ordering;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{Carry, Gos, GosError};
use crate::graph::{edge_of, Dart};

const ESCAPE_BUDGET: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexClass {
    /// Some `J` of size at most two fails both disjoint-union conditions.
    Foldable {
        j: Vec<Dart>,
    },
    /// Unfoldable with a non-embedded incident edge graph.
    Degenerate {
        e0: Dart,
    },
    /// Unfoldable, valence three, all embeddings, common vertex `w`.
    Nondegenerate {
        w: usize,
    },
    /// Unfoldable with embedded edge graphs but not of the two shapes above;
    /// only occurs at vertices that are not reduced.
    OtherUnfoldable,
    /// Valence two on a single loop, both maps isomorphisms.
    MappingTorus,
    Isolated,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Complexity(pub Vec<i64>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStep {
    Reduce {
        collapses: usize,
    },
    Fold {
        vertex: usize,
        j: Vec<Dart>,
        before: Complexity,
        after: Complexity,
    },
}

#[derive(Clone, Debug)]
pub struct MinimizeResult {
    pub gos: Gos,
    pub carry: Carry,
    pub trace: Vec<TraceStep>,
    pub complexity: Complexity,
    pub capped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexSeparability {
    Trivial,
    /// `V = im(left) v_w im(right)` and the map of `iso` is an isomorphism.
    Splittable {
        w: usize,
        iso: Dart,
        left: Dart,
        right: Dart,
    },
    Unsplittable {
        w: usize,
    },
    MappingTorus,
    NotSeparable {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separability {
    pub chi_equal: bool,
    pub vertices: Vec<VertexSeparability>,
    pub separable: bool,
}

impl Gos {
    /// Whether `⊔_{j∈J} E_j → V_J` is injective on vertices and edges.
    fn disjoint_union_condition(&self, v: usize, j: &[Dart]) -> bool {
        let vg = &self.vertex_graphs[v];
        let mut sv = vec![false; vg.n_vertices];
        let mut se = vec![false; vg.n_edges()];
        for &d in j {
            let m = self.dart_map(d);
            for &y in &m.vmap {
                if std::mem::replace(&mut sv[y], true) {
                    return false;
                }
            }
            for &img in &m.emap {
                if std::mem::replace(&mut se[edge_of(img)], true) {
                    return false;
                }
            }
        }
        true
    }

    /// A subset of size one or two violating both conditions, if any.
    pub fn foldable_set(&self, v: usize) -> Option<Vec<Dart>> {
        let inc = self.incident(v);
        for size in 1..=2 {
            for j in inc.iter().copied().combinations(size) {
                if j.len() == inc.len() {
                    continue;
                }
                let rest: Vec<Dart> = inc.iter().copied().filter(|d| !j.contains(d)).collect();
                if !self.disjoint_union_condition(v, &j) && !self.disjoint_union_condition(v, &rest) {
                    return Some(j);
                }
            }
        }
        None
    }

    /// Vertices of the vertex graph lying in the image of every incident map.
    pub fn common_points(&self, v: usize) -> Vec<usize> {
        let vg = &self.vertex_graphs[v];
        let mut count = vec![0usize; vg.n_vertices];
        let inc = self.incident(v);
        for &d in &inc {
            let (img, _) = self.dart_map(d).image(vg);
            for y in 0..vg.n_vertices {
                count[y] += usize::from(img[y]);
            }
        }
        (0..vg.n_vertices).filter(|&y| count[y] == inc.len()).collect()
    }

    pub fn is_mapping_torus_vertex(&self, v: usize) -> bool {
        let inc = self.incident(v);
        inc.len() == 2 && edge_of(inc[0]) == edge_of(inc[1]) && self.is_iso(inc[0]) && self.is_iso(inc[1])
    }

    pub fn classify_vertex(&self, v: usize) -> VertexClass {
        let inc = self.incident(v);
        if inc.is_empty() {
            return VertexClass::Isolated;
        }
        if self.is_mapping_torus_vertex(v) {
            return VertexClass::MappingTorus;
        }
        if let Some(j) = self.foldable_set(v) {
            return VertexClass::Foldable { j };
        }
        if let Some(&e0) = inc.iter().find(|&&d| !self.is_embedding(d)) {
            return VertexClass::Degenerate { e0 };
        }
        match (inc.len(), self.common_points(v).first()) {
            (3, Some(&w)) => VertexClass::Nondegenerate { w },
            _ => VertexClass::OtherUnfoldable,
        }
    }

    pub fn complexity(&self) -> Result<Complexity, GosError> {
        if !self.is_reduced() {
            return Err(GosError::Precondition("complexity needs a reduced space".into()));
        }
        let val: Vec<usize> = (0..self.n_vertices()).map(|v| self.valence(v)).collect();
        let k = val.iter().copied().max().unwrap_or(0);
        let mut c = vec![-self.underlying.betti(), k as i64];
        if k >= 2 {
            for l in (3..=k).rev() {
                c.push(val.iter().filter(|&&x| x == l).count() as i64);
            }
            let two: Vec<usize> = (0..self.n_vertices()).filter(|&v| val[v] == 2).collect();
            let red = two.iter().filter(|&&v| self.incident(v).iter().all(|&d| self.is_iso(d))).count();
            let deg = two
                .iter()
                .filter(|&&v| matches!(self.classify_vertex(v), VertexClass::Degenerate { .. }))
                .count();
            c.push(red as i64);
            c.push(-(deg as i64));
        }
        Ok(Complexity(c))
    }

    /// Greedy descent of the complexity through folds of one or two incident
    /// edges, reducing after each fold. Vertices are scanned in id order and
    /// the first strictly improving fold is taken.
    pub fn minimize(&self) -> Result<MinimizeResult, GosError> {
        let (mut x, mut carry, n) = self.reduce();
        let mut trace = vec![TraceStep::Reduce { collapses: n }];
        let mut c = x.complexity()?;
        let cap = 10 * (self.total_edges() + 1).pow(2);
        let mut steps = 0;
        let mut capped = false;
        let mut history: Vec<(Gos, Complexity, usize, Carry)> = Vec::new();
        'outer: loop {
            if steps >= cap {
                capped = true;
                break;
            }
            for v in 0..x.n_vertices() {
                let inc = x.incident(v);
                for size in 1..=2 {
                    for j in inc.iter().copied().combinations(size) {
                        if j.len() >= inc.len() {
                            continue;
                        }
                        let (y, c1) = x.fold(v, &j)?;
                        let (y, c2, m) = y.reduce();
                        let cy = y.complexity()?;
                        if cy.cmp(&c) == Ordering::Less {
                            history.push((x.clone(), c.clone(), trace.len(), carry.clone()));
                            trace.push(TraceStep::Fold {
                                vertex: v,
                                j,
                                before: c.clone(),
                                after: cy.clone(),
                            });
                            if m > 0 {
                                trace.push(TraceStep::Reduce { collapses: m });
                            }
                            carry = carry.then(&c1).then(&c2);
                            x = y;
                            c = cy;
                            steps += 1;
                            continue 'outer;
                        }
                    }
                }
            }
            history.push((x.clone(), c.clone(), trace.len(), carry.clone()));
            let mut escape = None;
            let mut seen = HashSet::new();
            let mut budget = ESCAPE_BUDGET;
            for (i, (y, cy, _, _)) in history.iter().enumerate() {
                if let Some(path) = y.descent_path(cy, &c, &mut seen, &mut budget)? {
                    escape = Some((i, path));
                    break;
                }
            }
            let Some((i, path)) = escape else { break };
            history.truncate(i + 1);
            let (y, cy, k, cr) = history.pop().unwrap();
            (x, c, carry) = (y, cy, cr);
            trace.truncate(k);
            for (v, j) in path {
                history.push((x.clone(), c.clone(), trace.len(), carry.clone()));
                let (y, c1) = x.fold(v, &j)?;
                let (y, c2, m) = y.reduce();
                let cy = y.complexity()?;
                trace.push(TraceStep::Fold {
                    vertex: v,
                    j,
                    before: c.clone(),
                    after: cy.clone(),
                });
                if m > 0 {
                    trace.push(TraceStep::Reduce { collapses: m });
                }
                carry = carry.then(&c1).then(&c2);
                x = y;
                c = cy;
                steps += 1;
            }
        }
        Ok(MinimizeResult {
            gos: x,
            carry,
            trace,
            complexity: c,
            capped,
        })
    }

    /// Looks for a chain of strictly decreasing folds (any `J`) from `self`,
    /// of complexity `c`, ending below `goal`. Best first, lowest complexity
    /// expanded first; each space not already in `seen` uses up one unit of
    /// `budget`.
    /// Greedy descent can stall above the minimum: an early fold may lead
    /// into a worse basin than a rival fold that only pays off through a
    /// later fold with `|J| ≥ 3`.
    fn descent_path(
        &self,
        c: &Complexity,
        goal: &Complexity,
        seen: &mut HashSet<Vec<u64>>,
        budget: &mut usize,
    ) -> Result<Option<Vec<(usize, Vec<Dart>)>>, GosError> {
        seen.insert(self.canonical_form());
        let mut spaces = vec![(self.clone(), Vec::new())];
        let mut heap = BinaryHeap::from([(Reverse(c.clone()), 0usize)]);
        while let Some((Reverse(cx), i)) = heap.pop() {
            let (x, path) = spaces[i].clone();
            for v in 0..x.n_vertices() {
                let inc = x.incident(v);
                for mask in 1..(1u64 << inc.len()) - 1 {
                    let j: Vec<Dart> = (0..inc.len()).filter(|i| mask >> i & 1 == 1).map(|i| inc[i]).collect();
                    let (y, _) = x.fold(v, &j)?;
                    let (y, _, _) = y.reduce();
                    let cy = y.complexity()?;
                    if cy >= cx || !seen.insert(y.canonical_form()) {
                        continue;
                    }
                    let mut p = path.clone();
                    p.push((v, j));
                    if &cy < goal {
                        return Ok(Some(p));
                    }
                    if *budget == 0 {
                        return Ok(None);
                    }
                    *budget -= 1;
                    heap.push((Reverse(cy), spaces.len()));
                    spaces.push((y, p));
                }
            }
        }
        Ok(None)
    }

    pub fn separability(&self) -> Separability {
        let chi_equal = self.chi_horizontal() == self.chi_underlying();
        let vertices: Vec<VertexSeparability> = (0..self.n_vertices()).map(|v| self.vertex_separability(v)).collect();
        let separable = chi_equal && vertices.iter().all(|s| !matches!(s, VertexSeparability::NotSeparable { .. }));
        Separability {
            chi_equal,
            vertices,
            separable,
        }
    }

    pub fn vertex_separability(&self, v: usize) -> VertexSeparability {
        use VertexSeparability::*;
        let fail = |r: &str| NotSeparable { reason: r.to_string() };
        if self.is_mapping_torus_vertex(v) {
            return MappingTorus;
        }
        let inc = self.incident(v);
        if inc.len() != 3 {
            return NotSeparable {
                reason: format!("valence {}", inc.len()),
            };
        }
        if !inc.iter().all(|&d| self.is_embedding(d)) {
            return fail("non-embedded incident edge graph");
        }
        let common = self.common_points(v);
        if common.len() != 1 {
            return NotSeparable {
                reason: format!("{} common points", common.len()),
            };
        }
        let w = common[0];
        let weight = |d: Dart| self.dart_graph(d).n_edges();
        let points: Vec<Dart> = inc.iter().copied().filter(|&d| weight(d) == 0).collect();
        if points.len() == 3 {
            return Trivial;
        }
        let isos: Vec<Dart> = inc.iter().copied().filter(|&d| self.is_iso(d)).collect();
        if points.len() == 1 && isos.len() == 2 && !isos.contains(&points[0]) {
            return Trivial;
        }
        let vg = &self.vertex_graphs[v];
        let vset = |d: Dart| self.dart_map(d).image(vg).0;
        for &k in &isos {
            if weight(k) == 0 {
                continue;
            }
            let rest: Vec<Dart> = inc.iter().copied().filter(|&d| d != k).collect();
            let (a, b) = (rest[0], rest[1]);
            if weight(a) == 0 || weight(b) == 0 {
                continue;
            }
            let (va, vb) = (vset(a), vset(b));
            let meet: Vec<usize> = (0..vg.n_vertices).filter(|&y| va[y] && vb[y]).collect();
            let cover = (0..vg.n_vertices).all(|y| va[y] || vb[y]);
            if meet == [w] && cover {
                return Splittable { w, iso: k, left: a, right: b };
            }
        }
        // three petals: edges shared by each pair form connected graphs through w
        let mut owner: Vec<Vec<usize>> = vec![Vec::new(); vg.n_edges()];
        for (i, &d) in inc.iter().enumerate() {
            for &img in &self.dart_map(d).emap {
                owner[edge_of(img)].push(i);
            }
        }
        let mut petal_v: Vec<Vec<bool>> = vec![vec![false; vg.n_vertices]; 3];
        let mut petal_e: Vec<Vec<bool>> = vec![vec![false; vg.n_edges()]; 3];
        for (f, o) in owner.iter().enumerate() {
            if o.len() != 2 {
                return fail("edge not shared by exactly two incident edge graphs");
            }
            let p = 3 - o[0] - o[1];
            petal_e[p][f] = true;
            let (a, b) = vg.edges[f];
            petal_v[p][a] = true;
            petal_v[p][b] = true;
        }
        for p in 0..3 {
            if !petal_e[p].iter().any(|&x| x) || !petal_v[p][w] {
                return fail("petal missing or away from the common point");
            }
            if super::moves::pieces(vg, &petal_v[p], &petal_e[p]).len() != 1 {
                return fail("disconnected petal");
            }
            for q in p + 1..3 {
                if (0..vg.n_vertices).any(|y| y != w && petal_v[p][y] && petal_v[q][y]) {
                    return fail("petals meet away from the common point");
                }
            }
        }
        Unsplittable { w }
    }
}
