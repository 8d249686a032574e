use std::collections::HashMap;

use super::{Gos, GosError};
use crate::graph::{edge_of, is_forward, Dart, Graph, Morphism, UnionFind};
use crate::words::{concat_reduce, inverse, reduce, Letter};

/// How a move transports data from the old space to the new one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Carry {
    /// New `(vertex, local vertex)` of each old horizontal vertex, `[v][y]`.
    pub points: Vec<Vec<(usize, usize)>>,
    /// New underlying vertex of each old one.
    pub vertex: Vec<usize>,
    /// Label correction at each old vertex for edges living outside the
    /// space: an edge ending there becomes `l g`, one starting there `g^-1 l`.
    pub twist: Vec<Vec<Letter>>,
}

impl Carry {
    pub fn identity(x: &Gos) -> Carry {
        Carry {
            points: x
                .vertex_graphs
                .iter()
                .enumerate()
                .map(|(v, g)| (0..g.n_vertices).map(|y| (v, y)).collect())
                .collect(),
            vertex: (0..x.n_vertices()).collect(),
            twist: vec![Vec::new(); x.n_vertices()],
        }
    }

    pub fn then(&self, next: &Carry) -> Carry {
        Carry {
            points: self.points.iter().map(|ps| ps.iter().map(|&(v, y)| next.points[v][y]).collect()).collect(),
            vertex: self.vertex.iter().map(|&v| next.vertex[v]).collect(),
            twist: self.twist.iter().zip(&self.vertex).map(|(g, &v)| concat_reduce(g, &next.twist[v])).collect(),
        }
    }
}

pub(crate) struct Piece {
    pub graph: Graph,
    pub vmap: Vec<Option<usize>>,
    pub emap: Vec<Option<usize>>,
}

impl Piece {
    pub fn contains_vertex(&self, y: usize) -> bool {
        self.vmap[y].is_some()
    }

    /// Corestriction of a map whose image lies in the piece.
    pub fn restrict(&self, m: &Morphism) -> Morphism {
        Morphism {
            vmap: m.vmap.iter().map(|&y| self.vmap[y].expect("image inside piece")).collect(),
            emap: m
                .emap
                .iter()
                .map(|&d| 2 * self.emap[edge_of(d)].expect("image inside piece") + (d & 1))
                .collect(),
        }
    }

    pub fn inclusion(&self) -> Morphism {
        let mut vmap = vec![0; self.graph.n_vertices];
        for (y, &n) in self.vmap.iter().enumerate() {
            if let Some(n) = n {
                vmap[n] = y;
            }
        }
        let mut emap = vec![0; self.graph.n_edges()];
        for (f, &n) in self.emap.iter().enumerate() {
            if let Some(n) = n {
                emap[n] = 2 * f;
            }
        }
        Morphism { vmap, emap }
    }
}

/// Connected components of the subgraph given by masks, ordered by their
/// smallest vertex.
pub(crate) fn pieces(g: &Graph, keep_v: &[bool], keep_e: &[bool]) -> Vec<Piece> {
    let mut uf = UnionFind::new(g.n_vertices);
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        if keep_e[e] {
            uf.union(a, b);
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    for y in 0..g.n_vertices {
        if keep_v[y] {
            let r = uf.find(y);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
    }
    roots
        .into_iter()
        .map(|r| {
            let kv: Vec<bool> = (0..g.n_vertices).map(|y| keep_v[y] && uf.find(y) == r).collect();
            let ke: Vec<bool> = (0..g.n_edges()).map(|e| keep_e[e] && kv[g.edges[e].0]).collect();
            let (graph, vmap, emap) = g.induced(&kv, &ke);
            Piece { graph, vmap, emap }
        })
        .collect()
}

impl Gos {
    /// Crushes the edge of dart `d` onto its tail: the vertex graph at the
    /// head is glued into the one at the tail through the edge graph.
    pub fn collapse(&self, d: Dart) -> Result<(Gos, Carry), GosError> {
        let e = edge_of(d);
        let v = self.head(d);
        let u = self.tail(d);
        if u == v {
            return Err(GosError::Precondition(format!("edge {e} is a loop")));
        }
        if !self.is_embedding(d) {
            return Err(GosError::Precondition(format!("map of edge {e} into vertex {v} is not an embedding")));
        }
        let m = self.dart_map(d);
        let mb = self.dart_map(d ^ 1);
        let vg = &self.vertex_graphs[v];
        let mut merged = self.vertex_graphs[u].clone();
        let mut pre_v = vec![None; vg.n_vertices];
        for (x, &y) in m.vmap.iter().enumerate() {
            pre_v[y] = Some(x);
        }
        let mut pre_e = vec![None; vg.n_edges()];
        for (g, &img) in m.emap.iter().enumerate() {
            pre_e[edge_of(img)] = Some((g, is_forward(img)));
        }
        let phi_v: Vec<usize> = (0..vg.n_vertices)
            .map(|y| match pre_v[y] {
                Some(x) => mb.vmap[x],
                None => merged.add_vertex(),
            })
            .collect();
        let phi_e: Vec<Dart> = (0..vg.n_edges())
            .map(|f| match pre_e[f] {
                Some((g, fwd)) => {
                    let img = mb.emap[g];
                    if fwd {
                        img
                    } else {
                        img ^ 1
                    }
                }
                None => {
                    let (a, b) = vg.edges[f];
                    2 * merged.add_edge(phi_v[a], phi_v[b])
                }
            })
            .collect();
        let phi = Morphism {
            vmap: phi_v.clone(),
            emap: phi_e,
        };
        let vre = |w: usize| if w == v { u - usize::from(u > v) } else { w - usize::from(w > v) };
        let label_d = self.dart_label(d);

        let mut out = Gos::default();
        out.underlying = Graph::new(self.n_vertices() - 1);
        for w in 0..self.n_vertices() {
            if w == v {
                continue;
            }
            out.vertex_graphs.push(if w == u { merged.clone() } else { self.vertex_graphs[w].clone() });
        }
        let mut labels = self.labels.as_ref().map(|_| Vec::new());
        for (f, &(a, b)) in self.underlying.edges.iter().enumerate() {
            if f == e {
                continue;
            }
            out.underlying.add_edge(vre(a), vre(b));
            out.edge_graphs.push(self.edge_graphs[f].clone());
            out.to_dst.push(if b == v { self.to_dst[f].compose(&phi) } else { self.to_dst[f].clone() });
            out.to_src.push(if a == v { self.to_src[f].compose(&phi) } else { self.to_src[f].clone() });
            if let (Some(ls), Some(ld)) = (labels.as_mut(), label_d.as_ref()) {
                let mut l = self.labels.as_ref().unwrap()[f].clone();
                if a == v {
                    l = concat_reduce(ld, &l);
                }
                if b == v {
                    l = concat_reduce(&l, &inverse(ld));
                }
                ls.push(l);
            }
        }
        out.labels = labels;
        let carry = Carry {
            points: self
                .vertex_graphs
                .iter()
                .enumerate()
                .map(|(w, g)| (0..g.n_vertices).map(|y| if w == v { (vre(u), phi_v[y]) } else { (vre(w), y) }).collect())
                .collect(),
            vertex: (0..self.n_vertices()).map(vre).collect(),
            twist: (0..self.n_vertices())
                .map(|w| match (&label_d, w == v) {
                    (Some(ld), true) => inverse(ld),
                    _ => Vec::new(),
                })
                .collect(),
        };
        Ok((out, carry))
    }

    /// Splits vertex `v` along the incident darts `j` (a proper nonempty
    /// subset of the darts with head `v`).
    pub fn fold(&self, v: usize, j: &[Dart]) -> Result<(Gos, Carry), GosError> {
        let inc = self.incident(v);
        if j.is_empty() || j.iter().any(|d| !inc.contains(d)) {
            return Err(GosError::Precondition("fold set must be a nonempty set of incident edges".into()));
        }
        let in_j = |d: Dart| j.contains(&d);
        if inc.iter().all(|&d| in_j(d)) {
            return Err(GosError::Precondition("fold set must be a proper subset".into()));
        }
        let vg = &self.vertex_graphs[v];
        let mask = |pred: &dyn Fn(Dart) -> bool| {
            let mut kv = vec![false; vg.n_vertices];
            let mut ke = vec![false; vg.n_edges()];
            for &d in &inc {
                if pred(d) {
                    let (a, b) = self.dart_map(d).image(vg);
                    for y in 0..a.len() {
                        kv[y] |= a[y];
                    }
                    for f in 0..b.len() {
                        ke[f] |= b[f];
                    }
                }
            }
            (kv, ke)
        };
        let (jv, je) = mask(&|d| in_j(d));
        let (kv, ke) = mask(&|d| !in_j(d));
        let pj = pieces(vg, &jv, &je);
        let pk = pieces(vg, &kv, &ke);
        let iv: Vec<bool> = (0..vg.n_vertices).map(|y| jv[y] && kv[y]).collect();
        let ie: Vec<bool> = (0..vg.n_edges()).map(|f| je[f] && ke[f]).collect();
        let pr = pieces(vg, &iv, &ie);

        let base = self.n_vertices() - 1;
        let vre = |w: usize| w - usize::from(w > v);
        let j_vertex = |p: usize| base + p;
        let k_vertex = |q: usize| base + pj.len() + q;
        let piece_of = |ps: &[Piece], y: usize| ps.iter().position(|p| p.contains_vertex(y)).unwrap();
        // new head vertex and piece for each incident dart
        let target = |d: Dart| -> (usize, &Piece) {
            let y0 = self.dart_map(d).vmap[0];
            if in_j(d) {
                let p = piece_of(&pj, y0);
                (j_vertex(p), &pj[p])
            } else {
                let q = piece_of(&pk, y0);
                (k_vertex(q), &pk[q])
            }
        };

        let mut out = Gos::default();
        out.underlying = Graph::new(base + pj.len() + pk.len());
        for w in 0..self.n_vertices() {
            if w != v {
                out.vertex_graphs.push(self.vertex_graphs[w].clone());
            }
        }
        for p in pj.iter().chain(pk.iter()) {
            out.vertex_graphs.push(p.graph.clone());
        }
        for (f, &(a, b)) in self.underlying.edges.iter().enumerate() {
            let (na, src) = if a == v {
                let (w, p) = target(2 * f + 1);
                (w, p.restrict(&self.to_src[f]))
            } else {
                (vre(a), self.to_src[f].clone())
            };
            let (nb, dst) = if b == v {
                let (w, p) = target(2 * f);
                (w, p.restrict(&self.to_dst[f]))
            } else {
                (vre(b), self.to_dst[f].clone())
            };
            out.underlying.add_edge(na, nb);
            out.edge_graphs.push(self.edge_graphs[f].clone());
            out.to_dst.push(dst);
            out.to_src.push(src);
        }
        let mut labels = self.labels.clone();
        for r in &pr {
            let incl = r.inclusion();
            let y0 = incl.vmap[0];
            let p = piece_of(&pj, y0);
            let q = piece_of(&pk, y0);
            out.underlying.add_edge(k_vertex(q), j_vertex(p));
            out.edge_graphs.push(r.graph.clone());
            out.to_dst.push(pj[p].restrict(&incl));
            out.to_src.push(pk[q].restrict(&incl));
            if let Some(ls) = labels.as_mut() {
                ls.push(Vec::new());
            }
        }
        out.labels = labels;
        let carry = Carry {
            points: self
                .vertex_graphs
                .iter()
                .enumerate()
                .map(|(w, g)| {
                    (0..g.n_vertices)
                        .map(|y| {
                            if w != v {
                                (vre(w), y)
                            } else if jv[y] {
                                let p = piece_of(&pj, y);
                                (j_vertex(p), pj[p].vmap[y].unwrap())
                            } else {
                                let q = piece_of(&pk, y);
                                (k_vertex(q), pk[q].vmap[y].unwrap())
                            }
                        })
                        .collect()
                })
                .collect(),
            vertex: (0..self.n_vertices())
                .map(|w| {
                    if w == v {
                        j_vertex(piece_of(&pj, self.dart_map(j[0]).vmap[0]))
                    } else {
                        vre(w)
                    }
                })
                .collect(),
            twist: vec![Vec::new(); self.n_vertices()],
        };
        Ok((out, carry))
    }

    /// Crushes every edge space in `edges` at once, loops included: each
    /// vertex graph of a contracted class is the quotient of the member
    /// vertex graphs by the two maps of each crushed edge graph. Labels are
    /// kept only when the crushed edges carry empty labels.
    pub fn collapse_all(&self, edges: &[usize]) -> Result<Gos, GosError> {
        let crushed = |e: usize| edges.contains(&e);
        let mut uv = UnionFind::new(self.n_vertices());
        for &e in edges {
            let (a, b) = self.underlying.edges[e];
            uv.union(a, b);
        }
        let (class, n_new) = uv.labels();
        let mut voff = vec![0];
        let mut eoff = vec![0];
        for g in &self.vertex_graphs {
            voff.push(voff.last().unwrap() + g.n_vertices);
            eoff.push(eoff.last().unwrap() + g.n_edges());
        }
        let mut up = UnionFind::new(*voff.last().unwrap());
        let mut ue = ParityFind::new(*eoff.last().unwrap());
        for &e in edges {
            let (a, b) = self.underlying.edges[e];
            let (s, t) = (&self.to_src[e], &self.to_dst[e]);
            for x in 0..self.edge_graphs[e].n_vertices {
                up.union(voff[a] + s.vmap[x], voff[b] + t.vmap[x]);
            }
            for g in 0..self.edge_graphs[e].n_edges() {
                let (ds, dt) = (s.emap[g], t.emap[g]);
                let flip = is_forward(ds) != is_forward(dt);
                if !ue.union(eoff[a] + edge_of(ds), eoff[b] + edge_of(dt), flip) {
                    return Err(GosError::Precondition(format!("crushing edge {e} identifies an edge with its reverse")));
                }
            }
        }
        // local ids in each new vertex graph, in order of first appearance
        let mut graphs = vec![Graph::new(0); n_new];
        let mut pid: HashMap<usize, usize> = HashMap::new();
        let mut eid: HashMap<usize, usize> = HashMap::new();
        for v in 0..self.n_vertices() {
            for y in 0..self.vertex_graphs[v].n_vertices {
                let r = up.find(voff[v] + y);
                if !pid.contains_key(&r) {
                    pid.insert(r, graphs[class[v]].add_vertex());
                }
            }
        }
        for v in 0..self.n_vertices() {
            for (f, &(a, b)) in self.vertex_graphs[v].edges.iter().enumerate() {
                let (r, p) = ue.find(eoff[v] + f);
                if !eid.contains_key(&r) {
                    let (a, b) = (pid[&up.find(voff[v] + a)], pid[&up.find(voff[v] + b)]);
                    let (a, b) = if p { (b, a) } else { (a, b) };
                    eid.insert(r, graphs[class[v]].add_edge(a, b));
                }
            }
        }
        let mut remap = |v: usize, m: &Morphism| Morphism {
            vmap: m.vmap.iter().map(|&y| pid[&up.find(voff[v] + y)]).collect(),
            emap: m
                .emap
                .iter()
                .map(|&d| {
                    let (r, p) = ue.find(eoff[v] + edge_of(d));
                    2 * eid[&r] + usize::from(is_forward(d) == p)
                })
                .collect(),
        };
        let mut out = Gos {
            underlying: Graph::new(n_new),
            vertex_graphs: Vec::new(),
            ..Gos::default()
        };
        let drop_labels = self.labels.as_ref().map_or(true, |ls| edges.iter().any(|&e| !ls[e].is_empty()));
        let mut labels = Vec::new();
        for (e, &(a, b)) in self.underlying.edges.iter().enumerate() {
            if crushed(e) {
                continue;
            }
            out.underlying.add_edge(class[a], class[b]);
            out.edge_graphs.push(self.edge_graphs[e].clone());
            out.to_src.push(remap(a, &self.to_src[e]));
            out.to_dst.push(remap(b, &self.to_dst[e]));
            if let Some(ls) = &self.labels {
                labels.push(ls[e].clone());
            }
        }
        out.vertex_graphs = graphs;
        out.labels = (!drop_labels).then_some(labels);
        Ok(out)
    }

    /// A dart whose collapse removes a reducible valence-two vertex. Both
    /// incident maps must be isomorphisms and the two darts must belong to
    /// different edges.
    pub fn collapsible_reducible(&self, v: usize) -> Option<Dart> {
        let inc = self.incident(v);
        (inc.len() == 2 && edge_of(inc[0]) != edge_of(inc[1]) && self.is_iso(inc[0]) && self.is_iso(inc[1])).then_some(inc[0])
    }

    /// The incident dart of a weight-zero valence-one vertex.
    pub fn trimmable(&self, v: usize) -> Option<Dart> {
        let inc = self.incident(v);
        (inc.len() == 1 && self.weight(v) == 0).then_some(inc[0])
    }

    pub fn is_reduced(&self) -> bool {
        (0..self.n_vertices()).all(|v| self.collapsible_reducible(v).is_none() && self.trimmable(v).is_none())
    }

    /// Collapses reducible vertices and trims weight-zero leaves until none
    /// remain; returns the number of collapses.
    pub fn reduce(&self) -> (Gos, Carry, usize) {
        let mut x = self.clone();
        let mut carry = Carry::identity(self);
        let mut count = 0;
        loop {
            let d = (0..x.n_vertices()).find_map(|v| x.collapsible_reducible(v).or_else(|| x.trimmable(v)));
            let Some(d) = d else { break };
            let (y, c) = x.collapse(d).expect("reducing collapse is legal");
            carry = carry.then(&c);
            x = y;
            count += 1;
        }
        (x, carry, count)
    }

    /// Rewrites the labels of an outside edge attached through a carry.
    pub fn twist_label(carry: &Carry, l: &[Letter], from: Option<usize>, to: Option<usize>) -> Vec<Letter> {
        let mut out = l.to_vec();
        if let Some(v) = from {
            out = concat_reduce(&inverse(&carry.twist[v]), &out);
        }
        if let Some(v) = to {
            out = concat_reduce(&out, &carry.twist[v]);
        }
        reduce(&out)
    }
}

/// Union-find tracking whether each element is reversed relative to its root.
struct ParityFind {
    parent: Vec<usize>,
    flip: Vec<bool>,
}

impl ParityFind {
    fn new(n: usize) -> ParityFind {
        ParityFind {
            parent: (0..n).collect(),
            flip: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let (r, p) = self.find(self.parent[x]);
        self.parent[x] = r;
        self.flip[x] ^= p;
        (r, self.flip[x])
    }

    /// Records `a = b` up to `flip`; false on a contradiction.
    fn union(&mut self, a: usize, b: usize, flip: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == flip;
        }
        self.parent[ra] = rb;
        self.flip[ra] = pa ^ pb ^ flip;
        true
    }
}
