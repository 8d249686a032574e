//! 2-covered graphs of graphs.
//!
//! The underlying graph has one vertex graph per vertex and one edge graph
//! per edge. Edge `e` carries two immersions of its edge graph: `to_dst`
//! into the vertex graph at `to(e)` and `to_src` into the one at `from(e)`.
//! The oriented edges arriving at `v` are the darts with head `v`; the map
//! attached to dart `d` is `to_dst` for a forward dart and `to_src` for a
//! backward one.

mod moves;
mod parts;
mod simplify;

pub use moves::Carry;
pub use parts::Component;
pub use simplify::{Complexity, MinimizeResult, Separability, TraceStep, VertexClass, VertexSeparability};

use std::collections::HashMap;

/// Connected components of a subgraph given by masks, with old-to-new
/// index maps, ordered by smallest vertex.
pub fn subgraph_components(g: &Graph, keep_v: &[bool], keep_e: &[bool]) -> Vec<(Graph, Vec<Option<usize>>, Vec<Option<usize>>)> {
    moves::pieces(g, keep_v, keep_e).into_iter().map(|p| (p.graph, p.vmap, p.emap)).collect()
}
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::canon::{certificate, ColoredGraph};
use crate::graph::{bar, edge_of, is_forward, Dart, Graph, GraphError, Morphism};
use crate::words::{format_letters, inverse, Letter, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GosError {
    #[error("graph error in {0}: {1}")]
    Graph(String, GraphError),
    #[error("{0} graph {1} is empty or disconnected")]
    Disconnected(&'static str, usize),
    #[error("map of edge {edge} into {side} vertex is not an immersion")]
    NotImmersion { edge: usize, side: &'static str },
    #[error("edge {edge} of vertex graph {vertex} is covered {count} times")]
    Cover { vertex: usize, edge: usize, count: usize },
    #[error("size mismatch: {0}")]
    Size(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("bad word: {0}")]
    Word(#[from] WordError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gos {
    pub underlying: Graph,
    pub vertex_graphs: Vec<Graph>,
    pub edge_graphs: Vec<Graph>,
    pub to_dst: Vec<Morphism>,
    pub to_src: Vec<Morphism>,
    /// Optional map to the rose: a reduced word per underlying edge.
    pub labels: Option<Vec<Vec<Letter>>>,
}

/// The horizontal graph: one vertex per vertex-graph vertex and one edge per
/// edge-graph vertex.
#[derive(Clone, Debug)]
pub struct Horizontal {
    pub graph: Graph,
    pub vertex_offset: Vec<usize>,
    /// Horizontal edge of each (underlying edge, edge-graph vertex).
    pub edge_index: Vec<Vec<usize>>,
    pub origin: Vec<(usize, usize)>,
    pub component: Vec<usize>,
    /// Per component: true when it is a circle.
    pub is_circle: Vec<bool>,
}

impl Horizontal {
    pub fn vertex(&self, v: usize, y: usize) -> usize {
        self.vertex_offset[v] + y
    }

    /// Underlying vertex and local index of a horizontal vertex.
    pub fn locate(&self, x: usize) -> (usize, usize) {
        let v = match self.vertex_offset.binary_search(&x) {
            Ok(mut i) => {
                while i + 1 < self.vertex_offset.len() && self.vertex_offset[i + 1] == x {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        (v, x - self.vertex_offset[v])
    }

    pub fn in_infinite_part(&self, x: usize) -> bool {
        !self.is_circle[self.component[x]]
    }
}

impl Gos {
    pub fn n_vertices(&self) -> usize {
        self.underlying.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.underlying.n_edges()
    }

    pub fn head(&self, d: Dart) -> usize {
        self.underlying.head(d)
    }

    pub fn tail(&self, d: Dart) -> usize {
        self.underlying.tail(d)
    }

    /// The immersion attached to a dart, into the vertex graph at its head.
    pub fn dart_map(&self, d: Dart) -> &Morphism {
        if is_forward(d) {
            &self.to_dst[edge_of(d)]
        } else {
            &self.to_src[edge_of(d)]
        }
    }

    pub fn dart_map_mut(&mut self, d: Dart) -> &mut Morphism {
        if is_forward(d) {
            &mut self.to_dst[edge_of(d)]
        } else {
            &mut self.to_src[edge_of(d)]
        }
    }

    pub fn dart_graph(&self, d: Dart) -> &Graph {
        &self.edge_graphs[edge_of(d)]
    }

    /// Darts with head `v`, increasing. A loop contributes both darts.
    pub fn incident(&self, v: usize) -> Vec<Dart> {
        (0..self.underlying.n_darts()).filter(|&d| self.head(d) == v).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.underlying.degree(v)
    }

    pub fn weight(&self, v: usize) -> usize {
        self.vertex_graphs[v].n_edges()
    }

    pub fn edge_weight(&self, e: usize) -> usize {
        self.edge_graphs[e].n_edges()
    }

    pub fn total_edges(&self) -> usize {
        self.n_edges() + self.vertex_graphs.iter().map(Graph::n_edges).sum::<usize>() + self.edge_graphs.iter().map(Graph::n_edges).sum::<usize>()
    }

    pub fn dart_label(&self, d: Dart) -> Option<Vec<Letter>> {
        let l = &self.labels.as_ref()?[edge_of(d)];
        Some(if is_forward(d) { l.clone() } else { inverse(l) })
    }

    pub fn is_iso(&self, d: Dart) -> bool {
        self.dart_map(d).is_isomorphism(self.dart_graph(d), &self.vertex_graphs[self.head(d)])
    }

    pub fn is_embedding(&self, d: Dart) -> bool {
        self.dart_map(d).is_embedding(self.dart_graph(d))
    }

    pub fn validate(&self) -> Result<(), GosError> {
        let g = &self.underlying;
        g.check().map_err(|e| GosError::Graph("underlying".into(), e))?;
        if self.vertex_graphs.len() != g.n_vertices {
            return Err(GosError::Size("vertex graphs"));
        }
        let ne = g.n_edges();
        if self.edge_graphs.len() != ne || self.to_dst.len() != ne || self.to_src.len() != ne {
            return Err(GosError::Size("edge graphs or maps"));
        }
        if let Some(l) = &self.labels {
            if l.len() != ne {
                return Err(GosError::Size("labels"));
            }
        }
        for (v, vg) in self.vertex_graphs.iter().enumerate() {
            vg.check().map_err(|e| GosError::Graph(format!("vertex graph {v}"), e))?;
            if !vg.is_connected() {
                return Err(GosError::Disconnected("vertex", v));
            }
        }
        for (e, eg) in self.edge_graphs.iter().enumerate() {
            eg.check().map_err(|err| GosError::Graph(format!("edge graph {e}"), err))?;
            if !eg.is_connected() {
                return Err(GosError::Disconnected("edge", e));
            }
        }
        let mut cover: Vec<Vec<usize>> = self.vertex_graphs.iter().map(|vg| vec![0; vg.n_edges()]).collect();
        for d in 0..g.n_darts() {
            let e = edge_of(d);
            let v = self.head(d);
            let side = if is_forward(d) { "destination" } else { "source" };
            let m = self.dart_map(d);
            m.check(&self.edge_graphs[e], &self.vertex_graphs[v])
                .map_err(|err| GosError::Graph(format!("{side} map of edge {e}"), err))?;
            if !m.is_immersion(&self.edge_graphs[e]) {
                return Err(GosError::NotImmersion { edge: e, side });
            }
            for &img in &m.emap {
                cover[v][edge_of(img)] += 1;
            }
        }
        for (v, c) in cover.iter().enumerate() {
            if let Some((f, &k)) = c.iter().enumerate().find(|(_, &k)| k != 2) {
                return Err(GosError::Cover { vertex: v, edge: f, count: k });
            }
        }
        Ok(())
    }

    pub fn horizontal(&self) -> Horizontal {
        let mut vertex_offset = Vec::with_capacity(self.n_vertices());
        let mut n = 0;
        for vg in &self.vertex_graphs {
            vertex_offset.push(n);
            n += vg.n_vertices;
        }
        let mut graph = Graph::new(n);
        let mut edge_index = Vec::new();
        let mut origin = Vec::new();
        for (e, &(a, b)) in self.underlying.edges.iter().enumerate() {
            let mut idx = Vec::new();
            for x in 0..self.edge_graphs[e].n_vertices {
                let from = vertex_offset[a] + self.to_src[e].vmap[x];
                let to = vertex_offset[b] + self.to_dst[e].vmap[x];
                idx.push(graph.add_edge(from, to));
                origin.push((e, x));
            }
            edge_index.push(idx);
        }
        let (component, k) = graph.components();
        let mut nv = vec![0usize; k];
        let mut ne = vec![0usize; k];
        let mut all_deg2 = vec![true; k];
        for x in 0..n {
            nv[component[x]] += 1;
        }
        let mut deg = vec![0usize; n];
        for &(a, b) in &graph.edges {
            ne[component[a]] += 1;
            deg[a] += 1;
            deg[b] += 1;
        }
        for x in 0..n {
            if deg[x] != 2 {
                all_deg2[component[x]] = false;
            }
        }
        let is_circle = (0..k).map(|c| all_deg2[c] && nv[c] == ne[c]).collect();
        Horizontal {
            graph,
            vertex_offset,
            edge_index,
            origin,
            component,
            is_circle,
        }
    }

    pub fn chi_horizontal(&self) -> i64 {
        let v: usize = self.vertex_graphs.iter().map(|g| g.n_vertices).sum();
        let e: usize = self.edge_graphs.iter().map(|g| g.n_vertices).sum();
        v as i64 - e as i64
    }

    pub fn chi_underlying(&self) -> i64 {
        self.underlying.euler_characteristic()
    }

    /// Labels of the horizontal edges, when the space maps to the rose.
    pub fn horizontal_labels(&self, h: &Horizontal) -> Option<Vec<Vec<Letter>>> {
        let l = self.labels.as_ref()?;
        Some(h.origin.iter().map(|&(e, _)| l[e].clone()).collect())
    }

    pub fn colored(&self) -> ColoredGraph {
        // node kinds; labels are folded into the edge-node colour
        const UV: u32 = 0;
        const UE: u32 = 1;
        const UH: u32 = 2;
        const VV: u32 = 3;
        const VE: u32 = 4;
        const VH: u32 = 5;
        const EV: u32 = 6;
        const EE: u32 = 7;
        const EH: u32 = 8;
        const MV: u32 = 9;
        const MH: u32 = 10;
        const LABEL_BASE: u32 = 16;
        let mut cg = ColoredGraph::default();
        let label_color: HashMap<Vec<Letter>, u32> = match &self.labels {
            Some(ls) => {
                let mut keys: Vec<Vec<Letter>> = Vec::new();
                for l in ls {
                    let a = l.clone();
                    let b = inverse(l);
                    keys.push(if a <= b { a } else { b });
                }
                keys.sort();
                keys.dedup();
                keys.into_iter().enumerate().map(|(i, k)| (k, LABEL_BASE + 2 * i as u32)).collect()
            }
            None => HashMap::new(),
        };
        let uv: Vec<usize> = (0..self.n_vertices()).map(|_| cg.add_node(UV)).collect();
        let mut uh = Vec::new();
        let mut ue_nodes = Vec::new();
        for (e, &(a, b)) in self.underlying.edges.iter().enumerate() {
            let ue = cg.add_node(UE);
            ue_nodes.push(ue);
            // a half-edge sits at the head of its dart; labels orient the halves
            let (hc_f, hc_b) = match &self.labels {
                Some(ls) => {
                    let l = &ls[e];
                    let il = inverse(l);
                    if *l == il {
                        (UH, UH)
                    } else if *l < il {
                        (label_color[l], label_color[l] + 1)
                    } else {
                        (label_color[&il] + 1, label_color[&il])
                    }
                }
                None => (UH, UH),
            };
            let hf = cg.add_node(hc_f);
            let hb = cg.add_node(hc_b);
            cg.link(ue, hf);
            cg.link(ue, hb);
            cg.link(hf, uv[b]);
            cg.link(hb, uv[a]);
            uh.push([hf, hb]);
        }
        let mut vv = Vec::new();
        let mut vh = Vec::new();
        for (v, vg) in self.vertex_graphs.iter().enumerate() {
            let ids: Vec<usize> = (0..vg.n_vertices).map(|_| cg.add_node(VV)).collect();
            for &x in &ids {
                cg.link(x, uv[v]);
            }
            let mut halves = Vec::new();
            for &(a, b) in &vg.edges {
                let f = cg.add_node(VE);
                let h0 = cg.add_node(VH);
                let h1 = cg.add_node(VH);
                cg.link(f, h0);
                cg.link(f, h1);
                cg.link(h0, ids[a]);
                cg.link(h1, ids[b]);
                halves.push([h0, h1]);
            }
            vv.push(ids);
            vh.push(halves);
        }
        for (e, eg) in self.edge_graphs.iter().enumerate() {
            let ids: Vec<usize> = (0..eg.n_vertices).map(|_| cg.add_node(EV)).collect();
            for &x in &ids {
                cg.link(x, ue_nodes[e]);
            }
            let mut halves = Vec::new();
            for &(a, b) in &eg.edges {
                let g = cg.add_node(EE);
                let h0 = cg.add_node(EH);
                let h1 = cg.add_node(EH);
                cg.link(g, h0);
                cg.link(g, h1);
                cg.link(h0, ids[a]);
                cg.link(h1, ids[b]);
                halves.push([h0, h1]);
            }
            for side in 0..2 {
                let d = 2 * e + side;
                let v = self.head(d);
                let m = self.dart_map(d);
                let h = uh[e][side];
                for (x, &y) in m.vmap.iter().enumerate() {
                    let node = cg.add_node(MV);
                    cg.link(node, ids[x]);
                    cg.link(node, h);
                    cg.link(node, vv[v][y]);
                }
                for (gi, &img) in m.emap.iter().enumerate() {
                    for end in 0..2 {
                        // the half of g at end `end` goes to the half of the image edge at the image vertex
                        let target_end = if is_forward(img) { end } else { 1 - end };
                        let node = cg.add_node(MH);
                        cg.link(node, halves[gi][end]);
                        cg.link(node, h);
                        cg.link(node, vh[v][edge_of(img)][target_end]);
                    }
                }
            }
        }
        cg
    }

    /// Isomorphism invariant; equal certificates mean isomorphic spaces
    /// (edge orientations are not part of the structure).
    pub fn canonical_form(&self) -> Vec<u64> {
        certificate(&self.colored())
    }

    pub fn is_isomorphic(&self, other: &Gos) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph gos {\n  compound=true;\n");
        for (v, vg) in self.vertex_graphs.iter().enumerate() {
            let _ = writeln!(s, "  subgraph cluster_v{v} {{\n    label=\"V{v}\";");
            for y in 0..vg.n_vertices {
                let _ = writeln!(s, "    v{v}_{y} [label=\"{y}\"];");
            }
            for (f, &(a, b)) in vg.edges.iter().enumerate() {
                let _ = writeln!(s, "    v{v}_{a} -> v{v}_{b} [label=\"f{f}\"];");
            }
            s.push_str("  }\n");
        }
        for (e, &(a, b)) in self.underlying.edges.iter().enumerate() {
            let label = match &self.labels {
                Some(l) => format_letters(&l[e]),
                None => format!("e{e}"),
            };
            for x in 0..self.edge_graphs[e].n_vertices {
                let ya = self.to_src[e].vmap[x];
                let yb = self.to_dst[e].vmap[x];
                let _ = writeln!(s, "  v{a}_{ya} -> v{b}_{yb} [style=dashed, label=\"{label}:{x}\"];");
            }
        }
        s.push_str("}\n");
        s
    }
}

/// JSON form: graphs as `{vertices, edges}` with dense ids.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GosJson {
    pub underlying: crate::graph::GraphJson,
    #[serde(rename = "vertexGraphs")]
    pub vertex_graphs: Vec<crate::graph::GraphJson>,
    #[serde(rename = "edgeGraphs")]
    pub edge_graphs: Vec<crate::graph::GraphJson>,
    #[serde(rename = "toDst")]
    pub to_dst: Vec<MapJson>,
    #[serde(rename = "toSrc")]
    pub to_src: Vec<MapJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

/// Vertex images, and edge images as signed 1-based edge ids (negative for
/// a reversed edge).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub vertices: Vec<usize>,
    pub edges: Vec<i64>,
}

impl MapJson {
    fn from_morphism(m: &Morphism) -> MapJson {
        MapJson {
            vertices: m.vmap.clone(),
            edges: m
                .emap
                .iter()
                .map(|&d| {
                    let e = edge_of(d) as i64 + 1;
                    if is_forward(d) {
                        e
                    } else {
                        -e
                    }
                })
                .collect(),
        }
    }

    fn to_morphism(&self) -> Result<Morphism, GosError> {
        let mut emap = Vec::new();
        for &x in &self.edges {
            if x == 0 {
                return Err(GosError::Size("edge image 0"));
            }
            let e = (x.unsigned_abs() - 1) as usize;
            emap.push(if x > 0 { 2 * e } else { bar(2 * e) });
        }
        Ok(Morphism {
            vmap: self.vertices.clone(),
            emap,
        })
    }
}

impl GosJson {
    pub fn from_gos(x: &Gos, rank: Option<usize>) -> GosJson {
        use crate::graph::GraphJson;
        GosJson {
            underlying: GraphJson::from_graph(&x.underlying, None),
            vertex_graphs: x.vertex_graphs.iter().map(|g| GraphJson::from_graph(g, None)).collect(),
            edge_graphs: x.edge_graphs.iter().map(|g| GraphJson::from_graph(g, None)).collect(),
            to_dst: x.to_dst.iter().map(MapJson::from_morphism).collect(),
            to_src: x.to_src.iter().map(MapJson::from_morphism).collect(),
            labels: x.labels.as_ref().map(|ls| ls.iter().map(|l| format_letters(l)).collect()),
            rank,
        }
    }

    /// Builds and validates the space.
    pub fn to_gos(&self) -> Result<Gos, GosError> {
        let x = self.to_gos_unchecked()?;
        x.validate()?;
        Ok(x)
    }

    /// Builds the space, checking only that ids and words parse.
    pub fn to_gos_unchecked(&self) -> Result<Gos, GosError> {
        let conv = |what: &str, g: &crate::graph::GraphJson| g.to_graph().map_err(|e| GosError::Graph(what.to_string(), e));
        let underlying = conv("underlying", &self.underlying)?;
        let vertex_graphs = self.vertex_graphs.iter().map(|g| conv("vertex graph", g)).collect::<Result<_, _>>()?;
        let edge_graphs = self.edge_graphs.iter().map(|g| conv("edge graph", g)).collect::<Result<_, _>>()?;
        let to_dst = self.to_dst.iter().map(MapJson::to_morphism).collect::<Result<_, _>>()?;
        let to_src = self.to_src.iter().map(MapJson::to_morphism).collect::<Result<_, _>>()?;
        let labels = match &self.labels {
            Some(ls) => {
                let rank = self.rank.unwrap_or(26);
                Some(ls.iter().map(|s| Word::parse(s, rank).map(|w| w.0)).collect::<Result<Vec<_>, _>>()?)
            }
            None => None,
        };
        Ok(Gos {
            underlying,
            vertex_graphs,
            edge_graphs,
            to_dst,
            to_src,
            labels,
        })
    }
}

#[cfg(test)]
pub(crate) mod tests;
