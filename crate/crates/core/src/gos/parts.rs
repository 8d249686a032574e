use super::{Carry, Gos};
use crate::graph::{Graph, UnionFind};

/// A sub-space spanned by some underlying vertices and edges.
#[derive(Clone, Debug)]
pub struct Component {
    pub gos: Gos,
    /// Old id of each vertex of `gos`.
    pub vertices: Vec<usize>,
    /// Old id of each edge of `gos`.
    pub edges: Vec<usize>,
}

impl Gos {
    /// The sub-space on the given vertices and edges; every edge must join
    /// two of the vertices.
    pub fn restrict(&self, vertices: &[usize], edges: &[usize]) -> Component {
        let mut new_id = vec![usize::MAX; self.n_vertices()];
        for (i, &v) in vertices.iter().enumerate() {
            new_id[v] = i;
        }
        let mut g = Gos::default();
        g.underlying = Graph::new(vertices.len());
        g.vertex_graphs = vertices.iter().map(|&v| self.vertex_graphs[v].clone()).collect();
        for &e in edges {
            let (a, b) = self.underlying.edges[e];
            g.underlying.add_edge(new_id[a], new_id[b]);
            g.edge_graphs.push(self.edge_graphs[e].clone());
            g.to_dst.push(self.to_dst[e].clone());
            g.to_src.push(self.to_src[e].clone());
        }
        g.labels = self.labels.as_ref().map(|l| edges.iter().map(|&e| l[e].clone()).collect());
        Component {
            gos: g,
            vertices: vertices.to_vec(),
            edges: edges.to_vec(),
        }
    }

    /// Components left after deleting the weight-zero edges, ignoring
    /// vertices left without edges.
    pub fn irreducible_components(&self) -> Vec<Component> {
        let mut uf = UnionFind::new(self.n_vertices());
        let heavy: Vec<usize> = (0..self.n_edges()).filter(|&e| self.edge_weight(e) > 0).collect();
        for &e in &heavy {
            let (a, b) = self.underlying.edges[e];
            uf.union(a, b);
        }
        let mut out = Vec::new();
        let mut seen = vec![false; self.n_vertices()];
        for v in 0..self.n_vertices() {
            let r = uf.find(v);
            if seen[r] {
                continue;
            }
            seen[r] = true;
            let vs: Vec<usize> = (0..self.n_vertices()).filter(|&u| uf.find(u) == r).collect();
            let es: Vec<usize> = heavy.iter().copied().filter(|&e| uf.find(self.underlying.edges[e].0) == r).collect();
            if es.is_empty() && self.weight(v) == 0 && vs.len() == 1 {
                continue;
            }
            out.push(self.restrict(&vs, &es));
        }
        out
    }

    pub fn is_irreducible(&self) -> bool {
        (0..self.n_edges()).all(|e| self.edge_weight(e) > 0)
    }

    /// Replaces a component by `new`, which `carry` relates to
    /// `comp.gos`. Edges outside the component are re-attached through the
    /// carry. The vertices outside come first, then those of `new`.
    pub fn replace_component(&self, comp: &Component, new: &Gos, carry: &Carry) -> (Gos, Carry) {
        let mut in_comp = vec![None; self.n_vertices()];
        for (i, &v) in comp.vertices.iter().enumerate() {
            in_comp[v] = Some(i);
        }
        let mut comp_edge = vec![false; self.n_edges()];
        for &e in &comp.edges {
            comp_edge[e] = true;
        }
        let outside: Vec<usize> = (0..self.n_vertices()).filter(|&v| in_comp[v].is_none()).collect();
        let base = outside.len();
        let mut vid = vec![0usize; self.n_vertices()];
        for (i, &v) in outside.iter().enumerate() {
            vid[v] = i;
        }
        for (i, &v) in comp.vertices.iter().enumerate() {
            vid[v] = base + carry.vertex[i];
        }
        let point = |v: usize, y: usize| match in_comp[v] {
            Some(i) => {
                let (nv, ny) = carry.points[i][y];
                (base + nv, ny)
            }
            None => (vid[v], y),
        };

        let mut out = Gos::default();
        out.underlying = Graph::new(base + new.n_vertices());
        out.vertex_graphs = outside.iter().map(|&v| self.vertex_graphs[v].clone()).collect();
        out.vertex_graphs.extend(new.vertex_graphs.iter().cloned());
        let mut labels = self.labels.as_ref().map(|_| Vec::new());
        for e in 0..self.n_edges() {
            if comp_edge[e] {
                continue;
            }
            let (a, b) = self.underlying.edges[e];
            let mut dst = self.to_dst[e].clone();
            let mut src = self.to_src[e].clone();
            let mut na = vid[a];
            let mut nb = vid[b];
            if in_comp[b].is_some() {
                for y in dst.vmap.iter_mut() {
                    let p = point(b, *y);
                    nb = p.0;
                    *y = p.1;
                }
                assert!(dst.emap.is_empty(), "edges leaving a component have weight zero");
            }
            if in_comp[a].is_some() {
                for y in src.vmap.iter_mut() {
                    let p = point(a, *y);
                    na = p.0;
                    *y = p.1;
                }
                assert!(src.emap.is_empty(), "edges leaving a component have weight zero");
            }
            out.underlying.add_edge(na, nb);
            out.edge_graphs.push(self.edge_graphs[e].clone());
            out.to_dst.push(dst);
            out.to_src.push(src);
            if let Some(ls) = labels.as_mut() {
                let from = in_comp[a];
                let to = in_comp[b];
                ls.push(Gos::twist_label(carry, &self.labels.as_ref().unwrap()[e], from, to));
            }
        }
        for e in 0..new.n_edges() {
            let (a, b) = new.underlying.edges[e];
            out.underlying.add_edge(base + a, base + b);
            out.edge_graphs.push(new.edge_graphs[e].clone());
            out.to_dst.push(new.to_dst[e].clone());
            out.to_src.push(new.to_src[e].clone());
            if let (Some(ls), Some(nl)) = (labels.as_mut(), new.labels.as_ref()) {
                ls.push(nl[e].clone());
            }
        }
        out.labels = labels;
        let global = Carry {
            points: self
                .vertex_graphs
                .iter()
                .enumerate()
                .map(|(v, g)| (0..g.n_vertices).map(|y| point(v, y)).collect())
                .collect(),
            vertex: vid,
            twist: (0..self.n_vertices())
                .map(|v| match in_comp[v] {
                    Some(i) => carry.twist[i].clone(),
                    None => Vec::new(),
                })
                .collect(),
        };
        (out, global)
    }
}
