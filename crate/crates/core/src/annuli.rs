//! Graphs of spaces from labelled graphs and annuli.
//!
//! Each annulus carries a cyclically reduced word and two closed lifts of it
//! (dart paths spelling the word) into the given graphs. The vertical edges
//! of the annuli, grouped into connected components, give the vertex graphs;
//! the squares sitting over each letter give the edge graphs.

use serde::{Deserialize, Serialize};

use crate::gos::Gos;
use crate::graph::{edge_of, is_forward, Dart, Graph, LabeledGraph, Morphism};
use crate::words::{cyclic_reduce, format_letters, Letter};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lift {
    pub graph: usize,
    pub darts: Vec<Dart>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Band {
    pub word: Vec<Letter>,
    pub minus: Lift,
    pub plus: Lift,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusComplex {
    pub rank: usize,
    pub graphs: Vec<LabeledGraph>,
    pub bands: Vec<Band>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("annulus {0}: word {1} is trivial or not cyclically reduced")]
    NotCyclicallyReduced(usize, String),
    #[error("annulus {0}: lift does not spell its word as a closed path")]
    BadLift(usize),
    #[error("graph {0} is not labelled by the alphabet")]
    BadLabel(usize),
}

#[derive(Clone, Debug)]
pub struct Built {
    pub gos: Gos,
    /// `(underlying vertex, local vertex)` of every vertex of every graph.
    pub point: Vec<Vec<(usize, usize)>>,
    /// `(underlying edge, edge-graph vertex, same orientation)` of every
    /// edge of every graph.
    pub segment: Vec<Vec<(usize, usize, bool)>>,
}

impl Built {
    /// Horizontal dart corresponding to a dart of input graph `i`.
    pub fn horizontal_dart(&self, h: &crate::gos::Horizontal, i: usize, d: Dart) -> Dart {
        let (e, x, same) = self.segment[i][edge_of(d)];
        let he = h.edge_index[e][x];
        let fwd = is_forward(d) == same;
        if fwd {
            2 * he
        } else {
            2 * he + 1
        }
    }
}

pub fn build(c: &AnnulusComplex) -> Result<Built, BuildError> {
    // positive labels only; flipped edges swap dart parity
    let mut graphs = c.graphs.clone();
    let mut flipped: Vec<Vec<bool>> = Vec::new();
    for (i, g) in graphs.iter_mut().enumerate() {
        let mut fl = vec![false; g.labels.len()];
        for e in 0..g.labels.len() {
            let l = g.labels[e];
            if l == 0 || l.unsigned_abs() as usize > c.rank {
                return Err(BuildError::BadLabel(i));
            }
            if l < 0 {
                g.labels[e] = -l;
                let (a, b) = g.graph.edges[e];
                g.graph.edges[e] = (b, a);
                fl[e] = true;
            }
        }
        flipped.push(fl);
    }
    let fix = |i: usize, d: Dart| if flipped[i][edge_of(d)] { d ^ 1 } else { d };
    let bands: Vec<(Vec<Letter>, usize, Vec<Dart>, usize, Vec<Dart>)> = c
        .bands
        .iter()
        .map(|b| {
            (
                b.word.clone(),
                b.minus.graph,
                b.minus.darts.iter().map(|&d| fix(b.minus.graph, d)).collect(),
                b.plus.graph,
                b.plus.darts.iter().map(|&d| fix(b.plus.graph, d)).collect(),
            )
        })
        .collect();
    for (j, (w, gm, dm, gp, dp)) in bands.iter().enumerate() {
        if w.is_empty() || cyclic_reduce(w).len() != w.len() {
            return Err(BuildError::NotCyclicallyReduced(j, format_letters(w)));
        }
        for (gi, ds) in [(*gm, dm), (*gp, dp)] {
            let g = graphs.get(gi).ok_or(BuildError::BadLift(j))?;
            if ds.len() != w.len() || ds.iter().any(|&d| edge_of(d) >= g.graph.n_edges()) {
                return Err(BuildError::BadLift(j));
            }
            for s in 0..w.len() {
                let next = ds[(s + 1) % w.len()];
                if g.label(ds[s]) != w[s] || g.graph.head(ds[s]) != g.graph.tail(next) {
                    return Err(BuildError::BadLift(j));
                }
            }
        }
    }

    let mut voff = Vec::new();
    let mut eoff = Vec::new();
    let (mut nv, mut ne) = (0, 0);
    for g in &graphs {
        voff.push(nv);
        eoff.push(ne);
        nv += g.graph.n_vertices;
        ne += g.graph.n_edges();
    }
    let gv = |i: usize, x: usize| voff[i] + x;
    let ge = |i: usize, e: usize| eoff[i] + e;
    // global horizontal structure
    let mut hg_edges = Vec::with_capacity(ne);
    let mut hg_label = Vec::with_capacity(ne);
    for (i, g) in graphs.iter().enumerate() {
        for (e, &(a, b)) in g.graph.edges.iter().enumerate() {
            hg_edges.push((gv(i, a), gv(i, b)));
            hg_label.push(g.labels[e]);
        }
    }

    let mut vgraph = Graph::new(nv);
    let mut vedge: Vec<Vec<usize>> = Vec::new();
    for (w, gm, dm, gp, dp) in &bands {
        let tm = &graphs[*gm].graph;
        let tp = &graphs[*gp].graph;
        let ids = (0..w.len())
            .map(|s| vgraph.add_edge(gv(*gm, tm.tail(dm[s])), gv(*gp, tp.tail(dp[s]))))
            .collect();
        vedge.push(ids);
    }
    let all_v = vec![true; nv];
    let all_e = vec![true; vgraph.n_edges()];
    let vpieces = crate::gos::subgraph_components(&vgraph, &all_v, &all_e);
    let vpiece_of: Vec<usize> = (0..nv).map(|x| vpieces.iter().position(|p| p.1[x].is_some()).unwrap()).collect();

    // squares over each letter
    let mut egraph = Graph::new(ne);
    let mut square: Vec<(usize, usize)> = Vec::new();
    for (j, (w, gm, dm, gp, dp)) in bands.iter().enumerate() {
        for s in 0..w.len() {
            egraph.add_edge(ge(*gm, edge_of(dm[s])), ge(*gp, edge_of(dp[s])));
            square.push((j, s));
        }
    }
    let all_ev = vec![true; ne];
    let all_ee = vec![true; egraph.n_edges()];
    let epieces = crate::gos::subgraph_components(&egraph, &all_ev, &all_ee);

    let mut gos = Gos::default();
    gos.underlying = Graph::new(vpieces.len());
    gos.vertex_graphs = vpieces.iter().map(|p| p.0.clone()).collect();
    let mut labels = Vec::new();
    let mut seg_of = vec![(0usize, 0usize); ne];
    for (pi, (eg, evmap, eemap)) in epieces.iter().enumerate() {
        let members: Vec<usize> = (0..ne).filter(|&g| evmap[g].is_some()).collect();
        let g0 = members[0];
        let from = vpiece_of[hg_edges[g0].0];
        let to = vpiece_of[hg_edges[g0].1];
        let mut dst = Morphism {
            vmap: vec![0; eg.n_vertices],
            emap: vec![0; eg.n_edges()],
        };
        let mut src = Morphism {
            vmap: vec![0; eg.n_vertices],
            emap: vec![0; eg.n_edges()],
        };
        for &g in &members {
            let x = evmap[g].unwrap();
            seg_of[g] = (pi, x);
            let (a, b) = hg_edges[g];
            dst.vmap[x] = vpieces[to].1[b].unwrap();
            src.vmap[x] = vpieces[from].1[a].unwrap();
        }
        for (sq, &(j, s)) in square.iter().enumerate() {
            if let Some(ei) = eemap[sq] {
                let n = bands[j].0.len();
                let (sd, ss) = if bands[j].0[s] > 0 { ((s + 1) % n, s) } else { (s, (s + 1) % n) };
                dst.emap[ei] = 2 * vpieces[to].2[vedge[j][sd]].unwrap();
                src.emap[ei] = 2 * vpieces[from].2[vedge[j][ss]].unwrap();
            }
        }
        gos.underlying.add_edge(from, to);
        gos.edge_graphs.push(eg.clone());
        gos.to_dst.push(dst);
        gos.to_src.push(src);
        labels.push(vec![hg_label[g0]]);
    }
    gos.labels = Some(labels);
    let point = graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            (0..g.graph.n_vertices)
                .map(|x| {
                    let y = gv(i, x);
                    let p = vpiece_of[y];
                    (p, vpieces[p].1[y].unwrap())
                })
                .collect()
        })
        .collect();
    let segment = graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            (0..g.graph.n_edges())
                .map(|e| {
                    let (pi, x) = seg_of[ge(i, e)];
                    (pi, x, !flipped[i][e])
                })
                .collect()
        })
        .collect();
    Ok(Built { gos, point, segment })
}

/// A cycle reading `word`, with the darts of the reading.
pub fn cycle(word: &[Letter]) -> (LabeledGraph, Vec<Dart>) {
    let mut g = LabeledGraph::default();
    g.graph = Graph::new(word.len());
    let darts = (0..word.len())
        .map(|s| {
            let e = g.add_edge(s, (s + 1) % word.len(), word[s]);
            2 * e
        })
        .collect();
    (g, darts)
}

/// The mapping torus of the identity on a circle reading `word`: one band
/// glued to the same cycle on both sides.
pub fn identity_torus(word: &[Letter], rank: usize) -> AnnulusComplex {
    let (g, d) = cycle(word);
    AnnulusComplex {
        rank,
        graphs: vec![g],
        bands: vec![Band {
            word: word.to_vec(),
            minus: Lift { graph: 0, darts: d.clone() },
            plus: Lift { graph: 0, darts: d },
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;

    #[test]
    fn torus_from_one_circle() {
        // the annulus ab glued to the same circle on both sides
        let w = Word::parse("ab", 2).unwrap().0;
        let b = build(&identity_torus(&w, 2)).unwrap();
        b.gos.validate().unwrap();
        assert_eq!(b.gos.chi_horizontal(), 0);
    }

    #[test]
    fn rejects_bad_lift() {
        let w = Word::parse("ab", 2).unwrap().0;
        let (g, d) = cycle(&w);
        let c = AnnulusComplex {
            rank: 2,
            graphs: vec![g],
            bands: vec![Band {
                word: Word::parse("ba", 2).unwrap().0,
                minus: Lift { graph: 0, darts: d.clone() },
                plus: Lift { graph: 0, darts: d },
            }],
        };
        assert_eq!(build(&c).unwrap_err(), BuildError::BadLift(0));
    }
}
