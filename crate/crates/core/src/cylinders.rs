//! Annuli, the circles they wrap around, and cylinders.
//!
//! Every edge of an edge graph spans a square. Each vertex-graph edge is a
//! side of exactly two squares, so squares chain into annuli and Möbius
//! bands. Their boundary circuits are closed immersed paths in the
//! horizontal graph; the indivisible roots of these circuits, up to
//! rotation and reversal, are the circles. A cylinder is a connected
//! component of the complex made of circles and bands.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::gos::{Gos, Horizontal};
use crate::graph::{bar, edge_of, is_forward, Dart, Graph, UnionFind};
use crate::words::{cyclic_reduce, format_letters, minimal_period, reduce, rotate, Letter};

/// Square over underlying edge `edge` spanned by edge-graph edge `cell`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Square {
    pub edge: usize,
    pub cell: usize,
}

/// One step around a band: a square crossed forwards or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub square: Square,
    pub forward: bool,
    /// Whether the band's vertical orientation agrees with the cell.
    pub upright: bool,
    /// `(vertex, vertex-graph edge)` glued to the next step.
    pub junction: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annulus {
    pub steps: Vec<Step>,
    pub orientable: bool,
    /// Horizontal dart circuits: two for an annulus, one of double length
    /// for a Möbius band.
    pub circuits: Vec<Vec<Dart>>,
}

impl Annulus {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Circuit positions of the two ends of the vertical edge before step `t`.
    pub fn vertical_ends(&self, t: usize) -> [(usize, usize); 2] {
        if self.orientable {
            [(0, t), (1, t)]
        } else {
            [(0, t), (0, t + self.len())]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circle {
    /// Least rotation over both orientations of an indivisible circuit.
    pub darts: Vec<Dart>,
    /// Lies in a component of the horizontal graph which is not a circle.
    pub infinite: bool,
}

/// How a band circuit wraps around its circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub annulus: usize,
    pub circuit: usize,
    pub circle: usize,
    pub offset: usize,
    pub reversed: bool,
    pub winding: usize,
}

impl Attachment {
    /// Circle position of the vertex at the start of circuit position `t`.
    pub fn vertex_position(&self, t: usize, p: usize) -> usize {
        if self.reversed {
            (2 * p - t % p - self.offset) % p
        } else {
            (t % p + p - self.offset) % p
        }
    }

    /// Circle position of the edge at circuit position `t`.
    pub fn edge_position(&self, t: usize, p: usize) -> usize {
        if self.reversed {
            (2 * p - 1 - t % p - self.offset) % p
        } else {
            (t % p + p - self.offset) % p
        }
    }
}

/// A fiber of a cylinder: a vertex space (nodes are circle vertices, edges
/// are vertical edges) or an edge space (nodes are circle edges, edges are
/// squares).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transverse {
    pub graph: Graph,
    /// `(circle, position)` of each node.
    pub nodes: Vec<(usize, usize)>,
    /// Number of nodes on circles of the essential boundary.
    pub meets: usize,
    /// Nodes on circles in the infinite part of the whole horizontal graph.
    pub boundary_meets: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    pub annuli: Vec<usize>,
    pub circles: Vec<usize>,
    pub vertex_spaces: Vec<Transverse>,
    pub edge_spaces: Vec<Transverse>,
    /// The underlying graph: vertex spaces joined by edge spaces.
    pub underlying: Graph,
    /// Circles lying in the non-circle part of the horizontal graph.
    pub boundary: Vec<usize>,
    /// Boundary circles that stay in the non-circle part once weight-zero
    /// edges are removed.
    pub essential: Vec<usize>,
    pub good: bool,
}

impl Cylinder {
    pub fn underlying_is_circle(&self) -> bool {
        let g = &self.underlying;
        g.n_vertices > 0 && g.n_vertices == g.n_edges() && g.is_connected() && (0..g.n_vertices).all(|v| g.degree(v) == 2)
    }

    pub fn min_meets(&self) -> usize {
        self.vertex_spaces.iter().chain(&self.edge_spaces).map(|f| f.meets).min().unwrap_or(0)
    }

    pub fn max_meets(&self) -> usize {
        self.vertex_spaces.iter().chain(&self.edge_spaces).map(|f| f.meets).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct Cylinders {
    pub horizontal: Horizontal,
    pub annuli: Vec<Annulus>,
    pub circles: Vec<Circle>,
    pub attachments: Vec<Attachment>,
    pub cylinders: Vec<Cylinder>,
    /// Per circle: stays in a non-circle component after deleting the
    /// horizontal edges over weight-zero edges.
    pub essential: Vec<bool>,
}

/// Squares as the two ends of each vertical edge: `(square index, at head)`.
fn square_ends(x: &Gos) -> (Vec<Square>, Vec<Vec<Vec<(usize, bool)>>>) {
    let mut squares = Vec::new();
    let mut cover: Vec<Vec<Vec<(usize, bool)>>> = x.vertex_graphs.iter().map(|g| vec![Vec::new(); g.n_edges()]).collect();
    for e in 0..x.n_edges() {
        let (a, b) = x.underlying.edges[e];
        for cell in 0..x.edge_graphs[e].n_edges() {
            let s = squares.len();
            squares.push(Square { edge: e, cell });
            cover[b][edge_of(x.to_dst[e].emap[cell])].push((s, true));
            cover[a][edge_of(x.to_src[e].emap[cell])].push((s, false));
        }
    }
    (squares, cover)
}

pub fn trace_annuli(x: &Gos, h: &Horizontal) -> Vec<Annulus> {
    let (squares, cover) = square_ends(x);
    let end = |s: usize, head: bool| -> (usize, usize, bool) {
        let Square { edge, cell } = squares[s];
        let (v, img) = if head {
            (x.underlying.edges[edge].1, x.to_dst[edge].emap[cell])
        } else {
            (x.underlying.edges[edge].0, x.to_src[edge].emap[cell])
        };
        (v, edge_of(img), is_forward(img))
    };
    let side = |s: usize, top: bool, forward: bool| -> Dart {
        let Square { edge, cell } = squares[s];
        let (p, q) = x.edge_graphs[edge].edges[cell];
        let he = h.edge_index[edge][if top { q } else { p }];
        if forward {
            2 * he
        } else {
            2 * he + 1
        }
    };
    let index: BTreeMap<(usize, usize), usize> = squares.iter().enumerate().map(|(i, q)| ((q.edge, q.cell), i)).collect();
    let mut used = vec![false; squares.len()];
    let mut out = Vec::new();
    for s0 in 0..squares.len() {
        if used[s0] {
            continue;
        }
        let mut steps = Vec::new();
        let (mut s, mut forward, mut upright) = (s0, true, true);
        loop {
            let (v, f, o) = end(s, forward);
            steps.push(Step {
                square: squares[s],
                forward,
                upright,
                junction: (v, f),
            });
            used[s] = true;
            let &(s2, at_head) = cover[v][f].iter().find(|&&c| c != (s, forward)).unwrap_or(&cover[v][f][0]);
            let (_, _, o2) = end(s2, at_head);
            upright = upright == (o == o2);
            forward = !at_head;
            s = s2;
            if (s, forward, upright) == (s0, true, true) {
                break;
            }
        }
        let orientable = !steps[1..].iter().any(|st| st.square == squares[s0]);
        let n = if orientable { steps.len() } else { steps.len() / 2 };
        let dart_of = |st: &Step, top: bool| {
            let s = index[&(st.square.edge, st.square.cell)];
            side(s, top == st.upright, st.forward)
        };
        let mut circuits = vec![steps.iter().map(|st| dart_of(st, false)).collect::<Vec<Dart>>()];
        if orientable {
            circuits.push(steps.iter().map(|st| dart_of(st, true)).collect());
        }
        steps.truncate(n);
        out.push(Annulus { steps, orientable, circuits });
    }
    out
}

/// Least rotation of the root of a dart circuit over both orientations,
/// with the rotation used and whether it was reversed.
fn canonical_circuit(c: &[Dart]) -> (Vec<Dart>, usize, bool) {
    let p = minimal_period(c);
    let root = &c[..p];
    let rev: Vec<Dart> = root.iter().rev().map(|&d| bar(d)).collect();
    let mut best = (rotate(root, 0), 0, false);
    for k in 0..p {
        for (seq, r) in [(root, false), (&rev[..], true)] {
            let cand = rotate(seq, k);
            if cand < best.0 {
                best = (cand, k, r);
            }
        }
    }
    best
}

impl Cylinders {
    pub fn build(x: &Gos) -> Cylinders {
        let h = x.horizontal();
        let annuli = trace_annuli(x, &h);
        // horizontal graph with the edges over weight-zero edges deleted
        let mut keep = vec![true; h.graph.n_edges()];
        for (e, idx) in h.edge_index.iter().enumerate() {
            if x.edge_weight(e) == 0 {
                for &i in idx {
                    keep[i] = false;
                }
            }
        }
        let mut light = Graph::new(h.graph.n_vertices);
        for (i, &(a, b)) in h.graph.edges.iter().enumerate() {
            if keep[i] {
                light.add_edge(a, b);
            }
        }
        let (lcomp, lk) = light.components();
        let mut lnv = vec![0usize; lk];
        let mut lne = vec![0usize; lk];
        let mut ldeg2 = vec![true; lk];
        for y in 0..light.n_vertices {
            lnv[lcomp[y]] += 1;
            if light.degree(y) != 2 {
                ldeg2[lcomp[y]] = false;
            }
        }
        for &(a, _) in &light.edges {
            lne[lcomp[a]] += 1;
        }
        let light_infinite = |y: usize| !(ldeg2[lcomp[y]] && lnv[lcomp[y]] == lne[lcomp[y]]);

        let mut index: BTreeMap<Vec<Dart>, usize> = BTreeMap::new();
        let mut circles: Vec<Circle> = Vec::new();
        let mut essential = Vec::new();
        let mut attachments = Vec::new();
        for (ai, a) in annuli.iter().enumerate() {
            for (ci, c) in a.circuits.iter().enumerate() {
                let (canon, offset, reversed) = canonical_circuit(c);
                let p = canon.len();
                let id = *index.entry(canon.clone()).or_insert_with(|| {
                    let y = h.graph.tail(canon[0]);
                    circles.push(Circle {
                        darts: canon.clone(),
                        infinite: h.in_infinite_part(y),
                    });
                    essential.push(light_infinite(y));
                    circles.len() - 1
                });
                attachments.push(Attachment {
                    annulus: ai,
                    circuit: ci,
                    circle: id,
                    offset,
                    reversed,
                    winding: c.len() / p,
                });
            }
        }

        let na = annuli.len();
        let mut uf = UnionFind::new(na + circles.len());
        for at in &attachments {
            uf.union(at.annulus, na + at.circle);
        }
        let mut cylinders = Vec::new();
        let mut seen = vec![false; na + circles.len()];
        for a0 in 0..na {
            let r = uf.find(a0);
            if seen[r] {
                continue;
            }
            seen[r] = true;
            let ann: Vec<usize> = (0..na).filter(|&a| uf.find(a) == r).collect();
            let circ: Vec<usize> = (0..circles.len()).filter(|&c| uf.find(na + c) == r).collect();
            cylinders.push(assemble(&annuli, &circles, &attachments, &essential, ann, circ));
        }
        Cylinders {
            horizontal: h,
            annuli,
            circles,
            attachments,
            cylinders,
            essential,
        }
    }

    pub fn square_count(&self) -> usize {
        self.annuli.iter().map(Annulus::len).sum()
    }

    pub fn attachment(&self, annulus: usize, circuit: usize) -> &Attachment {
        self.attachments.iter().find(|a| a.annulus == annulus && a.circuit == circuit).unwrap()
    }

    /// `(vertex, local vertex)` of a circle vertex.
    pub fn circle_point(&self, circle: usize, pos: usize) -> (usize, usize) {
        let d = self.circles[circle].darts[pos];
        self.horizontal.locate(self.horizontal.graph.tail(d))
    }

    /// `(underlying edge, edge-graph vertex)` of a circle edge.
    pub fn circle_segment(&self, circle: usize, pos: usize) -> (usize, usize) {
        self.horizontal.origin[edge_of(self.circles[circle].darts[pos])]
    }

    /// Cyclic label of a circle, when the space carries labels.
    pub fn circle_label(&self, x: &Gos, circle: usize) -> Option<Vec<Letter>> {
        let labels = x.labels.as_ref()?;
        let mut w = Vec::new();
        for &d in &self.circles[circle].darts {
            let (e, _) = self.horizontal.origin[edge_of(d)];
            let l = &labels[e];
            if is_forward(d) {
                w.extend_from_slice(l);
            } else {
                w.extend(l.iter().rev().map(|&a| -a));
            }
        }
        Some(cyclic_reduce(&reduce(&w)))
    }

    pub fn all_good(&self) -> bool {
        self.cylinders.iter().all(|c| c.good)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph squares {\n");
        for (ai, a) in self.annuli.iter().enumerate() {
            let _ = writeln!(s, "  subgraph cluster_{ai} {{ label=\"{}\";", if a.orientable { "annulus" } else { "mobius" });
            for (t, st) in a.steps.iter().enumerate() {
                let _ = writeln!(s, "    s{ai}_{t} [label=\"e{} c{}\"];", st.square.edge, st.square.cell);
            }
            s.push_str("  }\n");
            for t in 0..a.len() {
                let st = &a.steps[t];
                let _ = writeln!(
                    s,
                    "  s{ai}_{t} -- s{ai}_{} [label=\"v{} f{}\"];",
                    (t + 1) % a.len(),
                    st.junction.0,
                    st.junction.1
                );
            }
        }
        s.push_str("}\n");
        s
    }
}

fn assemble(annuli: &[Annulus], circles: &[Circle], attachments: &[Attachment], essential: &[bool], ann: Vec<usize>, circ: Vec<usize>) -> Cylinder {
    let local: BTreeMap<usize, usize> = circ.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut voff = Vec::new();
    let mut total = 0;
    for &c in &circ {
        voff.push(total);
        total += circles[c].darts.len();
    }
    let node = |c: usize, pos: usize| voff[local[&c]] + pos;
    let mut vfib = Graph::new(total);
    let mut efib = Graph::new(total);
    for &a in &ann {
        let an = &annuli[a];
        let att: Vec<&Attachment> = (0..an.circuits.len())
            .map(|ci| attachments.iter().find(|x| x.annulus == a && x.circuit == ci).unwrap())
            .collect();
        for t in 0..an.len() {
            let [(c1, t1), (c2, t2)] = an.vertical_ends(t);
            let (a1, a2) = (att[c1], att[c2]);
            let (p1, p2) = (circles[a1.circle].darts.len(), circles[a2.circle].darts.len());
            vfib.add_edge(node(a1.circle, a1.vertex_position(t1, p1)), node(a2.circle, a2.vertex_position(t2, p2)));
            efib.add_edge(node(a1.circle, a1.edge_position(t1, p1)), node(a2.circle, a2.edge_position(t2, p2)));
        }
    }
    let on_essential: Vec<bool> = circ
        .iter()
        .flat_map(|&c| vec![essential[c] && circles[c].infinite; circles[c].darts.len()])
        .collect();
    let on_boundary: Vec<bool> = circ.iter().flat_map(|&c| vec![circles[c].infinite; circles[c].darts.len()]).collect();
    let whereis: Vec<(usize, usize)> = circ.iter().flat_map(|&c| (0..circles[c].darts.len()).map(move |p| (c, p))).collect();
    let fibers = |g: &Graph| -> (Vec<Transverse>, Vec<usize>) {
        let all_v = vec![true; g.n_vertices];
        let all_e = vec![true; g.n_edges()];
        let comps = crate::gos::subgraph_components(g, &all_v, &all_e);
        let mut owner = vec![0; g.n_vertices];
        let out = comps
            .into_iter()
            .enumerate()
            .map(|(i, (graph, vmap, _))| {
                let mut nodes = vec![(0, 0); graph.n_vertices];
                let mut meets = 0;
                let mut boundary_meets = 0;
                for (y, m) in vmap.iter().enumerate() {
                    if let Some(m) = *m {
                        nodes[m] = whereis[y];
                        owner[y] = i;
                        meets += usize::from(on_essential[y]);
                        boundary_meets += usize::from(on_boundary[y]);
                    }
                }
                Transverse {
                    graph,
                    nodes,
                    meets,
                    boundary_meets,
                }
            })
            .collect();
        (out, owner)
    };
    let (vertex_spaces, vown) = fibers(&vfib);
    let (edge_spaces, eown) = fibers(&efib);
    let mut underlying = Graph::new(vertex_spaces.len());
    let mut done = vec![false; edge_spaces.len()];
    for &c in &circ {
        let p = circles[c].darts.len();
        for pos in 0..p {
            let k = eown[node(c, pos)];
            if !std::mem::replace(&mut done[k], true) {
                underlying.add_edge(vown[node(c, pos)], vown[node(c, (pos + 1) % p)]);
            }
        }
    }
    let boundary: Vec<usize> = circ.iter().copied().filter(|&c| circles[c].infinite).collect();
    let ess: Vec<usize> = boundary.iter().copied().filter(|&c| essential[c]).collect();
    let mut cyl = Cylinder {
        annuli: ann,
        circles: circ,
        vertex_spaces,
        edge_spaces,
        underlying,
        boundary,
        essential: ess,
        good: false,
    };
    cyl.good = cyl.min_meets() > 1;
    cyl
}

/// Whether every edge graph is a tree.
pub fn edge_graphs_are_trees(x: &Gos) -> bool {
    x.edge_graphs.iter().all(Graph::is_tree)
}

/// Summary line for a circle label.
pub fn describe_circle(x: &Gos, cyl: &Cylinders, c: usize) -> String {
    match cyl.circle_label(x, c) {
        Some(w) if !w.is_empty() => format_letters(&w),
        Some(_) => "1".into(),
        None => format!("circuit of length {}", cyl.circles[c].darts.len()),
    }
}
