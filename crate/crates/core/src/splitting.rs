//! Peripheral elements of edge spaces, pushing along cylinders, splitting
//! vertices and the splitting move, and the driver that splits until every
//! irreducible component has a bad cylinder.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cylinders::Cylinders;
use crate::gos::{Carry, Complexity, Component, Gos, GosError, VertexSeparability};
use crate::graph::{edge_of, is_forward, Dart};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("edge {edge}: transverse graphs {a:?} and {b:?} share {shared} vertices")]
    Overlap {
        edge: usize,
        a: (usize, usize),
        b: (usize, usize),
        shared: usize,
    },
    #[error("no splitting vertex: no usable peripheral element reaches a splitting triple point")]
    NoSplittingVertex,
    #[error("stale splitting vertex: {0}")]
    Stale(String),
    #[error("push does not lift along dart {0}")]
    NotLiftable(Dart),
    #[error("split of vertex {vertex}: no fold with J = {{1,3}} or {{1,4}} meets the weight postcondition")]
    NoDecrease { vertex: usize },
    #[error("iteration cap {0} reached")]
    Cap(usize),
    #[error(transparent)]
    Gos(#[from] GosError),
}

/// A transverse edge graph `F` of a cylinder, seen inside `E_edge`, with a
/// boundary vertex `vertex` of `E_edge` lying in no other member of `ℱ(E)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Peripheral {
    pub edge: usize,
    pub vertex: usize,
    pub cylinder: usize,
    pub fiber: usize,
}

/// Members of `ℱ(E)` for every edge: `(cylinder, edge fiber)` with the set
/// of edge-graph vertices it covers.
pub fn fiber_images(x: &Gos, cyl: &Cylinders) -> Vec<Vec<((usize, usize), BTreeSet<usize>)>> {
    let mut out: Vec<Vec<((usize, usize), BTreeSet<usize>)>> = vec![Vec::new(); x.n_edges()];
    for (k, c) in cyl.cylinders.iter().enumerate() {
        for (f, t) in c.edge_spaces.iter().enumerate() {
            let mut by_edge: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for &(circle, pos) in &t.nodes {
                let (e, y) = cyl.circle_segment(circle, pos);
                by_edge.entry(e).or_default().insert(y);
            }
            for (e, ys) in by_edge {
                out[e].push(((k, f), ys));
            }
        }
    }
    out
}

/// Whether the horizontal edge over `(e, y)` lies in the non-circle part.
fn boundary(cyl: &Cylinders, e: usize, y: usize) -> bool {
    let h = &cyl.horizontal;
    let he = h.edge_index[e][y];
    h.in_infinite_part(h.graph.edges[he].0)
}

pub fn peripheral_elements(x: &Gos, cyl: &Cylinders, e: usize) -> Result<Vec<Peripheral>, SplitError> {
    let members = &fiber_images(x, cyl)[e];
    for (i, (a, sa)) in members.iter().enumerate() {
        for (b, sb) in &members[i + 1..] {
            let shared = sa.intersection(sb).count();
            if shared >= 2 {
                return Err(SplitError::Overlap { edge: e, a: *a, b: *b, shared });
            }
        }
    }
    let mut out = Vec::new();
    for y in 0..x.edge_graphs[e].n_vertices {
        if !boundary(cyl, e, y) {
            continue;
        }
        let owners: Vec<(usize, usize)> = members.iter().filter(|(_, s)| s.contains(&y)).map(|(m, _)| *m).collect();
        if let [(cylinder, fiber)] = owners[..] {
            out.push(Peripheral {
                edge: e,
                vertex: y,
                cylinder,
                fiber,
            });
        }
    }
    Ok(out)
}

pub fn all_peripheral_elements(x: &Gos, cyl: &Cylinders) -> Result<Vec<Peripheral>, SplitError> {
    let mut out = Vec::new();
    for e in 0..x.n_edges() {
        if x.edge_weight(e) > 0 {
            out.extend(peripheral_elements(x, cyl, e)?);
        }
    }
    Ok(out)
}

/// Position of a pushed point: a circle vertex (over an underlying vertex)
/// or a circle edge (over an underlying edge).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PushPoint {
    pub at_vertex: bool,
    pub circle: usize,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushTrace {
    pub cylinder: usize,
    /// Darts of the underlying graph; the first starts at the midpoint of
    /// its edge.
    pub path: Vec<Dart>,
    /// The point after every half step, starting on an edge.
    pub points: Vec<PushPoint>,
    /// Transverse graph containing each point.
    pub fibers: Vec<usize>,
}

fn circle_len(cyl: &Cylinders, c: usize) -> usize {
    cyl.circles[c].darts.len()
}

/// Moves a circle-edge point over the edge of `d` to the end at `head(d)`.
fn edge_to_vertex(cyl: &Cylinders, p: PushPoint, d: Dart) -> Option<PushPoint> {
    let hd = cyl.circles[p.circle].darts[p.pos];
    if p.at_vertex || cyl.horizontal.origin[edge_of(hd)].0 != edge_of(d) {
        return None;
    }
    let pos = if is_forward(hd) == is_forward(d) {
        (p.pos + 1) % circle_len(cyl, p.circle)
    } else {
        p.pos
    };
    Some(PushPoint {
        at_vertex: true,
        circle: p.circle,
        pos,
    })
}

/// Moves a circle-vertex point at `tail(d)` onto the edge of `d`.
fn vertex_to_edge(cyl: &Cylinders, p: PushPoint, d: Dart) -> Option<PushPoint> {
    if !p.at_vertex {
        return None;
    }
    let n = circle_len(cyl, p.circle);
    let darts = &cyl.circles[p.circle].darts;
    let over = |hd: Dart| cyl.horizontal.origin[edge_of(hd)].0 == edge_of(d);
    let out = darts[p.pos];
    if over(out) && is_forward(out) == is_forward(d) {
        return Some(PushPoint {
            at_vertex: false,
            circle: p.circle,
            pos: p.pos,
        });
    }
    let back = darts[(p.pos + n - 1) % n] ^ 1;
    if over(back) && is_forward(back) == is_forward(d) {
        return Some(PushPoint {
            at_vertex: false,
            circle: p.circle,
            pos: (p.pos + n - 1) % n,
        });
    }
    None
}

fn fiber_of(cyl: &Cylinders, k: usize, p: PushPoint) -> usize {
    let c = &cyl.cylinders[k];
    let spaces = if p.at_vertex { &c.vertex_spaces } else { &c.edge_spaces };
    spaces
        .iter()
        .position(|t| t.nodes.contains(&(p.circle, p.pos)))
        .expect("point lies in its cylinder")
}

/// Pushes the point `start` (a circle edge of cylinder `k`) along `path`.
pub fn push(x: &Gos, cyl: &Cylinders, k: usize, start: PushPoint, path: &[Dart]) -> Result<PushTrace, SplitError> {
    let mut points = vec![start];
    let mut p = start;
    for (i, &d) in path.iter().enumerate() {
        if i > 0 {
            if x.tail(d) != x.head(path[i - 1]) {
                return Err(SplitError::Precondition(format!("path is not connected at dart {d}")));
            }
            p = vertex_to_edge(cyl, p, d).ok_or(SplitError::NotLiftable(d))?;
            points.push(p);
        }
        p = edge_to_vertex(cyl, p, d).ok_or(SplitError::NotLiftable(d))?;
        points.push(p);
    }
    let fibers = points.iter().map(|&q| fiber_of(cyl, k, q)).collect();
    Ok(PushTrace {
        cylinder: k,
        path: path.to_vec(),
        points,
        fibers,
    })
}

/// Circle edge of cylinder `k` over the horizontal edge `(e, y)`.
pub fn point_over(cyl: &Cylinders, k: usize, fiber: usize, e: usize, y: usize) -> Option<PushPoint> {
    cyl.cylinders[k].edge_spaces[fiber]
        .nodes
        .iter()
        .find(|&&(c, pos)| cyl.circle_segment(c, pos) == (e, y))
        .map(|&(circle, pos)| PushPoint { at_vertex: false, circle, pos })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingVertex {
    pub vertex: usize,
    /// The triple point of the vertex graph.
    pub w: usize,
    /// Incident dart whose edge graph maps isomorphically.
    pub outgoing: Dart,
    pub primary: Dart,
    pub secondary: Dart,
    pub peripheral: Peripheral,
    pub push: Option<PushTrace>,
}

/// Relative weight: total weight of the vertex graphs other than `v`.
pub fn relative_weight(x: &Gos, v: usize) -> usize {
    (0..x.n_vertices()).filter(|&u| u != v).map(|u| x.weight(u)).sum()
}

/// Checks every bullet of the definition for vertex `v` with primary
/// incoming dart `primary`.
pub fn check_splitting_vertex(x: &Gos, peripherals: &[Peripheral], v: usize, primary: Dart) -> Result<SplittingVertex, String> {
    let VertexSeparability::Splittable { w, iso, left, right } = x.vertex_separability(v) else {
        return Err(format!("vertex {v} is not splittable"));
    };
    if x.tail(iso) == v {
        return Err(format!("outgoing edge {} of vertex {v} is a loop", edge_of(iso)));
    }
    let secondary = match primary {
        d if d == left => right,
        d if d == right => left,
        _ => return Err(format!("dart {primary} is not an incoming edge of vertex {v}")),
    };
    let map = x.dart_map(primary);
    let peripheral = peripherals
        .iter()
        .find(|p| p.edge == edge_of(primary) && map.vmap[p.vertex] == w)
        .ok_or_else(|| format!("no peripheral element of edge {} with boundary vertex over the triple point", edge_of(primary)))?;
    Ok(SplittingVertex {
        vertex: v,
        w,
        outgoing: iso,
        primary,
        secondary,
        peripheral: *peripheral,
        push: None,
    })
}

fn preconditions(x: &Gos, cyl: &Cylinders) -> Result<(), SplitError> {
    if !x.is_irreducible() {
        return Err(SplitError::Precondition("space is reducible".into()));
    }
    if !x.separability().separable {
        return Err(SplitError::Precondition("space is not separable".into()));
    }
    if x.chi_underlying() >= 0 {
        return Err(SplitError::Precondition(format!("χ(Γ_U) = {} is not negative", x.chi_underlying())));
    }
    if let Some(i) = cyl.cylinders.iter().position(|c| !c.good) {
        return Err(SplitError::Precondition(format!("cylinder {i} is bad")));
    }
    Ok(())
}

/// Pushes every peripheral boundary vertex along shortest paths until it
/// lands on the triple point of a splitting vertex. Ties go to the lowest
/// edge id. An exhaustive check of all vertices backs the search up.
pub fn find_splitting_vertex(x: &Gos) -> Result<SplittingVertex, SplitError> {
    let cyl = Cylinders::build(x);
    preconditions(x, &cyl)?;
    let peripherals = all_peripheral_elements(x, &cyl)?;

    type State = (usize, PushPoint);
    let mut parent: BTreeMap<State, Option<(State, Dart)>> = BTreeMap::new();
    let mut queue: VecDeque<State> = VecDeque::new();
    for p in &peripherals {
        if let Some(pt) = point_over(&cyl, p.cylinder, p.fiber, p.edge, p.vertex) {
            let s = (p.cylinder, pt);
            if parent.insert(s, None).is_none() {
                queue.push_back(s);
            }
        }
    }
    let out = x.underlying.out_darts();
    while let Some(s) = queue.pop_front() {
        let (k, p) = s;
        // whole darts: the start sits on an edge, every later state on a vertex
        let moves: Vec<(Dart, PushPoint)> = if p.at_vertex {
            let (v, _) = cyl.circle_point(p.circle, p.pos);
            out[v]
                .iter()
                .filter_map(|&d| vertex_to_edge(&cyl, p, d).and_then(|q| edge_to_vertex(&cyl, q, d)).map(|q| (d, q)))
                .collect()
        } else {
            let e = cyl.circle_segment(p.circle, p.pos).0;
            [2 * e, 2 * e + 1]
                .into_iter()
                .filter_map(|d| edge_to_vertex(&cyl, p, d).map(|q| (d, q)))
                .collect()
        };
        for (d, q) in moves {
            let t = (k, q);
            if parent.contains_key(&t) {
                continue;
            }
            parent.insert(t, Some((s, d)));
            let (v, y) = cyl.circle_point(q.circle, q.pos);
            if let Ok(mut sv) = check_splitting_vertex(x, &peripherals, v, d) {
                if sv.w == y {
                    let mut path = Vec::new();
                    let mut cur = t;
                    while let Some(Some((prev, dd))) = parent.get(&cur) {
                        path.push(*dd);
                        cur = *prev;
                    }
                    path.reverse();
                    sv.push = Some(push(x, &cyl, cur.0, cur.1, &path)?);
                    return Ok(sv);
                }
            }
            queue.push_back(t);
        }
    }
    for v in 0..x.n_vertices() {
        for d in x.incident(v) {
            if let Ok(sv) = check_splitting_vertex(x, &peripherals, v, d) {
                return Ok(sv);
            }
        }
    }
    Err(SplitError::NoSplittingVertex)
}

/// Any splitting vertex together with its relative weight, lightest first.
pub fn lightest_splitting_vertex(x: &Gos) -> Option<(SplittingVertex, usize)> {
    let cyl = Cylinders::build(x);
    let peripherals = all_peripheral_elements(x, &cyl).ok()?;
    let mut best: Option<(SplittingVertex, usize)> = None;
    for v in 0..x.n_vertices() {
        for d in x.incident(v) {
            if let Ok(sv) = check_splitting_vertex(x, &peripherals, v, d) {
                let w = relative_weight(x, v);
                if best.as_ref().map_or(true, |b| w < b.1) {
                    best = Some((sv, w));
                }
            }
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct SplitOutcome {
    pub gos: Gos,
    pub carry: Carry,
    /// The two darts folded together, in the collapsed space.
    pub j: [Dart; 2],
    pub weight_zero_edge: bool,
    pub relative_before: usize,
    pub next: Option<(SplittingVertex, usize)>,
}

/// Collapses the outgoing edge and folds the primary incoming edge with one
/// of the two edges at the other end.
pub fn split(x: &Gos, sv: &SplittingVertex) -> Result<SplitOutcome, SplitError> {
    let cyl = Cylinders::build(x);
    let peripherals = all_peripheral_elements(x, &cyl)?;
    let fresh = check_splitting_vertex(x, &peripherals, sv.vertex, sv.primary).map_err(SplitError::Stale)?;
    if fresh.outgoing != sv.outgoing || fresh.w != sv.w {
        return Err(SplitError::Stale("outgoing edge or triple point changed".into()));
    }
    let v = sv.vertex;
    let v2 = x.tail(sv.outgoing);
    let cut = edge_of(sv.outgoing);
    let (xb, c1) = x.collapse(sv.outgoing)?;
    let moved = |d: Dart| if edge_of(d) > cut { d - 2 } else { d };
    let vb = c1.vertex[v2];
    let e1 = moved(sv.primary);
    let e2 = moved(sv.secondary);
    let inc = xb.incident(vb);
    let others: Vec<Dart> = inc.iter().copied().filter(|&d| d != e1 && d != e2).collect();
    let before = relative_weight(x, v);
    let base = xb.reduce().0;
    for &e3 in &others {
        let j = [e1, e3];
        let (xs, c2) = xb.fold(vb, &j)?;
        if xs.reduce().0.is_isomorphic(&base) {
            continue;
        }
        let weight_zero_edge = (0..xs.n_edges()).any(|e| xs.edge_weight(e) == 0);
        let next = lightest_splitting_vertex(&xs);
        let ok = weight_zero_edge || next.as_ref().is_some_and(|n| n.1 < before);
        if ok {
            return Ok(SplitOutcome {
                gos: xs,
                carry: c1.then(&c2),
                j,
                weight_zero_edge,
                relative_before: before,
                next,
            });
        }
    }
    Err(SplitError::NoDecrease { vertex: v })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub component: Vec<usize>,
    /// Vertex of the reduced component.
    pub vertex: usize,
    pub outgoing: Dart,
    pub primary: Dart,
    pub j: [Dart; 2],
    pub relative_before: usize,
    pub relative_after: Option<usize>,
    pub weight_zero_edge: bool,
    /// After re-minimizing, on the last split of a chain.
    pub complexity_after: Option<Complexity>,
    pub cylinders_good_after: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct SplitToBad {
    pub gos: Gos,
    pub carry: Carry,
    pub trace: Vec<MoveRecord>,
}

fn needs_work(x: &Gos) -> bool {
    x.chi_underlying() < 0 && Cylinders::build(x).all_good()
}

/// Splits until every irreducible component has a bad cylinder or
/// `χ(Γ_U) = 0`. Components are reduced before they are examined.
pub fn split_to_bad(x: &Gos) -> Result<SplitToBad, SplitError> {
    if !x.separability().separable {
        return Err(SplitError::Precondition("space is not separable".into()));
    }
    let cap = 10 * (x.total_edges() + 1).pow(2);
    let mut x = x.clone();
    let mut carry = Carry::identity(&x);
    let mut trace = Vec::new();
    loop {
        let work = x.irreducible_components().into_iter().find_map(|comp: Component| {
            let (reduced, c0, _) = comp.gos.reduce();
            needs_work(&reduced).then_some((comp, reduced, c0))
        });
        let Some((comp, reduced, c0)) = work else { break };
        // follow splitting vertices of decreasing relative weight until the
        // component falls apart, then re-minimize it
        let mut cur = reduced;
        let mut local = c0;
        let mut sv = find_splitting_vertex(&cur)?;
        let mut records = Vec::new();
        loop {
            if trace.len() + records.len() >= cap {
                return Err(SplitError::Cap(cap));
            }
            let out = split(&cur, &sv)?;
            local = local.then(&out.carry);
            records.push(MoveRecord {
                component: comp.vertices.clone(),
                vertex: sv.vertex,
                outgoing: sv.outgoing,
                primary: sv.primary,
                j: out.j,
                relative_before: out.relative_before,
                relative_after: out.next.as_ref().map(|n| n.1),
                weight_zero_edge: out.weight_zero_edge,
                complexity_after: None,
                cylinders_good_after: Vec::new(),
            });
            cur = out.gos;
            match out.next {
                Some((next, _)) if !out.weight_zero_edge => sv = next,
                _ => break,
            }
        }
        let m = cur.minimize()?;
        let local = local.then(&m.carry);
        let last = records.last_mut().expect("at least one split");
        last.complexity_after = Some(m.complexity.clone());
        last.cylinders_good_after = Cylinders::build(&m.gos).cylinders.iter().map(|c| c.good).collect();
        trace.extend(records);
        let (nx, global) = x.replace_component(&comp, &m.gos, &local);
        carry = carry.then(&global);
        x = nx;
    }
    Ok(SplitToBad { gos: x, carry, trace })
}

/// Every irreducible component with an annulus has a bad cylinder.
pub fn every_component_has_bad_cylinder(x: &Gos) -> bool {
    x.irreducible_components().iter().all(|c| {
        let cyl = Cylinders::build(&c.gos);
        cyl.cylinders.is_empty() || !cyl.all_good()
    })
}

#[cfg(test)]
mod tests;
