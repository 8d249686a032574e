//! End-to-end reports for adjoin-root and HNN instances. Every claim names
//! how it was checked; claims made by the pipeline are re-checked in the
//! coordinates of a free basis of `H = φ(F)`.

use serde::{Deserialize, Serialize};

use crate::construct::{bounded_search_with, build_gos, AdjoinRoot, BuiltGos, ConstructError, EdgeKind, GraphOfFreeGroups};
use crate::cylinders::{edge_graphs_are_trees, Cylinders};
use crate::gos::{Complexity, Gos, GosError};
use crate::graph::{
    circle_immersion, edge_of, is_forward, rewrite_in_basis, subgroup_basis, subgroup_contains, subgroup_graph, subgroup_is_whole, Graph, UnionFind,
};
use crate::splitting::{split_to_bad, MoveRecord, SplitError};
use crate::words::{concat_reduce, cyclic_reduce, format_letters, inverse, is_primitive, reduce, root, CyclicWord, Letter};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Gos(#[from] GosError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error("pipeline failure: {0}")]
    Pipeline(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pipeline,
    Whitehead,
    Stallings,
    Conjugacy,
    CircuitImmersion,
    Direct,
    /// Brute-force enumeration.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub statement: String,
    pub holds: bool,
    pub method: Method,
}

fn claim(claims: &mut Vec<Claim>, statement: impl Into<String>, holds: bool, method: Method) -> bool {
    claims.push(Claim {
        statement: statement.into(),
        holds,
        method,
    });
    holds
}

fn text(w: &[Letter]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        format_letters(w)
    }
}

/// Where a root's circle crosses a horizontal edge exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    /// `"minimized"` or `"built"`: which space the circle was found in.
    pub space: String,
    pub circle: usize,
    pub edge: usize,
    pub edge_vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootFinding {
    pub gamma: String,
    pub k: usize,
    pub image: String,
    pub crossing: Option<Crossing>,
    pub primitive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub base_images: Vec<String>,
    pub root_images: Vec<String>,
    /// True when the homomorphism came from the bounded search.
    pub searched: bool,
    pub complexity: Complexity,
    pub chi_equal: bool,
    pub separable: bool,
    pub edge_trees_built: bool,
    pub edge_trees_minimized: bool,
    pub roots: Vec<RootFinding>,
    pub claims: Vec<Claim>,
    pub verdict: bool,
    pub summary: Vec<String>,
}

/// Searches for a maximal-corank homomorphism of the adjoin-root group,
/// injective on the base group, with images of length at most `max_len`.
pub fn find_root_homomorphism(a: &AdjoinRoot, max_len: usize, parallel: bool) -> Option<(Vec<Vec<Letter>>, Vec<Vec<Letter>>)> {
    let n = a.rank;
    let keep = |images: &[Vec<Letter>]| subgroup_graph(&images[..n]).graph.graph.betti() == n as i64 && images[n..].iter().all(|r| !r.is_empty());
    let w = bounded_search_with(&a.presentation(), n, max_len, parallel, &keep)?;
    Some((w[..n].to_vec(), w[n..].to_vec()))
}

/// Horizontal edges crossed exactly once by a circle of the given label.
fn crossing_once(x: &Gos, target: &CyclicWord) -> Option<(usize, usize, usize)> {
    let cyl = Cylinders::build(x);
    for c in 0..cyl.circles.len() {
        let Some(label) = cyl.circle_label(x, c) else { continue };
        if CyclicWord::new(&label).ok().as_ref() != Some(target) {
            continue;
        }
        let darts = &cyl.circles[c].darts;
        for d in darts {
            if darts.iter().filter(|&&d2| edge_of(d2) == edge_of(*d)).count() == 1 {
                let (e, y) = cyl.horizontal.origin[edge_of(*d)];
                return Some((c, e, y));
            }
        }
    }
    None
}

/// Builds, minimizes and inspects the graph of spaces of an adjoin-root
/// instance. Without a homomorphism one is searched for up to `max_len`.
pub fn theorem_report(a: &AdjoinRoot, phi: Option<(Vec<Vec<Letter>>, Vec<Vec<Letter>>)>, max_len: usize, parallel: bool) -> Result<TheoremReport, ReportError> {
    a.check()?;
    let searched = phi.is_none();
    let (base_images, root_images) = match phi {
        Some(p) => p,
        None => find_root_homomorphism(a, max_len, parallel)
            .ok_or_else(|| ReportError::Hypothesis(format!("no maximal-corank homomorphism with images of length at most {max_len}")))?,
    };
    let n = a.rank;
    let d = a.to_gofg(base_images.clone(), root_images.clone(), n)?;
    let built = build_gos(&d).map_err(|e| match e {
        ConstructError::NotMaximal { .. } | ConstructError::NotSurjective(_) | ConstructError::NotEmbedding(_) | ConstructError::Relation(_) => {
            ReportError::Hypothesis(e.to_string())
        }
        e => ReportError::Construct(e),
    })?;
    let x = &built.built.gos;
    let m = x.minimize()?;
    let sep = m.gos.separability();
    let edge_trees_built = edge_graphs_are_trees(x);
    let edge_trees_minimized = edge_graphs_are_trees(&m.gos);
    let mut claims = Vec::new();
    claim(&mut claims, "χ(Γ(X)) = χ(Γ_U(X)) after minimizing", sep.chi_equal, Method::Direct);
    claim(&mut claims, "minimized space is separable", sep.separable, Method::Pipeline);
    claim(&mut claims, "edge graphs of the built space are trees", edge_trees_built, Method::Direct);
    claim(
        &mut claims,
        "edge graphs of the minimized space are trees",
        edge_trees_minimized,
        Method::Direct,
    );
    let mut roots = Vec::new();
    let mut factor_found = false;
    let mut agree = true;
    for (g, k) in &a.roots {
        let image = d.image(0, g);
        let target = CyclicWord::new(&image).map_err(|e| ReportError::Hypothesis(e.to_string()))?;
        let crossing = [("minimized", &m.gos), ("built", x)].into_iter().find_map(|(space, y)| {
            crossing_once(y, &target).map(|(circle, edge, edge_vertex)| Crossing {
                space: space.into(),
                circle,
                edge,
                edge_vertex,
            })
        });
        let primitive = is_primitive(g, n);
        if let Some(c) = &crossing {
            factor_found = true;
            claim(
                &mut claims,
                format!(
                    "circle of {} crosses horizontal edge ({}, {}) of the {} space once",
                    text(&image),
                    c.edge,
                    c.edge_vertex,
                    c.space
                ),
                true,
                Method::Pipeline,
            );
            agree &= claim(&mut claims, format!("⟨{}⟩ is a free factor", text(g)), primitive, Method::Whitehead);
        }
        roots.push(RootFinding {
            gamma: text(g),
            k: *k,
            image: text(&image),
            crossing,
            primitive,
        });
    }
    claim(&mut claims, "some root crosses an edge once", factor_found, Method::Pipeline);
    let verdict = sep.separable && edge_trees_built && edge_trees_minimized && factor_found && agree;
    let mut summary = vec![format!(
        "edge spaces: {}",
        if edge_trees_built && edge_trees_minimized { "trees" } else { "not all trees" }
    )];
    for r in &roots {
        summary.push(match (&r.crossing, r.primitive) {
            (Some(_), true) => format!("factor: ⟨{}⟩ primitive", r.gamma),
            (Some(_), false) => format!("factor: ⟨{}⟩ claimed but not primitive", r.gamma),
            (None, p) => format!("{}: no single crossing found ({})", r.gamma, if p { "primitive" } else { "not primitive" }),
        });
    }
    Ok(TheoremReport {
        base_images: base_images.iter().map(|w| text(w)).collect(),
        root_images: root_images.iter().map(|w| text(w)).collect(),
        searched,
        complexity: m.complexity,
        chi_equal: sep.chi_equal,
        separable: sep.separable,
        edge_trees_built,
        edge_trees_minimized,
        roots,
        claims,
        verdict,
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Factor {
    F1,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub edge: usize,
    /// 0 for the word in the source vertex group, 1 for the target.
    pub side: usize,
    pub word: String,
    /// The image in basis coordinates of `H`.
    pub coordinates: String,
    pub factor: Option<Factor>,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub classes: Vec<String>,
    /// `∼`-class of each conjugacy class above.
    pub class_of: Vec<usize>,
    pub complexity: Complexity,
    pub moves: Vec<MoveRecord>,
    pub cylinder: usize,
    pub circle: usize,
    pub circle_label: String,
    /// Generator of `Z` and of `F_1`, in the letters of the target group.
    pub z: String,
    pub f1: Vec<String>,
    /// The same, in basis coordinates of `H`.
    pub z_coordinates: String,
    pub f1_coordinates: Vec<String>,
    pub placements: Vec<Placement>,
    pub claims: Vec<Claim>,
    pub verdict: bool,
    pub summary: Vec<String>,
}

/// Conjugacy classes of the roots of the edge words and the `∼`-classes
/// the edges generate on them.
fn similarity_classes(d: &GraphOfFreeGroups) -> Result<(Vec<CyclicWord>, Vec<usize>, Vec<usize>), ReportError> {
    let mut classes: Vec<CyclicWord> = Vec::new();
    let mut ends = Vec::new();
    for e in &d.edges {
        let mut ids = [0; 2];
        for s in 0..2 {
            let (r, _) = root(&e.words[s]).map_err(|_| ReportError::Hypothesis("trivial edge word".into()))?;
            let c = CyclicWord::new(&r).expect("roots are nontrivial");
            ids[s] = match classes.iter().position(|x| *x == c) {
                Some(i) => i,
                None => {
                    classes.push(c);
                    classes.len() - 1
                }
            };
        }
        ends.push(ids);
    }
    let mut uf = UnionFind::new(classes.len());
    for [a, b] in &ends {
        uf.union(*a, *b);
    }
    let (lab, k) = uf.labels();
    let mut size = vec![0; k];
    for &l in &lab {
        size[l] += 1;
    }
    Ok((classes, lab, size))
}

/// Word-labelled loops of one component of the horizontal graph at `base`,
/// from a spanning tree grown first along `first`. Returns the non-tree
/// edges with their loops.
fn horizontal_loops(g: &Graph, labels: &[Vec<Letter>], base: usize, first: &[usize], skip: usize) -> Vec<(usize, Vec<Letter>)> {
    let (comp, _) = g.components();
    let mut uf = UnionFind::new(g.n_vertices);
    let mut tree = vec![false; g.n_edges()];
    let order = first.iter().copied().chain(0..g.n_edges());
    for e in order {
        let (a, b) = g.edges[e];
        if e != skip && comp[a] == comp[base] && uf.union(a, b) {
            tree[e] = true;
        }
    }
    let mut path: Vec<Option<Vec<Letter>>> = vec![None; g.n_vertices];
    path[base] = Some(Vec::new());
    let out = g.out_darts();
    let mut queue = std::collections::VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for &dd in &out[v] {
            let e = edge_of(dd);
            let w = g.head(dd);
            if tree[e] && path[w].is_none() {
                let l = if is_forward(dd) { labels[e].clone() } else { inverse(&labels[e]) };
                path[w] = Some(concat_reduce(path[v].as_ref().unwrap(), &l));
                queue.push_back(w);
            }
        }
    }
    (0..g.n_edges())
        .filter(|&e| !tree[e] && comp[g.edges[e].0] == comp[base])
        .map(|e| {
            let (a, b) = g.edges[e];
            let w = reduce(&[path[a].clone().unwrap(), labels[e].clone(), inverse(path[b].as_ref().unwrap())].concat());
            (e, w)
        })
        .collect()
}

/// Runs the free-splitting pipeline on a one-vertex graph of free groups
/// with HNN edges and checks the factorization it produces.
pub fn corollary_report(d: &GraphOfFreeGroups) -> Result<CorollaryReport, ReportError> {
    if d.ranks.len() != 1 || d.edges.iter().any(|e| e.kind != EdgeKind::Hnn) {
        return Err(ReportError::Hypothesis("expected one vertex group and HNN edges only".into()));
    }
    let n = d.ranks[0];
    let (classes, class_of, size) = similarity_classes(d)?;
    if let Some(i) = (0..classes.len()).find(|&i| size[class_of[i]] == 1) {
        return Err(ReportError::Hypothesis(format!("the class of {} is alone in its ∼-class", classes[i])));
    }
    let built: BuiltGos = build_gos(d).map_err(|e| match e {
        ConstructError::NotMaximal { .. } | ConstructError::NotSurjective(_) | ConstructError::NotEmbedding(_) | ConstructError::Relation(_) => {
            ReportError::Hypothesis(e.to_string())
        }
        e => ReportError::Construct(e),
    })?;
    let m = built.built.gos.minimize()?;
    let s = split_to_bad(&m.gos)?;
    let xb = &s.gos;
    let carry = m.carry.then(&s.carry);
    let cyl = Cylinders::build(xb);
    let h = &cyl.horizontal;
    let labels = xb.horizontal_labels(h).ok_or_else(|| ReportError::Pipeline("space lost its labels".into()))?;

    // a bad cylinder with an inessential boundary circle, and an edge of
    // that circle lying on no other circle
    let mut choice = None;
    'pick: for (ci, c) in cyl.cylinders.iter().enumerate() {
        if c.good {
            continue;
        }
        for &z in c.boundary.iter().filter(|z| !c.essential.contains(z)) {
            for &dz in &cyl.circles[z].darts {
                let e = edge_of(dz);
                let shared = cyl
                    .circles
                    .iter()
                    .enumerate()
                    .any(|(o, oc)| o != z && oc.darts.iter().any(|&x| edge_of(x) == e));
                if !shared {
                    choice = Some((ci, z, e));
                    break 'pick;
                }
            }
        }
    }
    let (cylinder, circle, eps) = choice.ok_or_else(|| ReportError::Pipeline("no bad cylinder with a usable inessential boundary circle".into()))?;

    let (v0, y0) = built.base_points[0];
    let (vb, yb) = carry.points[v0][y0];
    let twist = carry.twist[v0].clone();
    let base = h.vertex(vb, yb);
    let first: Vec<usize> = cyl.circles[circle].darts.iter().map(|&x| edge_of(x)).collect();
    let loops = horizontal_loops(&h.graph, &labels, base, &first, eps);
    // back to the original base point: g w g^-1
    let back = |w: &[Letter]| reduce(&[twist.clone(), w.to_vec(), inverse(&twist)].concat());
    let z_word = loops
        .iter()
        .find(|(e, _)| *e == eps)
        .map(|(_, w)| back(w))
        .expect("the skipped edge is not in the tree");
    let f1_words: Vec<Vec<Letter>> = loops.iter().filter(|(e, _)| *e != eps).map(|(_, w)| back(w)).collect();

    let mut claims = Vec::new();
    let h_images = &d.images[0];
    let hgraph = subgroup_graph(h_images);
    let mut gens = f1_words.clone();
    gens.push(z_word.clone());
    let ggraph = subgroup_graph(&gens);
    let same = gens.iter().all(|w| subgroup_contains(&hgraph, w)) && h_images.iter().all(|w| subgroup_contains(&ggraph, w));
    claim(
        &mut claims,
        "the loops of Γ(X_b) generate H after moving back to the base point",
        same,
        Method::Stallings,
    );
    if !same {
        return Err(ReportError::Pipeline("base point transport does not recover H".into()));
    }
    let circle_label = cyl.circle_label(xb, circle).unwrap_or_default();
    claim(
        &mut claims,
        "z is conjugate to the label of Z_b",
        CyclicWord::new(&z_word).ok() == CyclicWord::new(&circle_label).ok(),
        Method::Conjugacy,
    );

    // coordinates in a free basis of H
    let basis = subgroup_basis(&hgraph);
    let coords = |w: &[Letter]| rewrite_in_basis(&hgraph, &basis, w).expect("element of H");
    let z_c = coords(&z_word);
    let f1_c: Vec<Vec<Letter>> = f1_words.iter().map(|w| coords(w)).collect();
    let z_primitive = claim(&mut claims, "z is primitive", is_primitive(&z_c, n), Method::Whitehead);
    let mut all = f1_c.clone();
    all.push(z_c.clone());
    let generate = claim(&mut claims, "F_1 and z generate F", subgroup_is_whole(&all, n), Method::Stallings);
    let rank = claim(&mut claims, "rank F_1 + 1 = rank F", f1_c.len() + 1 == n, Method::Direct);
    let f1_graph = subgroup_graph(&f1_c);
    let z_class = CyclicWord::new(&z_c).ok();
    let mut placements = Vec::new();
    for (j, e) in d.edges.iter().enumerate() {
        for side in 0..2 {
            let c = coords(&d.image(0, &e.words[side]));
            let r = root(&c).ok().and_then(|(r, _)| CyclicWord::new(&r).ok());
            let (factor, method) = if r.is_some() && r == z_class {
                (Some(Factor::Z), Method::Conjugacy)
            } else if !circle_immersion(&cyclic_reduce(&c), &f1_graph.graph).is_empty() {
                (Some(Factor::F1), Method::CircuitImmersion)
            } else {
                (None, Method::CircuitImmersion)
            };
            placements.push(Placement {
                edge: j,
                side,
                word: text(&e.words[side]),
                coordinates: text(&c),
                factor,
                method,
            });
        }
    }
    let placed = claim(
        &mut claims,
        "every edge word is conjugate into F_1 or Z",
        placements.iter().all(|p| p.factor.is_some()),
        Method::CircuitImmersion,
    );
    let in_f1 = claim(
        &mut claims,
        "F_1 contains a conjugate of some edge word",
        placements.iter().any(|p| p.factor == Some(Factor::F1)),
        Method::CircuitImmersion,
    );
    claim(
        &mut claims,
        "Z contains a conjugate of some edge word",
        placements.iter().any(|p| p.factor == Some(Factor::Z)),
        Method::Conjugacy,
    );
    let verdict = z_primitive && generate && rank && placed && in_f1;
    let z_text = text(&z_word);
    let mut summary = vec![
        format!("bad cylinder {cylinder}; Z_b is circle {circle} reading {}", text(&circle_label)),
        format!("F = ⟨{}⟩ * ⟨{}⟩", f1_words.iter().map(|w| text(w)).collect::<Vec<_>>().join(", "), z_text),
    ];
    for p in &placements {
        let f = match p.factor {
            Some(Factor::F1) => "F_1",
            Some(Factor::Z) => "Z",
            None => "neither factor",
        };
        summary.push(format!("edge {} side {}: {} conjugate into {f}", p.edge, p.side, p.word));
    }
    Ok(CorollaryReport {
        classes: classes.iter().map(|c| c.to_string()).collect(),
        class_of,
        complexity: m.complexity,
        moves: s.trace,
        cylinder,
        circle,
        circle_label: text(&circle_label),
        z: z_text,
        f1: f1_words.iter().map(|w| text(w)).collect(),
        z_coordinates: text(&z_c),
        f1_coordinates: f1_c.iter().map(|w| text(w)).collect(),
        placements,
        claims,
        verdict,
        summary,
    })
}

#[cfg(test)]
mod tests;
