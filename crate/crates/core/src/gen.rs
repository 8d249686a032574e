//! Seeded random 2-covered graphs of spaces, built band first: pick the
//! band words, lay each side down as a cycle in one of a few graphs, glue
//! some cycle vertices together, fold, and build.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annuli::{self, AnnulusComplex, Band, Built, Lift};
use crate::graph::{stallings_fold, LabeledGraph, UnionFind};
use crate::words::{cyclic_reduce, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub max_rank: usize,
    pub max_bands: usize,
    /// Bound on the total length of both sides of all bands.
    pub max_letters: usize,
    pub max_graphs: usize,
    pub max_underlying_edges: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_rank: 3,
            max_bands: 3,
            max_letters: 12,
            max_graphs: 3,
            max_underlying_edges: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub seed: u64,
    pub complex: AnnulusComplex,
    pub built: Built,
}

pub fn random_cyclic_word<R: Rng>(rank: usize, len: usize, rng: &mut R) -> Vec<Letter> {
    loop {
        let mut w: Vec<Letter> = Vec::with_capacity(len);
        while w.len() < len {
            let l = rng.gen_range(1..=rank as Letter) * if rng.gen_bool(0.5) { 1 } else { -1 };
            if w.last() != Some(&-l) {
                w.push(l);
            }
        }
        if cyclic_reduce(&w).len() == len {
            return w;
        }
    }
}

/// One attempt; `None` when the build exceeds the size bounds.
fn attempt<R: Rng>(p: &GenParams, rng: &mut R) -> Option<AnnulusComplex> {
    let rank = rng.gen_range(1..=p.max_rank);
    let n_bands = rng.gen_range(1..=p.max_bands);
    let budget = p.max_letters / 2;
    if budget < n_bands {
        return None;
    }
    let mut lens = vec![1usize; n_bands];
    let extra = rng.gen_range(0..=budget - n_bands);
    for _ in 0..extra {
        let i = rng.gen_range(0..n_bands);
        lens[i] += 1;
    }
    let words: Vec<Vec<Letter>> = lens.iter().map(|&l| random_cyclic_word(rank, l, rng)).collect();
    let n_graphs = rng.gen_range(1..=p.max_graphs.min(2 * n_bands));
    // every graph gets at least one side
    let mut owner: Vec<usize> = (0..2 * n_bands).map(|_| rng.gen_range(0..n_graphs)).collect();
    let mut slots: Vec<usize> = (0..2 * n_bands).collect();
    slots.shuffle(rng);
    for (g, &s) in slots.iter().take(n_graphs).enumerate() {
        owner[s] = g;
    }
    // cycles laid down side by side in each raw graph
    let mut raw: Vec<LabeledGraph> = vec![LabeledGraph::default(); n_graphs];
    let mut cycles: Vec<(usize, Vec<usize>)> = Vec::new();
    for side in 0..2 * n_bands {
        let w = &words[side / 2];
        let g = &mut raw[owner[side]];
        let start = g.graph.n_vertices;
        for _ in 0..w.len() {
            g.graph.add_vertex();
        }
        let mut edges = Vec::new();
        for (i, &l) in w.iter().enumerate() {
            let a = start + i;
            let b = start + (i + 1) % w.len();
            edges.push(if l > 0 { g.add_edge(a, b, l) } else { g.add_edge(b, a, -l) });
        }
        cycles.push((owner[side], edges));
    }
    // glue: chain the cycles of a graph together, plus a few random merges
    let mut uf: Vec<UnionFind> = raw.iter().map(|g| UnionFind::new(g.graph.n_vertices)).collect();
    let mut firsts: Vec<Vec<usize>> = vec![Vec::new(); n_graphs];
    for (side, (g, edges)) in cycles.iter().enumerate() {
        let len = words[side / 2].len();
        let v = raw[*g].graph.edges[edges[rng.gen_range(0..len)]].0;
        if let Some(&u) = firsts[*g].choose(rng) {
            uf[*g].union(u, v);
        }
        firsts[*g].push(v);
    }
    for (g, r) in raw.iter().enumerate() {
        let n = r.graph.n_vertices;
        for _ in 0..rng.gen_range(0..=2) {
            uf[g].union(rng.gen_range(0..n), rng.gen_range(0..n));
        }
    }
    let mut glued: Vec<LabeledGraph> = Vec::new();
    for (g, r) in raw.iter().enumerate() {
        let (lab, k) = uf[g].labels();
        let mut h = LabeledGraph::default();
        for _ in 0..k {
            h.graph.add_vertex();
        }
        for (e, &(a, b)) in r.graph.edges.iter().enumerate() {
            h.add_edge(lab[a], lab[b], r.labels[e]);
        }
        glued.push(h);
    }
    let folded: Vec<_> = glued.iter().map(|g| stallings_fold(g, 0)).collect();
    let bands = (0..n_bands)
        .map(|b| {
            let lift = |side: usize| {
                let (g, edges) = &cycles[side];
                let w = &words[b];
                let darts = edges
                    .iter()
                    .zip(w)
                    .map(|(&e, &l)| {
                        let d = folded[*g].emap[e].expect("cycles survive folding");
                        if l > 0 {
                            d
                        } else {
                            d ^ 1
                        }
                    })
                    .collect();
                Lift { graph: *g, darts }
            };
            Band {
                word: words[b].clone(),
                minus: lift(2 * b),
                plus: lift(2 * b + 1),
            }
        })
        .collect();
    Some(AnnulusComplex {
        rank,
        graphs: folded.into_iter().map(|f| f.graph).collect(),
        bands,
    })
}

/// A random space for `seed`; identical seeds give identical spaces.
pub fn random_gos(seed: u64, p: &GenParams) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let Some(complex) = attempt(p, &mut rng) else { continue };
        let Ok(built) = annuli::build(&complex) else { continue };
        if built.gos.n_edges() > p.max_underlying_edges {
            continue;
        }
        return Generated { seed, complex, built };
    }
}
