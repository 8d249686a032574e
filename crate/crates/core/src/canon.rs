//! Canonical certificates for small vertex-coloured graphs by colour
//! refinement plus individualisation. Two graphs get equal certificates iff
//! they are isomorphic by a colour-preserving map.

#[derive(Clone, Debug, Default)]
pub struct ColoredGraph {
    pub colors: Vec<u32>,
    pub adj: Vec<Vec<usize>>,
}

impl ColoredGraph {
    pub fn add_node(&mut self, color: u32) -> usize {
        self.colors.push(color);
        self.adj.push(Vec::new());
        self.colors.len() - 1
    }

    pub fn link(&mut self, a: usize, b: usize) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }
}

fn refine(g: &ColoredGraph, mut colors: Vec<u32>) -> Vec<u32> {
    let n = colors.len();
    let mut start = Vec::with_capacity(n + 1);
    start.push(0);
    for v in 0..n {
        start.push(start[v] + g.adj[v].len());
    }
    let mut nb = vec![0u32; start[n]];
    let mut order: Vec<usize> = (0..n).collect();
    let mut classes = {
        let mut c = colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    loop {
        for v in 0..n {
            let row = &mut nb[start[v]..start[v + 1]];
            for (slot, &u) in row.iter_mut().zip(&g.adj[v]) {
                *slot = colors[u];
            }
            row.sort_unstable();
        }
        let sig = |v: usize| (colors[v], &nb[start[v]..start[v + 1]]);
        order.sort_unstable_by(|&a, &b| sig(a).cmp(&sig(b)));
        let mut next = vec![0u32; n];
        let mut k = 0u32;
        for i in 1..n {
            if sig(order[i]) != sig(order[i - 1]) {
                k += 1;
            }
            next[order[i]] = k;
        }
        colors = next;
        if k as usize + 1 == classes {
            return colors;
        }
        classes = k as usize + 1;
    }
}

fn leaf_certificate(g: &ColoredGraph, colors: &[u32]) -> Vec<u64> {
    let n = colors.len();
    let mut order = vec![0usize; n];
    for v in 0..n {
        order[colors[v] as usize] = v;
    }
    let mut cert = Vec::with_capacity(n + 2 * n);
    cert.push(n as u64);
    for &v in &order {
        cert.push(u64::from(g.colors[v]));
    }
    let mut edges = Vec::new();
    for v in 0..n {
        for &u in &g.adj[v] {
            let (a, b) = (colors[v] as u64, colors[u] as u64);
            if a <= b {
                edges.push((a << 32) | b);
            }
        }
    }
    edges.sort_unstable();
    cert.extend(edges);
    cert
}

struct Search<'a> {
    g: &'a ColoredGraph,
    best: Option<(Vec<u64>, Vec<u32>)>,
    /// Automorphisms found from pairs of leaves with equal certificates.
    autos: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&mut self, colors: Vec<u32>, path: &mut Vec<usize>) {
        let colors = refine(self.g, colors);
        let n = colors.len();
        let mut count = vec![0usize; n];
        for &c in &colors {
            count[c as usize] += 1;
        }
        let Some(target) = (0..n).find(|&c| count[c] > 1) else {
            let cert = leaf_certificate(self.g, &colors);
            match &self.best {
                Some((b, labels)) if cert == *b => {
                    let mut at = vec![0usize; n];
                    for v in 0..n {
                        at[labels[v] as usize] = v;
                    }
                    self.autos.push((0..n).map(|v| at[colors[v] as usize]).collect());
                }
                Some((b, _)) if cert > *b => {}
                _ => self.best = Some((cert, colors)),
            }
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for v in 0..n {
            if colors[v] as usize != target || self.in_orbit(v, &tried, path) {
                continue;
            }
            tried.push(v);
            let next: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(u, &c)| {
                    let c2 = 2 * c;
                    if c as usize == target && u != v {
                        c2 + 1
                    } else {
                        c2
                    }
                })
                .collect();
            path.push(v);
            self.run(next, path);
            path.pop();
        }
    }

    /// Whether `v` lies in the orbit of `tried` under the automorphisms
    /// found so far that fix `path` pointwise.
    fn in_orbit(&self, v: usize, tried: &[usize], path: &[usize]) -> bool {
        if tried.is_empty() {
            return false;
        }
        let gens: Vec<&Vec<usize>> = self.autos.iter().filter(|a| path.iter().all(|&p| a[p] == p)).collect();
        if gens.is_empty() {
            return false;
        }
        let mut orbit = tried.to_vec();
        let mut i = 0;
        while i < orbit.len() {
            let u = orbit[i];
            for a in &gens {
                let w = a[u];
                if w == v {
                    return true;
                }
                if !orbit.contains(&w) {
                    orbit.push(w);
                }
            }
            i += 1;
        }
        false
    }
}

pub fn certificate(g: &ColoredGraph) -> Vec<u64> {
    if g.colors.is_empty() {
        return vec![0];
    }
    let mut s = Search {
        g,
        best: None,
        autos: Vec::new(),
    };
    s.run(g.colors.clone(), &mut Vec::new());
    s.best.unwrap().0
}
