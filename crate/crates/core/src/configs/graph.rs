use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{distance, dot, PointConfig, Space};
use crate::error::{Error, Result};

pub const DEFAULT_MATCH_TOL: f64 = 1e-9;

/// Simple undirected graph on vertices 0..n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl FiniteGraph {
    /// Edges are normalized to (small, large), sorted and deduplicated.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("loop at vertex {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(FiniteGraph {
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn empty(n: usize) -> Self {
        FiniteGraph { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        FiniteGraph { n, edges }
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        FiniteGraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        FiniteGraph::new(10, outer.chain(spokes).chain(inner)).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn without_edge(&self, e: (usize, usize)) -> Self {
        let key = (e.0.min(e.1), e.0.max(e.1));
        FiniteGraph {
            n: self.n,
            edges: self.edges.iter().copied().filter(|&x| x != key).collect(),
        }
    }

    /// Relabel: vertex i becomes perm[i].
    pub fn permuted(&self, perm: &[usize]) -> Self {
        FiniteGraph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v]))).unwrap()
    }

    /// Subgraph induced by `verts`, relabelled in the given order.
    pub fn induced(&self, verts: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
            .map(|&(u, v)| (pos[u], pos[v]));
        FiniteGraph::new(verts.len(), edges).unwrap()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[..i].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    /// Text form: `n <vertices>` then one `u v` edge per line; `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match n {
                None => {
                    if toks.len() != 2 || toks[0] != "n" {
                        return Err(Error::parse(line_no, "expected `n <vertices>`"));
                    }
                    n = Some(toks[1].parse().map_err(|e| Error::parse(line_no, format!("{e}")))?);
                }
                Some(_) => {
                    if toks.len() != 2 {
                        return Err(Error::parse(line_no, "expected `u v`"));
                    }
                    let u: usize = toks[0].parse().map_err(|e| Error::parse(line_no, format!("{e}")))?;
                    let v: usize = toks[1].parse().map_err(|e| Error::parse(line_no, format!("{e}")))?;
                    edges.push((u, v));
                }
            }
        }
        let n = n.ok_or_else(|| Error::parse(0, "missing `n` header"))?;
        FiniteGraph::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

/// Pairs whose distance (euclidean tag) or inner product (sphere tag)
/// matches one of `forbidden` within `tol`.
pub fn distance_graph(cfg: &PointConfig, forbidden: &[f64], tol: f64) -> FiniteGraph {
    let pts = cfg.points();
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let v = match cfg.space() {
                Space::Sphere => dot(&pts[i], &pts[j]),
                Space::Euclidean => distance(&pts[i], &pts[j]),
            };
            if forbidden.iter().any(|f| (v - f).abs() <= tol) {
                edges.push((i, j));
            }
        }
    }
    FiniteGraph { n: pts.len(), edges }
}

/// Upper-triangle bit of the pair (i, j), i < j, for n ≤ 11.
fn bit(i: usize, j: usize) -> u64 {
    let (i, j) = (i.min(j), i.max(j));
    1u64 << (j * (j - 1) / 2 + i)
}

#[cfg(test)]
fn mask_of(g: &FiniteGraph) -> u64 {
    g.edges.iter().fold(0, |m, &(u, v)| m | bit(u, v))
}

fn from_mask(n: usize, mask: u64) -> FiniteGraph {
    let mut edges = Vec::new();
    for j in 1..n {
        for i in 0..j {
            if mask & bit(i, j) != 0 {
                edges.push((i, j));
            }
        }
    }
    FiniteGraph { n, edges }
}

/// Canonical form: smallest mask over relabellings that list vertices by
/// nonincreasing degree.
fn canonical(n: usize, mask: u64) -> u64 {
    let mut deg = vec![0usize; n];
    for j in 1..n {
        for i in 0..j {
            if mask & bit(i, j) != 0 {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]));
    // class boundaries of equal degree
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if deg[c[0]] == deg[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best = u64::MAX;
    let mut slots = Vec::with_capacity(n);
    search(&classes, 0, &mut slots, &mut vec![false; n], mask, &mut best);
    best
}

fn search(classes: &[Vec<usize>], ci: usize, slots: &mut Vec<usize>, used: &mut Vec<bool>, mask: u64, best: &mut u64) {
    if ci == classes.len() {
        // slots[new] = old
        let n = slots.len();
        let mut m = 0u64;
        for j in 1..n {
            for i in 0..j {
                if mask & bit(slots[i], slots[j]) != 0 {
                    m |= bit(i, j);
                }
            }
        }
        *best = (*best).min(m);
        return;
    }
    let class = &classes[ci];
    let start = slots.len();
    let filled = slots.len() - class_offset(classes, ci);
    if filled == class.len() {
        search(classes, ci + 1, slots, used, mask, best);
        return;
    }
    for &v in class {
        if !used[v] {
            used[v] = true;
            slots.push(v);
            search(classes, ci, slots, used, mask, best);
            slots.truncate(start);
            used[v] = false;
        }
    }
}

fn class_offset(classes: &[Vec<usize>], ci: usize) -> usize {
    classes[..ci].iter().map(Vec::len).sum()
}

/// All connected graphs on `n` vertices up to isomorphism (n ≤ 8),
/// in a deterministic order.
pub fn connected_graphs(n: usize) -> Vec<FiniteGraph> {
    assert!(n <= 8, "corpus generation is limited to 8 vertices");
    if n == 0 {
        return Vec::new();
    }
    let mut level: BTreeSet<u64> = BTreeSet::from([0u64]);
    for k in 1..n {
        // every connected graph has a vertex whose removal keeps it connected
        let mut next = BTreeSet::new();
        for &m in &level {
            for nb in 1u64..(1 << k) {
                let mut m2 = m;
                for i in 0..k {
                    if nb >> i & 1 == 1 {
                        m2 |= bit(i, k);
                    }
                }
                next.insert(canonical(k + 1, m2));
            }
        }
        level = next;
    }
    level.into_iter().map(|m| from_mask(n, m)).collect()
}
