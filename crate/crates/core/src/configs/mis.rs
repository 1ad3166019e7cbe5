//! Exact maximum independent sets: branch and bound on the complement
//! graph, with a greedy colouring bound (each colour class there is a
//! clique here).

use super::FiniteGraph;
use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 512;

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(words: usize) -> Self {
        Bits(vec![0; words])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }
}

struct Search {
    /// non-neighbours in the original graph, i.e. neighbours in the complement
    comp: Vec<Bits>,
    best: Vec<usize>,
    current: Vec<usize>,
}

impl Search {
    fn expand(&mut self, mut p: Bits) {
        // colour the candidates greedily; vertices of one colour are
        // pairwise adjacent in the original graph
        let mut order = Vec::new();
        let mut uncoloured = p.clone();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                q.clear(v);
                uncoloured.clear(v);
                q.and_not_assign(&self.comp[v]);
                order.push((v, colour));
            }
        }
        for &(v, c) in order.iter().rev() {
            if self.current.len() + c <= self.best.len() {
                return;
            }
            self.current.push(v);
            let np = p.and(&self.comp[v]);
            if np.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(np);
            }
            self.current.pop();
            p.clear(v);
        }
    }
}

/// A maximum independent set, sorted. Deterministic.
pub fn maximum_independent_set(g: &FiniteGraph) -> Result<Vec<usize>> {
    let n = g.vertex_count();
    if n > MAX_VERTICES {
        return Err(Error::Budget(format!(
            "independence number limited to {MAX_VERTICES} vertices, graph has {n}"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let adj = g.adjacency();
    // low-degree vertices first: they are the likeliest members
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (adj[v].len(), v));
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let words = n.div_ceil(64);
    let mut comp = Vec::with_capacity(n);
    for &v in &order {
        let mut b = Bits::zeros(words);
        for u in 0..n {
            b.set(u);
        }
        b.clear(pos[v]);
        for &u in &adj[v] {
            b.clear(pos[u]);
        }
        comp.push(b);
    }
    let mut all = Bits::zeros(words);
    for u in 0..n {
        all.set(u);
    }
    let mut s = Search {
        comp,
        best: Vec::new(),
        current: Vec::new(),
    };
    s.expand(all);
    let mut set: Vec<usize> = s.best.iter().map(|&i| order[i]).collect();
    set.sort_unstable();
    Ok(set)
}

pub fn independence_number(g: &FiniteGraph) -> Result<usize> {
    maximum_independent_set(g).map(|s| s.len())
}

/// True iff deleting any single edge raises the independence number.
pub fn is_alpha_critical(g: &FiniteGraph) -> Result<bool> {
    let alpha = independence_number(g)?;
    for &e in g.edges() {
        if independence_number(&g.without_edge(e))? <= alpha {
            return Ok(false);
        }
    }
    Ok(true)
}
