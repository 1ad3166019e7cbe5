//! Theta numbers of small finite graphs over the PSD and the doubly
//! nonnegative cones, and the completely positive witness built from an
//! independent set.

use std::fmt;
use std::str::FromStr;

use crate::conic::{solve_conic_lp, ConicLp, PsdBlock, Sense};
use crate::configs::FiniteGraph;
use crate::error::{Error, Result};

pub const MAX_THETA_VERTICES: usize = 12;
pub const THETA_TOL_PSD: f64 = 1e-8;
pub const THETA_MAX_CUTS: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaCone {
    Psd,
    /// PSD and entrywise nonnegative.
    PsdNn,
}

impl fmt::Display for ThetaCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaCone::Psd => "psd",
            ThetaCone::PsdNn => "psd_nn",
        })
    }
}

impl FromStr for ThetaCone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psd" => Ok(ThetaCone::Psd),
            "psd_nn" | "psdnn" | "dnn" => Ok(ThetaCone::PsdNn),
            other => Err(Error::InvalidParameter(format!("unknown cone {other:?}; use psd or psdnn"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ThetaResult {
    pub graph: FiniteGraph,
    pub cone: ThetaCone,
    /// ⟨J, A⟩ at the optimum of the cut relaxation.
    pub value: f64,
    /// Row-major optimal A.
    pub matrix: Vec<f64>,
    pub min_eigenvalue: f64,
    pub cuts: usize,
}

impl ThetaResult {
    pub fn size(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.size() + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.size()).map(|i| self.entry(i, i)).sum()
    }
}

/// max ⟨J, A⟩ subject to tr A = 1, A(x, y) = 0 on edges and A in the cone.
/// PSD membership is enforced by eigenvector cuts.
pub fn theta_finite(g: &FiniteGraph, cone: ThetaCone) -> Result<ThetaResult> {
    let m = g.vertex_count();
    if m == 0 {
        return Err(Error::InvalidParameter("graph has no vertices".into()));
    }
    if m > MAX_THETA_VERTICES {
        return Err(Error::Budget(format!("theta supports at most {MAX_THETA_VERTICES} vertices, got {m}")));
    }
    // one variable per diagonal entry and per non-edge pair
    let mut slots: Vec<(usize, usize)> = Vec::new();
    for i in 0..m {
        for j in i..m {
            if i == j || !g.has_edge(i, j) {
                slots.push((i, j));
            }
        }
    }
    let nv = slots.len();
    let objective = slots.iter().map(|&(i, j)| if i == j { -1.0 } else { -2.0 }).collect();
    let mut lp = ConicLp::new(objective);
    lp.row(slots.iter().map(|&(i, j)| if i == j { 1.0 } else { 0.0 }).collect(), Sense::Eq, 1.0);
    if cone == ThetaCone::PsdNn {
        for (k, &(i, j)) in slots.iter().enumerate() {
            if i != j {
                let mut row = vec![0.0; nv];
                row[k] = 1.0;
                lp.row(row, Sense::Ge, 0.0);
            }
        }
    }
    let mut block = PsdBlock::new(m);
    for (k, &(i, j)) in slots.iter().enumerate() {
        block.add_term(i, j, k, 1.0);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut cuts = Vec::new();
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        cuts.push(e);
        for j in 0..i {
            for s in [1.0, -1.0] {
                let mut q = vec![0.0; m];
                q[i] = h;
                q[j] = s * h;
                cuts.push(q);
            }
        }
    }
    lp.psd = Some(block.with_initial_cuts(cuts));
    // tr A = 1 and A ⪰ 0 give |A(x, y)| ≤ 1
    lp.bound = 4.0;
    lp.tol_psd = THETA_TOL_PSD;
    lp.max_cuts = THETA_MAX_CUTS;
    let sol = solve_conic_lp(&lp)?;
    let mut matrix = vec![0.0; m * m];
    for (k, &(i, j)) in slots.iter().enumerate() {
        matrix[i * m + j] = sol.x[k];
        matrix[j * m + i] = sol.x[k];
    }
    Ok(ThetaResult {
        graph: g.clone(),
        cone,
        value: -sol.objective,
        matrix,
        min_eigenvalue: sol.min_eigenvalue,
        cuts: sol.cuts,
    })
}

/// A = |I|⁻¹ χ_I χ_Iᵀ for an independent set I.
#[derive(Clone, Debug)]
pub struct CpWitness {
    pub size: usize,
    pub set: Vec<usize>,
    /// ⟨J, A⟩ = |I|²/|I|, computed in integers.
    pub objective: usize,
}

impl CpWitness {
    /// Value of every entry on I × I.
    pub fn scale(&self) -> f64 {
        1.0 / self.set.len() as f64
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if self.set.contains(&i) && self.set.contains(&j) {
            self.scale()
        } else {
            0.0
        }
    }

    pub fn matrix(&self) -> Vec<f64> {
        let m = self.size;
        (0..m * m).map(|k| self.entry(k / m, k % m)).collect()
    }

    /// The rank-one factor √(1/|I|) χ_I, nonnegative, so A is completely
    /// positive and hence lies in every cone considered here.
    pub fn factor(&self) -> Vec<f64> {
        let s = self.scale().sqrt();
        (0..self.size).map(|i| if self.set.contains(&i) { s } else { 0.0 }).collect()
    }
}

pub fn cp_witness(g: &FiniteGraph, set: &[usize]) -> Result<CpWitness> {
    let m = g.vertex_count();
    let mut set = set.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return Err(Error::InvalidParameter("independent set is empty".into()));
    }
    if let Some(&v) = set.iter().find(|&&v| v >= m) {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    if !g.is_independent(&set) {
        return Err(Error::InvalidParameter("vertex set is not independent".into()));
    }
    let k = set.len();
    Ok(CpWitness {
        size: m,
        set,
        objective: k * k / k,
    })
}
