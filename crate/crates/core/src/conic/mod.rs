//! Linear programs with one positive-semidefinite block, solved by
//! eigenvector cuts over a dense simplex, and the two dual programs built
//! on top of it.

mod duals;
pub mod eigen;
pub mod lp;

pub use duals::{
    solve_rn_dual, solve_sphere_dual, uniform_grid, DualCertificate, Z3_FLOOR, KernelCoeffs, RadialMeasure, RnDualSolution,
    SphereDualSolution,
};

use crate::error::{Error, Result};
use lp::Simplex;

pub const DEFAULT_TOL_PSD: f64 = 1e-10;
pub const DEFAULT_MAX_CUTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

#[derive(Clone, Debug)]
pub struct LinearRow {
    pub coef: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearRow {
    pub fn new(coef: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        LinearRow { coef, sense, rhs }
    }
}

/// Symmetric matrix M(x) whose entry (i, j), i ≤ j, is Σ coef · x[var].
#[derive(Clone, Debug)]
pub struct PsdBlock {
    dim: usize,
    entries: Vec<Vec<(usize, f64)>>,
    initial_cuts: Vec<Vec<f64>>,
}

impl PsdBlock {
    pub fn new(dim: usize) -> Self {
        PsdBlock {
            dim,
            entries: vec![Vec::new(); dim * (dim + 1) / 2],
            initial_cuts: Vec::new(),
        }
    }

    /// [[z1, -z2/2], [-z2/2, -z3]] with a few starting cuts.
    pub fn two_by_two(z1: usize, z2: usize, z3: usize) -> Self {
        let mut b = PsdBlock::new(2);
        b.add_term(0, 0, z1, 1.0);
        b.add_term(0, 1, z2, -0.5);
        b.add_term(1, 1, z3, -1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        b.initial_cuts = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![h, h], vec![h, -h]];
        b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = (i.min(j), i.max(j));
        i * self.dim - i * (i + 1) / 2 + j
    }

    pub fn add_term(&mut self, i: usize, j: usize, var: usize, coef: f64) {
        let s = self.slot(i, j);
        self.entries[s].push((var, coef));
    }

    pub fn with_initial_cuts(mut self, cuts: Vec<Vec<f64>>) -> Self {
        self.initial_cuts = cuts;
        self
    }

    /// Row-major M(x).
    pub fn matrix(&self, x: &[f64]) -> Vec<f64> {
        let m = self.dim;
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v: f64 = self.entries[self.slot(i, j)].iter().map(|&(k, c)| c * x[k]).sum();
                out[i * m + j] = v;
                out[j * m + i] = v;
            }
        }
        out
    }

    /// Coefficients of qᵀ M(x) q as a linear form in x.
    fn cut(&self, q: &[f64], nvars: usize) -> Vec<f64> {
        let mut row = vec![0.0; nvars];
        for i in 0..self.dim {
            for j in i..self.dim {
                let w = if i == j { q[i] * q[i] } else { 2.0 * q[i] * q[j] };
                for &(k, c) in &self.entries[self.slot(i, j)] {
                    row[k] += w * c;
                }
            }
        }
        row
    }

    pub fn min_eigenvalue(&self, x: &[f64]) -> f64 {
        let m = self.matrix(x);
        if self.dim == 2 {
            eigen::min_eigen_2x2(m[0], m[1], m[3]).0
        } else {
            eigen::symmetric_eigen(&m, self.dim).0[0]
        }
    }

    fn negative_directions(&self, x: &[f64], tol: f64) -> (f64, Vec<Vec<f64>>) {
        let m = self.matrix(x);
        if self.dim == 2 {
            let (lam, q) = eigen::min_eigen_2x2(m[0], m[1], m[3]);
            let dirs = if lam < -tol { vec![q.to_vec()] } else { Vec::new() };
            return (lam, dirs);
        }
        let (vals, vecs) = eigen::symmetric_eigen(&m, self.dim);
        let dirs = vals.iter().zip(vecs).filter(|(l, _)| **l < -tol).map(|(_, v)| v).collect();
        (vals[0], dirs)
    }
}

/// minimize objective·x over the rows, |x_i| ≤ bound, and M(x) ⪰ 0.
#[derive(Clone, Debug)]
pub struct ConicLp {
    pub objective: Vec<f64>,
    pub rows: Vec<LinearRow>,
    pub psd: Option<PsdBlock>,
    pub bound: f64,
    pub tol_psd: f64,
    pub max_cuts: usize,
}

impl ConicLp {
    pub fn new(objective: Vec<f64>) -> Self {
        ConicLp {
            objective,
            rows: Vec::new(),
            psd: None,
            bound: lp::DEFAULT_BOX,
            tol_psd: DEFAULT_TOL_PSD,
            max_cuts: DEFAULT_MAX_CUTS,
        }
    }

    pub fn row(&mut self, coef: Vec<f64>, sense: Sense, rhs: f64) -> &mut Self {
        self.rows.push(LinearRow::new(coef, sense, rhs));
        self
    }
}

#[derive(Clone, Debug)]
pub struct ConicSolution {
    pub x: Vec<f64>,
    /// One multiplier per input row: ≥ 0 for Ge and Le rows (the latter
    /// for the row read as ≤), signed for Eq rows.
    pub duals: Vec<f64>,
    /// Multiplier of every PSD cut with its direction.
    pub cut_duals: Vec<(Vec<f64>, f64)>,
    pub objective: f64,
    pub min_eigenvalue: f64,
    pub cuts: usize,
    pub at_box: Vec<usize>,
}

pub fn solve_conic_lp(p: &ConicLp) -> Result<ConicSolution> {
    let nvars = p.objective.len();
    if p.rows.iter().any(|r| r.coef.len() != nvars) {
        return Err(Error::InvalidParameter("row length differs from the number of variables".into()));
    }
    let mut s = Simplex::new(p.objective.clone(), p.bound);
    // (row index in simplex, sign) per input row; Eq rows use two
    let mut map: Vec<Vec<(usize, f64)>> = Vec::with_capacity(p.rows.len());
    for r in &p.rows {
        let neg: Vec<f64> = r.coef.iter().map(|c| -c).collect();
        let m = match r.sense {
            Sense::Ge => vec![(s.add_row(r.coef.clone(), r.rhs), 1.0)],
            Sense::Le => vec![(s.add_row(neg, -r.rhs), 1.0)],
            Sense::Eq => vec![(s.add_row(r.coef.clone(), r.rhs), 1.0), (s.add_row(neg, -r.rhs), -1.0)],
        };
        map.push(m);
    }
    let mut cut_rows: Vec<(usize, Vec<f64>)> = Vec::new();
    if let Some(block) = &p.psd {
        for q in &block.initial_cuts {
            cut_rows.push((s.add_row(block.cut(q, nvars), 0.0), q.clone()));
        }
    }
    let mut added = 0usize;
    loop {
        let sol = s.solve()?;
        let (lam, dirs) = match &p.psd {
            Some(block) => block.negative_directions(&sol.x, p.tol_psd),
            None => (0.0, Vec::new()),
        };
        if dirs.is_empty() {
            let duals = map
                .iter()
                .map(|m| m.iter().map(|&(j, sign)| sign * sol.duals[j]).sum())
                .collect();
            let cut_duals = cut_rows.iter().map(|(j, q)| (q.clone(), sol.duals[*j])).collect();
            return Ok(ConicSolution {
                objective: sol.objective,
                x: sol.x,
                duals,
                cut_duals,
                min_eigenvalue: if p.psd.is_some() { lam } else { f64::INFINITY },
                cuts: cut_rows.len(),
                at_box: sol.at_box,
            });
        }
        if added + dirs.len() > p.max_cuts {
            return Err(Error::CutCap(p.max_cuts));
        }
        let block = p.psd.as_ref().unwrap();
        for q in dirs {
            cut_rows.push((s.add_row(block.cut(&q, nvars), 0.0), q));
            added += 1;
        }
    }
}
