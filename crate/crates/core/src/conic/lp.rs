//! Dense revised simplex.
//!
//! The problem
//!
//!   minimize cᵀx  subject to  G x ≥ h,  -B ≤ x ≤ B
//!
//! is solved through its dual, max hᵀu over Gᵀu = c, u ≥ 0 (box rows
//! included). Box columns chosen by the sign of c give a feasible starting
//! basis, the simplex multipliers of an optimal basis are the optimal x,
//! and rows appended later enter as new columns of the dual, so a solve can
//! be resumed after adding cuts.

use crate::error::{Error, Result};

pub const DEFAULT_BOX: f64 = 1e6;

const PRICE_TOL: f64 = 1e-13;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;
/// Degenerate pivots in a row before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Multiplier of every row (zero for nonbasic rows).
    pub duals: Vec<f64>,
    pub objective: f64,
    /// Variables within 1e-6 relative of the box.
    pub at_box: Vec<usize>,
    pub pivots: usize,
}

/// Rows `G x ≥ h` over `n` variables; grows by [`Simplex::add_row`].
pub struct Simplex {
    n: usize,
    c: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    bound: f64,
    /// Column ids of the basis; ids ≥ rows.len() encode box columns.
    basis: Vec<Col>,
    binv: Vec<f64>,
    ub: Vec<f64>,
    since_refactor: usize,
    pivots: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Col {
    Row(usize),
    /// +e_i (x_i ≥ -B) when `true`, -e_i (-x_i ≥ -B) otherwise
    Box(usize, bool),
}

impl Simplex {
    pub fn new(c: Vec<f64>, bound: f64) -> Self {
        let n = c.len();
        let basis = c.iter().enumerate().map(|(i, &ci)| Col::Box(i, ci >= 0.0)).collect();
        let mut s = Simplex {
            n,
            c,
            rows: Vec::new(),
            rhs: Vec::new(),
            bound,
            basis,
            binv: vec![0.0; n * n],
            ub: vec![0.0; n],
            since_refactor: 0,
            pivots: 0,
        };
        s.refactor().expect("box basis is nonsingular");
        s
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Append `row · x ≥ rhs`; returns its index.
    pub fn add_row(&mut self, row: Vec<f64>, rhs: f64) -> usize {
        assert_eq!(row.len(), self.n);
        self.rows.push(row);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    fn column(&self, col: Col, out: &mut [f64]) {
        match col {
            Col::Row(j) => out.copy_from_slice(&self.rows[j]),
            Col::Box(i, plus) => {
                out.iter_mut().for_each(|x| *x = 0.0);
                out[i] = if plus { 1.0 } else { -1.0 };
            }
        }
    }

    fn cost(&self, col: Col) -> f64 {
        match col {
            Col::Row(j) => self.rhs[j],
            Col::Box(..) => -self.bound,
        }
    }

    fn refactor(&mut self) -> Result<()> {
        let n = self.n;
        // Gauss-Jordan on [B | I]
        let mut a = vec![0.0; n * n];
        let mut col = vec![0.0; n];
        for (k, &bc) in self.basis.iter().enumerate() {
            self.column(bc, &mut col);
            for i in 0..n {
                a[i * n + k] = col[i];
            }
        }
        let mut inv = vec![0.0; n * n];
        for i in 0..n {
            inv[i * n + i] = 1.0;
        }
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            if a[p * n + k].abs() < 1e-14 {
                return Err(Error::Budget("singular basis during refactorization".into()));
            }
            if p != k {
                for j in 0..n {
                    a.swap(p * n + j, k * n + j);
                    inv.swap(p * n + j, k * n + j);
                }
            }
            let d = a[k * n + k];
            for j in 0..n {
                a[k * n + j] /= d;
                inv[k * n + j] /= d;
            }
            for i in 0..n {
                if i != k {
                    let f = a[i * n + k];
                    if f != 0.0 {
                        for j in 0..n {
                            a[i * n + j] -= f * a[k * n + j];
                            inv[i * n + j] -= f * inv[k * n + j];
                        }
                    }
                }
            }
        }
        // rows of B⁻¹ correspond to basis positions
        self.binv = inv;
        for i in 0..n {
            let v: f64 = (0..n).map(|k| self.binv[i * n + k] * self.c[k]).sum();
            self.ub[i] = if v < 0.0 && v > -1e-12 { 0.0 } else { v };
        }
        self.since_refactor = 0;
        Ok(())
    }

    fn multipliers(&self) -> Vec<f64> {
        let n = self.n;
        let mut pi = vec![0.0; n];
        for (i, &bc) in self.basis.iter().enumerate() {
            let h = self.cost(bc);
            if h != 0.0 {
                for k in 0..n {
                    pi[k] += h * self.binv[i * n + k];
                }
            }
        }
        pi
    }

    fn nonbasic(&self) -> Vec<Col> {
        let mut basic = vec![false; self.rows.len()];
        let mut bbox = vec![[false; 2]; self.n];
        for &b in &self.basis {
            match b {
                Col::Row(j) => basic[j] = true,
                Col::Box(i, p) => bbox[i][p as usize] = true,
            }
        }
        let mut out: Vec<Col> = (0..self.rows.len()).filter(|&j| !basic[j]).map(Col::Row).collect();
        for i in 0..self.n {
            for p in [false, true] {
                if !bbox[i][p as usize] {
                    out.push(Col::Box(i, p));
                }
            }
        }
        out
    }

    fn reduced_cost(&self, pi: &[f64], col: Col) -> f64 {
        match col {
            Col::Row(j) => self.rhs[j] - self.rows[j].iter().zip(pi).map(|(a, p)| a * p).sum::<f64>(),
            Col::Box(i, plus) => -self.bound - if plus { pi[i] } else { -pi[i] },
        }
    }

    /// Run to optimality from the current basis.
    pub fn solve(&mut self) -> Result<LpSolution> {
        let n = self.n;
        let cap = 200 * (self.rows.len() + 2 * n) + 10_000;
        let mut degenerate_run = 0usize;
        let mut w = vec![0.0; n];
        let mut col = vec![0.0; n];
        for _ in 0..cap {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let pi = self.multipliers();
            let scale = 1.0 + pi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
            let bland = degenerate_run >= DEGENERATE_LIMIT;
            let mut entering: Option<(Col, f64)> = None;
            for c in self.nonbasic() {
                let d = self.reduced_cost(&pi, c);
                if d > PRICE_TOL * scale {
                    let better = match entering {
                        None => true,
                        Some((_, best)) => !bland && d > best,
                    };
                    if better {
                        entering = Some((c, d));
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(self.finish(pi));
            };
            self.column(q, &mut col);
            for i in 0..n {
                w[i] = (0..n).map(|k| self.binv[i * n + k] * col[k]).sum();
            }
            // ratio test; ties go to the largest pivot, then the smallest id
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..n {
                if w[i] > PIVOT_TOL {
                    let ratio = self.ub[i].max(0.0) / w[i];
                    let take = match leave {
                        None => true,
                        Some((r, best)) => {
                            if ratio < best - 1e-12 {
                                true
                            } else if ratio <= best + 1e-12 {
                                if bland {
                                    self.basis[i] < self.basis[r]
                                } else {
                                    w[i] > w[r]
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if take {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, theta)) = leave else {
                return Err(Error::Infeasible);
            };
            if theta <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            for i in 0..n {
                if i != r {
                    self.ub[i] -= theta * w[i];
                    if self.ub[i] < 0.0 && self.ub[i] > -1e-12 {
                        self.ub[i] = 0.0;
                    }
                }
            }
            self.ub[r] = theta;
            let wr = w[r];
            for k in 0..n {
                self.binv[r * n + k] /= wr;
            }
            for i in 0..n {
                if i != r && w[i] != 0.0 {
                    let f = w[i];
                    for k in 0..n {
                        self.binv[i * n + k] -= f * self.binv[r * n + k];
                    }
                }
            }
            self.basis[r] = q;
            self.since_refactor += 1;
            self.pivots += 1;
        }
        Err(Error::Budget(format!("simplex exceeded {cap} pivots")))
    }

    fn finish(&mut self, x: Vec<f64>) -> LpSolution {
        let mut duals = vec![0.0; self.rows.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            if let Col::Row(j) = b {
                duals[j] = self.ub[i].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        let at_box = x
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() >= self.bound * (1.0 - 1e-6))
            .map(|(i, _)| i)
            .collect();
        LpSolution {
            x,
            duals,
            objective,
            at_box,
            pivots: self.pivots,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound() {
        let mut s = Simplex::new(vec![1.0], DEFAULT_BOX);
        s.add_row(vec![1.0], 3.0);
        let sol = s.solve().unwrap();
        assert!((sol.x[0] - 3.0).abs() < 1e-12);
        assert!((sol.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_lp_with_known_optimum() {
        // min -x - y  s.t.  x + 2y ≤ 4, 3x + y ≤ 6, x, y ≥ 0 → (8/5, 6/5)
        let mut s = Simplex::new(vec![-1.0, -1.0], DEFAULT_BOX);
        s.add_row(vec![-1.0, -2.0], -4.0);
        s.add_row(vec![-3.0, -1.0], -6.0);
        s.add_row(vec![1.0, 0.0], 0.0);
        s.add_row(vec![0.0, 1.0], 0.0);
        let sol = s.solve().unwrap();
        assert!((sol.x[0] - 1.6).abs() < 1e-12 && (sol.x[1] - 1.2).abs() < 1e-12);
        assert!((sol.objective + 2.8).abs() < 1e-12);
        // dual objective equals the primal one
        let dual: f64 = [-4.0, -6.0, 0.0, 0.0].iter().zip(&sol.duals).map(|(h, u)| h * u).sum();
        assert!((dual - sol.objective).abs() < 1e-12);
    }

    #[test]
    fn warm_start_after_new_row() {
        let mut s = Simplex::new(vec![1.0, 1.0], DEFAULT_BOX);
        s.add_row(vec![1.0, 1.0], 1.0);
        s.add_row(vec![1.0, 0.0], 0.0);
        s.add_row(vec![0.0, 1.0], 0.0);
        assert!((s.solve().unwrap().objective - 1.0).abs() < 1e-12);
        s.add_row(vec![1.0, 0.0], 2.0);
        let sol = s.solve().unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_detected() {
        let mut s = Simplex::new(vec![1.0], DEFAULT_BOX);
        s.add_row(vec![1.0], 3.0);
        s.add_row(vec![-1.0], -1.0);
        assert!(matches!(s.solve(), Err(Error::Infeasible)));
    }

    #[test]
    fn unbounded_direction_hits_the_box() {
        let mut s = Simplex::new(vec![-1.0], 1e3);
        s.add_row(vec![1.0], 0.0);
        let sol = s.solve().unwrap();
        assert_eq!(sol.at_box, vec![0]);
        assert!((sol.x[0] - 1e3).abs() < 1e-9);
    }
}
