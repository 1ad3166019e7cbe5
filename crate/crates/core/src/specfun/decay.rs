use rug::float::{Constant, Round};
use rug::Float;
use serde::{Deserialize, Serialize};

use super::Precision;
use crate::error::{Error, Result};

pub const DEFAULT_SUBINTERVALS: usize = 4096;

const MAX_DEGREE: u64 = 1 << 40;

/// Points where |P_k^n| must eventually stay below `eta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayQuery {
    pub n: usize,
    pub points: Vec<f64>,
    pub eta: f64,
    pub subintervals: usize,
}

impl DecayQuery {
    pub fn new(n: usize, points: Vec<f64>, eta: f64) -> Result<Self> {
        let q = DecayQuery {
            n,
            points,
            eta,
            subintervals: DEFAULT_SUBINTERVALS,
        };
        q.check()?;
        Ok(q)
    }

    pub fn with_subintervals(mut self, m: usize) -> Self {
        self.subintervals = m;
        self
    }

    fn check(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::Domain(format!("eta must be positive, got {}", self.eta)));
        }
        if self.subintervals == 0 {
            return Err(Error::InvalidParameter("subintervals must be positive".into()));
        }
        for &t in &self.points {
            if !(t.abs() < 1.0) {
                return Err(Error::Domain(format!(
                    "decay points must lie in (-1, 1), got {t}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayIndex {
    pub k0: u64,
    /// Certified bound on max_t |P_{k0}^n(t)|, rounded up.
    pub bound_at_k0: f64,
    /// Same bound at k0 - 1 (absent when k0 = 0).
    pub bound_before: Option<f64>,
    /// The point with the largest |t|, which dominates the others.
    pub worst_point: f64,
    pub subintervals: usize,
}

/// Rectangle-rule over-estimate of
/// C_α ∫_0^{π/2} (1 - sin²θ cos²φ)^{k/2} dφ, with cos θ = t.
pub(crate) struct DecayBound {
    bits: u32,
    /// ln(1 - s² cos² φ_j), j = 1..M; nondecreasing in j.
    logs: Vec<Float>,
    /// C_α · (π/2)/M · (1 + 2^{-(p-8)})
    scale: Float,
    cutoff: Float,
    tiny: Float,
}

impl DecayBound {
    pub(crate) fn new(n: usize, t: f64, m: usize, prec: Precision) -> Self {
        let p = prec.bits();
        let wp = (p + 32).max(160);
        let s2 = Float::with_val(wp, 1) - Float::with_val(wp, t) * Float::with_val(wp, t);
        let pi = Float::with_val(wp, Constant::Pi);
        let logs = (1..=m)
            .map(|j| {
                let phi = Float::with_val(wp, &pi * j as u32) / (2 * m) as u32;
                let c = phi.cos();
                let base = Float::with_val(wp, 1) - Float::with_val(wp, &s2 * c.square());
                base.ln()
            })
            .collect();
        let alpha = (n as f64 - 3.0) / 2.0;
        let c_alpha = Float::with_val(wp, alpha + 1.0).gamma() * 2u32
            / (pi.clone().sqrt() * Float::with_val(wp, alpha + 0.5).gamma());
        let mut scale = c_alpha * Float::with_val(wp, &pi / 2u32) / m as u32;
        scale *= Float::with_val(wp, 1) + Float::with_val(wp, Float::i_exp(1, -(p as i32 - 8)));
        let cutoff = -Float::with_val(wp, Constant::Log2) * (p + 32);
        let tiny = cutoff.clone().exp();
        DecayBound {
            bits: wp,
            logs,
            scale,
            cutoff,
            tiny,
        }
    }

    pub(crate) fn eval(&self, k: u64) -> Float {
        let half_k = Float::with_val(self.bits, k) / 2u32;
        let mut sum = Float::with_val(self.bits, 0);
        // walk from the largest term down; once terms fall below the cutoff
        // the rest do too and are each bounded by e^{cutoff}
        for (i, l) in self.logs.iter().enumerate().rev() {
            let e = Float::with_val(self.bits, l * &half_k);
            if e < self.cutoff {
                sum += Float::with_val(self.bits, &self.tiny * (i + 1) as u32);
                break;
            }
            sum += e.exp();
        }
        sum * &self.scale
    }
}

fn round_up(x: &Float) -> f64 {
    x.to_f64_round(Round::Up)
}

/// Smallest k0 whose certified bound is at most η; the bound decreases in k,
/// so it then holds for every k ≥ k0 and every point of the query.
pub fn jacobi_decay_index(q: &DecayQuery, prec: Precision) -> Result<DecayIndex> {
    q.check()?;
    // the integrand grows with |t|, so the largest |t| dominates
    let worst = q
        .points
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0)
        .abs();
    let bound = DecayBound::new(q.n, worst, q.subintervals, prec);
    let eta = Float::with_val(bound.bits, q.eta);
    let ok = |k: u64| bound.eval(k) <= eta;

    if ok(0) {
        return Ok(DecayIndex {
            k0: 0,
            bound_at_k0: round_up(&bound.eval(0)),
            bound_before: None,
            worst_point: worst,
            subintervals: q.subintervals,
        });
    }
    // the j = M rectangle has height 1, so the bound never drops below scale
    if bound.scale >= eta {
        return Err(Error::Budget(format!(
            "eta = {} is below the rectangle-rule floor {:e}; use more subintervals",
            q.eta,
            bound.scale.to_f64()
        )));
    }
    let mut lo = 0u64;
    let mut hi = 1u64;
    while !ok(hi) {
        lo = hi;
        hi *= 2;
        if hi > MAX_DEGREE {
            return Err(Error::Budget(format!(
                "decay index exceeds {MAX_DEGREE} for eta = {}",
                q.eta
            )));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(DecayIndex {
        k0: hi,
        bound_at_k0: round_up(&bound.eval(hi)),
        bound_before: Some(round_up(&bound.eval(hi - 1))),
        worst_point: worst,
        subintervals: q.subintervals,
    })
}
