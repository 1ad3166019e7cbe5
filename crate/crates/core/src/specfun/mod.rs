//! Special functions used by the solvers and the verifier.
//!
//! Every function comes in two flavours: an extended-precision version
//! (MPFR floats with a caller-chosen significand, see [`Precision`]) used by
//! the verifier, and a plain `f64` version in [`fast`] used by the solvers
//! and the separation heuristics.

mod bessel;
mod decay;
pub mod fast;
mod jacobi;
mod omega;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bessel::{bessel_eval, bessel_zero_bracket, BesselBracket};
pub use decay::{jacobi_decay_index, DecayIndex, DecayQuery, DEFAULT_SUBINTERVALS};
pub use jacobi::{jacobi_eval, JacobiIter};
pub use omega::{omega_deriv, omega_deriv_bessel_form, omega_eval, OmegaEvaluator};

/// Significand length of the extended floating-point numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Precision {
    significand_bits: u32,
}

impl Precision {
    pub const MIN_BITS: u32 = 53;

    pub fn new(significand_bits: u32) -> Result<Self> {
        if significand_bits < Self::MIN_BITS {
            return Err(Error::InvalidParameter(format!(
                "precision must be at least {} bits, got {significand_bits}",
                Self::MIN_BITS
            )));
        }
        Ok(Precision { significand_bits })
    }

    pub fn bits(self) -> u32 {
        self.significand_bits
    }

    pub fn doubled(self) -> Self {
        Precision {
            significand_bits: 2 * self.significand_bits,
        }
    }

    /// Working precision with `extra` guard bits.
    pub(crate) fn guarded(self, extra: u32) -> u32 {
        self.significand_bits + extra
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            significand_bits: 128,
        }
    }
}

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64, prec: Precision) -> Result<Float> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    let mut g = Float::with_val(prec.guarded(8), x).gamma();
    g.set_prec(prec.bits());
    Ok(g)
}

/// Surface measure of the unit sphere S^{n-1}, 2π^{n/2}/Γ(n/2).
pub fn surface_measure(n: usize, prec: Precision) -> Result<Float> {
    if n < 1 {
        return Err(Error::UnsupportedDimension(n));
    }
    let bits = prec.guarded(8);
    let pi = Float::with_val(bits, Constant::Pi);
    let half_n = Float::with_val(bits, n) / 2u32;
    let num = Float::with_val(bits, pi.pow(&half_n)) * 2u32;
    let mut res = num / half_n.gamma();
    res.set_prec(prec.bits());
    Ok(res)
}

/// `f64` value of [`surface_measure`].
pub fn surface_measure_f64(n: usize) -> f64 {
    surface_measure(n.max(1), Precision::default())
        .map(|w| w.to_f64())
        .unwrap_or(f64::NAN)
}
