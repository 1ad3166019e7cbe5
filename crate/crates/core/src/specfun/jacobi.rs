use rug::{Assign, Float};

use super::Precision;
use crate::error::{Error, Result};

/// Extended-precision iterator over P_0^n(t), P_1^n(t), ...
///
/// P_k^n is the Jacobi polynomial with parameters (α, α), α = (n - 3)/2,
/// normalized so that P_k^n(1) = 1. The values come from the three-term
/// recurrence
///
/// (k + n - 2) P_{k+1} = (2k + n - 2) t P_k - k P_{k-1}.
pub struct JacobiIter {
    n: u64,
    t: Float,
    k: u64,
    prev: Float,
    cur: Float,
    scratch: Float,
}

impl JacobiIter {
    pub fn new(n: usize, t: &Float, bits: u32) -> Self {
        let t = Float::with_val(bits, t);
        JacobiIter {
            n: n as u64,
            k: 0,
            prev: Float::with_val(bits, 0),
            cur: Float::with_val(bits, 1),
            scratch: Float::new(bits),
            t,
        }
    }

    /// Degree of the value `current` returns.
    pub fn degree(&self) -> u64 {
        self.k
    }

    pub fn current(&self) -> &Float {
        &self.cur
    }

    pub fn advance(&mut self) {
        if self.k == 0 {
            std::mem::swap(&mut self.prev, &mut self.cur);
            self.cur.assign(&self.t);
        } else {
            let k = self.k;
            self.scratch.assign(&self.t);
            self.scratch *= &self.cur;
            self.scratch *= 2 * k + self.n - 2;
            self.prev *= k;
            self.scratch -= &self.prev;
            self.scratch /= k + self.n - 2;
            std::mem::swap(&mut self.prev, &mut self.cur);
            std::mem::swap(&mut self.cur, &mut self.scratch);
        }
        self.k += 1;
    }
}

impl Iterator for JacobiIter {
    type Item = Float;

    fn next(&mut self) -> Option<Float> {
        let out = self.cur.clone();
        self.advance();
        Some(out)
    }
}

/// P_k^n(t) in extended precision.
pub fn jacobi_eval(n: usize, k: usize, t: f64, prec: Precision) -> Result<Float> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(t.abs() <= 1.0) {
        return Err(Error::Domain(format!("Jacobi argument must satisfy |t| <= 1, got {t}")));
    }
    let bits = prec.guarded(16);
    let tf = Float::with_val(bits, t);
    let mut it = JacobiIter::new(n, &tf, bits);
    for _ in 0..k {
        it.advance();
    }
    let mut out = it.current().clone();
    out.set_prec(prec.bits());
    Ok(out)
}
