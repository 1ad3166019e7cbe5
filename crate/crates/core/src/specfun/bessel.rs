use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::Precision;
use crate::error::{Error, Result};

/// Below this argument the power series is used for general orders.
pub(crate) fn series_boundary(nu: f64) -> f64 {
    (2.0 * nu).max(12.0)
}

/// `Some(l)` when ν = l + 1/2.
pub(crate) fn half_integer_index(nu: f64) -> Option<u32> {
    let twice = 2.0 * nu;
    if twice.fract() == 0.0 && twice >= 1.0 && (twice as u64) % 2 == 1 {
        Some(((twice as u64 - 1) / 2) as u32)
    } else {
        None
    }
}

/// Whether J_ν(t) is evaluated through the Hankel expansion rather than the
/// power series. For half-integer orders the expansion terminates and is
/// exact, so it takes over as soon as its cancellation is mild.
pub(crate) fn uses_hankel(nu: f64, t: f64) -> bool {
    match half_integer_index(nu) {
        Some(l) => t >= (l + 1) as f64,
        None => t > series_boundary(nu),
    }
}

/// Bits lost to cancellation when summing the power series at `t`.
pub(crate) fn series_guard_bits(t: f64) -> u32 {
    (std::f64::consts::LOG2_E * t).ceil() as u32 + 24
}

fn exp_below(x: &Float, limit: i64) -> bool {
    match x.get_exp() {
        None => true,
        Some(e) => (e as i64) < limit,
    }
}

/// J_ν(t) for ν ≥ 0, t ≥ 0, accurate to about `bits` bits (absolute, since
/// |J_ν| ≤ 1).
pub(crate) fn bessel_j(nu: f64, t: &Float, bits: u32) -> Float {
    if t.is_zero() {
        return Float::with_val(bits, if nu == 0.0 { 1 } else { 0 });
    }
    let tf = t.to_f64();
    if uses_hankel(nu, tf) {
        if let Some(v) = hankel(nu, t, bits) {
            return v;
        }
    }
    series(nu, t, bits)
}

fn series(nu: f64, t: &Float, bits: u32) -> Float {
    let tf = t.to_f64();
    let wp = bits + series_guard_bits(tf);
    let t = Float::with_val(wp, t);
    let nu_f = Float::with_val(wp, nu);
    let half_t = Float::with_val(wp, &t / 2u32);
    let prefactor = Float::with_val(wp, half_t.pow(&nu_f)) / Float::with_val(wp, &nu_f + 1u32).gamma();
    let x = -Float::with_val(wp, t.square_ref()) / 4u32;
    let mut term = Float::with_val(wp, 1);
    let mut sum = Float::with_val(wp, 1);
    let pre_exp = prefactor.get_exp().unwrap_or(0) as i64;
    let limit = -(bits as i64) - 8 - pre_exp;
    let mut m: u64 = 1;
    loop {
        term *= &x;
        term /= m;
        term /= Float::with_val(wp, &nu_f + m);
        sum += &term;
        if (m as f64) > tf / 2.0 && exp_below(&term, limit) {
            break;
        }
        m += 1;
    }
    let mut out = sum * prefactor;
    out.set_prec(bits);
    out
}

/// Hankel coefficients a_k(ν) = Π_{j=1..k} (4ν² - (2j-1)²) / (k! 8^k).
pub(crate) struct HankelTerms {
    mu: Float,
    a: Float,
    k: u64,
}

impl HankelTerms {
    pub(crate) fn new(nu: f64, bits: u32) -> Self {
        let nu_f = Float::with_val(bits, nu);
        HankelTerms {
            mu: Float::with_val(bits, nu_f.square_ref()) * 4u32,
            a: Float::with_val(bits, 1),
            k: 0,
        }
    }
}

impl Iterator for HankelTerms {
    type Item = Float;

    fn next(&mut self) -> Option<Float> {
        if self.k > 0 {
            let odd = 2 * self.k - 1;
            let factor = Float::with_val(self.mu.prec(), &self.mu - odd * odd);
            self.a *= factor;
            self.a /= 8 * self.k;
        }
        self.k += 1;
        Some(self.a.clone())
    }
}

/// P(t) and Q(t) of the Hankel expansion, or `None` when the asymptotic
/// series diverges before reaching the target accuracy.
pub(crate) fn hankel_pq(nu: f64, t: &Float, bits: u32) -> Option<(Float, Float)> {
    let wp = t.prec().max(bits);
    let inv_t = Float::with_val(wp, t.recip_ref());
    let mut p = Float::with_val(wp, 0);
    let mut q = Float::with_val(wp, 0);
    let mut power = Float::with_val(wp, 1);
    let mut last: Option<Float> = None;
    let limit = -(bits as i64) - 8;
    for (k, a) in HankelTerms::new(nu, wp).enumerate() {
        if k > 0 {
            power *= &inv_t;
        }
        let term = Float::with_val(wp, &a * &power);
        if term.is_zero() && k > 0 {
            return Some((p, q));
        }
        let negative = (k / 2) % 2 == 1;
        let target = if k % 2 == 0 { &mut p } else { &mut q };
        if negative {
            *target -= &term;
        } else {
            *target += &term;
        }
        if exp_below(&term, limit) {
            return Some((p, q));
        }
        if let Some(prev) = &last {
            if term.cmp_abs(prev) == Some(std::cmp::Ordering::Greater) && k > 2 {
                return None;
            }
        }
        if k > 20_000 {
            return None;
        }
        last = Some(term);
    }
    unreachable!("Hankel term iterator is infinite")
}

fn hankel(nu: f64, t: &Float, bits: u32) -> Option<Float> {
    let wp = bits + 32;
    let t = Float::with_val(wp, t);
    let (p, q) = hankel_pq(nu, &t, wp)?;
    let pi = Float::with_val(wp, Constant::Pi);
    let phase = Float::with_val(wp, &pi * (nu / 2.0 + 0.25));
    let chi = Float::with_val(wp, &t - &phase);
    let (sin, cos) = chi.sin_cos(Float::new(wp));
    let scale = (Float::with_val(wp, &pi * &t).recip() * 2u32).sqrt();
    let mut out = (p * cos - q * sin) * scale;
    out.set_prec(bits);
    Some(out)
}

/// J_ν(t) in extended precision.
pub fn bessel_eval(nu: f64, t: f64, prec: Precision) -> Result<Float> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!("Bessel order must be >= 0, got {nu}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be >= 0, got {t}")));
    }
    let mut v = bessel_j(nu, &Float::with_val(prec.guarded(8), t), prec.guarded(8));
    v.set_prec(prec.bits());
    Ok(v)
}

/// An interval [lo, hi] on which J_ν changes sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselBracket {
    pub lo: f64,
    pub hi: f64,
}

/// Brackets the rightmost sign change of J_ν in `[lo, hi]` to within `width`.
///
/// The scan walks left from `hi` in steps of at most 0.5, well below the
/// spacing of consecutive zeros, then bisects. Returns `None` when no sign
/// change is found.
pub fn bessel_zero_bracket(
    nu: f64,
    lo: f64,
    hi: f64,
    width: f64,
    prec: Precision,
) -> Result<Option<BesselBracket>> {
    if !(lo < hi) || !(lo >= 0.0) || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("bad bracket interval [{lo}, {hi}]")));
    }
    if !(width > 0.0) {
        return Err(Error::InvalidParameter(format!("bracket width must be positive, got {width}")));
    }
    if !(nu >= 0.0) {
        return Err(Error::Domain(format!("Bessel order must be >= 0, got {nu}")));
    }
    let bits = prec.guarded(8);
    let sign = |x: f64| -> i32 {
        let v = bessel_j(nu, &Float::with_val(bits, x), bits);
        if v.is_zero() {
            0
        } else if v.is_sign_negative() {
            -1
        } else {
            1
        }
    };

    let steps = ((hi - lo) / 0.5).ceil().max(1.0) as usize;
    let step = (hi - lo) / steps as f64;
    let mut b = hi;
    let mut sb = sign(b);
    let mut found = None;
    for i in 1..=steps {
        let a = if i == steps { lo } else { hi - i as f64 * step };
        let sa = sign(a);
        if sa * sb < 0 {
            found = Some((a, sa, b));
            break;
        }
        b = a;
        sb = sa;
    }
    let Some((mut a, sa, mut b)) = found else {
        return Ok(None);
    };
    while b - a > width {
        let mut mid = 0.5 * (a + b);
        let mut sm = sign(mid);
        if sm == 0 {
            // an exact zero at the midpoint; probe off-center instead
            mid = a + 0.375 * (b - a);
            sm = sign(mid);
        }
        if mid <= a || mid >= b || sm == 0 {
            break;
        }
        if sm == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Some(BesselBracket { lo: a, hi: b }))
}
