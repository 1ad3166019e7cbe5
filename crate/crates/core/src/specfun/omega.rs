use rug::{Assign, Float};

use super::bessel::{bessel_j, half_integer_index, hankel_pq, series_boundary, series_guard_bits, HankelTerms};
use super::Precision;
use crate::error::{Error, Result};

/// Evaluates Ω_n(t) = Γ(n/2) (2/t)^{(n-2)/2} J_{(n-2)/2}(t), Ω_n(0) = 1, at a
/// fixed precision, caching the constants that depend only on n.
pub struct OmegaEvaluator {
    n: usize,
    bits: u32,
    nu: f64,
    gamma_half_n: Float,
    /// Hankel coefficients when the order is a half-integer (finite list).
    hankel: Option<Vec<Float>>,
}

impl OmegaEvaluator {
    pub fn new(n: usize, prec: Precision) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension(n));
        }
        let bits = prec.bits();
        let wp = bits + 32;
        let nu = (n as f64 - 2.0) / 2.0;
        let gamma_half_n = Float::with_val(wp, n as f64 / 2.0).gamma();
        let hankel = half_integer_index(nu)
            .map(|l| HankelTerms::new(nu, wp).take(l as usize + 1).collect());
        Ok(OmegaEvaluator {
            n,
            bits,
            nu,
            gamma_half_n,
            hankel,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn precision_bits(&self) -> u32 {
        self.bits
    }

    pub fn eval_f64(&self, t: f64) -> Float {
        self.eval(&Float::with_val(self.bits + 8, t))
    }

    /// Ω_n(t) for t ≥ 0 (t < 0 is treated as |t|, Ω_n being even).
    pub fn eval(&self, t: &Float) -> Float {
        if t.is_zero() {
            return Float::with_val(self.bits, 1);
        }
        let t = Float::with_val(t.prec(), t.abs_ref());
        let tf = t.to_f64();
        match (&self.hankel, half_integer_index(self.nu)) {
            (Some(coeffs), Some(l)) if tf >= (l + 1) as f64 => self.closed_form(&t, l, coeffs),
            (None, _) if tf > series_boundary(self.nu) => {
                self.hankel_form(&t).unwrap_or_else(|| self.series(&t))
            }
            _ => self.series(&t),
        }
    }

    /// Σ_m Γ(n/2) (-t²/4)^m / (m! Γ(m + n/2)); no (2/t)-power cancellation.
    fn series(&self, t: &Float) -> Float {
        let tf = t.to_f64();
        let wp = self.bits + series_guard_bits(tf) + 8;
        let x = -Float::with_val(wp, t.square_ref()) / 4u32;
        let mut term = Float::with_val(wp, 1);
        let mut sum = Float::with_val(wp, 1);
        let limit = -(self.bits as i64) - 10;
        let n = self.n as u64;
        let mut m: u64 = 1;
        loop {
            // (m + n/2 - 1) = (2m + n - 2)/2
            term *= &x;
            term *= 2u32;
            term /= m * (2 * m + n - 2);
            sum += &term;
            if (m as f64) > tf / 2.0 {
                let small = term.get_exp().map_or(true, |e| (e as i64) < limit);
                if small {
                    break;
                }
            }
            m += 1;
        }
        sum.set_prec(self.bits);
        sum
    }

    /// Exact terminating form for half-integer orders ν = l + 1/2.
    fn closed_form(&self, t: &Float, l: u32, coeffs: &[Float]) -> Float {
        let wp = self.bits + 16 + 4 * l;
        let t = Float::with_val(wp, t);
        let inv_t = Float::with_val(wp, t.recip_ref());
        let mut p = Float::with_val(wp, 0);
        let mut q = Float::with_val(wp, 0);
        let mut power = Float::with_val(wp, 1);
        for (k, a) in coeffs.iter().enumerate() {
            if k > 0 {
                power *= &inv_t;
            }
            let term = Float::with_val(wp, a * &power);
            let negative = (k / 2) % 2 == 1;
            let target = if k % 2 == 0 { &mut p } else { &mut q };
            if negative {
                *target -= &term;
            } else {
                *target += &term;
            }
        }
        // χ = t - (l + 1)π/2: rotate (cos t, sin t) by quarter turns
        let (sin_t, cos_t) = t.clone().sin_cos(Float::new(wp));
        let (cos_chi, sin_chi) = match (l + 1) % 4 {
            0 => (cos_t, sin_t),
            1 => (sin_t, -cos_t),
            2 => (-cos_t, -sin_t),
            _ => (-sin_t, cos_t),
        };
        let osc = p * cos_chi - q * sin_chi;
        // Γ(n/2) (2/t)^{l+1/2} sqrt(2/(π t)) = Γ(n/2) 2^{l+1} / (sqrt(π) t^{l+1})
        let mut scale = Float::with_val(wp, &self.gamma_half_n);
        scale <<= l + 1;
        let mut tpow = Float::with_val(wp, 1);
        for _ in 0..=l {
            tpow *= &t;
        }
        let sqrt_pi = Float::with_val(wp, rug::float::Constant::Pi).sqrt();
        scale /= tpow * sqrt_pi;
        let mut out = osc * scale;
        out.set_prec(self.bits);
        out
    }

    fn hankel_form(&self, t: &Float) -> Option<Float> {
        let wp = self.bits + 32;
        let t = Float::with_val(wp, t);
        // probe convergence first; the full J_ν evaluation repeats the work
        hankel_pq(self.nu, &t, wp)?;
        let j = bessel_j(self.nu, &t, wp);
        let mut out = Float::with_val(wp, &self.gamma_half_n) * j;
        out *= two_over_t_pow(&t, self.nu, wp);
        out.set_prec(self.bits);
        Some(out)
    }
}

/// (2/t)^ν for ν with 2ν integral.
fn two_over_t_pow(t: &Float, nu: f64, wp: u32) -> Float {
    let twice = (2.0 * nu).round() as u32;
    let base = Float::with_val(wp, t.recip_ref()) * 2u32;
    let mut acc = Float::with_val(wp, 1);
    for _ in 0..twice {
        acc *= &base;
    }
    if twice % 2 == 0 {
        let mut r = Float::with_val(wp, 1);
        for _ in 0..twice / 2 {
            r *= &base;
        }
        r
    } else {
        acc.sqrt()
    }
}

/// Ω_n(t) in extended precision.
pub fn omega_eval(n: usize, t: f64, prec: Precision) -> Result<Float> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("Omega argument must be >= 0, got {t}")));
    }
    let ev = OmegaEvaluator::new(n, prec)?;
    Ok(ev.eval_f64(t))
}

/// Ω'_n(t) = -(t/n) Ω_{n+2}(t).
pub fn omega_deriv(n: usize, t: f64, prec: Precision) -> Result<Float> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let up = omega_eval(n + 2, t, prec)?;
    let mut out = Float::with_val(prec.guarded(8), t) * up;
    out /= n as u32;
    let mut neg = Float::new(prec.bits());
    neg.assign(-out);
    Ok(neg)
}

/// Ω'_n(t) = -Γ(n/2) (2/t)^{(n-2)/2} J_{n/2}(t), the Bessel form of the
/// derivative, kept separate from [`omega_deriv`] for cross-checking.
pub fn omega_deriv_bessel_form(n: usize, t: f64, prec: Precision) -> Result<Float> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("Omega argument must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(Float::with_val(prec.bits(), 0));
    }
    let wp = prec.guarded(32);
    let tf = Float::with_val(wp, t);
    let nu = (n as f64 - 2.0) / 2.0;
    let j = bessel_j(n as f64 / 2.0, &tf, wp);
    let g = Float::with_val(wp, n as f64 / 2.0).gamma();
    let mut out = -(g * j * two_over_t_pow(&tf, nu, wp));
    out.set_prec(prec.bits());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn omega_at_origin_is_one() {
        for n in 2..12 {
            assert_eq!(omega_eval(n, 0.0, p()).unwrap(), 1);
        }
    }

    #[test]
    fn omega_two_is_j0() {
        for &t in &[0.1, 1.0, 7.3, 12.0, 13.0, 25.0, 70.0] {
            let o = omega_eval(2, t, p()).unwrap();
            let j = Float::with_val(160, t).j0();
            assert!(Float::with_val(128, &o - &j).abs() < 1e-34, "t={t}");
        }
    }

    #[test]
    fn omega_three_is_sinc() {
        let v = omega_eval(3, std::f64::consts::PI, p()).unwrap();
        assert!(v.abs() < 1e-10);
        for &t in &[0.2, 0.999, 1.0, 3.0, 11.0, 40.0] {
            let v = omega_eval(3, t, p()).unwrap().to_f64();
            assert!((v - t.sin() / t).abs() < 1e-15, "t={t}");
        }
    }

    #[test]
    fn omega_five_closed_form() {
        // Ω_5(t) = 3 (sin t - t cos t) / t³
        for &t in &[0.5, 1.9, 2.0, 2.1, 9.0, 30.0] {
            let v = omega_eval(5, t, p()).unwrap().to_f64();
            let e = 3.0 * (t.sin() - t * t.cos()) / (t * t * t);
            assert!((v - e).abs() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn omega_regimes_agree() {
        // series vs closed form on both sides of each switch point
        for n in [3usize, 5, 7, 9] {
            let ev = OmegaEvaluator::new(n, p()).unwrap();
            let l = (n - 3) / 2;
            for &t in &[(l + 1) as f64, (l + 1) as f64 + 0.3, 12.5] {
                let tt = Float::with_val(160, t);
                let a = ev.series(&tt);
                let b = ev.eval(&tt);
                let d = Float::with_val(128, &a - &b).abs();
                assert!(d < Float::with_val(64, Float::i_exp(1, -118)), "n={n} t={t} d={d}");
            }
        }
    }

    #[test]
    fn derivative_forms_agree() {
        let a = omega_deriv(4, 1.7, p()).unwrap();
        let b = omega_deriv_bessel_form(4, 1.7, p()).unwrap();
        assert!(Float::with_val(128, &a - &b).abs() < 1e-20);
        for n in 2..8 {
            for &t in &[0.3, 5.0, 17.0, 42.0] {
                let a = omega_deriv(n, t, p()).unwrap();
                let b = omega_deriv_bessel_form(n, t, p()).unwrap();
                assert!(Float::with_val(128, &a - &b).abs() < 1e-30, "n={n} t={t}");
            }
        }
        assert_eq!(omega_deriv(5, 0.0, p()).unwrap(), 0);
    }
}
