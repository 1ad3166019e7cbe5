//! Double-precision evaluation for the solvers and the separation search.
//!
//! Nothing here is used by the verifier.

use std::f64::consts::PI;

/// P_0^n(t), ..., P_d^n(t) written into `out` (length d + 1).
pub fn jacobi_fill(n: usize, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = t;
    }
    let nf = n as f64;
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + nf - 2.0) * t * out[k] - kf * out[k - 1]) / (kf + nf - 2.0);
    }
}

/// P_0^n(t), ..., P_d^n(t).
pub fn jacobi_table(n: usize, t: f64, d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d + 1];
    jacobi_fill(n, t, &mut v);
    v
}

/// Ω_n in double precision with the constants for one dimension cached.
#[derive(Clone, Debug)]
pub struct FastOmega {
    n: usize,
    nu: f64,
    gamma_half_n: f64,
    /// l with ν = l + 1/2 (odd n)
    half_int: Option<u32>,
    /// Hankel coefficients a_0..a_l for odd n
    hankel: Vec<f64>,
    series_limit: f64,
}

impl FastOmega {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Omega needs n >= 2");
        let nu = (n as f64 - 2.0) / 2.0;
        let half_int = if n % 2 == 1 { Some(((n - 3) / 2) as u32) } else { None };
        let mut hankel = Vec::new();
        if let Some(l) = half_int {
            let mu = 4.0 * nu * nu;
            let mut a = 1.0;
            hankel.push(a);
            for k in 1..=l as usize {
                let j = (2 * k - 1) as f64;
                a *= (mu - j * j) / (k as f64 * 8.0);
                hankel.push(a);
            }
        }
        let series_limit = match half_int {
            Some(l) => (l as f64 + 1.0).max(4.0),
            None => 4.0,
        };
        FastOmega {
            n,
            nu,
            gamma_half_n: libm::tgamma(n as f64 / 2.0),
            half_int,
            hankel,
            series_limit,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        if t <= self.series_limit {
            return self.series(t);
        }
        match self.half_int {
            Some(l) => self.closed_form(t, l),
            None => {
                let j = libm::jn(self.nu as i32, t);
                self.gamma_half_n * (2.0 / t).powi(self.nu as i32) * j
            }
        }
    }

    fn series(&self, t: f64) -> f64 {
        let x = -t * t / 4.0;
        let nf = self.n as f64;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut m = 1.0;
        loop {
            term *= x * 2.0 / (m * (2.0 * m - 2.0 + nf));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) && m > t / 2.0 {
                break;
            }
            m += 1.0;
        }
        sum
    }

    fn closed_form(&self, t: f64, l: u32) -> f64 {
        let inv = 1.0 / t;
        let (mut p, mut q) = (0.0, 0.0);
        let mut pw = 1.0;
        for (k, a) in self.hankel.iter().enumerate() {
            let term = a * pw;
            let sgn = if (k / 2) % 2 == 1 { -1.0 } else { 1.0 };
            if k % 2 == 0 {
                p += sgn * term;
            } else {
                q += sgn * term;
            }
            pw *= inv;
        }
        let (s, c) = t.sin_cos();
        let (cc, sc) = match (l + 1) % 4 {
            0 => (c, s),
            1 => (s, -c),
            2 => (-c, -s),
            _ => (-s, c),
        };
        let scale = self.gamma_half_n * 2f64.powi(l as i32 + 1) / (PI.sqrt() * t.powi(l as i32 + 1));
        scale * (p * cc - q * sc)
    }

    /// Ω'_n(t) = -(t/n) Ω_{n+2}(t); builds the n + 2 evaluator on each call.
    pub fn deriv_with(&self, up: &FastOmega, t: f64) -> f64 {
        debug_assert_eq!(up.n, self.n + 2);
        -(t / self.n as f64) * up.eval(t)
    }
}

/// One-shot Ω_n(t).
pub fn omega(n: usize, t: f64) -> f64 {
    FastOmega::new(n).eval(t)
}

/// Lookup table of a smooth function on [0, hi] with cubic Hermite
/// interpolation. Values outside the range are clamped to the end point.
#[derive(Clone, Debug)]
pub struct HermiteTable {
    h: f64,
    vals: Vec<f64>,
    ders: Vec<f64>,
}

impl HermiteTable {
    pub fn new(hi: f64, nodes: usize, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Self {
        assert!(nodes >= 2 && hi > 0.0);
        let h = hi / (nodes - 1) as f64;
        let xs = (0..nodes).map(|i| i as f64 * h);
        let vals = xs.clone().map(&f).collect();
        let ders = xs.map(&df).collect();
        HermiteTable { h, vals, ders }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let last = self.vals.len() - 1;
        let u = (x / self.h).max(0.0);
        let i = (u.floor() as usize).min(last - 1);
        let s = (u - i as f64).min(1.0);
        let (y0, y1) = (self.vals[i], self.vals[i + 1]);
        let (d0, d1) = (self.ders[i] * self.h, self.ders[i + 1] * self.h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1
    }
}
