//! Rigorous verification and repair of dual certificates.
//!
//! Every quantity that decides feasibility is evaluated in extended
//! precision. Constraints that cannot be scanned one by one are handled by
//! a tail argument: on the sphere the Jacobi polynomials eventually stay
//! below a computed η on every support point, in R^n the function Ω_n stays
//! below its value at the last Bessel zero before L. Violations found in the
//! scanned part are absorbed by raising z2, and z1 is then raised to keep
//! the 2×2 block exactly positive semidefinite.

use rug::float::Round;
use rug::ops::AddAssignRound;
use rug::Float;

use crate::conic::DualCertificate;
use crate::configs::Space;
use crate::error::{Error, Rejection, Result};
use crate::specfun::{
    bessel_zero_bracket, gamma_fn, jacobi_decay_index, surface_measure, BesselBracket, DecayQuery, JacobiIter,
    OmegaEvaluator, Precision, DEFAULT_SUBINTERVALS,
};

pub const DEFAULT_SLACK: f64 = 0.99;
pub const DEFAULT_GRID_ACCURACY: f64 = 1e-5;
/// Largest k0 for which the sphere scan is attempted.
pub const MAX_SCAN_DEGREE: u64 = 20_000_000;
/// Margins kept in the sphere plan.
const STORED_MARGINS: usize = 1 << 16;
/// Largest rectangle count tried when η is small.
const MAX_SUBINTERVALS: usize = 1 << 22;
const BRACKET_WIDTH: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SphereVerifyPlan {
    pub slack: f64,
    pub xi0: f64,
    pub xi1: f64,
    pub eta: f64,
    /// cos θ and the interior support values.
    pub s: Vec<f64>,
    pub k0: u64,
    pub decay_bound: f64,
    pub subintervals: usize,
    /// Margins of constraints k = 0..min(k0, 65536) (k = 0 includes z3).
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub worst_k: u64,
    /// Amount by which the worst scanned constraint must be lifted.
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChunkScan {
    pub a: f64,
    pub derivative_bound: f64,
    pub spacing: f64,
    pub points: usize,
    pub min_grid_margin: f64,
    pub lower_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RnVerifyPlan {
    pub slack: f64,
    pub w: f64,
    pub l: f64,
    pub bracket: BesselBracket,
    pub theta_tail: f64,
    pub tail_lhs: f64,
    pub tail_rhs: f64,
    pub r0: f64,
    pub grid_accuracy: f64,
    pub chunks: Vec<ChunkScan>,
    pub min_margin_lower: f64,
    pub origin_margin: f64,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VerifyPlan {
    Sphere(SphereVerifyPlan),
    Euclidean(RnVerifyPlan),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Every constraint held as given.
    Verified,
    /// z1 and/or z2 were raised before the certificate held.
    Repaired,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub original_objective: f64,
    pub plan: VerifyPlan,
    pub repaired: DualCertificate,
    /// Upper bound implied by the repaired certificate, rounded up.
    pub rigorous_bound: f64,
    pub precision_bits: u32,
    pub status: Status,
    pub notes: Vec<String>,
}

fn reject(r: Rejection) -> Error {
    Error::Rejected(r)
}

fn fl(bits: u32, x: f64) -> Float {
    Float::with_val(bits, x)
}

/// y ≤ 0, z3 ≤ 0, matching space.
fn sign_checks(cert: &DualCertificate, space: Space) -> Result<()> {
    if cert.space != space {
        return Err(reject(Rejection::WrongSpace));
    }
    for (i, (p, y)) in cert.constraints.iter().enumerate() {
        if !(*y <= 0.0) {
            return Err(reject(Rejection::PositiveMultiplier { index: i, value: *y }));
        }
        if p.space() != space {
            return Err(reject(Rejection::WrongSpace));
        }
        if p.dimension() != cert.n {
            return Err(Error::InvalidParameter(format!("profile {i} has dimension {} instead of {}", p.dimension(), cert.n)));
        }
        for &(v, _) in p.support() {
            let bad = match space {
                Space::Sphere => !(v.abs() <= 1.0),
                Space::Euclidean => !(v >= 0.0) || !v.is_finite(),
            };
            if bad {
                return Err(reject(Rejection::SupportOutOfRange(v)));
            }
        }
    }
    if !(cert.z3 <= 0.0) {
        return Err(reject(Rejection::PositiveZ3(cert.z3)));
    }
    for v in [cert.lambda, cert.z1, cert.z2, cert.z3] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter("certificate has a non-finite entry".into()));
        }
    }
    Ok(())
}

/// Exact test of [[z1, -z2/2], [-z2/2, -z3]] ⪰ 0 for double entries.
pub fn block_is_psd(z1: f64, z2: f64, z3: f64) -> bool {
    if z1 < 0.0 || z3 > 0.0 {
        return false;
    }
    // products of doubles are exact at 106 bits
    let det = Float::with_val(128, z1) * Float::with_val(128, -z3) - Float::with_val(128, z2) * Float::with_val(128, z2) / 4u32;
    !det.is_sign_negative() || det.is_zero()
}

/// Smallest double z1' ≥ z1 with the block PSD; the caller ensures z3 < 0
/// or z2 = 0.
fn psd_z1(z1: f64, z2: f64, z3: f64) -> Result<f64> {
    if z2 == 0.0 {
        return Ok(z1.max(0.0));
    }
    if z3 == 0.0 {
        return Err(reject(Rejection::Irreparable));
    }
    let mut need = Float::with_val(256, z2);
    need.square_mut();
    let den = Float::with_val(256, -4.0 * z3);
    let q = Float::with_val_round(256, &need / &den, Round::Up).0;
    Ok(z1.max(q.to_f64_round(Round::Up)))
}

/// Exact z1 + Σ y β rounded up.
fn objective_up(cert: &DualCertificate) -> f64 {
    let mut s = Float::with_val(2048, cert.z1);
    for (p, y) in &cert.constraints {
        // exact product at 106 bits, exact accumulation at 2048 bits for
        // any realistic exponent range
        s += Float::with_val(128, *y) * Float::with_val(128, p.beta());
    }
    s.to_f64_round(Round::Up)
}

/// Raise z2 by `v` (sphere: by v/ω_n) and z1 until the block is PSD.
/// The objective is recomputed exactly and rounded up.
pub fn repair_certificate(cert: &DualCertificate, v: f64, space: Space) -> Result<DualCertificate> {
    if !(v >= 0.0) {
        return Err(Error::InvalidParameter(format!("violation must be nonnegative, got {v}")));
    }
    if !(cert.z3 <= 0.0) {
        return Err(reject(Rejection::PositiveZ3(cert.z3)));
    }
    let mut out = cert.clone();
    if v > 0.0 {
        if cert.z3 == 0.0 {
            return Err(reject(Rejection::Irreparable));
        }
        let bits = 192;
        let dz = match space {
            Space::Sphere => {
                let omega = surface_measure(cert.n, Precision::new(bits)?)?;
                // shrink ω slightly so the quotient cannot be rounded low
                let omega_low = Float::with_val(bits, &omega * (1.0 - 2f64.powi(-100)));
                Float::with_val_round(bits, fl(bits, v) / &omega_low, Round::Up).0
            }
            Space::Euclidean => fl(bits, v),
        };
        let mut z2 = fl(bits, cert.z2);
        z2.add_assign_round(&dz, Round::Up);
        out.z2 = z2.to_f64_round(Round::Up);
    }
    out.z1 = psd_z1(out.z1, out.z2, out.z3)?;
    out.objective = objective_up(&out);
    Ok(out)
}

/// Cushion below which a computed margin is not trusted as nonnegative.
fn cushion(bits: u32) -> f64 {
    2f64.powi(-(bits as i32 - 24).min(1000))
}

fn finish(
    cert: &DualCertificate,
    plan: VerifyPlan,
    v: f64,
    space: Space,
    prec: Precision,
    mut notes: Vec<String>,
) -> Result<VerificationReport> {
    let psd = block_is_psd(cert.z1, cert.z2, cert.z3);
    if !psd {
        notes.push("z1 raised to make the 2x2 block exactly PSD".into());
    }
    let repaired = repair_certificate(cert, v, space)?;
    if v > 0.0 {
        notes.push(format!("z2 raised to absorb a constraint violation of {v:e}"));
    }
    let status = if v > 0.0 || !psd { Status::Repaired } else { Status::Verified };
    let rigorous_bound = repaired.objective.max(cert.objective);
    Ok(VerificationReport {
        original_objective: cert.objective,
        plan,
        repaired,
        rigorous_bound,
        precision_bits: prec.bits(),
        status,
        notes,
    })
}

/// Merged sphere data: weights on interior values, the ±1 constants.
struct SphereData {
    /// (t, Σ y l(t), plus λ at cos θ), interior t only
    interior: Vec<(f64, Float)>,
    plus: Float,
    minus: Float,
    /// -|λ| - Σ |y| Σ_{|t|<1} |l(t)|
    denom: Float,
}

fn sphere_data(cert: &DualCertificate, bits: u32) -> SphereData {
    let mut interior: Vec<(f64, Float)> = vec![(cert.forbidden, fl(bits, cert.lambda))];
    let mut plus = fl(bits, 0.0);
    let mut minus = fl(bits, 0.0);
    let mut denom = -fl(bits, cert.lambda.abs());
    for (p, y) in &cert.constraints {
        for &(t, c) in p.support() {
            let w = fl(bits, *y) * c;
            if t == 1.0 {
                plus += &w;
            } else if t == -1.0 {
                minus += &w;
            } else {
                denom -= Float::with_val(bits, w.abs_ref());
                match interior.iter_mut().find(|e| e.0 == t) {
                    Some(e) => e.1 += &w,
                    None => interior.push((t, w)),
                }
            }
        }
    }
    interior.sort_by(|a, b| a.0.total_cmp(&b.0));
    SphereData {
        interior,
        plus,
        minus,
        denom,
    }
}

/// Verify a sphere certificate; repairs it when a scanned constraint fails.
pub fn verify_sphere(cert: &DualCertificate, prec: Precision, slack: f64) -> Result<VerificationReport> {
    sign_checks(cert, Space::Sphere)?;
    if cert.n < 3 {
        return Err(Error::UnsupportedDimension(cert.n));
    }
    if !(slack > 0.0 && slack < 1.0) {
        return Err(Error::InvalidParameter(format!("slack must lie in (0, 1), got {slack}")));
    }
    if !(cert.forbidden.abs() < 1.0) {
        return Err(reject(Rejection::SupportOutOfRange(cert.forbidden)));
    }
    let bits = prec.guarded(32);
    let data = sphere_data(cert, bits);
    let omega = surface_measure(cert.n, Precision::new(bits)?)?;
    let z2w = Float::with_val(bits, &omega * cert.z2);
    let base = Float::with_val(bits, 1 - Float::with_val(bits, &z2w + &data.plus));
    // right-hand sides for even and odd k
    let rhs = [
        Float::with_val(bits, &base - &data.minus),
        Float::with_val(bits, &base + &data.minus),
    ];
    for (parity, r) in rhs.iter().enumerate() {
        if !r.is_sign_negative() || r.is_zero() {
            return Err(reject(Rejection::TailRhsNotNegative {
                parity,
                value: r.to_f64(),
            }));
        }
    }
    let xi: Vec<Float> = rhs.iter().map(|r| Float::with_val(bits, r * slack)).collect();
    let xi_max = if xi[0] > xi[1] { &xi[0] } else { &xi[1] };
    let s: Vec<f64> = data.interior.iter().map(|e| e.0).collect();
    let (eta, k0, decay_bound, subintervals) = if data.denom.is_zero() {
        // nothing depends on k beyond the constants: every k ≥ 1 holds
        (f64::INFINITY, 1u64, 0.0, 0)
    } else {
        let eta = Float::with_val_round(bits, xi_max / &data.denom, Round::Down).0.to_f64_round(Round::Down);
        let mut m = DEFAULT_SUBINTERVALS;
        let idx = loop {
            let q = DecayQuery::new(cert.n, s.clone(), eta)?.with_subintervals(m);
            match jacobi_decay_index(&q, prec) {
                Ok(i) => break i,
                Err(Error::Budget(_)) if m < MAX_SUBINTERVALS => m *= 4,
                Err(e) => return Err(e),
            }
        };
        (eta, idx.k0.max(1), idx.bound_at_k0, m)
    };
    if k0 > MAX_SCAN_DEGREE {
        return Err(Error::Budget(format!("decay index {k0} exceeds the scan limit {MAX_SCAN_DEGREE}")));
    }

    // scan k = 0..k0-1
    let mut iters: Vec<JacobiIter> = s.iter().map(|&t| JacobiIter::new(cert.n, &fl(bits, t), bits)).collect();
    let z3w2 = Float::with_val(bits, Float::with_val(bits, &omega * &omega) * cert.z3);
    let mut margins = Vec::new();
    let mut min_margin: Option<Float> = None;
    let mut worst_k = 0u64;
    let mut acc = fl(bits, 0.0);
    let mut tmp = fl(bits, 0.0);
    for k in 0..k0 {
        acc.assign_from(&z2w);
        acc -= 1u32;
        if k % 2 == 0 {
            acc += &data.plus;
            acc += &data.minus;
        } else {
            acc += &data.plus;
            acc -= &data.minus;
        }
        if k == 0 {
            acc += &z3w2;
        }
        for (it, (_, w)) in iters.iter_mut().zip(&data.interior) {
            tmp.assign_mul(w, it.current());
            acc += &tmp;
            it.advance();
        }
        if margins.len() < STORED_MARGINS {
            margins.push(acc.to_f64());
        }
        if min_margin.as_ref().map_or(true, |m| acc < *m) {
            min_margin = Some(acc.clone());
            worst_k = k;
        }
    }
    let min_margin = min_margin.unwrap();
    let cush = cushion(bits);
    let v = if min_margin.to_f64() >= cush {
        0.0
    } else {
        Float::with_val_round(bits, cush - &min_margin, Round::Up).0.to_f64_round(Round::Up)
    };
    let plan = SphereVerifyPlan {
        slack,
        xi0: xi[0].to_f64(),
        xi1: xi[1].to_f64(),
        eta,
        s,
        k0,
        decay_bound,
        subintervals,
        margins,
        min_margin: min_margin.to_f64(),
        worst_k,
        violation: v,
    };
    let notes = vec![format!("constraints k >= {k0} hold by the decay bound")];
    finish(cert, VerifyPlan::Sphere(plan), v, Space::Sphere, prec, notes)
}

trait AssignFrom {
    fn assign_from(&mut self, other: &Float);
    fn assign_mul(&mut self, a: &Float, b: &Float);
}

impl AssignFrom for Float {
    fn assign_from(&mut self, other: &Float) {
        use rug::Assign;
        self.assign(other);
    }
    fn assign_mul(&mut self, a: &Float, b: &Float) {
        use rug::Assign;
        self.assign(a * b);
    }
}

/// r0 = (n Γ(n/2) 2^{(n-3)/2})^{2/n}: below r0 the bound |Ω_n'(t)| ≤ t/n is
/// the better one, above it the Bessel bound.
pub fn derivative_crossover(n: usize) -> f64 {
    let nf = n as f64;
    (nf * libm::tgamma(nf / 2.0) * 2f64.powf((nf - 3.0) / 2.0)).powf(2.0 / nf)
}

/// Bound on |Ω_n'(ts)| valid for t ≥ a.
fn theta_bound(n: usize, r0: f64, gamma_half: f64, a: f64, s: f64) -> f64 {
    let nf = n as f64;
    if a * s <= r0 {
        r0 / nf
    } else {
        gamma_half * (2.0 / (a * s)).powf((nf - 2.0) / 2.0) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Merged euclidean data.
struct RnData {
    /// (s, Σ y l(s), plus λ at s = 1), s > 0
    positive: Vec<(f64, Float)>,
    /// Σ y l(0)
    at_zero: Float,
    /// |λ| and Σ_j |y_j| |l_j(s)| per s > 0, for derivative bounds
    abs_weights: Vec<(f64, f64)>,
    /// |λ| + Σ |y| Σ_{s>0} |l(s)|
    abs_total: Float,
}

fn rn_data(cert: &DualCertificate, bits: u32) -> RnData {
    let mut positive: Vec<(f64, Float)> = vec![(1.0, fl(bits, cert.lambda))];
    let mut abs_weights: Vec<(f64, f64)> = vec![(1.0, cert.lambda.abs())];
    let mut at_zero = fl(bits, 0.0);
    let mut abs_total = fl(bits, cert.lambda.abs());
    for (p, y) in &cert.constraints {
        for &(s, c) in p.support() {
            let w = fl(bits, *y) * c;
            if s == 0.0 {
                at_zero += &w;
                continue;
            }
            abs_total += Float::with_val(bits, w.abs_ref());
            // rounded up so the derivative bound stays an upper bound
            let aw = Float::with_val(bits, w.abs_ref()).to_f64_round(Round::Up);
            match abs_weights.iter_mut().find(|e| e.0 == s) {
                Some(e) => e.1 += aw,
                None => abs_weights.push((s, aw)),
            }
            match positive.iter_mut().find(|e| e.0 == s) {
                Some(e) => e.1 += &w,
                None => positive.push((s, w)),
            }
        }
    }
    positive.sort_by(|a, b| a.0.total_cmp(&b.0));
    RnData {
        positive,
        at_zero,
        abs_weights,
        abs_total,
    }
}

/// λΩ_n(t) + Σ y r(t) + z2 - 1 at t > 0.
fn rn_margin(om: &OmegaEvaluator, data: &RnData, constant: &Float, t: &Float, bits: u32) -> Float {
    let mut acc = constant.clone();
    let mut ts = fl(bits, 0.0);
    for (s, w) in &data.positive {
        use rug::Assign;
        ts.assign(t * *s);
        acc += om.eval(&ts) * w;
    }
    acc
}

/// Verify an R^n certificate on (0, L] plus the tail t ≥ L; repairs it
/// when the scan finds a violation.
pub fn verify_rn(cert: &DualCertificate, l: f64, prec: Precision, slack: f64, grid_accuracy: f64) -> Result<VerificationReport> {
    sign_checks(cert, Space::Euclidean)?;
    let n = cert.n;
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidParameter(format!("L must be positive, got {l}")));
    }
    if !(slack > 0.0 && slack < 1.0) {
        return Err(Error::InvalidParameter(format!("slack must lie in (0, 1), got {slack}")));
    }
    if !(grid_accuracy > 0.0) {
        return Err(Error::InvalidParameter(format!("grid accuracy must be positive, got {grid_accuracy}")));
    }
    let bits = prec.guarded(32);
    let wprec = Precision::new(bits)?;
    let data = rn_data(cert, bits);
    let om = OmegaEvaluator::new(n, wprec)?;

    // tail: |Ω_n| ≤ θ beyond L w
    let w = data
        .positive
        .iter()
        .filter(|e| !e.1.is_zero())
        .map(|e| e.0)
        .chain(cert.constraints.iter().flat_map(|(p, _)| p.support().iter().filter(|s| s.0 > 0.0 && s.1 != 0.0).map(|s| s.0)))
        .fold(1.0f64, f64::min);
    let upper = l * w;
    let bracket = bessel_zero_bracket(n as f64 / 2.0, 0.0, upper, BRACKET_WIDTH, wprec)?
        .ok_or_else(|| reject(Rejection::NoBesselZero { upper }))?;
    let gamma_half = gamma_fn(n as f64 / 2.0, wprec)?;
    let oa = om.eval(&fl(bits, bracket.lo)).abs();
    let ob = om.eval(&fl(bits, bracket.hi)).abs();
    let mut theta = if oa > ob { oa } else { ob };
    theta += Float::with_val(bits, &gamma_half * (bracket.hi - bracket.lo));
    let theta_tail = theta.to_f64_round(Round::Up);

    let rhs_inner = Float::with_val(bits, 1 - Float::with_val(bits, &data.at_zero + cert.z2));
    if !rhs_inner.is_sign_negative() || rhs_inner.is_zero() {
        return Err(reject(Rejection::TailRhsNotNegative {
            parity: 0,
            value: rhs_inner.to_f64(),
        }));
    }
    let tail_rhs = Float::with_val(bits, &rhs_inner * slack);
    let tail_lhs = -Float::with_val(bits, fl(bits, theta_tail) * &data.abs_total);
    if tail_lhs < tail_rhs {
        return Err(reject(Rejection::TailInequalityFails {
            lhs: tail_lhs.to_f64(),
            rhs: tail_rhs.to_f64(),
        }));
    }

    // grid scan of (0, L] in chunks of length 1/2
    let r0 = derivative_crossover(n);
    let gh = gamma_half.to_f64_round(Round::Up);
    let constant = Float::with_val(bits, Float::with_val(bits, &data.at_zero + cert.z2) - 1u32);
    let chunk_count = (2.0 * l).ceil() as usize;
    let scan_chunk = |k: usize, om: &OmegaEvaluator| -> ChunkScan {
        let a = 0.5 * k as f64;
        let bound: f64 = data
            .abs_weights
            .iter()
            .map(|&(s, aw)| aw * s * theta_bound(n, r0, gh, a, s))
            .sum::<f64>()
            * (1.0 + 1e-12);
        let eps = if bound > 0.0 { grid_accuracy / bound } else { 0.5 };
        let m = ((0.5 / eps).ceil() as usize).max(1);
        let h = 0.5 / m as f64;
        let mut min = None::<Float>;
        for i in 0..=m {
            let t = fl(bits, a) + Float::with_val(bits, Float::with_val(bits, i) * 0.5) / m as u32;
            if t.is_zero() {
                // the t > 0 constraints extend continuously to t = 0
                let v = Float::with_val(bits, &constant + data.positive.iter().fold(fl(bits, 0.0), |s, e| s + &e.1));
                if min.as_ref().map_or(true, |x| v < *x) {
                    min = Some(v);
                }
                continue;
            }
            let v = rn_margin(om, &data, &constant, &t, bits);
            if min.as_ref().map_or(true, |x| v < *x) {
                min = Some(v);
            }
        }
        let min = min.unwrap().to_f64_round(Round::Down);
        ChunkScan {
            a,
            derivative_bound: bound,
            spacing: h,
            points: m + 1,
            min_grid_margin: min,
            lower_bound: min - grid_accuracy,
        }
    };
    let workers = std::thread::available_parallelism().map_or(1, |x| x.get()).min(chunk_count.max(1));
    let mut chunks: Vec<ChunkScan> = std::thread::scope(|sc| {
        let handles: Vec<_> = (0..workers)
            .map(|wi| {
                let scan_chunk = &scan_chunk;
                sc.spawn(move || -> Result<Vec<ChunkScan>> {
                    let om = OmegaEvaluator::new(n, wprec)?;
                    Ok((wi..chunk_count).step_by(workers).map(|k| scan_chunk(k, &om)).collect())
                })
            })
            .collect();
        let mut all = Vec::new();
        for h in handles {
            all.extend(h.join().expect("scan worker panicked")?);
        }
        Ok::<_, Error>(all)
    })?;
    chunks.sort_by(|a, b| a.a.total_cmp(&b.a));
    let min_margin_lower = chunks.iter().map(|c| c.lower_bound).fold(f64::INFINITY, f64::min);

    // t = 0 constraint
    let origin = Float::with_val(
        bits,
        data.positive.iter().fold(fl(bits, 0.0), |s, e| s + &e.1) + &data.at_zero + cert.z2 + cert.z3 - 1u32,
    );
    let origin_margin = origin.to_f64_round(Round::Down);
    let cush = cushion(bits);
    let worst = min_margin_lower.min(origin_margin - cush);
    let v = if worst >= 0.0 { 0.0 } else { -worst };
    let plan = RnVerifyPlan {
        slack,
        w,
        l,
        bracket,
        theta_tail,
        tail_lhs: tail_lhs.to_f64(),
        tail_rhs: tail_rhs.to_f64(),
        r0,
        grid_accuracy,
        chunks,
        min_margin_lower,
        origin_margin,
        violation: v,
    };
    let notes = vec![format!("constraints t >= {l} hold by the tail bound")];
    finish(cert, VerifyPlan::Euclidean(plan), v, Space::Euclidean, prec, notes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::{solve_rn_dual, solve_sphere_dual, uniform_grid};
    use crate::profiles::ConstraintProfile;

    fn bare(space: Space, z1: f64, z2: f64, z3: f64) -> DualCertificate {
        DualCertificate {
            space,
            n: 3,
            forbidden: if space == Space::Sphere { 0.0 } else { 1.0 },
            lambda: 1.0,
            z1,
            z2,
            z3,
            constraints: Vec::new(),
            objective: z1,
        }
    }

    #[test]
    fn repair_examples() {
        let omega = crate::specfun::surface_measure_f64(3);
        let c = repair_certificate(&bare(Space::Sphere, 1.0, 0.0, -1.0), 0.2 * omega, Space::Sphere).unwrap();
        assert!((c.z2 - 0.2).abs() < 1e-15);
        assert_eq!(c.z1, 1.0);
        assert_eq!(c.objective, 1.0);
        let c = repair_certificate(&bare(Space::Sphere, 0.001, 0.0, -1.0), 0.2 * omega, Space::Sphere).unwrap();
        assert!((c.z1 - 0.01).abs() < 1e-15);
        assert!(block_is_psd(c.z1, c.z2, c.z3));
        assert!(matches!(
            repair_certificate(&bare(Space::Sphere, 1.0, 0.0, 0.0), 0.1, Space::Sphere),
            Err(Error::Rejected(Rejection::Irreparable))
        ));
    }

    #[test]
    fn r0_for_the_plane() {
        assert!((derivative_crossover(2) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sign_errors() {
        let mut c = solve_sphere_dual(3, 0.0, 10, &[]).unwrap().certificate;
        let p = ConstraintProfile::new(Space::Sphere, 3, vec![(0.5, 2.0), (1.0, -1.0)], -1.0, "t").unwrap();
        c.constraints.push((p, 0.1));
        let e = verify_sphere(&c, Precision::default(), DEFAULT_SLACK).unwrap_err();
        assert!(e.to_string().contains("y must be nonpositive"), "{e}");

        let c = DualCertificate {
            z2: 0.0,
            ..bare(Space::Sphere, 1.0, 0.0, -1.0)
        };
        let e = verify_sphere(&c, Precision::default(), DEFAULT_SLACK).unwrap_err();
        assert!(e.to_string().contains("tail right-hand side not negative"), "{e}");
    }

    #[test]
    fn base_sphere_certificate_verifies() {
        let c = solve_sphere_dual(3, 0.0, 30, &[]).unwrap().certificate;
        let r = verify_sphere(&c, Precision::default(), DEFAULT_SLACK).unwrap();
        assert!(r.rigorous_bound >= c.objective && r.rigorous_bound <= c.objective + 0.01);
        assert!(block_is_psd(r.repaired.z1, r.repaired.z2, r.repaired.z3));
    }

    #[test]
    fn base_rn_certificate_verifies() {
        let grid = uniform_grid(0.05, 30.0).unwrap();
        let c = solve_rn_dual(3, &grid, &[]).unwrap().certificate;
        let r = verify_rn(&c, 30.0, Precision::default(), DEFAULT_SLACK, 1e-4).unwrap();
        assert!(r.rigorous_bound >= c.objective && r.rigorous_bound <= c.objective + 0.01);
        let e = verify_rn(&c, 4.0, Precision::default(), DEFAULT_SLACK, 1e-4).unwrap_err();
        assert!(e.to_string().contains("no Bessel zero"), "{e}");
    }
}
