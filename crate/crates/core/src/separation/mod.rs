//! Separation rounds: search for point configurations at which a valid BQP
//! inequality is violated by the current primal kernel, then add the
//! resulting profile to the dual and solve again.

mod nelder_mead;

pub use nelder_mead::{minimize, NmOptions, NmResult};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bqp::{make_inequality, validate_inequality, BqpInequality, InequalityClass};
use crate::conic::{solve_rn_dual, solve_sphere_dual, DualCertificate, KernelCoeffs, RadialMeasure};
use crate::configs::{PointConfig, Space};
use crate::error::{Error, Result};
use crate::profiles::{profile_from_bqp, ConstraintProfile};
use crate::specfun::fast::{jacobi_fill, FastOmega, HermiteTable};

pub const DEFAULT_RESTARTS: usize = 64;
pub const VIOLATION_THRESHOLD: f64 = 1e-7;
pub const MAX_SEARCH_N: usize = 10;

/// Points closer than this are treated as a degenerate configuration.
/// Default smallest pairwise distance accepted in a separating configuration.
pub const MIN_SEPARATION: f64 = 1e-4;
/// Euclidean kernel table covers distances up to this value.
const EUCLIDEAN_TABLE_MAX: f64 = 8.0;

/// Primal object recovered from a dual solve.
#[derive(Clone, Debug)]
pub enum Primal {
    Sphere(KernelCoeffs),
    Euclidean(RadialMeasure),
}

impl Primal {
    pub fn space(&self) -> Space {
        match self {
            Primal::Sphere(_) => Space::Sphere,
            Primal::Euclidean(_) => Space::Euclidean,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Primal::Sphere(k) => k.n,
            Primal::Euclidean(m) => m.n,
        }
    }

    /// Σ a(k) r(k) or ∫ r dα for the profile, in double precision.
    pub fn pair_with(&self, p: &ConstraintProfile) -> f64 {
        match self {
            Primal::Sphere(k) => {
                let r = p.sphere_table(k.degree());
                k.a.iter().zip(&r).map(|(a, r)| a * r).sum()
            }
            Primal::Euclidean(m) => {
                let om = FastOmega::new(m.n);
                m.atoms
                    .iter()
                    .map(|&(t, w)| w * if t == 0.0 { p.total() } else { p.eval_fast(&om, t) })
                    .sum()
            }
        }
    }

    /// β minus the profile's value at this primal; positive when violated.
    pub fn violation_of(&self, p: &ConstraintProfile) -> f64 {
        p.beta() - self.pair_with(p)
    }
}

/// Kernel K(x, y) prepared for fast repeated evaluation.
pub struct SearchKernel {
    space: Space,
    n: usize,
    table: HermiteTable,
    measure: Option<RadialMeasure>,
    omega: Option<FastOmega>,
}

impl SearchKernel {
    pub fn new(primal: &Primal) -> Self {
        match primal {
            Primal::Sphere(k) => {
                let n = k.n;
                let d = k.degree();
                let nodes = (32 * (d + 1)).max(4096);
                // K(cos φ) with dK/dφ = -sin φ K'(cos φ); P_k' uses P_{k-1}^{n+2}
                let nf = n as f64;
                let f = |phi: f64| k.eval(phi.cos());
                let df = |phi: f64| {
                    let t = phi.cos();
                    let mut up = vec![0.0; d.max(1)];
                    jacobi_fill(n + 2, t, &mut up);
                    let mut s = 0.0;
                    for kk in 1..=d {
                        let kf = kk as f64;
                        s += k.a[kk] * kf * (kf + nf - 2.0) / (nf - 1.0) * up[kk - 1];
                    }
                    -phi.sin() * s
                };
                SearchKernel {
                    space: Space::Sphere,
                    n,
                    table: HermiteTable::new(std::f64::consts::PI, nodes, f, df),
                    measure: None,
                    omega: None,
                }
            }
            Primal::Euclidean(m) => {
                let n = m.n;
                let om = FastOmega::new(n);
                let up = FastOmega::new(n + 2);
                let tmax = m.atoms.iter().map(|a| a.0).fold(1.0, f64::max);
                let nodes = ((EUCLIDEAN_TABLE_MAX * tmax * 24.0) as usize).max(2048);
                let f = |r: f64| m.eval(&om, r);
                let df = |r: f64| m.atoms.iter().map(|&(t, w)| w * t * om.deriv_with(&up, t * r)).sum();
                let table = HermiteTable::new(EUCLIDEAN_TABLE_MAX, nodes, f, df);
                SearchKernel {
                    space: Space::Euclidean,
                    n,
                    table,
                    measure: Some(m.clone()),
                    omega: Some(om),
                }
            }
        }
    }

    fn pair(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.space {
            Space::Sphere => {
                let t: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                self.table.eval(t.clamp(-1.0, 1.0).acos())
            }
            Space::Euclidean => {
                let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                if r <= EUCLIDEAN_TABLE_MAX {
                    self.table.eval(r)
                } else {
                    self.measure.as_ref().unwrap().eval(self.omega.as_ref().unwrap(), r)
                }
            }
        }
    }

    /// Number of search coordinates for N points.
    fn params(&self, npts: usize) -> usize {
        match self.space {
            Space::Sphere => npts * (self.n - 1),
            // the first point is pinned at the origin
            Space::Euclidean => (npts - 1) * self.n,
        }
    }

    fn points(&self, u: &[f64], npts: usize) -> Vec<Vec<f64>> {
        let n = self.n;
        match self.space {
            Space::Sphere => u.chunks(n - 1).map(inverse_stereographic).collect(),
            Space::Euclidean => std::iter::once(vec![0.0; n])
                .chain(u.chunks(n).map(<[f64]>::to_vec))
                .take(npts)
                .collect(),
        }
    }

    fn violation(&self, ineq: &BqpInequality, pts: &[Vec<f64>]) -> f64 {
        ineq.violation(|i, j| self.pair(&pts[i], &pts[j]))
    }

    fn random_start(&self, rng: &mut ChaCha8Rng, npts: usize) -> Vec<f64> {
        match self.space {
            Space::Sphere => {
                let mut u = Vec::with_capacity(self.params(npts));
                for _ in 0..npts {
                    // uniform on the sphere via rejection from the cube
                    let x = loop {
                        let v: Vec<f64> = (0..self.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        let r2: f64 = v.iter().map(|a| a * a).sum();
                        if r2 > 1e-4 && r2 <= 1.0 {
                            break v.iter().map(|a| a / r2.sqrt()).collect::<Vec<f64>>();
                        }
                    };
                    u.extend(stereographic(&x));
                }
                u
            }
            Space::Euclidean => (0..self.params(npts)).map(|_| rng.gen_range(-1.2..1.2)).collect(),
        }
    }
}

/// Projection from (0, …, 0, 1) onto the plane x_n = -1.
fn stereographic(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let s = 2.0 / (1.0 - x[n - 1]).max(1e-12);
    x[..n - 1].iter().map(|v| s * v).collect()
}

fn inverse_stereographic(u: &[f64]) -> Vec<f64> {
    let q: f64 = u.iter().map(|v| v * v).sum();
    let mut x: Vec<f64> = u.iter().map(|v| 4.0 * v / (q + 4.0)).collect();
    x.push((q - 4.0) / (q + 4.0));
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    x
}

#[derive(Clone, Debug)]
pub struct ViolationResult {
    pub inequality: BqpInequality,
    pub points: PointConfig,
    /// Recomputed from the profile of `points`.
    pub violation: f64,
    pub converged: bool,
    pub profile: ConstraintProfile,
}

struct Candidate {
    restart: usize,
    pts: Vec<Vec<f64>>,
    value: f64,
    converged: bool,
}

fn search(kernel: &SearchKernel, ineq: &BqpInequality, restarts: usize, seed: u64, min_sep: f64) -> Vec<Candidate> {
    let npts = ineq.size();
    let dim = kernel.params(npts);
    let opt = NmOptions {
        step: match kernel.space {
            Space::Sphere => 0.4,
            Space::Euclidean => 0.25,
        },
        max_evals: 400 * dim.max(1),
        ftol: 1e-13,
        xtol: 1e-9,
    };
    let one = |restart: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let x0 = kernel.random_start(&mut rng, npts);
        let mut f = |u: &[f64]| {
            let pts = kernel.points(u, npts);
            -kernel.violation(ineq, &pts) + SEPARATION_PENALTY * separation_shortfall(&pts, min_sep)
        };
        let mut r = minimize(&mut f, &x0, opt);
        // one restart from the end point repairs premature collapse
        let again = minimize(&mut f, &r.x, NmOptions { step: opt.step / 4.0, ..opt });
        if again.value <= r.value {
            r = NmResult {
                converged: again.converged,
                ..again
            };
        }
        Candidate {
            restart,
            pts: kernel.points(&r.x, npts),
            value: -r.value,
            converged: r.converged,
        }
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(restarts.max(1));
    let mut out: Vec<Candidate> = if workers <= 1 {
        (0..restarts).map(one).collect()
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let one = &one;
                    s.spawn(move || (w..restarts).step_by(workers).map(one).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("search worker panicked")).collect()
        })
    };
    // best first, lowest restart index on ties
    out.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.restart.cmp(&b.restart)));
    out
}

const SEPARATION_PENALTY: f64 = 10.0;

/// Σ max(0, min_sep - |x_i - x_j|) over pairs.
fn separation_shortfall(pts: &[Vec<f64>], min_sep: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..pts.len() {
        for j in 0..i {
            let d = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            s += (min_sep - d).max(0.0);
        }
    }
    s
}

fn finalize(primal: &Primal, ineq: &BqpInequality, c: &Candidate, min_sep: f64) -> Option<ViolationResult> {
    let space = primal.space();
    let n = primal.dimension();
    let cfg = PointConfig::new(n, c.pts.clone(), space).ok()?;
    if separation_shortfall(cfg.points(), min_sep) > 0.0 {
        return None;
    }
    let profile = profile_from_bqp(&cfg, ineq).ok()?;
    let violation = primal.violation_of(&profile);
    Some(ViolationResult {
        inequality: ineq.clone(),
        points: cfg,
        violation,
        converged: c.converged,
        profile,
    })
}

fn check_search(primal: &Primal, ineq: &BqpInequality) -> Result<()> {
    if ineq.size() > MAX_SEARCH_N || ineq.size() < 2 {
        return Err(Error::InvalidParameter(format!(
            "separation supports 2 <= N <= {MAX_SEARCH_N}, got {}",
            ineq.size()
        )));
    }
    if primal.space() == Space::Sphere && primal.dimension() < 3 {
        return Err(Error::UnsupportedDimension(primal.dimension()));
    }
    Ok(())
}

/// Best configuration found by Nelder–Mead from `restarts` random starts.
/// The reported violation is recomputed from the configuration's profile.
pub fn max_violation(primal: &Primal, ineq: &BqpInequality, restarts: usize, seed: u64) -> Result<ViolationResult> {
    check_search(primal, ineq)?;
    let kernel = SearchKernel::new(primal);
    let cands = search(&kernel, ineq, restarts.max(1), seed, MIN_SEPARATION);
    cands
        .iter()
        .find_map(|c| finalize(primal, ineq, c, MIN_SEPARATION))
        .ok_or_else(|| Error::Budget("every search end point was degenerate".into()))
}

/// Up to `limit` distinct configurations with recomputed violation above
/// `threshold`, best first.
fn violated(
    primal: &Primal,
    kernel: &SearchKernel,
    ineq: &BqpInequality,
    restarts: usize,
    seed: u64,
    threshold: f64,
    limit: usize,
    min_sep: f64,
) -> Vec<ViolationResult> {
    let mut found: Vec<ViolationResult> = Vec::new();
    for c in search(kernel, ineq, restarts, seed, min_sep) {
        if found.len() >= limit || c.value < threshold {
            break;
        }
        if let Some(v) = finalize(primal, ineq, &c, min_sep) {
            if v.violation >= threshold && !found.iter().any(|f| same_profile(&f.profile, &v.profile)) {
                found.push(v);
            }
        }
    }
    found
}

fn same_profile(a: &ConstraintProfile, b: &ConstraintProfile) -> bool {
    a.support().len() == b.support().len()
        && (a.beta() - b.beta()).abs() < 1e-12
        && a
            .support()
            .iter()
            .zip(b.support())
            .all(|(x, y)| (x.0 - y.0).abs() < 1e-7 && (x.1 - y.1).abs() < 1e-12)
}

/// Parse a comma-separated class list: `ie:3-5`, `ie:4`, `clique:5`
/// (s = 2..N-2), `hyper:5` (±1 coefficient vectors with odd sum), or a
/// single explicit inequality such as `clique(6,2)`.
pub fn parse_classes(spec: &str) -> Result<Vec<BqpInequality>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item.contains('(') {
            // explicit forms may contain commas; rejoin in a second pass
            return parse_with_explicit(spec);
        }
        out.extend(parse_item(item)?);
    }
    Ok(out)
}

fn parse_with_explicit(spec: &str) -> Result<Vec<BqpInequality>> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in spec.chars().chain(std::iter::once(',')) {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            let item = cur.trim();
            if item.contains('(') {
                out.push(make_inequality(&item.parse::<InequalityClass>()?)?);
            } else if !item.is_empty() {
                out.extend(parse_item(item)?);
            }
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    Ok(out)
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("cannot parse size range `{s}`"));
    let (a, b) = match s.split_once('-') {
        Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
        None => {
            let v = s.parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a < 2 || b < a || b > MAX_SEARCH_N {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_item(item: &str) -> Result<Vec<BqpInequality>> {
    let (kind, range) = item
        .split_once(':')
        .ok_or_else(|| Error::InvalidParameter(format!("class `{item}` needs the form kind:N or kind:A-B")))?;
    let (lo, hi) = parse_range(range)?;
    let mut out = Vec::new();
    for n in lo..=hi {
        match kind {
            "ie" => out.push(make_inequality(&InequalityClass::InclusionExclusion(n))?),
            "clique" => {
                for s in 2..=(n as i64 - 2) {
                    out.push(make_inequality(&InequalityClass::Clique { n, s })?);
                }
            }
            "hyper" => {
                // b and -b give the same inequality
                for m in 0..=n / 2 {
                    let b: Vec<i64> = (0..n).map(|i| if i < n - m { 1 } else { -1 }).collect();
                    if b.iter().sum::<i64>().rem_euclid(2) == 1 {
                        out.push(make_inequality(&InequalityClass::Hypermetric(b))?);
                    }
                }
            }
            _ => return Err(Error::InvalidParameter(format!("unknown inequality class `{kind}`"))),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum DualProblem {
    Sphere { n: usize, cos_theta: f64, degree: usize },
    Rn { n: usize, grid: Vec<f64> },
}

impl DualProblem {
    pub fn space(&self) -> Space {
        match self {
            DualProblem::Sphere { .. } => Space::Sphere,
            DualProblem::Rn { .. } => Space::Euclidean,
        }
    }

    pub fn solve(&self, profiles: &[ConstraintProfile]) -> Result<(DualCertificate, Primal, Vec<String>)> {
        match self {
            DualProblem::Sphere { n, cos_theta, degree } => {
                let s = solve_sphere_dual(*n, *cos_theta, *degree, profiles)?;
                Ok((s.certificate, Primal::Sphere(s.kernel), s.warnings))
            }
            DualProblem::Rn { n, grid } => {
                let s = solve_rn_dual(*n, grid, profiles)?;
                Ok((s.certificate, Primal::Euclidean(s.measure), s.warnings))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LoopOptions {
    pub rounds: usize,
    pub restarts: usize,
    pub seed: u64,
    pub threshold: f64,
    /// Configurations kept per inequality per round.
    pub per_class: usize,
    /// Smallest pairwise distance allowed in a configuration. In Euclidean
    /// space this keeps r(t) slowly varying on the sampled range.
    pub min_separation: f64,
}

impl Default for LoopOptions {
    fn default() -> Self {
        LoopOptions {
            rounds: 15,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            threshold: VIOLATION_THRESHOLD,
            per_class: 1,
            min_separation: MIN_SEPARATION,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RoundRecord {
    pub round: usize,
    /// Objective of the solve that ends the round (round 0 is the bare solve).
    pub objective: f64,
    pub added: usize,
    pub best_violation: f64,
}

#[derive(Clone, Debug)]
pub struct LoopOutcome {
    pub certificate: DualCertificate,
    pub primal: Primal,
    /// Every profile in the final solve, the initial ones first.
    pub profiles: Vec<ConstraintProfile>,
    pub added: Vec<ConstraintProfile>,
    pub history: Vec<RoundRecord>,
    pub warnings: Vec<String>,
}

fn round_seed(seed: u64, round: usize, class: usize) -> u64 {
    seed ^ (round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (class as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
}

/// Alternate dual solves and separation over `classes` until no violated
/// inequality is found or `opts.rounds` rounds have run.
pub fn separation_loop(
    problem: &DualProblem,
    initial: &[ConstraintProfile],
    classes: &[BqpInequality],
    opts: LoopOptions,
) -> Result<LoopOutcome> {
    for ineq in classes {
        if !validate_inequality(ineq)?.valid {
            return Err(Error::InvalidParameter(format!("inequality {} is not valid", ineq.name())));
        }
    }
    let mut profiles = initial.to_vec();
    let mut added = Vec::new();
    let (mut cert, mut primal, mut warnings) = problem.solve(&profiles)?;
    let mut history = vec![RoundRecord {
        round: 0,
        objective: cert.objective,
        added: 0,
        best_violation: 0.0,
    }];
    for round in 1..=opts.rounds {
        let kernel = SearchKernel::new(&primal);
        let mut new = Vec::new();
        let mut best = f64::NEG_INFINITY;
        for (ci, ineq) in classes.iter().enumerate() {
            check_search(&primal, ineq)?;
            let seed = round_seed(opts.seed, round, ci);
            for v in violated(&primal, &kernel, ineq, opts.restarts, seed, opts.threshold, opts.per_class, opts.min_separation) {
                best = best.max(v.violation);
                let p = v.profile;
                if !new.iter().chain(&profiles).any(|q| same_profile(q, &p)) {
                    let note = format!("round {round}: {} violated by {:.3e}", ineq.name(), v.violation);
                    let p = ConstraintProfile::new(p.space(), p.dimension(), p.support().to_vec(), p.beta(), note)?;
                    new.push(p);
                }
            }
        }
        if new.is_empty() {
            break;
        }
        profiles.extend(new.iter().cloned());
        let count = new.len();
        added.extend(new);
        (cert, primal, warnings) = problem.solve(&profiles)?;
        history.push(RoundRecord {
            round,
            objective: cert.objective,
            added: count,
            best_violation: best,
        });
    }
    Ok(LoopOutcome {
        certificate: cert,
        primal,
        profiles,
        added,
        history,
        warnings,
    })
}
