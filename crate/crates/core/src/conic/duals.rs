use super::{solve_conic_lp, ConicLp, PsdBlock, Sense};
use crate::configs::Space;
use crate::error::{Error, Result};
use crate::profiles::ConstraintProfile;
use crate::specfun::{fast, surface_measure_f64};

/// Dual solution shared by both programs. On the sphere `forbidden` is
/// cos θ; in R^n it is the unit distance 1.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate {
    pub space: Space,
    pub n: usize,
    pub forbidden: f64,
    pub lambda: f64,
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub constraints: Vec<(ConstraintProfile, f64)>,
    pub objective: f64,
}

impl DualCertificate {
    /// z1 + Σ y β, recomputed from the fields.
    pub fn computed_objective(&self) -> f64 {
        self.z1 + self.constraints.iter().map(|(p, y)| y * p.beta()).sum::<f64>()
    }

    pub fn block_min_eigenvalue(&self) -> f64 {
        super::eigen::min_eigen_2x2(self.z1, -0.5 * self.z2, -self.z3).0
    }

    /// Slack of the k-th sphere constraint in double precision
    /// (k = 0 includes the z3 term).
    pub fn sphere_margin(&self, k: usize) -> f64 {
        let tab = fast::jacobi_table(self.n, self.forbidden, k);
        let omega = surface_measure_f64(self.n);
        let mut m = self.lambda * tab[k] + self.z2 * omega - 1.0;
        if k == 0 {
            m += self.z3 * omega * omega;
        }
        for (p, y) in &self.constraints {
            m += y * p.sphere_table(k)[k];
        }
        m
    }

    /// Slack of the radial constraint at t ≥ 0 in double precision.
    pub fn rn_margin(&self, om: &fast::FastOmega, t: f64) -> f64 {
        let mut m = self.lambda * om.eval(t) + self.z2 - 1.0;
        if t == 0.0 {
            m += self.z3;
        }
        for (p, y) in &self.constraints {
            m += y * p.eval_fast(om, t);
        }
        m
    }
}

/// Coefficients a(0..=d) of the recovered kernel Σ a(k) P_k^n(x·y).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelCoeffs {
    pub n: usize,
    pub a: Vec<f64>,
}

impl KernelCoeffs {
    pub fn degree(&self) -> usize {
        self.a.len().saturating_sub(1)
    }

    /// Σ a(k), the primal objective.
    pub fn total(&self) -> f64 {
        self.a.iter().sum()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let tab = fast::jacobi_table(self.n, t.clamp(-1.0, 1.0), self.degree());
        self.a.iter().zip(&tab).map(|(a, p)| a * p).sum()
    }
}

/// Atoms (t, mass) of the recovered radial measure, sorted by t.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialMeasure {
    pub n: usize,
    pub atoms: Vec<(f64, f64)>,
}

impl RadialMeasure {
    /// Total mass, the primal objective.
    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// f(x) = Σ mass · Ω_n(t ‖x‖) at ‖x‖ = r.
    pub fn eval(&self, om: &fast::FastOmega, r: f64) -> f64 {
        self.atoms.iter().map(|&(t, m)| m * om.eval(t * r)).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SphereDualSolution {
    pub certificate: DualCertificate,
    pub kernel: KernelCoeffs,
    pub cuts: usize,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RnDualSolution {
    pub certificate: DualCertificate,
    pub measure: RadialMeasure,
    pub cuts: usize,
    pub warnings: Vec<String>,
}

/// h, 2h, ..., up to `max` (inclusive up to rounding).
pub fn uniform_grid(step: f64, max: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(max >= step) {
        return Err(Error::InvalidParameter(format!("bad grid step {step} / max {max}")));
    }
    let count = (max / step + 1e-9).floor() as usize;
    Ok((1..=count).map(|k| k as f64 * step).collect())
}

fn check_profiles(profiles: &[ConstraintProfile], space: Space, n: usize) -> Result<()> {
    for p in profiles {
        if p.space() != space {
            return Err(Error::InvalidParameter(format!("profile `{}` is not {space}-tagged", p.note())));
        }
        if p.dimension() != n {
            return Err(Error::InvalidParameter(format!(
                "profile `{}` has dimension {} instead of {n}",
                p.note(),
                p.dimension()
            )));
        }
    }
    Ok(())
}

/// Upper bound on the (scaled) z3. With z3 = 0 the block forces z2 = 0 and
/// a certificate could not absorb any violation found by the verifier; the
/// cost of raising z2 by δ is about δ²/(4 Z3_FLOOR) in z1.
pub const Z3_FLOOR: f64 = 1e-6;

/// Variable layout: λ, y_1..y_p, z1, z2, z3.
struct Layout {
    p: usize,
}

impl Layout {
    fn len(&self) -> usize {
        self.p + 4
    }
    fn z1(&self) -> usize {
        self.p + 1
    }
    fn z2(&self) -> usize {
        self.p + 2
    }
    fn z3(&self) -> usize {
        self.p + 3
    }
}

/// Shared skeleton: the constraint at the origin (z3 coefficient 1), then
/// one row per sample `kernel[i]` with profile values `r[j][i]`. On the
/// sphere z2 and z3 stand for ω z2 and ω² z3 so both programs coincide.
fn build(kernel: &[f64], r: &[Vec<f64>], r0: &[f64], profiles: &[ConstraintProfile]) -> (ConicLp, Layout) {
    let lay = Layout { p: profiles.len() };
    let mut obj = vec![0.0; lay.len()];
    obj[lay.z1()] = 1.0;
    for (j, p) in profiles.iter().enumerate() {
        obj[1 + j] = p.beta();
    }
    let mut lp = ConicLp::new(obj);
    let mut row0 = vec![0.0; lay.len()];
    row0[0] = 1.0;
    for j in 0..lay.p {
        row0[1 + j] = r0[j];
    }
    row0[lay.z2()] = 1.0;
    row0[lay.z3()] = 1.0;
    lp.row(row0, Sense::Ge, 1.0);
    for (i, &kv) in kernel.iter().enumerate() {
        let mut row = vec![0.0; lay.len()];
        row[0] = kv;
        for j in 0..lay.p {
            row[1 + j] = r[j][i];
        }
        row[lay.z2()] = 1.0;
        lp.row(row, Sense::Ge, 1.0);
    }
    for j in 0..lay.p {
        let mut row = vec![0.0; lay.len()];
        row[1 + j] = 1.0;
        lp.row(row, Sense::Le, 0.0);
    }
    let mut row = vec![0.0; lay.len()];
    row[lay.z3()] = 1.0;
    lp.row(row, Sense::Le, -Z3_FLOOR);
    lp.psd = Some(PsdBlock::two_by_two(lay.z1(), lay.z2(), lay.z3()));
    (lp, lay)
}

fn box_warnings(at_box: &[usize], lay: &Layout) -> Vec<String> {
    at_box
        .iter()
        .map(|&i| {
            let name = match i {
                0 => "lambda".to_string(),
                i if i == lay.z1() => "z1".into(),
                i if i == lay.z2() => "z2".into(),
                i if i == lay.z3() => "z3".into(),
                i => format!("y[{}]", i - 1),
            };
            format!("{name} is at the box bound")
        })
        .collect()
}

/// The sphere dual truncated to degrees 0..=d.
pub fn solve_sphere_dual(n: usize, cos_theta: f64, d: usize, profiles: &[ConstraintProfile]) -> Result<SphereDualSolution> {
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if d < 2 {
        return Err(Error::InvalidParameter(format!("degree cutoff must be at least 2, got {d}")));
    }
    if !(cos_theta > -1.0 && cos_theta < 1.0) {
        return Err(Error::Domain(format!("cos theta must lie in (-1, 1), got {cos_theta}")));
    }
    check_profiles(profiles, Space::Sphere, n)?;
    let pk = fast::jacobi_table(n, cos_theta, d);
    let tables: Vec<Vec<f64>> = profiles.iter().map(|p| p.sphere_table(d)).collect();
    let r: Vec<Vec<f64>> = tables.iter().map(|t| t[1..].to_vec()).collect();
    let r0: Vec<f64> = tables.iter().map(|t| t[0]).collect();
    let (lp, lay) = build(&pk[1..], &r, &r0, profiles);
    let sol = solve_conic_lp(&lp)?;
    let omega = surface_measure_f64(n);
    let cert = certificate(Space::Sphere, n, cos_theta, &sol.x, &lay, profiles, omega);
    // rows 0..=d are the degree constraints
    let a = sol.duals[..=d].iter().map(|u| u.max(0.0)).collect();
    Ok(SphereDualSolution {
        certificate: cert,
        kernel: KernelCoeffs { n, a },
        cuts: sol.cuts,
        warnings: box_warnings(&sol.at_box, &lay),
    })
}

/// The R^n dual with the radial constraints sampled on `grid` ⊂ (0, ∞).
pub fn solve_rn_dual(n: usize, grid: &[f64], profiles: &[ConstraintProfile]) -> Result<RnDualSolution> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if grid.is_empty() || grid.iter().any(|&t| !(t > 0.0)) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("grid must be nonempty, positive and strictly increasing".into()));
    }
    check_profiles(profiles, Space::Euclidean, n)?;
    let om = fast::FastOmega::new(n);
    let kernel: Vec<f64> = grid.iter().map(|&t| om.eval(t)).collect();
    let r: Vec<Vec<f64>> = profiles
        .iter()
        .map(|p| grid.iter().map(|&t| p.eval_fast(&om, t)).collect())
        .collect();
    let r0: Vec<f64> = profiles.iter().map(ConstraintProfile::total).collect();
    let (lp, lay) = build(&kernel, &r, &r0, profiles);
    let sol = solve_conic_lp(&lp)?;
    let cert = certificate(Space::Euclidean, n, 1.0, &sol.x, &lay, profiles, 1.0);
    let atoms = std::iter::once(0.0)
        .chain(grid.iter().copied())
        .zip(&sol.duals)
        .filter(|(_, &u)| u > 0.0)
        .map(|(t, &u)| (t, u))
        .collect();
    Ok(RnDualSolution {
        certificate: cert,
        measure: RadialMeasure { n, atoms },
        cuts: sol.cuts,
        warnings: box_warnings(&sol.at_box, &lay),
    })
}

fn certificate(
    space: Space,
    n: usize,
    forbidden: f64,
    x: &[f64],
    lay: &Layout,
    profiles: &[ConstraintProfile],
    scale: f64,
) -> DualCertificate {
    let constraints: Vec<(ConstraintProfile, f64)> = profiles
        .iter()
        .enumerate()
        .map(|(j, p)| (p.clone(), x[1 + j].min(0.0)))
        .collect();
    let mut c = DualCertificate {
        space,
        n,
        forbidden,
        lambda: x[0],
        z1: x[lay.z1()],
        z2: x[lay.z2()] / scale,
        z3: (x[lay.z3()] / scale / scale).min(0.0),
        constraints,
        objective: 0.0,
    };
    c.objective = c.computed_objective();
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqp::{make_inequality, InequalityClass};
    use crate::configs::PointConfig;
    use crate::profiles::profile_from_bqp;

    #[test]
    fn sphere_base_bound() {
        let sol = solve_sphere_dual(3, 0.0, 30, &[]).unwrap();
        let c = &sol.certificate;
        assert!(c.objective >= 0.2929 && c.objective <= 0.40, "{}", c.objective);
        for k in 0..=30 {
            assert!(c.sphere_margin(k) >= -1e-9, "k = {k}: {}", c.sphere_margin(k));
        }
        assert!(c.block_min_eigenvalue() >= -1e-10);
        let p = fast::jacobi_table(3, 0.0, 30);
        let s: f64 = sol.kernel.a.iter().zip(&p).map(|(a, p)| a * p).sum();
        assert!(s.abs() < 1e-7);
        assert!(c.objective >= sol.kernel.total() - 1e-6);
    }

    #[test]
    fn rn_base_bound() {
        let grid = uniform_grid(0.05, 30.0).unwrap();
        assert_eq!(grid.len(), 600);
        let sol = solve_rn_dual(3, &grid, &[]).unwrap();
        let c = &sol.certificate;
        assert!(c.objective > 0.0 && c.objective <= 1.0, "{}", c.objective);
        let om = fast::FastOmega::new(3);
        let s: f64 = sol.measure.atoms.iter().map(|&(t, m)| m * om.eval(t)).sum();
        assert!(s.abs() < 1e-7);
        assert!(c.objective >= sol.measure.total() - 1e-6);
    }

    #[test]
    fn adding_a_profile_does_not_raise_the_bound() {
        let base = solve_sphere_dual(3, 0.0, 20, &[]).unwrap().certificate.objective;
        let pts = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let cfg = PointConfig::new(3, pts, Space::Sphere).unwrap();
        let ie = make_inequality(&InequalityClass::InclusionExclusion(3)).unwrap();
        let prof = profile_from_bqp(&cfg, &ie).unwrap();
        let with = solve_sphere_dual(3, 0.0, 20, &[prof]).unwrap().certificate;
        assert!(with.objective <= base + 1e-9);
        assert!(with.constraints.iter().all(|(_, y)| *y <= 0.0));
    }

    #[test]
    fn deterministic() {
        let a = solve_sphere_dual(4, 0.1, 25, &[]).unwrap().certificate;
        let b = solve_sphere_dual(4, 0.1, 25, &[]).unwrap().certificate;
        assert_eq!(a, b);
    }
}
