//! One-dimensional profiles of geometric BQP constraints.
//!
//! A constraint ⟨Z, A⟩ ≥ β on a finite point set only enters the dual
//! programs through l(v) = Σ_{pairs at value v} Z(x, y), where v is the
//! inner product (sphere) or the distance (euclidean) of the pair.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::bqp::{BqpInequality, Kind};
use crate::configs::{distance_graph, independence_number, FiniteGraph, PointConfig, Space, DEFAULT_MATCH_TOL};
use crate::error::{Error, Result};
use crate::specfun::{fast, JacobiIter, OmegaEvaluator, Precision};

pub const GROUPING_TOL: f64 = 1e-12;

/// Distinct clusters closer than this many tolerances are ambiguous.
const SEPARATION_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintProfile {
    space: Space,
    n: usize,
    /// (value, coefficient), sorted by value
    support: Vec<(f64, f64)>,
    beta: f64,
    note: String,
}

impl ConstraintProfile {
    pub fn new(space: Space, n: usize, mut support: Vec<(f64, f64)>, beta: f64, note: impl Into<String>) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension(n));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter("profile right-hand side must be finite".into()));
        }
        for &(v, c) in &support {
            if !v.is_finite() || !c.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite support entry ({v}, {c})")));
            }
            match space {
                Space::Sphere if v.abs() > 1.0 => {
                    return Err(Error::Domain(format!("sphere profile value {v} outside [-1, 1]")))
                }
                Space::Euclidean if v < 0.0 => {
                    return Err(Error::Domain(format!("euclidean profile value {v} is negative")))
                }
                _ => {}
            }
        }
        support.sort_by(|a, b| a.0.total_cmp(&b.0));
        if support.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("profile support values must be distinct".into()));
        }
        Ok(ConstraintProfile {
            space,
            n,
            support,
            beta,
            note: note.into(),
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn note(&self) -> &str {
        &self.note
    }

    /// l(v), zero off the support.
    pub fn coefficient(&self, v: f64) -> f64 {
        self.support.iter().find(|s| s.0 == v).map_or(0.0, |s| s.1)
    }

    /// The same profile read in a larger ambient dimension (the pair values
    /// do not change when R^m sits inside R^n).
    pub fn with_dimension(&self, n: usize) -> Result<Self> {
        if n < self.n && self.space == Space::Sphere {
            return Err(Error::InvalidParameter("cannot lower the dimension of a sphere profile".into()));
        }
        let mut p = self.clone();
        p.n = n;
        Ok(p)
    }

    /// r(0) = Σ l(v) for both spaces.
    pub fn total(&self) -> f64 {
        self.support.iter().map(|s| s.1).sum()
    }

    /// r(k) = Σ l(v) P_k^n(v) (sphere) or r(t) = Σ l(v) Ω_n(t v) (euclidean).
    pub fn eval(&self, arg: f64, prec: Precision) -> Result<Float> {
        if !(arg >= 0.0) {
            return Err(Error::Domain(format!("profile argument must be >= 0, got {arg}")));
        }
        let bits = prec.guarded(16);
        let mut sum = Float::with_val(bits, 0);
        match self.space {
            Space::Sphere => {
                if arg.fract() != 0.0 {
                    return Err(Error::Domain(format!("sphere profiles take integer degrees, got {arg}")));
                }
                let k = arg as u64;
                for &(v, c) in &self.support {
                    let mut it = JacobiIter::new(self.n, &Float::with_val(bits, v), bits);
                    for _ in 0..k {
                        it.advance();
                    }
                    sum += Float::with_val(bits, it.current() * c);
                }
            }
            Space::Euclidean => {
                let om = OmegaEvaluator::new(self.n, Precision::new(bits)?)?;
                for &(v, c) in &self.support {
                    let tv = Float::with_val(bits + 8, arg) * v;
                    sum += om.eval(&tv) * c;
                }
            }
        }
        sum.set_prec(prec.bits());
        Ok(sum)
    }

    /// r(k) for k = 0..=d in double precision.
    pub fn sphere_table(&self, d: usize) -> Vec<f64> {
        let mut out = vec![0.0; d + 1];
        let mut tab = vec![0.0; d + 1];
        for &(v, c) in &self.support {
            fast::jacobi_fill(self.n, v, &mut tab);
            for (o, p) in out.iter_mut().zip(&tab) {
                *o += c * p;
            }
        }
        out
    }

    /// r(t) in double precision with a prepared Ω_n evaluator.
    pub fn eval_fast(&self, om: &fast::FastOmega, t: f64) -> f64 {
        self.support.iter().map(|&(v, c)| c * om.eval(t * v)).sum()
    }
}

fn pair_value(space: Space, a: &[f64], b: &[f64]) -> f64 {
    // products of doubles are exact at 106 bits; 256 bits keep the sums exact
    // for any reasonable exponent spread
    let bits = 256;
    let mut s = Float::with_val(bits, 0);
    match space {
        Space::Sphere => {
            for (x, y) in a.iter().zip(b) {
                s += Float::with_val(bits, x) * y;
            }
            s.to_f64()
        }
        Space::Euclidean => {
            for (x, y) in a.iter().zip(b) {
                let d = Float::with_val(bits, x) - y;
                s += d.square();
            }
            s.sqrt().to_f64()
        }
    }
}

/// Group (value, weight) pairs into clusters of nearly equal values.
fn group(space: Space, mut vals: Vec<(f64, f64)>, tol: f64) -> Result<Vec<(f64, f64)>> {
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut clusters: Vec<(f64, f64, f64, f64, usize)> = Vec::new(); // lo, hi, sum of v, weight, count
    for (v, w) in vals {
        match clusters.last_mut() {
            Some(c) if v - c.1 <= tol => {
                c.1 = v;
                c.2 += v;
                c.3 += w;
                c.4 += 1;
            }
            _ => clusters.push((v, v, v, w, 1)),
        }
    }
    for c in &clusters {
        if c.1 - c.0 > tol {
            return Err(Error::AmbiguousGrouping(c.0, c.1));
        }
    }
    for w in clusters.windows(2) {
        if w[1].0 - w[0].1 <= SEPARATION_FACTOR * tol {
            return Err(Error::AmbiguousGrouping(w[0].1, w[1].0));
        }
    }
    let mut out = Vec::new();
    for (_, _, vsum, w, count) in clusters {
        let mut v = vsum / count as f64;
        if space == Space::Sphere {
            for exact in [-1.0, 0.0, 1.0] {
                if (v - exact).abs() <= tol {
                    v = exact;
                }
            }
        } else if v.abs() <= tol {
            v = 0.0;
        }
        if w != 0.0 {
            out.push((v, w));
        }
    }
    Ok(out)
}

/// Reduce ⟨Z, A⟩ ≥ β on the points of `cfg` to its profile.
pub fn profile_from_bqp(cfg: &PointConfig, ineq: &BqpInequality) -> Result<ConstraintProfile> {
    profile_from_bqp_with(cfg, ineq, GROUPING_TOL)
}

pub fn profile_from_bqp_with(cfg: &PointConfig, ineq: &BqpInequality, tol: f64) -> Result<ConstraintProfile> {
    let m = cfg.len();
    if m != ineq.size() {
        return Err(Error::InvalidParameter(format!(
            "configuration has {m} points, inequality has N = {}",
            ineq.size()
        )));
    }
    let space = cfg.space();
    let diag_value = match space {
        Space::Sphere => 1.0,
        Space::Euclidean => 0.0,
    };
    let diag: f64 = (0..m).map(|i| ineq.z(i, i)).sum();
    let mut vals = Vec::with_capacity(m * (m - 1) / 2);
    let pts = cfg.points();
    for i in 0..m {
        for j in i + 1..m {
            let z = ineq.z(i, j);
            if z != 0.0 {
                vals.push((pair_value(space, &pts[i], &pts[j]), 2.0 * z));
            }
        }
    }
    let mut support = group(space, vals, tol)?;
    match support.iter_mut().find(|s| s.0 == diag_value) {
        Some(s) => s.1 += diag,
        None => support.push((diag_value, diag)),
    }
    support.retain(|s| s.1 != 0.0);
    let beta = match ineq.kind() {
        Kind::Polytope => ineq.beta(),
        Kind::Cone => 0.0,
    };
    ConstraintProfile::new(space, cfg.dim().max(2), support, beta, ineq.name().to_string())
}

/// Matrix Z of a subgraph constraint on U ∪ {x0} (x0 last): corner α,
/// border -1/2, 1/2 on edges of `graph` (a graph on the points of U).
pub fn subgraph_inequality(graph: &FiniteGraph, alpha: usize) -> Result<BqpInequality> {
    let computed = independence_number(graph)?;
    if computed != alpha {
        return Err(Error::InvalidParameter(format!(
            "stated independence number {alpha} differs from the computed {computed}"
        )));
    }
    let nv = graph.vertex_count();
    let n = nv + 1;
    let mut z2 = vec![0; n * n];
    z2[nv * n + nv] = 2 * alpha as i64;
    for v in 0..nv {
        z2[v * n + nv] = -1;
        z2[nv * n + v] = -1;
    }
    for &(u, v) in graph.edges() {
        z2[u * n + v] = 1;
        z2[v * n + u] = 1;
    }
    BqpInequality::from_doubled(n, z2, 0, Kind::Cone, format!("subgraph(alpha={alpha})"))
}

/// Profile of Σ_{y∈U} A(x0, y) ≤ α(G[U]) A(x0, x0), through the cone
/// inequality of [`subgraph_inequality`].
pub fn profile_from_subgraph(cfg: &PointConfig, x0: &[f64], graph: &FiniteGraph, alpha: usize) -> Result<ConstraintProfile> {
    if graph.vertex_count() != cfg.len() {
        return Err(Error::InvalidParameter("graph and configuration sizes differ".into()));
    }
    let ineq = subgraph_inequality(graph, alpha)?;
    let full = cfg.with_point(x0.to_vec())?;
    let mut p = profile_from_bqp(&full, &ineq)?;
    p.note = format!("subgraph(|U|={}, alpha={alpha})", cfg.len());
    Ok(p)
}

/// Subgraph constraint of a whole configuration: points scaled to unit
/// minimal distance, the unit-distance graph with its exact independence
/// number, and x0 at the centroid.
pub fn centered_subgraph_profile(cfg: &PointConfig) -> Result<ConstraintProfile> {
    let cfg = cfg.as_euclidean();
    let d = cfg
        .min_distance()
        .ok_or_else(|| Error::InvalidParameter("configuration has fewer than two points".into()))?;
    let cfg = cfg.scaled(1.0 / d)?;
    let graph = distance_graph(&cfg, &[1.0], DEFAULT_MATCH_TOL);
    let alpha = independence_number(&graph)?;
    let mut x0 = vec![0.0; cfg.dim()];
    for p in cfg.points() {
        for (c, v) in x0.iter_mut().zip(p) {
            *c += v / cfg.len() as f64;
        }
    }
    profile_from_subgraph(&cfg, &x0, &graph, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqp::{make_inequality, validate_inequality, InequalityClass};
    use crate::configs::{distance_graph, generate_config, ConfigName};

    fn ortho() -> PointConfig {
        PointConfig::new(3, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], Space::Sphere).unwrap()
    }

    #[test]
    fn identity_on_orthonormal_pair() {
        let q = BqpInequality::from_doubled(2, vec![2, 0, 0, 2], 1, Kind::Polytope, "id").unwrap();
        let p = profile_from_bqp(&ortho(), &q).unwrap();
        assert_eq!(p.support(), &[(1.0, 2.0)]);
        assert_eq!(p.beta(), 0.5);
    }

    #[test]
    fn all_ones_on_orthonormal_pair() {
        let q = BqpInequality::from_doubled(2, vec![2; 4], 0, Kind::Polytope, "ones").unwrap();
        let p = profile_from_bqp(&ortho(), &q).unwrap();
        assert_eq!(p.support(), &[(0.0, 2.0), (1.0, 2.0)]);
    }

    #[test]
    fn inclusion_exclusion_on_unit_simplex() {
        let cfg = generate_config(&ConfigName::Simplex(3)).unwrap();
        let q = make_inequality(&InequalityClass::InclusionExclusion(4)).unwrap();
        let p = profile_from_bqp(&cfg, &q).unwrap();
        // 12 ordered pairs at distance 1, each with Z = 1/2
        assert_eq!(p.support(), &[(0.0, -4.0), (1.0, 6.0)]);
        assert_eq!(p.beta(), -1.0);
        assert_eq!(p.total(), 2.0);
    }

    #[test]
    fn sphere_evaluation() {
        let p = ConstraintProfile::new(Space::Sphere, 3, vec![(1.0, 2.0)], 0.0, "").unwrap();
        for k in [0.0, 1.0, 17.0] {
            assert_eq!(p.eval(k, Precision::default()).unwrap().to_f64(), 2.0);
        }
        let p = ConstraintProfile::new(Space::Sphere, 4, vec![(-0.3, 1.5), (0.2, -0.5)], 0.0, "").unwrap();
        assert!((p.eval(0.0, Precision::default()).unwrap().to_f64() - 1.0).abs() < 1e-30);
        let tab = p.sphere_table(40);
        for k in [0usize, 3, 40] {
            let e = p.eval(k as f64, Precision::default()).unwrap().to_f64();
            assert!((tab[k] - e).abs() < 1e-13);
        }
    }

    #[test]
    fn euclidean_evaluation_at_first_sinc_zero() {
        let p = ConstraintProfile::new(Space::Euclidean, 3, vec![(1.0, 1.0)], 0.0, "").unwrap();
        let v = p.eval(std::f64::consts::PI, Precision::default()).unwrap();
        assert!(v.to_f64().abs() < 1e-15);
    }

    #[test]
    fn ambiguity_is_an_error() {
        let cfg = PointConfig::new(
            1,
            vec![vec![0.0], vec![1.0], vec![2.0 + 5e-12]],
            Space::Euclidean,
        )
        .unwrap();
        let q = BqpInequality::from_doubled(3, vec![1; 9], 0, Kind::Polytope, "ones").unwrap();
        assert!(matches!(profile_from_bqp(&cfg, &q), Err(Error::AmbiguousGrouping(..))));
    }

    #[test]
    fn subgraph_profiles() {
        let cfg = PointConfig::new(3, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], Space::Sphere).unwrap();
        let g = distance_graph(&cfg, &[0.0], 1e-9);
        assert!(profile_from_subgraph(&cfg, &[0.0, 0.0, 1.0], &g, 2).is_err());
        let p = profile_from_subgraph(&cfg, &[0.0, 0.0, 1.0], &g, 1).unwrap();
        // diagonal gives α = 1 at value 1; border and edge pairs sit at 0
        assert_eq!(p.support(), &[(0.0, -1.0), (1.0, 1.0)]);
        assert_eq!(p.beta(), 0.0);
        let q = subgraph_inequality(&g, 1).unwrap();
        assert!(validate_inequality(&q).unwrap().valid);
    }
}
