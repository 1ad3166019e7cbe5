//! Valid inequalities of the Boolean-quadratic polytope BQP(N) and cone
//! BQC(N).
//!
//! Entries of Z in every class handled here are half-integers, so matrices
//! are stored as the integers 2Z and 2β and all checks are exact.

mod rank;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::configs::{independence_number, FiniteGraph};
use crate::error::{Error, Result};

pub use rank::is_facet;

/// Exhaustive validation is limited to 2^MAX_VALIDATE_N points.
pub const MAX_VALIDATE_N: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// ⟨Z, A⟩ ≥ β on BQP(N)
    Polytope,
    /// ⟨Z, A⟩ ≥ 0 on BQC(N)
    Cone,
}

/// ⟨Z, A⟩ ≥ β with Z symmetric, stored doubled.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BqpInequality {
    n: usize,
    z2: Vec<i64>,
    beta2: i64,
    kind: Kind,
    name: String,
}

impl BqpInequality {
    /// `z2` is 2Z in row-major order, `beta2` is 2β.
    pub fn from_doubled(n: usize, z2: Vec<i64>, beta2: i64, kind: Kind, name: impl Into<String>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("inequality needs at least one index".into()));
        }
        if z2.len() != n * n {
            return Err(Error::InvalidParameter(format!("expected {} entries, got {}", n * n, z2.len())));
        }
        for i in 0..n {
            for j in 0..i {
                if z2[i * n + j] != z2[j * n + i] {
                    return Err(Error::InvalidParameter(format!("Z is not symmetric at ({i}, {j})")));
                }
            }
        }
        if kind == Kind::Cone && beta2 != 0 {
            return Err(Error::InvalidParameter("cone inequalities have right-hand side 0".into()));
        }
        Ok(BqpInequality {
            n,
            z2,
            beta2,
            kind,
            name: name.into(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn z2(&self, i: usize, j: usize) -> i64 {
        self.z2[i * self.n + j]
    }

    pub fn z(&self, i: usize, j: usize) -> f64 {
        self.z2(i, j) as f64 / 2.0
    }

    pub fn beta2(&self) -> i64 {
        self.beta2
    }

    pub fn beta(&self) -> f64 {
        self.beta2 as f64 / 2.0
    }

    /// Σ Z(i, j) K(i, j) for a symmetric kernel matrix given entrywise.
    pub fn pair_sum(&self, k: impl Fn(usize, usize) -> f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.z(i, i) * k(i, i);
            for j in i + 1..self.n {
                s += 2.0 * self.z(i, j) * k(i, j);
            }
        }
        s
    }

    /// β - ⟨Z, K⟩; positive means K violates the inequality.
    pub fn violation(&self, k: impl Fn(usize, usize) -> f64) -> f64 {
        self.beta() - self.pair_sum(k)
    }

    /// 2⟨Z, f ⊗ f⟩ for the 0/1 vector with bit i of `mask` as f_i.
    pub fn doubled_value_at(&self, mask: u64) -> i64 {
        let on: Vec<usize> = (0..self.n).filter(|i| mask >> i & 1 == 1).collect();
        on.iter().map(|&i| on.iter().map(|&j| self.z2(i, j)).sum::<i64>()).sum()
    }

    /// Relabel: index i moves to position perm[i].
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut z2 = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                z2[perm[i] * n + perm[j]] = self.z2(i, j);
            }
        }
        BqpInequality {
            n,
            z2,
            beta2: self.beta2,
            kind: self.kind,
            name: self.name.clone(),
        }
    }
}

impl fmt::Display for BqpInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (N = {}, {:?}, beta = {})", self.name, self.n, self.kind, self.beta())
    }
}

/// Parametric families of valid inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InequalityClass {
    /// Σ_{i<j} f_i f_j - s Σ f_i ≥ -s(s+1)/2
    Clique { n: usize, s: i64 },
    InclusionExclusion(usize),
    /// (b·f - k)(b·f - k - 1) ≥ 0 where Σ b = 2k + 1
    Hypermetric(Vec<i64>),
}

impl FromStr for InequalityClass {
    type Err = Error;

    /// `ie(N)`, `clique(N,s)`, `hypermetric(b1,...,bN)`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse inequality class `{s}`"));
        let (head, args) = s.split_once('(').ok_or_else(bad)?;
        let args = args.strip_suffix(')').ok_or_else(bad)?;
        let nums: Vec<i64> = args
            .split(',')
            .map(|a| a.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match (head.trim(), nums.as_slice()) {
            ("ie" | "inclusion_exclusion", &[n]) if n > 0 => Ok(InequalityClass::InclusionExclusion(n as usize)),
            ("clique", &[n, s]) if n > 0 => Ok(InequalityClass::Clique { n: n as usize, s }),
            ("hypermetric" | "hyper", b) if !b.is_empty() => Ok(InequalityClass::Hypermetric(b.to_vec())),
            _ => Err(bad()),
        }
    }
}

pub fn make_inequality(class: &InequalityClass) -> Result<BqpInequality> {
    match class {
        InequalityClass::InclusionExclusion(n) => {
            let mut ineq = clique(*n, 1)?;
            ineq.name = format!("ie({n})");
            Ok(ineq)
        }
        InequalityClass::Clique { n, s } => clique(*n, *s),
        InequalityClass::Hypermetric(b) => hypermetric(b),
    }
}

fn clique(n: usize, s: i64) -> Result<BqpInequality> {
    if n < 1 || s < 1 {
        return Err(Error::InvalidParameter(format!("clique inequality needs N >= 1 and s >= 1, got N = {n}, s = {s}")));
    }
    let mut z2 = vec![1; n * n];
    for i in 0..n {
        z2[i * n + i] = -2 * s;
    }
    BqpInequality::from_doubled(n, z2, -s * (s + 1), Kind::Polytope, format!("clique({n},{s})"))
}

fn hypermetric(b: &[i64]) -> Result<BqpInequality> {
    let n = b.len();
    let sigma: i64 = b.iter().sum();
    if sigma.rem_euclid(2) != 1 {
        return Err(Error::InvalidParameter(format!(
            "hypermetric coefficients must have an odd sum, got {sigma}"
        )));
    }
    let k = (sigma - 1) / 2;
    let mut z2 = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            z2[i * n + j] = 2 * b[i] * b[j];
        }
        z2[i * n + i] -= 2 * sigma * b[i];
    }
    let args: Vec<String> = b.iter().map(i64::to_string).collect();
    BqpInequality::from_doubled(n, z2, -2 * k * (k + 1), Kind::Polytope, format!("hypermetric({})", args.join(",")))
}

/// Cone inequality ⟨Q_G, A⟩ ≥ 0 on the vertices of `g` plus one extra
/// index, placed last: corner α(G), border -1/2, 1/2 on edges.
pub fn make_qg(g: &FiniteGraph) -> Result<BqpInequality> {
    let nv = g.vertex_count();
    if nv < 2 {
        return Err(Error::InvalidParameter("Q_G needs a graph with at least two vertices".into()));
    }
    let alpha = independence_number(g)? as i64;
    let n = nv + 1;
    let mut z2 = vec![0; n * n];
    z2[nv * n + nv] = 2 * alpha;
    for v in 0..nv {
        z2[v * n + nv] = -1;
        z2[nv * n + v] = -1;
    }
    for &(u, v) in g.edges() {
        z2[u * n + v] = 1;
        z2[v * n + u] = 1;
    }
    BqpInequality::from_doubled(n, z2, 0, Kind::Cone, "Q_G")
}

/// Outcome of exhaustive validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub valid: bool,
    /// 2 min_f ⟨Z, f ⊗ f⟩ - 2β (nonnegative iff valid)
    pub doubled_slack: i64,
    /// Smallest mask attaining the minimum; bit i is f_i.
    pub witness: u64,
}

/// Check ⟨Z, f ⊗ f⟩ ≥ β (or ≥ 0 for cones) over all f ∈ {0,1}^N.
pub fn validate_inequality(ineq: &BqpInequality) -> Result<Validation> {
    let n = ineq.size();
    if n > MAX_VALIDATE_N {
        return Err(Error::Budget(format!(
            "exhaustive validation is limited to N <= {MAX_VALIDATE_N}, got {n}"
        )));
    }
    let rhs = match ineq.kind() {
        Kind::Polytope => ineq.beta2(),
        Kind::Cone => 0,
    };
    // Gray-code walk; row[i] = Σ_{j on} 2Z(i, j) over j ≠ i
    let mut row = vec![0i64; n];
    let mut mask = 0u64;
    let mut value = 0i64;
    let mut best = (0i64, 0u64);
    for step in 1u64..(1 << n) {
        let i = step.trailing_zeros() as usize;
        let turning_on = mask >> i & 1 == 0;
        let delta = ineq.z2(i, i) + 2 * row[i];
        if turning_on {
            value += delta;
        } else {
            value -= delta;
        }
        mask ^= 1 << i;
        for (j, r) in row.iter_mut().enumerate() {
            if j != i {
                let zij = ineq.z2(i, j);
                if turning_on {
                    *r += zij;
                } else {
                    *r -= zij;
                }
            }
        }
        if value < best.0 || (value == best.0 && mask < best.1) {
            best = (value, mask);
        }
    }
    Ok(Validation {
        valid: best.0 >= rhs,
        doubled_slack: best.0 - rhs,
        witness: best.1,
    })
}

/// Facet list in text form: header `bqp-facets N=<N>`, then per line β and
/// the upper triangle (row-major, diagonal included) of 2Z as integers.
pub fn parse_facet_list(text: &str) -> Result<Vec<BqpInequality>> {
    let mut n: Option<usize> = None;
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(size) = n else {
            let rest = line
                .strip_prefix("bqp-facets")
                .and_then(|r| r.trim().strip_prefix("N="))
                .ok_or_else(|| Error::parse(line_no, "expected `bqp-facets N=<N>`"))?;
            n = Some(rest.trim().parse().map_err(|e| Error::parse(line_no, format!("{e}")))?);
            continue;
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let tri = size * (size + 1) / 2;
        if toks.len() != tri + 1 {
            return Err(Error::parse(line_no, format!("expected {} numbers, found {}", tri + 1, toks.len())));
        }
        let beta: f64 = toks[0].parse().map_err(|e| Error::parse(line_no, format!("bad beta: {e}")))?;
        let beta2 = (2.0 * beta).round();
        if beta2 != 2.0 * beta {
            return Err(Error::parse(line_no, "beta must be a multiple of 1/2"));
        }
        let mut z2 = vec![0; size * size];
        let mut it = toks[1..].iter();
        for i in 0..size {
            for j in i..size {
                let v: i64 = it
                    .next()
                    .unwrap()
                    .parse()
                    .map_err(|e| Error::parse(line_no, format!("bad entry: {e}")))?;
                z2[i * size + j] = v;
                z2[j * size + i] = v;
            }
        }
        let ineq = BqpInequality::from_doubled(size, z2, beta2 as i64, Kind::Polytope, format!("import:{line_no}"))?;
        if !validate_inequality(&ineq)?.valid {
            return Err(Error::parse(line_no, "imported inequality is not valid for BQP"));
        }
        out.push(ineq);
    }
    if n.is_none() {
        return Err(Error::parse(0, "missing `bqp-facets` header"));
    }
    Ok(out)
}

pub fn write_facet_list(ineqs: &[BqpInequality]) -> Result<String> {
    let n = ineqs.first().map_or(0, BqpInequality::size);
    let mut s = format!("bqp-facets N={n}\n");
    for q in ineqs {
        if q.size() != n {
            return Err(Error::InvalidParameter("facet list mixes index-set sizes".into()));
        }
        let mut toks = vec![format!("{}", q.beta())];
        for i in 0..n {
            for j in i..n {
                toks.push(q.z2(i, j).to_string());
            }
        }
        s.push_str(&toks.join(" "));
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusion_exclusion_entries() {
        let q = make_inequality(&InequalityClass::InclusionExclusion(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(q.z(i, j), if i == j { -1.0 } else { 0.5 });
            }
        }
        assert_eq!(q.beta(), -1.0);
        let q2 = make_inequality(&InequalityClass::InclusionExclusion(2)).unwrap();
        assert_eq!(q2.doubled_value_at(0b11), -2);
    }

    #[test]
    fn hypermetric_small() {
        let q = make_inequality(&"hypermetric(1,1,-1)".parse().unwrap()).unwrap();
        // brute force over the 8 points
        for mask in 0u64..8 {
            let f: Vec<i64> = (0..3).map(|i| (mask >> i & 1) as i64).collect();
            let bf = f[0] + f[1] - f[2];
            assert_eq!(q.doubled_value_at(mask), 2 * bf * (bf - 1));
            assert!(bf * (bf - 1) >= 0);
        }
        assert!(validate_inequality(&q).unwrap().valid);
        assert!(make_inequality(&InequalityClass::Hypermetric(vec![1, 1])).is_err());
    }

    #[test]
    fn qg_of_edge() {
        let q = make_qg(&FiniteGraph::complete(2)).unwrap();
        assert_eq!(q.z(2, 2), 1.0);
        assert_eq!(q.z(0, 2), -0.5);
        assert_eq!(q.z(0, 1), 0.5);
        assert_eq!(q.z(0, 0), 0.0);
        let c5 = make_qg(&FiniteGraph::cycle(5)).unwrap();
        assert_eq!(c5.z(5, 5), 2.0);
    }

    #[test]
    fn gray_walk_matches_direct_evaluation() {
        let q = make_inequality(&"hypermetric(2,1,-1,-1,0)".parse().unwrap()).unwrap();
        let v = validate_inequality(&q).unwrap();
        let direct = (0u64..32).map(|m| (q.doubled_value_at(m), m)).min().unwrap();
        assert_eq!(v.doubled_slack + q.beta2(), direct.0);
        assert_eq!(v.witness, direct.1);
    }

    #[test]
    fn invalid_detected() {
        let q = BqpInequality::from_doubled(2, vec![-2, 0, 0, -2], 0, Kind::Polytope, "bad").unwrap();
        let v = validate_inequality(&q).unwrap();
        assert!(!v.valid);
        assert_eq!(v.witness, 0b11);
    }

    #[test]
    fn facet_file_round_trip() {
        let qs: Vec<_> = (1..=2)
            .map(|s| make_inequality(&InequalityClass::Clique { n: 4, s }).unwrap())
            .collect();
        let text = write_facet_list(&qs).unwrap();
        let back = parse_facet_list(&text).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in qs.iter().zip(&back) {
            assert_eq!(a.z2, b.z2);
            assert_eq!(a.beta2, b.beta2);
        }
        assert!(parse_facet_list("bqp-facets N=2\n0 -2 0 -2\n").is_err());
    }
}
