use super::{validate_inequality, BqpInequality, Kind, MAX_VALIDATE_N};
use crate::error::{Error, Result};

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Integer row echelon basis built one vector at a time.
struct Echelon {
    rows: Vec<(usize, Vec<i128>)>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis and keep it if independent.
    fn insert(&mut self, mut v: Vec<i128>) -> Result<bool> {
        for (pivot, row) in &self.rows {
            let a = v[*pivot];
            if a == 0 {
                continue;
            }
            let p = row[*pivot];
            let g = gcd(a, p);
            let (mv, mr) = (p / g, a / g);
            for (x, r) in v.iter_mut().zip(row) {
                *x = x
                    .checked_mul(mv)
                    .and_then(|y| r.checked_mul(mr).and_then(|z| y.checked_sub(z)))
                    .ok_or_else(|| Error::Budget("integer overflow in facet rank".into()))?;
            }
            let g = v.iter().fold(0, |g, &x| gcd(g, x));
            if g > 1 {
                v.iter_mut().for_each(|x| *x /= g);
            }
        }
        match v.iter().position(|&x| x != 0) {
            Some(p) => {
                self.rows.push((p, v));
                Ok(true)
            }
            None => Ok(false),
        }
    }
}

/// Whether the inequality defines a facet: BQC(N) for cone inequalities
/// (tight generators of linear rank D - 1), BQP(N) for polytope ones
/// (tight vertices of affine rank D - 1), D = N(N+1)/2. Invalid
/// inequalities are never facets.
pub fn is_facet(ineq: &BqpInequality) -> Result<bool> {
    let n = ineq.size();
    if n > MAX_VALIDATE_N {
        return Err(Error::Budget(format!("facet check is limited to N <= {MAX_VALIDATE_N}")));
    }
    let val = validate_inequality(ineq)?;
    if !val.valid || val.doubled_slack > 0 {
        return Ok(false);
    }
    if (0..n).all(|i| (0..n).all(|j| ineq.z2(i, j) == 0)) {
        return Ok(false);
    }
    let d = n * (n + 1) / 2;
    let (rhs, target, affine) = match ineq.kind() {
        Kind::Cone => (0, d - 1, false),
        Kind::Polytope => (ineq.beta2(), d, true),
    };
    let mut basis = Echelon::new();
    for mask in 0u64..(1 << n) {
        if ineq.doubled_value_at(mask) != rhs {
            continue;
        }
        let mut v = Vec::with_capacity(d + 1);
        if affine {
            v.push(1);
        }
        for i in 0..n {
            for j in i..n {
                v.push((mask >> i & mask >> j & 1) as i128);
            }
        }
        basis.insert(v)?;
        if basis.rank() == target {
            return Ok(true);
        }
    }
    Ok(false)
}
