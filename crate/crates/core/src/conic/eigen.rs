//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

/// Eigenvalues ascending with matching unit eigenvectors, for a row-major
/// symmetric `m × m` matrix.
pub fn symmetric_eigen(a: &[f64], m: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), m * m);
    let mut a = a.to_vec();
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum();
        let diag: f64 = (0..m).map(|i| a[i * m + i] * a[i * m + i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - s * vkq;
                    v[k * m + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&i, &j| a[i * m + i].total_cmp(&a[j * m + j]).then(i.cmp(&j)));
    let vals = idx.iter().map(|&i| a[i * m + i]).collect();
    let vecs = idx.iter().map(|&i| (0..m).map(|k| v[k * m + i]).collect()).collect();
    (vals, vecs)
}

/// Smallest eigenvalue of [[a, b], [b, c]] and a unit eigenvector.
pub fn min_eigen_2x2(a: f64, b: f64, c: f64) -> (f64, [f64; 2]) {
    let mean = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let lam = mean - r;
    // pick the better conditioned of the two null-vector formulas
    let (x, y) = if (a - lam).abs() >= (c - lam).abs() {
        (-b, a - lam)
    } else {
        (c - lam, -b)
    };
    let norm = x.hypot(y);
    if norm == 0.0 {
        (lam, [1.0, 0.0])
    } else {
        (lam, [x / norm, y / norm])
    }
}
