//! Nelder–Mead downhill simplex (minimization).

#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct NmOptions {
    pub step: f64,
    pub max_evals: usize,
    pub ftol: f64,
    pub xtol: f64,
}

pub fn minimize(f: &mut impl FnMut(&[f64]) -> f64, x0: &[f64], opt: NmOptions) -> NmResult {
    let dim = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    pts.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += opt.step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut evals = dim + 1;
    let mut converged = false;
    let mut centroid = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut trial2 = vec![0.0; dim];
    while evals < opt.max_evals {
        // order: best first
        let mut idx: Vec<usize> = (0..=dim).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        pts = idx.iter().map(|&i| pts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        let spread = vals[dim] - vals[0];
        let size = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opt.ftol * (1.0 + vals[0].abs()) && size <= opt.xtol {
            converged = true;
            break;
        }
        centroid.iter_mut().for_each(|c| *c = 0.0);
        for p in &pts[..dim] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }
        let worst = pts[dim].clone();
        let along = |t: f64, out: &mut Vec<f64>| {
            for k in 0..dim {
                out[k] = centroid[k] + t * (worst[k] - centroid[k]);
            }
        };
        along(-1.0, &mut trial);
        let fr = f(&trial);
        evals += 1;
        if fr < vals[0] {
            along(-2.0, &mut trial2);
            let fe = f(&trial2);
            evals += 1;
            if fe < fr {
                pts[dim].clone_from(&trial2);
                vals[dim] = fe;
            } else {
                pts[dim].clone_from(&trial);
                vals[dim] = fr;
            }
            continue;
        }
        if fr < vals[dim - 1] {
            pts[dim].clone_from(&trial);
            vals[dim] = fr;
            continue;
        }
        // contraction, outside or inside
        let (t, bound) = if fr < vals[dim] { (-0.5, fr) } else { (0.5, vals[dim]) };
        along(t, &mut trial2);
        let fc = f(&trial2);
        evals += 1;
        if fc < bound {
            pts[dim].clone_from(&trial2);
            vals[dim] = fc;
            continue;
        }
        // shrink toward the best point
        for i in 1..=dim {
            for k in 0..dim {
                pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
            }
            vals[i] = f(&pts[i]);
        }
        evals += dim;
    }
    let best = (0..=dim).min_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b))).unwrap();
    NmResult {
        x: pts[best].clone(),
        value: vals[best],
        evals,
        converged,
    }
}
