use cpbound::bqp::{make_inequality, BqpInequality, InequalityClass};
use cpbound::configs::{
    distance_graph, generate_config, independence_number, ConfigName, FiniteGraph, PointConfig, Space,
};
use cpbound::profiles::profile_from_bqp;
use cpbound::specfun::{JacobiIter, OmegaEvaluator, Precision};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

fn brute_alpha(g: &FiniteGraph) -> usize {
    let n = g.vertex_count();
    let mut nb = vec![0u32; n];
    for &(u, v) in g.edges() {
        nb[u] |= 1 << v;
        nb[v] |= 1 << u;
    }
    (0u32..1 << n)
        .filter(|&s| (0..n).all(|i| s >> i & 1 == 0 || nb[i] & s == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap()
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> FiniteGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..i {
            if rng.gen::<f64>() < p {
                edges.push((j, i));
            }
        }
    }
    FiniteGraph::new(n, edges).unwrap()
}

#[test]
fn alpha_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..60 {
        let n = 1 + trial % 20;
        let p = [0.1, 0.3, 0.5, 0.8][trial % 4];
        let g = random_graph(&mut rng, n, p);
        assert_eq!(independence_number(&g).unwrap(), brute_alpha(&g), "{g:?}");
    }
}

#[test]
fn cell600_vertex_figure() {
    let cfg = generate_config(&ConfigName::Cell600).unwrap();
    let d = cfg.min_distance().unwrap();
    let g = distance_graph(&cfg.as_euclidean(), &[d], 1e-9);
    let mut deg = vec![0; cfg.len()];
    for &(u, v) in g.edges() {
        deg[u] += 1;
        deg[v] += 1;
    }
    assert!(deg.iter().all(|&k| k == 12));
}

fn random_sphere_points(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| loop {
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r > 0.1 && r < 1.0 {
                break p.iter().map(|x| x / r).collect();
            }
        })
        .collect()
}

fn random_inequality(rng: &mut ChaCha8Rng, m: usize) -> BqpInequality {
    let class = match rng.gen_range(0..3) {
        0 => InequalityClass::InclusionExclusion(m),
        1 => InequalityClass::Clique {
            n: m,
            s: rng.gen_range(1..m as i64),
        },
        _ => {
            let mut b: Vec<i64> = (0..m).map(|_| rng.gen_range(-1..=1)).collect();
            if b.iter().sum::<i64>().rem_euclid(2) == 0 {
                b[0] += 1;
            }
            InequalityClass::Hypermetric(b)
        }
    };
    make_inequality(&class).unwrap()
}

fn direct_sphere(cfg: &PointConfig, q: &BqpInequality, k: usize, bits: u32) -> Float {
    let pts = cfg.points();
    let mut s = Float::with_val(bits, 0);
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            let mut ip = Float::with_val(256, 0);
            for (a, b) in pts[i].iter().zip(&pts[j]) {
                ip += Float::with_val(256, a) * b;
            }
            let v = if i == j { 1.0 } else { ip.to_f64() };
            let mut it = JacobiIter::new(cfg.dim(), &Float::with_val(bits, v), bits);
            for _ in 0..k {
                it.advance();
            }
            s += Float::with_val(bits, it.current() * q.z(i, j));
        }
    }
    s
}

fn direct_rn(cfg: &PointConfig, q: &BqpInequality, t: f64, bits: u32) -> Float {
    let pts = cfg.points();
    let om = OmegaEvaluator::new(cfg.dim(), Precision::new(bits).unwrap()).unwrap();
    let mut s = Float::with_val(bits, 0);
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            let mut d2 = Float::with_val(256, 0);
            for (a, b) in pts[i].iter().zip(&pts[j]) {
                d2 += (Float::with_val(256, a) - b).square();
            }
            let d = d2.sqrt().to_f64();
            s += om.eval(&(Float::with_val(bits + 8, t) * d)) * q.z(i, j);
        }
    }
    s
}

#[test]
fn profiles_match_direct_double_sums() {
    let prec = Precision::default();
    let bits = prec.bits() + 16;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tol = 2f64.powi(-(prec.bits() as i32 - 15));
    for trial in 0..50 {
        let m = rng.gen_range(3..=6);
        let q = random_inequality(&mut rng, m);
        if trial % 2 == 0 {
            let cfg = PointConfig::new(3, random_sphere_points(&mut rng, 3, m), Space::Sphere).unwrap();
            let p = profile_from_bqp(&cfg, &q).unwrap();
            for k in [0usize, 1, 2, 7, 30] {
                let got = p.eval(k as f64, prec).unwrap();
                let want = direct_sphere(&cfg, &q, k, bits);
                let scale = 1.0 + p.support().iter().map(|s| s.1.abs()).sum::<f64>();
                assert!((got - want).to_f64().abs() <= tol * scale, "trial {trial} k {k}");
            }
        } else {
            let pts: Vec<Vec<f64>> = (0..m).map(|_| (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect();
            let cfg = PointConfig::new(3, pts, Space::Euclidean).unwrap();
            let p = profile_from_bqp(&cfg, &q).unwrap();
            for t in [0.0, 0.5, 3.0, 11.0] {
                let got = p.eval(t, prec).unwrap();
                let want = direct_rn(&cfg, &q, t, bits);
                let scale = 1.0 + p.support().iter().map(|s| s.1.abs()).sum::<f64>();
                assert!((got - want).to_f64().abs() <= tol * scale, "trial {trial} t {t}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_graph_commutes_with_relabeling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // integer points give exact unit and √2 distances
        let pts: Vec<Vec<f64>> = (0..9).map(|_| (0..3).map(|_| rng.gen_range(0..3) as f64).collect()).collect();
        let mut uniq = pts.clone();
        uniq.sort_by(|a, b| a.partial_cmp(b).unwrap());
        uniq.dedup();
        let m = uniq.len();
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let cfg = PointConfig::new(3, uniq.clone(), Space::Euclidean).unwrap();
        // point i of `moved` is point perm⁻¹(i) of cfg, i.e. cfg point j lands at perm[j]
        let mut moved = vec![Vec::new(); m];
        for (j, p) in uniq.iter().enumerate() {
            moved[perm[j]] = p.clone();
        }
        let cfg2 = PointConfig::new(3, moved, Space::Euclidean).unwrap();
        let f = [1.0, 2f64.sqrt()];
        let g1 = distance_graph(&cfg, &f, 1e-9).permuted(&perm);
        let g2 = distance_graph(&cfg2, &f, 1e-9);
        let mut e1 = g1.edges().to_vec();
        let mut e2 = g2.edges().to_vec();
        e1.sort();
        e2.sort();
        prop_assert_eq!(e1, e2);
    }

    #[test]
    fn profile_is_stable_under_point_permutation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(3..=6);
        let q = make_inequality(&InequalityClass::InclusionExclusion(m)).unwrap();
        let pts = random_sphere_points(&mut rng, 4, m);
        let mut shuffled = pts.clone();
        for i in (1..m).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        let a = profile_from_bqp(&PointConfig::new(4, pts, Space::Sphere).unwrap(), &q).unwrap();
        let b = profile_from_bqp(&PointConfig::new(4, shuffled, Space::Sphere).unwrap(), &q).unwrap();
        // inclusion-exclusion is symmetric, so only the summation order differs
        prop_assert_eq!(a.support().len(), b.support().len());
        for (x, y) in a.support().iter().zip(b.support()) {
            prop_assert_eq!(x.0, y.0);
            prop_assert!((x.1 - y.1).abs() < 1e-12);
        }
    }
}
