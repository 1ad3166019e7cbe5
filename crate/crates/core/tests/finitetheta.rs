use cpbound::configs::{connected_graphs, independence_number, maximum_independent_set, FiniteGraph};
use cpbound::conic::eigen::symmetric_eigen;
use cpbound::finitetheta::{cp_witness, theta_finite, ThetaCone};

/// Lovász's dual form: ϑ(C_m) = min_t λ_max(J + t·Adj) for vertex-transitive
/// cycles, minimized by golden-section search over t.
fn cycle_theta_oracle(m: usize) -> f64 {
    let g = FiniteGraph::cycle(m);
    let lmax = |t: f64| {
        let mut a = vec![1.0; m * m];
        for &(i, j) in g.edges() {
            a[i * m + j] += t;
            a[j * m + i] += t;
        }
        *symmetric_eigen(&a, m).0.last().unwrap()
    };
    let (mut lo, mut hi) = (-10.0f64, 10.0f64);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - r * (hi - lo);
        let b = lo + r * (hi - lo);
        if lmax(a) < lmax(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    lmax(0.5 * (lo + hi))
}

fn odd_cycle_closed_form(m: usize) -> f64 {
    let c = (std::f64::consts::PI / m as f64).cos();
    m as f64 * c / (1.0 + c)
}

#[test]
fn five_cycle_matches_oracles() {
    let oracle = cycle_theta_oracle(5);
    assert!((oracle - odd_cycle_closed_form(5)).abs() < 1e-9);
    assert!((oracle - 5f64.sqrt()).abs() < 1e-9);
    let r = theta_finite(&FiniteGraph::cycle(5), ThetaCone::Psd).unwrap();
    assert!((r.value - oracle).abs() < 1e-4, "{} vs {}", r.value, oracle);
}

#[test]
fn seven_cycle_matches_oracles() {
    let oracle = cycle_theta_oracle(7);
    assert!((oracle - odd_cycle_closed_form(7)).abs() < 1e-9);
    let r = theta_finite(&FiniteGraph::cycle(7), ThetaCone::Psd).unwrap();
    assert!((r.value - oracle).abs() < 1e-4, "{} vs {}", r.value, oracle);
}

#[test]
fn result_invariants() {
    for cone in [ThetaCone::Psd, ThetaCone::PsdNn] {
        let g = FiniteGraph::petersen();
        let r = theta_finite(&g, cone).unwrap();
        assert!((r.trace() - 1.0).abs() < 1e-8);
        assert!(r.min_eigenvalue >= -1e-8);
        for &(i, j) in g.edges() {
            assert_eq!(r.entry(i, j), 0.0);
        }
        if cone == ThetaCone::PsdNn {
            assert!(r.matrix.iter().all(|&v| v >= -1e-10));
        }
        // ϑ(Petersen) = 4 = α
        assert!((r.value - 4.0).abs() < 1e-4, "{}", r.value);
    }
}

#[test]
fn petersen_witness_reaches_alpha() {
    let g = FiniteGraph::petersen();
    let set = maximum_independent_set(&g).unwrap();
    let w = cp_witness(&g, &set).unwrap();
    assert_eq!(w.objective, 4);
    assert_eq!(independence_number(&g).unwrap(), 4);
    let trace: f64 = (0..10).map(|i| w.entry(i, i)).sum();
    assert!((trace - 1.0).abs() < 1e-15);
    assert!(w.factor().iter().all(|&v| v >= 0.0));
}

#[test]
fn invariant_under_relabeling() {
    let g = FiniteGraph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (2, 5)]).unwrap();
    let a = theta_finite(&g, ThetaCone::Psd).unwrap().value;
    let b = theta_finite(&g.permuted(&[3, 5, 0, 1, 4, 2]), ThetaCone::Psd).unwrap().value;
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn chain_on_small_connected_graphs() {
    for n in 1..=5 {
        for g in connected_graphs(n) {
            let psd = theta_finite(&g, ThetaCone::Psd).unwrap().value;
            let nn = theta_finite(&g, ThetaCone::PsdNn).unwrap().value;
            let alpha = independence_number(&g).unwrap() as f64;
            assert!(psd + 1e-6 >= nn && nn + 1e-6 >= alpha, "{psd} {nn} {alpha}");
        }
    }
}
