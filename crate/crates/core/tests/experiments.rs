use swlab_core::experiments::{deviation_scan, ExperimentSpec};
use swlab_core::FourierPotential;

fn scan(lambda: f64, n_list: Vec<i64>, t_max: f64, k_grid: usize) -> Vec<(i64, f64, f64)> {
    let mut spec = ExperimentSpec::new("t", FourierPotential::cosine(1.0), lambda, n_list, t_max);
    spec.k_grid = k_grid;
    spec.tol = 1e-10;
    deviation_scan(&spec)
        .unwrap()
        .iter()
        .map(|r| {
            assert!(r.valid);
            (r.n, r.dev_norm, r.err)
        })
        .collect()
}

#[test]
fn deviation_falls_with_window_index() {
    let r = scan(0.25, vec![4, 32], 4.0, 3);
    let (d4, e4) = (r[0].1, r[0].2);
    let (d32, e32) = (r[1].1, r[1].2);
    assert!(d32 + e32 < d4 - e4, "{d32} vs {d4}");
}

#[test]
fn deviation_is_linear_in_small_coupling() {
    let a = scan(0.05, vec![8, 12], 3.0, 2);
    let b = scan(0.1, vec![8, 12], 3.0, 2);
    for (x, y) in a.iter().zip(&b) {
        let ratio = x.1 / y.1;
        assert!((ratio / 0.5 - 1.0).abs() < 0.2, "n = {}: ratio {ratio}", x.0);
    }
}
