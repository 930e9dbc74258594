use cchaos::cgauss::GaussianSpec;
use cchaos::par::Execution;
use cchaos::transport::{estimate_dw, w1_exact, w1_sinkhorn, TransportProblem, TransportMethod};
use cchaos::C64;

fn cloud(n: usize, d: usize, seed: u64) -> Vec<Vec<C64>> {
    GaussianSpec::standard(d).sample(n, seed)
}

fn w1(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    w1_exact(&TransportProblem::new(a.to_vec(), b.to_vec()).unwrap()).unwrap().value
}

#[test]
fn empirical_distance_is_a_metric() {
    for seed in 0..10 {
        let (x, y, z) = (cloud(12, 2, 3 * seed), cloud(12, 2, 3 * seed + 1), cloud(12, 2, 3 * seed + 2));
        assert_eq!(w1(&x, &x), 0.0);
        let (xy, yx) = (w1(&x, &y), w1(&y, &x));
        assert!((xy - yx).abs() <= 1e-12);
        assert!(xy <= w1(&x, &z) + w1(&z, &y) + 1e-12);
        let mut shuffled = x.clone();
        shuffled.reverse();
        assert!(w1(&x, &shuffled).abs() <= 1e-15);
    }
}

#[test]
fn translation_moves_by_its_length() {
    let x = cloud(30, 1, 5);
    let shift = C64::new(3.0, -4.0);
    let y: Vec<Vec<C64>> = x.iter().map(|p| vec![p[0] + shift]).collect();
    assert!((w1(&x, &y) - 5.0).abs() <= 1e-12);
}

#[test]
fn sinkhorn_never_undercuts_the_optimum() {
    for seed in 0..5 {
        let problem = TransportProblem::new(cloud(20, 2, 100 + seed), cloud(20, 2, 200 + seed)).unwrap();
        let exact = w1_exact(&problem).unwrap();
        let entropic = w1_sinkhorn(&problem, 1e-2, 20_000).unwrap();
        assert_eq!(entropic.method, TransportMethod::Sinkhorn);
        assert!(entropic.value >= exact.value - 1e-12);
        assert!(entropic.value - exact.value <= 5e-2, "{} vs {}", entropic.value, exact.value);
    }
}

#[test]
fn paired_estimate_is_reproducible() {
    let spec = GaussianSpec::standard(1);
    let sampler = |n: usize, s: u64| GaussianSpec::standard(1).sample(n, s);
    let a = estimate_dw(sampler, &spec, 64, 4, 9, Execution::Sequential).unwrap();
    let b = estimate_dw(sampler, &spec, 64, 4, 9, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.values.len(), 4);
    assert!(a.mean > 0.0 && a.std_error > 0.0);
}
