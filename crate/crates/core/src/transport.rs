//! Empirical Wasserstein-1 distances between equal-size samples in `C^d`.
//!
//! The ground cost is the Euclidean norm on `C^d = R^{2d}`. With uniform
//! weights and equal sizes the optimal coupling is a permutation, so the
//! exact value is an assignment problem. For complex-valued 1-Lipschitz test
//! functions the supremum in the dual is the same as for real ones (rotate
//! the phase of `E h(F) - E h(G)` onto the real axis), so this is the
//! distance appearing in the bounds.

use serde::{Deserialize, Serialize};

use crate::cgauss::GaussianSpec;
use crate::error::{Error, Result};
use crate::par::{derive_seed, map_range, Execution};
use crate::C64;

pub const DEFAULT_CAP: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct TransportProblem {
    pub xs: Vec<Vec<C64>>,
    pub ys: Vec<Vec<C64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportMethod {
    ExactAssignment,
    Sinkhorn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    pub value: f64,
    pub method: TransportMethod,
    pub iterations: usize,
    /// Certified `value - dual lower bound`, Sinkhorn only.
    pub dual_gap: Option<f64>,
    pub converged: bool,
}

pub fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

impl TransportProblem {
    pub fn new(xs: Vec<Vec<C64>>, ys: Vec<Vec<C64>>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
        }
        if xs.is_empty() {
            return Err(Error::InvalidArgument("empty samples".into()));
        }
        let d = xs[0].len();
        for p in xs.iter().chain(&ys) {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.len() });
            }
            if p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NonFinite("sample point".into()));
            }
        }
        Ok(Self { xs, ys })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Row-major `n x n` cost matrix; rows are built in parallel.
    pub fn cost_matrix(&self, exec: Execution) -> Vec<f64> {
        map_range(exec, self.len(), |i| self.ys.iter().map(|y| distance(&self.xs[i], y)).collect::<Vec<_>>())
            .into_iter()
            .flatten()
            .collect()
    }
}

/// Optimal permutation for a square cost matrix: `assignment[i]` is the
/// column matched to row `i`.
///
/// Shortest augmenting paths with row and column potentials, `O(n^3)`.
pub fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    // 1-based arrays with a virtual column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    assignment
}

/// Sum of `cost[i][perm[i]]` in row order, divided by `n`.
pub fn assignment_value(cost: &[f64], n: usize, perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum::<f64>() / n as f64
}

pub fn w1_exact(problem: &TransportProblem) -> Result<TransportResult> {
    w1_exact_with_cap(problem, DEFAULT_CAP, Execution::default())
}

pub fn w1_exact_with_cap(problem: &TransportProblem, cap: usize, exec: Execution) -> Result<TransportResult> {
    let n = problem.len();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let cost = problem.cost_matrix(exec);
    let perm = hungarian(&cost, n);
    Ok(TransportResult {
        value: assignment_value(&cost, n, &perm),
        method: TransportMethod::ExactAssignment,
        iterations: n,
        dual_gap: None,
        converged: true,
    })
}

/// Minimum over all permutations, for checking small instances.
pub fn w1_brute_force(problem: &TransportProblem) -> Result<f64> {
    let n = problem.len();
    if n > 9 {
        return Err(Error::CapExceeded { size: n, cap: 9 });
    }
    let cost = problem.cost_matrix(Execution::Sequential);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = assignment_value(&cost, n, &perm);
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(assignment_value(&cost, n, &perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}

fn log_sum_exp(it: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = it.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + it.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Entropic transport with uniform marginals, iterated in the log domain.
///
/// The final plan is rounded onto the exact marginals, so `value` is the
/// cost of a feasible coupling and never below the optimum. `dual_gap` is
/// `value` minus the dual objective of the c-transformed potentials, which
/// is a feasible dual point; the optimum lies in `[value - dual_gap, value]`.
/// Non-convergence is reported through `converged`, not as an error.
pub fn w1_sinkhorn(problem: &TransportProblem, eps: f64, max_iter: usize) -> Result<TransportResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("regularization must be positive, got {eps}")));
    }
    let n = problem.len();
    let cost = problem.cost_matrix(Execution::default());
    let log_a = -(n as f64).ln();
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        for i in 0..n {
            f[i] = eps * log_a - eps * log_sum_exp((0..n).map(|j| (g[j] - cost[i * n + j]) / eps));
        }
        for j in 0..n {
            g[j] = eps * log_a - eps * log_sum_exp((0..n).map(|i| (f[i] - cost[i * n + j]) / eps));
        }
        // columns are exact after the g step; check the rows
        let err: f64 = (0..n)
            .map(|i| {
                let row = log_sum_exp((0..n).map(|j| (f[i] + g[j] - cost[i * n + j]) / eps)).exp();
                (row - 1.0 / n as f64).abs()
            })
            .sum();
        if err < 1e-9 {
            converged = true;
            break;
        }
    }
    let mut plan: Vec<f64> = (0..n * n).map(|k| ((f[k / n] + g[k % n] - cost[k]) / eps).exp()).collect();
    round_to_marginals(&mut plan, n);
    let value: f64 = plan.iter().zip(&cost).map(|(p, c)| p * c).sum();
    // c-transform: g_j = min_i C_ij - f_i makes (f, g) dual feasible
    let g_feasible: Vec<f64> =
        (0..n).map(|j| (0..n).map(|i| cost[i * n + j] - f[i]).fold(f64::INFINITY, f64::min)).collect();
    let dual = (f.iter().sum::<f64>() + g_feasible.iter().sum::<f64>()) / n as f64;
    Ok(TransportResult {
        value,
        method: TransportMethod::Sinkhorn,
        iterations,
        dual_gap: Some((value - dual).max(0.0)),
        converged,
    })
}

/// Projects a nonnegative plan onto the uniform transport polytope by
/// scaling down over-full rows and columns and adding the rank-one
/// correction for the remaining mass.
fn round_to_marginals(plan: &mut [f64], n: usize) {
    let target = 1.0 / n as f64;
    for i in 0..n {
        let r: f64 = plan[i * n..(i + 1) * n].iter().sum();
        if r > target {
            plan[i * n..(i + 1) * n].iter_mut().for_each(|p| *p *= target / r);
        }
    }
    for j in 0..n {
        let c: f64 = (0..n).map(|i| plan[i * n + j]).sum();
        if c > target {
            (0..n).for_each(|i| plan[i * n + j] *= target / c);
        }
    }
    let row_def: Vec<f64> = (0..n).map(|i| target - plan[i * n..(i + 1) * n].iter().sum::<f64>()).collect();
    let col_def: Vec<f64> = (0..n).map(|j| target - (0..n).map(|i| plan[i * n + j]).sum::<f64>()).collect();
    let mass: f64 = row_def.iter().sum();
    if mass > 0.0 {
        for i in 0..n {
            for j in 0..n {
                plan[i * n + j] += row_def[i].max(0.0) * col_def[j].max(0.0) / mass;
            }
        }
    }
}

/// Mean and standard error over independent repeats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DwEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub values: Vec<f64>,
    pub sample_size: usize,
}

/// Paired-sample estimate of `d_W(F, Z)`.
///
/// Repeat `r` draws `n` points of `F` with seed stream `2r` and `n` points of
/// `Z` with stream `2r + 1`, and solves the assignment exactly. The
/// empirical value carries a positive finite-sample bias that shrinks like a
/// negative power of `n` depending on the dimension; it is reported, not
/// corrected.
pub fn estimate_dw<S>(sampler: S, spec: &GaussianSpec, n: usize, repeats: usize, seed: u64, exec: Execution) -> Result<DwEstimate>
where
    S: Fn(usize, u64) -> Vec<Vec<C64>> + Sync + Send,
{
    if repeats == 0 || n == 0 {
        return Err(Error::InvalidArgument("need at least one repeat and one point".into()));
    }
    if n > DEFAULT_CAP {
        return Err(Error::CapExceeded { size: n, cap: DEFAULT_CAP });
    }
    let values = map_range(exec, repeats, |r| {
        let xs = sampler(n, derive_seed(seed, 2 * r as u64));
        let ys = spec.sample_with(n, derive_seed(seed, 2 * r as u64 + 1), Execution::Sequential);
        let problem = TransportProblem::new(xs, ys)?;
        Ok(w1_exact_with_cap(&problem, DEFAULT_CAP, Execution::Sequential)?.value)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
    Ok(DwEstimate { mean, std_error: (var / k).sqrt(), values, sample_size: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(v: &[f64]) -> Vec<Vec<C64>> {
        v.iter().map(|&x| vec![C64::new(x, 0.0)]).collect()
    }

    fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<C64>> {
        (0..n).map(|_| (0..d).map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect()).collect()
    }

    #[test]
    fn small_examples() {
        let p = TransportProblem::new(pts(&[0.0, 1.0]), pts(&[1.0, 2.0])).unwrap();
        assert_eq!(w1_exact(&p).unwrap().value, 1.0);
        let p = TransportProblem::new(pts(&[0.0, 3.0]), pts(&[2.0, 3.0])).unwrap();
        assert_eq!(w1_exact(&p).unwrap().value, 1.0);
        let p = TransportProblem::new(pts(&[3.0, 1.0, 2.0]), pts(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(w1_exact(&p).unwrap().value, 0.0);
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let n = rng.gen_range(1..=6);
            let d = rng.gen_range(1..=2);
            let p = TransportProblem::new(random_points(&mut rng, n, d), random_points(&mut rng, n, d)).unwrap();
            assert_eq!(w1_exact(&p).unwrap().value, w1_brute_force(&p).unwrap());
        }
    }

    #[test]
    fn sinkhorn_brackets_exact() {
        let p = TransportProblem::new(pts(&[0.0, 1.0]), pts(&[1.0, 2.0])).unwrap();
        let r = w1_sinkhorn(&p, 1e-3, 10_000).unwrap();
        assert!((r.value - 1.0).abs() < 1e-2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = TransportProblem::new(random_points(&mut rng, 12, 2), random_points(&mut rng, 12, 2)).unwrap();
        let exact = w1_exact(&p).unwrap().value;
        let r = w1_sinkhorn(&p, 1e-2, 10_000).unwrap();
        assert!(r.value >= exact - 1e-12 && r.value - r.dual_gap.unwrap() <= exact + 1e-12);
        let single = TransportProblem::new(vec![vec![C64::new(0.0, 0.0)]], vec![vec![C64::new(3.0, 4.0)]]).unwrap();
        assert!((w1_sinkhorn(&single, 0.5, 10).unwrap().value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(TransportProblem::new(pts(&[0.0]), pts(&[0.0, 1.0])).is_err());
        let p = TransportProblem::new(pts(&[0.0, 1.0]), pts(&[0.0, 1.0])).unwrap();
        assert!(matches!(w1_exact_with_cap(&p, 1, Execution::Sequential), Err(Error::CapExceeded { .. })));
        assert!(w1_sinkhorn(&p, 0.0, 10).is_err());
    }

    #[test]
    fn shifted_law() {
        let spec = GaussianSpec::standard(1);
        let shift = C64::new(10.0, 0.0);
        let est = estimate_dw(
            |n, s| spec.sample(n, s).into_iter().map(|z| vec![z[0] + shift]).collect(),
            &spec,
            128,
            4,
            1,
            Execution::default(),
        )
        .unwrap();
        assert!((est.mean - 10.0).abs() < 0.5);
    }
}
