//! The complex Stein equation for `CN_d(0, Sigma)`.
//!
//! With `P_s h(z) = E h(e^{-s} z + sqrt(1 - e^{-2s}) Z)` the semigroup
//! potential is
//!
//! `U_h(z) = int_0^inf (P_s h(z) - E h(Z)) ds`,
//!
//! the integral `int_0^1 (E h(sqrt(t) z + sqrt(1-t) Z) - E h(Z)) dt / 2t`
//! after `t = e^{-2s}`. The Stein operator `A` generates `P_s`, so
//! `A U_h = -(h - E h)`; [`SteinSolver::solution`] returns `-U_h`, which solves
//! `A f = h - E h`.
//!
//! The integral is truncated at `s_max`, approximated by Gauss-Legendre
//! quadrature and the inner expectation by one frozen sample of `Z` shared by
//! every node and every evaluation point, so `U_h` is a deterministic smooth
//! function of `z` and forward-mode derivatives of the estimator are exact
//! derivatives of it.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cgauss::{GaussianSpec, McEstimator, McResidual};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{CMatrix, PdSpectrum};
use crate::par::{blocks, map_range, stream_rng, Execution};
use crate::wirtinger::{jet1_at, jet2_at, JetScalar, ScalarField, WirtingerJet2};

/// `||Sigma^{-1}||_op ||Sigma||_op^{1/2} = sqrt(lambda_max) / lambda_min`.
pub fn stein_constant(sigma: &CMatrix) -> Result<f64> {
    let s = PdSpectrum::new(sigma)?;
    Ok(s.max().sqrt() / s.min())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteinSolverConfig {
    pub mc_samples: usize,
    pub quadrature_nodes: usize,
    pub s_max: f64,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for SteinSolverConfig {
    fn default() -> Self {
        Self {
            mc_samples: 200_000,
            quadrature_nodes: 64,
            // truncation error e^{-s_max} = 1e-3, i.e. e^{-2 s_max} = 1e-6
            s_max: 0.5 * 1e6f64.ln(),
            seed: 0,
            exec: Execution::default(),
        }
    }
}

impl SteinSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.s_max > 0.0) || !self.s_max.is_finite() {
            return Err(Error::InvalidArgument(format!("s_max must be positive, got {}", self.s_max)));
        }
        if self.quadrature_nodes < 8 {
            return Err(Error::InvalidArgument(format!("need at least 8 nodes, got {}", self.quadrature_nodes)));
        }
        if self.mc_samples == 0 {
            return Err(Error::InvalidArgument("mc_samples must be positive".into()));
        }
        Ok(())
    }
}

pub const RESIDUAL_TOLERANCE: f64 = 2e-2;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut r = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, r);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * r * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { r } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (r * pn - pm) / (r * r - 1.0);
            let step = pn / dp;
            r -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -r;
        x[n - 1 - i] = r;
        let wi = 2.0 / ((1.0 - r * r) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Where `E h(Z)` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanSource {
    Exact,
    MonteCarlo,
}

/// Frozen-sample solver for one test function and target law.
pub struct SteinSolver<'a, H: ScalarField> {
    h: &'a H,
    spec: &'a GaussianSpec,
    cfg: SteinSolverConfig,
    sample: Vec<Vec<C64>>,
    /// `(e^{-s}, sqrt(1 - e^{-2s}), weight)` per node.
    nodes: Vec<(f64, f64, f64)>,
    sample_mean: C64,
    mean: C64,
    mean_source: MeanSource,
}

impl<'a, H: ScalarField> SteinSolver<'a, H> {
    pub fn new(h: &'a H, spec: &'a GaussianSpec, cfg: &SteinSolverConfig) -> Result<Self> {
        cfg.validate()?;
        check_dim(spec.d, h.dim())?;
        if !spec.is_centered() {
            return Err(Error::InvalidArgument("the Stein solver targets centered laws".into()));
        }
        // antithetic pairs: odd moments of the frozen sample vanish exactly
        let mut sample = spec.sample_with(cfg.mc_samples.div_ceil(2), cfg.seed, cfg.exec);
        let mirrored: Vec<Vec<C64>> = sample.iter().map(|z| z.iter().map(|v| -v).collect()).collect();
        sample.extend(mirrored);
        let (x, w) = gauss_legendre(cfg.quadrature_nodes);
        let half = cfg.s_max / 2.0;
        let nodes = x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| {
                let s = half * (xi + 1.0);
                let a = (-s).exp();
                (a, (1.0 - a * a).max(0.0).sqrt(), half * wi)
            })
            .collect();
        let values = map_range(cfg.exec, sample.len().div_ceil(crate::par::BLOCK), |b| {
            let end = ((b + 1) * crate::par::BLOCK).min(sample.len());
            sample[b * crate::par::BLOCK..end].iter().map(|z| h.eval(z)).sum::<C64>()
        });
        let sample_mean = values.into_iter().sum::<C64>() / sample.len() as f64;
        if !sample_mean.re.is_finite() || !sample_mean.im.is_finite() {
            return Err(Error::NonFinite("h on the frozen sample".into()));
        }
        let standard = spec.sigma == CMatrix::identity(spec.d, spec.d);
        let (mean, mean_source) = match h.as_polynomial() {
            Some(p) if standard => (p.gaussian_expectation().to_c64(), MeanSource::Exact),
            _ => (sample_mean, MeanSource::MonteCarlo),
        };
        Ok(Self { h, spec, cfg: cfg.clone(), sample, nodes, sample_mean, mean, mean_source })
    }

    pub fn mean(&self) -> (C64, MeanSource) {
        (self.mean, self.mean_source)
    }

    /// Jet of `U_h` at `z`.
    ///
    /// The integrand is centered by the frozen-sample mean of `h` rather
    /// than the exact mean, so it vanishes as `s -> inf` for the estimator
    /// itself and the truncation does not accumulate sampling bias.
    pub fn potential(&self, z: &[C64]) -> Result<WirtingerJet2> {
        check_dim(self.spec.d, z.len())?;
        let d = self.spec.d;
        let parts = blocks(self.sample.len());
        let partial = map_range(self.cfg.exec, parts.len(), |b| {
            let (start, len) = parts[b];
            let mut acc = WirtingerJet2::constant(d, C64::new(0.0, 0.0));
            let mut arg = vec![C64::new(0.0, 0.0); d];
            for &(a, root, weight) in &self.nodes {
                let mut node = WirtingerJet2::constant(d, C64::new(0.0, 0.0));
                for zs in &self.sample[start..start + len] {
                    for j in 0..d {
                        arg[j] = a * z[j] + root * zs[j];
                    }
                    node += &jet2_at(self.h, &arg);
                }
                acc += &node.rescale_argument(a).scale(C64::new(weight, 0.0));
            }
            acc
        });
        let n = self.sample.len() as f64;
        let mut total = WirtingerJet2::constant(d, C64::new(0.0, 0.0));
        for p in partial {
            total = total + p;
        }
        let weight_sum: f64 = self.nodes.iter().map(|n| n.2).sum();
        let mut out = total.scale(C64::new(1.0 / n, 0.0));
        out.value -= self.sample_mean * weight_sum;
        if !out.value.re.is_finite() || !out.value.im.is_finite() {
            return Err(Error::NonFinite(format!("U_h at {z:?}")));
        }
        Ok(out)
    }

    /// Jet of `f = -U_h`, the solution of `A f = h - E h`.
    pub fn solution(&self, z: &[C64]) -> Result<WirtingerJet2> {
        Ok(self.potential(z)?.scale(C64::new(-1.0, 0.0)))
    }
}

/// `U_h` at a single point; see [`SteinSolver`].
pub fn solve_stein<H: ScalarField>(h: &H, spec: &GaussianSpec, z: &[C64], cfg: &SteinSolverConfig) -> Result<WirtingerJet2> {
    SteinSolver::new(h, spec, cfg)?.potential(z)
}

/// The Stein operator
/// `sum_{jk} sigma_jk (d_{z_j} d_{zbar_k} f + d_{zbar_k} d_{z_j} f) - sum_j z_j d_{z_j} f - sum_j zbar_j d_{zbar_j} f`.
///
/// This is the pairing for which Gaussian integration by parts makes the
/// operator vanish in expectation under `CN_d(0, Sigma)`; for real `Sigma` it
/// coincides with `<conj(grad) grad f, conj(Sigma)>_HS + <grad conj(grad) f, Sigma>_HS - ...`.
pub fn stein_operator(jet: &WirtingerJet2, sigma: &CMatrix, z: &[C64]) -> C64 {
    let d = jet.dim();
    let mut out = C64::new(0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            out += sigma[(j, k)] * (jet.dzzb_at(j, k) + jet.dzbz_at(k, j));
        }
        out -= z[j] * jet.dz[j] + z[j].conj() * jet.dzbar[j];
    }
    out
}

/// The operator with the Hessian pairings taken entrywise against
/// `conj(Sigma)` and `Sigma` respectively:
/// `sum_{jk} d_{zbar_j} d_{z_k} f conj(conj(sigma_jk)) + d_{z_j} d_{zbar_k} f conj(sigma_jk) - ...`.
/// Differs from [`stein_operator`] when `Sigma` has non-real entries.
pub fn stein_operator_transposed(jet: &WirtingerJet2, sigma: &CMatrix, z: &[C64]) -> C64 {
    let d = jet.dim();
    let mut out = C64::new(0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            out += jet.dzbz_at(j, k) * sigma[(j, k)] + jet.dzzb_at(j, k) * sigma[(j, k)].conj();
        }
        out -= z[j] * jet.dz[j] + z[j].conj() * jet.dzbar[j];
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinResidualReport {
    pub point: Vec<C64>,
    /// `U_h(point)`
    pub potential: C64,
    /// Stein operator applied to `-U_h`.
    pub lhs: C64,
    /// `h(point) - E h(Z)`
    pub rhs: C64,
    pub residual: f64,
    pub tolerance: f64,
    pub mean_source: MeanSource,
}

impl SteinResidualReport {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

pub fn check_stein_residual<H: ScalarField>(
    h: &H,
    spec: &GaussianSpec,
    points: &[Vec<C64>],
    cfg: &SteinSolverConfig,
) -> Result<Vec<SteinResidualReport>> {
    let solver = SteinSolver::new(h, spec, cfg)?;
    let (mean, mean_source) = solver.mean();
    points
        .iter()
        .map(|z| {
            let u = solver.potential(z)?;
            let f = u.scale(C64::new(-1.0, 0.0));
            let lhs = stein_operator(&f, &spec.sigma, z);
            let rhs = h.eval(z) - mean;
            Ok(SteinResidualReport {
                point: z.clone(),
                potential: u.value,
                lhs,
                rhs,
                residual: (lhs - rhs).norm(),
                tolerance: RESIDUAL_TOLERANCE,
                mean_source,
            })
        })
        .collect()
}

/// `max_j sup |d_{z_j} h|` and `max_j sup |d_{zbar_j} h|` over a grid on
/// `[-radius, radius]^{2d}` (`d <= 2`) or over seeded uniform points.
pub fn estimate_gradient_sup<H: ScalarField>(h: &H, radius: f64, steps: usize, seed: u64) -> (f64, f64) {
    let d = h.dim();
    let mut points: Vec<Vec<C64>> = Vec::new();
    if d <= 2 {
        let axis: Vec<f64> = (0..=steps).map(|i| -radius + 2.0 * radius * i as f64 / steps as f64).collect();
        let total = (steps + 1).pow(2 * d as u32);
        for mut idx in 0..total {
            let mut coords = Vec::with_capacity(2 * d);
            for _ in 0..2 * d {
                coords.push(axis[idx % (steps + 1)]);
                idx /= steps + 1;
            }
            points.push(coords.chunks(2).map(|c| C64::new(c[0], c[1])).collect());
        }
    } else {
        let mut rng = stream_rng(seed, 0);
        for _ in 0..4096 {
            points.push((0..d).map(|_| C64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius))).collect());
        }
    }
    let mut sup = (0.0f64, 0.0f64);
    for p in &points {
        let jet = jet1_at(h, p);
        for j in 0..d {
            sup.0 = sup.0.max(jet.dz[j].norm());
            sup.1 = sup.1.max(jet.dzbar[j].norm());
        }
    }
    sup
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianBoundPoint {
    pub point: Vec<C64>,
    /// `||grad conj(grad) U_h||_HS`
    pub mixed: f64,
    /// `||conj(grad) grad U_h||_HS`
    pub mixed_rev: f64,
    pub holo: f64,
    pub antiholo: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianBoundReport {
    pub alpha: f64,
    pub c_sigma: f64,
    pub sup_dz: f64,
    pub sup_dzbar: f64,
    pub mixed_bound: f64,
    pub holo_bound: f64,
    pub antiholo_bound: f64,
    pub slack: f64,
    pub points: Vec<HessianBoundPoint>,
}

impl HessianBoundReport {
    pub fn holds(&self) -> bool {
        let ok = |v: f64, b: f64| v <= b * (1.0 + self.slack) + 1e-12;
        self.points.iter().all(|p| {
            ok(p.mixed, self.mixed_bound)
                && ok(p.mixed_rev, self.mixed_bound)
                && ok(p.holo, self.holo_bound)
                && ok(p.antiholo, self.antiholo_bound)
        })
    }
}

fn hs(block: &[C64]) -> f64 {
    block.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Evaluates the four Hessian norms of `U_h` against the bounds
/// `c (alpha sup|d_z h| + (1 - alpha) sup|d_zbar h|)` for the mixed blocks
/// and `c sup|d_z h|`, `c sup|d_zbar h|` for the pure ones. `sup` defaults
/// to a grid estimate on `[-4, 4]^{2d}`.
pub fn check_hessian_bounds<H: ScalarField>(
    h: &H,
    spec: &GaussianSpec,
    points: &[Vec<C64>],
    cfg: &SteinSolverConfig,
    alpha: f64,
    sup: Option<(f64, f64)>,
    slack: f64,
) -> Result<HessianBoundReport> {
    let mut all = check_hessian_bounds_multi(h, spec, points, cfg, &[alpha], sup, slack)?;
    Ok(all.remove(0))
}

/// One report per `alpha`, sharing a single solve per point.
pub fn check_hessian_bounds_multi<H: ScalarField>(
    h: &H,
    spec: &GaussianSpec,
    points: &[Vec<C64>],
    cfg: &SteinSolverConfig,
    alphas: &[f64],
    sup: Option<(f64, f64)>,
    slack: f64,
) -> Result<Vec<HessianBoundReport>> {
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::InvalidArgument(format!("alpha must lie in [0, 1], got {a}")));
    }
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("no alpha given".into()));
    }
    let c_sigma = stein_constant(&spec.sigma)?;
    let (sup_dz, sup_dzbar) = sup.unwrap_or_else(|| estimate_gradient_sup(h, 4.0, 80, cfg.seed));
    let solver = SteinSolver::new(h, spec, cfg)?;
    let points = points
        .iter()
        .map(|z| {
            let u = solver.potential(z)?;
            Ok(HessianBoundPoint {
                point: z.clone(),
                mixed: hs(&u.dzzb),
                mixed_rev: hs(&u.dzbz),
                holo: hs(&u.dzz),
                antiholo: hs(&u.dzbzb),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(alphas
        .iter()
        .map(|&alpha| HessianBoundReport {
            alpha,
            c_sigma,
            sup_dz,
            sup_dzbar,
            mixed_bound: c_sigma * (alpha * sup_dz + (1.0 - alpha) * sup_dzbar),
            holo_bound: c_sigma * sup_dz,
            antiholo_bound: c_sigma * sup_dzbar,
            slack,
            points: points.clone(),
        })
        .collect())
}

/// Monte Carlo mean of the Stein operator applied to `f` under `spec`;
/// zero exactly when the law is `CN_d(0, Sigma)`.
pub fn verify_stein_characterization<F: ScalarField>(f: &F, spec: &GaussianSpec, count: usize, seed: u64) -> Result<McResidual> {
    check_dim(spec.d, f.dim())?;
    let stat = McEstimator::new(spec, count, seed).mean(4, |z| {
        let jet = jet2_at(f, z);
        let v = stein_operator(&jet, &spec.sigma, z);
        vec![v.re, v.im, v.re, v.im]
    });
    if stat.mean.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Stein operator mean".into()));
    }
    let v = stat.complex_mean(0);
    Ok(McResidual { lhs: v, rhs: C64::new(0.0, 0.0), residual: v, std_error: stat.complex_se(0), count: stat.count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpoly::CWPoly;
    use crate::linalg::from_rows;
    use crate::rational::{rat, RationalComplex};
    use crate::wirtinger::{Expr, ExprField};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn re_z() -> CWPoly {
        (&CWPoly::var(1, 0) + &CWPoly::var_bar(1, 0)).scale_rational(&rat(1, 2))
    }

    fn abs_sq_minus_one() -> CWPoly {
        &(&CWPoly::var(1, 0) * &CWPoly::var_bar(1, 0)) - &CWPoly::one(1)
    }

    fn small_cfg() -> SteinSolverConfig {
        SteinSolverConfig { mc_samples: 20_000, quadrature_nodes: 32, seed: 3, ..Default::default() }
    }

    #[test]
    fn constants() {
        assert!((stein_constant(&CMatrix::identity(3, 3)).unwrap() - 1.0).abs() < 1e-12);
        let s = CMatrix::from_element(1, 1, c(4.0, 0.0));
        assert!((stein_constant(&s).unwrap() - 0.5).abs() < 1e-12);
        let s = from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(4.0, 0.0)]]).unwrap();
        assert!((stein_constant(&s).unwrap() - 2.0).abs() < 1e-12);
        assert!(stein_constant(&CMatrix::zeros(1, 1)).is_err());
    }

    #[test]
    fn legendre_rule() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        // exact for degree 31
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((int - 2.0 / 31.0).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn config_validation() {
        assert!(SteinSolverConfig { s_max: 0.0, ..Default::default() }.validate().is_err());
        assert!(SteinSolverConfig { quadrature_nodes: 4, ..Default::default() }.validate().is_err());
        assert!(SteinSolverConfig::default().validate().is_ok());
    }

    #[test]
    fn constant_h_gives_zero() {
        let h = CWPoly::constant(1, RationalComplex::from(5));
        let spec = GaussianSpec::standard(1);
        let u = solve_stein(&h, &spec, &[c(0.3, 0.1)], &small_cfg()).unwrap();
        assert!(u.value.norm() < 1e-12);
        assert!(u.dz[0].norm() < 1e-12 && u.dzzb[0].norm() < 1e-12);
    }

    #[test]
    fn closed_forms() {
        let spec = GaussianSpec::standard(1);
        let cfg = small_cfg();
        let h = re_z().to_numeric();
        let solver = SteinSolver::new(&h, &spec, &cfg).unwrap();
        for z in [c(0.5, 0.2), c(-1.0, 1.5)] {
            let u = solver.potential(&[z]).unwrap();
            assert!((u.value.re - z.re).abs() < 1e-2, "{} vs {}", u.value, z.re);
        }
        let h = abs_sq_minus_one().to_numeric();
        let solver = SteinSolver::new(&h, &spec, &cfg).unwrap();
        for z in [c(1.0, 0.0), c(0.3, -0.8)] {
            let u = solver.potential(&[z]).unwrap();
            assert!((u.value.re - (z.norm_sqr() - 1.0) / 2.0).abs() < 1e-2);
            assert!((u.dzzb[0].re - 0.5).abs() < 1e-2);
        }
    }

    #[test]
    fn residuals() {
        let spec = GaussianSpec::standard(1);
        let cfg = small_cfg();
        let r = check_stein_residual(&re_z().to_numeric(), &spec, &[vec![c(0.5, 0.2)]], &cfg).unwrap();
        assert!(r[0].passed(), "{:?}", r[0]);
        assert_eq!(r[0].mean_source, MeanSource::Exact);
        let r = check_stein_residual(&abs_sq_minus_one().to_numeric(), &spec, &[vec![c(1.0, 0.0)]], &cfg).unwrap();
        assert!(r[0].passed(), "{:?}", r[0]);
        let zero = CWPoly::zero(1);
        let r = check_stein_residual(&zero, &spec, &[vec![c(0.1, 0.1)]], &cfg).unwrap();
        assert_eq!(r[0].residual, 0.0);
    }

    #[test]
    fn deterministic() {
        let spec = GaussianSpec::standard(1);
        let h = ExprField::new(1, (Expr::z(0) * Expr::zbar(0)).scale(c(-1.0, 0.0)).exp()).unwrap();
        let a = solve_stein(&h, &spec, &[c(0.2, 0.4)], &small_cfg()).unwrap();
        let seq = SteinSolverConfig { exec: Execution::Sequential, ..small_cfg() };
        let b = solve_stein(&h, &spec, &[c(0.2, 0.4)], &seq).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hessian_bounds_linear() {
        let spec = GaussianSpec::standard(1);
        let h = re_z().to_numeric();
        let pts = vec![vec![c(0.0, 0.0)], vec![c(1.0, -1.0)]];
        for alpha in [0.0, 0.5, 1.0] {
            let r = check_hessian_bounds(&h, &spec, &pts, &small_cfg(), alpha, None, 0.05).unwrap();
            assert!((r.sup_dz - 0.5).abs() < 1e-12 && (r.sup_dzbar - 0.5).abs() < 1e-12);
            assert!(r.holds());
            assert!(r.points.iter().all(|p| p.mixed < 1e-9 && p.holo < 1e-9));
        }
        assert!(check_hessian_bounds(&h, &spec, &pts, &small_cfg(), 1.5, None, 0.05).is_err());
    }

    #[test]
    fn characterization_complex_sigma() {
        let sig = from_rows(&[vec![c(1.0, 0.0), c(0.3, 0.4)], vec![c(0.3, -0.4), c(1.5, 0.0)]]).unwrap();
        let spec = GaussianSpec::centered(sig.clone()).unwrap();
        let f = ExprField::new(2, Expr::z(0) * Expr::zbar(1) + Expr::z(1).pow(2) * Expr::zbar(0)).unwrap();
        let r = verify_stein_characterization(&f, &spec, 100_000, 8).unwrap();
        assert!(r.within(4.0), "{r:?}");
        // the transposed pairing is off by 2 (sigma_10 - sigma_01) on z_0 zbar_1
        let g = ExprField::new(2, Expr::z(0) * Expr::zbar(1)).unwrap();
        let jet = jet2_at(&g, &[c(0.0, 0.0), c(0.0, 0.0)]);
        let bias = stein_operator_transposed(&jet, &sig, &[c(0.0, 0.0); 2]) - stein_operator(&jet, &sig, &[c(0.0, 0.0); 2]);
        assert!((bias - 2.0 * (sig[(1, 0)] - sig[(0, 1)])).norm() < 1e-12);
    }
}
