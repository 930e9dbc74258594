//! Monte Carlo and Stein check batteries shared by the CLI and the
//! acceptance suite.

use cchaos::cgauss::{exact_ibp_residuals, exact_lemma1_residual, verify_ibp, verify_lemma1, GaussianSpec, McEstimator, McResidual};
use cchaos::cpoly::CWPoly;
use cchaos::linalg::{from_rows, CMatrix};
use cchaos::ou::apply_l;
use cchaos::par::{derive_seed, Execution};
use cchaos::rational::{rat, RationalComplex};
use cchaos::stein::{check_hessian_bounds_multi, check_stein_residual, verify_stein_characterization, SteinSolverConfig};
use cchaos::wirtinger::{Expr, ExprField};
use cchaos::C64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::CliResult;

/// Standard errors allowed for every Monte Carlo comparison.
pub const SE_MULTIPLIER: f64 = 4.0;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A non-diagonal complex covariance used by the batteries.
pub fn battery_sigma() -> CMatrix {
    from_rows(&[vec![c(2.0, 0.0), c(0.5, 0.5)], vec![c(0.5, -0.5), c(1.0, 0.0)]]).expect("square")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentCheck {
    pub name: String,
    pub estimate: f64,
    pub target: f64,
    pub std_error: f64,
    pub passed: bool,
}

impl MomentCheck {
    fn new(name: String, estimate: f64, target: f64, std_error: f64) -> Self {
        let passed = (estimate - target).abs() <= SE_MULTIPLIER * std_error + 1e-12;
        Self { name, estimate, target, std_error, passed }
    }
}

/// Sampler moments: covariance, relation matrix and `E|Z|^4 = 2 sigma^4`.
pub fn sampler_moments(count: usize, seed: u64, exec: Execution) -> CliResult<Vec<MomentCheck>> {
    let sigma = battery_sigma();
    let spec = GaussianSpec::centered(sigma.clone())?;
    let pairs = [(0usize, 0usize), (0, 1), (1, 1)];
    let stat = McEstimator::new(&spec, count, derive_seed(seed, 0)).with_execution(exec).mean(12, |z| {
        let mut out = Vec::with_capacity(12);
        for &(j, k) in &pairs {
            let cov = z[j] * z[k].conj();
            let rel = z[j] * z[k];
            out.extend([cov.re, cov.im, rel.re, rel.im]);
        }
        out
    });
    let mut checks = Vec::new();
    for (i, &(j, k)) in pairs.iter().enumerate() {
        let s = sigma[(j, k)];
        checks.push(MomentCheck::new(format!("cov[{j}{k}].re"), stat.mean[4 * i], s.re, stat.std_error(4 * i)));
        checks.push(MomentCheck::new(format!("cov[{j}{k}].im"), stat.mean[4 * i + 1], s.im, stat.std_error(4 * i + 1)));
        checks.push(MomentCheck::new(format!("rel[{j}{k}].re"), stat.mean[4 * i + 2], 0.0, stat.std_error(4 * i + 2)));
        checks.push(MomentCheck::new(format!("rel[{j}{k}].im"), stat.mean[4 * i + 3], 0.0, stat.std_error(4 * i + 3)));
    }
    let var = 2.0;
    let scalar = GaussianSpec::scalar(var)?;
    let stat = McEstimator::new(&scalar, count, derive_seed(seed, 1)).with_execution(exec).mean(1, |z| vec![z[0].norm_sqr().powi(2)]);
    checks.push(MomentCheck::new("abs4".into(), stat.mean[0], 2.0 * var * var, stat.std_error(0)));
    Ok(checks)
}

fn mono(p: [u32; 2], q: [u32; 2], coeff: RationalComplex) -> CWPoly {
    CWPoly::monomial(cchaos::cpoly::Monomial::new(p.to_vec(), q.to_vec()).expect("two variables"), coeff)
}

fn r(n: i64) -> RationalComplex {
    RationalComplex::from(n)
}

/// Ten test polynomials in two variables.
pub fn battery_polynomials() -> Vec<(String, CWPoly)> {
    let i = RationalComplex::i();
    let half = RationalComplex::real(rat(1, 2));
    let list = vec![
        mono([1, 0], [0, 0], r(1)),
        mono([1, 0], [1, 0], r(1)),
        mono([2, 0], [0, 1], r(1)),
        mono([1, 1], [1, 0], r(1)),
        &mono([3, 0], [0, 0], r(1)) + &mono([0, 0], [0, 1], r(1)),
        &mono([1, 1], [1, 1], r(1)) - &CWPoly::one(2),
        &mono([2, 0], [2, 0], half) + &mono([0, 1], [0, 0], i.clone()),
        &mono([0, 3], [1, 0], r(1)) - &mono([1, 0], [0, 1], r(2)),
        mono([0, 1], [2, 0], r(1)),
        &mono([1, 1], [2, 0], &r(1) + &i) + &mono([0, 0], [0, 2], r(1)),
    ];
    list.into_iter().map(|p| (p.to_string(), p)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McCheck {
    pub name: String,
    pub residual: McResidual,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryEntry {
    pub function: String,
    pub monte_carlo: Vec<McCheck>,
    pub exact: Vec<ExactCheck>,
}

impl BatteryEntry {
    pub fn passed(&self) -> bool {
        self.monte_carlo.iter().all(|c| c.passed) && self.exact.iter().all(|c| c.passed)
    }
}

fn mc(name: &str, r: McResidual) -> McCheck {
    McCheck { name: name.into(), passed: r.within(SE_MULTIPLIER), residual: r }
}

/// Integration by parts in both coordinates under a non-diagonal
/// covariance, the one-dimensional characterization on the restriction
/// `(z, zbar)`, and the Stein characterization; each by Monte Carlo and in
/// exact standard-Gaussian moments.
pub fn gaussian_battery(count: usize, seed: u64) -> CliResult<Vec<BatteryEntry>> {
    let spec = GaussianSpec::centered(battery_sigma())?;
    let restrict = [CWPoly::var(1, 0), CWPoly::var_bar(1, 0)];
    let mut out = Vec::new();
    for (k, (name, f)) in battery_polynomials().into_iter().enumerate() {
        let s = |j: u64| derive_seed(seed, 8 * k as u64 + j);
        let numeric = f.to_numeric();
        let uni = f.compose(&restrict)?;
        let mut monte_carlo = Vec::new();
        let mut exact = Vec::new();
        for i in 0..2 {
            let ibp = verify_ibp(&spec, &numeric, i, count, s(i as u64))?;
            monte_carlo.push(mc(&format!("ibp_holomorphic_{i}"), ibp.holomorphic));
            monte_carlo.push(mc(&format!("ibp_antiholomorphic_{i}"), ibp.antiholomorphic));
            let (a, b) = exact_ibp_residuals(&f, i)?;
            exact.push(ExactCheck { name: format!("ibp_{i}"), passed: a.is_zero() && b.is_zero() });
        }
        monte_carlo.push(mc("lemma1", verify_lemma1(&uni.to_numeric(), count, s(2))?));
        exact.push(ExactCheck { name: "lemma1".into(), passed: exact_lemma1_residual(&uni)?.is_zero() });
        monte_carlo.push(mc("stein_characterization", verify_stein_characterization(&numeric, &spec, count, s(3))?));
        // under the standard law the Stein operator is the OU generator
        exact.push(ExactCheck { name: "stein_characterization".into(), passed: apply_l(&f).gaussian_expectation().is_zero() });
        out.push(BatteryEntry { function: name, monte_carlo, exact });
    }
    Ok(out)
}

/// Ten points on a spiral out to radius 1.8.
pub fn stein_points() -> Vec<Vec<C64>> {
    (0..10).map(|k| vec![C64::from_polar(0.2 * k as f64, 0.7 * k as f64)]).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PotentialCheck {
    pub function: String,
    pub point: C64,
    pub potential: C64,
    pub closed_form: f64,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HessianCheck {
    pub function: String,
    pub alpha: f64,
    pub worst_ratio: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteinBattery {
    pub tolerance: f64,
    pub potentials: Vec<PotentialCheck>,
    pub hessian: Vec<HessianCheck>,
}

impl SteinBattery {
    pub fn passed(&self) -> bool {
        self.potentials.iter().all(|p| p.passed) && self.hessian.iter().all(|h| h.passed)
    }
}

pub const STEIN_TOLERANCE: f64 = 2e-2;
pub const HESSIAN_SLACK: f64 = 0.05;

/// Solver settings for the battery: the closed forms use `solver`, the
/// Hessian checks a quarter of its samples.
pub fn stein_battery(solver: &SteinSolverConfig) -> CliResult<SteinBattery> {
    let spec = GaussianSpec::standard(1);
    let half = RationalComplex::real(rat(1, 2));
    let re_z = (&CWPoly::var(1, 0) + &CWPoly::var_bar(1, 0)).scale(&half);
    let abs_sq = &(&CWPoly::var(1, 0) * &CWPoly::var_bar(1, 0)) - &CWPoly::one(1);
    let closed: [(&str, &CWPoly, fn(C64) -> f64); 2] =
        [("Re z", &re_z, |z| z.re), ("|z|^2 - 1", &abs_sq, |z| (z.norm_sqr() - 1.0) / 2.0)];
    let points = stein_points();
    let mut potentials = Vec::new();
    for (name, h, u) in closed {
        for rep in check_stein_residual(&h.to_numeric(), &spec, &points, solver)? {
            let z = rep.point[0];
            let want = u(z);
            potentials.push(PotentialCheck {
                function: name.into(),
                point: z,
                potential: rep.potential,
                closed_form: want,
                residual: rep.residual,
                passed: (rep.potential - want).norm() <= STEIN_TOLERANCE && rep.residual < STEIN_TOLERANCE,
            });
        }
    }
    let gauss = Expr::z(0) * Expr::zbar(0);
    let fields: Vec<(&str, ExprField)> = vec![
        ("Re z", ExprField::new(1, (Expr::z(0) + Expr::zbar(0)).scale(c(0.5, 0.0)))?),
        ("|z|^2 - 1", ExprField::new(1, Expr::z(0) * Expr::zbar(0) + Expr::c(-1.0, 0.0))?),
        ("exp(-|z|^2)", ExprField::new(1, gauss.clone().scale(c(-1.0, 0.0)).exp())?),
        ("z exp(-|z|^2)", ExprField::new(1, Expr::z(0) * gauss.scale(c(-1.0, 0.0)).exp())?),
    ];
    let cfg = SteinSolverConfig { mc_samples: (solver.mc_samples / 4).max(1000), ..solver.clone() };
    let hpoints: Vec<Vec<C64>> = points.iter().step_by(2).cloned().collect();
    let mut hessian = Vec::new();
    for (name, h) in &fields {
        for rep in check_hessian_bounds_multi(h, &spec, &hpoints, &cfg, &[0.0, 0.5, 1.0], None, HESSIAN_SLACK)? {
            let ratio = |v: f64, b: f64| if b > 0.0 { v / b } else if v > 1e-12 { f64::INFINITY } else { 0.0 };
            let worst = rep
                .points
                .iter()
                .map(|p| {
                    ratio(p.mixed, rep.mixed_bound)
                        .max(ratio(p.mixed_rev, rep.mixed_bound))
                        .max(ratio(p.holo, rep.holo_bound))
                        .max(ratio(p.antiholo, rep.antiholo_bound))
                })
                .fold(0.0, f64::max);
            hessian.push(HessianCheck { function: name.to_string(), alpha: rep.alpha, worst_ratio: worst, passed: rep.holds() });
        }
    }
    Ok(SteinBattery { tolerance: STEIN_TOLERANCE, potentials, hessian })
}
