//! Fourth-moment bounds on the Wasserstein distance to a complex Gaussian.
//!
//! Two routes share the same [`MomentSummary`]: the exact route computes the
//! moments of a [`ChaoticVector`] in rational arithmetic, the Monte Carlo
//! route estimates them from samples of the underlying standard Gaussian and
//! propagates standard errors by the delta method.
//!
//! With `m_jk = int F_j conj(F_k)` and `a_jk = int |F_j F_k|^2`:
//!
//! - `psi1 = sum_jk |m_jk - sigma_jk|^2`
//! - `psi2 = sum_jk sqrt(a_jj (a_kk / 2 - m_kk^2))`
//! - `psi3 = sum_jk (a_jk - m_jj m_kk - |m_jk|^2)`
//!
//! and the moment bound is `c(Sigma) sqrt(psi1 + psi2 + psi3)`. The Gamma
//! bound is `2 c(Sigma) sqrt(A)` with
//! `A = sum_jk int |Gamma(conj F_j, -L^{-1} F_k)|^2 + |Gamma(F_j, -L^{-1} F_k) - sigma_jk|^2`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cgauss::{block_statistics, fill_standard, McStat};
use crate::cpoly::{CWPoly, NumericPoly};
use crate::error::{check_dim, Error, Result};
use crate::linalg::CMatrix;
use crate::ou::{gamma, project, ChaoticVector};
use crate::par::{map_range, Execution};
use crate::rational::{int, sqrt_lower, sqrt_upper, to_f64, Rational, RationalComplex};
use crate::stein::stein_constant;
use crate::C64;

/// Psi_2 radicands in `(-EPS_CLIP, 0)` are treated as zero.
pub const EPS_CLIP: f64 = 1e-12;

/// Exact target covariance.
pub type RationalMatrix = Vec<Vec<RationalComplex>>;

pub fn rational_identity(d: usize, scale: &Rational) -> RationalMatrix {
    (0..d)
        .map(|j| (0..d).map(|k| if j == k { RationalComplex::real(scale.clone()) } else { RationalComplex::zero() }).collect())
        .collect()
}

pub fn to_cmatrix(sigma: &RationalMatrix) -> CMatrix {
    CMatrix::from_fn(sigma.len(), sigma.len(), |j, k| sigma[j][k].to_c64())
}

fn check_square(sigma: &RationalMatrix, d: usize) -> Result<()> {
    check_dim(d, sigma.len())?;
    for row in sigma {
        check_dim(d, row.len())?;
    }
    for j in 0..d {
        for k in 0..d {
            if sigma[j][k] != sigma[k][j].conj() {
                return Err(Error::NotPositiveDefinite("target covariance is not Hermitian".into()));
            }
        }
    }
    Ok(())
}

/// Moments entering the moment bound, in floating point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub d: usize,
    /// `int F_j conj(F_k)`
    pub second_moments: Vec<Vec<C64>>,
    /// `int |F_j F_k|^2`
    pub abs4: Vec<Vec<f64>>,
    /// `int Gamma(F_k, -L^{-1} F_k)^2`, exact route only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram_sq: Option<Vec<f64>>,
}

impl MomentSummary {
    /// Moments of `CN_d(0, Sigma)`: `E|Z_j Z_k|^2 = s_jj s_kk + |s_jk|^2`.
    pub fn gaussian(sigma: &CMatrix) -> Self {
        let d = sigma.nrows();
        Self {
            d,
            second_moments: (0..d).map(|j| (0..d).map(|k| sigma[(j, k)]).collect()).collect(),
            abs4: (0..d)
                .map(|j| (0..d).map(|k| sigma[(j, j)].re * sigma[(k, k)].re + sigma[(j, k)].norm_sqr()).collect())
                .collect(),
            gram_sq: None,
        }
    }
}

/// Exact moments of a chaotic vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMoments {
    pub d: usize,
    pub second: Vec<Vec<RationalComplex>>,
    pub abs4: Vec<Vec<Rational>>,
    pub gram_sq: Vec<Rational>,
}

impl ExactMoments {
    pub fn of(f: &ChaoticVector) -> Result<Self> {
        let d = f.d();
        let s = &f.scale;
        let g: Vec<&CWPoly> = f.components.iter().map(|c| &c.poly).collect();
        let conj: Vec<CWPoly> = g.iter().map(|p| p.conj()).collect();
        let mut second = vec![vec![RationalComplex::zero(); d]; d];
        let mut abs4 = vec![vec![Rational::zero(); d]; d];
        for j in 0..d {
            for k in j..d {
                let m = g[j].expect_product(&conj[k]).scale(s);
                second[k][j] = m.conj();
                second[j][k] = m;
                let prod = g[j] * g[k];
                let a = prod.norm_sq() * s * s;
                abs4[k][j] = a.clone();
                abs4[j][k] = a;
            }
        }
        let mut gram_sq = Vec::with_capacity(d);
        for c in &f.components {
            // Gamma(F, -L^{-1} F) = s Gamma(G, G) / p
            let gm = gamma(&c.poly, &c.neg_l_inverse()?)?;
            gram_sq.push(gm.norm_sq() * s * s);
        }
        Ok(Self { d, second, abs4, gram_sq })
    }

    pub fn summary(&self) -> MomentSummary {
        MomentSummary {
            d: self.d,
            second_moments: self.second.iter().map(|r| r.iter().map(RationalComplex::to_c64).collect()).collect(),
            abs4: self.abs4.iter().map(|r| r.iter().map(to_f64).collect()).collect(),
            gram_sq: Some(self.gram_sq.iter().map(to_f64).collect()),
        }
    }
}

/// The three moment terms with Psi_2 kept as exact radicands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPsi {
    pub psi1: Rational,
    /// `a_jj (a_kk / 2 - m_kk^2)`, row `j`, column `k`.
    pub psi2_radicands: Vec<Vec<Rational>>,
    pub psi3: Rational,
}

impl ExactPsi {
    pub fn psi2(&self) -> f64 {
        self.psi2_radicands.iter().flatten().map(|r| to_f64(r).sqrt()).sum()
    }

    pub fn psi2_lower(&self, bits: u32) -> Rational {
        self.psi2_radicands.iter().flatten().map(|r| sqrt_lower(r, bits)).sum()
    }

    pub fn psi2_upper(&self, bits: u32) -> Rational {
        self.psi2_radicands.iter().flatten().map(|r| sqrt_upper(r, bits)).sum()
    }

    pub fn sum(&self) -> f64 {
        to_f64(&self.psi1) + self.psi2() + to_f64(&self.psi3)
    }
}

pub fn exact_psi(m: &ExactMoments, sigma: &RationalMatrix) -> Result<ExactPsi> {
    check_square(sigma, m.d)?;
    let d = m.d;
    let half = Rational::new(1.into(), 2.into());
    let mut psi1 = Rational::zero();
    let mut psi3 = Rational::zero();
    let mut radicands = vec![vec![Rational::zero(); d]; d];
    for j in 0..d {
        for k in 0..d {
            psi1 += (&m.second[j][k] - &sigma[j][k]).norm_sqr();
            let mjj = &m.second[j][j].re;
            let mkk = &m.second[k][k].re;
            psi3 += &m.abs4[j][k] - mjj * mkk - m.second[j][k].norm_sqr();
            let r = &m.abs4[j][j] * (&m.abs4[k][k] * &half - mkk * mkk);
            if r.is_negative() {
                return Err(Error::NegativeRadicand { j, k, value: to_f64(&r) });
            }
            radicands[j][k] = r;
        }
    }
    Ok(ExactPsi { psi1, psi2_radicands: radicands, psi3 })
}

/// One experiment point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n_label: u64,
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
    pub c_sigma: f64,
    pub thm4_bound: f64,
    /// Delta-method standard error, Monte Carlo route only.
    pub thm4_se: Option<f64>,
    /// Exact route only.
    pub thm1_bound: Option<f64>,
    pub empirical_w1: Option<f64>,
    pub w1_se: Option<f64>,
}

impl BoundReport {
    fn new(n_label: u64, (psi1, psi2, psi3): (f64, f64, f64), c_sigma: f64) -> Self {
        Self {
            n_label,
            psi1,
            psi2,
            psi3,
            c_sigma,
            thm4_bound: c_sigma * (psi1 + psi2 + psi3).sqrt(),
            thm4_se: None,
            thm1_bound: None,
            empirical_w1: None,
            w1_se: None,
        }
    }

    pub fn csv_header() -> &'static str {
        "n,psi1,psi2,psi3,thm4_bound,thm1_bound,empirical_w1,w1_se"
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
        format!(
            "{},{:e},{:e},{:e},{:e},{},{},{}",
            self.n_label,
            self.psi1,
            self.psi2,
            self.psi3,
            self.thm4_bound,
            opt(self.thm1_bound),
            opt(self.empirical_w1),
            opt(self.w1_se)
        )
    }
}

fn psi_terms(m: &MomentSummary, sigma: &CMatrix, tolerance: f64) -> Result<(f64, f64, f64)> {
    check_dim(m.d, sigma.nrows())?;
    let d = m.d;
    let (mut p1, mut p2, mut p3) = (0.0, 0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            p1 += (m.second_moments[j][k] - sigma[(j, k)]).norm_sqr();
            let mjj = m.second_moments[j][j].re;
            let mkk = m.second_moments[k][k].re;
            p3 += m.abs4[j][k] - mjj * mkk - m.second_moments[j][k].norm_sqr();
            let r = m.abs4[j][j] * (0.5 * m.abs4[k][k] - mkk * mkk);
            if r <= -tolerance {
                return Err(Error::NegativeRadicand { j, k, value: r });
            }
            p2 += r.max(0.0).sqrt();
        }
    }
    if ![p1, p2, p3].iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("Psi terms".into()));
    }
    // psi3 is a sum of variances; round-off may leave it at -1e-16
    Ok((p1, p2, p3.max(0.0)))
}

/// Moment bound from exact or estimated moments.
pub fn thm4_bound(m: &MomentSummary, sigma: &CMatrix, n_label: u64) -> Result<BoundReport> {
    let c = stein_constant(sigma)?;
    Ok(BoundReport::new(n_label, psi_terms(m, sigma, EPS_CLIP)?, c))
}

/// The Gamma bound `2 c(Sigma) sqrt(A)` with `A` kept exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Thm1Exact {
    pub gamma_integral: Rational,
    pub c_sigma: f64,
    pub bound: f64,
}

/// `A = sum_jk int |Gamma(conj F_j, -L^{-1} F_k)|^2 + |Gamma(F_j, -L^{-1} F_k) - sigma_jk|^2`.
pub fn gamma_integral(f: &ChaoticVector, sigma: &RationalMatrix) -> Result<Rational> {
    f.require_centered()?;
    check_square(sigma, f.d())?;
    let n = f.n();
    let inv: Vec<CWPoly> = f.components.iter().map(|c| c.neg_l_inverse()).collect::<Result<_>>()?;
    let mut total = Rational::zero();
    for (j, fj) in f.components.iter().enumerate() {
        let conj = fj.poly.conj();
        for k in 0..f.d() {
            let cross = gamma(&conj, &inv[k])?.scale_rational(&f.scale);
            total += cross.norm_sq();
            let direct = gamma(&fj.poly, &inv[k])?.scale_rational(&f.scale);
            let shifted = &direct - &CWPoly::constant(n, sigma[j][k].clone());
            total += shifted.norm_sq();
        }
    }
    Ok(total)
}

pub fn thm1_bound_exact(f: &ChaoticVector, sigma: &RationalMatrix) -> Result<Thm1Exact> {
    let a = gamma_integral(f, sigma)?;
    let c = stein_constant(&to_cmatrix(sigma))?;
    Ok(Thm1Exact { bound: 2.0 * c * to_f64(&a).sqrt(), gamma_integral: a, c_sigma: c })
}

/// `A <= psi1 + psi2 + psi3`, decided in rational arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofChain {
    pub gamma_integral: Rational,
    pub psi: ExactPsi,
    /// `None` if the square roots could not separate the two sides.
    pub verdict: Option<bool>,
}

impl ProofChain {
    pub fn holds(&self) -> bool {
        self.verdict == Some(true)
    }
}

pub fn proof_chain(f: &ChaoticVector, sigma: &RationalMatrix) -> Result<ProofChain> {
    let a = gamma_integral(f, sigma)?;
    let psi = exact_psi(&ExactMoments::of(f)?, sigma)?;
    let rest = &a - &psi.psi1 - &psi.psi3;
    let mut verdict = None;
    for bits in [64, 256, 1024] {
        if rest <= psi.psi2_lower(bits) {
            verdict = Some(true);
            break;
        }
        if rest > psi.psi2_upper(bits) {
            verdict = Some(false);
            break;
        }
    }
    Ok(ProofChain { gamma_integral: a, psi, verdict })
}

/// Both bounds for one exact input.
pub fn exact_report(f: &ChaoticVector, sigma: &RationalMatrix, n_label: u64) -> Result<BoundReport> {
    f.require_centered()?;
    let moments = ExactMoments::of(f)?;
    let psi = exact_psi(&moments, sigma)?;
    let thm1 = thm1_bound_exact(f, sigma)?;
    let mut report = BoundReport::new(n_label, (to_f64(&psi.psi1), psi.psi2(), to_f64(&psi.psi3)), thm1.c_sigma);
    report.thm1_bound = Some(thm1.bound);
    Ok(report)
}

/// Estimated moments with the feature statistics behind them.
///
/// Features per pair `j <= k`, in row order: `Re F_j conj(F_k)`,
/// `Im F_j conj(F_k)`, `|F_j F_k|^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McMoments {
    pub summary: MomentSummary,
    pub stat: McStat,
}

fn pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|j| (j..d).map(move |k| (j, k))).collect()
}

fn summary_from_features(d: usize, x: &[f64]) -> MomentSummary {
    let mut second = vec![vec![C64::new(0.0, 0.0); d]; d];
    let mut abs4 = vec![vec![0.0; d]; d];
    for (i, (j, k)) in pairs(d).into_iter().enumerate() {
        let m = if j == k { C64::new(x[3 * i], 0.0) } else { C64::new(x[3 * i], x[3 * i + 1]) };
        second[j][k] = m;
        second[k][j] = m.conj();
        abs4[j][k] = x[3 * i + 2];
        abs4[k][j] = x[3 * i + 2];
    }
    MomentSummary { d, second_moments: second, abs4, gram_sq: None }
}

/// Monte Carlo moments of `F(Z)` with `Z` standard complex Gaussian.
pub fn mc_moments(f: &ChaoticVector, count: usize, seed: u64, exec: Execution) -> Result<McMoments> {
    if count < 2 {
        return Err(Error::InvalidArgument("need at least two Monte Carlo samples".into()));
    }
    let d = f.d();
    let n = f.n();
    let root = to_f64(&f.scale).sqrt();
    let polys: Vec<NumericPoly> = f.components.iter().map(|c| c.poly.to_numeric()).collect();
    let pj = pairs(d);
    let stat = block_statistics(count, seed, exec, 3 * pj.len(), |rng, out| {
        let mut z = vec![C64::new(0.0, 0.0); n];
        fill_standard(rng, &mut z);
        let vals: Vec<C64> = polys.iter().map(|p| p.evaluate(&z) * root).collect();
        for (i, &(j, k)) in pj.iter().enumerate() {
            let m = vals[j] * vals[k].conj();
            out[3 * i] = m.re;
            out[3 * i + 1] = m.im;
            out[3 * i + 2] = (vals[j] * vals[k]).norm_sqr();
        }
    });
    if stat.mean.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Monte Carlo moments".into()));
    }
    Ok(McMoments { summary: summary_from_features(d, &stat.mean), stat })
}

impl McMoments {
    /// Delta-method standard error of `g(mean features)`.
    fn delta_se(&self, g: impl Fn(&[f64]) -> Option<f64>) -> Option<f64> {
        let x = &self.stat.mean;
        let mut grad = vec![0.0; x.len()];
        let mut y = x.clone();
        for i in 0..x.len() {
            let h = 1e-6 * (1.0 + x[i].abs());
            y[i] = x[i] + h;
            let up = g(&y)?;
            y[i] = x[i] - h;
            let down = g(&y)?;
            y[i] = x[i];
            grad[i] = (up - down) / (2.0 * h);
        }
        let mut var = 0.0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                var += grad[i] * grad[j] * self.stat.mean_cov(i, j);
            }
        }
        Some(var.max(0.0).sqrt())
    }

    /// Moment bound with its propagated standard error.
    ///
    /// The radicand clip widens to `EPS_CLIP` plus four standard errors of
    /// the radicand, since sampling noise alone moves it by far more than
    /// `EPS_CLIP`.
    pub fn thm4_bound(&self, sigma: &CMatrix, n_label: u64) -> Result<BoundReport> {
        let c = stein_constant(sigma)?;
        let d = self.summary.d;
        let mut tolerance = EPS_CLIP;
        for j in 0..d {
            for k in 0..d {
                let se = self
                    .delta_se(|x| {
                        let m = summary_from_features(d, x);
                        let mkk = m.second_moments[k][k].re;
                        Some(m.abs4[j][j] * (0.5 * m.abs4[k][k] - mkk * mkk))
                    })
                    .unwrap_or(0.0);
                tolerance = tolerance.max(EPS_CLIP + 4.0 * se);
            }
        }
        let mut report = BoundReport::new(n_label, psi_terms(&self.summary, sigma, tolerance)?, c);
        report.thm4_se = self.delta_se(|x| {
            let (p1, p2, p3) = psi_terms(&summary_from_features(d, x), sigma, f64::INFINITY).ok()?;
            Some(c * (p1 + p2 + p3).sqrt())
        });
        Ok(report)
    }
}

fn non_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()))
}

fn converges(xs: &[f64], threshold: f64) -> bool {
    non_increasing(xs) && xs.last().is_some_and(|&v| v < threshold)
}

/// Moment gaps of one sequence point against the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cor3Point {
    pub n_label: u64,
    /// `|int F_j conj(F_k) - sigma_jk|`
    pub second_gap: Vec<Vec<f64>>,
    /// `|int |F_j F_k|^2 - (sigma_jj sigma_kk + |sigma_jk|^2)|`
    pub fourth_gap: Vec<Vec<f64>>,
    pub max_second_gap: f64,
    pub max_fourth_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cor3Report {
    pub points: Vec<Cor3Point>,
    pub threshold: f64,
    pub converging: bool,
}

/// Convergence diagnostic from second and fourth moments.
///
/// The verdict is positive iff the largest entries of both gap matrices are
/// non-increasing along the sequence and end below `threshold`.
pub fn cor3_diagnostic(seq: &[(u64, MomentSummary)], sigma: &CMatrix, threshold: f64) -> Result<Cor3Report> {
    if seq.len() < 2 {
        return Err(Error::InvalidArgument("convergence diagnostic needs at least two points".into()));
    }
    let target = MomentSummary::gaussian(sigma);
    let mut points = Vec::with_capacity(seq.len());
    for (n_label, m) in seq {
        check_dim(target.d, m.d)?;
        let d = m.d;
        let second_gap: Vec<Vec<f64>> = (0..d)
            .map(|j| (0..d).map(|k| (m.second_moments[j][k] - target.second_moments[j][k]).norm()).collect())
            .collect();
        let fourth_gap: Vec<Vec<f64>> =
            (0..d).map(|j| (0..d).map(|k| (m.abs4[j][k] - target.abs4[j][k]).abs()).collect()).collect();
        let max = |g: &Vec<Vec<f64>>| g.iter().flatten().copied().fold(0.0, f64::max);
        points.push(Cor3Point {
            n_label: *n_label,
            max_second_gap: max(&second_gap),
            max_fourth_gap: max(&fourth_gap),
            second_gap,
            fourth_gap,
        });
    }
    let second: Vec<f64> = points.iter().map(|p| p.max_second_gap).collect();
    let fourth: Vec<f64> = points.iter().map(|p| p.max_fourth_gap).collect();
    let converging = converges(&second, threshold) && converges(&fourth, threshold);
    Ok(Cor3Report { points, threshold, converging })
}

/// Per-component quantities at one sequence point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtComponent {
    pub eigenvalue: u32,
    /// `|int |F_k|^2 - sigma_kk|`
    pub second_gap: f64,
    /// `|int |F_k|^4 - 2 sigma_kk^2|`
    pub fourth_gap: f64,
    /// `int pi_{2 lambda}(F^2) conj(pi_{2 lambda}(F^2)) - 2 (int |F|^2)^2`,
    /// present when another component has the same eigenvalue.
    pub hypothesis2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtPoint {
    pub n_label: u64,
    pub components: Vec<PtComponent>,
    /// Largest off-diagonal covariance gap.
    pub cross_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtReport {
    pub points: Vec<PtPoint>,
    pub threshold: f64,
    pub marginal: Vec<bool>,
    pub hypothesis2: Vec<Option<bool>>,
    pub covariance: bool,
    pub joint: bool,
}

fn pt_point(n_label: u64, f: &ChaoticVector, sigma: &RationalMatrix) -> Result<PtPoint> {
    check_square(sigma, f.d())?;
    let m = ExactMoments::of(f)?;
    let s = &f.scale;
    let mut components = Vec::with_capacity(f.d());
    for (k, c) in f.components.iter().enumerate() {
        let skk = &sigma[k][k].re;
        let mkk = &m.second[k][k].re;
        let shared = f.components.iter().enumerate().any(|(j, o)| j != k && o.eigenvalue == c.eigenvalue);
        let hypothesis2 = if shared {
            let top = project(&c.poly.pow(2), 2 * c.eigenvalue);
            Some(to_f64(&(top.norm_sq() * s * s - int(2) * mkk * mkk)))
        } else {
            None
        };
        components.push(PtComponent {
            eigenvalue: c.eigenvalue,
            second_gap: to_f64(&(mkk - skk)).abs(),
            fourth_gap: to_f64(&(&m.abs4[k][k] - int(2) * skk * skk)).abs(),
            hypothesis2,
        });
    }
    let mut cross_gap: f64 = 0.0;
    for j in 0..f.d() {
        for k in 0..f.d() {
            if j != k {
                cross_gap = cross_gap.max(to_f64(&(&m.second[j][k] - &sigma[j][k]).norm_sqr()).sqrt());
            }
        }
    }
    Ok(PtPoint { n_label, components, cross_gap })
}

/// Joint convergence diagnostic for a sequence of exact chaotic vectors.
///
/// Component `k` converges when its second and fourth moment gaps do. When
/// two components share an eigenvalue, the hypothesis-2 quantity of each
/// must also go to zero. The joint verdict requires all of these and a
/// vanishing off-diagonal covariance gap. Points run in parallel.
pub fn peccati_tudor_diagnostic(
    seq: &[(u64, ChaoticVector)],
    sigma: &RationalMatrix,
    threshold: f64,
    exec: Execution,
) -> Result<PtReport> {
    if seq.len() < 2 {
        return Err(Error::InvalidArgument("convergence diagnostic needs at least two points".into()));
    }
    let d = seq[0].1.d();
    let points: Vec<PtPoint> =
        map_range(exec, seq.len(), |i| pt_point(seq[i].0, &seq[i].1, sigma)).into_iter().collect::<Result<_>>()?;
    for p in &points {
        check_dim(d, p.components.len())?;
    }
    let marginal: Vec<bool> = (0..d)
        .map(|k| {
            let gaps: Vec<f64> =
                points.iter().map(|p| p.components[k].second_gap.max(p.components[k].fourth_gap)).collect();
            converges(&gaps, threshold)
        })
        .collect();
    let hypothesis2: Vec<Option<bool>> = (0..d)
        .map(|k| {
            let vals: Option<Vec<f64>> = points.iter().map(|p| p.components[k].hypothesis2.map(f64::abs)).collect();
            vals.map(|v| converges(&v, threshold))
        })
        .collect();
    let cross: Vec<f64> = points.iter().map(|p| p.cross_gap).collect();
    let covariance = d == 1 || converges(&cross, threshold);
    let joint = covariance && marginal.iter().all(|&b| b) && hypothesis2.iter().all(|h| h.unwrap_or(true));
    Ok(PtReport { points, threshold, marginal, hypothesis2, covariance, joint })
}

/// `n^{-1/2} sum_{j <= n} z_j^2` as a chaotic vector with exact scale.
pub fn sum_of_squares(n: usize) -> Result<ChaoticVector> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one variable".into()));
    }
    let mut g = CWPoly::zero(n);
    for j in 0..n {
        g = &g + &CWPoly::var(n, j).pow(2);
    }
    ChaoticVector::with_scale(
        vec![crate::ou::Eigenfunction::with_eigenvalue(g, 2)?],
        Rational::new(One::one(), (n as i64).into()),
    )
}
