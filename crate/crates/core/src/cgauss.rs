//! The circularly symmetric complex normal law `CN_d(mu, Sigma)`.
//!
//! Standard coordinates have independent `N(0, 1/2)` real and imaginary
//! parts, so `E|Z_j|^2 = 1` and `E Z_j^2 = 0`. General laws are
//! `mu + A Z_std` with `A` the Hermitian square root of `Sigma`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cpoly::CWPoly;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{is_hermitian, max_abs_diff, CMatrix, PdSpectrum, HERMITIAN_TOL};
use crate::par::{blocks, map_range, stream_rng, Execution};
use crate::rational::RationalComplex;
use crate::wirtinger::{jet1_at, ScalarField};

/// One standard complex normal coordinate.
pub fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn fill_standard<R: Rng + ?Sized>(rng: &mut R, out: &mut [C64]) {
    for z in out {
        *z = standard_complex(rng);
    }
}

#[derive(Clone, Debug)]
pub struct GaussianSpec {
    pub d: usize,
    pub mu: Vec<C64>,
    pub sigma: CMatrix,
    /// Hermitian `A` with `A* A = Sigma`.
    pub sqrt_factor: CMatrix,
    spectrum: PdSpectrum,
    sigma_inv: CMatrix,
}

impl GaussianSpec {
    pub fn new(mu: Vec<C64>, sigma: CMatrix) -> Result<Self> {
        let d = sigma.nrows();
        check_dim(d, sigma.ncols())?;
        check_dim(d, mu.len())?;
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !is_hermitian(&sigma, HERMITIAN_TOL) {
            return Err(Error::NotPositiveDefinite("covariance is not Hermitian within 1e-12".into()));
        }
        let spectrum = PdSpectrum::new(&sigma)?;
        let sqrt_factor = spectrum.sqrt();
        let err = max_abs_diff(&(sqrt_factor.adjoint() * &sqrt_factor), &sigma);
        if err > 1e-10 * (1.0 + spectrum.max()) {
            return Err(Error::NotPositiveDefinite(format!("square root reproduces covariance only to {err:e}")));
        }
        let sigma_inv = spectrum.inverse();
        Ok(Self { d, mu, sigma, sqrt_factor, spectrum, sigma_inv })
    }

    pub fn centered(sigma: CMatrix) -> Result<Self> {
        let d = sigma.nrows();
        Self::new(vec![C64::new(0.0, 0.0); d], sigma)
    }

    pub fn standard(d: usize) -> Self {
        Self::centered(CMatrix::identity(d, d)).expect("identity covariance is valid")
    }

    /// `CN_1(0, variance)`.
    pub fn scalar(variance: f64) -> Result<Self> {
        Self::centered(CMatrix::from_element(1, 1, C64::new(variance, 0.0)))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    pub fn is_centered(&self) -> bool {
        self.mu.iter().all(|m| *m == C64::new(0.0, 0.0))
    }

    pub fn density(&self, z: &[C64]) -> Result<f64> {
        check_dim(self.d, z.len())?;
        let diff: Vec<C64> = z.iter().zip(&self.mu).map(|(a, b)| a - b).collect();
        let mut q = C64::new(0.0, 0.0);
        for j in 0..self.d {
            for k in 0..self.d {
                q += diff[j].conj() * self.sigma_inv[(j, k)] * diff[k];
            }
        }
        Ok((-q.re).exp() / (PI.powi(self.d as i32) * self.spectrum.det().abs()))
    }

    /// `exp(i Re<mu, zeta> - <Sigma zeta, zeta> / 4)` with `<a, b> = sum a_j conj(b_j)`.
    pub fn char_fn(&self, zeta: &[C64]) -> Result<C64> {
        check_dim(self.d, zeta.len())?;
        let mu_zeta: C64 = self.mu.iter().zip(zeta).map(|(m, z)| m * z.conj()).sum();
        let mut quad = C64::new(0.0, 0.0);
        for j in 0..self.d {
            for k in 0..self.d {
                quad += self.sigma[(j, k)] * zeta[k] * zeta[j].conj();
            }
        }
        Ok((C64::i() * mu_zeta.re - quad / 4.0).exp())
    }

    /// `mu + A xi` for a standard draw `xi`.
    pub fn transform(&self, xi: &[C64], out: &mut [C64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = self.mu[j];
            for (k, x) in xi.iter().enumerate() {
                acc += self.sqrt_factor[(j, k)] * x;
            }
            *o = acc;
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut [C64], out: &mut [C64]) {
        fill_standard(rng, scratch);
        self.transform(scratch, out);
    }

    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<C64>> {
        self.sample_with(count, seed, Execution::default())
    }

    /// `count` iid rows, generated block by block from independent streams.
    pub fn sample_with(&self, count: usize, seed: u64, exec: Execution) -> Vec<Vec<C64>> {
        let parts = blocks(count);
        let chunks = map_range(exec, parts.len(), |b| {
            let mut rng = stream_rng(seed, b as u64);
            let mut scratch = vec![C64::new(0.0, 0.0); self.d];
            (0..parts[b].1)
                .map(|_| {
                    let mut row = vec![C64::new(0.0, 0.0); self.d];
                    self.draw(&mut rng, &mut scratch, &mut row);
                    row
                })
                .collect::<Vec<_>>()
        });
        chunks.into_iter().flatten().collect()
    }
}

/// Running mean and co-moment of a feature vector.
#[derive(Clone, Debug)]
struct Accumulator {
    n: usize,
    mean: Vec<f64>,
    /// Row-major `m x m` sum of centered outer products.
    m2: Vec<f64>,
}

impl Accumulator {
    fn new(m: usize) -> Self {
        Self { n: 0, mean: vec![0.0; m], m2: vec![0.0; m * m] }
    }

    fn push(&mut self, x: &[f64], delta: &mut [f64]) {
        let m = self.mean.len();
        self.n += 1;
        let inv = 1.0 / self.n as f64;
        for i in 0..m {
            delta[i] = x[i] - self.mean[i];
            self.mean[i] += delta[i] * inv;
        }
        for i in 0..m {
            let after = x[i] - self.mean[i];
            for j in 0..m {
                self.m2[i * m + j] += delta[j] * after;
            }
        }
    }

    /// Chan et al. pairwise merge.
    fn merge(&mut self, o: &Accumulator) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = o.clone();
            return;
        }
        let m = self.mean.len();
        let n = (self.n + o.n) as f64;
        let w = self.n as f64 * o.n as f64 / n;
        let delta: Vec<f64> = (0..m).map(|i| o.mean[i] - self.mean[i]).collect();
        for i in 0..m {
            for j in 0..m {
                self.m2[i * m + j] += o.m2[i * m + j] + delta[i] * delta[j] * w;
            }
        }
        for i in 0..m {
            self.mean[i] += delta[i] * o.n as f64 / n;
        }
        self.n += o.n;
    }
}

/// Sample means of a feature vector with their covariance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McStat {
    pub count: usize,
    pub mean: Vec<f64>,
    /// Sample covariance of the features (not of the means).
    pub cov: Vec<Vec<f64>>,
}

impl McStat {
    pub fn std_error(&self, i: usize) -> f64 {
        (self.cov[i][i] / self.count as f64).sqrt()
    }

    /// Covariance of the estimated means `i` and `j`.
    pub fn mean_cov(&self, i: usize, j: usize) -> f64 {
        self.cov[i][j] / self.count as f64
    }

    pub fn complex_mean(&self, re: usize) -> C64 {
        C64::new(self.mean[re], self.mean[re + 1])
    }

    /// Standard errors of the real and imaginary parts starting at `re`.
    pub fn complex_se(&self, re: usize) -> C64 {
        C64::new(self.std_error(re), self.std_error(re + 1))
    }
}

/// Block-parallel Monte Carlo: `draw` samples one point from `rng` and writes
/// `m` features. Blocks are merged in order, so the result does not depend on
/// the execution mode.
pub fn block_statistics<F>(count: usize, seed: u64, exec: Execution, m: usize, draw: F) -> McStat
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync + Send,
{
    let parts = blocks(count);
    let accs = map_range(exec, parts.len(), |b| {
        let mut rng = stream_rng(seed, b as u64);
        let mut acc = Accumulator::new(m);
        let mut x = vec![0.0; m];
        let mut delta = vec![0.0; m];
        for _ in 0..parts[b].1 {
            draw(&mut rng, &mut x);
            acc.push(&x, &mut delta);
        }
        acc
    });
    let mut total = Accumulator::new(m);
    for a in &accs {
        total.merge(a);
    }
    let denom = (total.n.max(2) - 1) as f64;
    McStat {
        count: total.n,
        cov: (0..m).map(|i| (0..m).map(|j| total.m2[i * m + j] / denom).collect()).collect(),
        mean: total.mean,
    }
}

/// Monte Carlo expectations under a fixed law.
#[derive(Clone, Debug)]
pub struct McEstimator<'a> {
    pub spec: &'a GaussianSpec,
    pub count: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl<'a> McEstimator<'a> {
    pub fn new(spec: &'a GaussianSpec, count: usize, seed: u64) -> Self {
        Self { spec, count, seed, exec: Execution::default() }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// Means of the `m` features returned by `f`.
    pub fn mean<F>(&self, m: usize, f: F) -> McStat
    where
        F: Fn(&[C64]) -> Vec<f64> + Sync + Send,
    {
        let d = self.spec.d;
        block_statistics(self.count, self.seed, self.exec, m, |rng, out| {
            let mut xi = vec![C64::new(0.0, 0.0); d];
            let mut z = vec![C64::new(0.0, 0.0); d];
            self.spec.draw(rng, &mut xi, &mut z);
            out.copy_from_slice(&f(&z));
        })
    }
}

/// A complex Monte Carlo residual with per-part standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McResidual {
    pub lhs: C64,
    pub rhs: C64,
    pub residual: C64,
    pub std_error: C64,
    pub count: usize,
}

impl McResidual {
    fn from_stat(stat: &McStat, lhs: usize, res: usize) -> Result<Self> {
        if stat.mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Monte Carlo mean".into()));
        }
        let l = stat.complex_mean(lhs);
        let r = stat.complex_mean(res);
        Ok(Self { lhs: l, rhs: l - r, residual: r, std_error: stat.complex_se(res), count: stat.count })
    }

    /// Both parts within `k` standard errors of zero.
    pub fn within(&self, k: f64) -> bool {
        let tiny = 1e-12 * (1.0 + self.lhs.norm());
        self.residual.re.abs() <= k * self.std_error.re + tiny && self.residual.im.abs() <= k * self.std_error.im + tiny
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IbpReport {
    /// `E[Z_i phi] - sum_j E[Z_i conj(Z_j)] E[d_{zbar_j} phi]`
    pub holomorphic: McResidual,
    /// `E[conj(Z_i) phi] - sum_j E[Z_j conj(Z_i)] E[d_{z_j} phi]`
    pub antiholomorphic: McResidual,
}

impl IbpReport {
    pub fn within(&self, k: f64) -> bool {
        self.holomorphic.within(k) && self.antiholomorphic.within(k)
    }
}

/// Monte Carlo check of Gaussian integration by parts in coordinate `i`.
pub fn verify_ibp<F: ScalarField>(spec: &GaussianSpec, phi: &F, i: usize, count: usize, seed: u64) -> Result<IbpReport> {
    if !spec.is_centered() {
        return Err(Error::InvalidArgument("integration by parts is stated for centered laws".into()));
    }
    check_dim(spec.d, phi.dim())?;
    if i >= spec.d {
        return Err(Error::IndexOutOfRange { index: i, len: spec.d });
    }
    let d = spec.d;
    let stat = McEstimator::new(spec, count, seed).mean(8, |z| {
        let jet = jet1_at(phi, z);
        let a = z[i] * jet.value;
        let b = z[i].conj() * jet.value;
        let mut ra = a;
        let mut rb = b;
        for j in 0..d {
            ra -= spec.sigma[(i, j)] * jet.dzbar[j];
            rb -= spec.sigma[(j, i)] * jet.dz[j];
        }
        vec![a.re, a.im, ra.re, ra.im, b.re, b.im, rb.re, rb.im]
    });
    Ok(IbpReport {
        holomorphic: McResidual::from_stat(&stat, 0, 2)?,
        antiholomorphic: McResidual::from_stat(&stat, 4, 6)?,
    })
}

/// Exact integration-by-parts residuals under the standard law:
/// `E[z_i phi] - E[d_{zbar_i} phi]` and `E[zbar_i phi] - E[d_{z_i} phi]`.
pub fn exact_ibp_residuals(phi: &CWPoly, i: usize) -> Result<(RationalComplex, RationalComplex)> {
    let n = phi.n();
    let zi = CWPoly::var(n, i);
    let a = zi.try_mul(phi)?.gaussian_expectation() - phi.wirtinger_diff(i, true)?.gaussian_expectation();
    let b = zi.conj().try_mul(phi)?.gaussian_expectation() - phi.wirtinger_diff(i, false)?.gaussian_expectation();
    Ok((a, b))
}

/// Monte Carlo residual of `E[d_z f(Z)] - E[conj(Z) f(Z)]` under `CN_1(0, 1)`.
pub fn verify_lemma1<F: ScalarField>(f: &F, count: usize, seed: u64) -> Result<McResidual> {
    check_dim(1, f.dim())?;
    let spec = GaussianSpec::standard(1);
    let stat = McEstimator::new(&spec, count, seed).mean(4, |z| {
        let jet = jet1_at(f, z);
        let l = jet.dz[0];
        let r = l - z[0].conj() * jet.value;
        vec![l.re, l.im, r.re, r.im]
    });
    McResidual::from_stat(&stat, 0, 2)
}

/// Exact `E[d_z f] - E[zbar f]` for a one-variable polynomial.
pub fn exact_lemma1_residual(f: &CWPoly) -> Result<RationalComplex> {
    check_dim(1, f.n())?;
    Ok(f.wirtinger_diff(0, false)?.gaussian_expectation() - CWPoly::var_bar(1, 0).try_mul(f)?.gaussian_expectation())
}

/// Writes rows as CSV with header `re_1, im_1, ..., re_d, im_d`.
pub fn write_samples_csv<W: Write>(writer: W, rows: &[Vec<C64>]) -> Result<()> {
    let d = rows.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<String> = (1..=d).flat_map(|j| [format!("re_{j}"), format!("im_{j}")]).collect();
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        check_dim(d, row.len())?;
        let rec: Vec<String> = row.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect();
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples_csv<R: Read>(reader: R) -> Result<Vec<Vec<C64>>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.is_empty() || header.len() % 2 != 0 {
        return Err(Error::Parse(format!("sample CSV needs re/im column pairs, got {} columns", header.len())));
    }
    for (k, name) in header.iter().enumerate() {
        let expected = if k % 2 == 0 { format!("re_{}", k / 2 + 1) } else { format!("im_{}", k / 2 + 1) };
        if name != expected {
            return Err(Error::Parse(format!("column {k} is {name:?}, expected {expected:?}")));
        }
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?}"))))
            .collect::<Result<_>>()?;
        rows.push(vals.chunks(2).map(|c| C64::new(c[0], c[1])).collect());
    }
    Ok(rows)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_rows;
    use crate::wirtinger::{Expr, ExprField};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn density_examples() {
        let s1 = GaussianSpec::standard(1);
        assert!(close(s1.density(&[c(0.0, 0.0)]).unwrap(), 1.0 / PI, 1e-15));
        let z = c(0.6, 0.8);
        assert!(close(s1.density(&[z]).unwrap(), (-1.0f64).exp() / PI, 1e-15));
        let s2 = GaussianSpec::standard(2);
        assert!(close(s2.density(&[c(0.0, 0.0); 2]).unwrap(), 1.0 / (PI * PI), 1e-15));
        assert!(s2.density(&[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn char_fn_examples() {
        let s = GaussianSpec::scalar(2.0).unwrap();
        assert_eq!(s.char_fn(&[c(0.0, 0.0)]).unwrap(), c(1.0, 0.0));
        let zeta = c(0.3, -1.1);
        let v = s.char_fn(&[zeta]).unwrap();
        assert!((v - c((-2.0 * zeta.norm_sqr() / 4.0).exp(), 0.0)).norm() < 1e-15);
        let shifted = GaussianSpec::new(vec![c(1.0, 2.0)], CMatrix::from_element(1, 1, c(1e-12, 0.0))).unwrap();
        let phase = shifted.char_fn(&[zeta]).unwrap();
        let expect = (C64::i() * (c(1.0, 2.0) * zeta.conj()).re).exp();
        assert!((phase - expect).norm() < 1e-12);
        // Hermitian symmetry for centered laws
        let sig = from_rows(&[vec![c(2.0, 0.0), c(0.5, 0.5)], vec![c(0.5, -0.5), c(1.0, 0.0)]]).unwrap();
        let s2 = GaussianSpec::centered(sig).unwrap();
        let z = [c(0.2, 0.7), c(-1.0, 0.3)];
        let neg = [-z[0], -z[1]];
        assert!((s2.char_fn(&z).unwrap() - s2.char_fn(&neg).unwrap().conj()).norm() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        let bad = from_rows(&[vec![c(1.0, 0.0), c(0.5, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(GaussianSpec::centered(bad).is_err());
        assert!(GaussianSpec::scalar(0.0).is_err());
        assert!(GaussianSpec::new(vec![c(0.0, 0.0)], CMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn sampler_moments() {
        let sig = from_rows(&[vec![c(2.0, 0.0), c(0.5, 0.5)], vec![c(0.5, -0.5), c(1.0, 0.0)]]).unwrap();
        let spec = GaussianSpec::centered(sig.clone()).unwrap();
        let stat = McEstimator::new(&spec, 200_000, 3).mean(16, |z| {
            let mut out = Vec::with_capacity(16);
            for j in 0..2 {
                for k in 0..2 {
                    let a = z[j] * z[k].conj();
                    let b = z[j] * z[k];
                    out.extend([a.re, a.im, b.re, b.im]);
                }
            }
            out
        });
        for j in 0..2 {
            for k in 0..2 {
                let base = 4 * (2 * j + k);
                let cov = stat.complex_mean(base);
                let se = stat.complex_se(base);
                assert!((cov.re - sig[(j, k)].re).abs() <= 4.0 * se.re);
                assert!((cov.im - sig[(j, k)].im).abs() <= 4.0 * se.im + 1e-12);
                let rel = stat.complex_mean(base + 2);
                let se = stat.complex_se(base + 2);
                assert!(rel.re.abs() <= 4.0 * se.re && rel.im.abs() <= 4.0 * se.im);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_mode_independent() {
        let spec = GaussianSpec::standard(2);
        let a = spec.sample_with(20_000, 9, Execution::Sequential);
        let b = spec.sample_with(20_000, 9, Execution::Parallel);
        assert_eq!(a, b);
        assert_eq!(a.len(), 20_000);
        assert_ne!(a, spec.sample(20_000, 10));
    }

    #[test]
    fn accumulator_merge_matches_direct() {
        let spec = GaussianSpec::standard(1);
        let f = |z: &[C64]| vec![z[0].re, z[0].norm_sqr()];
        let s = McEstimator::new(&spec, 3 * crate::par::BLOCK + 17, 4).with_execution(Execution::Sequential).mean(2, f);
        let rows = spec.sample_with(3 * crate::par::BLOCK + 17, 4, Execution::Sequential);
        let n = rows.len() as f64;
        let m1: f64 = rows.iter().map(|r| r[0].norm_sqr()).sum::<f64>() / n;
        let var: f64 = rows.iter().map(|r| (r[0].norm_sqr() - m1).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(close(s.mean[1], m1, 1e-12));
        assert!(close(s.cov[1][1], var, 1e-9));
    }

    #[test]
    fn density_integrates_to_one() {
        // importance sampling against a wider proposal
        let target = GaussianSpec::centered(
            from_rows(&[vec![c(1.0, 0.0), c(0.3, 0.2)], vec![c(0.3, -0.2), c(0.8, 0.0)]]).unwrap(),
        )
        .unwrap();
        let proposal = GaussianSpec::centered(CMatrix::identity(2, 2) * c(2.0, 0.0)).unwrap();
        let stat = McEstimator::new(&proposal, 200_000, 5)
            .mean(1, |z| vec![target.density(z).unwrap() / proposal.density(z).unwrap()]);
        assert!((stat.mean[0] - 1.0).abs() < 0.01);
    }

    #[test]
    fn circular_symmetry() {
        let spec = GaussianSpec::scalar(1.5).unwrap();
        let rot = C64::from_polar(1.0, 0.7);
        let stat = McEstimator::new(&spec, 200_000, 6).mean(4, |z| {
            let w = rot * z[0];
            vec![w.norm_sqr() - z[0].norm_sqr(), (w * w).re, (w * w).im, w.norm_sqr().powi(2)]
        });
        assert!(stat.mean[0].abs() < 1e-12);
        assert!(stat.mean[1].abs() <= 4.0 * stat.std_error(1));
        assert!(stat.mean[2].abs() <= 4.0 * stat.std_error(2));
        assert!((stat.mean[3] - 2.0 * 1.5 * 1.5).abs() <= 4.0 * stat.std_error(3));
    }

    #[test]
    fn ibp_examples() {
        let spec = GaussianSpec::standard(1);
        let phi = ExprField::new(1, Expr::zbar(0)).unwrap();
        let r = verify_ibp(&spec, &phi, 0, 100_000, 1).unwrap();
        assert!(r.within(4.0));
        assert!((r.holomorphic.lhs - c(1.0, 0.0)).norm() < 0.02);

        let phi = ExprField::new(1, Expr::z(0).pow(2) * Expr::zbar(0)).unwrap();
        let r = verify_ibp(&spec, &phi, 0, 100_000, 2).unwrap();
        assert!(r.within(4.0));

        let sig = from_rows(&[vec![c(1.0, 0.0), c(0.4, 0.3)], vec![c(0.4, -0.3), c(2.0, 0.0)]]).unwrap();
        let spec2 = GaussianSpec::centered(sig).unwrap();
        let phi = ExprField::new(2, Expr::zbar(1) * Expr::z(0) * Expr::zbar(0) + Expr::zbar(0)).unwrap();
        for i in 0..2 {
            assert!(verify_ibp(&spec2, &phi, i, 100_000, 3 + i as u64).unwrap().within(4.0));
        }
        let shifted = GaussianSpec::new(vec![c(1.0, 0.0)], CMatrix::identity(1, 1)).unwrap();
        assert!(verify_ibp(&shifted, &phi, 0, 10, 0).is_err());
    }

    #[test]
    fn exact_oracles_vanish() {
        let z = CWPoly::var(1, 0);
        let zb = CWPoly::var_bar(1, 0);
        let f = &(&z * &z) * &zb;
        assert!(exact_lemma1_residual(&f).unwrap() == RationalComplex::default());
        let (a, b) = exact_ibp_residuals(&f, 0).unwrap();
        assert_eq!((a, b), (RationalComplex::default(), RationalComplex::default()));
    }

    #[test]
    fn lemma1_examples() {
        for (k, e) in [Expr::z(0), Expr::zbar(0) * Expr::z(0).pow(2), Expr::c(3.0, -1.0)].into_iter().enumerate() {
            let f = ExprField::new(1, e).unwrap();
            assert!(verify_lemma1(&f, 100_000, 20 + k as u64).unwrap().within(4.0));
        }
    }

    #[test]
    fn csv_roundtrip() {
        let rows = GaussianSpec::standard(2).sample(5, 1);
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("re_1,im_1,re_2,im_2\n"));
        assert_eq!(read_samples_csv(&buf[..]).unwrap(), rows);
        assert!(read_samples_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_samples_csv("re_1,im_1\n1,x\n".as_bytes()).is_err());
    }
}
