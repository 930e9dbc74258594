//! Randomized exact-identity suite.
//!
//! Every check is an equality or inequality between rationals; no
//! tolerances. Each suite draws from its own seeded stream, so suites run in
//! parallel without changing what they test.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cgauss::{exact_ibp_residuals, exact_lemma1_residual};
use crate::cpoly::{random_poly, CWPoly};
use crate::error::Result;
use crate::hermite::{basis_indices, basis_norm_sq, hermite_product, random_chaos_sum, random_eigenfunction};
use crate::ou::{
    apply_l, apply_l_hermite, chain_rule_rhs, check_cor1, check_thm3, diffusion_rhs, gamma, gamma_from_generator,
    Eigenfunction,
};
use crate::par::{map_range, stream_rng, Execution};
use crate::rational::{int, Rational, RationalComplex};
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        Self { name: name.into(), passed: 0, failed: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn record_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, what),
            Err(e) => self.record(false, || format!("{}: {e}", what())),
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::ok)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

/// Sizes of the randomized suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSizes {
    pub gamma_pairs: usize,
    pub ibp_pairs: usize,
    pub spot_checks: usize,
    pub thm3_inputs: usize,
    pub cor1_inputs: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        Self { gamma_pairs: 200, ibp_pairs: 200, spot_checks: 20, thm3_inputs: 100, cor1_inputs: 100 }
    }
}

pub const SUITES: [&str; 9] = [
    "hermite_orthogonality",
    "generator_eigen",
    "generator_routes",
    "gamma_routes",
    "gamma_ibp",
    "diffusion_chain_rule",
    "gaussian_ibp",
    "spectral_inequality",
    "gamma_moment_inequality",
];

/// `E[H_a conj(H_b)] = delta_ab * |a|` for all products of level `<= 4` over
/// up to three variables, i.e. the normalized basis is orthonormal.
fn hermite_orthogonality() -> SuiteResult {
    let mut r = SuiteResult::new(SUITES[0]);
    for n in 1..=3 {
        let idx: Vec<_> = (0..=4).flat_map(|k| basis_indices(n, k)).collect();
        let polys: Vec<CWPoly> = idx.iter().map(hermite_product).collect();
        let conj: Vec<CWPoly> = polys.iter().map(CWPoly::conj).collect();
        for a in 0..idx.len() {
            for b in a..idx.len() {
                let got = polys[a].expect_product(&conj[b]);
                let want = if a == b {
                    RationalComplex::real(Rational::from_integer(basis_norm_sq(&idx[a])))
                } else {
                    RationalComplex::zero()
                };
                r.record(got == want, || format!("n={n} {:?} vs {:?}: {got}", idx[a], idx[b]));
            }
        }
    }
    r
}

/// `L H = -(|p| + |q|) H` for every product of level `<= 6` over one and two
/// variables.
fn generator_eigen() -> SuiteResult {
    let mut r = SuiteResult::new(SUITES[1]);
    for n in 1..=2 {
        for k in 0..=6u32 {
            for idx in basis_indices(n, k) {
                let h = hermite_product(&idx);
                let ok = apply_l(&h) == h.scale(&RationalComplex::from(-(k as i64)));
                r.record(ok, || format!("{idx:?}"));
            }
        }
    }
    r
}

fn generator_routes(rng: &mut ChaCha8Rng, count: usize) -> SuiteResult {
    let mut r = SuiteResult::new(SUITES[2]);
    for _ in 0..count {
        let n = rng.gen_range(1..=3);
        let f = random_poly(rng, n, 5, 6);
        r.record(apply_l(&f) == apply_l_hermite(&f), || format!("{f}"));
    }
    r
}

fn gamma_routes(rng: &mut ChaCha8Rng, count: usize) -> SuiteResult {
    let mut r = SuiteResult::new(SUITES[3]);
    for _ in 0..count {
        let n = rng.gen_range(1..=3);
        let f = random_poly(rng, n, 3, 4);
        let g = random_poly(rng, n, 3, 4);
        let ok = gamma(&f, &g).and_then(|a| Ok(a == gamma_from_generator(&f, &g)?));
        r.record_result(ok, || format!("f = {f}, g = {g}"));
    }
    r
}

/// `E Gamma(F, G) = -E[F L conj(G)]`.
fn gamma_ibp(rng: &mut ChaCha8Rng, count: usize) -> SuiteResult {
    let mut r = SuiteResult::new(SUITES[4]);
    for _ in 0..count {
        let n = rng.gen_range(1..=3);
        let f = random_poly(rng, n, 3, 4);
        let g = random_poly(rng, n, 3, 4);
        let ok = gamma(&f, &g).map(|gm| gm.gaussian_expectation() == -f.expect_product(&apply_l(&g.conj())));
        r.record_result(ok, || format!("f = {f}, g = {g}"));
    }
    r
}

fn diffusion_chain_rule(rng: &mut ChaCha8Rng, count: usize) -> SuiteResult {
    let mut r = SuiteResult::new(SUITES[5]);
    for _ in 0..count {
        let n = rng.gen_range(1..=2);
        let d = rng.gen_range(1..=2);
        let fs: Vec<CWPoly> = (0..d).map(|_| random_poly(rng, n, 2, 3)).collect();
        let phi = random_poly(rng, d, 2, 3);
        let g = random_poly(rng, n, 2, 3);
        let diffusion = phi.compose(&fs).and_then(|c| Ok(apply_l(&c) == diffusion_rhs(&phi, &fs)?));
        r.record_result(diffusion, || format!("diffusion: phi = {phi}"));
        let chain = phi.compose(&fs).and_then(|c| Ok(gamma(&c, &g)? == chain_rule_rhs(&phi, &fs, &g)?));
        r.record_result(chain, || format!("chain rule: phi = {phi}, g = {g}"));
    }
    r
}

/// Complex Gaussian integration by parts and its one-dimensional
/// characterization, in exact moments.
fn gaussian_ibp(rng: &mut ChaCha8Rng, count: usize) -> SuiteResult {
    let mut r = SuiteResult::new(SUITES[6]);
    for _ in 0..count {
        let n = rng.gen_range(1..=3);
        let phi = random_poly(rng, n, 4, 5);
        let i = rng.gen_range(0..n);
        let ok = exact_ibp_residuals(&phi, i).map(|(a, b)| a.is_zero() && b.is_zero());
        r.record_result(ok, || format!("phi = {phi}, i = {i}"));
        let f = random_poly(rng, 1, 4, 5);
        r.record_result(exact_lemma1_residual(&f).map(|v| v.is_zero()), || format!("f = {f}"));
    }
    r
}

fn spectral_inequality(rng: &mut ChaCha8Rng, count: usize) -> SuiteResult {
    let mut r = SuiteResult::new(SUITES[7]);
    for _ in 0..count {
        let n = rng.gen_range(1..=2);
        let top = rng.gen_range(1..=4);
        let f = random_chaos_sum(rng, n, top, 4);
        // eta at or above the top level, sometimes fractional
        let eta = int(top as i64 + rng.gen_range(0..3)) + Rational::new(rng.gen_range(0..4).into(), 4.into());
        let ok = check_thm3(&f, &eta).map(|t| t.holds());
        r.record_result(ok, || format!("f = {f}, eta = {eta}"));
    }
    r
}

fn gamma_moment_inequality(rng: &mut ChaCha8Rng, count: usize) -> SuiteResult {
    let mut r = SuiteResult::new(SUITES[8]);
    for _ in 0..count {
        let n = rng.gen_range(1..=2);
        let (l1, l2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let f1 = random_eigenfunction(rng, n, l1, 3);
        let f2 = random_eigenfunction(rng, n, l2, 3);
        let ok = Eigenfunction::with_eigenvalue(f1.clone(), l1)
            .and_then(|a| Ok((a, Eigenfunction::with_eigenvalue(f2.clone(), l2)?)))
            .and_then(|(a, b)| check_cor1(&a, &b))
            .map(|c| c.holds());
        r.record_result(ok, || format!("f1 = {f1}, f2 = {f2}"));
    }
    r
}

/// Runs one suite by name; `None` for an unknown name.
pub fn run_suite(name: &str, seed: u64, sizes: &SuiteSizes) -> Option<SuiteResult> {
    let pos = SUITES.iter().position(|s| *s == name)?;
    let mut rng = stream_rng(seed, pos as u64);
    let rng = &mut rng;
    Some(match pos {
        0 => hermite_orthogonality(),
        1 => generator_eigen(),
        2 => generator_routes(rng, sizes.gamma_pairs),
        3 => gamma_routes(rng, sizes.gamma_pairs),
        4 => gamma_ibp(rng, sizes.ibp_pairs),
        5 => diffusion_chain_rule(rng, sizes.spot_checks),
        6 => gaussian_ibp(rng, sizes.spot_checks),
        7 => spectral_inequality(rng, sizes.thm3_inputs),
        _ => gamma_moment_inequality(rng, sizes.cor1_inputs),
    })
}

pub fn run_identity_suite(seed: u64, sizes: &SuiteSizes, exec: Execution) -> IdentityReport {
    let suites = map_range(exec, SUITES.len(), |i| run_suite(SUITES[i], seed, sizes).expect("known suite"));
    IdentityReport { seed, suites }
}
