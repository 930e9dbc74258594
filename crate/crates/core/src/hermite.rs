//! Complex Hermite polynomials and the product basis of the complex
//! Ornstein-Uhlenbeck eigenspaces.
//!
//! `H_{p,q}(z) = sum_{j=0}^{min(p,q)} C(p,j) C(q,j) j! (-1)^j z^{p-j} zbar^{q-j}`
//! with `E|H_{p,q}|^2 = p! q!`. Multi-index products
//! `H_{m_p,m_q} = prod_j H_{m_p(j), m_q(j)}(z_j)` span the eigenspace of level
//! `|m_p| + |m_q|`; dividing by `sqrt(prod_j m_p(j)! m_q(j)!)` gives the
//! orthonormal basis element `Phi_{m_p,m_q}`.
//!
//! Normalized coefficients are irrational in general, so expansions store
//! exact coefficients against the unnormalized products and expose the
//! normalization separately.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_complex::Complex64 as C64;

use num_traits::Zero;
use rand::Rng;

use crate::cpoly::{random_coefficient, CWPoly, Monomial};
use crate::error::{Error, Result};
use crate::rational::{binomial, factorial, to_f64, Rational, RationalComplex};

/// `(p, q)` of a one-variable complex Hermite polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HermiteIndex {
    pub p: u32,
    pub q: u32,
}

impl HermiteIndex {
    pub fn eigenvalue(&self) -> u32 {
        self.p + self.q
    }
}

/// Multi-index pair `(m_p, m_q)`; shares layout and ordering with [`Monomial`].
pub type BasisIndex = Monomial;

/// `H_{p,q}` as a polynomial in one variable.
pub fn hermite_poly(p: i64, q: i64) -> Result<CWPoly> {
    if p < 0 || q < 0 {
        return Err(Error::InvalidArgument(format!("negative Hermite index ({p}, {q})")));
    }
    Ok(hermite(p as u32, q as u32))
}

pub(crate) fn hermite(p: u32, q: u32) -> CWPoly {
    let mut poly = CWPoly::zero(1);
    for j in 0..=p.min(q) {
        let c = binomial(p, j) * binomial(q, j) * factorial(j);
        let c = if j % 2 == 1 { -c } else { c };
        poly.add_term(
            Monomial { p: vec![p - j], q: vec![q - j] },
            RationalComplex::real(Rational::from_integer(c)),
        );
    }
    poly
}

/// `prod_j m_p(j)! m_q(j)!`, the squared norm of the unnormalized product.
pub fn basis_norm_sq(idx: &BasisIndex) -> BigInt {
    idx.p.iter().chain(&idx.q).map(|&k| factorial(k)).product()
}

/// Unnormalized product `prod_j H_{m_p(j), m_q(j)}(z_j)`.
pub fn hermite_product(idx: &BasisIndex) -> CWPoly {
    let n = idx.n();
    let mut poly = CWPoly::one(n);
    for j in 0..n {
        if idx.p[j] == 0 && idx.q[j] == 0 {
            continue;
        }
        let factor = hermite(idx.p[j], idx.q[j]).shift_variables(j, n).expect("index in range");
        poly = &poly * &factor;
    }
    poly
}

/// A polynomial divided by the square root of an exact positive rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedPoly {
    pub poly: CWPoly,
    pub norm_sq: Rational,
}

impl NormalizedPoly {
    /// Exact `E[self * conj(other)]` when it is rational, i.e. when the
    /// product of the two norms is a perfect square; `None` otherwise.
    pub fn inner(&self, other: &NormalizedPoly) -> Option<RationalComplex> {
        let raw = self.poly.expect_product(&other.poly.conj());
        if raw.is_zero() {
            return Some(raw);
        }
        let prod = &self.norm_sq * &other.norm_sq;
        let (rn, rd) = (prod.numer().sqrt(), prod.denom().sqrt());
        if &rn * &rn == *prod.numer() && &rd * &rd == *prod.denom() {
            Some(raw.scale(&Rational::new(rd, rn)))
        } else {
            None
        }
    }

    pub fn evaluate(&self, point: &[C64]) -> C64 {
        self.poly.evaluate(point) / to_f64(&self.norm_sq).sqrt()
    }
}

/// Orthonormal basis element `Phi_{m_p, m_q}`.
pub fn phi_basis_element(m_p: &[u32], m_q: &[u32]) -> Result<NormalizedPoly> {
    let idx = Monomial::new(m_p.to_vec(), m_q.to_vec())?;
    Ok(NormalizedPoly {
        poly: hermite_product(&idx),
        norm_sq: Rational::from_integer(basis_norm_sq(&idx)),
    })
}

/// Coefficients over the unnormalized Hermite products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteExpansion {
    pub n: usize,
    pub coeffs: BTreeMap<BasisIndex, RationalComplex>,
}

impl HermiteExpansion {
    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: BTreeMap::new() }
    }

    /// Coefficient on the normalized `Phi`: `c * sqrt(norm_sq)`.
    pub fn phi_coefficient(&self, idx: &BasisIndex) -> C64 {
        let c = self.coeffs.get(idx).cloned().unwrap_or_else(RationalComplex::zero);
        c.to_c64() * to_f64(&Rational::from_integer(basis_norm_sq(idx))).sqrt()
    }

    /// `|coefficient on Phi|^2`, exact.
    pub fn phi_weight(&self, idx: &BasisIndex) -> Rational {
        let c = self.coeffs.get(idx).cloned().unwrap_or_else(RationalComplex::zero);
        c.norm_sqr() * Rational::from_integer(basis_norm_sq(idx))
    }

    /// Eigenvalues `|m_p| + |m_q|` carrying nonzero coefficients.
    pub fn levels(&self) -> BTreeSet<u32> {
        self.coeffs.keys().map(Monomial::degree).collect()
    }

    pub fn max_level(&self) -> Option<u32> {
        self.levels().into_iter().max()
    }

    /// `E|pi_lambda f|^2` for every level present.
    pub fn level_weights(&self) -> BTreeMap<u32, Rational> {
        let mut out: BTreeMap<u32, Rational> = BTreeMap::new();
        for idx in self.coeffs.keys() {
            *out.entry(idx.degree()).or_insert_with(Rational::zero) += self.phi_weight(idx);
        }
        out
    }

    /// Multiplies each coefficient by `f(level)`; zero results are dropped.
    pub fn map_levels(&self, f: impl Fn(u32) -> RationalComplex) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(idx, c)| (idx.clone(), c * &f(idx.degree())))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Self { n: self.n, coeffs }
    }
}

/// Expands `f` over the Hermite products.
///
/// Each coefficient is the exact Gaussian inner product
/// `E[f conj(H_idx)] / E|H_idx|^2`. Candidates are the indices
/// `(p - k, q - k)` reachable from the monomials of `f`, since `H_{a,b}`
/// only contains monomials `z^{a-j} zbar^{b-j}`.
pub fn to_hermite(f: &CWPoly) -> HermiteExpansion {
    let n = f.n();
    let parts: std::collections::HashMap<Vec<i64>, CWPoly> = f
        .charge_buckets()
        .into_iter()
        .map(|(charge, bucket)| {
            let part = CWPoly::from_terms(n, bucket.into_iter().map(|(m, c)| (m.clone(), c.clone())))
                .expect("bucket shares variable count");
            (charge, part)
        })
        .collect();
    let mut candidates: BTreeSet<BasisIndex> = BTreeSet::new();
    for m in f.terms().keys() {
        let ranges: Vec<u32> = m.p.iter().zip(&m.q).map(|(a, b)| *a.min(b)).collect();
        let mut shift = vec![0u32; n];
        loop {
            candidates.insert(Monomial {
                p: m.p.iter().zip(&shift).map(|(a, k)| a - k).collect(),
                q: m.q.iter().zip(&shift).map(|(a, k)| a - k).collect(),
            });
            // odometer over 0..=ranges[j]
            let mut j = 0;
            while j < n {
                if shift[j] < ranges[j] {
                    shift[j] += 1;
                    break;
                }
                shift[j] = 0;
                j += 1;
            }
            if j == n {
                break;
            }
        }
    }
    let mut coeffs = BTreeMap::new();
    for idx in candidates {
        let Some(part) = parts.get(&idx.charge()) else { continue };
        let h = hermite_product(&idx);
        let inner = part.expect_product(&h.conj());
        if inner.is_zero() {
            continue;
        }
        let c = inner.scale(&Rational::from_integer(basis_norm_sq(&idx)).recip());
        coeffs.insert(idx, c);
    }
    HermiteExpansion { n, coeffs }
}

pub fn from_hermite(e: &HermiteExpansion) -> CWPoly {
    let mut out = CWPoly::zero(e.n);
    for (idx, c) in &e.coeffs {
        out = &out + &hermite_product(idx).scale(c);
    }
    out
}

/// All multi-index pairs over `n` variables with `|m_p| + |m_q| = level`.
pub fn basis_indices(n: usize, level: u32) -> Vec<BasisIndex> {
    fn rec(slots: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 0 {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=remaining {
            cur.push(v);
            rec(slots - 1, remaining - v, cur, out);
            cur.pop();
        }
    }
    let mut flat = Vec::new();
    rec(2 * n, level, &mut Vec::new(), &mut flat);
    flat.into_iter()
        .map(|v| Monomial { p: v[..n].to_vec(), q: v[n..].to_vec() })
        .collect()
}

/// Random element of the eigenspace of `level`: a combination of up to
/// `max_terms` Hermite products with small rational coefficients.
pub fn random_eigenfunction<R: Rng + ?Sized>(rng: &mut R, n: usize, level: u32, max_terms: usize) -> CWPoly {
    let indices = basis_indices(n, level);
    let count = rng.gen_range(1..=max_terms.max(1));
    let mut poly = CWPoly::zero(n);
    for _ in 0..count {
        let idx = &indices[rng.gen_range(0..indices.len())];
        poly = &poly + &hermite_product(idx).scale(&random_coefficient(rng));
    }
    if poly.is_zero() {
        hermite_product(&indices[0])
    } else {
        poly
    }
}

/// Random element of `level 0 + ... + level max_level`.
pub fn random_chaos_sum<R: Rng + ?Sized>(rng: &mut R, n: usize, max_level: u32, max_terms: usize) -> CWPoly {
    let mut poly = CWPoly::zero(n);
    for level in 0..=max_level {
        if rng.gen_bool(0.7) {
            poly = &poly + &random_eigenfunction(rng, n, level, max_terms);
        }
    }
    poly
}

impl From<HermiteIndex> for BasisIndex {
    fn from(h: HermiteIndex) -> Self {
        Monomial { p: vec![h.p], q: vec![h.q] }
    }
}
