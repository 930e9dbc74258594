//! Exact polynomials in `z_1..z_n, zbar_1..zbar_n`.
//!
//! Coefficients are exact complex rationals. The underlying probability space
//! is `C^n` with the standard complex Gaussian product measure, so
//! `E[z_j zbar_j] = 1` and `E[z^p zbar^q] = p!` if `p = q` and `0` otherwise.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rational::{factorial, format_rational, parse_rational, Rational, RationalComplex};
use crate::wirtinger::{polynomial_jet, JetScalar, ScalarField, WirtingerJet1, WirtingerJet2};

/// `prod_j z_j^{p_j} zbar_j^{q_j}`.
///
/// Ordered by total degree first, then lexicographically on `(p, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
}

impl Monomial {
    pub fn new(p: Vec<u32>, q: Vec<u32>) -> Result<Self> {
        check_dim(p.len(), q.len())?;
        Ok(Self { p, q })
    }

    pub fn one(n: usize) -> Self {
        Self { p: vec![0; n], q: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn degree(&self) -> u32 {
        self.p.iter().sum::<u32>() + self.q.iter().sum::<u32>()
    }

    pub fn holomorphic_degree(&self) -> u32 {
        self.p.iter().sum()
    }

    pub fn antiholomorphic_degree(&self) -> u32 {
        self.q.iter().sum()
    }

    /// `p - q`, the phase charge under `z -> e^{ia} z`.
    pub fn charge(&self) -> Vec<i64> {
        self.p.iter().zip(&self.q).map(|(&a, &b)| a as i64 - b as i64).collect()
    }

    pub fn conj(&self) -> Self {
        Self { p: self.q.clone(), q: self.p.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            p: self.p.iter().zip(&o.p).map(|(a, b)| a + b).collect(),
            q: self.q.iter().zip(&o.q).map(|(a, b)| a + b).collect(),
        }
    }

    /// `E[monomial]` under the standard complex Gaussian product measure.
    pub fn expectation(&self) -> BigInt {
        if self.p != self.q {
            return BigInt::zero();
        }
        self.p.iter().map(|&k| factorial(k)).product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| self.p.cmp(&o.p))
            .then_with(|| self.q.cmp(&o.q))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Sparse polynomial with exact complex rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CWPoly {
    n: usize,
    terms: BTreeMap<Monomial, RationalComplex>,
}

impl CWPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: RationalComplex) -> Self {
        let mut poly = Self::zero(n);
        poly.add_term(Monomial::one(n), c);
        poly
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, RationalComplex::one())
    }

    /// `z_j`.
    pub fn var(n: usize, j: usize) -> Self {
        let mut m = Monomial::one(n);
        m.p[j] = 1;
        Self::monomial(m, RationalComplex::one())
    }

    /// `zbar_j`.
    pub fn var_bar(n: usize, j: usize) -> Self {
        let mut m = Monomial::one(n);
        m.q[j] = 1;
        Self::monomial(m, RationalComplex::one())
    }

    pub fn monomial(m: Monomial, c: RationalComplex) -> Self {
        let mut poly = Self::zero(m.n());
        poly.add_term(m, c);
        poly
    }

    /// Builds from `(p, q, coefficient)` triples, merging duplicates.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, RationalComplex)>) -> Result<Self> {
        let mut poly = Self::zero(n);
        for (m, c) in terms {
            check_dim(n, m.n())?;
            poly.add_term(m, c);
        }
        Ok(poly)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, RationalComplex> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> RationalComplex {
        self.terms.get(m).cloned().unwrap_or_else(RationalComplex::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Adds `c * m` in place, keeping the no-zero-coefficient invariant.
    pub fn add_term(&mut self, m: Monomial, c: RationalComplex) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn combine(&self, o: &Self, sign: bool) -> Self {
        assert_eq!(self.n, o.n, "polynomials over different variable counts");
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), if sign { c.clone() } else { -c.clone() });
        }
        out
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        check_dim(self.n, o.n)?;
        Ok(self.combine(o, true))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        check_dim(self.n, o.n)?;
        Ok(self.combine(o, false))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        check_dim(self.n, o.n)?;
        Ok(self.product(o))
    }

    fn product(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "polynomials over different variable counts");
        let mut acc: HashMap<Monomial, RationalComplex> = HashMap::with_capacity(self.len() * o.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(RationalComplex::zero) += &(ca * cb);
            }
        }
        Self {
            n: self.n,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Complex conjugate: `(p, q, c) -> (q, p, conj c)`.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.conj(), c.conj())).collect(),
        }
    }

    pub fn scale(&self, s: &RationalComplex) -> Self {
        if s.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&RationalComplex::real(r.clone()))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.n), |acc, _| acc.product(self))
    }

    /// Formal partial derivative in `z_var` (or `zbar_var` when `bar`).
    pub fn wirtinger_diff(&self, var: usize, bar: bool) -> Result<Self> {
        if var >= self.n {
            return Err(Error::IndexOutOfRange { index: var, len: self.n });
        }
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let e = if bar { m.q[var] } else { m.p[var] };
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            if bar {
                dm.q[var] -= 1;
            } else {
                dm.p[var] -= 1;
            }
            out.add_term(dm, c.scale(&Rational::from_integer(BigInt::from(e))));
        }
        Ok(out)
    }

    /// Shorthand for `wirtinger_diff(var, false)` on a validated index.
    pub fn dz(&self, var: usize) -> Self {
        self.wirtinger_diff(var, false).expect("variable index in range")
    }

    pub fn dzbar(&self, var: usize) -> Self {
        self.wirtinger_diff(var, true).expect("variable index in range")
    }

    /// Exact `E[f]` under the standard complex Gaussian product measure.
    pub fn gaussian_expectation(&self) -> RationalComplex {
        let mut acc = RationalComplex::zero();
        for (m, c) in &self.terms {
            let w = m.expectation();
            if !w.is_zero() {
                acc += &c.scale(&Rational::from_integer(w));
            }
        }
        acc
    }

    /// Exact `E[self * other]` without forming the product.
    ///
    /// Only monomial pairs with opposite charge contribute, so `other` is
    /// bucketed by charge first.
    pub fn expect_product(&self, other: &Self) -> RationalComplex {
        assert_eq!(self.n, other.n, "polynomials over different variable counts");
        let buckets = other.charge_buckets();
        let mut acc = RationalComplex::zero();
        for (ma, ca) in &self.terms {
            let neg: Vec<i64> = ma.charge().iter().map(|c| -c).collect();
            if let Some(list) = buckets.get(&neg) {
                for (mb, cb) in list {
                    let w: BigInt = ma.p.iter().zip(&mb.p).map(|(a, b)| factorial(a + b)).product();
                    acc += &(ca * cb).scale(&Rational::from_integer(w));
                }
            }
        }
        acc
    }

    /// `E[|f|^2]`.
    pub fn norm_sq(&self) -> Rational {
        self.expect_product(&self.conj()).re
    }

    pub(crate) fn charge_buckets(&self) -> HashMap<Vec<i64>, Vec<(&Monomial, &RationalComplex)>> {
        let mut buckets: HashMap<Vec<i64>, Vec<(&Monomial, &RationalComplex)>> = HashMap::new();
        for (m, c) in &self.terms {
            buckets.entry(m.charge()).or_default().push((m, c));
        }
        buckets
    }

    /// Numeric evaluation with `zbar_j = conj(point_j)`.
    pub fn evaluate(&self, point: &[C64]) -> C64 {
        assert_eq!(point.len(), self.n, "evaluation point has wrong length");
        self.eval_generic(point)
    }

    fn eval_generic<S: JetScalar>(&self, z: &[S]) -> S {
        eval_terms(self.n, self.terms.iter().map(|(m, c)| (m, c.to_c64())), z)
    }

    /// Floating-point copy for repeated evaluation.
    pub fn to_numeric(&self) -> NumericPoly {
        NumericPoly::new(self.clone())
    }

    /// Substitutes `w_j -> f_j`, `wbar_j -> conj(f_j)` into a polynomial in
    /// `fs.len()` variables.
    pub fn compose(&self, fs: &[CWPoly]) -> Result<CWPoly> {
        check_dim(self.n, fs.len())?;
        let n = fs.first().map(CWPoly::n).ok_or_else(|| Error::InvalidArgument("empty substitution".into()))?;
        for f in fs {
            check_dim(n, f.n())?;
        }
        let conj: Vec<CWPoly> = fs.iter().map(CWPoly::conj).collect();
        let mut out = CWPoly::zero(n);
        for (m, c) in &self.terms {
            let mut term = CWPoly::constant(n, c.clone());
            for j in 0..self.n {
                term = term.product(&fs[j].pow(m.p[j])).product(&conj[j].pow(m.q[j]));
            }
            out = out.combine(&term, true);
        }
        Ok(out)
    }

    /// Re-embeds into `n` variables, keeping the first `self.n()`.
    pub fn embed(&self, n: usize) -> Result<CWPoly> {
        if n < self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: n });
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut p = m.p.clone();
            let mut q = m.q.clone();
            p.resize(n, 0);
            q.resize(n, 0);
            (Monomial { p, q }, c.clone())
        });
        CWPoly::from_terms(n, terms)
    }

    /// Moves variable `j` of a polynomial to variable `offset + j` in `n` variables.
    pub fn shift_variables(&self, offset: usize, n: usize) -> Result<CWPoly> {
        if offset + self.n > n {
            return Err(Error::DimensionMismatch { expected: offset + self.n, found: n });
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut p = vec![0; n];
            let mut q = vec![0; n];
            p[offset..offset + self.n].copy_from_slice(&m.p);
            q[offset..offset + self.n].copy_from_slice(&m.q);
            (Monomial { p, q }, c.clone())
        });
        CWPoly::from_terms(n, terms)
    }

    pub fn to_document(&self) -> PolyDocument {
        PolyDocument {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermDocument {
                    p: m.p.clone(),
                    q: m.q.clone(),
                    re: format_rational(&c.re),
                    im: format_rational(&c.im),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &PolyDocument) -> Result<Self> {
        let terms = doc
            .terms
            .iter()
            .map(|t| {
                check_dim(doc.n, t.p.len())?;
                check_dim(doc.n, t.q.len())?;
                let c = RationalComplex::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
                Ok((Monomial { p: t.p.clone(), q: t.q.clone() }, c))
            })
            .collect::<Result<Vec<_>>>()?;
        CWPoly::from_terms(doc.n, terms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("polynomial documents serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(s)?)
    }
}

fn eval_terms<'a, S: JetScalar>(n: usize, terms: impl Iterator<Item = (&'a Monomial, C64)> + Clone, z: &[S]) -> S {
    let Some(first) = z.first() else {
        // n = 0: only the constant term can be present
        unreachable!("ScalarField evaluation requires at least one variable")
    };
    let one = first.lift(C64::new(1.0, 0.0));
    let mut max_p = vec![0u32; n];
    let mut max_q = vec![0u32; n];
    for (m, _) in terms.clone() {
        for j in 0..n {
            max_p[j] = max_p[j].max(m.p[j]);
            max_q[j] = max_q[j].max(m.q[j]);
        }
    }
    let table = |base: S, top: u32| -> Vec<S> {
        let mut out = Vec::with_capacity(top as usize + 1);
        out.push(one.clone());
        for k in 1..=top as usize {
            out.push(out[k - 1].clone() * base.clone());
        }
        out
    };
    let powers: Vec<Vec<S>> = (0..n).map(|j| table(z[j].clone(), max_p[j])).collect();
    let powers_bar: Vec<Vec<S>> = (0..n)
        .map(|j| if max_q[j] > 0 { table(z[j].conj(), max_q[j]) } else { vec![one.clone()] })
        .collect();
    let mut acc = first.lift(C64::new(0.0, 0.0));
    for (m, c) in terms {
        let mut term: Option<S> = None;
        for j in 0..n {
            for (e, table) in [(m.p[j], &powers[j]), (m.q[j], &powers_bar[j])] {
                if e > 0 {
                    let v = table[e as usize].clone();
                    term = Some(match term {
                        Some(t) => t * v,
                        None => v,
                    });
                }
            }
        }
        acc = acc + term.map_or_else(|| one.scale(c), |t| t.scale(c));
    }
    acc
}

/// A [`CWPoly`] with coefficients pre-converted to `f64`.
#[derive(Clone, Debug)]
pub struct NumericPoly {
    exact: CWPoly,
    terms: Vec<(Monomial, C64)>,
    // holomorphic then antiholomorphic exponents, for the closed-form jets
    flat: Vec<(Vec<u32>, C64)>,
}

impl NumericPoly {
    pub fn new(exact: CWPoly) -> Self {
        let terms: Vec<(Monomial, C64)> = exact.terms.iter().map(|(m, c)| (m.clone(), c.to_c64())).collect();
        let flat = terms.iter().map(|(m, c)| (m.p.iter().chain(&m.q).copied().collect(), *c)).collect();
        Self { exact, terms, flat }
    }

    pub fn exact(&self) -> &CWPoly {
        &self.exact
    }

    pub fn evaluate(&self, point: &[C64]) -> C64 {
        assert_eq!(point.len(), self.exact.n, "evaluation point has wrong length");
        self.eval(point)
    }
}

impl ScalarField for NumericPoly {
    fn dim(&self) -> usize {
        self.exact.n
    }
    fn eval<S: JetScalar>(&self, z: &[S]) -> S {
        eval_terms(self.exact.n, self.terms.iter().map(|(m, c)| (m, *c)), z)
    }
    fn as_polynomial(&self) -> Option<CWPoly> {
        Some(self.exact.clone())
    }
    fn jet1(&self, point: &[C64]) -> WirtingerJet1 {
        assert_eq!(point.len(), self.exact.n, "evaluation point has wrong length");
        polynomial_jet(point, self.flat.iter().map(|(e, c)| (e.as_slice(), *c)), false).first_order()
    }
    fn jet2(&self, point: &[C64]) -> WirtingerJet2 {
        assert_eq!(point.len(), self.exact.n, "evaluation point has wrong length");
        polynomial_jet(point, self.flat.iter().map(|(e, c)| (e.as_slice(), *c)), true)
    }
}

impl ScalarField for CWPoly {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval<S: JetScalar>(&self, z: &[S]) -> S {
        self.eval_generic(z)
    }
    fn as_polynomial(&self) -> Option<CWPoly> {
        Some(self.clone())
    }
}

impl<'a> Add<&'a CWPoly> for &'a CWPoly {
    type Output = CWPoly;
    /// Panics on mismatched variable counts; see [`CWPoly::try_add`].
    fn add(self, o: &CWPoly) -> CWPoly {
        self.combine(o, true)
    }
}

impl<'a> Sub<&'a CWPoly> for &'a CWPoly {
    type Output = CWPoly;
    fn sub(self, o: &CWPoly) -> CWPoly {
        self.combine(o, false)
    }
}

impl<'a> Mul<&'a CWPoly> for &'a CWPoly {
    type Output = CWPoly;
    fn mul(self, o: &CWPoly) -> CWPoly {
        self.product(o)
    }
}

impl Add for CWPoly {
    type Output = CWPoly;
    fn add(self, o: CWPoly) -> CWPoly {
        &self + &o
    }
}

impl Sub for CWPoly {
    type Output = CWPoly;
    fn sub(self, o: CWPoly) -> CWPoly {
        &self - &o
    }
}

impl Mul for CWPoly {
    type Output = CWPoly;
    fn mul(self, o: CWPoly) -> CWPoly {
        &self * &o
    }
}

impl Neg for CWPoly {
    type Output = CWPoly;
    fn neg(self) -> CWPoly {
        self.scale(&-RationalComplex::one())
    }
}

impl fmt::Display for CWPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for j in 0..self.n {
                if m.p[j] > 0 {
                    write!(f, "*z{}^{}", j + 1, m.p[j])?;
                }
                if m.q[j] > 0 {
                    write!(f, "*zb{}^{}", j + 1, m.q[j])?;
                }
            }
        }
        Ok(())
    }
}

/// Interchange format for polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyDocument {
    pub n: usize,
    pub terms: Vec<TermDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDocument {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    pub re: String,
    pub im: String,
}

/// Random polynomial with small integer-over-small-integer coefficients.
pub fn random_poly<R: Rng + ?Sized>(rng: &mut R, n: usize, max_degree: u32, max_terms: usize) -> CWPoly {
    let count = rng.gen_range(1..=max_terms.max(1));
    let mut poly = CWPoly::zero(n);
    for _ in 0..count {
        let degree = rng.gen_range(0..=max_degree);
        let mut m = Monomial::one(n);
        for _ in 0..degree {
            let j = rng.gen_range(0..n);
            if rng.gen_bool(0.5) {
                m.p[j] += 1;
            } else {
                m.q[j] += 1;
            }
        }
        poly.add_term(m, random_coefficient(rng));
    }
    poly
}

pub fn random_coefficient<R: Rng + ?Sized>(rng: &mut R) -> RationalComplex {
    let mut r = || crate::rational::rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
    let c = RationalComplex::new(r(), r());
    if c.is_zero() {
        RationalComplex::one()
    } else {
        c
    }
}
