//! Forward-mode automatic differentiation in the Wirtinger calculus.
//!
//! A jet carries a complex value together with its derivatives in the
//! formally independent directions `z_1..z_d` and `zbar_1..zbar_d`. Second
//! order jets keep all four Hessian blocks explicitly:
//!
//! | field   | entry `(j, k)`               |
//! |---------|------------------------------|
//! | `dzz`   | `d/dz_j d/dz_k f`            |
//! | `dzbzb` | `d/dzbar_j d/dzbar_k f`      |
//! | `dzbz`  | `d/dzbar_j d/dz_k f`         |
//! | `dzzb`  | `d/dz_j d/dzbar_k f`         |
//!
//! Fields are generic over [`JetScalar`], so the same code evaluates a plain
//! value, a first order jet or a second order jet.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use smallvec::{smallvec, SmallVec};

use crate::cpoly::CWPoly;
use crate::error::{Error, Result};

type Vector = SmallVec<[C64; 2]>;
/// Row-major `d x d` block.
type Block = SmallVec<[C64; 4]>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Scalar types a [`ScalarField`] can be evaluated on.
pub trait JetScalar:
    Clone + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn value(&self) -> C64;
    /// Constant with the same derivative shape as `self`.
    fn lift(&self, c: C64) -> Self;
    fn conj(&self) -> Self;
    fn scale(&self, c: C64) -> Self;
    fn exp(&self) -> Self;

    fn add_const(&self, c: C64) -> Self {
        self.clone() + self.lift(c)
    }

    fn powi(&self, k: u32) -> Self {
        let mut result = self.lift(ONE);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        result
    }
}

impl JetScalar for C64 {
    fn value(&self) -> C64 {
        *self
    }
    fn lift(&self, c: C64) -> Self {
        c
    }
    fn conj(&self) -> Self {
        C64::conj(self)
    }
    fn scale(&self, c: C64) -> Self {
        self * c
    }
    fn exp(&self) -> Self {
        C64::exp(*self)
    }
    fn powi(&self, k: u32) -> Self {
        C64::powu(self, k)
    }
}

/// Value and first Wirtinger derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct WirtingerJet1 {
    pub value: C64,
    pub dz: Vector,
    pub dzbar: Vector,
}

impl WirtingerJet1 {
    pub fn constant(d: usize, value: C64) -> Self {
        Self {
            value,
            dz: smallvec![ZERO; d],
            dzbar: smallvec![ZERO; d],
        }
    }

    /// The coordinate function `z_k` at `value`.
    pub fn variable(d: usize, k: usize, value: C64) -> Self {
        let mut jet = Self::constant(d, value);
        jet.dz[k] = ONE;
        jet
    }

    pub fn dim(&self) -> usize {
        self.dz.len()
    }

    fn zip(&self, o: &Self, f: impl Fn(C64, C64) -> C64) -> (Vector, Vector) {
        (
            self.dz.iter().zip(&o.dz).map(|(a, b)| f(*a, *b)).collect(),
            self.dzbar.iter().zip(&o.dzbar).map(|(a, b)| f(*a, *b)).collect(),
        )
    }
}

impl Add for WirtingerJet1 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (dz, dzbar) = self.zip(&o, |a, b| a + b);
        Self { value: self.value + o.value, dz, dzbar }
    }
}

impl Sub for WirtingerJet1 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let (dz, dzbar) = self.zip(&o, |a, b| a - b);
        Self { value: self.value - o.value, dz, dzbar }
    }
}

impl Mul for WirtingerJet1 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.value, o.value);
        let (dz, dzbar) = self.zip(&o, |da, db| da * b + a * db);
        Self { value: a * b, dz, dzbar }
    }
}

impl Neg for WirtingerJet1 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl JetScalar for WirtingerJet1 {
    fn value(&self) -> C64 {
        self.value
    }
    fn lift(&self, c: C64) -> Self {
        Self::constant(self.dim(), c)
    }
    fn conj(&self) -> Self {
        Self {
            value: self.value.conj(),
            dz: self.dzbar.iter().map(|v| v.conj()).collect(),
            dzbar: self.dz.iter().map(|v| v.conj()).collect(),
        }
    }
    fn scale(&self, c: C64) -> Self {
        Self {
            value: self.value * c,
            dz: self.dz.iter().map(|v| v * c).collect(),
            dzbar: self.dzbar.iter().map(|v| v * c).collect(),
        }
    }
    fn exp(&self) -> Self {
        let e = self.value.exp();
        Self {
            value: e,
            dz: self.dz.iter().map(|v| v * e).collect(),
            dzbar: self.dzbar.iter().map(|v| v * e).collect(),
        }
    }
}

/// Value, first derivatives and all four second derivative blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct WirtingerJet2 {
    pub value: C64,
    pub dz: Vector,
    pub dzbar: Vector,
    pub dzz: Block,
    pub dzbzb: Block,
    pub dzbz: Block,
    pub dzzb: Block,
}

/// Derivatives of a function of one complex variable `w` at a point, as
/// consumed by [`WirtingerJet2::compose`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OuterDerivatives {
    pub value: C64,
    pub dw: C64,
    pub dwbar: C64,
    pub dww: C64,
    pub dwbwb: C64,
    /// `d/dw d/dwbar`, equal to `d/dwbar d/dw`.
    pub dwwb: C64,
}

impl OuterDerivatives {
    pub fn exp(w: C64) -> Self {
        let e = w.exp();
        Self { value: e, dw: e, dwbar: ZERO, dww: e, dwbwb: ZERO, dwwb: ZERO }
    }

    pub fn conj(w: C64) -> Self {
        Self { value: w.conj(), dw: ZERO, dwbar: ONE, dww: ZERO, dwbwb: ZERO, dwwb: ZERO }
    }

    pub fn abs_sq(w: C64) -> Self {
        Self { value: w.norm_sqr().into(), dw: w.conj(), dwbar: w, dww: ZERO, dwbwb: ZERO, dwwb: ONE }
    }
}

impl WirtingerJet2 {
    pub fn constant(d: usize, value: C64) -> Self {
        Self {
            value,
            dz: smallvec![ZERO; d],
            dzbar: smallvec![ZERO; d],
            dzz: smallvec![ZERO; d * d],
            dzbzb: smallvec![ZERO; d * d],
            dzbz: smallvec![ZERO; d * d],
            dzzb: smallvec![ZERO; d * d],
        }
    }

    /// The coordinate function `z_k` at `value`.
    pub fn variable(d: usize, k: usize, value: C64) -> Self {
        let mut jet = Self::constant(d, value);
        jet.dz[k] = ONE;
        jet
    }

    /// Seeds every coordinate of `point`.
    pub fn seed(point: &[C64]) -> Vec<Self> {
        let d = point.len();
        point.iter().enumerate().map(|(k, &z)| Self::variable(d, k, z)).collect()
    }

    pub fn dim(&self) -> usize {
        self.dz.len()
    }

    pub fn dzz_at(&self, j: usize, k: usize) -> C64 {
        self.dzz[j * self.dim() + k]
    }
    pub fn dzbzb_at(&self, j: usize, k: usize) -> C64 {
        self.dzbzb[j * self.dim() + k]
    }
    pub fn dzbz_at(&self, j: usize, k: usize) -> C64 {
        self.dzbz[j * self.dim() + k]
    }
    pub fn dzzb_at(&self, j: usize, k: usize) -> C64 {
        self.dzzb[j * self.dim() + k]
    }

    // Directions 0..d are z_j, d..2d are zbar_j.
    fn d1(&self, a: usize) -> C64 {
        let d = self.dim();
        if a < d {
            self.dz[a]
        } else {
            self.dzbar[a - d]
        }
    }

    fn d2(&self, a: usize, b: usize) -> C64 {
        let d = self.dim();
        match (a < d, b < d) {
            (true, true) => self.dzz[a * d + b],
            (false, false) => self.dzbzb[(a - d) * d + (b - d)],
            (false, true) => self.dzbz[(a - d) * d + b],
            (true, false) => self.dzzb[a * d + (b - d)],
        }
    }

    fn from_fn(
        d: usize,
        value: C64,
        f1: impl Fn(usize) -> C64,
        f2: impl Fn(usize, usize) -> C64,
    ) -> Self {
        let block = |ro: usize, co: usize| -> Block {
            (0..d * d).map(|i| f2(ro + i / d, co + i % d)).collect()
        };
        Self {
            value,
            dz: (0..d).map(&f1).collect(),
            dzbar: (d..2 * d).map(&f1).collect(),
            dzz: block(0, 0),
            dzbzb: block(d, d),
            dzbz: block(d, 0),
            dzzb: block(0, d),
        }
    }

    fn bar(&self, a: usize) -> usize {
        let d = self.dim();
        if a < d {
            a + d
        } else {
            a - d
        }
    }

    fn combine(&self, o: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        let zip = |x: &Block, y: &Block| -> Block { x.iter().zip(y).map(|(a, b)| f(*a, *b)).collect() };
        Self {
            value: f(self.value, o.value),
            dz: self.dz.iter().zip(&o.dz).map(|(a, b)| f(*a, *b)).collect(),
            dzbar: self.dzbar.iter().zip(&o.dzbar).map(|(a, b)| f(*a, *b)).collect(),
            dzz: zip(&self.dzz, &o.dzz),
            dzbzb: zip(&self.dzbzb, &o.dzbzb),
            dzbz: zip(&self.dzbz, &o.dzbz),
            dzzb: zip(&self.dzzb, &o.dzzb),
        }
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let m = |x: &Block| -> Block { x.iter().map(|v| f(*v)).collect() };
        Self {
            value: f(self.value),
            dz: self.dz.iter().map(|v| f(*v)).collect(),
            dzbar: self.dzbar.iter().map(|v| f(*v)).collect(),
            dzz: m(&self.dzz),
            dzbzb: m(&self.dzbzb),
            dzbz: m(&self.dzbz),
            dzzb: m(&self.dzzb),
        }
    }

    /// Checked product; fails when the jets live in different dimensions.
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        crate::error::check_dim(self.dim(), o.dim())?;
        Ok(self.clone() * o.clone())
    }

    /// Checked sum; fails when the jets live in different dimensions.
    pub fn try_add(&self, o: &Self) -> Result<Self> {
        crate::error::check_dim(self.dim(), o.dim())?;
        Ok(self.clone() + o.clone())
    }

    /// Chain rule for `g(u)` where `g` is a function of one complex variable
    /// whose Wirtinger derivatives at `u.value` are `outer`:
    /// `d(g o u) = g_w du + g_wbar d(conj u)` and its second order extension.
    pub fn compose(&self, outer: &OuterDerivatives) -> Self {
        let d = self.dim();
        let u1 = |a: usize| self.d1(a);
        let v1 = |a: usize| self.d1(self.bar(a)).conj();
        let u2 = |a: usize, b: usize| self.d2(a, b);
        let v2 = |a: usize, b: usize| self.d2(self.bar(a), self.bar(b)).conj();
        let g = outer;
        Self::from_fn(
            d,
            g.value,
            |a| g.dw * u1(a) + g.dwbar * v1(a),
            |a, b| {
                g.dww * u1(a) * u1(b)
                    + g.dwwb * (u1(a) * v1(b) + v1(a) * u1(b))
                    + g.dwbwb * v1(a) * v1(b)
                    + g.dw * u2(a, b)
                    + g.dwbar * v2(a, b)
            },
        )
    }

    /// Scales all first derivatives by `r` and second derivatives by `r^2`:
    /// the jet of `z -> f(r z + c)` from the jet of `f` at `r z + c`.
    pub fn rescale_argument(&self, r: f64) -> Self {
        let mut out = self.clone();
        for v in out.dz.iter_mut().chain(out.dzbar.iter_mut()) {
            *v *= r;
        }
        let r2 = r * r;
        for m in [&mut out.dzz, &mut out.dzbzb, &mut out.dzbz, &mut out.dzzb] {
            for v in m.iter_mut() {
                *v *= r2;
            }
        }
        out
    }

    /// `a * self + b * other`, entrywise.
    pub fn axpy(&self, a: C64, other: &Self, b: C64) -> Self {
        self.combine(other, |x, y| a * x + b * y)
    }

    pub fn first_order(&self) -> WirtingerJet1 {
        WirtingerJet1 { value: self.value, dz: self.dz.clone(), dzbar: self.dzbar.clone() }
    }
}

impl Add for WirtingerJet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.combine(&o, |a, b| a + b)
    }
}

impl std::ops::AddAssign<&WirtingerJet2> for WirtingerJet2 {
    fn add_assign(&mut self, o: &WirtingerJet2) {
        self.value += o.value;
        let pairs = [
            (&mut self.dzz, &o.dzz),
            (&mut self.dzbzb, &o.dzbzb),
            (&mut self.dzbz, &o.dzbz),
            (&mut self.dzzb, &o.dzzb),
        ];
        for (x, y) in pairs {
            for (a, b) in x.iter_mut().zip(y) {
                *a += b;
            }
        }
        for (a, b) in self.dz.iter_mut().zip(&o.dz) {
            *a += b;
        }
        for (a, b) in self.dzbar.iter_mut().zip(&o.dzbar) {
            *a += b;
        }
    }
}

impl Sub for WirtingerJet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.combine(&o, |a, b| a - b)
    }
}

impl Mul for WirtingerJet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let d = self.dim();
        let (a, b) = (self.value, o.value);
        Self::from_fn(
            d,
            a * b,
            |i| self.d1(i) * b + a * o.d1(i),
            |i, j| self.d2(i, j) * b + self.d1(i) * o.d1(j) + self.d1(j) * o.d1(i) + a * o.d2(i, j),
        )
    }
}

impl Neg for WirtingerJet2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|v| -v)
    }
}

impl JetScalar for WirtingerJet2 {
    fn value(&self) -> C64 {
        self.value
    }
    fn lift(&self, c: C64) -> Self {
        Self::constant(self.dim(), c)
    }
    fn conj(&self) -> Self {
        let d = self.dim();
        Self::from_fn(
            d,
            self.value.conj(),
            |a| self.d1(self.bar(a)).conj(),
            |a, b| self.d2(self.bar(a), self.bar(b)).conj(),
        )
    }
    fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }
    fn exp(&self) -> Self {
        self.compose(&OuterDerivatives::exp(self.value))
    }
    fn add_const(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.value += c;
        out
    }
}

/// A scalar field `C^d -> C` that can be evaluated on any [`JetScalar`].
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;

    fn eval<S: JetScalar>(&self, z: &[S]) -> S;

    /// Exact polynomial form, when the field is a polynomial.
    fn as_polynomial(&self) -> Option<CWPoly> {
        None
    }

    /// First-order jet at a point; fields with cheaper closed forms override.
    fn jet1(&self, point: &[C64]) -> WirtingerJet1 {
        let d = point.len();
        let vars: Vec<_> = point.iter().enumerate().map(|(k, &z)| WirtingerJet1::variable(d, k, z)).collect();
        self.eval(&vars)
    }

    fn jet2(&self, point: &[C64]) -> WirtingerJet2 {
        self.eval(&WirtingerJet2::seed(point))
    }
}

pub fn value_at<F: ScalarField + ?Sized>(field: &F, point: &[C64]) -> C64 {
    field.eval(point)
}

pub fn jet1_at<F: ScalarField + ?Sized>(field: &F, point: &[C64]) -> WirtingerJet1 {
    field.jet1(point)
}

pub fn jet2_at<F: ScalarField + ?Sized>(field: &F, point: &[C64]) -> WirtingerJet2 {
    field.jet2(point)
}

fn falling(e: u32, k: u32) -> f64 {
    (0..k).map(|i| (e - i) as f64).product()
}

/// Jet of `sum_t c_t prod_a w_a^{e_ta}` with `w = (z, zbar)` read straight
/// off power tables. Each exponent slice has length `2d`, holomorphic part
/// first. Second derivatives are left zero unless `second` is set.
pub fn polynomial_jet<'a>(point: &[C64], terms: impl Iterator<Item = (&'a [u32], C64)> + Clone, second: bool) -> WirtingerJet2 {
    let d = point.len();
    let n = 2 * d;
    let mut top: SmallVec<[u32; 8]> = smallvec![0; n];
    for (e, _) in terms.clone() {
        for (t, &x) in top.iter_mut().zip(e) {
            *t = (*t).max(x);
        }
    }
    // row a of the power table starts at offset[a]
    let mut offset: SmallVec<[usize; 9]> = SmallVec::with_capacity(n + 1);
    let mut powers: SmallVec<[C64; 32]> = SmallVec::new();
    for a in 0..n {
        offset.push(powers.len());
        let w = if a < d { point[a] } else { point[a - d].conj() };
        let mut v = ONE;
        powers.push(v);
        for _ in 0..top[a] {
            v *= w;
            powers.push(v);
        }
    }
    let pw = |a: usize, k: u32| powers[offset[a] + k as usize];
    let mut jet = WirtingerJet2::constant(d, ZERO);
    let mut grad: SmallVec<[C64; 4]> = smallvec![ZERO; n];
    let mut hess: SmallVec<[C64; 16]> = smallvec![ZERO; if second { n * n } else { 0 }];
    for (e, c) in terms {
        // product of all factors, lowering the exponents of `a` and `b`
        let product = |a: usize, b: usize| -> C64 {
            let mut acc = c;
            for (x, &ex) in e.iter().enumerate() {
                let k = u32::from(x == a) + u32::from(x == b);
                if k == 0 {
                    acc *= pw(x, ex);
                } else if ex < k {
                    return ZERO;
                } else {
                    acc *= pw(x, ex - k) * falling(ex, k);
                }
            }
            acc
        };
        jet.value += product(n, n);
        for a in (0..n).filter(|&a| e[a] > 0) {
            grad[a] += product(a, n);
            if second {
                for b in (0..n).filter(|&b| e[b] > 0) {
                    hess[a * n + b] += product(a, b);
                }
            }
        }
    }
    jet.dz.copy_from_slice(&grad[..d]);
    jet.dzbar.copy_from_slice(&grad[d..]);
    if second {
        for j in 0..d {
            for k in 0..d {
                jet.dzz[j * d + k] = hess[j * n + k];
                jet.dzbzb[j * d + k] = hess[(d + j) * n + d + k];
                jet.dzbz[j * d + k] = hess[(d + j) * n + k];
                jet.dzzb[j * d + k] = hess[j * n + d + k];
            }
        }
    }
    jet
}

/// Expression trees over `z_j`, `conj`, `+`, `*`, `exp` and integer powers.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(C64),
    Var(usize),
    Conj(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Scale(C64, Box<Expr>),
    Exp(Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn z(j: usize) -> Self {
        Expr::Var(j)
    }
    pub fn zbar(j: usize) -> Self {
        Expr::Conj(Box::new(Expr::Var(j)))
    }
    pub fn c(re: f64, im: f64) -> Self {
        Expr::Const(C64::new(re, im))
    }
    pub fn conj(self) -> Self {
        Expr::Conj(Box::new(self))
    }
    pub fn exp(self) -> Self {
        Expr::Exp(Box::new(self))
    }
    pub fn pow(self, k: u32) -> Self {
        Expr::Pow(Box::new(self), k)
    }
    pub fn scale(self, c: C64) -> Self {
        Expr::Scale(c, Box::new(self))
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(j) => Some(*j),
            Expr::Conj(e) | Expr::Scale(_, e) | Expr::Exp(e) | Expr::Pow(e, _) => e.max_var(),
            Expr::Add(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Evaluates on jets whose shape is taken from `z[0]`.
    pub fn evaluate<S: JetScalar>(&self, z: &[S]) -> S {
        match self {
            Expr::Const(c) => z[0].lift(*c),
            Expr::Var(j) => z[*j].clone(),
            Expr::Conj(e) => e.evaluate(z).conj(),
            Expr::Add(a, b) => a.evaluate(z) + b.evaluate(z),
            Expr::Mul(a, b) => a.evaluate(z) * b.evaluate(z),
            Expr::Scale(c, e) => e.evaluate(z).scale(*c),
            Expr::Exp(e) => e.evaluate(z).exp(),
            Expr::Pow(e, k) => e.evaluate(z).powi(*k),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(o))
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        self + o.scale(-ONE)
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(o))
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(-ONE)
    }
}

/// An [`Expr`] bound to an explicit dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprField {
    pub dim: usize,
    pub expr: Expr,
}

impl ExprField {
    pub fn new(dim: usize, expr: Expr) -> Result<Self> {
        if let Some(j) = expr.max_var() {
            if j >= dim {
                return Err(Error::IndexOutOfRange { index: j, len: dim });
            }
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("field dimension must be positive".into()));
        }
        Ok(Self { dim, expr })
    }
}

impl ScalarField for ExprField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval<S: JetScalar>(&self, z: &[S]) -> S {
        self.expr.evaluate(z)
    }
}

/// Maximum deviation between the AD Wirtinger gradient and central finite
/// differences of the `(x, y)` representation, combined via
/// `d/dz = (d/dx - i d/dy) / 2` and `d/dzbar = (d/dx + i d/dy) / 2`.
pub fn check_against_finite_differences<F: ScalarField + ?Sized>(
    field: &F,
    point: &[C64],
    h: f64,
) -> Result<f64> {
    crate::error::check_dim(field.dim(), point.len())?;
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let ad = jet1_at(field, point);
    let eval = |j: usize, delta: C64| -> Result<C64> {
        let mut p = point.to_vec();
        p[j] += delta;
        let v = field.eval(&p);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("field value {v} near point")))
        }
    };
    let mut worst: f64 = 0.0;
    for j in 0..point.len() {
        let fx = (eval(j, C64::new(h, 0.0))? - eval(j, C64::new(-h, 0.0))?) / (2.0 * h);
        let fy = (eval(j, C64::new(0.0, h))? - eval(j, C64::new(0.0, -h))?) / (2.0 * h);
        let i = C64::i();
        let dz = 0.5 * (fx - i * fy);
        let dzbar = 0.5 * (fx + i * fy);
        worst = worst.max((dz - ad.dz[j]).norm()).max((dzbar - ad.dzbar[j]).norm());
    }
    Ok(worst)
}
