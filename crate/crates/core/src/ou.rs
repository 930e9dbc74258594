//! The complex Ornstein-Uhlenbeck generator on `C^n`.
//!
//! `L = sum_j [2 d_{z_j} d_{zbar_j} - z_j d_{z_j} - zbar_j d_{zbar_j}]`, which is
//! the real OU generator for `N(0, 1/2)` coordinates written in Wirtinger
//! form. Its eigenspaces are spanned by the Hermite products of a fixed
//! level `|m_p| + |m_q|`, with eigenvalue `-(|m_p| + |m_q|)`.

use num_traits::{One, Signed, Zero};

use crate::cpoly::{CWPoly, Monomial};
use crate::error::{check_dim, Error, Result};
use crate::hermite::{from_hermite, to_hermite};
use crate::rational::{int, Rational, RationalComplex};

/// `L f`, differential route.
///
/// On a monomial, `2 d_z d_zbar` lowers `(p_j, q_j)` by one each with weight
/// `2 p_j q_j`, and the Euler terms give `-(|p| + |q|)`.
pub fn apply_l(f: &CWPoly) -> CWPoly {
    let n = f.n();
    let mut out = CWPoly::zero(n);
    for (m, c) in f.terms() {
        let deg = m.degree();
        if deg > 0 {
            out.add_term(m.clone(), c.scale(&int(-(deg as i64))));
        }
        for j in 0..n {
            let w = 2 * m.p[j] as i64 * m.q[j] as i64;
            if w == 0 {
                continue;
            }
            let mut lowered = m.clone();
            lowered.p[j] -= 1;
            lowered.q[j] -= 1;
            out.add_term(lowered, c.scale(&int(w)));
        }
    }
    out
}

/// `L f`, Hermite route: each level-`k` component is multiplied by `-k`.
pub fn apply_l_hermite(f: &CWPoly) -> CWPoly {
    let e = to_hermite(f).map_levels(|k| RationalComplex::from(-(k as i64)));
    from_hermite(&e)
}

/// Carre du champ by the derived closed form
/// `sum_j d_{z_j} f conj(d_{z_j} g) + d_{zbar_j} f conj(d_{zbar_j} g)`.
pub fn gamma(f: &CWPoly, g: &CWPoly) -> Result<CWPoly> {
    check_dim(f.n(), g.n())?;
    let mut out = CWPoly::zero(f.n());
    for j in 0..f.n() {
        let a = f.dz(j);
        let b = g.dz(j);
        if !a.is_zero() && !b.is_zero() {
            out = &out + &(&a * &b.conj());
        }
        let a = f.dzbar(j);
        let b = g.dzbar(j);
        if !a.is_zero() && !b.is_zero() {
            out = &out + &(&a * &b.conj());
        }
    }
    Ok(out)
}

/// Carre du champ from its definition `2 Gamma(f, g) = L(f gbar) - f L gbar - gbar L f`.
pub fn gamma_from_generator(f: &CWPoly, g: &CWPoly) -> Result<CWPoly> {
    check_dim(f.n(), g.n())?;
    let gb = g.conj();
    let two = &(&apply_l(&(f * &gb)) - &(f * &apply_l(&gb))) - &(&gb * &apply_l(f));
    Ok(two.scale_rational(&Rational::new(1.into(), 2.into())))
}

/// Pseudo-inverse on centered polynomials.
pub fn apply_l_inverse(f: &CWPoly) -> Result<CWPoly> {
    let mean = f.gaussian_expectation();
    if !mean.is_zero() {
        return Err(Error::NotCentered(format!("E[f] = {mean}")));
    }
    let e = to_hermite(f).map_levels(|k| RationalComplex::real(Rational::new((-1).into(), (k as i64).into())));
    Ok(from_hermite(&e))
}

/// Orthogonal projection onto the eigenspace of `-level`.
pub fn project(f: &CWPoly, level: u32) -> CWPoly {
    let mut e = to_hermite(f);
    e.coeffs.retain(|idx, _| idx.degree() == level);
    from_hermite(&e)
}

/// A polynomial eigenfunction `L F = -eigenvalue * F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigenfunction {
    pub poly: CWPoly,
    pub eigenvalue: u32,
}

impl Eigenfunction {
    /// Infers the level from the Hermite support; the zero polynomial gets
    /// level 0.
    pub fn new(poly: CWPoly) -> Result<Self> {
        let levels = to_hermite(&poly).levels();
        match levels.len() {
            0 => Ok(Self { poly, eigenvalue: 0 }),
            1 => Ok(Self { eigenvalue: *levels.iter().next().expect("one level"), poly }),
            _ => Err(Error::NotEigenfunction(format!("Hermite support spans levels {levels:?}"))),
        }
    }

    pub fn with_eigenvalue(poly: CWPoly, eigenvalue: u32) -> Result<Self> {
        let levels = to_hermite(&poly).levels();
        if levels.iter().any(|&k| k != eigenvalue) {
            return Err(Error::NotEigenfunction(format!(
                "expected level {eigenvalue}, Hermite support spans {levels:?}"
            )));
        }
        Ok(Self { poly, eigenvalue })
    }

    pub fn n(&self) -> usize {
        self.poly.n()
    }

    pub fn is_centered(&self) -> bool {
        self.poly.gaussian_expectation().is_zero()
    }

    /// `-L^{-1} F = F / eigenvalue` for centered eigenfunctions.
    pub fn neg_l_inverse(&self) -> Result<CWPoly> {
        if self.poly.is_zero() {
            return Ok(self.poly.clone());
        }
        if self.eigenvalue == 0 {
            return Err(Error::NotCentered("nonzero constant eigenfunction".into()));
        }
        Ok(self.poly.scale_rational(&Rational::new(1.into(), (self.eigenvalue as i64).into())))
    }
}

/// Both `F_1 F_2` and `F_1 conj(F_2)` live on levels `<= p_1 + p_2`.
pub fn is_jointly_chaotic(f1: &Eigenfunction, f2: &Eigenfunction) -> Result<bool> {
    check_dim(f1.n(), f2.n())?;
    let bound = f1.eigenvalue + f2.eigenvalue;
    let within = |p: &CWPoly| to_hermite(p).max_level().map_or(true, |k| k <= bound);
    Ok(within(&(&f1.poly * &f2.poly)) && within(&(&f1.poly * &f2.poly.conj())))
}

/// `F = sqrt(scale) * (G_1, ..., G_d)` with eigenfunctions `G_k` over shared
/// variables. The variance scale keeps normalizations such as `n^{-1/2}`
/// exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChaoticVector {
    pub components: Vec<Eigenfunction>,
    pub scale: Rational,
}

impl ChaoticVector {
    pub fn new(components: Vec<Eigenfunction>) -> Result<Self> {
        Self::with_scale(components, Rational::one())
    }

    pub fn with_scale(components: Vec<Eigenfunction>, scale: Rational) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidArgument("chaotic vector needs at least one component".into()));
        };
        if !scale.is_positive() {
            return Err(Error::InvalidArgument(format!("variance scale must be positive, got {scale}")));
        }
        let n = first.n();
        for c in &components {
            check_dim(n, c.n())?;
        }
        for (i, a) in components.iter().enumerate() {
            for b in &components[i..] {
                if !is_jointly_chaotic(a, b)? {
                    return Err(Error::NotChaotic);
                }
            }
        }
        Ok(Self { components, scale })
    }

    pub fn from_polys(polys: Vec<CWPoly>) -> Result<Self> {
        Self::new(polys.into_iter().map(Eigenfunction::new).collect::<Result<_>>()?)
    }

    pub fn d(&self) -> usize {
        self.components.len()
    }

    pub fn n(&self) -> usize {
        self.components[0].n()
    }

    pub fn is_centered(&self) -> bool {
        self.components.iter().all(Eigenfunction::is_centered)
    }

    pub fn require_centered(&self) -> Result<()> {
        for (k, c) in self.components.iter().enumerate() {
            if !c.is_centered() {
                return Err(Error::NotCentered(format!("component {k}")));
            }
        }
        Ok(())
    }
}

/// Quantities of the spectral inequality for `F` on levels `0..=lambda_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thm3Report {
    /// `int F (L + eta)^2 Fbar`
    pub lhs: Rational,
    /// `eta * int F (L + eta) Fbar`
    pub mid: Rational,
    /// `int F (L + eta) Fbar`
    pub first: Rational,
    /// `c * lhs`
    pub rhs: Rational,
    pub c: Rational,
    pub eta: Rational,
    pub lambda_p: u32,
}

impl Thm3Report {
    pub fn lower_holds(&self) -> bool {
        self.lhs <= self.mid
    }

    /// `eta * first <= eta * c * lhs`, equivalently `first <= c * lhs`.
    pub fn upper_holds(&self) -> bool {
        self.first <= self.rhs
    }

    /// `mid <= c * lhs` without the factor `eta` on the right.
    pub fn unscaled_upper_holds(&self) -> bool {
        self.mid <= self.rhs
    }

    pub fn holds(&self) -> bool {
        self.lower_holds() && self.upper_holds()
    }
}

fn l_plus(f: &CWPoly, eta: &Rational) -> CWPoly {
    &apply_l(f) + &f.scale_rational(eta)
}

/// Evaluates both sides of the spectral inequality through the generator.
///
/// With `F = sum_k F_k`, `(L + eta) F_k = (eta - k) F_k`, so
/// `lhs = sum |F_k|^2 (eta - k)^2` and `first = sum |F_k|^2 (eta - k)`. The
/// upper bound holds with `1/c = min({eta - k : 0 <= k <= lambda_p} \ {0})`.
pub fn check_thm3(f: &CWPoly, eta: &Rational) -> Result<Thm3Report> {
    let lambda_p = to_hermite(f).max_level().unwrap_or(0);
    if *eta < int(lambda_p as i64) {
        return Err(Error::InvalidArgument(format!("eta = {eta} below top level {lambda_p}")));
    }
    let min_gap = (0..=lambda_p)
        .map(|k| eta - int(k as i64))
        .filter(|g| !g.is_zero())
        .min()
        .ok_or_else(|| Error::InvalidArgument("no nonzero spectral gap: eta = lambda_p = 0".into()))?;
    let c = min_gap.recip();
    let fb = f.conj();
    let once = l_plus(&fb, eta);
    let twice = l_plus(&once, eta);
    let first = f.expect_product(&once);
    let lhs = f.expect_product(&twice);
    if !first.is_real() || !lhs.is_real() {
        return Err(Error::InvalidArgument("self-adjointness violated: non-real quadratic form".into()));
    }
    let (first, lhs) = (first.re, lhs.re);
    Ok(Thm3Report {
        mid: eta * &first,
        rhs: &c * &lhs,
        first,
        lhs,
        c,
        eta: eta.clone(),
        lambda_p,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cor1Report {
    /// `int |Gamma(F_1, F_2)|^2`
    pub lhs: Rational,
    /// `(p_1 + p_2)/2 * int conj(F_1) F_2 Gamma(F_1, F_2)`
    pub rhs: RationalComplex,
}

impl Cor1Report {
    pub fn holds(&self) -> bool {
        self.rhs.is_real() && !self.rhs.re.is_negative() && self.lhs <= self.rhs.re
    }
}

pub fn check_cor1(f1: &Eigenfunction, f2: &Eigenfunction) -> Result<Cor1Report> {
    if !is_jointly_chaotic(f1, f2)? {
        return Err(Error::NotChaotic);
    }
    let g = gamma(&f1.poly, &f2.poly)?;
    let lhs = g.norm_sq();
    let weight = Rational::new(((f1.eigenvalue + f2.eigenvalue) as i64).into(), 2.into());
    let rhs = (&f1.poly.conj() * &f2.poly).expect_product(&g).scale(&weight);
    Ok(Cor1Report { lhs, rhs })
}

/// Right-hand side of the diffusion identity for `L phi(F)`, built from
/// `L F_j`, `L conj(F_j)`, the second Wirtinger derivatives of `phi` and the
/// four Gamma pairings.
pub fn diffusion_rhs(phi: &CWPoly, fs: &[CWPoly]) -> Result<CWPoly> {
    check_dim(phi.n(), fs.len())?;
    let fb: Vec<CWPoly> = fs.iter().map(CWPoly::conj).collect();
    let n = fs[0].n();
    let at = |p: &CWPoly| p.compose(fs);
    let mut out = CWPoly::zero(n);
    for j in 0..fs.len() {
        out = &out + &(&at(&phi.dz(j))? * &apply_l(&fs[j]));
        out = &out + &(&at(&phi.dzbar(j))? * &apply_l(&fb[j]));
        for k in 0..fs.len() {
            out = &out + &(&at(&phi.dz(j).dz(k))? * &gamma(&fs[j], &fb[k])?);
            out = &out + &(&at(&phi.dzbar(j).dzbar(k))? * &gamma(&fb[j], &fs[k])?);
            out = &out + &(&at(&phi.dz(j).dzbar(k))? * &gamma(&fs[j], &fs[k])?);
            out = &out + &(&at(&phi.dzbar(j).dz(k))? * &gamma(&fb[j], &fb[k])?);
        }
    }
    Ok(out)
}

/// Right-hand side of the chain rule for `Gamma(phi(F), G)`.
pub fn chain_rule_rhs(phi: &CWPoly, fs: &[CWPoly], g: &CWPoly) -> Result<CWPoly> {
    check_dim(phi.n(), fs.len())?;
    let mut out = CWPoly::zero(g.n());
    for (j, f) in fs.iter().enumerate() {
        out = &out + &(&phi.dz(j).compose(fs)? * &gamma(f, g)?);
        out = &out + &(&phi.dzbar(j).compose(fs)? * &gamma(&f.conj(), g)?);
    }
    Ok(out)
}

/// `m` as a polynomial with coefficient one.
pub fn monomial_poly(p: Vec<u32>, q: Vec<u32>) -> Result<CWPoly> {
    Ok(CWPoly::monomial(Monomial::new(p, q)?, RationalComplex::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpoly::random_poly;
    use crate::hermite::{basis_indices, phi_basis_element, random_chaos_sum, random_eigenfunction};
    use crate::par::stream_rng;
    use crate::rational::rat;
    use num_complex::Complex64 as C64;
    use rand::Rng;

    fn z(n: usize, j: usize) -> CWPoly {
        CWPoly::var(n, j)
    }

    fn zb(n: usize, j: usize) -> CWPoly {
        CWPoly::var_bar(n, j)
    }

    fn c(v: i64) -> CWPoly {
        CWPoly::constant(1, RationalComplex::from(v))
    }

    #[test]
    fn generator_examples() {
        assert_eq!(apply_l(&z(1, 0)), -z(1, 0));
        let h11 = &(&z(1, 0) * &zb(1, 0)) - &c(1);
        assert_eq!(apply_l(&h11), h11.scale(&RationalComplex::from(-2)));
        assert!(apply_l(&c(7)).is_zero());
    }

    #[test]
    fn eigen_relation() {
        for n in 1..=3 {
            let max = if n == 3 { 4 } else { 6 };
            for level in 0..=max {
                for idx in basis_indices(n, level) {
                    let phi = phi_basis_element(&idx.p, &idx.q).unwrap().poly;
                    assert_eq!(apply_l(&phi), phi.scale(&RationalComplex::from(-(level as i64))), "{idx:?}");
                }
            }
        }
    }

    #[test]
    fn routes_agree() {
        let mut rng = stream_rng(11, 0);
        for _ in 0..60 {
            let n = rng.gen_range(1..=2);
            let f = random_poly(&mut rng, n, 5, 6);
            assert_eq!(apply_l(&f), apply_l_hermite(&f));
        }
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(&z(1, 0), &z(1, 0)).unwrap(), c(1));
        assert!(gamma(&z(1, 0), &zb(1, 0)).unwrap().is_zero());
        assert!(gamma(&z(2, 0), &z(2, 1)).unwrap().is_zero());
        assert!(gamma(&z(1, 0), &z(2, 0)).is_err());
    }

    #[test]
    fn gamma_routes_and_hermitian() {
        let mut rng = stream_rng(12, 0);
        for _ in 0..60 {
            let n = rng.gen_range(1..=2);
            let f = random_poly(&mut rng, n, 3, 4);
            let g = random_poly(&mut rng, n, 3, 4);
            let closed = gamma(&f, &g).unwrap();
            assert_eq!(closed, gamma_from_generator(&f, &g).unwrap());
            assert_eq!(closed, gamma(&g, &f).unwrap().conj());
            assert_eq!(closed.gaussian_expectation(), -f.expect_product(&apply_l(&g.conj())));
        }
    }

    #[test]
    fn gamma_positive() {
        let mut rng = stream_rng(13, 0);
        for _ in 0..30 {
            let f = random_poly(&mut rng, 2, 3, 4);
            let g = gamma(&f, &f).unwrap();
            assert!(!g.gaussian_expectation().re.is_negative());
            assert!(g.gaussian_expectation().is_real());
            for _ in 0..5 {
                let pt = [C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), C64::new(rng.gen(), rng.gen())];
                let v = g.evaluate(&pt);
                assert!(v.re >= -1e-9 && v.im.abs() < 1e-9 * (1.0 + v.re.abs()));
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(apply_l_inverse(&z(1, 0)).unwrap(), -z(1, 0));
        let z2 = &z(1, 0) * &z(1, 0);
        assert_eq!(apply_l_inverse(&z2).unwrap(), z2.scale_rational(&rat(-1, 2)));
        let h11 = &(&z(1, 0) * &zb(1, 0)) - &c(1);
        assert_eq!(apply_l_inverse(&h11).unwrap(), h11.scale_rational(&rat(-1, 2)));
        assert!(matches!(apply_l_inverse(&(&h11 + &c(1))), Err(Error::NotCentered(_))));
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = stream_rng(14, 0);
        for _ in 0..40 {
            let f = random_poly(&mut rng, 2, 4, 5);
            let centered = &f - &CWPoly::constant(2, f.gaussian_expectation());
            let u = apply_l_inverse(&centered).unwrap();
            assert_eq!(apply_l(&u), centered);
        }
    }

    #[test]
    fn projections() {
        let zz = &z(1, 0) * &zb(1, 0);
        assert_eq!(project(&zz, 0), c(1));
        assert_eq!(project(&zz, 2), &zz - &c(1));
        assert!(project(&z(1, 0), 2).is_zero());
        let mut rng = stream_rng(15, 0);
        for _ in 0..20 {
            let f = random_poly(&mut rng, 2, 4, 5);
            let sum = (0..=f.degree()).fold(CWPoly::zero(2), |acc, k| &acc + &project(&f, k));
            assert_eq!(sum, f);
        }
    }

    #[test]
    fn eigenfunction_validation() {
        assert_eq!(Eigenfunction::new(&z(1, 0) * &z(1, 0)).unwrap().eigenvalue, 2);
        assert_eq!(Eigenfunction::new(CWPoly::zero(1)).unwrap().eigenvalue, 0);
        assert!(Eigenfunction::new(&z(1, 0) * &zb(1, 0)).is_err());
        assert!(Eigenfunction::with_eigenvalue(z(1, 0), 2).is_err());
    }

    #[test]
    fn joint_chaos_examples() {
        let e = |p: CWPoly| Eigenfunction::new(p).unwrap();
        let z1 = e(z(1, 0));
        assert!(is_jointly_chaotic(&z1, &z1).unwrap());
        let z2 = e(&z(1, 0) * &z(1, 0));
        let zb2 = e(&zb(1, 0) * &zb(1, 0));
        assert!(is_jointly_chaotic(&z2, &zb2).unwrap());
        assert!(is_jointly_chaotic(&z1, &e(CWPoly::zero(1))).unwrap());
    }

    #[test]
    fn thm3_examples() {
        let r = check_thm3(&z(1, 0), &int(1)).unwrap();
        assert!(r.lhs.is_zero() && r.mid.is_zero() && r.holds());

        let f = &z(1, 0) + &(&(&z(1, 0) * &zb(1, 0)) - &c(1));
        let r = check_thm3(&f, &int(2)).unwrap();
        assert_eq!((r.lhs.clone(), r.mid.clone(), r.c.clone()), (int(1), int(2), int(1)));
        assert!(r.holds());
        assert!(!r.unscaled_upper_holds());

        let z2 = &z(1, 0) * &z(1, 0);
        let r = check_thm3(&z2, &int(3)).unwrap();
        assert_eq!((r.lhs.clone(), r.mid.clone()), (int(2), int(6)));
        assert!(r.holds());

        assert!(check_thm3(&z2, &int(1)).is_err());
        assert!(check_thm3(&c(1), &int(0)).is_err());
    }

    #[test]
    fn thm3_matches_spectral_formula() {
        let mut rng = stream_rng(16, 0);
        for _ in 0..30 {
            let f = random_chaos_sum(&mut rng, 2, 3, 3);
            let e = to_hermite(&f);
            let top = e.max_level().unwrap_or(0);
            let eta = int(top as i64) + rat(rng.gen_range(0..4), 2);
            if eta.is_zero() {
                continue;
            }
            let r = check_thm3(&f, &eta).unwrap();
            let spectral: Rational = e
                .level_weights()
                .iter()
                .map(|(k, w)| {
                    let g = &eta - int(*k as i64);
                    w * &g * &g
                })
                .sum();
            assert_eq!(r.lhs, spectral);
            assert!(r.holds());
        }
    }

    #[test]
    fn cor1_examples() {
        let e = |p: CWPoly| Eigenfunction::new(p).unwrap();
        let r = check_cor1(&e(z(1, 0)), &e(z(1, 0))).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (int(1), RationalComplex::from(1)));
        assert!(r.holds());

        let z2 = e(&z(1, 0) * &z(1, 0));
        let r = check_cor1(&z2, &z2).unwrap();
        // Gamma(z^2, z^2) = 4|z|^2, so lhs = 16 E|z|^4 = 32, rhs = 2 E[4|z|^6] = 48
        assert_eq!((r.lhs.clone(), r.rhs.re.clone()), (int(32), int(48)));
        assert!(r.holds());

        let r = check_cor1(&e(z(2, 0)), &e(z(2, 1))).unwrap();
        assert!(r.lhs.is_zero() && r.rhs.is_zero() && r.holds());
    }

    #[test]
    fn cor1_random() {
        let mut rng = stream_rng(17, 0);
        for _ in 0..30 {
            let (la, lb) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            let a = Eigenfunction::new(random_eigenfunction(&mut rng, 2, la, 3)).unwrap();
            let b = Eigenfunction::new(random_eigenfunction(&mut rng, 2, lb, 3)).unwrap();
            assert!(check_cor1(&a, &b).unwrap().holds());
        }
    }

    #[test]
    fn diffusion_and_chain_rule() {
        let mut rng = stream_rng(18, 0);
        let w = CWPoly::var(1, 0);
        let phis = [&w * &w, &w * &CWPoly::var_bar(1, 0), (&w * &w) * CWPoly::var_bar(1, 0)];
        for phi in &phis {
            for _ in 0..4 {
                let level = rng.gen_range(1..=2);
                let f = random_eigenfunction(&mut rng, 2, level, 3);
                let g = random_poly(&mut rng, 2, 2, 3);
                let composed = phi.compose(std::slice::from_ref(&f)).unwrap();
                assert_eq!(apply_l(&composed), diffusion_rhs(phi, std::slice::from_ref(&f)).unwrap());
                assert_eq!(
                    gamma(&composed, &g).unwrap(),
                    chain_rule_rhs(phi, std::slice::from_ref(&f), &g).unwrap()
                );
            }
        }
        // two-argument phi(w1, w2) = w1 * conj(w2)
        let phi = &CWPoly::var(2, 0) * &CWPoly::var_bar(2, 1);
        let fs = [random_poly(&mut rng, 2, 2, 3), random_poly(&mut rng, 2, 2, 3)];
        let composed = phi.compose(&fs).unwrap();
        assert_eq!(apply_l(&composed), diffusion_rhs(&phi, &fs).unwrap());
    }

    #[test]
    fn chaotic_vector_checks() {
        let v = ChaoticVector::from_polys(vec![z(2, 0), &z(2, 1) * &z(2, 1)]).unwrap();
        assert_eq!((v.d(), v.n()), (2, 2));
        assert!(v.is_centered());
        let w = ChaoticVector::from_polys(vec![CWPoly::constant(1, RationalComplex::from(3))]).unwrap();
        assert!(w.require_centered().is_err());
        assert!(ChaoticVector::from_polys(vec![z(1, 0), z(2, 0)]).is_err());
        assert!(ChaoticVector::with_scale(vec![], int(1)).is_err());
    }
}
