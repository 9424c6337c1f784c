//! The valuation bound for `Phi_N` at pairs of ordinary CM points, with
//! exact certificates for pairs that really are `N`-isogenous.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::Serialize;

use super::{modular_poly, psi, ModularPolynomial};
use crate::cm::{hilbert_class_poly, reduction_type, Discriminant, ReductionType};
use crate::error::{Error, Result};
use crate::padic::gf::{
    poly_add, poly_degree, poly_derivative, poly_eval, poly_mul, poly_rem, poly_trim, Fq, FqPoly,
    ResidueField,
};
use crate::padic::roots::embed;
use crate::padic::{IntegerPolynomial, PadicNumber, Slope, UnramifiedRing, Valuation};

/// A root of `H_d` in an unramified extension, tagged by its position in
/// the list of roots so equal points can be recognized exactly.
#[derive(Clone, Debug)]
pub struct CmPoint {
    pub discriminant: Discriminant,
    pub index: usize,
    pub value: PadicNumber,
}

/// Determinant by fraction-free elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `Res(a, b)` of two integer polynomials (constant term first).
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let da = a.len() - 1;
    let db = b.len() - 1;
    let n = da + db;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for r in 0..db {
        for (k, c) in a.iter().rev().enumerate() {
            m[r][r + k] = c.clone();
        }
    }
    for r in 0..da {
        for (k, c) in b.iter().rev().enumerate() {
            m[db + r][r + k] = c.clone();
        }
    }
    bareiss_det(m)
}

/// Interpolates the integer polynomial through `(x_k, y_k)`, `x_k = k`.
fn interpolate(ys: &[BigInt]) -> IntegerPolynomial {
    // Newton divided differences on 0, 1, ..., n
    let n = ys.len();
    let mut dd: Vec<BigRational> = ys
        .iter()
        .map(|y| BigRational::from_integer(y.clone()))
        .collect();
    for level in 1..n {
        for k in (level..n).rev() {
            dd[k] = (&dd[k] - &dd[k - 1]) / BigRational::from_integer(BigInt::from(level));
        }
    }
    let mut poly = vec![BigRational::zero(); n];
    // Horner on the Newton basis
    for k in (0..n).rev() {
        // poly = poly * (X - k) + dd[k]
        let mut next = vec![BigRational::zero(); n];
        for (i, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i + 1 < n {
                next[i + 1] += c;
            }
            next[i] -= c * BigRational::from_integer(BigInt::from(k));
        }
        next[0] += &dd[k];
        poly = next;
    }
    IntegerPolynomial::new(
        poly.into_iter()
            .map(|c| {
                assert!(c.is_integer(), "interpolant is not integral");
                c.to_integer()
            })
            .collect(),
    )
}

/// `R(X) = Res_Y(Phi_N(X, Y), h(Y))`, whose roots are the `N`-isogenous
/// partners of the roots of `h`.
pub fn partner_resultant(phi: &ModularPolynomial, h: &IntegerPolynomial) -> IntegerPolynomial {
    let deg = phi.degree() * h.degree().unwrap_or(0);
    let ys: Vec<BigInt> = (0..=deg)
        .map(|x| resultant(&phi.specialize_x(&BigInt::from(x)), h.coeffs()))
        .collect();
    interpolate(&ys)
}

fn cached_partner_resultant(d: &Discriminant, level: u32) -> Result<Arc<IntegerPolynomial>> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, u32), Arc<IntegerPolynomial>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&(d.value(), level)) {
        return Ok(r.clone());
    }
    let h = hilbert_class_poly(d)?;
    let r = Arc::new(partner_resultant(modular_poly(level)?, h.poly()));
    cache.lock().unwrap().insert((d.value(), level), r.clone());
    Ok(r)
}

/// Exact test that roots of `H_{d1}` and `H_{d2}` are `N`-isogenous:
/// both `gcd(H_{d1}, R_{d2})` and `gcd(H_{d2}, R_{d1})` are nonconstant.
pub fn classes_isogenous(d1: &Discriminant, d2: &Discriminant, level: u32) -> Result<bool> {
    let h1 = hilbert_class_poly(d1)?;
    let h2 = hilbert_class_poly(d2)?;
    let r2 = cached_partner_resultant(d2, level)?;
    if h1.poly().gcd(&r2).degree().unwrap_or(0) == 0 {
        return Ok(false);
    }
    let r1 = cached_partner_resultant(d1, level)?;
    Ok(h2.poly().gcd(&r1).degree().unwrap_or(0) > 0)
}

/// `Res(a, b)` over a finite field, by the Euclidean algorithm.
pub fn fq_resultant(f: &ResidueField, a: &FqPoly, b: &FqPoly) -> Fq {
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut acc = f.one();
    loop {
        let (Some(m), Some(n)) = (poly_degree(&a), poly_degree(&b)) else {
            return f.zero();
        };
        if n == 0 {
            return f.mul(&acc, &f.pow_u64(&b[0], m as u64));
        }
        if m == 0 {
            return f.mul(&acc, &f.pow_u64(&a[0], n as u64));
        }
        let r = poly_rem(f, &a, &b);
        let Some(dr) = poly_degree(&r) else {
            return f.zero();
        };
        // Res(a, b) = (-1)^{mn} lc(b)^{m - deg r} Res(b, r)
        acc = f.mul(&acc, &f.pow_u64(b.last().unwrap(), (m - dr) as u64));
        if (m * n) % 2 == 1 {
            acc = f.neg(&acc);
        }
        a = b;
        b = r;
    }
}

/// Coefficients of `h` reduced into `[0, p)`.
pub fn reduce_mod_p(h: &IntegerPolynomial, p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    h.coeffs()
        .iter()
        .map(|c| {
            let r: BigInt = ((c % &pb) + &pb) % &pb;
            r.to_u64_digits().1.first().copied().unwrap_or(0)
        })
        .collect()
}

/// `Res(a, b) mod p` for coefficient lists over `F_p`.
pub fn resultant_mod_p(a: &[u64], b: &[u64], p: u64) -> u64 {
    let field = ResidueField::get(p, 1);
    let f = field.as_ref();
    let lift = |v: &[u64]| poly_trim(f, v.iter().map(|&c| f.from_u64(c)).collect());
    fq_resultant(f, &lift(a), &lift(b))[0]
}

fn reduce(f: &ResidueField, h: &IntegerPolynomial) -> FqPoly {
    let p = BigInt::from(f.p());
    let out = h
        .coeffs()
        .iter()
        .map(|c| {
            let r: BigInt = ((c % &p) + &p) % &p;
            f.from_u64(r.to_u64_digits().1.first().copied().unwrap_or(0))
        })
        .collect();
    poly_trim(f, out)
}

/// `Res_X(Phi_N(X, Y), h(X))` reduced mod `p`, by interpolation over a
/// field `F_{p^k}` with more than `Psi(N) deg h` elements.
pub fn partner_resultant_mod_p(phi: &ModularPolynomial, h: &IntegerPolynomial, p: u64) -> Vec<u64> {
    let deg = phi.degree() * h.degree().unwrap_or(0);
    let mut k = 1;
    while (p as f64).powi(k as i32) <= deg as f64 {
        k += 1;
    }
    let field = ResidueField::get(p, k);
    let f = field.as_ref();
    let hbar = reduce(f, h);
    let m = phi.degree();
    let pb = BigInt::from(p);
    let cbar: Vec<Vec<Fq>> = (0..=m)
        .map(|i| {
            (0..=m)
                .map(|j| {
                    let r: BigInt = ((phi.coeff(i, j) % &pb) + &pb) % &pb;
                    f.from_u64(r.to_u64_digits().1.first().copied().unwrap_or(0))
                })
                .collect()
        })
        .collect();
    // Newton-form interpolation through (y_t, Res_X(Phi(X, y_t), h(X)))
    let mut poly: FqPoly = Vec::new();
    let mut basis: FqPoly = vec![f.one()];
    for y in f.elements().take(deg + 1) {
        let spec: FqPoly = poly_trim(
            f,
            (0..=m)
                .map(|i| {
                    cbar[i]
                        .iter()
                        .rev()
                        .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, &y), c))
                })
                .collect(),
        );
        let v = fq_resultant(f, &spec, &hbar);
        let diff = f.sub(&v, &poly_eval(f, &poly, &y));
        let scale = f.mul(
            &diff,
            &f.inv(&poly_eval(f, &basis, &y)).expect("distinct nodes"),
        );
        let term: FqPoly = basis.iter().map(|c| f.mul(c, &scale)).collect();
        poly = poly_add(f, &poly, &term);
        basis = poly_mul(f, &basis, &vec![f.neg(&y), f.one()]);
    }
    poly.iter()
        .map(|c| {
            assert!(
                c[1..].iter().all(|&x| x == 0),
                "partner resultant has coefficients in F_p"
            );
            c[0]
        })
        .collect()
}

/// `R(Y) = Res_X(Phi_N(X, Y), h(X))` with every exact factor of `h(Y)`
/// removed, together with the number `m` of factors removed. For monic
/// irreducible `h`, each root `y` of `h` has exactly `m` roots `x` with
/// `Phi_N(x, y) = 0` counted with multiplicity, and the stripped resultant
/// is the product of the nonzero values `Phi_N(x, Y)`.
pub fn partner_resultant_stripped(
    phi: &ModularPolynomial,
    h: &IntegerPolynomial,
) -> (IntegerPolynomial, usize) {
    let mut r = partner_resultant(phi, h);
    let mut m = 0;
    if h.degree().unwrap_or(0) == 0 {
        return (r, 0);
    }
    while let Some(q) = r.div_exact(h) {
        if q.is_zero() {
            break;
        }
        r = q;
        m += 1;
    }
    (r, m)
}

/// `prod Phi_N(x1, x2) mod p` over all pairs of roots `x1` of `h1`, `x2` of
/// `h2` (up to sign). When `h1 = h2` and `N = 1` the diagonal is left out
/// and this is the discriminant of `h1`. A nonzero value proves that every
/// such pair has `ord_p Phi_N(x1, x2) = 0` in every embedding.
pub fn pair_product_mod_p(
    level: u32,
    h1: &IntegerPolynomial,
    h2: &IntegerPolynomial,
    p: u64,
) -> Result<u64> {
    let field = ResidueField::get(p, 1);
    let f = field.as_ref();
    if level == 1 && h1 == h2 {
        let a = reduce(f, h1);
        let da = poly_derivative(f, &a);
        if poly_degree(&a) == Some(0) {
            return Ok(1);
        }
        return Ok(fq_resultant(f, &a, &da)[0]);
    }
    let r = partner_resultant_mod_p(modular_poly(level)?, h1, p);
    let r: FqPoly = poly_trim(f, r.into_iter().map(|c| f.from_u64(c)).collect());
    Ok(fq_resultant(f, &r, &reduce(f, h2))[0])
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub level: u32,
    pub p: u64,
    /// `ord_p Phi_N(x1, x2)`; `None` when it vanishes to working precision.
    pub valuation: Option<i64>,
    /// Lower bound for the valuation when it vanishes to working precision.
    pub at_least: Option<i64>,
    pub threshold: String,
    pub above_threshold: bool,
    pub certified_zero: bool,
    pub pass: bool,
}

/// `6 Psi(N) / (p - 1)`.
pub fn rigidity_threshold(level: u32, p: u64) -> Slope {
    Ratio::new(6 * psi(level as u64) as i64, p as i64 - 1)
}

/// Brings both values into `W_lcm`.
pub fn common_embedding(a: &PadicNumber, b: &PadicNumber) -> Result<(PadicNumber, PadicNumber)> {
    let fa = a.residue_degree();
    let fb = b.residue_degree();
    let l = num_integer::lcm(fa, fb);
    let ring = UnramifiedRing::get(a.p(), l);
    Ok((embed(a, &ring)?, embed(b, &ring)?))
}

/// `Phi_N(x1, x2)` evaluated `p`-adically.
pub fn eval_phi(
    phi: &ModularPolynomial,
    x1: &PadicNumber,
    x2: &PadicNumber,
    prec: u32,
) -> Result<PadicNumber> {
    let (a, b) = common_embedding(x1, x2)?;
    let ring = a.ring().clone();
    let m = phi.degree();
    let mut acc = PadicNumber::zero(&ring);
    for i in (0..=m).rev() {
        let mut inner = PadicNumber::zero(&ring);
        for j in (0..=m).rev() {
            let c = phi.coeff(i, j);
            inner = &inner * &b;
            if !c.is_zero() {
                inner = &inner + &PadicNumber::from_integer(&ring, c, prec);
            }
        }
        acc = &(&acc * &a) + &inner;
    }
    Ok(acc)
}

/// PASS iff `ord_p Phi_N(x1, x2) <= 6 Psi(N)/(p-1)` or the value is zero:
/// identical points for `N = 1`, otherwise a value vanishing to working
/// precision together with an exact isogeny certificate for the classes.
pub fn rigidity_threshold_check(
    x1: &CmPoint,
    x2: &CmPoint,
    level: u32,
    p: u64,
) -> Result<RigidityReport> {
    for x in [x1, x2] {
        if reduction_type(&x.discriminant, p)? != ReductionType::Ordinary {
            return Err(Error::Precondition(format!(
                "discriminant {} is supersingular at {p}",
                x.discriminant.value()
            )));
        }
    }
    let phi = modular_poly(level)?;
    let threshold = rigidity_threshold(level, p);
    let same = x1.discriminant == x2.discriminant && x1.index == x2.index;
    let prec = x1
        .value
        .precision()
        .unwrap_or(0)
        .min(x2.value.precision().unwrap_or(0));
    let value = eval_phi(phi, &x1.value, &x2.value, prec + 8)?;
    let mut report = RigidityReport {
        level,
        p,
        valuation: None,
        at_least: None,
        threshold: threshold.to_string(),
        above_threshold: false,
        certified_zero: false,
        pass: false,
    };
    match value.ord_lower_bound() {
        Valuation::Finite(v) if !value.is_zero_at_precision() => {
            report.valuation = Some(v);
            report.above_threshold = Slope::from_integer(v) > threshold;
            report.pass = !report.above_threshold;
        }
        lb => {
            report.at_least = lb.finite();
            report.above_threshold = true;
            report.certified_zero = if level == 1 {
                same
            } else {
                classes_isogenous(&x1.discriminant, &x2.discriminant, level)?
            };
            if !report.certified_zero {
                if lb
                    .finite()
                    .is_some_and(|a| Slope::from_integer(a) <= threshold)
                {
                    return Err(Error::PrecisionExhausted(format!(
                        "Phi_{level}(x1, x2) vanishes only to p^{a} at threshold {threshold}",
                        a = lb.finite().unwrap()
                    )));
                }
                return Err(Error::PrecisionExhausted(format!(
                    "Phi_{level}(x1, x2) vanishes to working precision without an isogeny certificate"
                )));
            }
            report.pass = true;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::roots_in_unramified;

    #[test]
    fn determinant_and_resultant() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(2)],
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(2)],
        ];
        assert_eq!(bareiss_det(m), BigInt::from(6));
        // Res(X - 2, X^2 + 1) = 5
        let a = [BigInt::from(-2), BigInt::from(1)];
        let b = [BigInt::from(1), BigInt::from(0), BigInt::from(1)];
        assert_eq!(resultant(&a, &b), BigInt::from(5));
    }

    #[test]
    fn partner_resultant_of_linear_class_polynomial() {
        // H_{-3} = X: the 2-isogenous partners of 0 are the roots of Phi_2(X, 0)
        let phi = modular_poly(2).unwrap();
        let r = partner_resultant(phi, &IntegerPolynomial::from_i64(&[0, 1]));
        // up to the sign (-1)^{deg Phi * deg H}
        let want: Vec<BigInt> = (0..=3).map(|i| -phi.coeff(i, 0)).collect();
        assert_eq!(r.coeffs(), &want[..]);
    }

    #[test]
    fn isogenous_classes() {
        let d = |v| Discriminant::new(v).unwrap();
        // j = 0 and j = 54000 are 2-isogenous; -3 and -4 are not
        assert!(classes_isogenous(&d(-3), &d(-12), 2).unwrap());
        assert!(!classes_isogenous(&d(-3), &d(-4), 2).unwrap());
        assert!(classes_isogenous(&d(-7), &d(-28), 2).unwrap());
    }

    fn points(d: i64, p: u64) -> Vec<CmPoint> {
        let disc = Discriminant::new(d).unwrap();
        let h = hilbert_class_poly(&disc).unwrap();
        roots_in_unramified(h.poly(), p, 6, 20)
            .unwrap()
            .into_iter()
            .enumerate()
            .map(|(index, value)| CmPoint {
                discriminant: disc,
                index,
                value,
            })
            .collect()
    }

    #[test]
    fn same_root_is_certified() {
        let xs = points(-11, 5);
        let r = rigidity_threshold_check(&xs[0], &xs[0], 1, 5).unwrap();
        assert!(r.pass && r.certified_zero);
    }

    #[test]
    fn distinct_roots_stay_apart() {
        // -47 is ordinary at 3
        let xs = points(-47, 3);
        assert!(xs.len() >= 2);
        let r = rigidity_threshold_check(&xs[0], &xs[1], 1, 3).unwrap();
        assert!(r.valuation.is_some());
    }

    #[test]
    fn supersingular_is_rejected() {
        let disc = Discriminant::new(-3).unwrap();
        let x = CmPoint {
            discriminant: disc,
            index: 0,
            value: PadicNumber::zero(&UnramifiedRing::get(5, 1)),
        };
        assert!(matches!(
            rigidity_threshold_check(&x, &x, 1, 5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn resultant_mod_p_matches_exact() {
        let phi = modular_poly(2).unwrap();
        let h = hilbert_class_poly(&Discriminant::new(-23).unwrap()).unwrap();
        let exact = partner_resultant(phi, h.poly());
        for p in [5u64, 7, 11] {
            let pb = BigInt::from(p);
            let want: Vec<u64> = exact
                .coeffs()
                .iter()
                .map(|c| {
                    let r: BigInt = ((c % &pb) + &pb) % &pb;
                    r.to_u64_digits().1.first().copied().unwrap_or(0)
                })
                .collect();
            let mut got = partner_resultant_mod_p(phi, h.poly(), p);
            got.resize(want.len(), 0);
            assert_eq!(got, want, "p = {p}");
        }
        // Res(X - 2, X^2 + 1) = 5
        let f = ResidueField::get(7, 1);
        let a = vec![f.from_u64(5), f.one()];
        let b = vec![f.one(), f.zero(), f.one()];
        assert_eq!(fq_resultant(&f, &a, &b), f.from_u64(5));
    }

    #[test]
    fn pair_products() {
        let h = |d| {
            hilbert_class_poly(&Discriminant::new(d).unwrap())
                .unwrap()
                .poly()
                .clone()
        };
        // j = 0 and j = 54000 are 2-isogenous
        assert_eq!(pair_product_mod_p(2, &h(-3), &h(-12), 7).unwrap(), 0);
        // distinct ordinary classes at 5 reduce to distinct points
        assert_ne!(pair_product_mod_p(1, &h(-11), &h(-19), 5).unwrap(), 0);
        assert_ne!(pair_product_mod_p(1, &h(-71), &h(-71), 5).unwrap(), 0);
    }

    #[test]
    fn stripped_partner_resultant() {
        let h = |d| {
            hilbert_class_poly(&Discriminant::new(d).unwrap())
                .unwrap()
                .poly()
                .clone()
        };
        let phi2 = modular_poly(2).unwrap();
        // 2 splits in both fields: two 2-isogenous partners per root
        for d in [-15, -71] {
            let (r, m) = partner_resultant_stripped(phi2, &h(d));
            assert_eq!(m, 2, "d = {d}");
            assert!(r.gcd(&h(d)).degree() == Some(0));
        }
        // 2 inert: no exact partners
        assert_eq!(partner_resultant_stripped(phi2, &h(-11)).1, 0);
    }
}
