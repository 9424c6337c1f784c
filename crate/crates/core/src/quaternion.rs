//! The definite quaternion algebra `Q = K + K u` over `K = Q(sqrt(-3))`
//! with `u^2 = -7p` and `u alpha = conj(alpha) u`, and its maximal order
//! `O = {[alpha, beta] : alpha in D^{-1}, beta in q^{-1} D^{-1},
//! alpha - 7 beta in O_K}`.
//!
//! Membership conditions: with `theta = (1 + sqrt(-3))/2`,
//! `sqrt(-3) = 2 theta - 1` and `sqrt(-3)(2 + sqrt(-3)) = -5 + 4 theta`, so
//! `alpha in D^{-1}` iff `(2 theta - 1) alpha` is integral and
//! `beta in q^{-1} D^{-1}` iff `(-5 + 4 theta) beta` is integral.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::is_prime;
use crate::error::{Error, Result};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `u + v theta` with rational `u, v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EisensteinNumber {
    pub u: BigRational,
    pub v: BigRational,
}

impl EisensteinNumber {
    pub fn new(u: BigRational, v: BigRational) -> Self {
        EisensteinNumber { u, v }
    }

    pub fn from_ratios(u: (i64, i64), v: (i64, i64)) -> Self {
        EisensteinNumber::new(q(u.0, u.1), q(v.0, v.1))
    }

    pub fn from_int(n: i64) -> Self {
        EisensteinNumber::new(q(n, 1), q(0, 1))
    }

    pub fn zero() -> Self {
        EisensteinNumber::from_int(0)
    }

    pub fn one() -> Self {
        EisensteinNumber::from_int(1)
    }

    pub fn theta() -> Self {
        EisensteinNumber::new(q(0, 1), q(1, 1))
    }

    /// `sqrt(-3) = 2 theta - 1`.
    pub fn sqrt_minus_3() -> Self {
        EisensteinNumber::new(q(-1, 1), q(2, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// `theta -> 1 - theta`.
    pub fn conj(&self) -> Self {
        EisensteinNumber::new(&self.u + &self.v, -&self.v)
    }

    pub fn trace(&self) -> BigRational {
        &self.u * BigRational::from_integer(2.into()) + &self.v
    }

    pub fn norm(&self) -> BigRational {
        &self.u * &self.u + &self.u * &self.v + &self.v * &self.v
    }

    /// In `O_K = Z[theta]`.
    pub fn is_integral(&self) -> bool {
        self.u.is_integer() && self.v.is_integer()
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        EisensteinNumber::new(&self.u * k, &self.v * k)
    }

    pub fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "inverse of zero");
        self.conj().scale(&n.recip())
    }
}

impl<'a> Add<&'a EisensteinNumber> for &'a EisensteinNumber {
    type Output = EisensteinNumber;
    fn add(self, o: &EisensteinNumber) -> EisensteinNumber {
        EisensteinNumber::new(&self.u + &o.u, &self.v + &o.v)
    }
}

impl<'a> Sub<&'a EisensteinNumber> for &'a EisensteinNumber {
    type Output = EisensteinNumber;
    fn sub(self, o: &EisensteinNumber) -> EisensteinNumber {
        EisensteinNumber::new(&self.u - &o.u, &self.v - &o.v)
    }
}

impl Neg for &EisensteinNumber {
    type Output = EisensteinNumber;
    fn neg(self) -> EisensteinNumber {
        EisensteinNumber::new(-&self.u, -&self.v)
    }
}

impl<'a> Mul<&'a EisensteinNumber> for &'a EisensteinNumber {
    type Output = EisensteinNumber;
    fn mul(self, o: &EisensteinNumber) -> EisensteinNumber {
        // theta^2 = theta - 1
        let vv = &self.v * &o.v;
        EisensteinNumber::new(&self.u * &o.u - &vv, &self.u * &o.v + &self.v * &o.u + vv)
    }
}

impl fmt::Display for EisensteinNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return write!(f, "{}", self.u);
        }
        if self.u.is_zero() {
            return write!(f, "{}θ", self.v);
        }
        let sign = if self.v.is_negative() { '-' } else { '+' };
        write!(f, "{} {sign} {}θ", self.u, self.v.abs())
    }
}

/// `[alpha, beta] = alpha + beta u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuaternionElement {
    pub alpha: EisensteinNumber,
    pub beta: EisensteinNumber,
    pub p: u64,
}

impl QuaternionElement {
    pub fn new(alpha: EisensteinNumber, beta: EisensteinNumber, p: u64) -> Self {
        QuaternionElement { alpha, beta, p }
    }

    pub fn scalar(alpha: EisensteinNumber, p: u64) -> Self {
        QuaternionElement::new(alpha, EisensteinNumber::zero(), p)
    }

    pub fn one(p: u64) -> Self {
        QuaternionElement::scalar(EisensteinNumber::one(), p)
    }

    pub fn zero(p: u64) -> Self {
        QuaternionElement::scalar(EisensteinNumber::zero(), p)
    }

    pub fn u(p: u64) -> Self {
        QuaternionElement::new(EisensteinNumber::zero(), EisensteinNumber::one(), p)
    }

    fn seven_p(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(7) * BigInt::from(self.p))
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        QuaternionElement::new(&self.alpha + &o.alpha, &self.beta + &o.beta, self.p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        QuaternionElement::new(&self.alpha - &o.alpha, &self.beta - &o.beta, self.p)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QuaternionElement::new(self.alpha.scale(k), self.beta.scale(k), self.p)
    }

    /// `[alpha, -beta]`.
    pub fn conj(&self) -> Self {
        QuaternionElement::new(self.alpha.conj(), -&self.beta, self.p)
    }

    /// The matrix `[[alpha, beta], [-7p conj(beta), conj(alpha)]]`.
    pub fn to_matrix(&self) -> [[EisensteinNumber; 2]; 2] {
        [
            [self.alpha.clone(), self.beta.clone()],
            [self.beta.conj().scale(&-self.seven_p()), self.alpha.conj()],
        ]
    }
}

pub fn quat_multiply(x: &QuaternionElement, y: &QuaternionElement) -> Result<QuaternionElement> {
    if x.p != y.p {
        return Err(Error::Precondition(format!(
            "primes {} and {} differ",
            x.p, y.p
        )));
    }
    // [a, b][a', b'] = [a a' - 7p b conj(b'), a b' + b conj(a')]
    let alpha = &(&x.alpha * &y.alpha) - &(&x.beta * &y.beta.conj()).scale(&x.seven_p());
    let beta = &(&x.alpha * &y.beta) + &(&x.beta * &y.alpha.conj());
    Ok(QuaternionElement::new(alpha, beta, x.p))
}

impl<'a> Mul<&'a QuaternionElement> for &'a QuaternionElement {
    type Output = QuaternionElement;
    fn mul(self, o: &QuaternionElement) -> QuaternionElement {
        quat_multiply(self, o).expect("same prime")
    }
}

pub fn reduced_trace(x: &QuaternionElement) -> BigRational {
    x.alpha.trace()
}

pub fn reduced_norm(x: &QuaternionElement) -> BigRational {
    x.alpha.norm() + x.seven_p() * x.beta.norm()
}

/// `x^2 - tr(x) x + N(x)`, which vanishes identically.
pub fn characteristic_residual(x: &QuaternionElement) -> QuaternionElement {
    let x2 = x * x;
    x2.sub(&x.scale(&reduced_trace(x)))
        .add(&QuaternionElement::scalar(
            EisensteinNumber::new(reduced_norm(x), q(0, 1)),
            x.p,
        ))
}

/// Membership in the maximal order.
pub fn order_contains(x: &QuaternionElement) -> bool {
    let d_alpha = &EisensteinNumber::sqrt_minus_3() * &x.alpha;
    let qd_beta = &EisensteinNumber::from_ratios((-5, 1), (4, 1)) * &x.beta;
    let diff = &x.alpha - &x.beta.scale(&q(7, 1));
    d_alpha.is_integral() && qd_beta.is_integral() && diff.is_integral()
}

/// The basis `b_1, ..., b_4` of the order.
pub fn order_basis(p: u64) -> [QuaternionElement; 4] {
    let e = EisensteinNumber::from_ratios;
    let z = EisensteinNumber::zero;
    [
        QuaternionElement::new(e((1, 1), (-2, 1)), z(), p),
        QuaternionElement::new(e((1, 1), (-1, 1)), z(), p),
        QuaternionElement::new(e((1, 3), (-2, 3)), e((4, 21), (-5, 21)), p),
        QuaternionElement::new(e((1, 1), (-1, 1)), e((3, 21), (-9, 21)), p),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    pub entries: [[BigRational; 4]; 4],
    pub det: BigRational,
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) || p == 2 || p % 3 != 2 {
        return Err(Error::Precondition(format!(
            "p = {p} must be an odd prime = 2 mod 3"
        )));
    }
    Ok(())
}

/// `tr(b_i b_j)` and its determinant.
pub fn gram_matrix(p: u64) -> Result<GramMatrix> {
    check_prime(p)?;
    let b = order_basis(p);
    let entries: [[BigRational; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| reduced_trace(&(&b[i] * &b[j]))));
    let det = rational_det(entries.iter().map(|r| r.to_vec()).collect());
    Ok(GramMatrix { entries, det })
}

/// Determinant by Gaussian elimination over the rationals.
pub fn rational_det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if r != c {
            m.swap(r, c);
            det = -det;
        }
        det *= &m[c][c];
        let pivot = m[c].clone();
        for row in m.iter_mut().skip(c + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot[c];
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x -= &f * y;
            }
        }
    }
    det
}

/// Coordinates of `x` in the basis `b_1..b_4` (used as an independent
/// membership oracle: `x in O` iff they are integers).
pub fn basis_coordinates(x: &QuaternionElement) -> [BigRational; 4] {
    let b = order_basis(x.p);
    // columns: (alpha.u, alpha.v, beta.u, beta.v) of each basis element
    let col = |y: &QuaternionElement| {
        [
            y.alpha.u.clone(),
            y.alpha.v.clone(),
            y.beta.u.clone(),
            y.beta.v.clone(),
        ]
    };
    let cols: Vec<[BigRational; 4]> = b.iter().map(col).collect();
    let rhs = col(x);
    let mut m: Vec<Vec<BigRational>> = (0..4)
        .map(|r| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    for c in 0..4 {
        let r = (c..4)
            .find(|&r| !m[r][c].is_zero())
            .expect("basis is independent");
        m.swap(r, c);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        let pivot = m[c].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    std::array::from_fn(|i| m[i][4].clone())
}

#[derive(Clone, Debug)]
pub struct PhiCertificate {
    pub phi: QuaternionElement,
    pub d: BigInt,
    /// `phi = [ok_part, 0] + p^n order_part`.
    pub ok_part: EisensteinNumber,
    pub order_part: QuaternionElement,
    pub decomposition_holds: bool,
    /// `phi^2 - phi + (1 + d)/4`, identically zero when the identity holds.
    pub residual: QuaternionElement,
}

impl PhiCertificate {
    pub fn identity_holds(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn valid(&self) -> bool {
        self.decomposition_holds && self.identity_holds()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiSummary {
    pub d: String,
    pub trace: String,
    pub norm: String,
    pub in_ok_plus_pn_order: bool,
    pub identity_holds: bool,
}

impl PhiCertificate {
    pub fn summary(&self) -> PhiSummary {
        PhiSummary {
            d: self.d.to_string(),
            trace: reduced_trace(&self.phi).to_string(),
            norm: reduced_norm(&self.phi).to_string(),
            in_ok_plus_pn_order: self.decomposition_holds,
            identity_holds: self.identity_holds(),
        }
    }
}

/// `phi = [1/2 - (2 theta - 1) x / 2, (3 - 2 theta) p^n / 7]` with
/// `phi^2 - phi + (1 + d)/4 = 0`, `d = 3x^2 + 4p^{2n+1}`.
pub fn construct_phi(n: u32, x: i64, p: u64) -> Result<PhiCertificate> {
    check_prime(p)?;
    if x % 2 == 0 {
        return Err(Error::Precondition(format!("x = {x} must be odd")));
    }
    let pn = BigRational::from_integer(num_traits::pow(BigInt::from(p), n as usize));
    let alpha = &EisensteinNumber::from_ratios((1, 2), (0, 1))
        - &EisensteinNumber::sqrt_minus_3().scale(&q(x, 2));
    let order_part = QuaternionElement::new(
        EisensteinNumber::zero(),
        EisensteinNumber::from_ratios((3, 7), (-2, 7)),
        p,
    );
    let phi = QuaternionElement::new(alpha.clone(), order_part.beta.scale(&pn), p);
    let d = BigInt::from(3) * BigInt::from(x) * BigInt::from(x)
        + BigInt::from(4) * num_traits::pow(BigInt::from(p), 2 * n as usize + 1);
    let recombined = QuaternionElement::scalar(alpha.clone(), p).add(&order_part.scale(&pn));
    let decomposition_holds =
        alpha.is_integral() && order_contains(&order_part) && recombined == phi;
    let c = BigRational::new(BigInt::one() + &d, BigInt::from(4));
    let residual = (&phi * &phi).sub(&phi).add(&QuaternionElement::scalar(
        EisensteinNumber::new(c, q(0, 1)),
        p,
    ));
    Ok(PhiCertificate {
        phi,
        d,
        ok_part: alpha,
        order_part,
        decomposition_holds,
        residual,
    })
}

impl fmt::Display for QuaternionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.alpha, self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: (i64, i64), v: (i64, i64)) -> EisensteinNumber {
        EisensteinNumber::from_ratios(u, v)
    }

    #[test]
    fn multiplication_rules() {
        let p = 5;
        let u = QuaternionElement::u(p);
        assert_eq!(
            &u * &u,
            QuaternionElement::scalar(EisensteinNumber::from_int(-35), p)
        );
        let th = QuaternionElement::scalar(EisensteinNumber::theta(), p);
        assert_eq!(
            &u * &th,
            QuaternionElement::new(
                EisensteinNumber::zero(),
                EisensteinNumber::theta().conj(),
                p
            )
        );
        let x = QuaternionElement::new(e((1, 2), (3, 7)), e((-2, 3), (1, 1)), p);
        assert_eq!(&QuaternionElement::one(p) * &x, x);
        assert!(quat_multiply(&x, &QuaternionElement::one(11)).is_err());
    }

    #[test]
    fn trace_norm() {
        let p = 5;
        assert_eq!(reduced_trace(&QuaternionElement::one(p)), q(2, 1));
        assert_eq!(reduced_norm(&QuaternionElement::one(p)), q(1, 1));
        assert_eq!(reduced_norm(&QuaternionElement::u(p)), q(35, 1));
        let x = QuaternionElement::new(e((1, 2), (3, 7)), e((-2, 3), (1, 1)), p);
        assert!(characteristic_residual(&x).is_zero());
        // matrix trace agrees
        let m = x.to_matrix();
        assert_eq!((&m[0][0] + &m[1][1]).u, reduced_trace(&x));
    }

    #[test]
    fn membership_examples() {
        let p = 5;
        let b = order_basis(p);
        assert!(b.iter().all(order_contains));
        assert!(order_contains(&QuaternionElement::scalar(
            EisensteinNumber::theta(),
            p
        )));
        assert!(!order_contains(&QuaternionElement::scalar(
            e((1, 2), (0, 1)),
            p
        )));
    }

    #[test]
    fn membership_matches_lattice_oracle_on_grid() {
        let p = 11;
        // alpha, beta coordinates in (1/21) Z, a coarse grid
        for au in (-21..=21).step_by(4) {
            for av in (-21..=21).step_by(5) {
                for bu in (-21..=21).step_by(3) {
                    for bv in (-21..=21).step_by(7) {
                        let x =
                            QuaternionElement::new(e((au, 21), (av, 21)), e((bu, 21), (bv, 21)), p);
                        let oracle = basis_coordinates(&x).iter().all(|c| c.is_integer());
                        assert_eq!(order_contains(&x), oracle, "{x}");
                    }
                }
            }
        }
    }

    #[test]
    fn gram_matrices() {
        for p in [5u64, 11, 17, 23] {
            let g = gram_matrix(p).unwrap();
            let pi = p as i64;
            let want = [
                [6, 3, 2, 3],
                [3, 1, 1, 1],
                [2, 1, (2 * pi + 2) / 3, pi + 1],
                [3, 1, pi + 1, 2 * pi + 1],
            ];
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(g.entries[i][j], q(-want[i][j], 1));
                }
            }
            assert_eq!(g.det, q(-(pi * pi), 1));
        }
        assert!(gram_matrix(7).is_err());
        assert!(gram_matrix(2).is_err());
    }

    #[test]
    fn phi_examples() {
        let c = construct_phi(1, 1, 5).unwrap();
        assert_eq!(c.d, BigInt::from(503));
        assert!(c.valid());
        assert_eq!(reduced_trace(&c.phi), q(1, 1));
        assert_eq!(reduced_norm(&c.phi), q(126, 1));
        let c = construct_phi(0, 1, 5).unwrap();
        assert_eq!(c.d, BigInt::from(23));
        assert!(c.valid());
        assert!(construct_phi(1, 2, 5).is_err());
    }
}
