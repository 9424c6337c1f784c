use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ring::{Coords, UnramifiedRing};
use crate::arith::ord_p_big;
use crate::error::{Error, Result};

/// A valuation: an integer or `+infinity` (only for exact zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    /// Exact zero.
    Zero,
    /// Zero to the working precision: known only to be divisible by `p^at_least`.
    Approx { at_least: i64 },
    /// `p^val * unit`, unit known modulo `p^prec` (`prec >= 1`).
    Value { val: i64, unit: Coords, prec: u32 },
}

/// Truncated element of the fraction field of an unramified ring `W_f`.
///
/// Precision is relative: `prec` significant digits of the unit part.
/// Arithmetic never reports more precision than its inputs justify, and a
/// subtraction that cancels every known digit yields an approximate zero
/// that stays distinguishable from [`PadicNumber::zero`].
#[derive(Clone)]
pub struct PadicNumber {
    ring: Arc<UnramifiedRing>,
    repr: Repr,
}

impl PartialEq for PadicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.repr == other.repr
    }
}

impl Eq for PadicNumber {}

impl PadicNumber {
    pub fn zero(ring: &Arc<UnramifiedRing>) -> Self {
        PadicNumber {
            ring: ring.clone(),
            repr: Repr::Zero,
        }
    }

    /// Zero known only modulo `p^at_least`.
    pub fn approx_zero(ring: &Arc<UnramifiedRing>, at_least: i64) -> Self {
        PadicNumber {
            ring: ring.clone(),
            repr: Repr::Approx { at_least },
        }
    }

    pub fn one(ring: &Arc<UnramifiedRing>, prec: u32) -> Self {
        Self::from_integer(ring, &BigInt::one(), prec)
    }

    /// An integer with `prec` significant digits; `0` is the exact zero.
    pub fn from_integer(ring: &Arc<UnramifiedRing>, n: &BigInt, prec: u32) -> Self {
        assert!(prec >= 1, "precision must be positive");
        match ord_p_big(n, ring.p()) {
            None => Self::zero(ring),
            Some(v) => {
                let pv = ring.pow_p(v as u32);
                let pa = ring.pow_p(prec);
                let u = (n / pv).mod_floor(&pa);
                PadicNumber {
                    ring: ring.clone(),
                    repr: Repr::Value {
                        val: v as i64,
                        unit: ring.scalar_coords(&u, &pa),
                        prec,
                    },
                }
            }
        }
    }

    pub fn from_i64(ring: &Arc<UnramifiedRing>, n: i64, prec: u32) -> Self {
        Self::from_integer(ring, &BigInt::from(n), prec)
    }

    pub fn from_rational(ring: &Arc<UnramifiedRing>, q: &BigRational, prec: u32) -> Self {
        let num = Self::from_integer(ring, q.numer(), prec);
        let den = Self::from_integer(ring, q.denom(), prec);
        num.div(&den).expect("nonzero denominator")
    }

    /// Integral element from coordinates known modulo `p^abs_prec`.
    pub fn from_coords(ring: &Arc<UnramifiedRing>, coords: &[BigInt], abs_prec: u32) -> Self {
        assert_eq!(coords.len(), ring.degree());
        let pa = ring.pow_p(abs_prec);
        let c = ring.reduce(coords, &pa);
        match ring.coords_valuation(&c) {
            None => Self::approx_zero(ring, abs_prec as i64),
            Some(w) => {
                let unit = ring.div_exact_p_power(&c, w as u32);
                PadicNumber {
                    ring: ring.clone(),
                    repr: Repr::Value {
                        val: w as i64,
                        unit,
                        prec: abs_prec - w as u32,
                    },
                }
            }
        }
    }

    pub fn ring(&self) -> &Arc<UnramifiedRing> {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    pub fn residue_degree(&self) -> usize {
        self.ring.degree()
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// True for both the exact zero and an approximate zero.
    pub fn is_zero_at_precision(&self) -> bool {
        !matches!(self.repr, Repr::Value { .. })
    }

    /// The valuation; an approximate zero has none to report.
    pub fn ord(&self) -> Result<Valuation> {
        match &self.repr {
            Repr::Zero => Ok(Valuation::Infinite),
            Repr::Value { val, .. } => Ok(Valuation::Finite(*val)),
            Repr::Approx { at_least } => Err(Error::PrecisionExhausted(format!(
                "value is zero modulo p^{at_least}"
            ))),
        }
    }

    /// Valuation, or the known lower bound for an approximate zero.
    pub fn ord_lower_bound(&self) -> Valuation {
        match &self.repr {
            Repr::Zero => Valuation::Infinite,
            Repr::Value { val, .. } => Valuation::Finite(*val),
            Repr::Approx { at_least } => Valuation::Finite(*at_least),
        }
    }

    /// Relative precision (digits of the unit part); `None` for the exact zero.
    pub fn precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Approx { .. } => Some(0),
            Repr::Value { prec, .. } => Some(*prec),
        }
    }

    /// Absolute precision: the element is known modulo `p^abs`.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Approx { at_least } => Some(*at_least),
            Repr::Value { val, prec, .. } => Some(val + *prec as i64),
        }
    }

    pub fn unit_coords(&self) -> Option<&[BigInt]> {
        match &self.repr {
            Repr::Value { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Coordinates of an integral element modulo `p^a` (`a` must not
    /// exceed the absolute precision).
    pub fn integral_coords(&self, a: u32) -> Result<Coords> {
        let pa = self.ring.pow_p(a);
        match &self.repr {
            Repr::Zero => Ok(self.ring.zero_coords()),
            Repr::Approx { at_least } => {
                if *at_least >= a as i64 {
                    Ok(self.ring.zero_coords())
                } else {
                    Err(Error::PrecisionExhausted(format!(
                        "known modulo p^{at_least}, requested p^{a}"
                    )))
                }
            }
            Repr::Value { val, unit, prec } => {
                if *val < 0 {
                    return Err(Error::Domain("element is not integral".into()));
                }
                if val + (*prec as i64) < (a as i64) {
                    return Err(Error::PrecisionExhausted(format!(
                        "known modulo p^{}, requested p^{a}",
                        val + *prec as i64
                    )));
                }
                let pv = self.ring.pow_p(*val as u32);
                Ok(self.ring.scale(unit, &pv, &pa))
            }
        }
    }

    /// Residue class modulo `p` of an integral element.
    pub fn residue(&self) -> Result<super::gf::Fq> {
        Ok(self.ring.to_residue(&self.integral_coords(1)?))
    }

    /// Truncate to at most `prec` significant digits.
    pub fn with_precision(&self, prec: u32) -> Self {
        match &self.repr {
            Repr::Value {
                val,
                unit,
                prec: old,
            } if prec < *old => {
                let p = prec.max(1);
                PadicNumber {
                    ring: self.ring.clone(),
                    repr: Repr::Value {
                        val: *val,
                        unit: self.ring.reduce(unit, &self.ring.pow_p(p)),
                        prec: p,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    fn same_ring(&self, other: &Self) {
        assert!(
            self.ring == other.ring,
            "operands live in different unramified rings"
        );
    }

    pub fn try_inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Value { val, unit, prec } => Ok(PadicNumber {
                ring: self.ring.clone(),
                repr: Repr::Value {
                    val: -val,
                    unit: self.ring.inv_unit(unit, *prec).expect("unit"),
                    prec: *prec,
                },
            }),
            Repr::Zero => Err(Error::Domain("division by exact zero".into())),
            Repr::Approx { .. } => Err(Error::PrecisionExhausted(
                "division by a value indistinguishable from zero".into(),
            )),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.try_inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut r = PadicNumber::one(&self.ring, self.precision().unwrap_or(1).max(1));
        if e == 0 {
            return r;
        }
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        r
    }

    /// `p^k` times self (exact shift of the valuation).
    pub fn shift(&self, k: i64) -> Self {
        let repr = match &self.repr {
            Repr::Zero => Repr::Zero,
            Repr::Approx { at_least } => Repr::Approx {
                at_least: at_least + k,
            },
            Repr::Value { val, unit, prec } => Repr::Value {
                val: val + k,
                unit: unit.clone(),
                prec: *prec,
            },
        };
        PadicNumber {
            ring: self.ring.clone(),
            repr,
        }
    }

    /// `|x|_p = p^{-ord}` as a float (0 for zero of either kind).
    pub fn abs_f64(&self) -> f64 {
        match &self.repr {
            Repr::Value { val, .. } => (self.p() as f64).powi(-(*val as i32)),
            _ => 0.0,
        }
    }

    /// The same value inside a ring whose residue degree is a multiple,
    /// using the supplied images of the basis `1, t, ..., t^{f-1}`.
    pub fn embed_with(
        &self,
        target: &Arc<UnramifiedRing>,
        basis: &[Coords],
        basis_prec: u32,
    ) -> Self {
        match &self.repr {
            Repr::Zero => PadicNumber::zero(target),
            Repr::Approx { at_least } => PadicNumber::approx_zero(target, *at_least),
            Repr::Value { val, unit, prec } => {
                let a = (*prec).min(basis_prec);
                let pa = target.pow_p(a);
                let mut acc = target.zero_coords();
                for (c, b) in unit.iter().zip(basis) {
                    acc = target.add(&acc, &target.scale(b, c, &pa), &pa);
                }
                PadicNumber::from_coords(target, &acc, a).shift(*val)
            }
        }
    }

    /// Embedding of a `Q_p` element into any unramified ring.
    pub fn embed_scalar(&self, target: &Arc<UnramifiedRing>) -> Self {
        assert_eq!(
            self.residue_degree(),
            1,
            "only residue degree one embeds canonically"
        );
        match &self.repr {
            Repr::Zero => PadicNumber::zero(target),
            Repr::Approx { at_least } => PadicNumber::approx_zero(target, *at_least),
            Repr::Value { val, unit, prec } => {
                let pa = target.pow_p(*prec);
                PadicNumber {
                    ring: target.clone(),
                    repr: Repr::Value {
                        val: *val,
                        unit: target.scalar_coords(&unit[0], &pa),
                        prec: *prec,
                    },
                }
            }
        }
    }

    /// Lift of the absolute Frobenius, acting on the coordinates.
    pub fn frobenius(&self) -> Self {
        match &self.repr {
            Repr::Value { val, unit, prec } => PadicNumber {
                ring: self.ring.clone(),
                repr: Repr::Value {
                    val: *val,
                    unit: self.ring.frobenius(unit, *prec),
                    prec: *prec,
                },
            },
            _ => self.clone(),
        }
    }

    /// Exact rational value of an element of `Q_p` (`f = 1`) truncated to
    /// its precision, with the unit digit representative in `0..p^prec`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.residue_degree() != 1 {
            return None;
        }
        match &self.repr {
            Repr::Zero | Repr::Approx { .. } => Some(BigRational::zero()),
            Repr::Value { val, unit, .. } => {
                let u = BigRational::from_integer(unit[0].clone());
                let pv = BigRational::from_integer(self.ring.pow_p(val.unsigned_abs() as u32));
                Some(if *val >= 0 { u * pv } else { u / pv })
            }
        }
    }

    /// Digits of the unit part in base `p`, per basis coordinate.
    pub fn unit_digits(&self) -> Vec<Vec<u64>> {
        let Repr::Value { unit, prec, .. } = &self.repr else {
            return Vec::new();
        };
        let p = BigInt::from(self.p());
        let mut coords = unit.clone();
        (0..*prec)
            .map(|_| {
                coords
                    .iter_mut()
                    .map(|c| {
                        let (q, r) = c.div_mod_floor(&p);
                        *c = q;
                        u64::try_from(&r).unwrap()
                    })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p();
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Approx { at_least } => write!(f, "O({p}^{at_least})"),
            Repr::Value { val, prec, .. } => {
                write!(f, "{p}^{val} * (")?;
                let digits = self.unit_digits();
                let render = |d: &Vec<u64>| {
                    if d.len() == 1 {
                        d[0].to_string()
                    } else {
                        format!(
                            "[{}]",
                            d.iter()
                                .map(|x| x.to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        )
                    }
                };
                for (i, d) in digits.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    match i {
                        0 => write!(f, "{}", render(d))?,
                        1 => write!(f, "{}*{p}", render(d))?,
                        _ => write!(f, "{}*{p}^{i}", render(d))?,
                    }
                }
                write!(f, " + O({p}^{prec}))")
            }
        }
    }
}

impl<'a> Add<&'a PadicNumber> for &'a PadicNumber {
    type Output = PadicNumber;

    fn add(self, other: &PadicNumber) -> PadicNumber {
        self.same_ring(other);
        let ring = &self.ring;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) => other.clone(),
            (_, Repr::Zero) => self.clone(),
            (Repr::Approx { at_least: a }, Repr::Approx { at_least: b }) => {
                PadicNumber::approx_zero(ring, *a.min(b))
            }
            (Repr::Approx { at_least: a }, Repr::Value { val, unit, prec })
            | (Repr::Value { val, unit, prec }, Repr::Approx { at_least: a }) => {
                if *val >= *a {
                    PadicNumber::approx_zero(ring, *a)
                } else {
                    let keep = (*prec as i64).min(a - val) as u32;
                    PadicNumber {
                        ring: ring.clone(),
                        repr: Repr::Value {
                            val: *val,
                            unit: ring.reduce(unit, &ring.pow_p(keep)),
                            prec: keep,
                        },
                    }
                }
            }
            (
                Repr::Value {
                    val: v1,
                    unit: u1,
                    prec: p1,
                },
                Repr::Value {
                    val: v2,
                    unit: u2,
                    prec: p2,
                },
            ) => {
                let abs = (v1 + *p1 as i64).min(v2 + *p2 as i64);
                let m = *v1.min(v2);
                let width = (abs - m) as u32;
                let pa = ring.pow_p(width);
                let a = ring.scale(u1, &ring.pow_p((v1 - m) as u32), &pa);
                let b = ring.scale(u2, &ring.pow_p((v2 - m) as u32), &pa);
                let s = ring.add(&a, &b, &pa);
                PadicNumber::from_coords(ring, &s, width).shift(m)
            }
        }
    }
}

impl Neg for &PadicNumber {
    type Output = PadicNumber;

    fn neg(self) -> PadicNumber {
        let repr = match &self.repr {
            Repr::Value { val, unit, prec } => Repr::Value {
                val: *val,
                unit: self.ring.neg(unit, &self.ring.pow_p(*prec)),
                prec: *prec,
            },
            r => r.clone(),
        };
        PadicNumber {
            ring: self.ring.clone(),
            repr,
        }
    }
}

impl<'a> Sub<&'a PadicNumber> for &'a PadicNumber {
    type Output = PadicNumber;

    fn sub(self, other: &PadicNumber) -> PadicNumber {
        self + &(-other)
    }
}

impl<'a> Mul<&'a PadicNumber> for &'a PadicNumber {
    type Output = PadicNumber;

    fn mul(self, other: &PadicNumber) -> PadicNumber {
        self.same_ring(other);
        let ring = &self.ring;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => PadicNumber::zero(ring),
            (Repr::Approx { at_least: a }, Repr::Approx { at_least: b }) => {
                PadicNumber::approx_zero(ring, a + b)
            }
            (Repr::Approx { at_least: a }, Repr::Value { val, .. })
            | (Repr::Value { val, .. }, Repr::Approx { at_least: a }) => {
                PadicNumber::approx_zero(ring, a + val)
            }
            (
                Repr::Value {
                    val: v1,
                    unit: u1,
                    prec: p1,
                },
                Repr::Value {
                    val: v2,
                    unit: u2,
                    prec: p2,
                },
            ) => {
                let prec = (*p1).min(*p2);
                PadicNumber {
                    ring: ring.clone(),
                    repr: Repr::Value {
                        val: v1 + v2,
                        unit: ring.mul(u1, u2, &ring.pow_p(prec)),
                        prec,
                    },
                }
            }
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<PadicNumber> for PadicNumber {
            type Output = PadicNumber;
            fn $m(self, other: PadicNumber) -> PadicNumber {
                (&self).$m(&other)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Integer `n` as a rational with sign-aware `p`-adic valuation helper.
pub fn rational_ord(q: &BigRational, p: u64) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinite;
    }
    let num = ord_p_big(q.numer(), p).unwrap() as i64;
    let den = ord_p_big(&q.denom().abs(), p).unwrap() as i64;
    Valuation::Finite(num - den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(p: u64) -> Arc<UnramifiedRing> {
        UnramifiedRing::get(p, 1)
    }

    #[test]
    fn ord_examples() {
        let r = zp(5);
        assert_eq!(
            PadicNumber::from_i64(&r, 5, 10).ord(),
            Ok(Valuation::Finite(1))
        );
        assert_eq!(
            PadicNumber::from_i64(&r, 1, 10).ord(),
            Ok(Valuation::Finite(0))
        );
        let x = PadicNumber::from_i64(&r, 25 * 6, 10);
        assert_eq!(x.ord(), Ok(Valuation::Finite(2)));
        assert_eq!(PadicNumber::zero(&r).ord(), Ok(Valuation::Infinite));
    }

    #[test]
    fn cancellation_gives_approximate_zero() {
        let r = zp(7);
        let a = PadicNumber::from_i64(&r, 1 + 49, 4);
        let b = PadicNumber::from_i64(&r, 1 + 49, 6);
        let d = &a - &b;
        assert!(!d.is_exact_zero());
        assert!(d.is_zero_at_precision());
        assert!(d.ord().is_err());
        assert_eq!(d.ord_lower_bound(), Valuation::Finite(4));
    }

    #[test]
    fn subtraction_tracks_absolute_precision() {
        let r = zp(3);
        let a = PadicNumber::from_i64(&r, 1 + 27, 10);
        let b = PadicNumber::from_i64(&r, 1, 10);
        let d = &a - &b;
        assert_eq!(d.ord(), Ok(Valuation::Finite(3)));
        assert_eq!(d.absolute_precision(), Some(10));
        assert_eq!(d.precision(), Some(7));
    }

    #[test]
    fn rational_round_trip() {
        let r = zp(5);
        let q = BigRational::new(BigInt::from(7), BigInt::from(50));
        let x = PadicNumber::from_rational(&r, &q, 12);
        assert_eq!(x.ord(), Ok(Valuation::Finite(-2)));
        let back = &x * &PadicNumber::from_i64(&r, 50, 12);
        assert_eq!(back, PadicNumber::from_i64(&r, 7, 12));
    }

    #[test]
    fn display_digits() {
        let r = zp(5);
        let x = PadicNumber::from_i64(&r, 25 * (1 + 3 * 5), 3);
        assert_eq!(x.to_string(), "5^2 * (1 + 3*5 + 0*5^2 + O(5^3))");
    }
}
