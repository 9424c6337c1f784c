//! Dense univariate polynomials: exact integer ones and truncated `p`-adic ones.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::number::PadicNumber;
use super::ring::UnramifiedRing;

/// Polynomial with exact integer coefficients, constant term first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntegerPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntegerPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntegerPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `X - r`.
    pub fn linear_root(r: BigInt) -> Self {
        Self::new(vec![-r, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|l| l.is_one())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b`.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        let db = b.degree().expect("pseudo-division by zero");
        let lb = b.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading().unwrap().clone();
            let shift = dr - db;
            let mut next: Vec<BigInt> = r.coeffs.iter().map(|c| c * &lb).collect();
            for (j, bj) in b.coeffs.iter().enumerate() {
                next[j + shift] -= &lr * bj;
            }
            r = Self::new(next);
        }
        r
    }

    /// Exact division by a polynomial dividing `self` over the integers.
    pub fn div_exact(&self, b: &Self) -> Option<Self> {
        let db = b.degree()?;
        let lb = b.leading().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() < b.coeffs.len() {
            return if self.is_zero() {
                Some(Self::zero())
            } else {
                None
            };
        }
        let mut q = vec![BigInt::zero(); r.len() - db];
        for i in (db..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let (c, rem) = r[i].div_rem(lb);
            if !rem.is_zero() {
                return None;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                r[i - db + j] -= &c * bj;
            }
            q[i - db] = c;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(q))
    }

    /// Gcd over `Q`, normalized to a primitive integer polynomial with
    /// positive leading coefficient (primitive remainder sequence).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Product of the distinct irreducible factors over `Q` (primitive).
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.primitive_part();
        }
        let g = self.gcd(&self.derivative());
        self.primitive_part()
            .div_exact(&g)
            .expect("gcd divides")
            .primitive_part()
    }

    pub fn from_roots(roots: &[BigInt]) -> Self {
        roots
            .iter()
            .fold(Self::one(), |acc, r| acc.mul(&Self::linear_root(r.clone())))
    }

    /// Coefficients of a `p`-adic image with the given relative precision.
    pub fn to_padic(&self, ring: &Arc<UnramifiedRing>, prec: u32) -> PadicPolynomial {
        PadicPolynomial::new(
            self.coeffs
                .iter()
                .map(|c| PadicNumber::from_integer(ring, c, prec))
                .collect(),
        )
    }

    /// Evaluate at a `p`-adic point.
    pub fn eval_padic(&self, x: &PadicNumber, prec: u32) -> PadicNumber {
        let ring = x.ring().clone();
        let mut acc = PadicNumber::zero(&ring);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &PadicNumber::from_integer(&ring, c, prec);
        }
        acc
    }
}

impl fmt::Debug for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let a = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "X")?,
                (1, false) => write!(f, "{a}*X")?,
                (_, true) => write!(f, "X^{i}")?,
                (_, false) => write!(f, "{a}*X^{i}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial with truncated `p`-adic coefficients from one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicPolynomial {
    coeffs: Vec<PadicNumber>,
}

impl PadicPolynomial {
    /// Drops trailing coefficients that are exact zeros. Approximate zeros
    /// in the leading position are kept; callers check
    /// [`PadicPolynomial::has_certified_degree`] where it matters.
    pub fn new(mut coeffs: Vec<PadicNumber>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        PadicPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn ring(&self) -> Option<&Arc<UnramifiedRing>> {
        self.coeffs.first().map(|c| c.ring())
    }

    /// Leading coefficient is nonzero at its stored precision.
    pub fn has_certified_degree(&self) -> bool {
        self.coeffs
            .last()
            .is_some_and(|c| !c.is_zero_at_precision())
    }

    pub fn eval(&self, x: &PadicNumber) -> PadicNumber {
        let mut acc = PadicNumber::zero(x.ring());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| {
                    let k = PadicNumber::from_i64(
                        c.ring(),
                        i as i64,
                        c.precision().unwrap_or(1).max(1) + 8,
                    );
                    c * &k
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_and_squarefree() {
        let a = IntegerPolynomial::from_i64(&[-1, 0, 1]); // X^2 - 1
        let b = IntegerPolynomial::from_i64(&[1, 2, 1]); // (X+1)^2
        assert_eq!(a.gcd(&b), IntegerPolynomial::from_i64(&[1, 1]));
        let cube = IntegerPolynomial::from_roots(&vec![BigInt::from(54000); 3]);
        assert_eq!(
            cube.squarefree_part(),
            IntegerPolynomial::from_i64(&[-54000, 1])
        );
    }

    #[test]
    fn exact_division() {
        let a = IntegerPolynomial::from_i64(&[-6, 11, -6, 1]);
        let b = IntegerPolynomial::from_i64(&[-1, 1]);
        assert_eq!(
            a.div_exact(&b),
            Some(IntegerPolynomial::from_i64(&[6, -5, 1]))
        );
        assert_eq!(a.div_exact(&IntegerPolynomial::from_i64(&[5, 1])), None);
    }

    #[test]
    fn display() {
        let a = IntegerPolynomial::from_i64(&[32768, 1]);
        assert_eq!(a.to_string(), "X + 32768");
        assert_eq!(
            IntegerPolynomial::from_i64(&[0, -2, 0, 1]).to_string(),
            "X^3 - 2*X"
        );
    }
}
