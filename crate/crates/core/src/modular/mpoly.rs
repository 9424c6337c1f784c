//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::number::rational_ord;
use crate::padic::{PadicNumber, UnramifiedRing, Valuation};

pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> MPoly {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> MPoly {
        MPoly::zero(nvars).with_term(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> MPoly {
        MPoly::constant(nvars, BigRational::one())
    }

    /// The variable `X_{i+1}`.
    pub fn var(nvars: usize, i: usize) -> MPoly {
        let mut m = vec![0; nvars];
        m[i] = 1;
        MPoly::zero(nvars).with_term(m, BigRational::one())
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> MPoly {
        terms
            .into_iter()
            .fold(MPoly::zero(nvars), |acc, (m, c)| acc.with_term(m, c))
    }

    /// Univariate polynomial from integer coefficients, constant first.
    pub fn univariate(coeffs: &[i64]) -> MPoly {
        MPoly::from_terms(
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (vec![i as u32], BigRational::from_integer(c.into()))),
        )
    }

    /// Adds `c * m` to the polynomial.
    pub fn with_term(mut self, m: Monomial, c: BigRational) -> MPoly {
        assert_eq!(m.len(), self.nvars, "monomial arity");
        let e = self.terms.entry(m).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
        self
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn coeff(&self, m: &[u32]) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        o.terms.iter().fold(self.clone(), |acc, (m, c)| {
            acc.with_term(m.clone(), c.clone())
        })
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &BigRational) -> MPoly {
        if k.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        assert_eq!(self.nvars, o.nvars, "variable counts differ");
        let mut out = MPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out = out.with_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &[u32]) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.iter().zip(m).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Re-embeds into `total` variables, shifting variable `i` to `offset + i`.
    pub fn lift(&self, total: usize, offset: usize) -> MPoly {
        assert!(offset + self.nvars <= total);
        MPoly {
            nvars: total,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut k = vec![0; total];
                    k[offset..offset + self.nvars].copy_from_slice(m);
                    (k, c.clone())
                })
                .collect(),
        }
    }

    pub fn eval_rational(&self, x: &[BigRational]) -> BigRational {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter().zip(x).fold(c.clone(), |acc, (&e, xi)| {
                    acc * num_traits::pow(xi.clone(), e as usize)
                })
            })
            .sum()
    }

    /// Evaluates at a point whose coordinates share one unramified ring;
    /// coefficients enter with `prec` significant digits.
    pub fn eval_padic(&self, x: &[PadicNumber], prec: u32) -> Result<PadicNumber> {
        if x.len() != self.nvars {
            return Err(Error::Precondition(format!(
                "point has {} coordinates, polynomial {} variables",
                x.len(),
                self.nvars
            )));
        }
        let ring = common_ring(x)?;
        let mut acc = PadicNumber::zero(&ring);
        for (m, c) in &self.terms {
            let mut t = PadicNumber::from_rational(&ring, c, prec);
            for (xi, &e) in x.iter().zip(m) {
                if e > 0 {
                    t = &t * &xi.pow(e as u64);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Smallest coefficient valuation (`None` for the zero polynomial).
    pub fn gauss_ord(&self, p: u64) -> Option<i64> {
        self.terms
            .values()
            .map(|c| rational_ord(c, p).finite().expect("nonzero coefficient"))
            .min()
    }

    /// `max |c|_p` over coefficients.
    pub fn gauss_norm(&self, p: u64) -> f64 {
        self.gauss_ord(p)
            .map_or(0.0, |v| (p as f64).powi(-v as i32))
    }
}

/// `|f|_p` of a polynomial: the largest `p`-adic size of a coefficient.
pub fn gauss_norm(f: &MPoly, p: u64) -> f64 {
    f.gauss_norm(p)
}

pub(crate) fn common_ring(x: &[PadicNumber]) -> Result<Arc<UnramifiedRing>> {
    let first = x
        .first()
        .ok_or_else(|| Error::Precondition("empty point".into()))?;
    if x.iter().any(|y| y.ring() != first.ring()) {
        return Err(Error::Precondition(
            "coordinates live in different rings; embed them first".into(),
        ));
    }
    Ok(first.ring().clone())
}

/// `|x|_p`; approximate zeros are undecidable.
pub fn padic_abs(x: &PadicNumber) -> Result<f64> {
    match x.ord()? {
        Valuation::Infinite => Ok(0.0),
        Valuation::Finite(v) => Ok((x.p() as f64).powi(-v as i32)),
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let mono: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("X{}", i + 1)
                    } else {
                        format!("X{}^{e}", i + 1)
                    }
                })
                .collect();
            if mono.is_empty() || !a.is_one() {
                write!(f, "{a}")?;
                if !mono.is_empty() {
                    write!(f, "*")?;
                }
            }
            write!(f, "{}", mono.join("*"))?;
        }
        Ok(())
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
