//! Galois action on unramified rings: Frobenius, Teichmüller lifts and the
//! exponent `D` that makes every Galois element trivial modulo `p^n`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::gf::Fq;
use super::number::PadicNumber;
use super::ring::UnramifiedRing;
use crate::arith::{factor, factorial};

pub fn frobenius(x: &PadicNumber) -> PadicNumber {
    x.frobenius()
}

/// `sigma^k(x)`.
pub fn frobenius_pow(x: &PadicNumber, k: usize) -> PadicNumber {
    (0..k).fold(x.clone(), |y, _| y.frobenius())
}

/// Teichmüller representative of a residue element: the unique root of
/// unity (or zero) reducing to it, modulo `p^prec`.
pub fn teichmuller(ring: &Arc<UnramifiedRing>, a: &Fq, prec: u32) -> PadicNumber {
    if ring.residue_field().is_zero(a) {
        return PadicNumber::zero(ring);
    }
    let q = ring.p().pow(ring.degree() as u32);
    let pa = ring.pow_p(prec);
    let mut x = ring.from_residue(a);
    // each q-th power fixes one more digit
    for _ in 0..prec {
        x = ring.pow(&x, q, &pa);
    }
    PadicNumber::from_coords(ring, &x, prec)
}

/// `D = (p^{fn})!`, kept symbolic when `p^{fn} > 20`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApproximationExponent {
    Exact(BigUint),
    /// `base!` with `base = p^{fn}`.
    Factorial {
        base: BigUint,
    },
}

impl ApproximationExponent {
    pub fn base(&self) -> BigUint {
        match self {
            ApproximationExponent::Exact(d) => {
                // recover the base from the factorial value
                let mut n = 1u64;
                let mut acc = BigUint::from(1u32);
                while &acc < d {
                    n += 1;
                    acc *= n;
                }
                BigUint::from(n)
            }
            ApproximationExponent::Factorial { base } => base.clone(),
        }
    }

    /// Exponent of the prime `l` in `D` (Legendre's formula).
    pub fn ord(&self, l: u64) -> BigUint {
        let n = self.base();
        let mut e = BigUint::from(0u32);
        let mut q = n / l;
        while q > BigUint::from(0u32) {
            e += &q;
            q /= l;
        }
        e
    }

    pub fn divisible_by(&self, m: u64) -> bool {
        if m <= 1 {
            return true;
        }
        factor(m)
            .into_iter()
            .all(|(l, k)| self.ord(l) >= BigUint::from(k))
    }

    /// `sigma^D = id` on `W_f`: the order `f` of Frobenius divides `D`.
    pub fn trivializes_degree(&self, f: usize) -> bool {
        self.divisible_by(f as u64)
    }

    pub fn value(&self) -> Option<&BigUint> {
        match self {
            ApproximationExponent::Exact(d) => Some(d),
            ApproximationExponent::Factorial { .. } => None,
        }
    }
}

impl fmt::Display for ApproximationExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproximationExponent::Exact(d) => write!(f, "{d}"),
            ApproximationExponent::Factorial { base } => write!(f, "{base}!"),
        }
    }
}

pub fn approximation_exponent(p: u64, f: usize, n: u32) -> ApproximationExponent {
    assert!(n >= 1, "n must be positive");
    let base = BigUint::from(p).pow(f as u32 * n);
    match base.to_u64() {
        Some(b) if b <= 20 => ApproximationExponent::Exact(factorial(b)),
        _ => ApproximationExponent::Factorial { base },
    }
}

/// Applies `sigma^e` for a Galois power given modulo the residue degree.
pub fn apply_galois_power(x: &PadicNumber, e: &BigUint) -> PadicNumber {
    let f = x.residue_degree() as u64;
    let k = (e % f).to_usize().unwrap();
    frobenius_pow(x, k)
}

/// `sigma^D(x) - x` for the exponent above and `sigma = frobenius^k`.
pub fn galois_defect(x: &PadicNumber, d: &ApproximationExponent, k: u64) -> PadicNumber {
    let f = x.residue_degree() as u64;
    let steps = if d.trivializes_degree(f as usize) {
        0
    } else {
        // only reached for inputs outside the lemma's hypotheses
        let dv = d.value().map(|v| v % f).map_or(0, |v| v.to_u64().unwrap());
        (dv * k) % f
    };
    let y = apply_galois_power(x, &BigUint::from(steps));
    &y - x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::gf::ResidueField;
    use crate::padic::number::Valuation;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frobenius_order() {
        let w = UnramifiedRing::get(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let c: Vec<BigInt> = (0..3)
                .map(|_| BigInt::from(rng.gen_range(0..256)))
                .collect();
            let x = PadicNumber::from_coords(&w, &c, 8);
            assert_eq!(frobenius_pow(&x, 3), x);
        }
        let z5 = UnramifiedRing::get(5, 1);
        let x = PadicNumber::from_i64(&z5, 17, 8);
        assert_eq!(frobenius(&x), x);
    }

    #[test]
    fn teichmuller_generator() {
        let w = UnramifiedRing::get(5, 2);
        let field = ResidueField::get(5, 2);
        let g = field.generator();
        let t = teichmuller(&w, &g, 10);
        assert_eq!(frobenius(&t), t.pow(5));
        assert_eq!(t.residue().unwrap(), g);
    }

    #[test]
    fn exponents() {
        let d = approximation_exponent(3, 2, 1);
        assert_eq!(d, ApproximationExponent::Exact(BigUint::from(362880u32)));
        assert!(d.trivializes_degree(2));
        assert_eq!(
            approximation_exponent(2, 1, 1),
            ApproximationExponent::Exact(BigUint::from(2u32))
        );
        let big = approximation_exponent(5, 3, 2);
        assert!(big.value().is_none());
        assert!(big.trivializes_degree(3));
        let w = UnramifiedRing::get(5, 3);
        let x =
            PadicNumber::from_coords(&w, &[BigInt::from(3), BigInt::from(1), BigInt::from(4)], 6);
        assert!(galois_defect(&x, &big, 1).ord_lower_bound() >= Valuation::Finite(6));
    }
}
