//! The unramified ring `W_f = Z_p[t]/(M_f)` of residue degree `f`.
//!
//! `M_f` is the registry modulus of [`ResidueField`] lifted with
//! coefficients in `0..p`, so reduction modulo `p` lands in the registry
//! residue field. Elements are handled here as coordinate vectors truncated
//! modulo `p^a`; [`super::PadicNumber`] wraps them with valuation and
//! relative precision.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::gf::{Fq, ResidueField};
use crate::arith::big_pow;

pub type Coords = Vec<BigInt>;

pub struct UnramifiedRing {
    p: u64,
    degree: usize,
    residue: Arc<ResidueField>,
    modulus: Vec<BigInt>,
    frobenius_cache: Mutex<HashMap<u32, Coords>>,
}

impl fmt::Debug for UnramifiedRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "W(p={}, f={}, M={:?})",
            self.p,
            self.degree,
            self.residue.modulus()
        )
    }
}

impl PartialEq for UnramifiedRing {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree
    }
}

impl Eq for UnramifiedRing {}

impl UnramifiedRing {
    pub fn get(p: u64, degree: usize) -> Arc<UnramifiedRing> {
        static REGISTRY: OnceLock<Mutex<HashMap<(u64, usize), Arc<UnramifiedRing>>>> =
            OnceLock::new();
        let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(r) = reg.lock().unwrap().get(&(p, degree)) {
            return r.clone();
        }
        let residue = ResidueField::get(p, degree);
        let modulus = residue.modulus().iter().map(|&c| BigInt::from(c)).collect();
        let ring = Arc::new(UnramifiedRing {
            p,
            degree,
            residue,
            modulus,
            frobenius_cache: Mutex::new(HashMap::new()),
        });
        reg.lock()
            .unwrap()
            .entry((p, degree))
            .or_insert(ring)
            .clone()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn residue_field(&self) -> &Arc<ResidueField> {
        &self.residue
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    pub fn pow_p(&self, a: u32) -> BigInt {
        big_pow(self.p, a)
    }

    pub fn zero_coords(&self) -> Coords {
        vec![BigInt::zero(); self.degree]
    }

    pub fn one_coords(&self) -> Coords {
        let mut v = self.zero_coords();
        v[0] = BigInt::one();
        v
    }

    pub fn scalar_coords(&self, c: &BigInt, pa: &BigInt) -> Coords {
        let mut v = self.zero_coords();
        v[0] = c.mod_floor(pa);
        v
    }

    pub fn reduce(&self, x: &[BigInt], pa: &BigInt) -> Coords {
        x.iter().map(|c| c.mod_floor(pa)).collect()
    }

    pub fn add(&self, x: &[BigInt], y: &[BigInt], pa: &BigInt) -> Coords {
        x.iter()
            .zip(y)
            .map(|(a, b)| (a + b).mod_floor(pa))
            .collect()
    }

    pub fn sub(&self, x: &[BigInt], y: &[BigInt], pa: &BigInt) -> Coords {
        x.iter()
            .zip(y)
            .map(|(a, b)| (a - b).mod_floor(pa))
            .collect()
    }

    pub fn neg(&self, x: &[BigInt], pa: &BigInt) -> Coords {
        x.iter().map(|a| (-a).mod_floor(pa)).collect()
    }

    pub fn scale(&self, x: &[BigInt], c: &BigInt, pa: &BigInt) -> Coords {
        x.iter().map(|a| (a * c).mod_floor(pa)).collect()
    }

    pub fn mul(&self, x: &[BigInt], y: &[BigInt], pa: &BigInt) -> Coords {
        let k = self.degree;
        if k == 1 {
            return vec![(&x[0] * &y[0]).mod_floor(pa)];
        }
        let mut prod = vec![BigInt::zero(); 2 * k - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        for i in (k..prod.len()).rev() {
            let c = std::mem::take(&mut prod[i]);
            if c.is_zero() {
                continue;
            }
            for j in 0..k {
                if !self.modulus[j].is_zero() {
                    prod[i - k + j] -= &c * &self.modulus[j];
                }
            }
        }
        prod.truncate(k);
        prod.iter().map(|c| c.mod_floor(pa)).collect()
    }

    pub fn pow(&self, x: &[BigInt], mut e: u64, pa: &BigInt) -> Coords {
        let mut r = self.one_coords();
        let mut b = self.reduce(x, pa);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b, pa);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b, pa);
            }
        }
        self.reduce(&r, pa)
    }

    pub fn is_zero_mod(&self, x: &[BigInt], pa: &BigInt) -> bool {
        x.iter().all(|c| c.mod_floor(pa).is_zero())
    }

    /// Minimum `p`-adic valuation of the coordinates, `None` if all vanish.
    pub fn coords_valuation(&self, x: &[BigInt]) -> Option<u64> {
        x.iter()
            .filter_map(|c| crate::arith::ord_p_big(c, self.p))
            .min()
    }

    pub fn div_exact_p_power(&self, x: &[BigInt], w: u32) -> Coords {
        let pw = self.pow_p(w);
        x.iter()
            .map(|c| {
                let (q, r) = c.div_rem(&pw);
                debug_assert!(r.is_zero());
                q
            })
            .collect()
    }

    pub fn to_residue(&self, x: &[BigInt]) -> Fq {
        let p = BigInt::from(self.p);
        x.iter()
            .map(|c| {
                let r = c.mod_floor(&p);
                u64::try_from(&r).unwrap()
            })
            .collect()
    }

    pub fn from_residue(&self, x: &Fq) -> Coords {
        x.iter().map(|&c| BigInt::from(c)).collect()
    }

    /// Inverse of a unit modulo `p^a` (residue inverse, then Newton).
    pub fn inv_unit(&self, x: &[BigInt], a: u32) -> Option<Coords> {
        let r = self.residue.inv(&self.to_residue(x))?;
        let mut y = self.from_residue(&r);
        let mut prec = 1u32;
        let two = self.scalar_coords(&BigInt::from(2), &self.pow_p(a));
        while prec < a {
            prec = (2 * prec).min(a);
            let pa = self.pow_p(prec);
            let xy = self.mul(x, &y, &pa);
            y = self.mul(&y, &self.sub(&two, &xy, &pa), &pa);
        }
        Some(self.reduce(&y, &self.pow_p(a)))
    }

    /// The lift of Frobenius evaluated at `t`, i.e. the root of `M_f`
    /// congruent to `t^p`, modulo `p^a`.
    pub fn frobenius_of_generator(&self, a: u32) -> Coords {
        if let Some(c) = self.frobenius_cache.lock().unwrap().get(&a) {
            return c.clone();
        }
        let t = if self.degree == 1 {
            self.zero_coords()
        } else {
            let mut t = self.zero_coords();
            t[1] = BigInt::one();
            t
        };
        let p1 = self.pow_p(1);
        let mut r = self.pow(&t, self.p, &p1);
        // Newton iteration on M_f; M_f is separable mod p.
        let mut prec = 1u32;
        while prec < a {
            prec = (2 * prec).min(a);
            let pa = self.pow_p(prec);
            let (val, der) = self.eval_modulus(&r, &pa);
            let inv = self.inv_unit(&der, prec).expect("modulus separable mod p");
            r = self.sub(&r, &self.mul(&val, &inv, &pa), &pa);
        }
        let r = self.reduce(&r, &self.pow_p(a));
        self.frobenius_cache.lock().unwrap().insert(a, r.clone());
        r
    }

    /// `M_f(x)` and `M_f'(x)` modulo `pa`.
    fn eval_modulus(&self, x: &[BigInt], pa: &BigInt) -> (Coords, Coords) {
        let mut val = self.zero_coords();
        let mut der = self.zero_coords();
        for (i, c) in self.modulus.iter().enumerate().rev() {
            der = self.add(&self.mul(&der, x, pa), &val, pa);
            val = self.add(&self.mul(&val, x, pa), &self.scalar_coords(c, pa), pa);
            let _ = i;
        }
        (val, der)
    }

    /// Frobenius on coordinates modulo `p^a`.
    pub fn frobenius(&self, x: &[BigInt], a: u32) -> Coords {
        if self.degree == 1 {
            return self.reduce(x, &self.pow_p(a));
        }
        let pa = self.pow_p(a);
        let s = self.frobenius_of_generator(a);
        let mut acc = self.zero_coords();
        for c in x.iter().rev() {
            acc = self.add(&self.mul(&acc, &s, &pa), &self.scalar_coords(c, &pa), &pa);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_generator_is_root_of_modulus() {
        for (p, f) in [(2, 3), (5, 2), (3, 4)] {
            let w = UnramifiedRing::get(p, f);
            let pa = w.pow_p(12);
            let s = w.frobenius_of_generator(12);
            let (val, _) = w.eval_modulus(&s, &pa);
            assert!(w.is_zero_mod(&val, &pa));
        }
    }

    #[test]
    fn unit_inverse() {
        let w = UnramifiedRing::get(3, 3);
        let pa = w.pow_p(10);
        let x = vec![BigInt::from(4), BigInt::from(7), BigInt::from(11)];
        let y = w.inv_unit(&x, 10).unwrap();
        assert_eq!(w.mul(&x, &y, &pa), w.one_coords());
    }
}
