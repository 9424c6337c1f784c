//! Fixed-point reals and complex numbers on `BigInt` mantissas.
//!
//! A [`Fixed`] is `m / 2^bits` for a shared number of fractional bits.
//! Enough for evaluating `j` at CM points with a few thousand bits; every
//! operation rounds to nearest, so errors stay at a handful of ulps per op.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    pub m: BigInt,
    pub bits: u32,
}

fn round_shift(x: BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x;
    }
    let half = BigInt::one() << (s - 1);
    (x + half) >> s
}

impl Fixed {
    pub fn zero(bits: u32) -> Fixed {
        Fixed {
            m: BigInt::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> Fixed {
        Fixed::from_int(&BigInt::one(), bits)
    }

    pub fn from_int(n: &BigInt, bits: u32) -> Fixed {
        Fixed { m: n << bits, bits }
    }

    pub fn from_i64(n: i64, bits: u32) -> Fixed {
        Fixed::from_int(&BigInt::from(n), bits)
    }

    /// `num / den` rounded.
    pub fn ratio(num: &BigInt, den: &BigInt, bits: u32) -> Fixed {
        Fixed {
            m: div_round(&(num << bits), den),
            bits,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn mul_int(&self, k: &BigInt) -> Fixed {
        Fixed {
            m: &self.m * k,
            bits: self.bits,
        }
    }

    pub fn div_int(&self, k: &BigInt) -> Fixed {
        Fixed {
            m: div_round(&self.m, k),
            bits: self.bits,
        }
    }

    pub fn div(&self, other: &Fixed) -> Fixed {
        assert!(!other.m.is_zero(), "fixed-point division by zero");
        Fixed {
            m: div_round(&(&self.m << self.bits), &other.m),
            bits: self.bits,
        }
    }

    pub fn shl(&self, k: u32) -> Fixed {
        Fixed {
            m: &self.m << k,
            bits: self.bits,
        }
    }

    pub fn shr(&self, k: u32) -> Fixed {
        Fixed {
            m: round_shift(self.m.clone(), k),
            bits: self.bits,
        }
    }

    /// Nearest integer and the distance to it (as `f64`).
    pub fn round(&self) -> (BigInt, f64) {
        let n = round_shift(self.m.clone(), self.bits);
        let err = &self.m - (&n << self.bits);
        let e = Fixed {
            m: err,
            bits: self.bits,
        }
        .to_f64()
        .abs();
        (n, e)
    }

    pub fn to_f64(&self) -> f64 {
        // keep 60 significant bits
        let len = self.m.bits() as i64;
        let drop = (len - 60).max(0) as u32;
        let top = (&self.m >> drop).to_f64().unwrap_or(0.0);
        top * 2f64.powi(drop as i32 - self.bits as i32)
    }

    /// `log2 |x|`, rough (for precision planning).
    pub fn log2_abs(&self) -> f64 {
        if self.m.is_zero() {
            return f64::NEG_INFINITY;
        }
        let len = self.m.bits() as i64;
        let drop = (len - 60).max(0) as u32;
        let top = (&self.m.abs() >> drop).to_f64().unwrap();
        top.log2() + drop as f64 - self.bits as f64
    }

    pub fn abs(&self) -> Fixed {
        Fixed {
            m: self.m.abs(),
            bits: self.bits,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn sqrt_int(n: &BigInt, bits: u32) -> Fixed {
        Fixed {
            m: (n << (2 * bits)).sqrt(),
            bits,
        }
    }

    /// `pi` by Machin's formula.
    pub fn pi(bits: u32) -> Fixed {
        let w = bits + 16;
        let a = atan_inv(5, w).mul_int(&BigInt::from(16));
        let b = atan_inv(239, w).mul_int(&BigInt::from(4));
        (a - b).with_bits(bits)
    }

    pub fn ln2(bits: u32) -> Fixed {
        // sum 1/(k 2^k)
        let w = bits + 16;
        let mut acc = BigInt::zero();
        let mut k = 1u32;
        loop {
            let term = (BigInt::one() << w) / (BigInt::from(k) << k);
            if term.is_zero() {
                break;
            }
            acc += term;
            k += 1;
        }
        Fixed { m: acc, bits: w }.with_bits(bits)
    }

    pub fn with_bits(&self, bits: u32) -> Fixed {
        if bits >= self.bits {
            Fixed {
                m: &self.m << (bits - self.bits),
                bits,
            }
        } else {
            Fixed {
                m: round_shift(self.m.clone(), self.bits - bits),
                bits,
            }
        }
    }

    /// `e^x` for any real `x`; the result is again fixed-point, so very
    /// negative `x` loses relative precision.
    pub fn exp(&self) -> Fixed {
        let bits = self.bits;
        let w = bits + 32;
        let x = self.with_bits(w);
        let ln2 = Fixed::ln2(w);
        let n = x.div(&ln2).round().0;
        let r = &x - &ln2.mul_int(&n);
        // e^r with |r| <= 0.35: halve 8 times, Taylor, square back
        let s = 8u32;
        let y = r.shr(s);
        let mut term = Fixed::one(w);
        let mut sum = Fixed::one(w);
        let mut k = 1i64;
        loop {
            term = (&term * &y).div_int(&BigInt::from(k));
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
            k += 1;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        let n = n.to_i64().expect("exponent in range");
        let out = if n >= 0 {
            sum.shl(n as u32)
        } else {
            sum.shr((-n) as u32)
        };
        out.with_bits(bits)
    }
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    // round half away from floor
    if (&r * BigInt::from(2)).abs() >= b.abs() {
        if b.is_positive() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// `atan(1/n)` by its alternating series.
fn atan_inv(n: u64, bits: u32) -> Fixed {
    let n2 = BigInt::from(n * n);
    let mut pow = (BigInt::one() << bits) / BigInt::from(n);
    let mut acc = BigInt::zero();
    let mut k = 0u64;
    while !pow.is_zero() {
        let term = &pow / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
        pow /= &n2;
        k += 1;
    }
    Fixed { m: acc, bits }
}

impl<'a> Add<&'a Fixed> for &'a Fixed {
    type Output = Fixed;
    fn add(self, o: &Fixed) -> Fixed {
        debug_assert_eq!(self.bits, o.bits);
        Fixed {
            m: &self.m + &o.m,
            bits: self.bits,
        }
    }
}

impl<'a> Sub<&'a Fixed> for &'a Fixed {
    type Output = Fixed;
    fn sub(self, o: &Fixed) -> Fixed {
        debug_assert_eq!(self.bits, o.bits);
        Fixed {
            m: &self.m - &o.m,
            bits: self.bits,
        }
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, o: Fixed) -> Fixed {
        &self - &o
    }
}

impl<'a> Mul<&'a Fixed> for &'a Fixed {
    type Output = Fixed;
    fn mul(self, o: &Fixed) -> Fixed {
        debug_assert_eq!(self.bits, o.bits);
        Fixed {
            m: round_shift(&self.m * &o.m, self.bits),
            bits: self.bits,
        }
    }
}

impl Neg for &Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed {
            m: -&self.m,
            bits: self.bits,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: Fixed,
    pub im: Fixed,
}

impl Complex {
    pub fn new(re: Fixed, im: Fixed) -> Complex {
        Complex { re, im }
    }

    pub fn real(re: Fixed) -> Complex {
        let bits = re.bits;
        Complex {
            re,
            im: Fixed::zero(bits),
        }
    }

    pub fn one(bits: u32) -> Complex {
        Complex::real(Fixed::one(bits))
    }

    pub fn zero(bits: u32) -> Complex {
        Complex::real(Fixed::zero(bits))
    }

    pub fn bits(&self) -> u32 {
        self.re.bits
    }

    pub fn conj(&self) -> Complex {
        Complex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm_sqr(&self) -> Fixed {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn scale_int(&self, k: &BigInt) -> Complex {
        Complex {
            re: self.re.mul_int(k),
            im: self.im.mul_int(k),
        }
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let n = o.norm_sqr();
        let num = self * &o.conj();
        Complex {
            re: num.re.div(&n),
            im: num.im.div(&n),
        }
    }

    /// `e^{i theta}` for real `theta`.
    pub fn expi(theta: &Fixed) -> Complex {
        let bits = theta.bits;
        let w = bits + 32;
        let s = 12u32;
        let y = theta.with_bits(w).shr(s);
        let mut term = Complex::one(w);
        let mut sum = Complex::one(w);
        let i_y = Complex::new(Fixed::zero(w), y);
        let mut k = 1i64;
        loop {
            let t = &term * &i_y;
            term = Complex {
                re: t.re.div_int(&BigInt::from(k)),
                im: t.im.div_int(&BigInt::from(k)),
            };
            if term.re.is_zero() && term.im.is_zero() {
                break;
            }
            sum = &sum + &term;
            k += 1;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        Complex {
            re: sum.re.with_bits(bits),
            im: sum.im.with_bits(bits),
        }
    }

    /// `log2 |z|`, rough.
    pub fn log2_abs(&self) -> f64 {
        let a = self.re.log2_abs();
        let b = self.im.log2_abs();
        let m = a.max(b);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + 0.5 * (1.0 + 2f64.powf(2.0 * (a.min(b) - m))).log2()
    }
}

impl<'a> Add<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn add(self, o: &Complex) -> Complex {
        Complex {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl<'a> Sub<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn sub(self, o: &Complex) -> Complex {
        Complex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl<'a> Mul<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn mul(self, o: &Complex) -> Complex {
        let bits = self.bits();
        // one rounding per component
        let re = &self.re.m * &o.re.m - &self.im.m * &o.im.m;
        let im = &self.re.m * &o.im.m + &self.im.m * &o.re.m;
        Complex {
            re: Fixed {
                m: round_shift(re, bits),
                bits,
            },
            im: Fixed {
                m: round_shift(im, bits),
                bits,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let pi = Fixed::pi(200);
        assert!((pi.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        let ln2 = Fixed::ln2(200);
        assert!((ln2.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        // pi to 50 decimals
        let digits: BigInt = (&pi.m * BigInt::from(10u32).pow(50u32)) >> 200;
        assert_eq!(
            digits.to_string(),
            "314159265358979323846264338327950288419716939937510"
        );
    }

    #[test]
    fn exp_and_expi() {
        let x = Fixed::from_i64(-3, 120);
        assert!((x.exp().to_f64() - (-3f64).exp()).abs() < 1e-15);
        let y = Fixed::ratio(&BigInt::from(7), &BigInt::from(2), 120);
        assert!((y.exp().to_f64() - 3.5f64.exp()).abs() < 1e-12);
        let pi = Fixed::pi(120);
        let z = Complex::expi(&pi);
        assert!((z.re.to_f64() + 1.0).abs() < 1e-15 && z.im.to_f64().abs() < 1e-15);
        let w = Complex::expi(&pi.div_int(&BigInt::from(3)));
        assert!((w.re.to_f64() - 0.5).abs() < 1e-15);
        assert!((w.im.to_f64() - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn division() {
        let a = Complex::new(Fixed::from_i64(3, 64), Fixed::from_i64(4, 64));
        let b = Complex::new(Fixed::from_i64(1, 64), Fixed::from_i64(-2, 64));
        let q = a.div(&b);
        assert!((q.re.to_f64() + 1.0).abs() < 1e-15);
        assert!((q.im.to_f64() - 2.0).abs() < 1e-15);
    }
}
