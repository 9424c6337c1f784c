//! The modular `j`-function: exact `q`-expansion coefficients and
//! high-precision numerical evaluation.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::bigfloat::{Complex, Fixed};

/// Truncated power-series product.
pub fn series_mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Inverse of a power series with constant term `1`.
pub fn series_inv_unit(a: &[BigInt], len: usize) -> Vec<BigInt> {
    assert!(a[0].is_one(), "constant term must be 1");
    let mut out = vec![BigInt::zero(); len];
    out[0] = BigInt::one();
    for n in 1..len {
        let mut s = BigInt::zero();
        for k in 1..=n.min(a.len() - 1) {
            s += &a[k] * &out[n - k];
        }
        out[n] = -s;
    }
    out
}

/// `prod_{n >= 1} (1 - q^n)` via the pentagonal number theorem.
pub fn euler_product_series(len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    out[0] = BigInt::one();
    let mut k: i64 = 1;
    loop {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let e1 = (k * (3 * k - 1) / 2) as usize;
        let e2 = (k * (3 * k + 1) / 2) as usize;
        if e1 >= len {
            break;
        }
        out[e1] += sign;
        if e2 < len {
            out[e2] += sign;
        }
        k += 1;
    }
    out
}

/// Coefficients `c_{-1}, c_0, c_1, ...` of `j = q^{-1} + 744 + 196884 q + ...`
/// (`len` of them).
pub fn j_coefficients(len: usize) -> Vec<BigInt> {
    // j q = E4^3 / prod (1 - q^n)^24
    let mut e4 = vec![BigInt::zero(); len];
    e4[0] = BigInt::one();
    for (n, c) in e4.iter_mut().enumerate().skip(1) {
        let s3: u64 = (1..=n as u64)
            .filter(|d| (n as u64).is_multiple_of(*d))
            .map(|d| d * d * d)
            .sum();
        *c = BigInt::from(240u64 * s3);
    }
    let e4_3 = series_mul(&series_mul(&e4, &e4, len), &e4, len);
    let p = euler_product_series(len);
    let mut p24 = vec![BigInt::zero(); len];
    p24[0] = BigInt::one();
    for _ in 0..24 {
        p24 = series_mul(&p24, &p, len);
    }
    series_mul(&e4_3, &series_inv_unit(&p24, len), len)
}

/// `prod (1 - q^n)` evaluated numerically from the pentagonal series.
fn euler_product(q: &Complex) -> Complex {
    let bits = q.bits();
    let lq = q.log2_abs();
    let mut acc = Complex::one(bits);
    let mut k: i64 = 1;
    // q^e1 and q^e2 built incrementally
    let mut pow_e1 = Complex::one(bits);
    let mut e1_prev = 0i64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        if (e1 as f64) * lq < -(bits as f64) - 8.0 {
            break;
        }
        pow_e1 = &pow_e1 * &pow_c(q, (e1 - e1_prev) as u64);
        e1_prev = e1;
        let pow_e2 = &pow_e1 * &pow_c(q, k as u64);
        let term = &pow_e1 + &pow_e2;
        acc = if k % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
        k += 1;
    }
    acc
}

fn pow_c(x: &Complex, mut e: u64) -> Complex {
    let mut r = Complex::one(x.bits());
    let mut b = x.clone();
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

/// `j` from `q = e^{2 pi i tau}` through the eta quotient
/// `h = q prod (1 + q^n)^24 = q (P(q^2)/P(q))^24`, `j = (256 h + 1)^3 / h`.
pub fn j_from_q(q: &Complex) -> Complex {
    let bits = q.bits();
    let q2 = q * q;
    let ratio = euler_product(&q2).div(&euler_product(q));
    let r24 = pow_c(&ratio, 24);
    let h = q * &r24;
    let num = &h.scale_int(&BigInt::from(256)) + &Complex::one(bits);
    let num3 = &(&num * &num) * &num;
    num3.div(&h)
}

/// `j` from its `q`-expansion (cross-check; slow for `|q|` near 1).
pub fn j_from_q_series(q: &Complex, coeffs: &[BigInt]) -> Complex {
    let bits = q.bits();
    let mut acc = Complex::one(bits).div(q).scale_int(&coeffs[0]);
    let mut pw = Complex::one(bits);
    for c in &coeffs[1..] {
        acc = &acc + &pw.scale_int(c);
        pw = &pw * q;
    }
    acc
}

/// `q = e^{2 pi i tau}` for `tau = x + i y`.
pub fn q_from_tau(x: &Fixed, y: &Fixed) -> Complex {
    let bits = x.bits;
    let two_pi = Fixed::pi(bits).mul_int(&BigInt::from(2));
    let modulus = (-&(&two_pi * y)).exp();
    let phase = Complex::expi(&(&two_pi * x));
    Complex::new(&phase.re * &modulus, &phase.im * &modulus)
}

/// `q` at the CM point `(-b + sqrt(d)) / 2a` of the form `(a, b, c)`:
/// `e^{-pi sqrt|d| / a} e^{-i pi b / a}`.
pub fn q_at_form(a: i64, b: i64, d: i64, bits: u32) -> Complex {
    let pi = Fixed::pi(bits);
    let sq = Fixed::sqrt_int(&BigInt::from(d.unsigned_abs()), bits);
    let t = (&pi * &sq).div_int(&BigInt::from(a));
    let modulus = (-&t).exp();
    let theta = (-&pi.mul_int(&BigInt::from(b))).div_int(&BigInt::from(a));
    let phase = Complex::expi(&theta);
    Complex::new(&phase.re * &modulus, &phase.im * &modulus)
}

pub fn j_at_tau(x: &Fixed, y: &Fixed) -> Complex {
    j_from_q(&q_from_tau(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_coefficients() {
        let c = j_coefficients(6);
        let want = [1i64, 744, 196884, 21493760, 864299970, 20245856256];
        for (a, b) in c.iter().zip(want) {
            assert_eq!(*a, BigInt::from(b));
        }
    }

    #[test]
    fn j_at_i_is_1728() {
        let bits = 256;
        let q = q_from_tau(&Fixed::zero(bits), &Fixed::one(bits));
        let j = j_from_q(&q);
        let (n, err) = j.re.round();
        assert_eq!(n, BigInt::from(1728));
        assert!(err < 1e-50);
        assert!(j.im.to_f64().abs() < 1e-50);
        // q-series agrees
        let js = j_from_q_series(&q, &j_coefficients(120));
        assert!((js.re.to_f64() - 1728.0).abs() < 1e-9);
    }

    #[test]
    fn j_at_rho_is_zero() {
        let bits = 256;
        let q = q_at_form(1, 1, -3, bits);
        let j = j_from_q(&q);
        assert!(j.re.to_f64().abs() < 1e-40 && j.im.to_f64().abs() < 1e-40);
    }

    #[test]
    fn j_at_minus_11() {
        let q = q_at_form(1, 1, -11, 256);
        let j = j_from_q(&q);
        let (n, err) = j.re.round();
        assert_eq!(n, BigInt::from(-32768));
        assert!(err < 1e-40);
    }
}
