//! Elementary integer arithmetic shared by all modules: primes, trial
//! division, valuations, Möbius and Kronecker symbols.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Sieve of Eratosthenes, all primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Full factorization by trial division.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |q: u64, n: &mut u64| {
        let mut e = 0;
        while (*n).is_multiple_of(q) {
            *n /= q;
            e += 1;
        }
        if e > 0 {
            out.push((q, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut q = 5u64;
    while q.saturating_mul(q) <= n {
        push(q, &mut n);
        push(q + 2, &mut n);
        q += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Trial division against a precomputed list of primes covering `sqrt(n)`.
pub fn factor_with(mut n: u64, primes: &[u64]) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for &q in primes {
        if q.saturating_mul(q) > n {
            break;
        }
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
    }
    if n > 1 {
        debug_assert!(primes
            .last()
            .is_none_or(|&l| l.saturating_mul(l) >= n || is_prime(n)));
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factor(n).iter().all(|&(_, e)| e == 1)
}

pub fn mobius(n: u64) -> i32 {
    let f = factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Number of distinct prime divisors; `omega(1) = 0`.
pub fn omega(n: u64) -> u32 {
    factor(n).len() as u32
}

/// Linear sieve of the Möbius function on `0..=n` (`mu[0]` is unused).
pub fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut lpf = vec![0u32; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    if n >= 1 {
        mu[1] = 1;
    }
    for i in 2..=n {
        if lpf[i] == 0 {
            lpf[i] = i as u32;
            mu[i] = -1;
            primes.push(i);
        }
        for &q in &primes {
            if q > lpf[i] as usize || i * q > n {
                break;
            }
            lpf[i * q] = q as u32;
            mu[i * q] = if i % q == 0 { 0 } else { -mu[i] };
        }
    }
    mu
}

/// `p`-adic valuation of a nonzero integer; `None` for zero.
pub fn ord_p_u64(mut n: u64, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    Some(v)
}

pub fn ord_p_i64(n: i64, p: u64) -> Option<u32> {
    ord_p_u64(n.unsigned_abs(), p)
}

pub fn ord_p_big(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

pub fn ord_p_biguint(n: &BigUint, p: u64) -> Option<u64> {
    ord_p_big(&BigInt::from_biguint(Sign::Plus, n.clone()), p)
}

pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Jacobi symbol `(a | n)` for odd positive `n`.
fn jacobi(a: i64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(d | n)` for `n >= 1`.
pub fn kronecker(d: i64, n: u64) -> i32 {
    assert!(n >= 1, "kronecker symbol needs n >= 1");
    let mut n = n;
    let mut t = 1;
    while n.is_multiple_of(2) {
        n /= 2;
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if r == 3 || r == 5 {
            t = -t;
        }
    }
    if n == 1 {
        return t;
    }
    t * jacobi(d, n)
}

pub fn big_pow(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

pub fn big_to_i64(n: &BigInt) -> Option<i64> {
    n.to_i64()
}

/// `(base)^exp` as `u64`, `None` on overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut r: u64 = 1;
    for _ in 0..exp {
        r = r.checked_mul(base)?;
    }
    Some(r)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Extended gcd over `i128`: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn factorial(n: u64) -> BigUint {
    let mut r = BigUint::one();
    for k in 2..=n {
        r *= k;
    }
    r
}

/// A square root of `a` modulo an odd prime `q` (Tonelli–Shanks), `None`
/// for non-residues.
pub fn sqrt_mod_prime(a: u64, q: u64) -> Option<u64> {
    let a = a % q;
    if a == 0 {
        return Some(0);
    }
    if q == 2 {
        return Some(a);
    }
    if pow_mod(a, (q - 1) / 2, q) != 1 {
        return None;
    }
    let (mut s, mut e) = (q - 1, 0u32);
    while s % 2 == 0 {
        s /= 2;
        e += 1;
    }
    let mut z = 2;
    while pow_mod(z, (q - 1) / 2, q) != q - 1 {
        z += 1;
    }
    let mut c = pow_mod(z, s, q);
    let mut x = pow_mod(a, s.div_ceil(2), q);
    let mut t = pow_mod(a, s, q);
    let mut m = e;
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, q);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), q);
        x = mul_mod(x, b, q);
        c = mul_mod(b, b, q);
        t = mul_mod(t, c, q);
        m = i;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(factor(5327), vec![(7, 1), (761, 1)]);
        assert_eq!(factor(503), vec![(503, 1)]);
        assert!(is_prime(12503) == (factor(12503).len() == 1 && factor(12503)[0].1 == 1));
        for n in 1..2000u64 {
            assert_eq!(is_prime(n), factor(n) == vec![(n, 1)], "n = {n}");
        }
    }

    #[test]
    fn mobius_sieve_matches_factorization() {
        let mu = mobius_table(500);
        for n in 1..=500u64 {
            assert_eq!(mu[n as usize] as i32, mobius(n), "n = {n}");
        }
    }

    #[test]
    fn kronecker_small_values() {
        assert_eq!(kronecker(-11, 3), 1);
        assert_eq!(kronecker(-11, 2), -1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-3, 5), -1);
        assert_eq!(kronecker(-4, 5), 1);
        // brute force against Euler's criterion for odd primes
        for p in primes_up_to(60).into_iter().skip(1) {
            for d in -60i64..0 {
                let a = d.rem_euclid(p as i64) as u64;
                let euler = if a == 0 {
                    0
                } else if pow_mod(a, (p - 1) / 2, p) == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(d, p), euler, "d = {d}, p = {p}");
            }
        }
    }

    #[test]
    fn valuations() {
        assert_eq!(ord_p_big(&BigInt::from(32768), 2), Some(15));
        assert_eq!(ord_p_big(&BigInt::zero(), 2), None);
        assert_eq!(ord_p_i64(-250, 5), Some(3));
    }

    #[test]
    fn modular_square_roots() {
        for q in [3u64, 5, 7, 13, 17, 97, 7919] {
            for a in 0..q.min(200) {
                let brute = (0..q).any(|x| x * x % q == a);
                match sqrt_mod_prime(a, q) {
                    Some(r) => assert_eq!(r * r % q, a),
                    None => assert!(!brute),
                }
            }
        }
    }
}
