//! Square-free values of `f(x) = 3x^2 + 4p^{2n+1}`: the root counts
//! `rho(m) = #{b mod m : f(b) = 0 mod m}`, the count `N(y)` of `x >= 1` with
//! `f(x) <= y` square-free (by factoring and by the Möbius sum
//! `sum_d mu(d) A_{d^2}(y)`), the Euler product `c(p, n)`, and the unit-pair
//! count.
//!
//! The `epsilon` that appears in the asymptotic error terms only tunes
//! those terms; nothing here takes it as input.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{
    factor, factor_with, is_prime, isqrt, mobius_table, mul_mod, primes_up_to, sqrt_mod_prime,
};
use crate::error::{Error, Result};

pub const DEFAULT_Y_CAP: u64 = 100_000_000;
pub const DEFAULT_X_CAP: u64 = 1_000_000;
/// Moduli up to this size are also counted by enumeration.
pub const BRUTE_RHO_LIMIT: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveConfig {
    pub p: u64,
    pub n: u32,
    pub y_cap: u64,
    pub x_cap: u64,
    /// `4p^{2n+1}`.
    constant: u64,
}

impl SieveConfig {
    pub fn new(p: u64, n: u32) -> Result<SieveConfig> {
        if p < 5 || !is_prime(p) {
            return Err(Error::Precondition(format!("p = {p} must be a prime >= 5")));
        }
        if n < 1 {
            return Err(Error::Precondition("n must be >= 1".into()));
        }
        let constant = crate::arith::checked_pow(p, 2 * n + 1)
            .and_then(|v| v.checked_mul(4))
            .filter(|&c| c < u64::MAX / 4)
            .ok_or_else(|| Error::Resource(format!("4*{p}^{} overflows u64", 2 * n + 1)))?;
        Ok(SieveConfig {
            p,
            n,
            y_cap: DEFAULT_Y_CAP,
            x_cap: DEFAULT_X_CAP,
            constant,
        })
    }

    pub fn with_y_cap(mut self, cap: u64) -> Self {
        self.y_cap = cap;
        self
    }

    pub fn with_x_cap(mut self, cap: u64) -> Self {
        self.x_cap = cap;
        self
    }

    pub fn constant(&self) -> u64 {
        self.constant
    }

    /// `f(x)`, `None` on overflow.
    pub fn f(&self, x: u64) -> Option<u64> {
        x.checked_mul(x)?.checked_mul(3)?.checked_add(self.constant)
    }

    fn f_mod(&self, x: u64, m: u64) -> u64 {
        let x = x % m;
        (mul_mod(3, mul_mod(x, x, m), m) + self.constant % m) % m
    }

    /// Largest `x` with `f(x) <= y` (0 when `y < f(1)`).
    pub fn x_max(&self, y: u64) -> u64 {
        if y < self.constant {
            return 0;
        }
        let mut x = isqrt((y - self.constant) / 3);
        while self.f(x + 1).is_some_and(|v| v <= y) {
            x += 1;
        }
        while x > 0 && self.f(x).is_none_or(|v| v > y) {
            x -= 1;
        }
        x
    }

    fn check_y(&self, y: u64) -> Result<()> {
        if y > self.y_cap {
            return Err(Error::Resource(format!(
                "y = {y} exceeds the cap {}",
                self.y_cap
            )));
        }
        Ok(())
    }
}

/// Roots of `f` modulo `q^e` for a prime `q`.
fn roots_mod_prime_power(cfg: &SieveConfig, q: u64, e: u32) -> Vec<u64> {
    let m = q.pow(e);
    if q == 2 || q == 3 || q == cfg.p || m <= 64 {
        return (0..m).filter(|&b| cfg.f_mod(b, m) == 0).collect();
    }
    // simple roots mod q, lifted by Newton's method
    let c = cfg.constant % q;
    let inv3 = crate::arith::pow_mod(3, q - 2, q);
    let r = mul_mod(q - c, inv3, q);
    let Some(s) = sqrt_mod_prime(r, q) else {
        return Vec::new();
    };
    let mut roots = vec![s];
    if s != 0 && q - s != s {
        roots.push(q - s);
    }
    let mut modulus = q;
    for _ in 1..e {
        modulus *= q;
        for x in roots.iter_mut() {
            let fx = cfg.f_mod(*x, modulus);
            let dfx = mul_mod(6, *x, modulus) % q;
            let inv = crate::arith::pow_mod(dfx, q - 2, q);
            // x <- x - f(x)/f'(x); f(x) is divisible by the previous modulus
            let t = mul_mod(fx / (modulus / q), inv, q);
            *x = (*x + modulus - mul_mod(t, modulus / q, modulus)) % modulus;
        }
    }
    roots.sort_unstable();
    roots
}

/// `rho(q^e)` for a prime `q`.
pub fn rho_prime_power(cfg: &SieveConfig, q: u64, e: u32) -> u64 {
    if e == 0 {
        return 1;
    }
    if q == 3 {
        return 0;
    }
    if q == cfg.p {
        // p^e | 3a^2 + 4p^{2n+1} has no solution once e >= 2n+2, and
        // otherwise means p^{ceil(e/2)} | a
        return if e >= 2 * cfg.n + 2 { 0 } else { q.pow(e / 2) };
    }
    if q == 2 {
        // the count is constant from 2^5 on
        let e = e.min(12);
        return (0..1u64 << e)
            .filter(|&b| cfg.f_mod(b, 1 << e) == 0)
            .count() as u64;
    }
    let c = cfg.constant % q;
    let inv3 = crate::arith::pow_mod(3, q - 2, q);
    match sqrt_mod_prime(mul_mod(q - c, inv3, q), q) {
        None => 0,
        Some(_) => 2,
    }
}

/// Number of roots of `f` modulo `m`, multiplicatively over the prime powers of `m`.
pub fn rho(m: u64, cfg: &SieveConfig) -> u64 {
    assert!(m >= 1, "rho needs m >= 1");
    factor(m)
        .into_iter()
        .map(|(q, e)| rho_prime_power(cfg, q, e))
        .product()
}

/// `rho(m)` by enumerating all residues.
pub fn rho_brute(m: u64, cfg: &SieveConfig) -> u64 {
    (0..m).filter(|&b| cfg.f_mod(b, m) == 0).count() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Brute,
    Mobius,
}

/// `N(y)`, exactly, by either method.
pub fn count_n(y: u64, cfg: &SieveConfig, method: CountMethod) -> Result<u64> {
    cfg.check_y(y)?;
    let xm = cfg.x_max(y);
    if xm == 0 {
        return Ok(0);
    }
    Ok(match method {
        CountMethod::Brute => {
            let primes = primes_up_to(isqrt(y) + 1);
            (1..=xm)
                .into_par_iter()
                .filter(|&x| {
                    let v = cfg.f(x).expect("bounded by y");
                    factor_with(v, &primes).iter().all(|&(_, e)| e == 1)
                })
                .count() as u64
        }
        CountMethod::Mobius => {
            let dmax = isqrt(y);
            let mu = mobius_table(dmax as usize);
            let primes = primes_up_to(dmax);
            (1..=dmax)
                .into_par_iter()
                .filter(|&d| mu[d as usize] != 0)
                .map(|d| mu[d as usize] as i64 * a_d2(d, xm, cfg, &primes) as i64)
                .sum::<i64>() as u64
        }
    })
}

/// `A_{d^2}(y) = #{1 <= x <= xm : d^2 | f(x)}` for square-free `d`, from the
/// roots of `f` modulo `d^2`.
fn a_d2(d: u64, xm: u64, cfg: &SieveConfig, primes: &[u64]) -> u64 {
    let mut residues: Vec<u64> = vec![0];
    let mut modulus: u64 = 1;
    for (q, _) in factor_with(d, primes) {
        let qq = q * q;
        let roots = roots_mod_prime_power(cfg, q, 2);
        if roots.is_empty() {
            return 0;
        }
        // combine a mod modulus with r mod qq
        let inv = crate::arith::ext_gcd((modulus % qq) as i128, qq as i128)
            .1
            .rem_euclid(qq as i128) as u64;
        let new_mod = modulus * qq;
        let mut next = Vec::with_capacity(residues.len() * roots.len());
        for &a in &residues {
            for &r in &roots {
                let t = mul_mod((r + qq - a % qq) % qq, inv, qq);
                next.push((a + (t as u128 * modulus as u128 % new_mod as u128) as u64) % new_mod);
            }
        }
        residues = next;
        modulus = new_mod;
    }
    residues
        .iter()
        .map(|&a| {
            if a == 0 {
                xm / modulus
            } else if a <= xm {
                (xm - a) / modulus + 1
            } else {
                0
            }
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EulerInterval {
    pub truncation: u64,
    /// The product over primes `<= L` (and `p`).
    pub truncated: f64,
    pub lower: f64,
    pub upper: f64,
    /// `(2/5) prod_{l <= L} (1 - l^{-3/2})`.
    pub comparison_bound: f64,
    pub exceeds_one_seventh: bool,
}

impl EulerInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// `c(p, n) = prod_l (1 - rho(l^2)/l^2)` with a certified tail factor in
/// `[1 - 2/(L-1), 1]`, widened for floating-point rounding.
pub fn euler_product_c(cfg: &SieveConfig, l: u64) -> Result<EulerInterval> {
    if l < 100 {
        return Err(Error::Precondition(format!(
            "truncation L = {l} must be >= 100"
        )));
    }
    let mut primes = primes_up_to(l);
    if cfg.p > l {
        primes.push(cfg.p);
    }
    let mut prod = 1.0f64;
    let mut cmp = 1.0f64;
    for &q in &primes {
        let q2 = (q as f64) * (q as f64);
        prod *= 1.0 - rho_prime_power(cfg, q, 2) as f64 / q2;
        cmp *= 1.0 - (q as f64).powf(-1.5);
    }
    // each step contributes at most two roundings of relative size 2^-53
    let rel = 4.0 * primes.len() as f64 * f64::EPSILON;
    let tail = 1.0 - 2.0 / (l as f64 - 1.0);
    let lower = prod * tail * (1.0 - rel);
    let upper = prod * (1.0 + rel);
    let seventh = 1.0 / 7.0;
    if lower <= seventh && seventh <= upper {
        return Err(Error::Inconclusive(format!(
            "c(p, n) interval [{lower}, {upper}] contains 1/7; increase L"
        )));
    }
    Ok(EulerInterval {
        truncation: l,
        truncated: prod,
        lower,
        upper,
        comparison_bound: 0.4 * cmp,
        exceeds_one_seventh: lower > seventh,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibleX {
    pub x: u64,
    pub f: u64,
    pub factorization: Vec<(u64, u32)>,
    pub odd: bool,
    pub coprime_to_p: bool,
    pub coprime_to_3: bool,
}

/// The smallest `x >= 1` with `f(x)` square-free, with its factorization.
pub fn minimal_admissible_x(cfg: &SieveConfig) -> Result<AdmissibleX> {
    for x in 1..=cfg.x_cap {
        let Some(v) = cfg.f(x) else { break };
        let fac = factor(v);
        if fac.iter().all(|&(_, e)| e == 1) {
            let out = AdmissibleX {
                x,
                f: v,
                odd: x % 2 == 1,
                coprime_to_p: v % cfg.p != 0,
                coprime_to_3: v % 3 != 0,
                factorization: fac,
            };
            assert!(out.odd && out.coprime_to_p && out.coprime_to_3, "{out:?}");
            return Ok(out);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no square-free f(x) for x <= {}",
        cfg.x_cap
    )))
}

/// `#{(x, d) : x, d >= 1, f(x) = d^2 k <= y}`.
pub fn unit_pair_count(y: u64, k: u64, cfg: &SieveConfig) -> Result<u64> {
    if k < 1 {
        return Err(Error::Precondition("k must be >= 1".into()));
    }
    cfg.check_y(y)?;
    Ok((1..=cfg.x_max(y))
        .filter(|&x| {
            let v = cfg.f(x).expect("bounded by y");
            v.is_multiple_of(k) && crate::arith::is_square(v / k)
        })
        .count() as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct SieveReport {
    pub config: SieveConfig,
    pub y: u64,
    pub n_brute: u64,
    pub n_mobius: u64,
    /// `(m, rho(m))` for `m <= rho_cap`.
    pub rho_table: Vec<(u64, u64)>,
    pub c: EulerInterval,
    pub minimal_x: AdmissibleX,
    /// `N(y) / sqrt(y/3)`.
    pub density_ratio: f64,
}

impl SieveReport {
    pub fn counts_agree(&self) -> bool {
        self.n_brute == self.n_mobius
    }
}

pub fn sieve_report(cfg: &SieveConfig, y: u64, rho_cap: u64, l: u64) -> Result<SieveReport> {
    let n_brute = count_n(y, cfg, CountMethod::Brute)?;
    let n_mobius = count_n(y, cfg, CountMethod::Mobius)?;
    Ok(SieveReport {
        config: cfg.clone(),
        y,
        n_brute,
        n_mobius,
        rho_table: (1..=rho_cap).map(|m| (m, rho(m, cfg))).collect(),
        c: euler_product_c(cfg, l)?,
        minimal_x: minimal_admissible_x(cfg)?,
        density_ratio: n_brute as f64 / (y as f64 / 3.0).sqrt(),
    })
}
