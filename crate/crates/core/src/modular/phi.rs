//! Classical modular polynomials `Phi_N(X, Y)`.
//!
//! Tables for `N in {1, 2, 3, 5, 7}` ship with the crate and are validated
//! when first loaded. [`generate`] rebuilds them from `q`-expansions: for
//! prime `l` the roots of `Phi_l(X, j(tau))` are `j(l tau)` and
//! `j((tau + b)/l)`, whose power sums are Laurent series in `t = q^{1/l}`.

use std::fmt::Write as _;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::psi;
use crate::arith::is_prime;
use crate::cm::bigfloat::{Complex, Fixed};
use crate::cm::jfunc::{j_at_tau, j_coefficients};
use crate::error::{Error, Result};

pub const SUPPORTED_LEVELS: [u32; 5] = [1, 2, 3, 5, 7];

/// `Phi_N` with `coeffs[i][j]` the coefficient of `X^i Y^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularPolynomial {
    level: u32,
    coeffs: Vec<Vec<BigInt>>,
}

impl ModularPolynomial {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize, j: usize) -> &BigInt {
        &self.coeffs[i][j]
    }

    pub fn coeffs(&self) -> &[Vec<BigInt>] {
        &self.coeffs
    }

    /// Parses the `i j c` table format and validates the result.
    pub fn parse(level: u32, text: &str) -> Result<ModularPolynomial> {
        let m = psi(level as u64) as usize;
        let mut coeffs = vec![vec![BigInt::zero(); m + 1]; m + 1];
        let mut seen = vec![vec![false; m + 1]; m + 1];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::InvalidTable(format!("Phi_{level} line {}: {line:?}", lineno + 1));
            let mut it = line.split_whitespace();
            let i: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let j: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let c: BigInt = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            if i > m || j > m {
                return Err(Error::InvalidTable(format!(
                    "bidegree: Phi_{level} has a term X^{i} Y^{j} beyond degree {m}"
                )));
            }
            if seen[i][j] {
                return Err(Error::InvalidTable(format!(
                    "Phi_{level}: duplicate entry ({i}, {j})"
                )));
            }
            seen[i][j] = true;
            coeffs[i][j] = c;
        }
        if level > 1 {
            for i in 0..=m {
                for j in 0..i {
                    if seen[j][i] && coeffs[j][i] != coeffs[i][j] {
                        return Err(Error::InvalidTable(format!(
                            "symmetry: Phi_{level} entries ({i}, {j}) and ({j}, {i}) differ"
                        )));
                    }
                    coeffs[j][i] = coeffs[i][j].clone();
                }
            }
        }
        let phi = ModularPolynomial { level, coeffs };
        phi.validate()?;
        Ok(phi)
    }

    /// Lower-triangular table text (full table for `N = 1`).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() && (self.level == 1 || i >= j) {
                    writeln!(s, "{i} {j} {c}").unwrap();
                }
            }
        }
        s
    }

    /// Checks symmetry, bidegree and the modular identity
    /// `Phi_N(j(tau), j(N tau)) = 0` at three points.
    pub fn validate(&self) -> Result<()> {
        let n = self.level;
        let m = psi(n as u64) as usize;
        if self.degree() != m {
            return Err(Error::InvalidTable(format!(
                "bidegree: Phi_{n} has degree {}",
                self.degree()
            )));
        }
        if n == 1 {
            let mut want = vec![vec![BigInt::zero(); 2]; 2];
            want[1][0] = BigInt::one();
            want[0][1] = -BigInt::one();
            if self.coeffs != want {
                return Err(Error::InvalidTable("Phi_1 must be X - Y".into()));
            }
            return Ok(());
        }
        for i in 0..=m {
            for j in 0..i {
                if self.coeffs[i][j] != self.coeffs[j][i] {
                    return Err(Error::InvalidTable(format!(
                        "symmetry: Phi_{n} at ({i}, {j})"
                    )));
                }
            }
        }
        if !self.coeffs[m][0].is_one() || (1..=m).any(|j| !self.coeffs[m][j].is_zero()) {
            return Err(Error::InvalidTable(format!(
                "bidegree: Phi_{n} is not monic of degree {m} in X"
            )));
        }
        // (re tau, im tau) as tenths
        for (x, y) in [(0, 11), (1, 12), (-3, 10)] {
            let rel = self.modular_identity_residual(x, y);
            if rel > -33.2 {
                return Err(Error::InvalidTable(format!(
                    "modular identity: Phi_{n}(j(tau), j({n} tau)) has relative size 2^{rel:.1} at tau = {x}/10 + {y}/10 i"
                )));
            }
        }
        Ok(())
    }

    /// `log2 (|Phi(j(tau), j(N tau))| / max term)` for `tau = (x + i y)/10`.
    pub fn modular_identity_residual(&self, x: i64, y: i64) -> f64 {
        let bits = 320;
        let ten = BigInt::from(10);
        let fx = |k: i64| Fixed::ratio(&BigInt::from(k), &ten, bits);
        let a = j_at_tau(&fx(x), &fx(y));
        let n = self.level as i64;
        let b = j_at_tau(&fx(n * x), &fx(n * y));
        self.eval_complex(&a, &b)
    }

    fn eval_complex(&self, a: &Complex, b: &Complex) -> f64 {
        let bits = a.bits();
        let m = self.degree();
        let powers = |z: &Complex| {
            let mut v = vec![Complex::one(bits)];
            for k in 1..=m {
                v.push(&v[k - 1] * z);
            }
            v
        };
        let (pa, pb) = (powers(a), powers(b));
        let mut total = Complex::zero(bits);
        let mut largest = f64::NEG_INFINITY;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let t = (&pa[i] * &pb[j]).scale_int(c);
                largest = largest.max(t.log2_abs());
                total = &total + &t;
            }
        }
        total.log2_abs() - largest
    }

    /// `Phi_N(x, Y)` as coefficients in `Y`, constant first.
    pub fn specialize_x(&self, x: &BigInt) -> Vec<BigInt> {
        let m = self.degree();
        (0..=m)
            .map(|j| {
                let mut acc = BigInt::zero();
                for i in (0..=m).rev() {
                    acc = acc * x + &self.coeffs[i][j];
                }
                acc
            })
            .collect()
    }

    /// Returns a copy with one coefficient (and its mirror) replaced.
    pub fn with_coefficient(&self, i: usize, j: usize, c: BigInt) -> ModularPolynomial {
        let mut out = self.clone();
        if self.level > 1 {
            out.coeffs[j][i] = c.clone();
        }
        out.coeffs[i][j] = c;
        out
    }
}

const PHI_1: &str = include_str!("../../data/phi_1.txt");
const PHI_2: &str = include_str!("../../data/phi_2.txt");
const PHI_3: &str = include_str!("../../data/phi_3.txt");
const PHI_5: &str = include_str!("../../data/phi_5.txt");
const PHI_7: &str = include_str!("../../data/phi_7.txt");

/// Vendored table text for a supported level.
pub fn table_text(level: u32) -> Result<&'static str> {
    Ok(match level {
        1 => PHI_1,
        2 => PHI_2,
        3 => PHI_3,
        5 => PHI_5,
        7 => PHI_7,
        _ => return Err(Error::UnsupportedLevel(level)),
    })
}

/// The validated vendored `Phi_N`.
pub fn modular_poly(level: u32) -> Result<&'static ModularPolynomial> {
    static TABLES: [OnceLock<std::result::Result<ModularPolynomial, Error>>; 5] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let idx = SUPPORTED_LEVELS
        .iter()
        .position(|&l| l == level)
        .ok_or(Error::UnsupportedLevel(level))?;
    TABLES[idx]
        .get_or_init(|| ModularPolynomial::parse(level, table_text(level)?))
        .as_ref()
        .map_err(Clone::clone)
}

/// Truncated Laurent series: `c[k]` is the coefficient of `t^{lo + k}`,
/// and coefficients are known for exponents below `hi`.
#[derive(Clone, Debug)]
struct Laurent {
    lo: i64,
    hi: i64,
    c: Vec<BigInt>,
}

impl Laurent {
    fn exact_one() -> Laurent {
        Laurent {
            lo: 0,
            hi: i64::MAX / 4,
            c: vec![BigInt::one()],
        }
    }

    fn coeff(&self, e: i64) -> BigInt {
        assert!(e < self.hi, "coefficient of t^{e} is not known");
        let k = e - self.lo;
        if k < 0 || k as usize >= self.c.len() {
            BigInt::zero()
        } else {
            self.c[k as usize].clone()
        }
    }

    fn trim(mut self) -> Laurent {
        let lead = self.c.iter().take_while(|x| x.is_zero()).count();
        self.c.drain(..lead);
        self.lo += lead as i64;
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
        if self.c.is_empty() {
            self.lo = self.hi;
        }
        self
    }

    fn mul(&self, o: &Laurent) -> Laurent {
        let lo = self.lo + o.lo;
        let hi = (self.hi + o.lo).min(o.hi + self.lo);
        let len = (hi - lo).max(0) as usize;
        let mut c = vec![BigInt::zero(); len.min(self.c.len() + o.c.len())];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() || i >= c.len() {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                if i + j >= c.len() {
                    break;
                }
                c[i + j] += x * y;
            }
        }
        Laurent { lo, hi, c }.trim()
    }

    fn add_scaled(&self, o: &Laurent, k: &BigInt) -> Laurent {
        let lo = self.lo.min(o.lo);
        let hi = self.hi.min(o.hi);
        let top = (self.lo + self.c.len() as i64)
            .max(o.lo + o.c.len() as i64)
            .min(hi);
        let c = (lo..top)
            .map(|e| {
                let a = if e >= self.lo {
                    self.coeff(e)
                } else {
                    BigInt::zero()
                };
                let b = if e >= o.lo {
                    o.coeff(e)
                } else {
                    BigInt::zero()
                };
                a + b * k
            })
            .collect();
        Laurent { lo, hi, c }.trim()
    }

    fn div_exact(&self, k: i64) -> Laurent {
        let k = BigInt::from(k);
        let c = self
            .c
            .iter()
            .map(|x| {
                assert!((x % &k).is_zero(), "inexact division in Newton identities");
                x / &k
            })
            .collect();
        Laurent {
            lo: self.lo,
            hi: self.hi,
            c,
        }
    }

    /// `f(t^s)`.
    fn substitute_power(&self, s: i64) -> Laurent {
        let mut c = vec![BigInt::zero(); (self.c.len().max(1) - 1) * s as usize + 1];
        for (k, x) in self.c.iter().enumerate() {
            c[k * s as usize] = x.clone();
        }
        Laurent {
            lo: self.lo * s,
            hi: self.hi * s,
            c,
        }
        .trim()
    }

    /// Keeps exponents divisible by `l`, scaled by `l`.
    fn average_over_roots_of_unity(&self, l: i64) -> Laurent {
        let c = (0..self.c.len())
            .map(|k| {
                if (self.lo + k as i64).rem_euclid(l) == 0 {
                    &self.c[k] * l
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        Laurent {
            lo: self.lo,
            hi: self.hi,
            c,
        }
        .trim()
    }
}

fn j_series(len: usize) -> Laurent {
    Laurent {
        lo: -1,
        hi: len as i64 - 1,
        c: j_coefficients(len),
    }
    .trim()
}

/// Computes `Phi_N` from `q`-expansions (`N = 1` or prime).
pub fn generate(level: u32) -> Result<ModularPolynomial> {
    if level == 1 {
        return ModularPolynomial::parse(1, "1 0 1\n0 1 -1\n");
    }
    if !is_prime(level as u64) {
        return Err(Error::UnsupportedLevel(level));
    }
    let l = level as i64;
    let deg = (l + 1) as usize;
    let mut m0 = l * l * (l + 2) + 4 * l + 16;
    loop {
        if let Some(phi) = generate_with(l, deg, m0) {
            let phi = ModularPolynomial { level, coeffs: phi };
            phi.validate()?;
            return Ok(phi);
        }
        m0 *= 2;
    }
}

fn generate_with(l: i64, deg: usize, m0: i64) -> Option<Vec<Vec<BigInt>>> {
    // j in t (for the j((tau+b)/l)) and j(t^{l^2}) = j(l tau)
    let jt = j_series(m0 as usize + 2);
    let jq_len = (m0 / (l * l)) as usize + 4;
    let jl = j_series(jq_len).substitute_power(l * l);
    let mut pow_t = Laurent::exact_one();
    let mut pow_l = Laurent::exact_one();
    let mut s = vec![Laurent::exact_one()];
    for _ in 1..=deg {
        pow_t = pow_t.mul(&jt);
        pow_l = pow_l.mul(&jl);
        s.push(pow_l.add_scaled(&pow_t.average_over_roots_of_unity(l), &BigInt::one()));
    }
    // Newton identities: k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} s_i
    let mut e = vec![Laurent::exact_one()];
    for k in 1..=deg {
        let mut acc = Laurent {
            lo: 0,
            hi: i64::MAX / 4,
            c: vec![],
        };
        for i in 1..=k {
            let sign = if i % 2 == 1 {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            acc = acc.add_scaled(&e[k - i].mul(&s[i]), &sign);
        }
        e.push(acc.div_exact(k as i64));
    }
    if e.iter().any(|x| x.hi < 1) {
        return None;
    }
    // each e_k is a polynomial of degree <= l + 1 in j(tau), in q = t^l
    let jq = j_series((m0 / l) as usize + 4);
    let mut jpow = vec![Laurent::exact_one()];
    for k in 1..=deg {
        jpow.push(jpow[k - 1].mul(&jq));
    }
    let mut coeffs = vec![vec![BigInt::zero(); deg + 1]; deg + 1];
    for (k, ek) in e.iter().enumerate() {
        let mut rest = to_q_series(ek, l)?;
        let mut poly = vec![BigInt::zero(); deg + 1];
        for m in (0..=deg).rev() {
            let a = rest.coeff(-(m as i64));
            if !a.is_zero() {
                rest = rest.add_scaled(&jpow[m], &-&a);
                poly[m] = a;
            }
        }
        if rest.c.iter().any(|x| !x.is_zero()) || rest.hi < 1 {
            return None;
        }
        let sign = if k % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        for (m, a) in poly.into_iter().enumerate() {
            coeffs[deg - k][m] = a * &sign;
        }
    }
    Some(coeffs)
}

fn to_q_series(x: &Laurent, l: i64) -> Option<Laurent> {
    let lo = x.lo.div_euclid(l);
    let hi = x.hi.div_euclid(l) + i64::from(x.hi.rem_euclid(l) != 0);
    let mut c = Vec::new();
    for (k, v) in x.c.iter().enumerate() {
        let e = x.lo + k as i64;
        if e.rem_euclid(l) != 0 {
            if !v.is_zero() {
                return None;
            }
            continue;
        }
        let idx = (e.div_euclid(l) - lo) as usize;
        c.resize(idx + 1, BigInt::zero());
        c[idx] = v.clone();
    }
    Some(Laurent { lo, hi, c }.trim())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_2_literal() {
        let phi = modular_poly(2).unwrap();
        let c = |i: usize, j: usize| phi.coeff(i, j).to_string();
        assert_eq!(c(3, 0), "1");
        assert_eq!(c(2, 2), "-1");
        assert_eq!(c(2, 1), "1488");
        assert_eq!(c(2, 0), "-162000");
        assert_eq!(c(1, 1), "40773375");
        assert_eq!(c(1, 0), "8748000000");
        assert_eq!(c(0, 0), "-157464000000000");
        assert_eq!(c(3, 1), "0");
    }

    #[test]
    fn generated_tables_match_vendored() {
        for level in [1, 2, 3, 5] {
            assert_eq!(
                &generate(level).unwrap(),
                modular_poly(level).unwrap(),
                "level {level}"
            );
        }
    }

    #[test]
    fn all_levels_load() {
        for level in SUPPORTED_LEVELS {
            let phi = modular_poly(level).unwrap();
            assert_eq!(phi.degree() as u64, psi(level as u64));
        }
        assert_eq!(modular_poly(4).unwrap_err(), Error::UnsupportedLevel(4));
        assert_eq!(modular_poly(11).unwrap_err(), Error::UnsupportedLevel(11));
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let phi = modular_poly(2).unwrap();
        let bad = phi.with_coefficient(1, 1, BigInt::from(40773376));
        let e = ModularPolynomial::parse(2, &bad.to_text()).unwrap_err();
        assert!(e.to_string().contains("modular identity"), "{e}");
        let e = ModularPolynomial::parse(2, "4 0 1\n").unwrap_err();
        assert!(e.to_string().contains("bidegree"), "{e}");
        let e = ModularPolynomial::parse(2, &format!("{}0 1 5\n", phi.to_text())).unwrap_err();
        assert!(e.to_string().contains("symmetry"), "{e}");
    }

    #[test]
    fn identity_residual_is_small_at_1_1i() {
        for level in [2, 3, 5, 7] {
            let r = modular_poly(level)
                .unwrap()
                .modular_identity_residual(0, 11);
            assert!(r < -33.2, "level {level}: {r}");
        }
    }
}
