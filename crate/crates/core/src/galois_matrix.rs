//! `p`-adic valuations of `gamma^D - 1` and diagonal conjugators in `GL_2(Q_p)`.
//!
//! Given `A_1, ..., A_n`, [`construct_conjugator`] picks `alpha, beta, e`
//! with every `B_i = A_i^{-1} diag(p^{-e} alpha^D, p^{-e} beta^D) A_i`
//! integral, some `B_i` primitive, and `ord_p(p^{-2e} alpha^D beta^D)`
//! between `k_0` and `3 D k_0`.

use std::fmt;

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;

use crate::arith::{big_pow, ord_p_u64};
use crate::error::{Error, Result};
use crate::padic::{PadicNumber, UnramifiedRing, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AtMost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogOrderRecord {
    pub p: u64,
    pub d: u64,
    /// `ord_p(gamma^D - 1)`, `None` for infinity.
    pub lhs: Option<i64>,
    /// `ord_p(D) + ord_p(gamma - 1)` (odd `p`) or
    /// `ord_2(D) + ord_2(gamma^2 - 1) - 1` (`p = 2`).
    pub rhs: Option<i64>,
    pub relation: Relation,
    pub holds: bool,
}

fn finite_ord(x: &PadicNumber) -> Result<Option<i64>> {
    Ok(x.ord()?.finite())
}

/// Checks the valuation identity for `gamma^D - 1` by direct computation.
pub fn log_order_predicate(gamma: &PadicNumber, d: u64) -> Result<LogOrderRecord> {
    if d == 0 {
        return Err(Error::Domain("D must be positive".into()));
    }
    if gamma.residue_degree() != 1 {
        return Err(Error::Domain("gamma must lie in Q_p".into()));
    }
    let p = gamma.p();
    let ring = gamma.ring().clone();
    let prec = gamma.absolute_precision().unwrap_or(64).max(1) as u32 + 8;
    let one = PadicNumber::one(&ring, prec);
    let gm1 = gamma - &one;
    if gm1.ord_lower_bound() < Valuation::Finite(1) {
        return Err(Error::Domain(format!("gamma is not in 1 + {p}Z_{p}")));
    }
    let lhs = finite_ord(&(&gamma.pow(d) - &one))?;
    let ord_d = ord_p_u64(d, p).unwrap() as i64;
    let (rhs, relation) = if p >= 3 {
        (finite_ord(&gm1)?.map(|v| v + ord_d), Relation::Equal)
    } else {
        let g2m1 = &gamma.pow(2) - &one;
        (finite_ord(&g2m1)?.map(|v| v + ord_d - 1), Relation::AtMost)
    };
    let holds = match relation {
        Relation::Equal => lhs == rhs,
        // None is +infinity
        Relation::AtMost => match (lhs, rhs) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        },
    };
    Ok(LogOrderRecord {
        p,
        d,
        lhs,
        rhs,
        relation,
        holds,
    })
}

/// Exact `ord_p(gamma^D - 1)` for `gamma = 1 + p^m u`, `u` a unit, `m >= 1`,
/// with `ord_p(gamma + 1)` given (used only for `p = 2`).
pub fn ord_power_minus_one(p: u64, m: i64, ord_gamma_plus_one: i64, d: u64) -> i64 {
    let od = ord_p_u64(d, p).unwrap() as i64;
    if p >= 3 || d % 2 == 1 {
        m + if p >= 3 { od } else { 0 }
    } else {
        // gamma^2 lies in 1 + 4 Z_2
        m + ord_gamma_plus_one + od - 1
    }
}

/// An invertible `2 x 2` matrix over `Q_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGL2 {
    pub a: PadicNumber,
    pub b: PadicNumber,
    pub c: PadicNumber,
    pub d: PadicNumber,
}

impl MatrixGL2 {
    pub fn new(
        a: PadicNumber,
        b: PadicNumber,
        c: PadicNumber,
        d: PadicNumber,
    ) -> Result<MatrixGL2> {
        let m = MatrixGL2 { a, b, c, d };
        if [&m.a, &m.b, &m.c, &m.d]
            .iter()
            .any(|x| x.residue_degree() != 1)
        {
            return Err(Error::Domain("entries must lie in Q_p".into()));
        }
        if m.det().is_zero_at_precision() {
            return Err(Error::DegenerateMatrix(
                "determinant vanishes at working precision".into(),
            ));
        }
        Ok(m)
    }

    pub fn from_i64(p: u64, rows: [[i64; 2]; 2], prec: u32) -> Result<MatrixGL2> {
        let ring = UnramifiedRing::get(p, 1);
        let f = |x: i64| PadicNumber::from_i64(&ring, x, prec);
        MatrixGL2::new(f(rows[0][0]), f(rows[0][1]), f(rows[1][0]), f(rows[1][1]))
    }

    pub fn p(&self) -> u64 {
        self.a.p()
    }

    pub fn entries(&self) -> [&PadicNumber; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> PadicNumber {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn det_ord(&self) -> Result<i64> {
        Ok(self.det().ord()?.finite().expect("invertible"))
    }

    pub fn scale(&self, s: &PadicNumber) -> MatrixGL2 {
        MatrixGL2 {
            a: &self.a * s,
            b: &self.b * s,
            c: &self.c * s,
            d: &self.d * s,
        }
    }

    /// Every entry has valuation `>= 0` (approximate zeros count by their bound).
    pub fn is_integral(&self) -> bool {
        self.entries()
            .iter()
            .all(|x| x.ord_lower_bound() >= Valuation::Finite(0))
    }

    /// Some entry is a certified unit.
    pub fn is_primitive(&self) -> bool {
        self.entries()
            .iter()
            .any(|x| !x.is_zero_at_precision() && x.ord_lower_bound() == Valuation::Finite(0))
    }
}

impl fmt::Display for MatrixGL2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = |x: &PadicNumber| x.ord_lower_bound().to_string();
        write!(
            f,
            "ord [[{}, {}], [{}, {}]]",
            o(&self.a),
            o(&self.b),
            o(&self.c),
            o(&self.d)
        )
    }
}

/// `ord(delta) - min{ord(ad), ord(bd), ord(ac)}`.
pub fn compute_k_i(m: &MatrixGL2) -> Result<i64> {
    let products = [&m.a * &m.d, &m.b * &m.d, &m.a * &m.c];
    let mut best: Option<i64> = None;
    for x in &products {
        if x.is_exact_zero() {
            continue;
        }
        let v = x.ord()?.finite().unwrap();
        best = Some(best.map_or(v, |b| b.min(v)));
    }
    let min = best.ok_or_else(|| Error::DegenerateMatrix("ad, bd and ac all vanish".into()))?;
    Ok(m.det_ord()? - min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugatorCase {
    /// `k <= k_0`: `alpha = 1`, `beta = p^{k_0}`.
    Small,
    /// `k > k_0`: `alpha = p^{k_0} + p^k`, `beta = p^{k_0}`.
    Large,
}

#[derive(Clone, Debug)]
pub struct ConjugatorResult {
    pub alpha: BigInt,
    pub beta: BigInt,
    pub e: i64,
    pub k_i: Vec<i64>,
    pub k: i64,
    pub k0: u32,
    pub d: u64,
    pub case: ConjugatorCase,
    pub b: Vec<MatrixGL2>,
    /// `ord_p(p^{-2e} alpha^D beta^D)`.
    pub scalar_ord: i64,
}

impl ConjugatorResult {
    pub fn all_integral(&self) -> bool {
        self.b.iter().all(MatrixGL2::is_integral)
    }

    pub fn some_primitive(&self) -> bool {
        self.b.iter().any(MatrixGL2::is_primitive)
    }

    pub fn scalar_bounds_hold(&self) -> bool {
        let k0 = self.k0 as i64;
        k0 <= self.scalar_ord && self.scalar_ord <= 3 * self.d as i64 * k0
    }

    /// `0 <= e <= D k_0 - k_0/2` (only asserted in the large case).
    pub fn e_bounds_hold(&self) -> bool {
        let k0 = self.k0 as i64;
        self.case == ConjugatorCase::Small
            || (self.e >= 0 && 2 * self.e <= 2 * self.d as i64 * k0 - k0)
    }

    pub fn verify(&self) -> bool {
        self.all_integral()
            && self.some_primitive()
            && self.scalar_bounds_hold()
            && self.e_bounds_hold()
    }
}

/// `ord_p(gamma + 1)` for `gamma = 1 + p^m` (only needed at `p = 2`).
fn ord_gamma_plus_one(p: u64, m: i64) -> i64 {
    match (p, m) {
        (2, 1) => 2,
        (2, _) => 1,
        _ => 0,
    }
}

pub fn construct_conjugator(mats: &[MatrixGL2], k0: u32, d: u64) -> Result<ConjugatorResult> {
    let first = mats
        .first()
        .ok_or_else(|| Error::Precondition("no matrices".into()))?;
    let p = first.p();
    if mats.iter().any(|m| m.p() != p) {
        return Err(Error::Precondition("matrices over different primes".into()));
    }
    if d == 0 || k0 == 0 {
        return Err(Error::Precondition("k0 and D must be positive".into()));
    }
    let ord_2d = ord_p_u64(2 * d, p).unwrap();
    if k0 < 2 * ord_2d {
        return Err(Error::Precondition(format!(
            "k0 = {k0} < 2 ord_p(2D) = {}",
            2 * ord_2d
        )));
    }
    let k_i = mats.iter().map(compute_k_i).collect::<Result<Vec<_>>>()?;
    let k = *k_i.iter().max().unwrap();
    let k0i = k0 as i64;
    let di = d as i64;
    let beta = big_pow(p, k0);
    let (case, alpha, e) = if k <= k0i {
        (ConjugatorCase::Small, BigInt::from(1), -k.max(0))
    } else {
        let alpha = &beta + big_pow(p, k as u32);
        // gamma = alpha / beta = 1 + p^{k - k0}
        let m = k - k0i;
        let e = di * k0i + ord_power_minus_one(p, m, ord_gamma_plus_one(p, m), d) - k;
        (ConjugatorCase::Large, alpha, e)
    };
    let ord_alpha = crate::arith::ord_p_big(&alpha, p).unwrap() as i64;
    let scalar_ord = -2 * e + di * (ord_alpha + k0i);

    let ring = first.a.ring().clone();
    let alpha_d = num_traits::pow(alpha.clone(), d as usize);
    let beta_d = num_traits::pow(beta.clone(), d as usize);
    let diff = &alpha_d - &beta_d;
    // entries enter with enough digits to survive the cancellation in diff
    let prec = mats
        .iter()
        .flat_map(|m| m.entries().into_iter().filter_map(|x| x.precision()))
        .min()
        .unwrap_or(32)
        .max(8);
    let big = |x: &BigInt| PadicNumber::from_integer(&ring, x, prec + 8);
    let (alpha_d, beta_d, diff) = (big(&alpha_d), big(&beta_d), big(&diff));
    if case == ConjugatorCase::Large {
        let m = k - k0i;
        let want = di * k0i + ord_power_minus_one(p, m, ord_gamma_plus_one(p, m), d);
        debug_assert_eq!(diff.ord().unwrap(), Valuation::Finite(want));
    }
    let b = mats
        .iter()
        .map(|m| conjugate(m, &alpha_d, &beta_d, &diff, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConjugatorResult {
        alpha,
        beta,
        e,
        k_i,
        k,
        k0,
        d,
        case,
        b,
        scalar_ord,
    })
}

fn conjugate(
    m: &MatrixGL2,
    alpha_d: &PadicNumber,
    beta_d: &PadicNumber,
    diff: &PadicNumber,
    e: i64,
) -> Result<MatrixGL2> {
    let delta = m.det();
    let scale = delta.shift(e).try_inv()?;
    let ad = &m.a * &m.d;
    let tl = &(&ad * diff) + &(&delta * beta_d);
    let tr = &(&m.b * &m.d) * diff;
    let bl = -&(&(&m.a * &m.c) * diff);
    let br = &(&delta * alpha_d) - &(&ad * diff);
    Ok(MatrixGL2 {
        a: &tl * &scale,
        b: &tr * &scale,
        c: &bl * &scale,
        d: &br * &scale,
    })
}

/// A random `p`-adic integer `u p^v`, `0 <= v <= 4`, `u` a unit known to `prec` digits.
pub fn random_entry<R: Rng>(rng: &mut R, p: u64, prec: u32) -> PadicNumber {
    let ring = UnramifiedRing::get(p, 1);
    let v = rng.gen_range(0..=4u32);
    let modulus = big_pow(p, prec);
    let mut u = BigInt::from(rng.gen_range(1..p));
    // remaining digits
    let rest = BigInt::from(rng.gen::<u64>())
        * BigInt::from(rng.gen::<u64>())
        * BigInt::from(rng.gen::<u64>());
    u += (rest % (&modulus / BigInt::from(p))) * BigInt::from(p);
    PadicNumber::from_integer(&ring, &u, prec).shift(v as i64)
}

/// A random invertible integral matrix meeting the `compute_k_i` preconditions.
pub fn random_matrix<R: Rng>(rng: &mut R, p: u64, prec: u32) -> MatrixGL2 {
    loop {
        let e: Vec<PadicNumber> = (0..4).map(|_| random_entry(rng, p, prec)).collect();
        if let Ok(m) = MatrixGL2::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()) {
            if compute_k_i(&m).is_ok() {
                return m;
            }
        }
    }
}

/// Smallest admissible `k_0` for `D`: `max(1, 2 ord_p(2D))`.
pub fn min_k0(p: u64, d: u64) -> u32 {
    (2 * ord_p_u64(2 * d, p).unwrap()).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(p: u64, n: i64) -> PadicNumber {
        PadicNumber::from_i64(&UnramifiedRing::get(p, 1), n, 30)
    }

    #[test]
    fn log_order_examples() {
        let r = log_order_predicate(&q(5, 6), 1).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (Some(1), Some(1), true));
        let r = log_order_predicate(&q(5, 6), 5).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (Some(2), Some(2), true));
        let r = log_order_predicate(&q(2, 3), 2).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (Some(3), Some(3), true));
        assert!(log_order_predicate(&q(5, 2), 3).is_err());
    }

    #[test]
    fn exact_lte_matches_direct_computation() {
        for p in [2u64, 3, 5, 7] {
            for m in 1..4i64 {
                for d in 1..30u64 {
                    let g = 1 + (p as i64).pow(m as u32);
                    let gp1 = ord_p_u64((g + 1) as u64, p).unwrap_or(0) as i64;
                    let direct = log_order_predicate(&q(p, g), d).unwrap().lhs.unwrap();
                    assert_eq!(
                        ord_power_minus_one(p, m, gp1, d),
                        direct,
                        "p={p} m={m} d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn k_i_examples() {
        let id = MatrixGL2::from_i64(5, [[1, 0], [0, 1]], 20).unwrap();
        assert_eq!(compute_k_i(&id).unwrap(), 0);
        for m in 1..5u32 {
            let a = MatrixGL2::from_i64(5, [[1, 1], [1, 1 + 5i64.pow(m)]], 20).unwrap();
            assert_eq!(compute_k_i(&a).unwrap(), m as i64);
            assert_eq!(compute_k_i(&a.scale(&q(5, 7))).unwrap(), m as i64);
            assert_eq!(compute_k_i(&a.scale(&q(5, 50))).unwrap(), m as i64);
        }
    }

    #[test]
    fn conjugator_examples() {
        let id = MatrixGL2::from_i64(5, [[1, 0], [0, 1]], 20).unwrap();
        let r = construct_conjugator(&[id], 2, 1).unwrap();
        assert_eq!(r.case, ConjugatorCase::Small);
        assert_eq!(r.scalar_ord, 2);
        assert_eq!(r.b[0].a.ord().unwrap(), Valuation::Finite(0));
        assert_eq!(r.b[0].d.ord().unwrap(), Valuation::Finite(2));
        assert!(r.b[0].b.is_zero_at_precision() && r.b[0].c.is_zero_at_precision());
        assert!(r.verify());

        let a = MatrixGL2::from_i64(5, [[1, 1], [1, 126]], 20).unwrap();
        let r = construct_conjugator(&[a], 2, 1).unwrap();
        assert_eq!((r.case, r.k), (ConjugatorCase::Large, 3));
        assert!(r.verify());

        assert!(construct_conjugator(
            &[MatrixGL2::from_i64(2, [[1, 0], [0, 1]], 20).unwrap()],
            1,
            2
        )
        .is_err());
    }

    #[test]
    fn random_instances_small_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3, 5] {
            for _ in 0..50 {
                let n = rng.gen_range(1..=3);
                let d = rng.gen_range(1..=24u64);
                let k0 = min_k0(p, d) + rng.gen_range(0..4);
                let mats: Vec<_> = (0..n).map(|_| random_matrix(&mut rng, p, 40)).collect();
                let r = construct_conjugator(&mats, k0, d).unwrap();
                assert!(r.verify(), "p={p} d={d} k0={k0} k={} e={}", r.k, r.e);
            }
        }
    }
}
