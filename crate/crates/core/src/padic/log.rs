use num_bigint::BigInt;

use super::number::{PadicNumber, Valuation};
use crate::error::{Error, Result};

/// `log(x) = sum_{k>=1} (-1)^{k+1} (x-1)^k / k` for `x` in `1 + pW`
/// (`1 + 4W` when `p = 2`), truncated where the tail vanishes modulo the
/// absolute precision of `x`.
pub fn padic_log(x: &PadicNumber) -> Result<PadicNumber> {
    let ring = x.ring().clone();
    let p = ring.p();
    let one = PadicNumber::one(&ring, x.precision().unwrap_or(1).max(1) + 4);
    let z = x - &one;
    if z.is_exact_zero() {
        return Ok(PadicNumber::zero(&ring));
    }
    let need = if p == 2 { 2 } else { 1 };
    let m = match z.ord() {
        Ok(Valuation::Finite(m)) => m,
        Ok(Valuation::Infinite) => unreachable!(),
        Err(_) => {
            let at_least = z.ord_lower_bound().finite().unwrap();
            if at_least < need {
                return Err(Error::PrecisionExhausted(
                    "x is not known to lie in the domain".into(),
                ));
            }
            // log(1 + O(p^a)) = O(p^a)
            return Ok(PadicNumber::approx_zero(&ring, at_least));
        }
    };
    if m < need {
        return Err(Error::Domain(format!(
            "log needs ord(x - 1) >= {need}, got {m}"
        )));
    }
    let abs = z.absolute_precision().unwrap();
    let mut acc = PadicNumber::zero(&ring);
    let mut zk = z.clone();
    let mut k: u64 = 1;
    loop {
        // ord_p(k) <= floor(log_p k)
        let max_ord_k = (k as f64).log(p as f64).floor() as i64 + 1;
        if k as i64 * m - max_ord_k > abs {
            break;
        }
        let kk = PadicNumber::from_integer(&ring, &BigInt::from(k), 64);
        let term = zk.div(&kk)?;
        acc = if k % 2 == 1 {
            &acc + &term
        } else {
            &acc - &term
        };
        zk = &zk * &z;
        k += 1;
    }
    // the series result is only meaningful modulo p^abs
    Ok(truncate_abs(&acc, abs))
}

fn truncate_abs(x: &PadicNumber, abs: i64) -> PadicNumber {
    match (x.ord_lower_bound(), x.precision()) {
        (Valuation::Finite(v), Some(prec)) if prec > 0 => {
            if v >= abs {
                PadicNumber::approx_zero(x.ring(), abs)
            } else {
                x.with_precision((abs - v).min(prec as i64) as u32)
            }
        }
        _ => x.clone(),
    }
}
