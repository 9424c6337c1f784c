use std::time::Instant;

use num_integer::Roots;
use serde::Serialize;
use serde_json::json;

use super::{elapsed_ms, CaseResult, ExperimentConfig, ExperimentReport, Verdict};
use crate::arith::{checked_pow, is_prime};
use crate::cm::{class_group, hilbert_class_poly_with, representation_count, Discriminant};
use crate::error::{Error, Result};
use crate::padic::{NewtonPolygon, Slope};

pub const DEFAULT_X_CAP: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WarmupPrime {
    pub n: u32,
    pub x: u64,
    pub ell: u64,
}

/// The least prime `ell = 3x^2 + 2^{2+n} >= 5` with `ell = 3 mod 8`.
pub fn find_warmup_prime(n: u32, x_cap: u64) -> Result<WarmupPrime> {
    if n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("n = {n} must be odd")));
    }
    let shift =
        checked_pow(2, n + 2).ok_or_else(|| Error::Resource(format!("2^{} overflows", n + 2)))?;
    for x in 0..=x_cap {
        let Some(ell) = x
            .checked_mul(x)
            .and_then(|v| v.checked_mul(3))
            .and_then(|v| v.checked_add(shift))
        else {
            break;
        };
        if ell >= 5 && ell % 8 == 3 && is_prime(ell) {
            return Ok(WarmupPrime { n, x, ell });
        }
    }
    Err(Error::SearchExhausted(format!(
        "no prime 3x^2 + 2^{} for x <= {x_cap}",
        n + 2
    )))
}

/// `sum_A sum_{k >= 1} sum_x 2^{omega(gcd(2, x))} r_{A^2}((3 ell - x^2)/2^{2+k})`
/// over all classes `A` of discriminant `-ell`.
pub fn gross_zagier_sum(ell: u64) -> Result<u64> {
    let disc = Discriminant::new(-(ell as i64))?;
    let group = class_group(&disc);
    let top = 3 * ell;
    let xmax = top.sqrt();
    let mut total = 0u64;
    for a in 0..group.class_number() {
        let a2 = group.square(a);
        let mut k = 1u32;
        while 1u64 << (2 + k) <= top {
            let m = 1u64 << (2 + k);
            for x in 0..=xmax {
                let num = top - x * x;
                if num == 0 || !num.is_multiple_of(m) {
                    continue;
                }
                let weight = if x % 2 == 0 { 2 } else { 1 };
                // x and -x
                let signs = if x == 0 { 1 } else { 2 };
                total += signs * weight * representation_count(&group, a2, num / m)?;
            }
            k += 1;
        }
    }
    Ok(total)
}

fn one_case(n: u32, x_cap: u64, cfg: &ExperimentConfig) -> Result<CaseResult> {
    let wp = find_warmup_prime(n, x_cap)?;
    let disc = Discriminant::new(-(wp.ell as i64))?;
    let h = hilbert_class_poly_with(&disc, &cfg.hilbert_options())?;
    let np = NewtonPolygon::of_integer(h.poly(), 2);
    let vmax = np.max_root_valuation();
    let target = Slope::new(3 * (n as i64 + 1), 2);
    let pass_a = vmax.is_some_and(|v| v >= target);
    let sum: Slope = np.root_valuations().iter().sum();
    let gz = gross_zagier_sum(wp.ell)?;
    let gz_value = Slope::new(3 * gz as i64, 2);
    let pass_b = np.zero_roots() == 0 && sum == gz_value;
    let poly = if h.degree() <= 3 {
        Some(h.poly().to_string())
    } else {
        None
    };
    let values = json!({
        "x": wp.x,
        "ell": wp.ell,
        "class_number": h.degree(),
        "hilbert_polynomial": poly,
        "max_root_valuation": vmax.map(|v| v.to_string()),
        "required_valuation": target.to_string(),
        "valuation_sum": sum.to_string(),
        "gross_zagier_double_sum": gz,
        "gross_zagier_value": gz_value.to_string(),
        "pass_a": pass_a,
        "pass_b": pass_b,
    });
    Ok(CaseResult::new(
        format!("n={n}"),
        json!({"n": n}),
        values,
        Verdict::from_bool(pass_a && pass_b),
    ))
}

/// For each odd `n`: the prime `ell`, `H_{-ell}` and its 2-adic Newton
/// polygon. PASS iff a root reaches `(3/2)(n+1)` and the valuations sum to
/// `3/2` times the double sum over classes.
pub fn run_warmup_2adic(
    ns: &[u32],
    x_cap: u64,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "warmup2",
        json!({"n": ns, "x_cap": x_cap, "seed": cfg.seed, "max_abs_d": cfg.max_abs_d}),
    );
    for &n in ns {
        let inputs = json!({"n": n});
        match one_case(n, x_cap, cfg) {
            Ok(c) => report.push(c),
            Err(e @ Error::Precondition(_)) => report.push(
                CaseResult::from_error(format!("n={n}"), inputs, &e).with_notes(e.to_string()),
            ),
            Err(e) => report.push(CaseResult::from_error(format!("n={n}"), inputs, &e)),
        }
    }
    report.timing_ms = elapsed_ms(start);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert_eq!(
            find_warmup_prime(1, 100).unwrap(),
            WarmupPrime {
                n: 1,
                x: 1,
                ell: 11
            }
        );
        assert_eq!(
            find_warmup_prime(3, 100).unwrap(),
            WarmupPrime {
                n: 3,
                x: 3,
                ell: 59
            }
        );
        assert!(find_warmup_prime(2, 100).is_err());
    }

    #[test]
    fn double_sum_for_eleven() {
        // 15 = (3/2) * 10
        assert_eq!(gross_zagier_sum(11).unwrap(), 10);
    }

    #[test]
    fn warmup_cases() {
        let r = run_warmup_2adic(&[1, 3], DEFAULT_X_CAP, &ExperimentConfig::default()).unwrap();
        assert_eq!(r.summary.pass, 2, "{}", r.to_json());
        let c = r.case("n=1").unwrap();
        assert_eq!(c.values["max_root_valuation"], "15");
        assert_eq!(c.values["hilbert_polynomial"], "X + 32768");
    }
}
