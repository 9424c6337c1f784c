use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Value};

use super::{elapsed_ms, CaseResult, ExperimentConfig, ExperimentReport, Verdict};
use crate::arith::{big_pow, is_prime};
use crate::cm::{hilbert_class_poly_with, Discriminant};
use crate::error::{Error, Result};
use crate::padic::{NewtonPolygon, Slope};
use crate::quaternion::construct_phi;
use crate::sieve::{minimal_admissible_x, SieveConfig};

/// `sqrt(d) p^{-v}` as a float, for monitoring only.
fn c_monitor(d: u64, p: u64, v: Slope) -> f64 {
    (d as f64).sqrt() * (p as f64).powf(-(*v.numer() as f64) / *v.denom() as f64)
}

/// Exact test of `sqrt(d) p^{-v} < 1`, i.e. `d^{den} < p^{2 num}`.
fn c_monitor_below_one(d: u64, p: u64, v: Slope) -> bool {
    if *v.numer() <= 0 {
        return false;
    }
    let lhs = num_traits::pow(BigInt::from(d), *v.denom() as usize);
    lhs < big_pow(p, 2 * *v.numer() as u32)
}

fn one_case(p: u64, n: u32, cfg: &ExperimentConfig, running_max: &mut f64) -> Result<CaseResult> {
    let scfg = SieveConfig::new(p, n)?;
    let adm = minimal_admissible_x(&scfg)?;
    let d = adm.f;
    if d > cfg.max_abs_d {
        return Err(Error::Resource(format!(
            "|d| = {d} exceeds the cap {}",
            cfg.max_abs_d
        )));
    }
    let disc = Discriminant::new(-(d as i64))?;
    let squarefree = adm.factorization.iter().all(|&(_, e)| e == 1);
    let fundamental = disc.is_fundamental() && (-(d as i64)).rem_euclid(4) == 1;
    let h = hilbert_class_poly_with(&disc, &cfg.hilbert_options())?;
    let np = NewtonPolygon::of_integer(h.poly(), p);
    let vals = np.root_valuations();
    let vmax = np.max_root_valuation();
    let target = Slope::from_integer(n as i64 + 1);
    let reached = vmax.is_some_and(|v| v >= target);
    let phi = construct_phi(n, adm.x as i64, p)?;
    let monitor = vmax.map(|v| c_monitor(d, p, v));
    if let Some(m) = monitor {
        *running_max = running_max.max(m);
    }
    let segments: Vec<Value> = np
        .segments()
        .iter()
        .map(|s| json!({"valuation": (-s.slope).to_string(), "multiplicity": s.length}))
        .collect();
    let values = json!({
        "x": adm.x,
        "d": d,
        "factorization": adm.factorization,
        "squarefree": squarefree,
        "fundamental": fundamental,
        "class_number": h.degree(),
        "root_valuations": segments,
        "zero_roots": np.zero_roots(),
        "valuation_sum": vals.iter().sum::<Slope>().to_string(),
        "max_root_valuation": vmax.map(|v| v.to_string()),
        "required_valuation": target.to_string(),
        "c_monitor": monitor.map(|m| format!("{m:.9}")),
        "c_monitor_below_one": vmax.is_some_and(|v| c_monitor_below_one(d, p, v)),
        "c_monitor_running_max": format!("{running_max:.9}"),
        "endomorphism_identity": phi.identity_holds(),
        "endomorphism_in_ok_plus_pn_order": phi.decomposition_holds,
    });
    let ok = reached && squarefree && fundamental && phi.valid();
    let mut notes = String::new();
    if vmax.is_some_and(|v| v.is_negative()) {
        notes.push_str("negative root valuation; ");
    }
    notes.push_str("c-monitor is informational");
    Ok(CaseResult::new(
        format!("n={n}"),
        json!({"p": p, "n": n}),
        values,
        Verdict::from_bool(ok),
    )
    .with_notes(notes))
}

/// For each `n <= n_max`: the smallest square-free `d = 3x^2 + 4p^{2n+1}`,
/// `H_{-d}` and its Newton polygon at `p`. PASS iff some root has valuation
/// at least `n + 1`.
pub fn run_prop_approximate(
    p: u64,
    n_max: u32,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    if !is_prime(p) || p == 2 || p % 3 != 2 {
        return Err(Error::Precondition(format!(
            "p = {p} must be an odd prime = 2 mod 3"
        )));
    }
    if n_max < 1 {
        return Err(Error::Precondition("n_max must be >= 1".into()));
    }
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "prop12",
        json!({"p": p, "n_max": n_max, "seed": cfg.seed, "precision": cfg.precision, "max_abs_d": cfg.max_abs_d}),
    );
    let mut running_max = 0.0f64;
    for n in 1..=n_max {
        let inputs = json!({"p": p, "n": n});
        match one_case(p, n, cfg, &mut running_max) {
            Ok(c) => report.push(c),
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
    fn monitor_comparison_is_exact() {
        // sqrt(503) / 25 < 1, sqrt(503) / 5 > 1
        assert!(c_monitor_below_one(503, 5, Slope::from_integer(2)));
        assert!(!c_monitor_below_one(503, 5, Slope::from_integer(1)));
        assert!(c_monitor(503, 5, Slope::from_integer(2)) < 1.0);
        // 5^{3/2} = 11.18 ..., 11.18^2 = 125 > 124
        assert!(c_monitor_below_one(124, 5, Slope::new(3, 2)));
        assert!(!c_monitor_below_one(126, 5, Slope::new(3, 2)));
    }

    #[test]
    fn first_case_at_five() {
        let r = run_prop_approximate(5, 1, &ExperimentConfig::default()).unwrap();
        let c = r.case("n=1").unwrap();
        assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
        assert_eq!(c.values["d"], 503);
        assert_eq!(c.values["class_number"], 21);
        assert_eq!(c.values["c_monitor_below_one"], true);
        assert!(run_prop_approximate(7, 1, &ExperimentConfig::default()).is_err());
    }
}
