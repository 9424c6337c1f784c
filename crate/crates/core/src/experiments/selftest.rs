use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::suites;
use super::{
    run_prop_approximate, run_sieve, run_warmup_2adic, CaseResult, ExperimentConfig,
    ExperimentReport, Verdict,
};
use crate::cm::{class_group, hilbert_class_poly_with, Discriminant};
use crate::error::Result;
use crate::padic::{NewtonPolygon, Slope};

const CLASS_NUMBERS: [(i64, usize); 7] = [
    (-3, 1),
    (-4, 1),
    (-23, 3),
    (-47, 5),
    (-71, 7),
    (-163, 1),
    (-503, 21),
];

fn imported(prefix: &str, report: ExperimentReport, out: &mut ExperimentReport) {
    for mut c in report.cases {
        c.id = format!("{prefix}/{}", c.id);
        out.push(c);
    }
}

/// Fast deterministic checks across every module. Timing is omitted so two
/// runs with the same seed produce identical output.
pub fn run_selftest(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "selftest",
        json!({
            "seed": cfg.seed,
            "precision": cfg.precision,
            "phi_dir": cfg.phi_dir.as_ref().map(|d| d.display().to_string()),
        }),
    );
    report.push(suites::modular_tables(cfg.phi_dir.as_deref()));
    report.push(suites::corrupted_table_control());

    let mut got = Vec::new();
    for (d, h) in CLASS_NUMBERS {
        let n = class_group(&Discriminant::new(d)?).class_number();
        got.push(json!({"d": d, "expected": h, "class_number": n}));
    }
    let ok = got.iter().all(|g| g["expected"] == g["class_number"]);
    report.push(CaseResult::new(
        "class_numbers",
        json!({}),
        json!({"table": got}),
        Verdict::from_bool(ok),
    ));

    let h = hilbert_class_poly_with(&Discriminant::new(-11)?, &cfg.hilbert_options())?;
    let np = NewtonPolygon::of_integer(h.poly(), 2);
    let v = np.max_root_valuation();
    report.push(CaseResult::new(
        "newton_polygon_h11",
        json!({"d": -11, "p": 2}),
        json!({"poly": h.poly().to_string(), "max_root_valuation": v.map(|v| v.to_string())}),
        Verdict::from_bool(v == Some(Slope::from_integer(15))),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for p in [2, 3, 5, 7] {
        report.push(suites::gamma_valuation(&mut rng, p, 50));
    }
    for p in [2, 3, 5] {
        report.push(suites::conjugator(&mut rng, p, 20));
    }
    report.push(suites::quaternion_order(&[5, 11, 17, 23]));
    report.push(suites::quaternion_phi(&mut rng, 20));
    report.push(suites::quaternion_norms(&mut rng, 50));
    report.push(suites::distance_chains(&mut rng, 50));
    report.push(suites::membership_round_trips(&mut rng, 20));
    report.push(suites::distance_vs_sampled(&mut rng, 50));

    imported("sieve", run_sieve(5, 1, 100_000, cfg)?, &mut report);
    imported(
        "warmup2",
        run_warmup_2adic(&[1], super::warmup::DEFAULT_X_CAP, cfg)?,
        &mut report,
    );
    imported("prop12", run_prop_approximate(5, 1, cfg)?, &mut report);
    report.timing_ms = None;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_is_deterministic_and_passes() {
        let cfg = ExperimentConfig {
            seed: 7,
            ..Default::default()
        };
        let a = run_selftest(&cfg).unwrap();
        assert_eq!(a.summary.fail, 0, "{}", a.to_json());
        assert!(a.timing_ms.is_none());
        assert_eq!(a.to_json(), run_selftest(&cfg).unwrap().to_json());
    }
}
