//! Runs experiments programmatically and prints their JSON reports.
//!
//! cargo run --release --example experiment_reports

use cmpadic::experiments::{
    run_prop_approximate, run_selftest, run_warmup_2adic, ExperimentConfig, OutputFormat,
};

fn main() -> cmpadic::Result<()> {
    let cfg = ExperimentConfig {
        seed: 42,
        ..Default::default()
    };
    let prop = run_prop_approximate(5, 2, &cfg)?;
    for c in &prop.cases {
        println!(
            "{}: d={} max valuation {} -> {:?}",
            c.id, c.values["d"], c.values["max_root_valuation"], c.verdict
        );
    }
    let warm = run_warmup_2adic(&[1, 3], 100_000, &cfg)?;
    print!("{}", warm.render(OutputFormat::Csv)?);
    let st = run_selftest(&cfg)?;
    println!("selftest: {:?}", st.summary);
    Ok(())
}
