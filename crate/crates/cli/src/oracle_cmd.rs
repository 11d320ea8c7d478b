//! `oracle`: run the cross-validation suites against the configured
//! channel, write a summary CSV, exit 2 on any failure.

use crate::config::ExperimentConfig;
use crate::report::{fmt_f, timestamp_line, write_file, SCHEMA_VERSION};
use crate::scenario::derive_scenario;
use std::fmt::Write as _;
use underspread::checks::{self, CheckOutcome};
use underspread::oracle::QuadratureSpec;

pub fn run(cfg: &ExperimentConfig, corrupt_recursion: f64) -> Result<i32, String> {
    let sc = derive_scenario(cfg)?;
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| format!("creating {}: {e}", cfg.out.display()))?;
    write_file(&cfg.out, "config_effective.txt", &cfg.render())?;

    // the default grid plus the configured channel's operating point
    let mut combos = checks::TRACKER_GRID.to_vec();
    combos.push((sc.a_sq, sc.snr_adjusted));

    let quad = QuadratureSpec {
        input_nodes: 800,
        output_nodes: 160,
        ..QuadratureSpec::default()
    };

    let mut outcomes: Vec<CheckOutcome> = Vec::new();
    outcomes.push(checks::tracker_equivalence_over(
        &combos,
        4,
        600,
        cfg.seed,
        corrupt_recursion,
    ));
    outcomes.extend(checks::matrix_identity_predicates(10_000, cfg.seed ^ 0x01));
    outcomes.extend(checks::mi_dominance(4, cfg.seed ^ 0x02, &quad));
    outcomes.push(checks::scale_invariance(cfg.seed ^ 0x03));
    outcomes.push(checks::channel_lag1(200_000, cfg.seed ^ 0x04));

    let mut csv = timestamp_line("");
    csv.push_str("schema_version,check,measured,tolerance,pass\n");
    for o in &outcomes {
        let _ = writeln!(
            csv,
            "{SCHEMA_VERSION},{},{},{},{}",
            o.name,
            fmt_f(o.measured),
            fmt_f(o.tolerance),
            o.pass
        );
        println!(
            "oracle: {:<36} measured={:<12.4e} tolerance={:<10.1e} {}",
            o.name,
            o.measured,
            o.tolerance,
            if o.pass { "ok" } else { "FAIL" }
        );
    }
    write_file(&cfg.out, "oracle_report.csv", &csv)?;

    let failing: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.pass)
        .map(|o| o.name)
        .collect();
    if failing.is_empty() {
        Ok(0)
    } else {
        eprintln!("oracle suite failed: {}", failing.join(", "));
        Ok(2)
    }
}
