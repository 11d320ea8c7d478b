//! Experiment harness for the underspread-channel capacity bounds.
//!
//! Three subcommands: `derive` (parameter report), `sweep` (bound versus
//! subcarrier count), `oracle` (cross-validation suites). Configuration
//! comes from defaults, then a flat key=value file (`--config`), then
//! `UB_*` environment variables, then `--key=value` flags, in rising
//! precedence. Exit codes: 0 success, 1 configuration or validation
//! error, 2 oracle-suite failure.

mod config;
mod derive_cmd;
mod oracle_cmd;
mod report;
mod scenario;
mod sweep_cmd;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ubound", version, about, propagate_version = true)]
struct Cli {
    /// flat key=value configuration file
    #[arg(long, global = true, env = "UB_CONFIG", value_name = "PATH")]
    config: Option<PathBuf>,

    /// profile kind: exponential | tabulated
    #[arg(long = "pdp_kind", global = true, env = "UB_PDP_KIND", value_name = "KIND")]
    pdp_kind: Option<String>,
    /// exponential-profile time constant, seconds
    #[arg(long = "tau_c", global = true, env = "UB_TAU_C", value_name = "S")]
    tau_c: Option<String>,
    /// tabulated-profile CSV (delay_seconds,density_per_second)
    #[arg(long = "pdp_csv", global = true, env = "UB_PDP_CSV", value_name = "PATH")]
    pdp_csv: Option<String>,
    /// bandwidth W, hertz
    #[arg(long, global = true, env = "UB_BANDWIDTH", value_name = "HZ")]
    bandwidth: Option<String>,
    /// block length T_B, seconds
    #[arg(long = "block_len", global = true, env = "UB_BLOCK_LEN", value_name = "S")]
    block_len: Option<String>,
    /// cyclic prefix length T_t, seconds
    #[arg(long = "prefix_len", global = true, env = "UB_PREFIX_LEN", value_name = "S")]
    prefix_len: Option<String>,
    /// raw SNR (linear)
    #[arg(long, global = true, env = "UB_SNR", value_name = "X")]
    snr: Option<String>,
    /// energy fraction unchanged within one block
    #[arg(
        long = "coherence_fraction",
        global = true,
        env = "UB_COHERENCE_FRACTION",
        value_name = "X"
    )]
    coherence_fraction: Option<String>,
    /// spacing convention: cyclic | paper-table
    #[arg(long, global = true, env = "UB_CONVENTION", value_name = "CONV")]
    convention: Option<String>,
    /// Monte Carlo trials
    #[arg(long, global = true, env = "UB_TRIALS", value_name = "INT")]
    trials: Option<String>,
    /// master seed
    #[arg(long, global = true, env = "UB_SEED", value_name = "U64")]
    seed: Option<String>,
    /// worker threads (0 = host parallelism)
    #[arg(long, global = true, env = "UB_WORKERS", value_name = "INT")]
    workers: Option<String>,
    /// truncation index for the truncated-sum bounds
    #[arg(long = "n_trunc", global = true, env = "UB_N_TRUNC", value_name = "INT")]
    n_trunc: Option<String>,
    /// explicit sweep subcarrier counts, comma separated
    #[arg(long = "sweep_n", global = true, env = "UB_SWEEP_N", value_name = "LIST")]
    sweep_n: Option<String>,
    /// points in the default log-spaced sweep
    #[arg(
        long = "sweep_points",
        global = true,
        env = "UB_SWEEP_POINTS",
        value_name = "INT"
    )]
    sweep_points: Option<String>,
    /// run sweep points concurrently (identical output to sequential)
    #[arg(
        long = "parallel_points",
        global = true,
        env = "UB_PARALLEL_POINTS",
        value_name = "BOOL"
    )]
    parallel_points: Option<String>,
    /// output directory
    #[arg(long, global = true, env = "UB_OUT", value_name = "DIR")]
    out: Option<String>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// derive grid, energy and correlation parameters from the fundamentals
    Derive,
    /// run the bound over a range of subcarrier counts
    Sweep,
    /// run the cross-validation suites
    Oracle {
        /// test hook: multiply the recursion output by this factor
        #[arg(long = "corrupt-recursion", hide = true, default_value_t = 1.0)]
        corrupt_recursion: f64,
    },
}

impl Cli {
    fn effective_config(&self) -> Result<ExperimentConfig, String> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let overrides: [(&str, &Option<String>); 16] = [
            ("pdp_kind", &self.pdp_kind),
            ("tau_c", &self.tau_c),
            ("pdp_csv", &self.pdp_csv),
            ("bandwidth", &self.bandwidth),
            ("block_len", &self.block_len),
            ("prefix_len", &self.prefix_len),
            ("snr", &self.snr),
            ("coherence_fraction", &self.coherence_fraction),
            ("convention", &self.convention),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("n_trunc", &self.n_trunc),
            ("sweep_n", &self.sweep_n),
            ("sweep_points", &self.sweep_points),
            ("parallel_points", &self.parallel_points),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(v) = &self.out {
            cfg.set("out", v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help/version are not failures; anything else is a config error
            return if e.exit_code() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let cfg = match cli.effective_config() {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.cmd {
        Cmd::Derive => derive_cmd::run(&cfg).map(|()| 0),
        Cmd::Sweep => sweep_cmd::run(&cfg).map(|()| 0),
        Cmd::Oracle { corrupt_recursion } => oracle_cmd::run(&cfg, corrupt_recursion),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
