//! Experiment configuration: defaults, flat key=value file, CLI/env
//! overrides. Precedence is CLI > env > file > defaults; the effective
//! configuration is echoed into every output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use underspread::channel::SpacingConvention;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdpKindCfg {
    Exponential,
    Tabulated,
}

impl PdpKindCfg {
    pub fn label(self) -> &'static str {
        match self {
            PdpKindCfg::Exponential => "exponential",
            PdpKindCfg::Tabulated => "tabulated",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub pdp_kind: PdpKindCfg,
    pub tau_c: f64,
    pub pdp_csv: Option<PathBuf>,
    pub bandwidth: f64,
    pub block_len: f64,
    pub prefix_len: f64,
    pub snr: f64,
    pub coherence_fraction: f64,
    pub convention: SpacingConvention,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub n_trunc: usize,
    pub sweep_n: Option<Vec<usize>>,
    pub sweep_points: usize,
    /// run sweep points concurrently (one engine worker each); results are
    /// identical to the sequential mode
    pub parallel_points: bool,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            pdp_kind: PdpKindCfg::Exponential,
            tau_c: 1.72e-8,
            pdp_csv: None,
            bandwidth: 5e6,
            block_len: 5.30e-3,
            prefix_len: 2e-7,
            snr: 0.018,
            coherence_fraction: 0.99,
            convention: SpacingConvention::Cyclic,
            trials: 10_000,
            seed: 42,
            workers: 0,
            n_trunc: 2_000,
            sweep_n: None,
            sweep_points: 20,
            parallel_points: false,
            out: PathBuf::from("out"),
        }
    }
}

fn parse_field<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| format!("config key `{key}`: cannot parse `{value}`: {e}"))
}

impl ExperimentConfig {
    /// Apply one `key = value` pair; unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "pdp_kind" => {
                self.pdp_kind = match value {
                    "exponential" => PdpKindCfg::Exponential,
                    "tabulated" => PdpKindCfg::Tabulated,
                    other => {
                        return Err(format!(
                            "config key `pdp_kind`: expected `exponential` or `tabulated`, got `{other}`"
                        ))
                    }
                }
            }
            "tau_c" => self.tau_c = parse_field(key, value)?,
            "pdp_csv" => self.pdp_csv = Some(PathBuf::from(value)),
            "bandwidth" => self.bandwidth = parse_field(key, value)?,
            "block_len" => self.block_len = parse_field(key, value)?,
            "prefix_len" => self.prefix_len = parse_field(key, value)?,
            "snr" => self.snr = parse_field(key, value)?,
            "coherence_fraction" => self.coherence_fraction = parse_field(key, value)?,
            "convention" => {
                self.convention = value
                    .parse::<SpacingConvention>()
                    .map_err(|e| format!("config key `convention`: {e}"))?
            }
            "trials" => self.trials = parse_field(key, value)?,
            "seed" => self.seed = parse_field(key, value)?,
            "workers" => self.workers = parse_field(key, value)?,
            "n_trunc" => self.n_trunc = parse_field(key, value)?,
            "sweep_n" => {
                let mut list = Vec::new();
                for item in value.split(',') {
                    let item = item.trim();
                    if item.is_empty() {
                        continue;
                    }
                    list.push(parse_field::<usize>(key, item)?);
                }
                self.sweep_n = if list.is_empty() { None } else { Some(list) };
            }
            "sweep_points" => self.sweep_points = parse_field(key, value)?,
            "parallel_points" => self.parallel_points = parse_field(key, value)?,
            "out" => self.out = PathBuf::from(value),
            other => return Err(format!("unknown config key `{other}`")),
        }
        Ok(())
    }

    /// Apply a flat key=value file (`#` comments, blank lines ignored).
    pub fn apply_file(&mut self, path: &Path) -> Result<(), String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("config file `{}`: {e}", path.display()))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), idx + 1))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| format!("{}:{}: {e}", path.display(), idx + 1))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.pdp_kind == PdpKindCfg::Tabulated && self.pdp_csv.is_none() {
            return Err("config key `pdp_csv` is required when pdp_kind = tabulated".into());
        }
        if self.trials == 0 {
            return Err("config key `trials`: need at least one trial".into());
        }
        if self.n_trunc == 0 {
            return Err("config key `n_trunc`: must be >= 1".into());
        }
        if self.sweep_points < 2 {
            return Err("config key `sweep_points`: must be >= 2".into());
        }
        Ok(())
    }

    /// Deterministic echo of the effective configuration.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "pdp_kind = {}", self.pdp_kind.label());
        let _ = writeln!(s, "tau_c = {:.16e}", self.tau_c);
        if let Some(p) = &self.pdp_csv {
            let _ = writeln!(s, "pdp_csv = {}", p.display());
        }
        let _ = writeln!(s, "bandwidth = {:.16e}", self.bandwidth);
        let _ = writeln!(s, "block_len = {:.16e}", self.block_len);
        let _ = writeln!(s, "prefix_len = {:.16e}", self.prefix_len);
        let _ = writeln!(s, "snr = {:.16e}", self.snr);
        let _ = writeln!(s, "coherence_fraction = {:.16e}", self.coherence_fraction);
        let _ = writeln!(s, "convention = {}", self.convention.label());
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "workers = {}", self.workers);
        let _ = writeln!(s, "n_trunc = {}", self.n_trunc);
        if let Some(list) = &self.sweep_n {
            let items: Vec<String> = list.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(s, "sweep_n = {}", items.join(","));
        }
        let _ = writeln!(s, "sweep_points = {}", self.sweep_points);
        let _ = writeln!(s, "parallel_points = {}", self.parallel_points);
        let _ = writeln!(s, "out = {}", self.out.display());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_render_roundtrip() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("tau_c", "1.7e-8").unwrap();
        cfg.set("convention", "paper-table").unwrap();
        cfg.set("sweep_n", "10, 100,1000").unwrap();
        assert_eq!(cfg.tau_c, 1.7e-8);
        assert_eq!(cfg.convention, SpacingConvention::PaperTable);
        assert_eq!(cfg.sweep_n.as_deref(), Some(&[10, 100, 1000][..]));
        assert!(cfg.render().contains("sweep_n = 10,100,1000"));
    }

    #[test]
    fn unknown_key_rejected() {
        let mut cfg = ExperimentConfig::default();
        let err = cfg.set("snr_rawish", "1").unwrap_err();
        assert!(err.contains("snr_rawish"));
    }

    #[test]
    fn tabulated_requires_csv() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("pdp_kind", "tabulated").unwrap();
        assert!(cfg.validate().unwrap_err().contains("pdp_csv"));
    }
}
