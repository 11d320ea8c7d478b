//! Everything the commands derive from a configuration before any Monte
//! Carlo runs: grid, truncated profile, energy accounting, adjusted SNR
//! and the correlation coefficient.

use crate::config::{ExperimentConfig, PdpKindCfg};
use num_complex::Complex64;
use underspread::block::{derive_grid, truncation_energy, OfdmConfig, SnrBudget};
use underspread::channel::{FrequencyCorrelation, PowerDelayProfile};

#[derive(Debug)]
pub struct Scenario {
    pub grid: OfdmConfig,
    /// truncation-energy value reported (formula value even when unused)
    pub e_trunc_report: f64,
    /// truncation energy entering the SNR adjustment
    pub e_trunc_used: f64,
    pub snr_adjusted: f64,
    pub sigma_z_sq: f64,
    pub a: Complex64,
    pub a_sq: f64,
    pub warnings: Vec<String>,
}

pub fn derive_scenario(cfg: &ExperimentConfig) -> Result<Scenario, String> {
    let mut warnings = Vec::new();
    let grid = derive_grid(cfg.bandwidth, cfg.block_len, cfg.prefix_len)
        .map_err(|e| format!("bandwidth/block_len/prefix_len: {e}"))?;

    let base = match cfg.pdp_kind {
        PdpKindCfg::Exponential => PowerDelayProfile::exponential(cfg.tau_c)
            .map_err(|e| format!("tau_c: {e}"))?,
        PdpKindCfg::Tabulated => {
            let path = cfg
                .pdp_csv
                .as_ref()
                .ok_or_else(|| "pdp_csv: required for tabulated profiles".to_string())?;
            PowerDelayProfile::from_csv(path).map_err(|e| format!("pdp_csv: {e}"))?
        }
    };

    let (profile, e_trunc_report, e_trunc_used) = if cfg.prefix_len > 0.0 {
        let (profile, retained) = base
            .truncate(cfg.prefix_len)
            .map_err(|e| format!("prefix_len: {e}"))?;
        let report = match cfg.pdp_kind {
            PdpKindCfg::Exponential => truncation_energy(cfg.tau_c, cfg.prefix_len),
            PdpKindCfg::Tabulated => 1.0 - retained,
        };
        (profile, report, 1.0 - retained)
    } else {
        warnings.push(
            "prefix_len = 0: no cyclic prefix, profile left untruncated; the truncation-energy \
             formula value 1 is reported for reference and 0 enters the SNR adjustment"
                .to_string(),
        );
        (base, 1.0, 0.0)
    };

    let budget = SnrBudget::new(cfg.snr, cfg.coherence_fraction, e_trunc_used)
        .map_err(|e| format!("snr/coherence_fraction: {e}"))?;
    let snr_adjusted = budget.adjusted();

    let fc = FrequencyCorrelation::from_profile(&profile, grid.spacing, cfg.convention)
        .map_err(|e| format!("profile correlation: {e}"))?;

    Ok(Scenario {
        grid,
        e_trunc_report,
        e_trunc_used,
        snr_adjusted,
        sigma_z_sq: fc.sigma_z_sq,
        a: fc.a,
        a_sq: fc.a_sq(),
        warnings,
    })
}
