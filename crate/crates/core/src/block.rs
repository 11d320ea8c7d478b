//! Block-fading / OFDM parameterisation.
//!
//! Derives the subcarrier grid from bandwidth and block length, accounts
//! for the energy removed by impulse-response truncation and for the energy
//! that moves within a block, and applies the cyclic-prefix rate penalty.

use crate::error::{Error, Result};

const GRID_TOL: f64 = 1e-6;

/// One block-fading configuration: `subcarriers = W * T_B`,
/// `spacing = 1 / T_B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig {
    pub bandwidth: f64,
    pub block_len: f64,
    pub prefix_len: f64,
    pub subcarriers: usize,
    pub spacing: f64,
}

impl OfdmConfig {
    /// Fraction of the block that carries information.
    pub fn cp_multiplier(&self) -> f64 {
        cp_rate_multiplier(self.block_len, self.prefix_len)
    }
}

/// Derive the OFDM grid. `W*T_B` and `W*T_t` must both sit on integers
/// (relative deviation at most 1e-6).
pub fn derive_grid(bandwidth: f64, block_len: f64, prefix_len: f64) -> Result<OfdmConfig> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::InvalidParameter {
            name: "bandwidth",
            reason: format!("must be finite and > 0, got {bandwidth}"),
        });
    }
    if !(block_len.is_finite() && block_len > 0.0) {
        return Err(Error::InvalidParameter {
            name: "block_len",
            reason: format!("must be finite and > 0, got {block_len}"),
        });
    }
    if !(prefix_len.is_finite() && prefix_len >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "prefix_len",
            reason: format!("must be finite and >= 0, got {prefix_len}"),
        });
    }
    let check_integer = |name: &'static str, value: f64| -> Result<f64> {
        let rounded = value.round();
        if (value - rounded).abs() > GRID_TOL * value.abs().max(1.0) {
            return Err(Error::NonIntegerGrid {
                name,
                value,
                tol: GRID_TOL,
            });
        }
        Ok(rounded)
    };
    let n = check_integer("W*T_B", bandwidth * block_len)?;
    check_integer("W*T_t", bandwidth * prefix_len)?;
    if n < 1.0 {
        return Err(Error::InvalidParameter {
            name: "W*T_B",
            reason: format!("needs at least one subcarrier, got {n}"),
        });
    }
    Ok(OfdmConfig {
        bandwidth,
        block_len,
        prefix_len,
        subcarriers: n as usize,
        spacing: 1.0 / block_len,
    })
}

/// Energy fraction removed when a unit-energy exponential profile is
/// truncated at the cyclic prefix: `exp(-T_t / tau_c)`.
pub fn truncation_energy(tau_c: f64, prefix_len: f64) -> f64 {
    debug_assert!(tau_c > 0.0 && prefix_len >= 0.0);
    (-prefix_len / tau_c).exp()
}

/// Adjusted SNR once the within-block variation (`1 - eta` of the energy)
/// and the truncated tail (`e_trunc`) are both treated as noise:
/// `snr * eta * (1 - e_trunc) / (1 + snr * (1 - eta * (1 - e_trunc)))`.
pub fn adjust_snr(snr: f64, eta: f64, e_trunc: f64) -> f64 {
    debug_assert!(snr >= 0.0);
    debug_assert!(eta > 0.0 && eta <= 1.0);
    debug_assert!((0.0..1.0).contains(&e_trunc));
    let kept = eta * (1.0 - e_trunc);
    snr * kept / (1.0 + snr * (1.0 - kept))
}

/// No information moves during the cyclic prefix: rates scale by
/// `T_B / (T_B + T_t)`.
pub fn cp_rate_multiplier(block_len: f64, prefix_len: f64) -> f64 {
    block_len / (block_len + prefix_len)
}

pub fn cp_penalty(rate: f64, block_len: f64, prefix_len: f64) -> f64 {
    debug_assert!(rate >= 0.0);
    rate * cp_rate_multiplier(block_len, prefix_len)
}

/// The single normalised SNR knob: raw SNR, the coherence energy fraction
/// and truncation energy that discount it. The adjusted value is
/// recomputed on access rather than stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrBudget {
    pub snr_raw: f64,
    pub coherence_fraction: f64,
    pub trunc_energy: f64,
}

impl SnrBudget {
    pub fn new(snr_raw: f64, coherence_fraction: f64, trunc_energy: f64) -> Result<Self> {
        if !(snr_raw.is_finite() && snr_raw >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "snr_raw",
                reason: format!("must be finite and >= 0, got {snr_raw}"),
            });
        }
        if !(coherence_fraction > 0.0 && coherence_fraction <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "coherence_fraction",
                reason: format!("must be in (0, 1], got {coherence_fraction}"),
            });
        }
        if !(0.0..1.0).contains(&trunc_energy) {
            return Err(Error::InvalidParameter {
                name: "trunc_energy",
                reason: format!("must be in [0, 1), got {trunc_energy}"),
            });
        }
        Ok(Self {
            snr_raw,
            coherence_fraction,
            trunc_energy,
        })
    }

    pub fn adjusted(&self) -> f64 {
        adjust_snr(self.snr_raw, self.coherence_fraction, self.trunc_energy)
    }
}
