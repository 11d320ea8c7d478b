//! Power delay profiles and the frequency correlation of the subcarrier
//! response chain.
//!
//! A wide-sense-stationary uncorrelated-scattering channel observed at two
//! frequencies a spacing apart has jointly Gaussian responses whose
//! correlation coefficient is the normalised Fourier transform of the
//! (truncated) power delay profile at that spacing. The conditional
//! response given the previous subcarrier is Gaussian with mean `a * z_prev`
//! and isotropic variance `sigma_z^2 (1 - |a|^2)`, which is the Markov chain
//! the whole bound engine rides on.

use crate::error::{Error, Result};
use crate::gaussian::Gaussian2;
use crate::mat::Mat4;
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::io::BufRead;
use std::path::Path;

/// How the subcarrier spacing in hertz maps to the exponent rate
/// `theta` in `exp(-j theta tau)`.
///
/// `Cyclic` is the textbook reading (`theta = 2 pi df`). `PaperTable`
/// substitutes the spacing directly (`theta = df`), which is the convention
/// that reproduces the reference parameter table this crate's golden tests
/// pin down. The two differ by `(2 pi)^2` in `1 - |a|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpacingConvention {
    Cyclic,
    PaperTable,
}

impl SpacingConvention {
    pub fn angular_rate(self, delta_f: f64) -> f64 {
        match self {
            SpacingConvention::Cyclic => TAU * delta_f,
            SpacingConvention::PaperTable => delta_f,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpacingConvention::Cyclic => "cyclic",
            SpacingConvention::PaperTable => "paper-table",
        }
    }
}

impl std::str::FromStr for SpacingConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(SpacingConvention::Cyclic),
            "paper-table" => Ok(SpacingConvention::PaperTable),
            other => Err(Error::InvalidParameter {
                name: "convention",
                reason: format!("expected `cyclic` or `paper-table`, got `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum PdpKind {
    /// `amplitude * exp(-tau / tau_c)` for `tau >= 0`.
    Exponential { tau_c: f64, amplitude: f64 },
    /// Piecewise-linear density on a strictly increasing delay grid,
    /// integrated with the trapezoid rule.
    Tabulated { delays: Vec<f64>, densities: Vec<f64> },
}

/// Channel energy density over delay, with an optional truncation point.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    kind: PdpKind,
    truncation: Option<f64>,
}

impl PowerDelayProfile {
    /// Unit-energy exponential profile `(1/tau_c) exp(-tau/tau_c)`.
    pub fn exponential(tau_c: f64) -> Result<Self> {
        Self::exponential_scaled(tau_c, 1.0 / tau_c)
    }

    pub fn exponential_scaled(tau_c: f64, amplitude: f64) -> Result<Self> {
        if !(tau_c.is_finite() && tau_c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tau_c",
                reason: format!("must be finite and > 0, got {tau_c}"),
            });
        }
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                reason: format!("must be finite and >= 0, got {amplitude}"),
            });
        }
        Ok(Self {
            kind: PdpKind::Exponential { tau_c, amplitude },
            truncation: None,
        })
    }

    /// Tabulated density. Delays must start at >= 0 and increase strictly;
    /// densities must be finite and non-negative.
    pub fn tabulated(delays: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        if delays.len() != densities.len() {
            return Err(Error::InvalidParameter {
                name: "delays/densities",
                reason: format!("length mismatch: {} vs {}", delays.len(), densities.len()),
            });
        }
        if delays.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "delays",
                reason: "need at least two grid points".into(),
            });
        }
        if !delays[0].is_finite() || delays[0] < 0.0 {
            return Err(Error::InvalidParameter {
                name: "delays",
                reason: format!("first delay must be >= 0, got {}", delays[0]),
            });
        }
        for w in delays.windows(2) {
            if !(w[1].is_finite() && w[1] > w[0]) {
                return Err(Error::InvalidParameter {
                    name: "delays",
                    reason: format!("must be strictly increasing, got {} after {}", w[1], w[0]),
                });
            }
        }
        if densities.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidParameter {
                name: "densities",
                reason: "must be finite and >= 0".into(),
            });
        }
        Ok(Self {
            kind: PdpKind::Tabulated { delays, densities },
            truncation: None,
        })
    }

    /// Read a tabulated profile from two-column CSV
    /// `delay_seconds,density_per_second`. A header row is required.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn from_csv_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut delays = Vec::new();
        let mut densities = Vec::new();
        let mut saw_header = false;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                // header row required; reject files that start with data
                if line.split(',').next().unwrap_or("").parse::<f64>().is_ok() {
                    return Err(Error::ProfileCsv {
                        line: idx + 1,
                        reason: "missing header row (expected `delay_seconds,density_per_second`)"
                            .into(),
                    });
                }
                saw_header = true;
                continue;
            }
            let mut cols = line.split(',');
            let parse = |field: Option<&str>, what: &str| -> Result<f64> {
                field
                    .map(str::trim)
                    .ok_or_else(|| Error::ProfileCsv {
                        line: idx + 1,
                        reason: format!("missing {what} column"),
                    })?
                    .parse::<f64>()
                    .map_err(|e| Error::ProfileCsv {
                        line: idx + 1,
                        reason: format!("bad {what}: {e}"),
                    })
            };
            delays.push(parse(cols.next(), "delay")?);
            densities.push(parse(cols.next(), "density")?);
        }
        Self::tabulated(delays, densities)
    }

    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    /// Truncate to `[0, tau_t)` and report the retained energy fraction
    /// relative to this profile.
    pub fn truncate(&self, tau_t: f64) -> Result<(PowerDelayProfile, f64)> {
        if !(tau_t.is_finite() && tau_t > 0.0) && tau_t != f64::INFINITY {
            return Err(Error::InvalidTruncation { tau_t });
        }
        let before = self.response_variance();
        if before <= 0.0 {
            return Err(Error::UndefinedCorrelation);
        }
        let new_trunc = match self.truncation {
            Some(old) => Some(old.min(tau_t)),
            None if tau_t.is_finite() => Some(tau_t),
            None => None,
        };
        let kind = match &self.kind {
            PdpKind::Exponential { .. } => self.kind.clone(),
            PdpKind::Tabulated { delays, densities } => {
                let keep = delays.iter().take_while(|&&d| d < tau_t).count();
                PdpKind::Tabulated {
                    delays: delays[..keep].to_vec(),
                    densities: densities[..keep].to_vec(),
                }
            }
        };
        let out = PowerDelayProfile {
            kind,
            truncation: new_trunc,
        };
        let retained = out.response_variance() / before;
        Ok((out, retained))
    }

    /// Per-component response variance: the integral of the (truncated)
    /// density over delay. Closed form for the exponential kind, trapezoid
    /// for the tabulated kind.
    pub fn response_variance(&self) -> f64 {
        match &self.kind {
            PdpKind::Exponential { tau_c, amplitude } => {
                let full = amplitude * tau_c;
                match self.truncation {
                    Some(t) => full * (-(-t / tau_c).exp_m1()),
                    None => full,
                }
            }
            PdpKind::Tabulated { delays, densities } => {
                trapezoid(delays, |i| Complex64::new(densities[i], 0.0)).re
            }
        }
    }

    /// Correlation coefficient of the response at spacing `delta_f`:
    /// the normalised transform of the truncated density.
    pub fn correlation(&self, delta_f: f64, conv: SpacingConvention) -> Result<Complex64> {
        if !(delta_f.is_finite() && delta_f >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta_f",
                reason: format!("must be finite and >= 0, got {delta_f}"),
            });
        }
        let energy = self.response_variance();
        if energy <= 0.0 {
            return Err(Error::UndefinedCorrelation);
        }
        let theta = conv.angular_rate(delta_f);
        match &self.kind {
            PdpKind::Exponential { tau_c, .. } => {
                // a = 1/(1 + j theta tau_c) * (1 - e^{-tau_t(1/tau_c + j theta)})
                //     / (1 - e^{-tau_t/tau_c}),
                // dropping the truncation factor when untruncated.
                let base = Complex64::new(1.0, 0.0) / Complex64::new(1.0, theta * tau_c);
                match self.truncation {
                    None => Ok(base),
                    Some(t) => {
                        let decay = (-t / tau_c).exp();
                        let phase = theta * t;
                        let num = Complex64::new(
                            1.0 - decay * phase.cos(),
                            decay * phase.sin(),
                        );
                        let den = 1.0 - decay;
                        Ok(base * num / den)
                    }
                }
            }
            PdpKind::Tabulated { delays, densities } => {
                let num = trapezoid(delays, |i| {
                    let ph = -theta * delays[i];
                    Complex64::new(densities[i] * ph.cos(), densities[i] * ph.sin())
                });
                Ok(num / energy)
            }
        }
    }
}

fn trapezoid(grid: &[f64], f: impl Fn(usize) -> Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    if grid.len() < 2 {
        return acc;
    }
    let mut prev = f(0);
    for i in 1..grid.len() {
        let cur = f(i);
        acc += (prev + cur) * (0.5 * (grid[i] - grid[i - 1]));
        prev = cur;
    }
    acc
}

/// The Gauss-Markov step of the subcarrier response chain: correlation
/// coefficient `a` and per-component response variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyCorrelation {
    pub a: Complex64,
    pub sigma_z_sq: f64,
}

impl FrequencyCorrelation {
    pub fn new(a: Complex64, sigma_z_sq: f64) -> Result<Self> {
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: "must be finite".into(),
            });
        }
        // |a| <= 1 by the triangle inequality on the defining integral;
        // allow a hair of quadrature rounding.
        if a.norm_sqr() > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("|a| = {} exceeds 1", a.norm()),
            });
        }
        if !(sigma_z_sq.is_finite() && sigma_z_sq >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma_z_sq",
                reason: format!("must be finite and >= 0, got {sigma_z_sq}"),
            });
        }
        Ok(Self { a, sigma_z_sq })
    }

    pub fn from_profile(
        pdp: &PowerDelayProfile,
        delta_f: f64,
        conv: SpacingConvention,
    ) -> Result<Self> {
        Self::new(pdp.correlation(delta_f, conv)?, pdp.response_variance())
    }

    /// `|a|^2`, clamped into [0, 1].
    pub fn a_sq(&self) -> f64 {
        self.a.norm_sqr().min(1.0)
    }

    /// Conditional distribution of the next response given the previous
    /// one: mean `a * z_prev`, covariance `sigma_z^2 (1 - |a|^2) I`. At
    /// `|a| = 1` this is a point mass (zero covariance).
    pub fn conditional_response(&self, z_prev: Complex64) -> Gaussian2 {
        Gaussian2::isotropic(self.a * z_prev, self.sigma_z_sq * (1.0 - self.a_sq()))
    }

    /// Joint covariance of a response pair one spacing apart, in real-vector
    /// form (4x4).
    pub fn joint_pair_covariance(&self) -> Mat4 {
        let s = self.sigma_z_sq;
        let (re, im) = (self.a.re, self.a.im);
        Mat4([
            [s, 0.0, s * re, -s * im],
            [0.0, s, s * im, s * re],
            [s * re, s * im, s, 0.0],
            [-s * im, s * re, 0.0, s],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{from_vec, to_vec, ZmcsGaussian};
    use crate::mat::Mat2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exp_17_2ns() -> PowerDelayProfile {
        PowerDelayProfile::exponential(17.2e-9).unwrap()
    }

    #[test]
    fn truncate_rejects_nonpositive() {
        let pdp = exp_17_2ns();
        assert!(matches!(
            pdp.truncate(0.0),
            Err(Error::InvalidTruncation { .. })
        ));
        assert!(pdp.truncate(-1e-9).is_err());
    }

    #[test]
    fn truncate_infinite_is_identity() {
        let pdp = exp_17_2ns();
        let (out, retained) = pdp.truncate(f64::INFINITY).unwrap();
        assert_eq!(out, pdp);
        assert_eq!(retained, 1.0);
    }

    #[test]
    fn truncated_away_fraction_matches_reference() {
        // exp(-200ns / 17.2ns) = 8.91e-6 of the energy is cut
        let (_, retained) = exp_17_2ns().truncate(200e-9).unwrap();
        let cut = 1.0 - retained;
        assert!(
            ((cut - 8.91e-6) / 8.91e-6).abs() < 1e-2,
            "truncated-away fraction {cut:e}"
        );
    }

    #[test]
    fn truncate_tabulated_between_taps() {
        // uniform 3-point grid; cutting between points 2 and 3 keeps two.
        // Oracle: direct summation of the trapezoid segment energies.
        let (p1, p2, p3) = (0.4, 1.0, 0.2);
        let pdp = PowerDelayProfile::tabulated(vec![0.0, 1e-9, 2e-9], vec![p1, p2, p3]).unwrap();
        let (out, retained) = pdp.truncate(1.5e-9).unwrap();
        let seg1 = 0.5 * (p1 + p2) * 1e-9;
        let seg2 = 0.5 * (p2 + p3) * 1e-9;
        assert!((retained - seg1 / (seg1 + seg2)).abs() < 1e-15);
        assert!((out.response_variance() - seg1).abs() < 1e-24);
        // with a silent middle point the segment ratio reduces to
        // (p1+p2)/(p1+p2+p3)
        let pdp = PowerDelayProfile::tabulated(vec![0.0, 1e-9, 2e-9], vec![p1, 0.0, p3]).unwrap();
        let (_, retained) = pdp.truncate(1.5e-9).unwrap();
        assert!((retained - (p1 + 0.0) / (p1 + 0.0 + p3)).abs() < 1e-15);
    }

    #[test]
    fn response_variance_examples() {
        // unit-energy exponential truncated: variance equals retained fraction
        let (t, retained) = exp_17_2ns().truncate(50e-9).unwrap();
        assert!((t.response_variance() - retained).abs() < 1e-15);
        // single rectangular tap of density p over width d
        let pdp = PowerDelayProfile::tabulated(vec![0.0, 3e-9], vec![2.5, 2.5]).unwrap();
        assert!((pdp.response_variance() - 2.5 * 3e-9).abs() < 1e-22);
        // A * exp(-tau/tau_c) untruncated integrates to A * tau_c
        let pdp = PowerDelayProfile::exponential_scaled(1.5e-8, 3.0).unwrap();
        assert!((pdp.response_variance() - 3.0 * 1.5e-8).abs() < 1e-20);
    }

    #[test]
    fn correlation_at_zero_spacing_is_one() {
        for conv in [SpacingConvention::Cyclic, SpacingConvention::PaperTable] {
            let a = exp_17_2ns().correlation(0.0, conv).unwrap();
            assert_eq!(a, Complex64::new(1.0, 0.0));
            let (t, _) = exp_17_2ns().truncate(200e-9).unwrap();
            let a = t.correlation(0.0, conv).unwrap();
            assert_eq!(a, Complex64::new(1.0, 0.0));
            let tab =
                PowerDelayProfile::tabulated(vec![0.0, 1e-9, 3e-9], vec![1.0, 0.5, 0.2]).unwrap();
            let a = tab.correlation(0.0, conv).unwrap();
            assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn table_one_decorrelation() {
        // tau_c = 1.7e-8 s, untruncated, spacing 1.89e2 Hz, paper-table
        // convention: 1 - |a|^2 = 1.03e-11 within 5%
        let pdp = PowerDelayProfile::exponential(1.7e-8).unwrap();
        let a = pdp
            .correlation(1.89e2, SpacingConvention::PaperTable)
            .unwrap();
        let dec = 1.0 - a.norm_sqr();
        assert!(
            ((dec - 1.03e-11) / 1.03e-11).abs() < 0.05,
            "1-|a|^2 = {dec:e}"
        );
    }

    #[test]
    fn zero_energy_profile_rejected() {
        let pdp = PowerDelayProfile::tabulated(vec![0.0, 1e-9], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            pdp.correlation(100.0, SpacingConvention::Cyclic),
            Err(Error::UndefinedCorrelation)
        ));
    }

    #[test]
    fn tabulated_matches_discrete_tap_oracle() {
        // Independent oracle: the rectangle (Riemann) tap construction
        //   a = sum_k 2 sigma_k^2 e^{-j theta k dtau} / sum_k 2 sigma_k^2,
        //   sigma_k^2 = P(k dtau) dtau,
        // on a fine uniform grid of the same density.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let n = 16_000usize;
            let dtau = 1e-11;
            let tau_c = 2e-8;
            let scale: f64 = rng.random_range(0.5..2.0);
            let wob: f64 = rng.random_range(0.0..0.5);
            let dens: Vec<f64> = (0..n)
                .map(|k| {
                    let tau = k as f64 * dtau;
                    scale * (-tau / tau_c).exp() * (1.0 + wob * (tau / tau_c).sin())
                })
                .collect();
            let delays: Vec<f64> = (0..n).map(|k| k as f64 * dtau).collect();
            let pdp = PowerDelayProfile::tabulated(delays, dens.clone()).unwrap();
            let theta_f = rng.random_range(1e4..2e6);
            let a = pdp
                .correlation(theta_f, SpacingConvention::Cyclic)
                .unwrap();

            let theta = TAU * theta_f;
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for (k, d) in dens.iter().enumerate() {
                let tap = 2.0 * d * dtau;
                let ph = -theta * (k as f64 * dtau);
                num += Complex64::new(tap * ph.cos(), tap * ph.sin());
                den += tap;
            }
            let oracle = num / den;
            assert!(
                (a - oracle).norm() < 1e-3,
                "trapezoid {a} vs tap sum {oracle}"
            );
        }
    }

    #[test]
    fn closed_form_matches_quadrature_on_discretised_copy() {
        // Discretise the truncated exponential density on a fine grid and
        // compare the analytic route against the trapezoid route.
        let tau_c = 1.72e-8;
        let tau_t = 2e-7;
        let n = 20_000usize;
        let delays: Vec<f64> = (0..n).map(|k| tau_t * k as f64 / (n - 1) as f64).collect();
        let dens: Vec<f64> = delays.iter().map(|t| (-t / tau_c).exp() / tau_c).collect();
        let tab = PowerDelayProfile::tabulated(delays, dens).unwrap();
        let (exact, _) = PowerDelayProfile::exponential(tau_c)
            .unwrap()
            .truncate(tau_t)
            .unwrap();
        for &df in &[0.0, 188.7, 1.89e4, 2.5e6] {
            let a_t = tab.correlation(df, SpacingConvention::Cyclic).unwrap();
            let a_e = exact.correlation(df, SpacingConvention::Cyclic).unwrap();
            assert!(
                (a_t - a_e).norm() <= 1e-6 * a_e.norm().max(1e-6),
                "df={df}: tabulated {a_t} vs closed form {a_e}"
            );
        }
    }

    #[test]
    fn correlation_magnitude_decreasing_in_spacing() {
        let pdp = PowerDelayProfile::exponential(1.7e-8).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..100 {
            let df = 1e2 * (k as f64 + 1.0) * 50.0;
            let a = pdp.correlation(df, SpacingConvention::Cyclic).unwrap();
            assert!(a.norm() <= prev + 1e-15, "|a| rose at df={df}");
            prev = a.norm();
        }
    }

    #[test]
    fn conditional_response_limits() {
        let fc = FrequencyCorrelation::new(Complex64::new(1.0, 0.0), 0.5).unwrap();
        let z = Complex64::new(0.3, -0.4);
        let g = fc.conditional_response(z);
        assert_eq!(from_vec(g.mean), z);
        assert_eq!(g.cov, Mat2::ZERO);

        let fc = FrequencyCorrelation::new(Complex64::new(0.0, 0.0), 0.5).unwrap();
        let g = fc.conditional_response(z);
        assert_eq!(g.mean, [0.0, 0.0]);
        assert_eq!(g.cov, Mat2::isotropic(0.5));
    }

    #[test]
    fn conditional_response_matches_joint_conditioning_oracle() {
        // Independent oracle: condition the 4x4 joint pair covariance with
        // the block formula (mean S12 S22^-1 z_prev, cov = Schur
        // complement), then check 1e6 samples of the implementation against
        // those moments.
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let a = Complex64::new(0.62, -0.35);
        let sigma_z_sq = 0.8;
        let fc = FrequencyCorrelation::new(a, sigma_z_sq).unwrap();
        let z_prev = Complex64::new(-0.9, 1.4);

        let joint = fc.joint_pair_covariance();
        let s12 = joint.block2(0, 2);
        let s22 = joint.block2(2, 2);
        let s22_inv = s22.inverse().unwrap();
        let gain = s12.matmul(&s22_inv);
        let mean_o = gain.mul_vec(to_vec(z_prev));
        let cov_o = joint.block2(0, 0).sub(&gain.matmul(&s12.transpose()));

        let n = 1_000_000usize;
        let g = fc.conditional_response(z_prev);
        let (mut s0, mut s1, mut s00, mut s11, mut s01) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let z = g.sample(&mut rng).unwrap();
            s0 += z.re;
            s1 += z.im;
            s00 += z.re * z.re;
            s11 += z.im * z.im;
            s01 += z.re * z.im;
        }
        let nf = n as f64;
        let m = [s0 / nf, s1 / nf];
        let c00 = s00 / nf - m[0] * m[0];
        let c11 = s11 / nf - m[1] * m[1];
        let c01 = s01 / nf - m[0] * m[1];

        let v = cov_o.0[0][0];
        let se_mean = (v / nf).sqrt();
        assert!((m[0] - mean_o[0]).abs() < 3.0 * se_mean, "mean re");
        assert!((m[1] - mean_o[1]).abs() < 3.0 * se_mean, "mean im");
        let se_var = (2.0 * v * v / nf).sqrt();
        assert!((c00 - cov_o.0[0][0]).abs() < 3.0 * se_var, "cov 00");
        assert!((c11 - cov_o.0[1][1]).abs() < 3.0 * se_var, "cov 11");
        assert!((c01 - cov_o.0[0][1]).abs() < 3.0 * (v / nf).sqrt() * 2.0, "cov 01");
    }

    #[test]
    fn conditional_response_preserves_marginal() {
        // stationary chain: z_prev ~ ZMCS(s), z | z_prev conditional =>
        // z ~ ZMCS(s) again
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let fc =
            FrequencyCorrelation::new(Complex64::new(0.7, 0.3), 0.6).unwrap();
        let prior = ZmcsGaussian::new(fc.sigma_z_sq).unwrap();
        let n = 1_000_000usize;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let zp = prior.sample(&mut rng);
            let z = fc.conditional_response(zp).sample(&mut rng).unwrap();
            sum_sq += z.norm_sqr();
        }
        let mean_power = sum_sq / n as f64;
        // |z|^2 ~ Exp(mean 2s): sd 2s
        let se = 2.0 * fc.sigma_z_sq / (n as f64).sqrt();
        assert!(
            (mean_power - 2.0 * fc.sigma_z_sq).abs() < 3.0 * se,
            "power {mean_power}"
        );
    }

    #[test]
    fn joint_pair_covariance_cases() {
        let fc = FrequencyCorrelation::new(Complex64::new(0.0, 0.0), 0.7).unwrap();
        assert_eq!(fc.joint_pair_covariance(), Mat4::isotropic(0.7));

        let fc = FrequencyCorrelation::new(Complex64::new(1.0, 0.0), 0.7).unwrap();
        let ev = fc.joint_pair_covariance().sym_eigenvalues();
        for (got, want) in ev.iter().zip([0.0, 0.0, 1.4, 1.4]) {
            assert!((got - want).abs() < 1e-12, "eigenvalues {ev:?}");
        }

        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..200 {
            let r: f64 = rng.random_range(0.0..0.999);
            let ph: f64 = rng.random_range(0.0..TAU);
            let a = Complex64::from_polar(r, ph);
            let s: f64 = rng.random_range(0.1..3.0);
            let fc = FrequencyCorrelation::new(a, s).unwrap();
            let joint = fc.joint_pair_covariance();
            assert!(joint.is_symmetric(1e-14));
            let ev = joint.sym_eigenvalues();
            assert!(ev[0] > 0.0, "not PD: {ev:?}");
            // Schur complement of the lower-right block reproduces the
            // conditional covariance
            let s12 = joint.block2(0, 2);
            let s22i = joint.block2(2, 2).inverse().unwrap();
            let schur = joint
                .block2(0, 0)
                .sub(&s12.matmul(&s22i).matmul(&s12.transpose()));
            let want = s * (1.0 - a.norm_sqr());
            assert!((schur.0[0][0] - want).abs() < 1e-12 * s);
            assert!((schur.0[1][1] - want).abs() < 1e-12 * s);
            assert!(schur.0[0][1].abs() < 1e-12 * s);
        }
    }

    #[test]
    fn csv_reading() {
        let data = "delay_seconds,density_per_second\n0.0,1.0\n1e-9,0.5\n2e-9,0.25\n";
        let pdp = PowerDelayProfile::from_csv_reader(data.as_bytes()).unwrap();
        assert!((pdp.response_variance() - (0.75e-9 + 0.375e-9)).abs() < 1e-24);

        let no_header = "0.0,1.0\n1e-9,0.5\n";
        assert!(matches!(
            PowerDelayProfile::from_csv_reader(no_header.as_bytes()),
            Err(Error::ProfileCsv { line: 1, .. })
        ));

        let bad_order = "delay,density\n1e-9,0.5\n0.5e-9,1.0\n";
        assert!(PowerDelayProfile::from_csv_reader(bad_order.as_bytes()).is_err());
    }
}
