//! Independent validation path: simulate the actual Gauss-Markov
//! subcarrier channel, run the Bayesian tracker over realised inputs and
//! outputs, and evaluate exact one-shot conditional mutual information by
//! quadrature.
//!
//! The tracker exists to certify the bound engine from outside: its
//! posterior variance must follow the scalar recursion to near machine
//! precision, and the quadrature MI must dominate the per-index bound
//! terms.

use crate::channel::FrequencyCorrelation;
use crate::error::{Error, Result};
use crate::gaussian::{fuse, Gaussian2, Likelihood, ZmcsGaussian};
use crate::mat::Mat2;
use num_complex::Complex64;
use rand::Rng;
use std::io::Write;

/// One simulated block: responses, inputs, noise, outputs, and the tracker
/// state held before observing each index.
#[derive(Debug, Clone)]
pub struct ChannelTrace {
    pub z: Vec<Complex64>,
    pub x: Vec<Complex64>,
    pub noise: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub posterior: Vec<Gaussian2>,
}

/// Simulate the subcarrier chain: `z_0` from the stationary prior, each
/// later response from the conditional given its predecessor, inputs and
/// noise i.i.d. circular Gaussians, `y = z*x + n` elementwise.
pub fn simulate<R: Rng + ?Sized>(
    fc: &FrequencyCorrelation,
    sigma_x_sq: f64,
    sigma_n_sq: f64,
    n: usize,
    rng: &mut R,
) -> Result<ChannelTrace> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "need at least one index".into(),
        });
    }
    let prior = ZmcsGaussian::new(fc.sigma_z_sq)?;
    let innovation = ZmcsGaussian::new(fc.sigma_z_sq * (1.0 - fc.a_sq()))?;
    let input = ZmcsGaussian::new(sigma_x_sq)?;
    let awgn = ZmcsGaussian::new(sigma_n_sq)?;

    let mut z = Vec::with_capacity(n);
    z.push(prior.sample(rng));
    for i in 1..n {
        z.push(fc.a * z[i - 1] + innovation.sample(rng));
    }
    let x: Vec<Complex64> = (0..n).map(|_| input.sample(rng)).collect();
    let noise: Vec<Complex64> = (0..n).map(|_| awgn.sample(rng)).collect();
    let y: Vec<Complex64> = (0..n).map(|i| z[i] * x[i] + noise[i]).collect();

    let posterior = track_xy(&x, &y, fc, sigma_n_sq)?;
    Ok(ChannelTrace {
        z,
        x,
        noise,
        y,
        posterior,
    })
}

/// Bayesian tracker over a realised trace: `posterior[i]` is the
/// distribution of `z_i` given inputs and outputs strictly before `i`.
/// Each step fuses the equivalent observation `(y/x, sigma_n^2/|x|^2)`
/// into the running state and then applies the Gauss-Markov prediction
/// `mean <- a * mean`, `cov <- |a|^2 cov + sigma_z^2 (1 - |a|^2) I`.
/// An exactly zero input carries no information and is skipped.
pub fn track(
    trace: &ChannelTrace,
    fc: &FrequencyCorrelation,
    sigma_n_sq: f64,
) -> Result<Vec<Gaussian2>> {
    track_xy(&trace.x, &trace.y, fc, sigma_n_sq)
}

fn track_xy(
    x: &[Complex64],
    y: &[Complex64],
    fc: &FrequencyCorrelation,
    sigma_n_sq: f64,
) -> Result<Vec<Gaussian2>> {
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    let mut state = Gaussian2::isotropic(Complex64::new(0.0, 0.0), fc.sigma_z_sq);
    out.push(state);
    let a_sq = fc.a_sq();
    let innovation = Mat2::isotropic(fc.sigma_z_sq * (1.0 - a_sq));
    for i in 1..n {
        let xin = x[i - 1];
        let power = xin.norm_sqr();
        let fused = if power == 0.0 {
            state
        } else {
            let measurement = Gaussian2::isotropic(y[i - 1] / xin, sigma_n_sq / power);
            fuse(&state, &Likelihood::Gaussian(measurement))?
        };
        state = Gaussian2 {
            mean: crate::gaussian::to_vec(fc.a * fused.mean_complex()),
            cov: fused.cov.scale(a_sq).add(&innovation),
        };
        out.push(state);
    }
    Ok(out)
}

/// Write a trace as CSV: `index,z_re,z_im,x_re,x_im,y_re,y_im,posterior_var`.
pub fn write_trace_csv<W: Write>(trace: &ChannelTrace, mut w: W) -> std::io::Result<()> {
    writeln!(w, "index,z_re,z_im,x_re,x_im,y_re,y_im,posterior_var")?;
    for i in 0..trace.z.len() {
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            i,
            trace.z[i].re,
            trace.z[i].im,
            trace.x[i].re,
            trace.x[i].im,
            trace.y[i].re,
            trace.y[i].im,
            trace.posterior[i].cov.0[0][0],
        )?;
    }
    Ok(())
}

/// Grid resolution for [`exact_conditional_mi`]. Doubling both axes must
/// move the answer by less than `tol_bits`, otherwise the evaluation
/// reports a precision error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// nodes over the input power |x|^2
    pub input_nodes: usize,
    /// radial nodes over the output magnitude
    pub output_nodes: usize,
    /// input-power span as a multiple of sigma_x^2
    pub input_span: f64,
    pub tol_bits: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            input_nodes: 2000,
            output_nodes: 400,
            input_span: 40.0,
            tol_bits: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub bits: f64,
    /// grid-doubling discrepancy, a discretisation error estimate
    pub err_bits: f64,
}

/// Exact mutual information of the one-shot channel `y = z x + n` with
/// `z ~ CN(mu_hat, 2 sigma_hat^2)` known to the receiver, Gaussian input
/// and noise: `h(y) - h(y|x)` by quadrature.
///
/// The input phase is irrelevant after rotating `mu_hat` onto the real
/// axis, which makes `y` circularly symmetric: its density is a mixture of
/// rings over the input-power grid and the output integral is radial. The
/// conditional entropy term is a 1-D integral of the exact Gaussian
/// entropy over the input power.
pub fn exact_conditional_mi(
    sigma_hat_sq: f64,
    mu_hat: Complex64,
    sigma_x_sq: f64,
    sigma_n_sq: f64,
    spec: &QuadratureSpec,
) -> Result<MiEstimate> {
    for (name, v, strict) in [
        ("sigma_hat_sq", sigma_hat_sq, false),
        ("sigma_x_sq", sigma_x_sq, false),
        ("sigma_n_sq", sigma_n_sq, true),
    ] {
        if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must be finite and {} 0, got {v}", if strict { ">" } else { ">=" }),
            });
        }
    }
    if spec.input_nodes < 8 || spec.output_nodes < 8 {
        return Err(Error::InvalidParameter {
            name: "quadrature nodes",
            reason: "need at least 8 nodes per axis".into(),
        });
    }
    if sigma_x_sq == 0.0 {
        // constant input carries nothing
        return Ok(MiEstimate {
            bits: 0.0,
            err_bits: 0.0,
        });
    }
    let mu = mu_hat.norm();
    let coarse = mi_on_grid(
        sigma_hat_sq,
        mu,
        sigma_x_sq,
        sigma_n_sq,
        spec.input_span,
        spec.input_nodes,
        spec.output_nodes,
    );
    let fine = mi_on_grid(
        sigma_hat_sq,
        mu,
        sigma_x_sq,
        sigma_n_sq,
        spec.input_span,
        2 * spec.input_nodes,
        2 * spec.output_nodes,
    );
    let err = (fine - coarse).abs();
    if err > spec.tol_bits {
        return Err(Error::Precision {
            estimated: err,
            tolerance: spec.tol_bits,
        });
    }
    Ok(MiEstimate {
        bits: fine,
        err_bits: err,
    })
}

fn mi_on_grid(
    sigma_hat_sq: f64,
    mu: f64,
    sigma_x_sq: f64,
    sigma_n_sq: f64,
    span: f64,
    k_in: usize,
    m_out: usize,
) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let two_pi = std::f64::consts::TAU;
    let theta = 2.0 * sigma_x_sq; // mean of |x|^2

    // Input-power cells: log-spaced edges carrying the exact exponential
    // mass of each cell, concentrated at the cell's mass centroid (matches
    // the zeroth and first moments, so the rule is second order in the
    // cell width). The first cell starts at zero; the final cell absorbs
    // the tail beyond the span.
    let t_max = span * sigma_x_sq;
    let t_min = t_max * 1e-8;
    let ratio = (t_max / t_min).powf(1.0 / (k_in - 1) as f64);
    let mut nodes = Vec::with_capacity(k_in + 1);
    let mut weights = Vec::with_capacity(k_in + 1);
    let mut lo = 0.0f64;
    let mut edge = t_min;
    for _ in 0..k_in {
        let hi = edge;
        let d = (hi - lo) / theta;
        let em1 = -(-d).exp_m1(); // 1 - e^-d, stable
        let mass = (-lo / theta).exp() * em1;
        let centroid = (lo + theta) - theta * d * ((-d).exp() / em1);
        nodes.push(centroid);
        weights.push(mass);
        lo = hi;
        edge *= ratio;
    }
    // tail [t_max, inf): mass e^{-t_max/theta}, centroid t_max + theta
    nodes.push(t_max + theta);
    weights.push((-t_max / theta).exp());

    // h(y | x): exact conditional entropy averaged over the input power.
    let mut h_cond = 0.0;
    for (t, w) in nodes.iter().zip(&weights) {
        let v = t * sigma_hat_sq + sigma_n_sq;
        h_cond += w * (two_pi * std::f64::consts::E * v).ln() / ln2;
    }

    // h(y): radial integral of the ring-mixture density, composite Simpson.
    let mut rho_max = 0.0f64;
    let w_floor = 1e-12 / k_in as f64;
    for (t, w) in nodes.iter().zip(&weights) {
        if *w > w_floor {
            let v = t * sigma_hat_sq + sigma_n_sq;
            rho_max = rho_max.max(mu * t.sqrt() + 8.0 * v.sqrt());
        }
    }
    let m_out = m_out + (m_out & 1); // Simpson needs an even interval count
    let h = rho_max / m_out as f64;
    let mut h_out = 0.0;
    for j in 0..=m_out {
        let rho = j as f64 * h;
        let mut p = 0.0f64;
        for (t, w) in nodes.iter().zip(&weights) {
            let v = t * sigma_hat_sq + sigma_n_sq;
            let c = mu * t.sqrt();
            let ln_ring =
                -(rho * rho + c * c) / (2.0 * v) + ln_i0(rho * c / v) - (two_pi * v).ln();
            p += w * ln_ring.exp();
        }
        if p > 0.0 {
            let simpson = if j == 0 || j == m_out {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            h_out -= simpson * (h / 3.0) * two_pi * rho * p * (p.ln() / ln2);
        }
    }

    h_out - h_cond
}

/// ln I0(u) for the ring density: power series up to u = 30, the
/// asymptotic expansion of the scaled Bessel function beyond.
pub(crate) fn ln_i0(u: f64) -> f64 {
    let u = u.abs();
    if u <= 30.0 {
        let q = 0.25 * u * u;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 1..=80u32 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum.ln()
    } else {
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 1..=20u32 {
            let odd = (2 * k - 1) as f64;
            term *= odd * odd / (8.0 * u * k as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        u - 0.5 * (std::f64::consts::TAU * u).ln() + sum.ln()
    }
}
