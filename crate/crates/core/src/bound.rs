//! The variance recursion and the Monte Carlo capacity lower bounds.
//!
//! Everything runs in normalised units: the response, input and noise
//! variances collapse into a single SNR knob, the state variance starts at
//! one, and the per-subcarrier information terms are
//!
//! ```text
//! I_i  = E log2( (snr |mu_i|^2 + 1) / (snr |x_i|^2 s_i + 1) )
//! I'_i = E max(I_i sample, 0)
//! s_i  = (1 - a^2) + a^2 (1/s_{i-1} + snr |x_{i-1}|^2)^-1,   s_0 = 1
//! ```
//!
//! with `|x|^2` exponential of mean 2 and `|mu_i|^2` exponential of mean
//! `2 (1 - s_i)`. The block bounds are averages of these over the
//! subcarrier index; truncated variants stop at an index and extend its
//! last term, which stays a lower bound because the terms are
//! non-decreasing.

use crate::block::OfdmConfig;
use crate::error::{Error, Result};
use crate::expint::exp_e1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Trials per deterministic reduction chunk. Fixed so that results do not
/// depend on the worker count.
const CHUNK_TRIALS: u64 = 32;

/// Normalised engine inputs. `snr` is the product ratio
/// `sigma_z^2 sigma_x^2 / sigma_n^2`; nothing else about the physical
/// variances survives normalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedParams {
    pub snr: f64,
    pub a_sq: f64,
    pub n: usize,
    pub n_trunc: usize,
}

impl NormalizedParams {
    pub fn new(snr: f64, a_sq: f64, n: usize, n_trunc: usize) -> Result<Self> {
        if !(snr.is_finite() && snr >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "snr",
                reason: format!("must be finite and >= 0, got {snr}"),
            });
        }
        if !(0.0..=1.0).contains(&a_sq) {
            return Err(Error::InvalidParameter {
                name: "a_sq",
                reason: format!("must be in [0, 1], got {a_sq}"),
            });
        }
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "need at least one subcarrier".into(),
            });
        }
        if n_trunc == 0 || n_trunc > n {
            return Err(Error::InvalidParameter {
                name: "n_trunc",
                reason: format!("must be in [1, {n}], got {n_trunc}"),
            });
        }
        Ok(Self {
            snr,
            a_sq,
            n,
            n_trunc,
        })
    }
}

/// Collapse physical variances to the normalised knob. Any triple with the
/// same product ratio gives a bit-identical run at the same seed.
pub fn normalized_from_physical(
    sigma_z_sq: f64,
    sigma_x_sq: f64,
    sigma_n_sq: f64,
    a_sq: f64,
    n: usize,
    n_trunc: usize,
) -> Result<NormalizedParams> {
    if !(sigma_n_sq.is_finite() && sigma_n_sq > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma_n_sq",
            reason: format!("must be finite and > 0, got {sigma_n_sq}"),
        });
    }
    NormalizedParams::new(sigma_z_sq * sigma_x_sq / sigma_n_sq, a_sq, n, n_trunc)
}

/// Monte Carlo budget. Results are bit-identical for a fixed
/// `(trials, master_seed)` whatever `workers` is; `workers = 0` picks the
/// host parallelism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(trials: u64, master_seed: u64, workers: usize) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParameter {
                name: "trials",
                reason: "need at least one trial".into(),
            });
        }
        Ok(Self {
            trials,
            master_seed,
            workers,
        })
    }
}

/// Counter-based per-trial stream: one keyed cipher, the trial index as
/// the stream id.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// One step of the normalised variance recursion. A zero previous variance
/// is taken as its limit (the inner term vanishes).
pub fn recursion_step(sigma_prev_sq: f64, x_norm_sq: f64, a_sq: f64, snr: f64) -> f64 {
    let inner = if sigma_prev_sq <= 0.0 {
        0.0
    } else {
        1.0 / (1.0 / sigma_prev_sq + snr * x_norm_sq)
    };
    (1.0 - a_sq) + a_sq * inner
}

/// Fixed point of the recursion under mean input loading (`|x|^2 = 2`):
/// the variance the tracker settles at once the transient has died, i.e.
/// the positive root of `2 snr u^2 + u (1-a^2)(1-2 snr) - (1-a^2) = 0`.
pub fn stationary_variance(snr: f64, a_sq: f64) -> f64 {
    let leak = 1.0 - a_sq;
    if snr <= 0.0 {
        return 1.0;
    }
    if leak <= 0.0 {
        return 0.0;
    }
    let b = leak * (1.0 - 2.0 * snr);
    let disc = (b * b + 8.0 * snr * leak).sqrt();
    ((disc - b) / (4.0 * snr)).min(1.0)
}

/// Per-index sample pair from one Monte Carlo path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    /// log2 ratio sample, may be negative.
    pub info: f64,
    /// the same sample clamped at zero.
    pub info_clamped: f64,
}

#[inline]
fn std_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

/// Walk one path, handing `(index, info_sample, clamped_sample)` to the
/// sink. The same input draw feeds the index's denominator and the
/// recursion to the next state; the estimate offset is drawn fresh from
/// its marginal at the current state.
fn walk_path<R, F>(p: &NormalizedParams, rng: &mut R, mut sink: F)
where
    R: Rng + ?Sized,
    F: FnMut(usize, f64, f64),
{
    let mut sigma_sq = 1.0f64;
    for i in 0..p.n {
        let x_sq = 2.0 * std_exp(rng);
        let mu_sq = 2.0 * (1.0 - sigma_sq) * std_exp(rng);
        let s = ((p.snr * mu_sq + 1.0) / (p.snr * x_sq * sigma_sq + 1.0)).log2();
        sink(i, s, s.max(0.0));
        sigma_sq = recursion_step(sigma_sq, x_sq, p.a_sq, p.snr);
        debug_assert!(
            sigma_sq > 0.0 && sigma_sq <= 1.0,
            "state variance left (0, 1]: {sigma_sq}"
        );
    }
}

/// Per-index samples for one Monte Carlo path.
pub fn sample_path_terms<R: Rng + ?Sized>(p: &NormalizedParams, rng: &mut R) -> Vec<PathSample> {
    let mut out = Vec::with_capacity(p.n);
    walk_path(p, rng, |_, info, info_clamped| {
        out.push(PathSample { info, info_clamped })
    });
    out
}

/// Mean and standard error of one per-index term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexStat {
    pub mean: f64,
    pub se: f64,
}

/// Bound estimates for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    /// Per-index unclamped terms.
    pub per_index: Vec<IndexStat>,
    /// Per-index clamped terms.
    pub per_index_clamped: Vec<IndexStat>,
    /// Block average of the unclamped terms.
    pub l1: f64,
    pub l1_se: f64,
    /// Block average of the clamped terms (never below `l1`).
    pub l2: f64,
    pub l2_se: f64,
    /// Truncated-sum variants: indices up to `n_trunc`, the last one
    /// extended over the remainder.
    pub l1a: f64,
    pub l1a_se: f64,
    pub l2a: f64,
    pub l2a_se: f64,
    /// `l2` after the cyclic-prefix penalty (equal to `l2` when no OFDM
    /// grid is attached).
    pub l2b: f64,
    /// Coherent-receiver reference capacity at the same snr.
    pub c_csi: f64,
    /// `l2b / c_csi` (zero when the reference is zero).
    pub fraction_of_csi: f64,
}

#[derive(Clone, Copy, Default)]
struct TrialStat {
    l1: f64,
    l2: f64,
    l1a: f64,
    l2a: f64,
}

struct ChunkAcc {
    info_sum: Vec<f64>,
    info_sumsq: Vec<f64>,
    clamped_sum: Vec<f64>,
    clamped_sumsq: Vec<f64>,
    trials: Vec<TrialStat>,
}

impl ChunkAcc {
    fn new(n: usize) -> Self {
        Self {
            info_sum: vec![0.0; n],
            info_sumsq: vec![0.0; n],
            clamped_sum: vec![0.0; n],
            clamped_sumsq: vec![0.0; n],
            trials: Vec::new(),
        }
    }

    fn absorb(&mut self, other: &ChunkAcc) {
        for i in 0..self.info_sum.len() {
            self.info_sum[i] += other.info_sum[i];
            self.info_sumsq[i] += other.info_sumsq[i];
            self.clamped_sum[i] += other.clamped_sum[i];
            self.clamped_sumsq[i] += other.clamped_sumsq[i];
        }
        self.trials.extend_from_slice(&other.trials);
    }
}

fn run_chunk(p: &NormalizedParams, master_seed: u64, chunk: u64, trials: u64) -> ChunkAcc {
    let mut acc = ChunkAcc::new(p.n);
    let lo = chunk * CHUNK_TRIALS;
    let hi = (lo + CHUNK_TRIALS).min(trials);
    let nf = p.n as f64;
    let rest = (p.n - p.n_trunc) as f64;
    for trial in lo..hi {
        let mut rng = trial_rng(master_seed, trial);
        let mut sum = 0.0f64;
        let mut sum_c = 0.0f64;
        let mut trunc_sum = 0.0f64;
        let mut trunc_sum_c = 0.0f64;
        let mut last = 0.0f64;
        let mut last_c = 0.0f64;
        walk_path(p, &mut rng, |i, s, sc| {
            acc.info_sum[i] += s;
            acc.info_sumsq[i] += s * s;
            acc.clamped_sum[i] += sc;
            acc.clamped_sumsq[i] += sc * sc;
            sum += s;
            sum_c += sc;
            if i < p.n_trunc {
                trunc_sum += s;
                trunc_sum_c += sc;
                if i + 1 == p.n_trunc {
                    last = s;
                    last_c = sc;
                }
            }
        });
        acc.trials.push(TrialStat {
            l1: sum / nf,
            l2: sum_c / nf,
            l1a: (trunc_sum + rest * last) / nf,
            l2a: (trunc_sum_c + rest * last_c) / nf,
        });
    }
    acc
}

fn mean_se(values: impl Iterator<Item = f64> + Clone, count: u64) -> (f64, f64) {
    let nf = count as f64;
    let mean = values.clone().sum::<f64>() / nf;
    if count < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    (mean, (var / nf).sqrt())
}

/// Run the Monte Carlo estimate. Trials use counter-based streams and are
/// reduced chunkwise in a fixed order, so the result is bit-identical for
/// any worker count. Attaching an [`OfdmConfig`] applies the cyclic-prefix
/// penalty to the clamped bound.
pub fn estimate_bounds(
    p: &NormalizedParams,
    mc: &McConfig,
    ofdm: Option<&OfdmConfig>,
) -> BoundResult {
    let n_chunks = mc.trials.div_ceil(CHUNK_TRIALS);
    let mut global = ChunkAcc::new(p.n);

    let workers = if mc.workers == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        mc.workers
    };

    if workers <= 1 || n_chunks == 1 {
        for chunk in 0..n_chunks {
            let acc = run_chunk(p, mc.master_seed, chunk, mc.trials);
            global.absorb(&acc);
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        let chunk_ids: Vec<u64> = (0..n_chunks).collect();
        // Waves of at most `workers` chunks bound the transient memory;
        // folding in chunk order keeps the reduction deterministic.
        for wave in chunk_ids.chunks(workers) {
            let results: Vec<ChunkAcc> = pool.install(|| {
                use rayon::prelude::*;
                wave.par_iter()
                    .map(|&chunk| run_chunk(p, mc.master_seed, chunk, mc.trials))
                    .collect()
            });
            for acc in &results {
                global.absorb(acc);
            }
        }
    }

    let t = mc.trials;
    let tf = t as f64;
    let stat = |sum: f64, sumsq: f64| -> IndexStat {
        let mean = sum / tf;
        let se = if t < 2 {
            0.0
        } else {
            (((sumsq - tf * mean * mean).max(0.0) / (tf - 1.0)) / tf).sqrt()
        };
        IndexStat { mean, se }
    };
    let per_index: Vec<IndexStat> = (0..p.n)
        .map(|i| stat(global.info_sum[i], global.info_sumsq[i]))
        .collect();
    let per_index_clamped: Vec<IndexStat> = (0..p.n)
        .map(|i| stat(global.clamped_sum[i], global.clamped_sumsq[i]))
        .collect();

    let (l1, l1_se) = mean_se(global.trials.iter().map(|s| s.l1), t);
    let (l2, l2_se) = mean_se(global.trials.iter().map(|s| s.l2), t);
    let (l1a, l1a_se) = mean_se(global.trials.iter().map(|s| s.l1a), t);
    let (l2a, l2a_se) = mean_se(global.trials.iter().map(|s| s.l2a), t);

    let l2b = match ofdm {
        Some(cfg) => l2 * cfg.cp_multiplier(),
        None => l2,
    };
    let c_csi = perfect_csi_capacity(p.snr);
    let fraction_of_csi = if c_csi > 0.0 { l2b / c_csi } else { 0.0 };

    BoundResult {
        per_index,
        per_index_clamped,
        l1,
        l1_se,
        l2,
        l2_se,
        l1a,
        l1a_se,
        l2a,
        l2a_se,
        l2b,
        c_csi,
        fraction_of_csi,
    }
}

/// Coherent-receiver reference: `E log2(1 + |z|^2 snr)` with `|z|^2`
/// exponential of mean 2, i.e. `exp_e1(1/(2 snr)) / ln 2` in closed form.
pub fn perfect_csi_capacity(snr: f64) -> f64 {
    if snr <= 0.0 {
        return 0.0;
    }
    exp_e1(1.0 / (2.0 * snr)) / std::f64::consts::LN_2
}

/// Monte Carlo cross-check of [`perfect_csi_capacity`]; returns
/// `(mean, standard error)`.
pub fn perfect_csi_capacity_mc(snr: f64, trials: u64, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..trials {
        let v = (1.0 + snr * 2.0 * std_exp(&mut rng)).log2();
        sum += v;
        sumsq += v * v;
    }
    let nf = trials as f64;
    let mean = sum / nf;
    let se = (((sumsq - nf * mean * mean).max(0.0) / (nf - 1.0)) / nf).sqrt();
    (mean, se)
}
