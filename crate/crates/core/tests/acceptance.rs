//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them all).
//!
//! The reference scenario throughout is the summary-parameter set used by
//! the golden tests: an exponential profile with a 17.2 ns time constant,
//! 5 MHz of bandwidth, a 5.30 ms block, a 200 ns cyclic prefix, raw SNR
//! 0.018 and a 0.99 coherence energy fraction.

use std::sync::OnceLock;
use std::time::Instant;

use underspread::block::{adjust_snr, derive_grid, truncation_energy, OfdmConfig};
use underspread::bound::{
    estimate_bounds, normalized_from_physical, perfect_csi_capacity, perfect_csi_capacity_mc,
    stationary_variance, BoundResult, McConfig, NormalizedParams,
};
use underspread::channel::{PowerDelayProfile, SpacingConvention};
use underspread::checks;
use underspread::oracle::QuadratureSpec;

const TAU_C: f64 = 17.2e-9;
const BANDWIDTH: f64 = 5e6;
const SNR_RAW: f64 = 0.018;
const BLOCK_LEN: f64 = 5.30e-3;
const PREFIX_LEN: f64 = 2e-7;
const ETA: f64 = 0.99;

const SNR_NORM: f64 = 0.0178;
const A_SQ: f64 = 1.0 - 1.03e-11;
const N_FULL: usize = 26_500;
const N_TRUNC: usize = 2_000;
const TRIALS: u64 = 10_000;
const SEED: u64 = 7;

fn report(name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn table1_ofdm() -> OfdmConfig {
    derive_grid(BANDWIDTH, BLOCK_LEN, PREFIX_LEN).expect("reference grid")
}

/// The big reference run, shared by the headline and monotonicity
/// criteria.
fn table1_run() -> &'static BoundResult {
    static RUN: OnceLock<BoundResult> = OnceLock::new();
    RUN.get_or_init(|| {
        let p = NormalizedParams::new(SNR_NORM, A_SQ, N_FULL, N_TRUNC).expect("params");
        let mc = McConfig::new(TRIALS, SEED, 0).expect("mc");
        estimate_bounds(&p, &mc, Some(&table1_ofdm()))
    })
}

#[test]
fn table1_reproduction() {
    let start = Instant::now();

    let grid = table1_ofdm();
    let pdp = PowerDelayProfile::exponential(TAU_C).expect("profile");
    let (truncated, retained) = pdp.truncate(PREFIX_LEN).expect("truncate");
    let e_trunc = 1.0 - retained;
    let e_trunc_closed = truncation_energy(TAU_C, PREFIX_LEN);
    let snr_adj = adjust_snr(SNR_RAW, ETA, e_trunc_closed);
    let a = truncated
        .correlation(grid.spacing, SpacingConvention::PaperTable)
        .expect("correlation");
    let decorrelation = 1.0 - a.norm_sqr();

    let n_ok = grid.subcarriers == 26_500;
    let spacing_ok = ((grid.spacing - 1.89e2) / 1.89e2).abs() <= 5e-3;
    let snr_ok = ((snr_adj - 1.78e-2) / 1.78e-2).abs() <= 5e-3;
    let dec_ok = ((decorrelation - 1.03e-11) / 1.03e-11).abs() <= 5e-2;
    let et_ok = ((e_trunc_closed - 8.91e-6) / 8.91e-6).abs() <= 1e-2
        && (e_trunc - e_trunc_closed).abs() < 1e-12;
    let elapsed = start.elapsed().as_secs_f64();
    let time_ok = elapsed < 1.0;

    let pass = n_ok && spacing_ok && snr_ok && dec_ok && et_ok && time_ok;
    report(
        "table1_reproduction",
        pass,
        &format!(
            "N={} df={:.4e} SNR'={:.4e} 1-|a|^2={:.3e} E_trunc={:.3e} in {elapsed:.2}s",
            grid.subcarriers, grid.spacing, snr_adj, decorrelation, e_trunc_closed
        ),
    );
    assert!(n_ok, "N = {}", grid.subcarriers);
    assert!(spacing_ok, "spacing = {}", grid.spacing);
    assert!(snr_ok, "adjusted snr = {snr_adj}");
    assert!(dec_ok, "1-|a|^2 = {decorrelation:e}");
    assert!(et_ok, "E_trunc = {e_trunc_closed:e}");
    assert!(time_ok, "took {elapsed}s");
}

#[test]
fn perfect_csi_reference() {
    let start = Instant::now();

    let c = perfect_csi_capacity(0.0180);
    let rate = c * BANDWIDTH;
    let rate_ok = (245e3..=255e3).contains(&rate);

    let (mc, se) = perfect_csi_capacity_mc(0.0180, 10_000_000, SEED);
    let mc_ok = (mc - c).abs() <= 4.0 * se;
    let elapsed = start.elapsed().as_secs_f64();
    let time_ok = elapsed < 10.0;

    let pass = rate_ok && mc_ok && time_ok;
    report(
        "perfect_csi_reference",
        pass,
        &format!(
            "C={c:.6} bit/s/Hz rate={:.1} kbit/s mc={mc:.6}+-{se:.2e} in {elapsed:.2}s",
            rate / 1e3
        ),
    );
    assert!(rate_ok, "rate {rate}");
    assert!(mc_ok, "closed form {c} vs mc {mc} (se {se})");
    assert!(time_ok, "took {elapsed}s");
}

/// The stationary (fully converged) per-subcarrier rate fraction: the
/// level the bound saturates at as the block grows without bound.
fn saturation_fraction() -> f64 {
    let u = stationary_variance(SNR_NORM, A_SQ);
    let level = perfect_csi_capacity(SNR_NORM * (1.0 - u)) - perfect_csi_capacity(SNR_NORM * u);
    level * table1_ofdm().cp_multiplier() / perfect_csi_capacity(SNR_NORM)
}

#[test]
fn headline_bound() {
    let start = Instant::now();
    let r = table1_run();
    let elapsed = start.elapsed().as_secs_f64();

    let cp = table1_ofdm().cp_multiplier();
    let ratio = r.fraction_of_csi;
    let ratio_se = r.l2_se * cp / r.c_csi;
    let floor_ok = ratio >= 0.999;
    let target_ok = (0.9999 - ratio).abs() <= 3.0 * ratio_se;
    let saturation = saturation_fraction();

    let pass = floor_ok && target_ok;
    report(
        "headline_bound",
        pass,
        &format!(
            "L2B/C={ratio:.6}+-{ratio_se:.1e} (L2={:.6e}, C={:.6e}, \
             stationary per-index level {saturation:.6}) in {elapsed:.1}s",
            r.l2, r.c_csi
        ),
    );
    assert!(
        pass,
        "block-average bound over N={N_FULL} reaches {ratio:.6} of the coherent \
         capacity ({:.4} deficit, standard error {ratio_se:.1e}); the 0.999 floor and \
         the 0.9999 +- 3se target are set by the *stationary* per-subcarrier level, \
         which this engine puts at {saturation:.6} -- the tracker still carries \
         sigma'^2 ~ {:.2e} at the final subcarrier (stationary value {:.2e}), so the \
         learning transient dominates the block average at this N; the saturation \
         level is only approached for N beyond ~1e7",
        1.0 - ratio,
        1.0 / (1.0 + 2.0 * SNR_NORM * N_FULL as f64),
        stationary_variance(SNR_NORM, A_SQ),
    );
}

#[test]
fn tracker_equivalence_oracle() {
    let start = Instant::now();
    // 12 traces per (decorrelation, snr) combination: 108 traces of
    // length 1000
    let out = checks::tracker_equivalence(12, 1000, SEED, 1.0);
    let elapsed = start.elapsed().as_secs_f64();
    let time_ok = elapsed < 30.0;
    let pass = out.pass && time_ok;
    report(
        "tracker_equivalence",
        pass,
        &format!(
            "max relative deviation {:.2e} (tolerance {:.0e}) in {elapsed:.2}s",
            out.measured, out.tolerance
        ),
    );
    assert!(out.pass, "deviation {:e}", out.measured);
    assert!(time_ok, "took {elapsed}s");
}

#[test]
fn monotonicity() {
    let r = table1_run();
    // Per-index means over geometric bins: each comparison then carries
    // real signal instead of pure Monte Carlo noise, and a per-index guard
    // at a multiplicity-corrected threshold catches gross violations.
    let mut edges = vec![0usize, 1, 2];
    while *edges.last().unwrap() < N_FULL {
        let next = (edges.last().unwrap() * 2).min(N_FULL);
        edges.push(next);
    }
    let mut pass = true;
    let mut detail = String::new();
    let mut prev_mean = f64::NEG_INFINITY;
    let mut prev_se = 0.0f64;
    for w in edges.windows(2) {
        let span = &r.per_index_clamped[w[0]..w[1]];
        let mean = span.iter().map(|s| s.mean).sum::<f64>() / span.len() as f64;
        let se = span.iter().map(|s| s.se * s.se).sum::<f64>().sqrt() / span.len() as f64;
        let slack = 3.0 * (se * se + prev_se * prev_se).sqrt();
        if mean < prev_mean - slack {
            pass = false;
            detail = format!(
                "bin {}..{} mean {mean:.6e} fell below {prev_mean:.6e} - {slack:.1e}",
                w[0], w[1]
            );
        }
        prev_mean = mean;
        prev_se = se;
    }
    // per-index guard: ~26.5k comparisons, so hold each to 6 sigma
    let mut guard_worst = 0.0f64;
    for w in r.per_index_clamped.windows(2) {
        let slack = 6.0 * (w[0].se * w[0].se + w[1].se * w[1].se).sqrt();
        let drop = w[0].mean - w[1].mean;
        if drop > slack {
            pass = false;
            guard_worst = guard_worst.max(drop / slack);
        }
    }
    report(
        "monotonicity",
        pass,
        &format!(
            "geometric-bin means non-decreasing over {} bins at 3 combined se; \
             per-index guard at 6 se clean{}",
            edges.len() - 1,
            if detail.is_empty() {
                String::new()
            } else {
                format!("; {detail}")
            }
        ),
    );
    assert!(pass, "{detail} (guard worst {guard_worst})");
}

#[test]
fn scale_invariance() {
    let out = checks::scale_invariance(SEED);
    // the two-decimal noise variance 112.36 collapses only approximately;
    // the full-precision value 2/0.0178 collapses exactly
    let a_sq = A_SQ;
    let mc = McConfig::new(192, SEED, 2).expect("mc");
    let exact = estimate_bounds(
        &normalized_from_physical(1.0, 0.0178, 1.0, a_sq, 500, 200).expect("params"),
        &mc,
        None,
    );
    let literal = estimate_bounds(
        &normalized_from_physical(2.0, 1.0, 112.36, a_sq, 500, 200).expect("params"),
        &mc,
        None,
    );
    let literal_rel = ((literal.l2 - exact.l2) / exact.l2).abs();
    let literal_ok = literal_rel < 1e-4;

    let pass = out.pass && literal_ok;
    report(
        "scale_invariance",
        pass,
        &format!(
            "{} mismatches across exact-ratio triples; two-decimal noise variance \
             deviates {literal_rel:.1e} in L2",
            out.measured
        ),
    );
    assert!(out.pass, "{} mismatching results", out.measured);
    assert!(literal_ok, "literal triple deviates {literal_rel:e}");
}

#[test]
fn mi_dominance() {
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let [margin, grid] = checks::mi_dominance(20, SEED, &spec);
    let elapsed = start.elapsed().as_secs_f64();
    let time_ok = elapsed < 300.0;
    let pass = margin.pass && grid.pass && time_ok;
    report(
        "mi_dominance",
        pass,
        &format!(
            "worst margin {:.2e} bits (<= 0), grid-doubling {:.2e} bits (< {:.0e}) \
             over 20 states in {elapsed:.1}s",
            margin.measured, grid.measured, grid.tolerance
        ),
    );
    assert!(margin.pass, "margin {:e} bits", margin.measured);
    assert!(grid.pass, "grid err {:e} bits", grid.measured);
    assert!(time_ok, "took {elapsed}s");
}

#[test]
fn matrix_identity_predicates() {
    let start = Instant::now();
    let outs = checks::matrix_identity_predicates(10_000, SEED);
    let elapsed = start.elapsed().as_secs_f64();
    let time_ok = elapsed < 5.0;
    let pass = outs.iter().all(|o| o.pass) && time_ok;
    report(
        "matrix_identity_predicates",
        pass,
        &format!(
            "violations: {} / {} / {} over 10^4 instances each in {elapsed:.2}s",
            outs[0].measured, outs[1].measured, outs[2].measured
        ),
    );
    for o in outs {
        assert!(o.pass, "{}: {} violations", o.name, o.measured);
    }
    assert!(time_ok, "took {elapsed}s");
}

#[test]
fn channel_statistics() {
    let out = checks::channel_lag1(1_000_000, SEED);
    report(
        "channel_statistics",
        out.pass,
        &format!(
            "worst lag-1 moment deviation {:.2} se (tolerance 3) over 5 coefficients",
            out.measured
        ),
    );
    assert!(out.pass, "worst deviation {} se", out.measured);
}

#[test]
fn sweep_shape() {
    // fraction of the coherent capacity rises steeply with the subcarrier
    // count and saturates; the saturation level itself meets the headline
    // figures
    let mc = McConfig::new(2_000, SEED, 0).expect("mc");
    let mut fractions = Vec::new();
    let mut ses = Vec::new();
    for &n in &[10usize, 100, 1_000, 10_000] {
        let p = NormalizedParams::new(SNR_NORM, A_SQ, n, n).expect("params");
        let r = estimate_bounds(&p, &mc, Some(&table1_ofdm()));
        ses.push(r.l2_se * table1_ofdm().cp_multiplier() / r.c_csi);
        fractions.push(r.fraction_of_csi);
    }
    let mut rising = true;
    for i in 1..fractions.len() {
        let slack = 3.0 * (ses[i] * ses[i] + ses[i - 1] * ses[i - 1]).sqrt();
        if fractions[i] < fractions[i - 1] - slack {
            rising = false;
        }
    }
    let steep = fractions[0] < 0.3 && fractions[3] > 0.9;
    let saturation = saturation_fraction();
    let sat_ok = saturation >= 0.999 && (saturation - 0.9999).abs() < 1e-4;

    let pass = rising && steep && sat_ok;
    report(
        "sweep_shape",
        pass,
        &format!(
            "fractions {:?} rising; saturation level {saturation:.6}",
            fractions
                .iter()
                .map(|f| (f * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        ),
    );
    assert!(rising, "fractions {fractions:?}");
    assert!(steep, "fractions {fractions:?}");
    assert!(sat_ok, "saturation {saturation}");
}
