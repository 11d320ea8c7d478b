//! `sweep`: the bound across subcarrier counts, plus the per-index curve
//! at the largest point and a gnuplot script for both.

use crate::config::ExperimentConfig;
use crate::report::{fmt_f, timestamp_line, write_file, SCHEMA_VERSION};
use crate::scenario::derive_scenario;
use std::fmt::Write as _;
use std::time::Instant;
use underspread::bound::{estimate_bounds, BoundResult, McConfig, NormalizedParams};

/// Log-spaced subcarrier counts from 10 up to the grid maximum.
fn default_sweep(n_max: usize, points: usize) -> Vec<usize> {
    let lo = 10.0f64.min(n_max as f64);
    let hi = n_max as f64;
    let mut out: Vec<usize> = (0..points)
        .map(|k| {
            let t = k as f64 / (points - 1) as f64;
            (lo * (hi / lo).powf(t)).round().max(1.0) as usize
        })
        .collect();
    out.dedup();
    out
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), String> {
    let sc = derive_scenario(cfg)?;
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| format!("creating {}: {e}", cfg.out.display()))?;
    write_file(&cfg.out, "config_effective.txt", &cfg.render())?;
    for w in &sc.warnings {
        eprintln!("warning: {w}");
    }

    let points = match &cfg.sweep_n {
        Some(list) => {
            let mut list = list.clone();
            list.sort_unstable();
            list.dedup();
            if list.contains(&0) {
                return Err("sweep_n: subcarrier counts must be >= 1".into());
            }
            list
        }
        None => default_sweep(sc.grid.subcarriers, cfg.sweep_points),
    };

    let params: Vec<NormalizedParams> = points
        .iter()
        .map(|&n| {
            NormalizedParams::new(sc.snr_adjusted, sc.a_sq, n, cfg.n_trunc.min(n))
                .map_err(|e| format!("sweep point {n}: {e}"))
        })
        .collect::<Result<_, _>>()?;

    // points run sequentially by default; the parallel mode gives each
    // point a single engine worker, which changes nothing in the output
    // since the estimate is worker-count independent
    let results: Vec<(BoundResult, f64)> = if cfg.parallel_points {
        use rayon::prelude::*;
        let mc = McConfig::new(cfg.trials, cfg.seed, 1).map_err(|e| format!("trials: {e}"))?;
        params
            .par_iter()
            .map(|p| {
                let start = Instant::now();
                let r = estimate_bounds(p, &mc, Some(&sc.grid));
                (r, start.elapsed().as_secs_f64())
            })
            .collect()
    } else {
        let mc =
            McConfig::new(cfg.trials, cfg.seed, cfg.workers).map_err(|e| format!("trials: {e}"))?;
        params
            .iter()
            .map(|p| {
                let start = Instant::now();
                let r = estimate_bounds(p, &mc, Some(&sc.grid));
                (r, start.elapsed().as_secs_f64())
            })
            .collect()
    };

    let mut rows = String::new();
    let mut wall = Vec::new();
    let mut largest: Option<(usize, BoundResult)> = None;
    for (&n, (r, secs)) in points.iter().zip(results) {
        wall.push(secs);
        let _ = writeln!(
            rows,
            "{SCHEMA_VERSION},{n},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f(r.l1),
            fmt_f(r.l1_se),
            fmt_f(r.l2),
            fmt_f(r.l2_se),
            fmt_f(r.l1a),
            fmt_f(r.l1a_se),
            fmt_f(r.l2a),
            fmt_f(r.l2a_se),
            fmt_f(r.l2b),
            fmt_f(r.c_csi),
            fmt_f(r.fraction_of_csi),
        );
        println!(
            "sweep: n={n} l2b={:.6e} fraction={:.6} ({secs:.2}s)",
            r.l2b, r.fraction_of_csi
        );
        if largest.as_ref().is_none_or(|(m, _)| n > *m) {
            largest = Some((n, r));
        }
    }

    let wall_list: Vec<String> = wall.iter().map(|w| format!("{w:.3}")).collect();
    let mut csv = timestamp_line(&format!("wall_s={}", wall_list.join(",")));
    csv.push_str(
        "schema_version,n,l1,l1_se,l2,l2_se,l1a,l1a_se,l2a,l2a_se,l2b,c_csi,fraction_of_csi\n",
    );
    csv.push_str(&rows);
    write_file(&cfg.out, "sweep.csv", &csv)?;

    let (n_big, r_big) = largest.expect("at least one sweep point");
    let mut per = timestamp_line("");
    per.push_str("schema_version,index,info_mean,info_se,info_clamped_mean,info_clamped_se\n");
    for (i, (a, b)) in r_big
        .per_index
        .iter()
        .zip(&r_big.per_index_clamped)
        .enumerate()
    {
        let _ = writeln!(
            per,
            "{SCHEMA_VERSION},{i},{},{},{},{}",
            fmt_f(a.mean),
            fmt_f(a.se),
            fmt_f(b.mean),
            fmt_f(b.se)
        );
    }
    write_file(&cfg.out, "per_index.csv", &per)?;

    let plot = format!(
        "# gnuplot script for the sweep outputs\n\
         set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set terminal pngcairo size 1100,450\n\
         set output 'bound_sweep.png'\n\
         set multiplot layout 1,2\n\
         set logscale x\n\
         set xlabel 'subcarriers N'\n\
         set ylabel 'bit s^-1 Hz^-1'\n\
         plot 'sweep.csv' skip 2 using 2:11 with linespoints title 'rate bound', \\\n\
              'sweep.csv' skip 2 using 2:12 with lines title 'coherent capacity'\n\
         set ylabel 'fraction of coherent capacity'\n\
         plot 'sweep.csv' skip 2 using 2:13 with linespoints title 'fraction'\n\
         unset multiplot\n\
         set output 'per_index.png'\n\
         set terminal pngcairo size 700,450\n\
         unset logscale x\n\
         set xlabel 'subcarrier index i (N={n_big})'\n\
         set ylabel 'per-index term, bits'\n\
         plot 'per_index.csv' skip 2 using 2:5 with lines title 'clamped mean'\n"
    );
    write_file(&cfg.out, "plot.gp", &plot)?;
    Ok(())
}
