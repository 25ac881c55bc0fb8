//! Closed-form late-stage estimates next to their Monte Carlo counterparts.

use std::io::Write;

use bacorr_core::theory::{expected_c1, expected_q, late_stage_summary, LateStageSummary};
use bacorr_core::{BaGenerator, CorrelationMode, Rng};
use rayon::prelude::*;

const TRACE_KEY: u64 = 0x0074_7261_6365;

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRow {
    pub n: usize,
    pub m: usize,
    pub expected_c1: f64,
    pub expected_q: f64,
    pub empirical: LateStageSummary,
    pub runs: usize,
}

/// One row per `(n, m)` pair, averaging `runs` independent BA(n, m) graphs.
pub fn theory_table(
    pairs: &[(usize, usize)],
    runs: usize,
    seed: u64,
    late_frac: f64,
) -> bacorr_core::Result<Vec<TheoryRow>> {
    if runs == 0 {
        return Err(bacorr_core::Error::InvalidArgument("runs must be positive"));
    }
    pairs
        .iter()
        .map(|&(n, m)| {
            let (c1, q) = (expected_c1(n, m)?, expected_q(n, m)?);
            // Every trace of a pair has the same length, so averaging the
            // per-run summaries equals pooling the iterations.
            let per_run: Vec<LateStageSummary> = (0..runs)
                .into_par_iter()
                .map(|r| {
                    let mut rng = Rng::new(seed).child(&[TRACE_KEY, n as u64, m as u64, r as u64]);
                    let g = BaGenerator::new(n, m, 1, CorrelationMode::NoCorrelation)?
                        .record_trace(true)
                        .generate(&mut rng)?;
                    late_stage_summary(g.trace.as_ref(), late_frac)
                })
                .collect::<Result<_, _>>()?;
            let k = runs as f64;
            let mut empirical = LateStageSummary {
                iterations: 0,
                mean_c1: 0.0,
                mean_q: 0.0,
                mean_by_draw: vec![0.0; m],
            };
            for s in &per_run {
                empirical.iterations += s.iterations;
                empirical.mean_c1 += s.mean_c1 / k;
                empirical.mean_q += s.mean_q / k;
                for (a, b) in empirical.mean_by_draw.iter_mut().zip(&s.mean_by_draw) {
                    *a += b / k;
                }
            }
            Ok(TheoryRow {
                n,
                m,
                expected_c1: c1,
                expected_q: q,
                empirical,
                runs,
            })
        })
        .collect()
}

pub fn write_table<W: Write>(rows: &[TheoryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "m",
        "u",
        "expected_c1",
        "expected_q",
        "empirical_c1",
        "empirical_q",
        "runs",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            format!("{:.16e}", r.n as f64 / r.m as f64),
            format!("{:.16e}", r.expected_c1),
            format!("{:.16e}", r.expected_q),
            format!("{:.16e}", r.empirical.mean_c1),
            format!("{:.16e}", r.empirical.mean_q),
            r.runs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean `C_i` per draw position, one line per `(n, m, i)`.
pub fn write_per_draw<W: Write>(rows: &[TheoryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "m", "draw", "empirical_c", "expected_c1"])?;
    for r in rows {
        for (i, c) in r.empirical.mean_by_draw.iter().enumerate() {
            w.write_record([
                r.n.to_string(),
                r.m.to_string(),
                (i + 1).to_string(),
                format!("{c:.16e}"),
                format!("{:.16e}", r.expected_c1),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
