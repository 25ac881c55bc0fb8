//! Replicate execution and aggregation over every (model, density,
//! correlation mode, size) combination of a config.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use bacorr_core::generator::Generated;
use bacorr_core::gnn::init_params;
use bacorr_core::randkit::derive_seed;
use bacorr_core::{classify_forward, BaGenerator, CorrelationMode, GnnParams, ModelKind, Rng};
use rayon::prelude::*;

use crate::config::{ConfigError, Density, ExperimentConfig};
use crate::dump;
use crate::results::{SweepResult, SweepRow};

pub const CLASSES: usize = 3;
/// Extra attempts, on fresh derived streams, after a failed generation.
pub const MAX_RETRIES: u64 = 3;
/// Largest tolerated share of failed replicates per case and size.
pub const MAX_FAILED_SHARE: f64 = 0.1;

const PARAMS_KEY: u64 = 0x7061_7261_6d73;
const GRAPH_KEY: u64 = 0x0067_7261_7068;

/// One panel of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Case {
    pub model: ModelKind,
    pub density: Density,
    pub mode: CorrelationMode,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.model, self.density, self.mode)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{case} at n={n}: {failed} of {replicates} replicates failed after retries")]
    CaseFailed {
        case: Case,
        n: usize,
        failed: usize,
        replicates: usize,
    },
    #[error("generation failed for {density}/{mode} n={n} replicate {replicate}: {message}")]
    Generation {
        density: Density,
        mode: CorrelationMode,
        n: usize,
        replicate: usize,
        message: String,
    },
    #[error("model evaluation failed: {0}")]
    Model(bacorr_core::Error),
    #[error("cannot dump graph: {0}")]
    Dump(#[from] std::io::Error),
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// A generation attempt that was rejected and retried.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateFailure {
    pub density: Density,
    pub mode: CorrelationMode,
    pub n: usize,
    pub replicate: usize,
    pub attempt: u64,
    pub message: String,
}

#[derive(Default)]
pub struct SweepOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Directory receiving one dump per generated graph.
    pub dump_graphs: Option<PathBuf>,
    /// Called with (finished, total) graph counts.
    pub progress: Option<Box<dyn Fn(usize, usize) + Send + Sync>>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub result: SweepResult,
    /// Every rejected attempt, including ones whose retry succeeded.
    pub failures: Vec<ReplicateFailure>,
}

fn density_code(d: Density) -> u64 {
    match d {
        Density::Sparse => 0,
        Density::Dense => 1,
    }
}

fn mode_code(m: CorrelationMode) -> u64 {
    match m {
        CorrelationMode::NoCorrelation => 0,
        CorrelationMode::Simple => 1,
        CorrelationMode::Rescaled => 2,
    }
}

fn model_code(k: ModelKind) -> u64 {
    match k {
        ModelKind::Gat => 0,
        ModelKind::Gcn => 1,
    }
}

/// The one parameterisation of `kind` used for every size, density, mode
/// and replicate under `seed`.
pub fn model_params(kind: ModelKind, d: usize, seed: u64) -> bacorr_core::Result<GnnParams> {
    init_params(
        kind,
        d,
        CLASSES,
        derive_seed(seed, &[PARAMS_KEY, model_code(kind)]),
    )
}

/// Graph stream for one attempt. The model is not part of the key, so every
/// model sees the same graphs.
fn graph_rng(
    cfg: &ExperimentConfig,
    density: Density,
    mode: CorrelationMode,
    n: usize,
    replicate: usize,
    attempt: u64,
) -> Rng {
    Rng::new(cfg.seed).child(&[
        GRAPH_KEY,
        density_code(density),
        mode_code(mode),
        n as u64,
        replicate as u64,
        attempt,
    ])
}

/// Generates replicate `replicate`, retrying on fresh streams. Returns the
/// graph (if any attempt succeeded) and the rejected attempts.
pub fn generate_replicate(
    cfg: &ExperimentConfig,
    density: Density,
    mode: CorrelationMode,
    n: usize,
    replicate: usize,
) -> (Option<Generated>, Vec<ReplicateFailure>) {
    let mut failures = Vec::new();
    let generator = match BaGenerator::new(n, cfg.attachment(density, n), cfg.d, mode) {
        Ok(g) => g.rho_renormalize(cfg.rho_renormalize),
        Err(e) => {
            failures.push(ReplicateFailure {
                density,
                mode,
                n,
                replicate,
                attempt: 0,
                message: e.to_string(),
            });
            return (None, failures);
        }
    };
    for attempt in 0..=MAX_RETRIES {
        match generator.generate(&mut graph_rng(cfg, density, mode, n, replicate, attempt)) {
            Ok(g) => return (Some(g), failures),
            Err(e) => failures.push(ReplicateFailure {
                density,
                mode,
                n,
                replicate,
                attempt,
                message: e.to_string(),
            }),
        }
    }
    (None, failures)
}

/// Class distribution of one replicate of `case` at size `n`.
pub fn run_replicate(
    cfg: &ExperimentConfig,
    case: Case,
    n: usize,
    replicate: usize,
) -> Result<Vec<f64>, SweepError> {
    cfg.validate()?;
    let params = model_params(case.model, cfg.d, cfg.seed).map_err(SweepError::Model)?;
    let (generated, failures) = generate_replicate(cfg, case.density, case.mode, n, replicate);
    let g = generated.ok_or_else(|| SweepError::Generation {
        density: case.density,
        mode: case.mode,
        n,
        replicate,
        message: failures
            .last()
            .map(|f| f.message.clone())
            .unwrap_or_default(),
    })?;
    classify_forward(&params, &g.graph, &g.features).map_err(SweepError::Model)
}

struct Unit {
    density: Density,
    mode: CorrelationMode,
    n: usize,
    replicate: usize,
}

struct UnitOutput {
    /// One distribution per configured model, in config order.
    probs: Option<Vec<Vec<f64>>>,
    failures: Vec<ReplicateFailure>,
}

/// `(replicate, output)` pairs of one (density, mode, n).
type Replicates<'a> = Vec<(usize, &'a UnitOutput)>;

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

pub fn run_sweep(cfg: &ExperimentConfig, opts: &SweepOptions) -> Result<SweepOutcome, SweepError> {
    cfg.validate()?;
    let params: Vec<GnnParams> = cfg
        .models
        .iter()
        .map(|&k| model_params(k, cfg.d, cfg.seed))
        .collect::<Result<_, _>>()
        .map_err(SweepError::Model)?;
    if let Some(dir) = &opts.dump_graphs {
        std::fs::create_dir_all(dir)?;
    }

    let mut units = Vec::new();
    for &density in &cfg.densities {
        for &mode in &cfg.modes {
            for &n in &cfg.sizes {
                for replicate in 0..cfg.replicates {
                    units.push(Unit {
                        density,
                        mode,
                        n,
                        replicate,
                    });
                }
            }
        }
    }
    // Largest graphs first so the tail of the schedule is short.
    units.sort_by_key(|u| std::cmp::Reverse(u.n));

    let done = AtomicUsize::new(0);
    let total = units.len();
    let eval = |u: &Unit| -> Result<UnitOutput, SweepError> {
        let (generated, failures) = generate_replicate(cfg, u.density, u.mode, u.n, u.replicate);
        let probs = match generated {
            Some(g) => {
                if let Some(dir) = &opts.dump_graphs {
                    let path = dump::dump_path(dir, u.density, u.mode, u.n, u.replicate);
                    dump::write_graph_dump(&path, &g.graph, &g.features)?;
                }
                let out = params
                    .iter()
                    .map(|p| classify_forward(p, &g.graph, &g.features))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(SweepError::Model)?;
                Some(out)
            }
            None => None,
        };
        let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(report) = &opts.progress {
            report(finished, total);
        }
        Ok(UnitOutput { probs, failures })
    };

    let outputs: Vec<UnitOutput> = match opts.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()?
            .install(|| units.par_iter().map(eval).collect::<Result<_, _>>())?,
        None => units.par_iter().map(eval).collect::<Result<_, _>>()?,
    };

    // Deterministic reduction keyed by (density, mode, n).
    let mut grouped: BTreeMap<(u64, u64, usize), Replicates<'_>> = BTreeMap::new();
    for (u, out) in units.iter().zip(&outputs) {
        grouped
            .entry((density_code(u.density), mode_code(u.mode), u.n))
            .or_default()
            .push((u.replicate, out));
    }

    let mut rows = Vec::new();
    let mut failures: Vec<ReplicateFailure> = outputs
        .iter()
        .flat_map(|o| o.failures.iter().cloned())
        .collect();
    failures.sort_by_key(|f| {
        (
            density_code(f.density),
            mode_code(f.mode),
            f.n,
            f.replicate,
            f.attempt,
        )
    });

    for &density in &cfg.densities {
        for &mode in &cfg.modes {
            for &n in &cfg.sizes {
                let mut reps = grouped
                    .remove(&(density_code(density), mode_code(mode), n))
                    .unwrap_or_default();
                reps.sort_by_key(|r| r.0);
                let ok: Vec<&Vec<Vec<f64>>> =
                    reps.iter().filter_map(|r| r.1.probs.as_ref()).collect();
                let failed = cfg.replicates - ok.len();
                for (mi, &model) in cfg.models.iter().enumerate() {
                    let case = Case {
                        model,
                        density,
                        mode,
                    };
                    if failed as f64 > MAX_FAILED_SHARE * cfg.replicates as f64 || ok.len() < 2 {
                        return Err(SweepError::CaseFailed {
                            case,
                            n,
                            failed,
                            replicates: cfg.replicates,
                        });
                    }
                    for class in 0..CLASSES {
                        let xs: Vec<f64> = ok.iter().map(|p| p[mi][class]).collect();
                        let (mean_prob, std_prob) = mean_std(&xs);
                        rows.push(SweepRow {
                            model,
                            density,
                            mode,
                            n,
                            class,
                            mean_prob,
                            std_prob,
                            replicates: ok.len(),
                        });
                    }
                }
            }
        }
    }
    Ok(SweepOutcome {
        result: SweepResult::from_rows(rows),
        failures,
    })
}
