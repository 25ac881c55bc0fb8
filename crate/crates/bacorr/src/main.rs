use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bacorr::diagnostic::{compare_model_spread, diagnose_all, CONVERGENCE_THRESHOLD};
use bacorr::sweep::{SweepOptions, MAX_RETRIES};
use bacorr::theory_table::{theory_table, write_per_draw, write_table};
use bacorr::{read_csv, run_sweep, write_csv, ExperimentConfig, SweepResult};
use clap::{Parser, Subcommand};

/// Correlated-feature BA graphs under untrained GNN classifiers.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the class-probability sweep and write the results CSV.
    Sweep {
        /// JSON config; omitted fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Write every generated graph to this directory.
        #[arg(long)]
        dump_graphs: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the replicate count.
        #[arg(long)]
        replicates: Option<usize>,
        /// Correlate each neighbour by its conditional draw probability.
        #[arg(long)]
        rho_renormalize: bool,
    },
    /// Print closed-form late-stage estimates and their empirical means.
    Theory {
        /// Graph sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Attachment counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[arg(long, default_value_t = 30)]
        replicates: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.25)]
        late_frac: f64,
        /// Also write mean C_i per draw position to this file.
        #[arg(long)]
        per_draw: Option<PathBuf>,
    },
    /// Classify every case of a results CSV by its tail std ratio.
    Diagnose {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn print_diagnostics(result: &SweepResult) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "model,density,corr_mode,tail_std_ratio,classification,reference_n,largest_n"
    )?;
    for (case, diag) in diagnose_all(result) {
        match diag {
            Ok(d) => writeln!(
                out,
                "{},{},{},{:.6},{},{},{}",
                case.model,
                case.density,
                case.mode,
                d.tail_std_ratio,
                d.classification,
                d.reference_n,
                d.largest_n
            )?,
            Err(e) => eprintln!("{case}: {e}"),
        }
    }
    eprintln!("threshold: Converging iff tail_std_ratio < {CONVERGENCE_THRESHOLD}");
    for s in compare_model_spread(result, 500) {
        eprintln!(
            "{}/{}: mean max-class std over n >= 500: GAT {:.3e}, GCN {:.3e}",
            s.density, s.mode, s.gat, s.gcn
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Sweep {
            config,
            out,
            dump_graphs,
            workers,
            seed,
            replicates,
            rho_renormalize,
        } => {
            let mut cfg = match &config {
                Some(p) => ExperimentConfig::load(p)?,
                None => ExperimentConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(r) = replicates {
                cfg.replicates = r;
            }
            cfg.rho_renormalize |= rho_renormalize;
            cfg.validate()?;

            let start = Instant::now();
            let opts = SweepOptions {
                workers,
                dump_graphs,
                progress: Some(Box::new(|done, total| {
                    if done % (total / 20).max(1) == 0 || done == total {
                        eprintln!("{done}/{total} graphs");
                    }
                })),
            };
            let outcome = run_sweep(&cfg, &opts)?;
            write_csv(&outcome.result, &out)
                .with_context(|| format!("writing {}", out.display()))?;

            let meta = serde_json::json!({
                "config": cfg,
                "convergence_threshold": CONVERGENCE_THRESHOLD,
                "std_estimator": "unbiased",
                "max_retries": MAX_RETRIES,
                "rejected_attempts": outcome.failures.len(),
            });
            let meta_path = PathBuf::from(format!("{}.meta.json", out.display()));
            std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
            eprintln!(
                "{} rows in {:.1?}; {} rejected generation attempts",
                outcome.result.len(),
                start.elapsed(),
                outcome.failures.len()
            );
            print_diagnostics(&outcome.result)
        }
        Command::Theory {
            n,
            m,
            replicates,
            seed,
            late_frac,
            per_draw,
        } => {
            let mut pairs = Vec::new();
            for &nn in &n {
                for &mm in &m {
                    if nn <= mm {
                        bail!("n = {nn} must exceed m = {mm}");
                    }
                    pairs.push((nn, mm));
                }
            }
            let rows = theory_table(&pairs, replicates, seed, late_frac)?;
            write_table(&rows, std::io::stdout().lock())?;
            if let Some(p) = per_draw {
                write_per_draw(&rows, std::fs::File::create(&p)?)?;
            }
            Ok(())
        }
        Command::Diagnose { input } => {
            let result =
                read_csv(&input).with_context(|| format!("reading {}", input.display()))?;
            print_diagnostics(&result)
        }
    }
}
