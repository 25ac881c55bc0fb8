//! Asymptotic estimates of the correlation a late-arriving node places on its
//! neighbours in BA(n, m), and the Wallenius mean approximation they rest on.
//!
//! For a node joining a nearly complete BA(n, m) graph, `C_i = k_i / r` is
//! the first-draw probability of its `i`-th neighbour and `Q = Σ_i C_i` is
//! the rescaling factor of the rescaled correlations. With the power-law
//! degree density and integral approximations of the sums,
//!
//! ```text
//! E(C_1) ≈ (ln n − ln m) / (2n)
//! E(Q)   ≈ (2 + ln u) / (2u),   u = n / m
//! ```
//!
//! where `E(Q)` uses the Wallenius mean approximation
//! `μ_k = n_k (1 − e^{ω_k θ})` with `θ(n) = ln(1 − 1/(2n))`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::generator::Trace;

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive"));
    }
    if n <= m {
        return Err(Error::Domain {
            what: "n (must exceed m)",
            value: n as f64,
        });
    }
    Ok(())
}

/// `E(C_1) ≈ (ln n − ln m) / (2n)`.
pub fn expected_c1(n: usize, m: usize) -> Result<f64> {
    check_sizes(n, m)?;
    let nf = n as f64;
    Ok((libm::log(nf) - libm::log(m as f64)) / (2.0 * nf))
}

/// `θ(n) = ln(1 − 1/(2n))`.
pub fn theta_schedule(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive"));
    }
    Ok(libm::log1p(-0.5 / n as f64))
}

/// `E(Q) ≈ (2 + ln u) / (2u)` with `u = n/m`.
pub fn expected_q(n: usize, m: usize) -> Result<f64> {
    check_sizes(n, m)?;
    let u = n as f64 / m as f64;
    Ok((2.0 + libm::log(u)) / (2.0 * u))
}

/// One group of a multivariate Wallenius urn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalleniusGroup {
    pub weight: f64,
    pub size: u64,
}

/// `draws` items taken one at a time without replacement, each item of
/// group `k` chosen with probability proportional to `ω_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalleniusSpec {
    pub groups: Vec<WalleniusGroup>,
    pub draws: u64,
}

impl WalleniusSpec {
    pub fn new(groups: Vec<WalleniusGroup>, draws: u64) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidArgument("no groups"));
        }
        if let Some(g) = groups
            .iter()
            .find(|g| !(g.weight > 0.0 && g.weight.is_finite()))
        {
            return Err(Error::Domain {
                what: "group weight",
                value: g.weight,
            });
        }
        if groups.iter().any(|g| g.size == 0) {
            return Err(Error::InvalidArgument("empty group"));
        }
        if draws == 0 {
            return Err(Error::InvalidArgument("draws must be positive"));
        }
        let total: u64 = groups.iter().map(|g| g.size).sum();
        if draws > total {
            return Err(Error::Domain {
                what: "draws (exceeds population)",
                value: draws as f64,
            });
        }
        Ok(Self { groups, draws })
    }

    pub fn population(&self) -> u64 {
        self.groups.iter().map(|g| g.size).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalleniusMean {
    /// `θ < 0` with `Σ_k n_k (1 − e^{ω_k θ}) = m`.
    pub theta: f64,
    /// Approximate `E(m_k)` per group.
    pub means: Vec<f64>,
}

const BISECTION_CAP: usize = 200;

/// Solves `Σ_k n_k (1 − t^{ω_k}) = m` for `t = e^θ ∈ (0, 1)` by bisection and
/// returns `μ_k = n_k (1 − t^{ω_k})`.
///
/// The left side falls strictly from `N` at `t = 0` to `0` at `t = 1`, so a
/// root exists iff `0 < m < N`. Bisection runs until the bracket collapses to
/// adjacent floats or hits the iteration cap.
pub fn wallenius_mean_approx(spec: &WalleniusSpec) -> Result<WalleniusMean> {
    let m = spec.draws as f64;
    if spec.draws >= spec.population() {
        return Err(Error::Domain {
            what: "draws (must be below population)",
            value: m,
        });
    }
    let excess = |t: f64| -> f64 {
        spec.groups
            .iter()
            .map(|g| g.size as f64 * (1.0 - libm::pow(t, g.weight)))
            .sum::<f64>()
            - m
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut t = 0.5;
    for _ in 0..BISECTION_CAP {
        t = 0.5 * (lo + hi);
        if t <= lo || t >= hi {
            break;
        }
        let f = excess(t);
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
    }
    let means = spec
        .groups
        .iter()
        .map(|g| g.size as f64 * (1.0 - libm::pow(t, g.weight)))
        .collect();
    Ok(WalleniusMean {
        theta: libm::log(t),
        means,
    })
}

/// Empirical late-stage means from one or more generation traces.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LateStageSummary {
    pub iterations: usize,
    pub mean_c1: f64,
    pub mean_q: f64,
    /// Mean `C_i` per draw position `i`.
    pub mean_by_draw: Vec<f64>,
}

/// Number of growth iterations counted as late stage: the final
/// `ceil(late_frac × iterations)`.
pub fn late_stage_len(iterations: usize, late_frac: f64) -> usize {
    let k = libm::ceil(late_frac.clamp(0.0, 1.0) * iterations as f64) as usize;
    k.min(iterations)
}

/// Averages `C_1`, `Q` and every `C_i` over the late-stage iterations of all
/// `traces`, which must share the same attachment count.
pub fn late_stage_summary<'a>(
    traces: impl IntoIterator<Item = &'a Trace>,
    late_frac: f64,
) -> Result<LateStageSummary> {
    if !(late_frac > 0.0 && late_frac <= 1.0) {
        return Err(Error::Domain {
            what: "late-stage fraction",
            value: late_frac,
        });
    }
    let mut summary = LateStageSummary::default();
    let mut attach = None;
    for trace in traces {
        let m = *attach.get_or_insert(trace.attach());
        if m != trace.attach() {
            return Err(Error::InvalidArgument(
                "traces with different attachment counts",
            ));
        }
        if summary.mean_by_draw.is_empty() {
            summary.mean_by_draw = alloc::vec![0.0; m];
        }
        let total = trace.iterations();
        for it in total - late_stage_len(total, late_frac)..total {
            let c = trace.correlations(it);
            summary.mean_c1 += c[0];
            summary.mean_q += c.iter().sum::<f64>();
            for (acc, &v) in summary.mean_by_draw.iter_mut().zip(c) {
                *acc += v;
            }
            summary.iterations += 1;
        }
    }
    if summary.iterations == 0 {
        return Err(Error::InvalidArgument("no late-stage iterations"));
    }
    let k = summary.iterations as f64;
    summary.mean_c1 /= k;
    summary.mean_q /= k;
    summary.mean_by_draw.iter_mut().for_each(|v| *v /= k);
    Ok(summary)
}

/// Late-stage mean of `Q` over `traces`.
pub fn empirical_q<'a>(traces: impl IntoIterator<Item = &'a Trace>, late_frac: f64) -> Result<f64> {
    late_stage_summary(traces, late_frac).map(|s| s.mean_q)
}
