//! Barabási-Albert growth with node features that are correlated with the
//! features of the nodes each newcomer attaches to.
//!
//! Growth starts from the complete graph on `m` nodes with i.i.d. uniform
//! features. Every new node draws `m` distinct neighbours, each draw
//! proportional to current degree among the nodes not yet drawn. Neighbour
//! `i` receives the target correlation `ρ_i = k_i / r`, its probability of
//! being drawn first (degrees and `r` from the snapshot before the new node
//! attaches). The new feature is drawn per dimension from the Gaussian
//! conditional
//!
//! ```text
//! z_new | z_1..z_m ~ N(Σ ρ_i z_i, 1 - ρᵀρ)
//! ```
//!
//! where `z = Φ⁻¹(x)` are the neighbours' features moved to normal space and
//! `ρ` has been moved to normal space by `2·sin(π ρ / 6)`. The result is
//! stored as `Φ(z_new)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, Graph};
use crate::randkit::{corr_normal_from_uniform, phi, phi_inv, Rng};
use crate::sampling::WeightedSampler;

/// Lower bound on the conditional variance.
pub const VARIANCE_FLOOR: f64 = 1e-12;
/// How far `1 - ρᵀρ` may fall below zero before the draw is rejected.
pub const PD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CorrelationMode {
    #[cfg_attr(feature = "serde", serde(rename = "none"))]
    NoCorrelation,
    #[cfg_attr(feature = "serde", serde(rename = "simple"))]
    Simple,
    #[cfg_attr(feature = "serde", serde(rename = "rescaled"))]
    Rescaled,
}

impl CorrelationMode {
    pub const ALL: [CorrelationMode; 3] = [Self::NoCorrelation, Self::Simple, Self::Rescaled];

    pub fn name(self) -> &'static str {
        match self {
            Self::NoCorrelation => "none",
            Self::Simple => "simple",
            Self::Rescaled => "rescaled",
        }
    }
}

impl fmt::Display for CorrelationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorrelationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or(Error::InvalidArgument("unknown correlation mode"))
    }
}

/// How many edges each new node brings, as a function of the final size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttachmentRule {
    Fixed(usize),
    /// `max(1, ⌊n / divisor⌋)`.
    Proportional {
        divisor: usize,
    },
}

impl AttachmentRule {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            Self::Fixed(m) => m,
            Self::Proportional { divisor } => (n / divisor.max(1)).max(1),
        }
    }
}

/// Neighbours drawn for one new node and their target correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct AttachmentDraw {
    pub neighbors: Vec<usize>,
    pub correlations: Vec<f64>,
}

/// Complete graph on `m` nodes with i.i.d. `U[0,1]^d` features.
pub fn init_seed_graph(m: usize, d: usize, rng: &mut Rng) -> Result<(Graph, FeatureMatrix)> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "attachment count m must be positive",
        ));
    }
    let mut features = FeatureMatrix::new(d)?;
    let mut row = vec![0.0; d];
    for _ in 0..m {
        row.iter_mut().for_each(|v| *v = rng.uniform_open());
        features.push_row(&row)?;
    }
    Ok((Graph::complete(m), features))
}

fn degree_weights(g: &Graph) -> Vec<u64> {
    g.degrees().map(|k| k as u64).collect()
}

/// Draws `m` distinct existing nodes by successive degree-proportional draws
/// without replacement. If every node has degree zero the draws are uniform.
pub fn select_neighbors(g: &Graph, m: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    WeightedSampler::new(&degree_weights(g)).draw_distinct(m, rng)
}

/// Target correlations for `neighbors` given the pre-iteration degrees.
///
/// * `Simple`: `ρ_i = k_i / r` with `r = Σ_j k_j` over all nodes.
/// * `Rescaled`: `ρ_i = k_i / Σ_{j ∈ neighbors} k_j`.
/// * `NoCorrelation`: zeros.
pub fn compute_correlations(
    degrees: &[usize],
    neighbors: &[usize],
    mode: CorrelationMode,
) -> Result<Vec<f64>> {
    let total: usize = degrees.iter().sum();
    if total == 0 {
        return Err(Error::ZeroDegreeSum);
    }
    let weights = neighbors
        .iter()
        .map(|&i| {
            degrees
                .get(i)
                .map(|&k| k as u64)
                .ok_or(Error::InvalidArgument("neighbour index out of range"))
        })
        .collect::<Result<Vec<_>>>()?;
    correlations_from_weights(&weights, total as u64, mode, false)
}

/// `weights` are the neighbours' selection weights in draw order, `total`
/// the weight of all candidates. With `renormalize` each draw uses the
/// weight remaining after removing earlier draws instead of `total`.
pub(crate) fn correlations_from_weights(
    weights: &[u64],
    total: u64,
    mode: CorrelationMode,
    renormalize: bool,
) -> Result<Vec<f64>> {
    if mode == CorrelationMode::NoCorrelation {
        return Ok(vec![0.0; weights.len()]);
    }
    if total == 0 {
        return Err(Error::ZeroDegreeSum);
    }
    let mut remaining = total;
    let mut rho = Vec::with_capacity(weights.len());
    for &w in weights {
        let denom = if renormalize { remaining } else { total };
        if denom == 0 {
            return Err(Error::ZeroDegreeSum);
        }
        rho.push(w as f64 / denom as f64);
        remaining = remaining.saturating_sub(w);
    }
    if mode == CorrelationMode::Rescaled {
        let sum: f64 = rho.iter().sum();
        if sum <= 0.0 {
            return Err(Error::ZeroDegreeSum);
        }
        rho.iter_mut().for_each(|r| *r /= sum);
    }
    Ok(rho)
}

/// `det Σ_{m+1}` of the block covariance `[[I_m, ρ], [ρᵀ, 1]]`, by peeling
/// one neighbour at a time: `det Σ_{j+1} = det Σ_j - ρ_j²` from `det Σ_1 = 1`.
pub fn covariance_determinant(rho: &[f64]) -> f64 {
    rho.iter().fold(1.0, |det, r| det - r * r)
}

/// Normal-space regression weights and residual standard deviation for one
/// conditional draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalWeights {
    pub rho: Vec<f64>,
    pub sigma: f64,
}

/// Moves uniform-space target correlations to normal space and checks that
/// the joint covariance is positive definite.
///
/// When `ρᵀρ` lands in `[1, 1 + PD_TOLERANCE]` (a single neighbour with
/// target 1, or rounding), `ρ` is shrunk to `ρᵀρ = 1 - VARIANCE_FLOOR` so the
/// conditional Gaussian stays proper.
pub fn conditional_weights(rho_u: &[f64]) -> Result<ConditionalWeights> {
    let mut rho = rho_u
        .iter()
        .map(|&r| corr_normal_from_uniform(r))
        .collect::<Result<Vec<_>>>()?;
    let det = covariance_determinant(&rho);
    if det < -PD_TOLERANCE {
        return Err(Error::CovarianceNotPositiveDefinite { det });
    }
    let ss = 1.0 - det;
    if ss >= 1.0 {
        let scale = libm::sqrt((1.0 - VARIANCE_FLOOR) / ss);
        rho.iter_mut().for_each(|r| *r *= scale);
    }
    let var = covariance_determinant(&rho).max(VARIANCE_FLOOR);
    Ok(ConditionalWeights {
        rho,
        sigma: libm::sqrt(var),
    })
}

/// Draws one uniform-space feature row correlated with `neighbors` (rows in
/// `[0,1]^d`) at uniform-space targets `rho_u`. Dimensions are independent.
pub fn sample_feature_conditional(
    neighbors: &[&[f64]],
    rho_u: &[f64],
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    if neighbors.len() != rho_u.len() {
        return Err(Error::ShapeMismatch {
            expected: (rho_u.len(), 1),
            found: (neighbors.len(), 1),
        });
    }
    let d = match neighbors.first() {
        Some(row) => row.len(),
        None => return Err(Error::InvalidArgument("no neighbour features given")),
    };
    let weights = conditional_weights(rho_u)?;
    let mut z = Vec::with_capacity(neighbors.len() * d);
    for row in neighbors {
        if row.len() != d {
            return Err(Error::ShapeMismatch {
                expected: (1, d),
                found: (1, row.len()),
            });
        }
        for &u in row.iter() {
            if !(0.0..=1.0).contains(&u) {
                return Err(Error::Domain {
                    what: "uniform-space feature",
                    value: u,
                });
            }
            z.push(to_normal(u));
        }
    }
    let mut out = vec![0.0; d];
    draw_conditional(&weights, &z, d, rng, &mut out);
    Ok(out)
}

#[inline]
fn to_normal(u: f64) -> f64 {
    phi_inv(u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
}

// `z` holds the neighbours' normal-space rows back to back.
fn draw_conditional(w: &ConditionalWeights, z: &[f64], d: usize, rng: &mut Rng, out: &mut [f64]) {
    for (t, slot) in out.iter_mut().enumerate() {
        let mean: f64 = w
            .rho
            .iter()
            .enumerate()
            .map(|(i, r)| r * z[i * d + t])
            .sum();
        *slot = phi(mean + w.sigma * rng.standard_normal());
    }
}

/// Per-iteration record of the first-draw probabilities `k_i / r` of the
/// chosen neighbours (pre-iteration snapshot, draw order), regardless of the
/// correlation mode in use.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    attach: usize,
    first_draw: Vec<f64>,
}

impl Trace {
    pub fn attach(&self) -> usize {
        self.attach
    }

    pub fn iterations(&self) -> usize {
        self.first_draw.len().checked_div(self.attach).unwrap_or(0)
    }

    /// `(C_1, …, C_m)` of growth iteration `i` (the node with index `m + i`).
    pub fn correlations(&self, iteration: usize) -> &[f64] {
        &self.first_draw[iteration * self.attach..(iteration + 1) * self.attach]
    }

    /// `Q = Σ_i C_i` of growth iteration `i`.
    pub fn q(&self, iteration: usize) -> f64 {
        self.correlations(iteration).iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Graph,
    pub features: FeatureMatrix,
    pub trace: Option<Trace>,
}

/// Augmented BA(n, m) generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaGenerator {
    nodes: usize,
    attach: usize,
    dim: usize,
    mode: CorrelationMode,
    rho_renormalize: bool,
    record_trace: bool,
}

impl BaGenerator {
    pub fn new(nodes: usize, attach: usize, dim: usize, mode: CorrelationMode) -> Result<Self> {
        if attach == 0 {
            return Err(Error::InvalidArgument(
                "attachment count m must be positive",
            ));
        }
        if nodes < attach {
            return Err(Error::InvalidArgument("node count must be at least m"));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("feature dimension must be positive"));
        }
        Ok(Self {
            nodes,
            attach,
            dim,
            mode,
            rho_renormalize: false,
            record_trace: false,
        })
    }

    /// Use the conditional probability of each successive draw, rather than
    /// the first-draw probability, as the neighbour's target correlation.
    pub fn rho_renormalize(mut self, on: bool) -> Self {
        self.rho_renormalize = on;
        self
    }

    pub fn record_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn attach(&self) -> usize {
        self.attach
    }

    pub fn generate(&self, rng: &mut Rng) -> Result<Generated> {
        let (m, d) = (self.attach, self.dim);
        let (mut graph, mut features) = init_seed_graph(m, d, rng)?;
        let mut z: Vec<f64> = Vec::with_capacity(self.nodes * d);
        z.extend(features.as_slice().iter().map(|&u| to_normal(u)));

        let mut sampler = WeightedSampler::new(&degree_weights(&graph));
        let mut trace = self.record_trace.then(|| Trace {
            attach: m,
            first_draw: Vec::with_capacity((self.nodes - m) * m),
        });
        let mut weights = vec![0u64; m];
        let mut z_nb = vec![0.0; m * d];
        let mut row = vec![0.0; d];

        for new in m..self.nodes {
            let neighbors = sampler.draw_distinct(m, rng)?;
            // Degree-zero bootstrap (m = 1): every node is equally likely.
            let total = if sampler.total() == 0 {
                weights.iter_mut().for_each(|w| *w = 1);
                new as u64
            } else {
                for (w, &i) in weights.iter_mut().zip(&neighbors) {
                    *w = sampler.weight(i);
                }
                sampler.total()
            };
            if let Some(t) = trace.as_mut() {
                t.first_draw
                    .extend(weights.iter().map(|&w| w as f64 / total as f64));
            }

            let rho_u =
                correlations_from_weights(&weights, total, self.mode, self.rho_renormalize)?;
            let cw = conditional_weights(&rho_u)?;
            for (k, &i) in neighbors.iter().enumerate() {
                z_nb[k * d..(k + 1) * d].copy_from_slice(&z[i * d..(i + 1) * d]);
            }
            draw_conditional(&cw, &z_nb, d, rng, &mut row);

            graph.attach_new_node(&neighbors)?;
            features.push_row(&row)?;
            z.extend(row.iter().map(|&u| to_normal(u)));
            for &i in &neighbors {
                sampler.set(i, sampler.weight(i) + 1);
            }
            sampler.push(m as u64);
        }

        Ok(Generated {
            graph,
            features,
            trace,
        })
    }
}

/// Grows a BA graph of `n` nodes with correlated features.
pub fn generate(
    n: usize,
    rule: AttachmentRule,
    d: usize,
    mode: CorrelationMode,
    rng: &mut Rng,
) -> Result<(Graph, FeatureMatrix)> {
    let g = BaGenerator::new(n, rule.resolve(n), d, mode)?.generate(rng)?;
    Ok((g.graph, g.features))
}
