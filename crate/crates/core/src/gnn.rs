//! Untrained graph classifiers: three equal-width GCN or GAT layers with
//! ReLU, mean pooling over nodes, one affine layer and a softmax.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, Graph};
use crate::randkit::Rng;

pub const LAYERS: usize = 3;
pub const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelKind {
    #[cfg_attr(feature = "serde", serde(rename = "GAT"))]
    Gat,
    #[cfg_attr(feature = "serde", serde(rename = "GCN"))]
    Gcn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [Self::Gat, Self::Gcn];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gat => "GAT",
            Self::Gcn => "GCN",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidArgument("unknown model kind"))
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: (rows, cols),
                found: (1, data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_features(x: &FeatureMatrix) -> Self {
        Self {
            rows: x.rows(),
            cols: x.dim(),
            data: x.as_slice().to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, rhs.cols),
                found: rhs.shape(),
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in dst.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    fn relu_in_place(&mut self) {
        self.data.iter_mut().for_each(|v| *v = v.max(0.0));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weight: Matrix,
    /// `[a_target ‖ a_source]`, length `2d`; GAT only.
    pub attention: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnnParams {
    pub kind: ModelKind,
    pub layers: Vec<LayerParams>,
    pub head: Matrix,
    pub bias: Vec<f64>,
}

fn glorot(rows: usize, cols: usize, rng: &mut Rng) -> Vec<f64> {
    let bound = libm::sqrt(6.0 / (rows + cols) as f64);
    (0..rows * cols)
        .map(|_| rng.uniform_range(-bound, bound))
        .collect()
}

/// Glorot-uniform weights and zero head bias, reproducible from `seed`.
///
/// Each half of a GAT attention vector is drawn as a `1 × d` Glorot matrix.
pub fn init_params(kind: ModelKind, d: usize, classes: usize, seed: u64) -> Result<GnnParams> {
    if d == 0 {
        return Err(Error::InvalidArgument("hidden width must be positive"));
    }
    if classes < 2 {
        return Err(Error::InvalidArgument("need at least two classes"));
    }
    let mut rng = Rng::new(seed);
    let mut layers = Vec::with_capacity(LAYERS);
    for _ in 0..LAYERS {
        let weight = Matrix::from_vec(d, d, glorot(d, d, &mut rng))?;
        let attention = (kind == ModelKind::Gat).then(|| {
            let mut a = glorot(1, d, &mut rng);
            a.extend(glorot(1, d, &mut rng));
            a
        });
        layers.push(LayerParams { weight, attention });
    }
    let head = Matrix::from_vec(d, classes, glorot(d, classes, &mut rng))?;
    Ok(GnnParams {
        kind,
        layers,
        head,
        bias: vec![0.0; classes],
    })
}

fn check_layer_shapes(g: &Graph, h: &Matrix, w: &Matrix) -> Result<()> {
    if h.rows() != g.node_count() {
        return Err(Error::ShapeMismatch {
            expected: (g.node_count(), h.cols()),
            found: h.shape(),
        });
    }
    if w.rows() != h.cols() {
        return Err(Error::ShapeMismatch {
            expected: (h.cols(), w.cols()),
            found: w.shape(),
        });
    }
    Ok(())
}

/// `ReLU(D̃^{-1/2} (A + I) D̃^{-1/2} H W)`.
pub fn gcn_layer(g: &Graph, h: &Matrix, w: &Matrix) -> Result<Matrix> {
    check_layer_shapes(g, h, w)?;
    let hw = h.matmul(w)?;
    let inv_sqrt: Vec<f64> = g
        .degrees()
        .map(|k| 1.0 / libm::sqrt((k + 1) as f64))
        .collect();
    let mut out = Matrix::zeros(hw.rows(), hw.cols());
    for i in 0..g.node_count() {
        let dst = out.row_mut(i);
        let self_coef = inv_sqrt[i] * inv_sqrt[i];
        for (o, &v) in dst.iter_mut().zip(hw.row(i)) {
            *o = self_coef * v;
        }
        for &j in g.neighbors(i) {
            let j = j as usize;
            let coef = inv_sqrt[i] * inv_sqrt[j];
            for (o, &v) in dst.iter_mut().zip(hw.row(j)) {
                *o += coef * v;
            }
        }
    }
    out.relu_in_place();
    Ok(out)
}

fn leaky_relu(x: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        LEAKY_SLOPE * x
    }
}

/// Attention coefficients of node `i` over `[i, neighbours(i)...]`, with
/// target scores `s_i = a_tgtᵀ W h_i` and source scores `t_j = a_srcᵀ W h_j`.
fn attention_row(g: &Graph, i: usize, target: &[f64], source: &[f64], buf: &mut Vec<f64>) {
    buf.clear();
    buf.push(leaky_relu(target[i] + source[i]));
    buf.extend(
        g.neighbors(i)
            .iter()
            .map(|&j| leaky_relu(target[i] + source[j as usize])),
    );
    let max = buf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for e in buf.iter_mut() {
        *e = libm::exp(*e - max);
        sum += *e;
    }
    buf.iter_mut().for_each(|e| *e /= sum);
}

fn attention_scores(hw: &Matrix, a: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = hw.cols();
    if a.len() != 2 * d {
        return Err(Error::ShapeMismatch {
            expected: (1, 2 * d),
            found: (1, a.len()),
        });
    }
    let (a_tgt, a_src) = a.split_at(d);
    let dot = |row: &[f64], v: &[f64]| row.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    let target = (0..hw.rows()).map(|i| dot(hw.row(i), a_tgt)).collect();
    let source = (0..hw.rows()).map(|i| dot(hw.row(i), a_src)).collect();
    Ok((target, source))
}

/// Single-head GAT attention: for every node, the softmax weights over itself
/// followed by its neighbours in ascending index order.
pub fn gat_attention(g: &Graph, h: &Matrix, w: &Matrix, a: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_layer_shapes(g, h, w)?;
    let hw = h.matmul(w)?;
    let (target, source) = attention_scores(&hw, a)?;
    let mut buf = Vec::new();
    Ok((0..g.node_count())
        .map(|i| {
            attention_row(g, i, &target, &source, &mut buf);
            buf.clone()
        })
        .collect())
}

/// `h'_i = ReLU(Σ_{j ∈ N(i) ∪ {i}} α_ij W h_j)` with
/// `α_ij = softmax_j LeakyReLU(aᵀ[W h_i ‖ W h_j])`.
pub fn gat_layer(g: &Graph, h: &Matrix, w: &Matrix, a: &[f64]) -> Result<Matrix> {
    check_layer_shapes(g, h, w)?;
    let hw = h.matmul(w)?;
    let (target, source) = attention_scores(&hw, a)?;
    let mut out = Matrix::zeros(hw.rows(), hw.cols());
    let mut alpha = Vec::new();
    for i in 0..g.node_count() {
        attention_row(g, i, &target, &source, &mut alpha);
        let dst = out.row_mut(i);
        for (o, &v) in dst.iter_mut().zip(hw.row(i)) {
            *o = alpha[0] * v;
        }
        for (&j, &coef) in g.neighbors(i).iter().zip(&alpha[1..]) {
            for (o, &v) in dst.iter_mut().zip(hw.row(j as usize)) {
                *o += coef * v;
            }
        }
    }
    out.relu_in_place();
    Ok(out)
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| libm::exp(l - max)).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Class distribution for one graph.
pub fn classify_forward(params: &GnnParams, g: &Graph, x: &FeatureMatrix) -> Result<Vec<f64>> {
    if x.rows() != g.node_count() {
        return Err(Error::ShapeMismatch {
            expected: (g.node_count(), x.dim()),
            found: (x.rows(), x.dim()),
        });
    }
    if g.node_count() == 0 {
        return Err(Error::InvalidArgument("cannot pool an empty graph"));
    }
    let mut h = Matrix::from_features(x);
    for layer in &params.layers {
        h = match (params.kind, &layer.attention) {
            (ModelKind::Gcn, _) => gcn_layer(g, &h, &layer.weight)?,
            (ModelKind::Gat, Some(a)) => gat_layer(g, &h, &layer.weight, a)?,
            (ModelKind::Gat, None) => {
                return Err(Error::InvalidArgument("GAT layer without attention vector"))
            }
        };
    }
    let mut pooled = vec![0.0; h.cols()];
    for i in 0..h.rows() {
        for (p, &v) in pooled.iter_mut().zip(h.row(i)) {
            *p += v;
        }
    }
    let n = h.rows() as f64;
    pooled.iter_mut().for_each(|p| *p /= n);

    if params.head.rows() != pooled.len() || params.bias.len() != params.head.cols() {
        return Err(Error::ShapeMismatch {
            expected: (pooled.len(), params.bias.len()),
            found: params.head.shape(),
        });
    }
    let logits: Vec<f64> = (0..params.head.cols())
        .map(|c| {
            params.bias[c]
                + pooled
                    .iter()
                    .enumerate()
                    .map(|(k, p)| p * params.head.get(k, c))
                    .sum::<f64>()
        })
        .collect();
    Ok(softmax(&logits))
}
