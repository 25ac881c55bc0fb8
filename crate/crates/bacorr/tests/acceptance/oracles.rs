//! Reference computations that share no code with the implementation.
#![allow(clippy::needless_range_loop)]

use std::collections::HashMap;

use bacorr_core::gnn::GnnParams;
use bacorr_core::{FeatureMatrix, Graph};

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// `[[I, ρ], [ρᵀ, 1]]`.
pub fn block_covariance(rho: &[f64]) -> Vec<Vec<f64>> {
    let m = rho.len();
    let mut a = vec![vec![0.0; m + 1]; m + 1];
    for i in 0..m {
        a[i][i] = 1.0;
        a[i][m] = rho[i];
        a[m][i] = rho[i];
    }
    a[m][m] = 1.0;
    a
}

/// Exact `E(m_k)` of the multivariate Wallenius distribution by recursion
/// over every ordered sequence of weighted draws.
pub fn wallenius_exact_mean(weights: &[f64], sizes: &[u64], draws: u64) -> Vec<f64> {
    fn walk(
        w: &[f64],
        rem: &mut Vec<u64>,
        left: u64,
        memo: &mut HashMap<(Vec<u64>, u64), Vec<f64>>,
    ) -> Vec<f64> {
        let k = w.len();
        if left == 0 {
            return vec![0.0; k];
        }
        if let Some(v) = memo.get(&(rem.clone(), left)) {
            return v.clone();
        }
        let total: f64 = (0..k).map(|i| w[i] * rem[i] as f64).sum();
        let mut mean = vec![0.0; k];
        for i in 0..k {
            if rem[i] == 0 {
                continue;
            }
            let p = w[i] * rem[i] as f64 / total;
            rem[i] -= 1;
            let rest = walk(w, rem, left - 1, memo);
            rem[i] += 1;
            for j in 0..k {
                mean[j] += p * (rest[j] + f64::from(u8::from(j == i)));
            }
        }
        memo.insert((rem.clone(), left), mean.clone());
        mean
    }
    walk(weights, &mut sizes.to_vec(), draws, &mut HashMap::new())
}

/// Softmax of mean-pooled 3-layer GCN embeddings, with dense `n × n`
/// normalised adjacency.
pub fn dense_gcn_forward(params: &GnnParams, g: &Graph, x: &FeatureMatrix) -> Vec<f64> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i == j || g.has_edge(i, j) {
                *v = 1.0;
            }
        }
    }
    let deg: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let mut h: Vec<Vec<f64>> = (0..n).map(|i| x.row(i).to_vec()).collect();
    for layer in &params.layers {
        let w = &layer.weight;
        let hw: Vec<Vec<f64>> = h
            .iter()
            .map(|r| {
                (0..w.cols())
                    .map(|c| (0..w.rows()).map(|k| r[k] * w.get(k, c)).sum())
                    .collect()
            })
            .collect();
        h = (0..n)
            .map(|i| {
                (0..w.cols())
                    .map(|c| {
                        (0..n)
                            .map(|j| a[i][j] / (deg[i] * deg[j]).sqrt() * hw[j][c])
                            .sum::<f64>()
                            .max(0.0)
                    })
                    .collect()
            })
            .collect();
    }
    let width = h[0].len();
    let pooled: Vec<f64> = (0..width)
        .map(|c| h.iter().map(|r| r[c]).sum::<f64>() / n as f64)
        .collect();
    let head = &params.head;
    let logits: Vec<f64> = (0..head.cols())
        .map(|c| params.bias[c] + (0..width).map(|k| pooled[k] * head.get(k, c)).sum::<f64>())
        .collect();
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|v| v / z).collect()
}
