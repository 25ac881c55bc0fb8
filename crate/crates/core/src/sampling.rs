//! Degree-proportional sampling without replacement.
//!
//! Weights are integers (node degrees), so every draw is exact: a uniform
//! integer below the total weight is located by a descent through a Fenwick
//! tree. Drawing without replacement zeroes the chosen weight, which
//! renormalises the remaining weights for the next draw.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::randkit::Rng;

#[derive(Debug, Clone, Default)]
pub struct WeightedSampler {
    // 1-based Fenwick array; tree[0] is unused.
    tree: Vec<u64>,
    weights: Vec<u64>,
    total: u64,
}

impl WeightedSampler {
    pub fn new(weights: &[u64]) -> Self {
        let n = weights.len();
        let mut tree = Vec::with_capacity(n + 1);
        tree.push(0);
        tree.extend_from_slice(weights);
        for i in 1..=n {
            let parent = i + lowbit(i);
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        Self {
            tree,
            weights: weights.to_vec(),
            total: weights.iter().sum(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn weight(&self, i: usize) -> u64 {
        self.weights[i]
    }

    pub fn push(&mut self, weight: u64) {
        let i = self.weights.len() + 1;
        // The new cell covers (i - lowbit(i), i].
        let covered = self.prefix(i - 1) - self.prefix(i - lowbit(i));
        self.tree.push(weight + covered);
        self.weights.push(weight);
        self.total += weight;
    }

    pub fn set(&mut self, i: usize, weight: u64) {
        let old = self.weights[i];
        self.weights[i] = weight;
        self.total = self.total - old + weight;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] = self.tree[j] - old + weight;
            j += lowbit(j);
        }
    }

    // Sum of the first `count` weights.
    fn prefix(&self, mut count: usize) -> u64 {
        let mut s = 0;
        while count > 0 {
            s += self.tree[count];
            count -= lowbit(count);
        }
        s
    }

    /// Index `i` with `prefix(i) <= target < prefix(i + 1)`; `target < total`.
    fn locate(&self, mut target: u64) -> usize {
        let n = self.weights.len();
        let mut pos = 0;
        let mut step = if n == 0 {
            0
        } else {
            1 << (usize::BITS - 1 - n.leading_zeros())
        };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }

    /// One draw with probability `w_i / total`; `None` when the total is zero.
    pub fn draw(&self, rng: &mut Rng) -> Option<usize> {
        (self.total > 0).then(|| self.locate(rng.below(self.total)))
    }

    /// `count` distinct indices by successive weighted draws, each removing
    /// the chosen item. Weights are restored before returning.
    ///
    /// When every weight is zero the draws are uniform over all items.
    pub fn draw_distinct(&mut self, count: usize, rng: &mut Rng) -> Result<Vec<usize>> {
        if self.total == 0 {
            return self.draw_uniform_distinct(count, rng);
        }
        let mut chosen = Vec::with_capacity(count);
        let mut removed = Vec::with_capacity(count);
        let mut failed = false;
        for _ in 0..count {
            match self.draw(rng) {
                Some(i) => {
                    removed.push((i, self.weights[i]));
                    self.set(i, 0);
                    chosen.push(i);
                }
                None => {
                    failed = true;
                    break;
                }
            }
        }
        for &(i, w) in removed.iter().rev() {
            self.set(i, w);
        }
        if failed {
            return Err(Error::NotEnoughCandidates {
                requested: count,
                available: chosen.len(),
            });
        }
        Ok(chosen)
    }

    fn draw_uniform_distinct(&self, count: usize, rng: &mut Rng) -> Result<Vec<usize>> {
        let n = self.len();
        if count > n {
            return Err(Error::NotEnoughCandidates {
                requested: count,
                available: n,
            });
        }
        let mut pool: Vec<usize> = (0..n).collect();
        for k in 0..count {
            let j = k + rng.below((n - k) as u64) as usize;
            pool.swap(k, j);
        }
        pool.truncate(count);
        Ok(pool)
    }
}

fn lowbit(i: usize) -> usize {
    i & i.wrapping_neg()
}
