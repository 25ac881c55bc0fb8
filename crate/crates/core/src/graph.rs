//! Undirected simple graphs with insertion-ordered node indices, the
//! uniform-space feature matrix, and degree histograms.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Undirected simple graph.
///
/// Each node keeps a sorted neighbour list; a node's degree is the length of
/// that list. Edges are also kept in insertion order for dumping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` isolated nodes.
    pub fn with_nodes(n: usize) -> Self {
        Self {
            adjacency: alloc::vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    /// Complete graph on `n` nodes with edges inserted in lexicographic order.
    pub fn complete(n: usize) -> Self {
        let mut g = Self::with_nodes(n);
        for u in 0..n {
            for v in u + 1..n {
                g.push_edge_unchecked(u as u32, v as u32);
            }
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Appends an isolated node and returns its index.
    pub fn add_node(&mut self) -> usize {
        self.adjacency.push(Vec::new());
        self.adjacency.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.node_count();
        if u >= n || v >= n {
            return Err(Error::InvalidEdge {
                u,
                v,
                reason: "endpoint out of range",
            });
        }
        if u == v {
            return Err(Error::InvalidEdge {
                u,
                v,
                reason: "self-loop",
            });
        }
        if self.has_edge(u, v) {
            return Err(Error::InvalidEdge {
                u,
                v,
                reason: "edge already present",
            });
        }
        let (a, b) = (u as u32, v as u32);
        insert_sorted(&mut self.adjacency[u], b);
        insert_sorted(&mut self.adjacency[v], a);
        self.edges.push((a.min(b), a.max(b)));
        Ok(())
    }

    // Caller guarantees the edge is new and u != v.
    fn push_edge_unchecked(&mut self, u: u32, v: u32) {
        insert_sorted(&mut self.adjacency[u as usize], v);
        insert_sorted(&mut self.adjacency[v as usize], u);
        self.edges.push((u.min(v), u.max(v)));
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.node_count() || v >= self.node_count() {
            return false;
        }
        let (short, other) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[short].binary_search(&(other as u32)).is_ok()
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(Vec::len)
    }

    pub fn degree_sum(&self) -> usize {
        self.degrees().sum()
    }

    /// Edges as `(min, max)` pairs in insertion order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Graph with node `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.node_count())?;
        let mut g = Self::with_nodes(self.node_count());
        for &(u, v) in &self.edges {
            g.add_edge(perm[u as usize], perm[v as usize])?;
        }
        Ok(g)
    }

    /// Adds an edge between a freshly added node and distinct existing
    /// targets. Cheaper than [`Graph::add_edge`] because the new node has the
    /// largest index, so every neighbour list stays sorted by a push.
    pub(crate) fn attach_new_node(&mut self, targets: &[usize]) -> Result<usize> {
        let new = self.node_count();
        let mut list: Vec<u32> = Vec::with_capacity(targets.len());
        for &t in targets {
            if t >= new {
                return Err(Error::InvalidEdge {
                    u: new,
                    v: t,
                    reason: "endpoint out of range",
                });
            }
            list.push(t as u32);
        }
        list.sort_unstable();
        if list.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(
                "attachment targets are not distinct",
            ));
        }
        for &t in targets {
            self.adjacency[t].push(new as u32);
            self.edges.push((t as u32, new as u32));
        }
        self.adjacency.push(list);
        Ok(new)
    }
}

fn insert_sorted(list: &mut Vec<u32>, x: u32) {
    match list.last() {
        Some(&last) if last < x => list.push(x),
        None => list.push(x),
        _ => {
            let pos = list.binary_search(&x).unwrap_or_else(|p| p);
            list.insert(pos, x);
        }
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidArgument(
            "permutation length differs from node count",
        ));
    }
    let mut seen = alloc::vec![false; n];
    for &p in perm {
        if p >= n || core::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidArgument("not a permutation"));
        }
    }
    Ok(())
}

/// `n × d` node features stored in uniform space: every entry lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("feature dimension must be positive"));
        }
        Ok(Self {
            dim,
            values: Vec::new(),
        })
    }

    pub fn from_rows(dim: usize, values: Vec<f64>) -> Result<Self> {
        let mut m = Self::new(dim)?;
        if !values.len().is_multiple_of(dim) {
            return Err(Error::ShapeMismatch {
                expected: (values.len() / dim + 1, dim),
                found: (1, values.len()),
            });
        }
        check_unit_interval(&values)?;
        m.values = values;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::ShapeMismatch {
                expected: (1, self.dim),
                found: (1, row.len()),
            });
        }
        check_unit_interval(row)?;
        self.values.extend_from_slice(row);
        Ok(())
    }

    /// Rows reordered so that row `i` moves to position `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.rows())?;
        let mut values = alloc::vec![0.0; self.values.len()];
        for (i, &p) in perm.iter().enumerate() {
            values[p * self.dim..(p + 1) * self.dim].copy_from_slice(self.row(i));
        }
        Ok(Self {
            dim: self.dim,
            values,
        })
    }
}

fn check_unit_interval(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        Some(&value) => Err(Error::Domain {
            what: "uniform-space feature",
            value,
        }),
        None => Ok(()),
    }
}

/// Number of nodes of each degree, plus the total degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeHistogram {
    counts: BTreeMap<usize, usize>,
    degree_sum: usize,
}

impl DegreeHistogram {
    pub fn from_graph(g: &Graph) -> Self {
        Self::from_degrees(g.degrees())
    }

    pub fn from_degrees(degrees: impl IntoIterator<Item = usize>) -> Self {
        let mut h = Self::default();
        for k in degrees {
            *h.counts.entry(k).or_insert(0) += 1;
            h.degree_sum += k;
        }
        h
    }

    /// `n_k`, zero for absent degrees.
    pub fn count(&self, degree: usize) -> usize {
        self.counts.get(&degree).copied().unwrap_or(0)
    }

    pub fn degree_sum(&self) -> usize {
        self.degree_sum
    }

    pub fn node_count(&self) -> usize {
        self.counts.values().sum()
    }

    /// `(k, n_k)` pairs in increasing degree order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }
}

/// Shorthand for [`DegreeHistogram::from_graph`].
pub fn degree_histogram(g: &Graph) -> DegreeHistogram {
    DegreeHistogram::from_graph(g)
}
