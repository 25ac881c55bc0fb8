//! Tail standard-deviation ratio as a convergence summary for one case.

use std::collections::BTreeMap;
use std::fmt;

use bacorr_core::{CorrelationMode, ModelKind};

use crate::config::Density;
use crate::results::{SweepResult, SweepRow};
use crate::sweep::Case;

/// A case converges when its tail ratio falls below this.
pub const CONVERGENCE_THRESHOLD: f64 = 0.5;
/// The reference size is the smallest one at or above this.
pub const REFERENCE_MIN_N: usize = 100;
pub const MIN_SIZES: usize = 4;
const DENOMINATOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Converging,
    NotConverging,
    /// The reference spread is numerically zero.
    NotApplicable,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Self::Converging => "Converging",
            Self::NotConverging => "NotConverging",
            Self::NotApplicable => "NotApplicable",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostic {
    /// Max-class std at the largest size over max-class std at the reference
    /// size; NaN when not applicable.
    pub tail_std_ratio: f64,
    pub reference_n: usize,
    pub largest_n: usize,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagnosticError {
    #[error("no rows")]
    Empty,
    #[error("rows span more than one case")]
    MixedCases,
    #[error("need at least {MIN_SIZES} sizes, found {0}")]
    TooFewSizes(usize),
    #[error("no size of at least {REFERENCE_MIN_N}")]
    NoReferenceSize,
}

/// Largest per-class std at each size.
pub fn max_class_std(rows: &[SweepRow]) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for r in rows {
        let e = out.entry(r.n).or_insert(0.0f64);
        *e = e.max(r.std_prob);
    }
    out
}

pub fn convergence_diagnostic(rows: &[SweepRow]) -> Result<Diagnostic, DiagnosticError> {
    let first = rows.first().ok_or(DiagnosticError::Empty)?;
    if rows.iter().any(|r| r.case() != first.case()) {
        return Err(DiagnosticError::MixedCases);
    }
    let by_n = max_class_std(rows);
    if by_n.len() < MIN_SIZES {
        return Err(DiagnosticError::TooFewSizes(by_n.len()));
    }
    let (&reference_n, &reference) = by_n
        .range(REFERENCE_MIN_N..)
        .next()
        .ok_or(DiagnosticError::NoReferenceSize)?;
    let (&largest_n, &tail) = by_n.iter().next_back().expect("non-empty");
    if reference < DENOMINATOR_FLOOR {
        return Ok(Diagnostic {
            tail_std_ratio: f64::NAN,
            reference_n,
            largest_n,
            classification: Classification::NotApplicable,
        });
    }
    let ratio = tail / reference;
    Ok(Diagnostic {
        tail_std_ratio: ratio,
        reference_n,
        largest_n,
        classification: if ratio < CONVERGENCE_THRESHOLD {
            Classification::Converging
        } else {
            Classification::NotConverging
        },
    })
}

/// Diagnostic of every case in `result`, in row order.
pub fn diagnose_all(result: &SweepResult) -> Vec<(Case, Result<Diagnostic, DiagnosticError>)> {
    result
        .cases()
        .into_iter()
        .map(|c| (c, convergence_diagnostic(&result.case_rows(c))))
        .collect()
}

/// Mean over sizes `≥ min_n` of the max-class std of a case.
pub fn mean_max_class_std(result: &SweepResult, case: Case, min_n: usize) -> Option<f64> {
    let by_n = max_class_std(&result.case_rows(case));
    let tail: Vec<f64> = by_n.range(min_n..).map(|(_, &s)| s).collect();
    (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64)
}

/// GAT and GCN tail spread side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpread {
    pub density: Density,
    pub mode: CorrelationMode,
    pub gat: f64,
    pub gcn: f64,
}

pub fn compare_model_spread(result: &SweepResult, min_n: usize) -> Vec<ModelSpread> {
    let mut out = Vec::new();
    for case in result
        .cases()
        .into_iter()
        .filter(|c| c.model == ModelKind::Gat)
    {
        let other = Case {
            model: ModelKind::Gcn,
            ..case
        };
        if let (Some(gat), Some(gcn)) = (
            mean_max_class_std(result, case, min_n),
            mean_max_class_std(result, other, min_n),
        ) {
            out.push(ModelSpread {
                density: case.density,
                mode: case.mode,
                gat,
                gcn,
            });
        }
    }
    out
}
