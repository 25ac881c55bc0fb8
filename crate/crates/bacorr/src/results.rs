//! Aggregated sweep rows and their CSV form.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use bacorr_core::{CorrelationMode, ModelKind};

use crate::config::Density;
use crate::sweep::Case;

pub const CSV_HEADER: [&str; 8] = [
    "model",
    "density",
    "corr_mode",
    "n",
    "class",
    "mean_prob",
    "std_prob",
    "replicates",
];

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Class-probability statistics of one case at one size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub model: ModelKind,
    pub density: Density,
    pub mode: CorrelationMode,
    pub n: usize,
    pub class: usize,
    pub mean_prob: f64,
    /// Unbiased (`k − 1`) sample standard deviation.
    pub std_prob: f64,
    /// Replicates that entered the statistics.
    pub replicates: usize,
}

impl SweepRow {
    pub fn case(&self) -> Case {
        Case {
            model: self.model,
            density: self.density,
            mode: self.mode,
        }
    }

    fn sort_key(&self) -> (&'static str, &'static str, &'static str, usize, usize) {
        (
            self.model.name(),
            self.density.name(),
            self.mode.name(),
            self.n,
            self.class,
        )
    }
}

/// Rows kept sorted by the names of model, density and correlation mode,
/// then by size and class.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn from_rows(mut rows: Vec<SweepRow>) -> Self {
        rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Self { rows }
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct cases in row order.
    pub fn cases(&self) -> Vec<Case> {
        let mut out: Vec<Case> = Vec::new();
        for r in &self.rows {
            if out.last() != Some(&r.case()) {
                out.push(r.case());
            }
        }
        out
    }

    pub fn case_rows(&self, case: Case) -> Vec<SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.case() == case)
            .copied()
            .collect()
    }
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv_to<W: Write>(result: &SweepResult, out: W) -> Result<(), CsvError> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in result.rows() {
        w.write_record([
            r.model.name().to_string(),
            r.density.name().to_string(),
            r.mode.name().to_string(),
            r.n.to_string(),
            r.class.to_string(),
            float(r.mean_prob),
            float(r.std_prob),
            r.replicates.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<(), CsvError> {
    write_csv_to(result, BufWriter::new(File::create(path)?))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T, CsvError>
where
    T::Err: std::fmt::Display,
{
    rec[i].parse().map_err(|e| CsvError::Parse {
        line,
        message: format!("column {}: cannot parse {:?}: {e}", CSV_HEADER[i], &rec[i]),
    })
}

pub fn read_csv_from<R: Read>(input: R) -> Result<SweepResult, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    match records.next().transpose()? {
        Some(h) if h.iter().eq(CSV_HEADER) => {}
        Some(h) => {
            return Err(CsvError::Parse {
                line: 1,
                message: format!("unexpected header {:?}", h.iter().collect::<Vec<_>>()),
            })
        }
        None => {
            return Err(CsvError::Parse {
                line: 1,
                message: "missing header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != CSV_HEADER.len() {
            return Err(CsvError::Parse {
                line,
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), rec.len()),
            });
        }
        let row = SweepRow {
            model: field(&rec, 0, line)?,
            density: field(&rec, 1, line)?,
            mode: field(&rec, 2, line)?,
            n: field(&rec, 3, line)?,
            class: field(&rec, 4, line)?,
            mean_prob: field(&rec, 5, line)?,
            std_prob: field(&rec, 6, line)?,
            replicates: field(&rec, 7, line)?,
        };
        if !(0.0..=1.0).contains(&row.mean_prob)
            || !(row.std_prob >= 0.0 && row.std_prob.is_finite())
        {
            return Err(CsvError::Parse {
                line,
                message:
                    "mean_prob must lie in [0, 1] and std_prob must be finite and non-negative"
                        .into(),
            });
        }
        rows.push(row);
    }
    Ok(SweepResult::from_rows(rows))
}

pub fn read_csv(path: &Path) -> Result<SweepResult, CsvError> {
    read_csv_from(File::open(path)?)
}
