//! Plain-text graph dumps.
//!
//! ```text
//! n e d
//! u v            (e edge lines)
//! x_1 … x_d      (n feature lines, uniform scale)
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use bacorr_core::{CorrelationMode, FeatureMatrix, Graph};

use crate::config::Density;

pub fn dump_path(
    dir: &Path,
    density: Density,
    mode: CorrelationMode,
    n: usize,
    replicate: usize,
) -> PathBuf {
    dir.join(format!("{density}-{mode}-n{n}-r{replicate}.txt"))
}

pub fn write_dump_to<W: Write>(mut w: W, g: &Graph, x: &FeatureMatrix) -> std::io::Result<()> {
    writeln!(w, "{} {} {}", g.node_count(), g.edge_count(), x.dim())?;
    for &(u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    for i in 0..x.rows() {
        let line: Vec<String> = x.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()
}

pub fn write_graph_dump(path: &Path, g: &Graph, x: &FeatureMatrix) -> std::io::Result<()> {
    write_dump_to(BufWriter::new(File::create(path)?), g, x)
}

fn invalid(line: usize, msg: impl std::fmt::Display) -> std::io::Error {
    std::io::Error::new(
        std::io::ErrorKind::InvalidData,
        format!("line {line}: {msg}"),
    )
}

fn numbers<T: std::str::FromStr>(line: &str, lineno: usize) -> std::io::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    line.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|e| invalid(lineno, format!("{t:?}: {e}")))
        })
        .collect()
}

pub fn read_dump_from<R: BufRead>(r: R) -> std::io::Result<(Graph, FeatureMatrix)> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> std::io::Result<(usize, String)> {
        match lines.next() {
            Some((i, l)) => Ok((i, l?)),
            None => Err(invalid(
                0,
                format!("unexpected end of file, expected {what}"),
            )),
        }
    };
    let (no, header) = next("header")?;
    let h: Vec<usize> = numbers(&header, no)?;
    let [n, e, d] = h[..] else {
        return Err(invalid(no, "header must be `n e d`"));
    };
    let mut g = Graph::with_nodes(n);
    for _ in 0..e {
        let (no, l) = next("edge")?;
        let uv: Vec<usize> = numbers(&l, no)?;
        let [u, v] = uv[..] else {
            return Err(invalid(no, "edge line must be `u v`"));
        };
        g.add_edge(u, v).map_err(|err| invalid(no, err))?;
    }
    let mut x = FeatureMatrix::new(d).map_err(|err| invalid(no, err))?;
    for _ in 0..n {
        let (no, l) = next("feature row")?;
        let row: Vec<f64> = numbers(&l, no)?;
        if row.len() != d {
            return Err(invalid(
                no,
                format!("expected {d} values, found {}", row.len()),
            ));
        }
        x.push_row(&row).map_err(|err| invalid(no, err))?;
    }
    Ok((g, x))
}

pub fn read_graph_dump(path: &Path) -> std::io::Result<(Graph, FeatureMatrix)> {
    read_dump_from(BufReader::new(File::open(path)?))
}
