//! File formats: dataset CSV, edge lists, JSONL records and CSV tables.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::targets::Graph;

fn parse_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), msg: msg.into() }
}

/// Centers each column and scales it to unit population variance; constant columns are only centered.
pub fn standardize(rows: &mut [Vec<f64>]) {
    let Some(d) = rows.first().map(Vec::len) else { return };
    let n = rows.len() as f64;
    for k in 0..d {
        let mean = rows.iter().map(|r| r[k]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / n;
        let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
        for r in rows.iter_mut() {
            r[k] = (r[k] - mean) / sd;
        }
    }
}

/// Reads a numeric matrix; a first row that does not parse as numbers is taken as a header.
pub fn read_dataset_csv(path: &Path, standardize_columns: bool) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(parse_err(path, format!("non-finite value on line {}", line + 1)));
                }
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        return Err(parse_err(path, format!("line {} has {} columns, expected {}", line + 1, row.len(), first.len())));
                    }
                }
                rows.push(row);
            }
            Err(_) if line == 0 => {}
            Err(e) => return Err(parse_err(path, format!("line {}: {e}", line + 1))),
        }
    }
    if standardize_columns {
        standardize(&mut rows);
    }
    Ok(rows)
}

pub fn write_dataset_csv(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an `N q` header followed by one `u v` line per edge, vertices numbered from 1.
///
/// Blank lines and lines starting with `#` are skipped; `q` may be omitted from the header.
pub fn read_edge_list(path: &Path) -> Result<(Graph, Option<usize>)> {
    let file = BufReader::new(File::open(path)?);
    let mut header: Option<(usize, Option<usize>)> = None;
    let mut edges = Vec::new();
    for (k, line) in file.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums = line
            .split_whitespace()
            .map(str::parse::<usize>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(path, format!("line {}: {e}", k + 1)))?;
        match (header, nums.as_slice()) {
            (None, [n]) => header = Some((*n, None)),
            (None, [n, q]) => header = Some((*n, Some(*q))),
            (Some((n, _)), [u, v]) => {
                if *u == 0 || *v == 0 || *u > n || *v > n {
                    return Err(parse_err(path, format!("line {}: vertex outside 1..={n}", k + 1)));
                }
                edges.push((u - 1, v - 1));
            }
            _ => return Err(parse_err(path, format!("line {}: malformed", k + 1))),
        }
    }
    let (n, q) = header.ok_or_else(|| parse_err(path, "missing 'N q' header"))?;
    Ok((Graph::new(n, &edges)?, q))
}

pub fn write_edge_list(path: &Path, graph: &Graph, q: usize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{} {}", graph.n_vertices(), q)?;
    for (u, v) in graph.edges() {
        writeln!(w, "{} {}", u + 1, v + 1)?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON document per line.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (k, line) in file.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| parse_err(path, format!("line {}: {e}", k + 1)))?);
    }
    Ok(out)
}

/// Writes rows with a header taken from the field names.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
