//! CSV ingestion: comma-separated, `.` decimal, `#` comment lines, optional
//! probability column named `prob`.

use anyhow::{bail, Context, Result};
use csv::{ReaderBuilder, StringRecord, Trim};

pub struct Samples {
    pub values: Vec<f64>,
    pub probs: Option<Vec<f64>>,
}

pub struct Scenarios {
    pub assets: Vec<String>,
    /// Row-major loss matrix, one row per scenario.
    pub rows: Vec<Vec<f64>>,
    pub probs: Option<Vec<f64>>,
}

fn read_records(path: &str) -> Result<Vec<StringRecord>> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(Trim::All)
        .flexible(false)
        .from_path(path)
        .with_context(|| format!("cannot read {path}"))?;
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.with_context(|| format!("malformed CSV in {path}"))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        records.push(record);
    }
    if records.is_empty() {
        bail!("{path}: no data rows");
    }
    Ok(records)
}

fn parse_cell(cell: &str, path: &str, row: usize) -> Result<f64> {
    cell.parse::<f64>()
        .with_context(|| format!("{path}: non-numeric cell {cell:?} in data row {row}"))
}

fn is_numeric_row(record: &StringRecord) -> bool {
    record.iter().all(|f| f.parse::<f64>().is_ok())
}

/// One numeric column, optional second column of probabilities (or a header
/// naming a `prob` column).
pub fn read_samples(path: &str) -> Result<Samples> {
    let records = read_records(path)?;
    let (header, data) = if is_numeric_row(&records[0]) {
        (None, &records[..])
    } else {
        (Some(&records[0]), &records[1..])
    };
    if data.is_empty() {
        bail!("{path}: header but no data rows");
    }
    let width = data[0].len();
    let prob_col = match header {
        Some(h) => h.iter().position(|name| name == "prob"),
        None if width >= 2 => Some(1),
        None => None,
    };
    let value_col = match header {
        Some(h) => h
            .iter()
            .position(|name| name != "prob")
            .with_context(|| format!("{path}: no value column"))?,
        None => 0,
    };
    if width <= value_col.max(prob_col.unwrap_or(0)) {
        bail!("{path}: rows have {width} columns");
    }

    let mut values = Vec::with_capacity(data.len());
    let mut probs = prob_col.map(|_| Vec::with_capacity(data.len()));
    for (i, record) in data.iter().enumerate() {
        values.push(parse_cell(&record[value_col], path, i + 1)?);
        if let (Some(col), Some(p)) = (prob_col, probs.as_mut()) {
            p.push(parse_cell(&record[col], path, i + 1)?);
        }
    }
    Ok(Samples { values, probs })
}

/// One numeric column of dual-density values, aligned row-wise with the
/// samples file.
pub fn read_dual(path: &str) -> Result<Vec<f64>> {
    let records = read_records(path)?;
    let data = if is_numeric_row(&records[0]) {
        &records[..]
    } else {
        &records[1..]
    };
    if data.is_empty() {
        bail!("{path}: header but no data rows");
    }
    data.iter()
        .enumerate()
        .map(|(i, record)| parse_cell(&record[0], path, i + 1))
        .collect()
}

/// Header of asset names (a `prob` column holds scenario probabilities),
/// one row of per-asset losses per scenario.
pub fn read_scenarios(path: &str) -> Result<Scenarios> {
    let records = read_records(path)?;
    if is_numeric_row(&records[0]) {
        bail!("{path}: scenario CSV needs a header row of asset names");
    }
    let header = &records[0];
    let prob_col = header.iter().position(|name| name == "prob");
    let assets: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != prob_col)
        .map(|(_, name)| name.to_string())
        .collect();
    if assets.is_empty() {
        bail!("{path}: no asset columns");
    }
    let data = &records[1..];
    if data.is_empty() {
        bail!("{path}: header but no data rows");
    }

    let mut rows = Vec::with_capacity(data.len());
    let mut probs = prob_col.map(|_| Vec::with_capacity(data.len()));
    for (i, record) in data.iter().enumerate() {
        if record.len() != header.len() {
            bail!("{path}: row {} has {} cells, expected {}", i + 1, record.len(), header.len());
        }
        let mut row = Vec::with_capacity(assets.len());
        for (j, cell) in record.iter().enumerate() {
            let value = parse_cell(cell, path, i + 1)?;
            if Some(j) == prob_col {
                probs.as_mut().unwrap().push(value);
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }
    Ok(Scenarios {
        assets,
        rows,
        probs,
    })
}

/// Comma-separated bound list, e.g. `0.1,0,0.2`.
pub fn parse_bounds(text: &str, n_assets: usize, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid {what} bound {p:?}"))
        })
        .collect::<Result<_>>()?;
    if parts.len() != n_assets {
        bail!("{what} bounds list has {} entries, expected {n_assets}", parts.len());
    }
    Ok(parts)
}
