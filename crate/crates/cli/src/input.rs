//! Price panels and pair files.
//!
//! A panel is a CSV file with header `date,<T>_open,<T>_close,...` in any
//! column order. Dates are compared as strings, so ISO 8601 (`2024-01-31`) is
//! expected, and must be strictly increasing. A price cell that is empty or
//! reads `NA`, `NaN` or `null` is missing.
//!
//! A pair file holds two numeric columns separated by a comma or by
//! whitespace. The first line may be a header; blank lines and lines starting
//! with `#` are ignored.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReturnMode {
    /// `ln(close / open)` on the same date.
    CloseOpen,
    /// `ln(close / previous close)`; the first date has no return.
    CloseClose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    pub tickers: Vec<String>,
    pub dates: Vec<String>,
    /// `open[t][row]`, `None` when missing.
    pub open: Vec<Vec<Option<f64>>>,
    pub close: Vec<Vec<Option<f64>>>,
}

/// Log-returns of one ticker, aligned with the panel dates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub ticker: String,
    pub values: Vec<Option<f64>>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty()
        || ["na", "nan", "null"]
            .iter()
            .any(|m| cell.eq_ignore_ascii_case(m))
}

pub fn read_panel(path: &Path) -> Result<PricePanel> {
    parse_panel(&read(path)?, path)
}

pub fn parse_panel(text: &str, path: &Path) -> Result<PricePanel> {
    let parse_err = |line: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if !header
        .get(0)
        .is_some_and(|h| h.eq_ignore_ascii_case("date"))
    {
        return Err(parse_err(1, "first column must be `date`".into()));
    }

    // (ticker, open column, close column)
    let mut columns: Vec<(String, Option<usize>, Option<usize>)> = Vec::new();
    for (i, name) in header.iter().enumerate().skip(1) {
        let (ticker, is_open) = if let Some(t) = name.strip_suffix("_open") {
            (t, true)
        } else if let Some(t) = name.strip_suffix("_close") {
            (t, false)
        } else {
            return Err(parse_err(
                1,
                format!("column {name:?} is neither <ticker>_open nor <ticker>_close"),
            ));
        };
        let pos = match columns.iter().position(|c| c.0 == ticker) {
            Some(p) => p,
            None => {
                columns.push((ticker.to_string(), None, None));
                columns.len() - 1
            }
        };
        let slot = if is_open {
            &mut columns[pos].1
        } else {
            &mut columns[pos].2
        };
        if slot.replace(i).is_some() {
            return Err(parse_err(1, format!("duplicate column {name:?}")));
        }
    }
    let mut cols = Vec::with_capacity(columns.len());
    for (ticker, open, close) in columns {
        match (open, close) {
            (Some(o), Some(c)) => cols.push((ticker, o, c)),
            _ => {
                return Err(parse_err(
                    1,
                    format!("ticker {ticker:?} needs both _open and _close columns"),
                ))
            }
        }
    }

    let mut panel = PricePanel {
        tickers: cols.iter().map(|c| c.0.clone()).collect(),
        dates: Vec::new(),
        open: vec![Vec::new(); cols.len()],
        close: vec![Vec::new(); cols.len()],
    };
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let date = record[0].to_string();
        if let Some(prev) = panel.dates.last() {
            if date <= *prev {
                return Err(parse_err(
                    line,
                    format!(
                        "date {date} does not follow {prev}; dates must be strictly increasing"
                    ),
                ));
            }
        }
        for (t, (ticker, o, c)) in cols.iter().enumerate() {
            for (col, store) in [(*o, &mut panel.open[t]), (*c, &mut panel.close[t])] {
                let cell = &record[col];
                let value = if is_missing(cell) {
                    None
                } else {
                    let v: f64 = cell
                        .parse()
                        .map_err(|_| parse_err(line, format!("{:?} is not a number", cell)))?;
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(CliError::Data(format!(
                            "{}:{line}: non-positive price {cell} for {ticker} on {date}",
                            path.display()
                        )));
                    }
                    Some(v)
                };
                store.push(value);
            }
        }
        panel.dates.push(date);
    }
    Ok(panel)
}

/// Per-ticker log-returns; a return is missing when any price it uses is.
pub fn ingest_returns(panel: &PricePanel, mode: ReturnMode) -> Vec<ReturnSeries> {
    panel
        .tickers
        .iter()
        .enumerate()
        .map(|(t, ticker)| {
            let (open, close) = (&panel.open[t], &panel.close[t]);
            let values = (0..close.len())
                .map(|row| {
                    let base = match mode {
                        ReturnMode::CloseOpen => open[row],
                        ReturnMode::CloseClose => row.checked_sub(1).and_then(|p| close[p]),
                    };
                    Some((close[row]? / base?).ln())
                })
                .collect();
            ReturnSeries {
                ticker: ticker.clone(),
                values,
            }
        })
        .collect()
}

/// Observations present in both series.
pub fn pairwise_complete(a: &ReturnSeries, b: &ReturnSeries) -> (Vec<f64>, Vec<f64>) {
    a.values
        .iter()
        .zip(&b.values)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .unzip()
}

pub fn read_pair_file(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    parse_pair_file(&read(path)?, path)
}

pub fn parse_pair_file(text: &str, path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let parse_err = |line: usize, message: String| CliError::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = if line.contains(',') {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        if fields.len() != 2 {
            return Err(parse_err(
                i + 1,
                format!("expected 2 columns, found {}", fields.len()),
            ));
        }
        match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
            (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => {
                xs.push(x);
                ys.push(y);
            }
            (Ok(_), Ok(_)) => return Err(parse_err(i + 1, "non-finite value".into())),
            // A non-numeric first line is the header.
            _ if first => {}
            _ => return Err(parse_err(i + 1, format!("non-numeric row {line:?}"))),
        }
        first = false;
    }
    if xs.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no observations",
            path.display()
        )));
    }
    Ok((xs, ys))
}
