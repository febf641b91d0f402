use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A single report: one flat JSON object, or a CSV header and one row.
pub fn write_report<T: Serialize>(out: &mut dyn Write, format: Format, report: &T) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.serialize(report)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// A table with run metadata. JSON nests the rows under `rows` next to the
/// metadata fields; CSV puts the metadata on a leading `#` comment line.
pub fn write_table<M: Serialize, T: Serialize>(
    out: &mut dyn Write,
    format: Format,
    meta: &M,
    rows: &[T],
) -> Result<()> {
    let Value::Object(mut fields) = serde_json::to_value(meta)? else {
        return Err(CliError::Output("table metadata must be a struct".into()));
    };
    match format {
        Format::Json => {
            fields.insert("rows".into(), serde_json::to_value(rows)?);
            serde_json::to_writer_pretty(&mut *out, &fields)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let pairs: Vec<String> = fields
                .iter()
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k}={s}"),
                    other => format!("{k}={other}"),
                })
                .collect();
            writeln!(out, "# {}", pairs.join(" "))?;
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Meta {
        command: &'static str,
        seed: u64,
    }

    #[derive(Serialize)]
    struct Row {
        a: f64,
        b: Option<f64>,
    }

    #[test]
    fn table_layouts() {
        let meta = Meta {
            command: "t",
            seed: 3,
        };
        let rows = [
            Row { a: 1.5, b: None },
            Row {
                a: 2.0,
                b: Some(0.25),
            },
        ];
        let mut csv = Vec::new();
        write_table(&mut csv, Format::Csv, &meta, &rows).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "# command=t seed=3\na,b\n1.5,\n2.0,0.25\n"
        );
        let mut json = Vec::new();
        write_table(&mut json, Format::Json, &meta, &rows).unwrap();
        let v: Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(v["seed"], 3);
        assert_eq!(v["rows"][1]["b"], 0.25);
        assert!(v["rows"][0]["b"].is_null());
    }
}
