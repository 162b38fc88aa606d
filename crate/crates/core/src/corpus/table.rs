//! Comma-separated feature tables: header `articleId,<columns...>`, one row
//! per article. Values use the shortest decimal that round-trips; NaN is
//! written as [`NA_TOKEN`].

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

pub const NA_TOKEN: &str = "NA";
const ID_COLUMN: &str = "articleId";

pub fn write_features(matrix: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_table(path, &matrix.column_names, matrix.nrows(), |i| {
        (
            matrix.row_ids[i].as_str(),
            matrix
                .values
                .row(i)
                .iter()
                .map(|&v| format_value(v))
                .collect(),
        )
    })
}

pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let (columns, ids, rows) = read_table(path, |cell, row| {
        if cell == NA_TOKEN {
            Ok(f64::NAN)
        } else {
            cell.parse::<f64>()
                .map_err(|_| Error::parse(path, row, format!("invalid number `{cell}`")))
        }
    })?;
    FeatureMatrix::from_rows(ids, columns, &rows)
}

/// Per-cell validity flags: `true` = the value was defaulted.
pub fn write_flags(
    row_ids: &[String],
    column_names: &[String],
    flags: &[Vec<bool>],
    path: impl AsRef<Path>,
) -> Result<()> {
    write_table(path.as_ref(), column_names, row_ids.len(), |i| {
        (
            row_ids[i].as_str(),
            flags[i]
                .iter()
                .map(|&f| if f { "1" } else { "0" }.to_string())
                .collect(),
        )
    })
}

pub fn read_flags(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<String>, Vec<Vec<bool>>)> {
    let path = path.as_ref();
    read_table(path, |cell, row| match cell {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::parse(path, row, format!("invalid flag `{other}`"))),
    })
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        NA_TOKEN.to_string()
    } else {
        // Display for f64 is the shortest representation that parses back exactly
        format!("{v}")
    }
}

fn write_table<'a, F>(path: &Path, columns: &[String], n: usize, row: F) -> Result<()>
where
    F: Fn(usize) -> (&'a str, Vec<String>),
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let to_err = |e: csv::Error| Error::Validation(format!("{}: {e}", path.display()));
    let mut header = vec![ID_COLUMN.to_string()];
    header.extend(columns.iter().cloned());
    w.write_record(&header).map_err(to_err)?;
    for i in 0..n {
        let (id, cells) = row(i);
        let mut record = Vec::with_capacity(cells.len() + 1);
        record.push(id.to_string());
        record.extend(cells);
        w.write_record(&record).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

type Table<T> = (Vec<String>, Vec<String>, Vec<Vec<T>>);

fn read_table<T, F>(path: &Path, parse: F) -> Result<Table<T>>
where
    F: Fn(&str, usize) -> Result<T>,
{
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let header = r
        .headers()
        .map_err(|e| Error::parse(path, 0, e.to_string()))?
        .clone();
    if header.get(0) != Some(ID_COLUMN) {
        return Err(Error::parse(
            path,
            0,
            format!("first column must be `{ID_COLUMN}`"),
        ));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let row_no = i + 1;
        let record = record.map_err(|e| Error::parse(path, row_no, e.to_string()))?;
        if record.len() != header.len() {
            return Err(Error::parse(
                path,
                row_no,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        ids.push(record[0].to_string());
        let values = record
            .iter()
            .skip(1)
            .map(|cell| parse(cell, row_no))
            .collect::<Result<Vec<T>>>()?;
        rows.push(values);
    }
    Ok((columns, ids, rows))
}
