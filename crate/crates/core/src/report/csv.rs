use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::bench::{SweepResult, SweepRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 6] = [
    "gamma_prime",
    "param",
    "method",
    "mean_hpi",
    "stderr_hpi",
    "n_seeds",
];

/// Decimal rendering of `v` rounded to `digits` significant digits, without
/// exponent or trailing zeros.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    // Round through scientific notation, then let `Display` print the
    // shortest decimal that reproduces the rounded value.
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), v)
        .parse()
        .expect("formatted float parses");
    rounded.to_string()
}

fn to_csv_error(path: &Path, e: ::csv::Error) -> Error {
    match e.into_kind() {
        ::csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            line: 0,
            message: format!("{}: {other:?}", path.display()),
        },
    }
}

/// Writes `result` to any writer in the sweep CSV schema.
pub fn write_csv_to<W: Write>(
    result: &SweepResult,
    writer: W,
) -> std::result::Result<(), ::csv::Error> {
    let mut rows: Vec<&SweepRow> = result.rows.iter().collect();
    rows.sort_by(|a, b| {
        (&a.method, &a.param)
            .cmp(&(&b.method, &b.param))
            .then(a.gamma_prime.total_cmp(&b.gamma_prime))
    });
    let mut w = ::csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            format_significant(r.gamma_prime, 10),
            r.param.clone(),
            r.method.clone(),
            format_significant(r.mean_hpi, 10),
            format_significant(r.stderr_hpi, 10),
            r.n_seeds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the rows of `result`, sorted by method, parameter and γ′.
pub fn write_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if result.rows.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot write an empty sweep result".into(),
        ));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(result, file).map_err(|e| to_csv_error(path, e))
}

pub(crate) fn read_csv_from<R: Read>(reader: R) -> Result<SweepResult> {
    let mut r = ::csv::Reader::from_reader(reader);
    let header = r.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let real = |j: usize| -> Result<f64> {
            record[j].parse().map_err(|_| Error::Parse {
                line,
                message: format!(
                    "`{}` is not a number in column {}",
                    &record[j], CSV_HEADER[j]
                ),
            })
        };
        rows.push(SweepRow {
            gamma_prime: real(0)?,
            param: record[1].to_string(),
            method: record[2].to_string(),
            mean_hpi: real(3)?,
            stderr_hpi: real(4)?,
            n_seeds: record[5].parse().map_err(|_| Error::Parse {
                line,
                message: format!("`{}` is not a seed count", &record[5]),
            })?,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyEvaluationSet);
    }
    Ok(SweepResult {
        rows,
        ..SweepResult::default()
    })
}

/// Reads a sweep CSV back into a result (rows only).
pub fn read_csv(path: impl AsRef<Path>) -> Result<SweepResult> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(file)
}
