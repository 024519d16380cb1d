//! Reading and writing raw comparison CSV files (`i,j,value`).

use std::io::{Read, Write};
use std::path::Path;

use crate::model::{Observation, RawComparisons};
use crate::{Error, Result};

const HEADER: [&str; 3] = ["i", "j", "value"];

/// Parses `i,j,value` rows. When `n` is `None` it is inferred as the largest
/// index plus one.
pub fn read_raw_comparisons<R: Read>(reader: R, n: Option<usize>) -> Result<RawComparisons> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_error(&e, 1))?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `i,j,value`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut obs = Vec::new();
    for (row, rec) in rdr.deserialize::<Observation>().enumerate() {
        // Header is line 1.
        let line = row as u64 + 2;
        obs.push(rec.map_err(|e| parse_error(&e, line))?);
    }
    let n = match n {
        Some(n) => n,
        None => obs.iter().map(|o| o.i.max(o.j) + 1).max().unwrap_or(0),
    };
    RawComparisons::new(n, obs)
}

fn parse_error(e: &csv::Error, fallback: u64) -> Error {
    let line = e.position().map_or(fallback, |p| p.line());
    let message = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        _ => e.to_string(),
    };
    Error::Parse { line, message }
}

pub fn read_raw_comparisons_file(path: &Path, n: Option<usize>) -> Result<RawComparisons> {
    read_raw_comparisons(std::fs::File::open(path)?, n)
}

pub fn write_raw_comparisons<W: Write>(raw: &RawComparisons, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for o in raw.observations() {
        w.serialize(o)?;
    }
    if raw.observations().is_empty() {
        w.write_record(HEADER)?;
    }
    w.flush()?;
    Ok(())
}
