//! Plain-text export and import of states and grids.
//!
//! Numbers are written in scientific notation with a fixed number of
//! significant digits and a `.` decimal separator. Reading a file back and
//! writing it again reproduces the same bytes.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// 15 significant digits.
pub fn fmt15(x: f64) -> String {
    format!("{x:.14e}")
}

/// 17 significant digits, enough to round-trip any `f64` exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV table with the given header and rows formatted by `fmt`.
pub fn write_table<W: Write>(
    mut w: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
    fmt: fn(f64) -> String,
) -> Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Reads a CSV table, checking the header, and returns its rows.
pub fn read_table<R: BufRead>(r: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| Error::Parse("empty file".into()))??;
    let got: Vec<&str> = first.split(',').map(str::trim).collect();
    if got != header {
        return Err(Error::Parse(format!("expected header {:?}, found {:?}", header.join(","), first)));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {t:?}: {e}", lineno + 2)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(Error::Parse(format!(
                "line {}: expected {} columns, found {}",
                lineno + 2,
                header.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_significant_digits() {
        assert_eq!(fmt15(1.0), "1.00000000000000e0");
        assert_eq!(fmt17(-0.1), "-1.0000000000000001e-1");
        assert_eq!(fmt17(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn table_errors() {
        let bad_header = "a,c\n1,2\n";
        assert!(read_table(bad_header.as_bytes(), &["a", "b"]).is_err());
        let short_row = "a,b\n1\n";
        assert!(read_table(short_row.as_bytes(), &["a", "b"]).is_err());
        let not_number = "a,b\n1,x\n";
        assert!(read_table(not_number.as_bytes(), &["a", "b"]).is_err());
        let ok = "a,b\n1,2\n\n3,4\n";
        assert_eq!(read_table(ok.as_bytes(), &["a", "b"]).unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    }
}
