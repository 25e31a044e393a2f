//! The `.fset` point-set format.
//!
//! ```text
//! q d
//! x_1 x_2 … x_d
//! …
//! ```
//!
//! Line 1 holds the prime modulus and the dimension. Every further nonempty
//! line is one point, `d` integers in `[0, q)`. Duplicate points are
//! rejected. The writer emits points in ascending layout order, so equal
//! sets serialize to identical bytes.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::space::Space;

use super::PointSet;

pub fn parse_fset(text: &str) -> Result<PointSet> {
    read_fset(text.as_bytes())
}

pub fn read_fset(reader: impl Read) -> Result<PointSet> {
    let mut lines = BufReader::new(reader).lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::parse(1, "missing header `q d`")),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [q_text, d_text] = fields[..] else {
        return Err(Error::parse(1, "header must be `q d`"));
    };
    let q: u32 = q_text
        .parse()
        .map_err(|_| Error::parse(1, format!("bad modulus `{q_text}`")))?;
    let d: usize = d_text
        .parse()
        .map_err(|_| Error::parse(1, format!("bad dimension `{d_text}`")))?;
    let modulus = FieldModulus::new(q).map_err(|e| Error::parse(1, e.to_string()))?;
    let space = Space::new(modulus, d).map_err(|e| Error::parse(1, e.to_string()))?;

    let mut seen = HashSet::new();
    let mut coords = vec![0u32; d];
    for (offset, line) in lines.enumerate() {
        let lineno = offset + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut n = 0;
        for token in line.split_whitespace() {
            if n == d {
                return Err(Error::parse(lineno, format!("expected {d} coordinates")));
            }
            let c: u32 = token
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad coordinate `{token}`")))?;
            if c >= q {
                return Err(Error::parse(
                    lineno,
                    format!("coordinate {c} is not in [0, {q})"),
                ));
            }
            coords[n] = c;
            n += 1;
        }
        if n != d {
            return Err(Error::parse(lineno, format!("expected {d} coordinates, found {n}")));
        }
        if !seen.insert(space.encode(&coords)) {
            return Err(Error::parse(lineno, "duplicate point"));
        }
    }
    PointSet::from_indices(space, seen)
}

pub fn to_fset_string(e: &PointSet) -> String {
    let space = e.space();
    let mut out = format!("{} {}\n", space.q(), space.dim());
    for p in e.points() {
        let mut first = true;
        for c in p.coords() {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{c}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn write_fset(e: &PointSet, mut writer: impl Write) -> Result<()> {
    writer.write_all(to_fset_string(e).as_bytes())?;
    Ok(())
}

pub fn read_fset_file(path: impl AsRef<Path>) -> Result<PointSet> {
    read_fset(fs::File::open(path)?)
}

pub fn write_fset_file(e: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_fset_string(e))?;
    Ok(())
}
