//! File formats.
//!
//! * Sets: a header line `N=<N>` followed by the members, one per line, ascending.
//! * Functions: CSV `x,re,im` with one row per `x ∈ [N]`.
//! * Factors: CSV `x,atom_id` plus a JSON sidecar `{"schema": 1, "N": .., "meta": {d, M, q, phases}}`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::{Factor, FactorMeta};
use crate::function::BoundedFunction;
use crate::set::IntegerSet;

pub const SCHEMA: u32 = 1;

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn write_set<W: Write>(mut w: W, a: &IntegerSet) -> Result<()> {
    writeln!(w, "N={}", a.len())?;
    for x in a.members() {
        writeln!(w, "{x}")?;
    }
    Ok(())
}

pub fn read_set<R: Read>(r: R) -> Result<IntegerSet> {
    let mut lines = BufReader::new(r).lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty set file".into()))??;
    let n: usize = header
        .trim()
        .strip_prefix("N=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header {header:?}, expected N=<N>")))?;
    if n == 0 {
        return Err(Error::Parse("N must be positive".into()));
    }
    let mut a = IntegerSet::new(n);
    let mut prev = 0usize;
    for (i, line) in lines.enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let x: i64 = t.parse().map_err(|_| Error::Parse(format!("line {}: {t:?} is not an integer", i + 2)))?;
        if x < 1 || x as u64 > n as u64 {
            return Err(Error::OutOfRange { value: x, n });
        }
        let x = x as usize;
        if x <= prev {
            return Err(Error::Parse(format!("line {}: members must be strictly ascending", i + 2)));
        }
        prev = x;
        a.insert(x);
    }
    Ok(a)
}

#[derive(Serialize, Deserialize)]
struct FunctionRow {
    x: usize,
    re: f64,
    im: f64,
}

pub fn write_function<W: Write>(w: W, f: &BoundedFunction) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for (i, v) in f.values().iter().enumerate() {
        wr.serialize(FunctionRow { x: i + 1, re: v.re, im: v.im }).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

/// Rows must list `x = 1, 2, .., N` in order.
pub fn read_function<R: Read>(r: R) -> Result<BoundedFunction> {
    let mut rd = csv::Reader::from_reader(r);
    let mut values = Vec::new();
    for row in rd.deserialize::<FunctionRow>() {
        let row = row.map_err(csv_err)?;
        if row.x != values.len() + 1 {
            return Err(Error::Parse(format!("expected x = {}, found {}", values.len() + 1, row.x)));
        }
        values.push(Complex64::new(row.re, row.im));
    }
    if values.is_empty() {
        return Err(Error::Parse("function file has no rows".into()));
    }
    BoundedFunction::from_values(values)
}

#[derive(Serialize, Deserialize)]
struct AtomRow {
    x: usize,
    atom_id: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSidecar {
    pub schema: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub atoms: usize,
    pub meta: Option<FactorMeta>,
}

pub fn write_factor<W: Write, J: Write>(csv_out: W, json_out: J, b: &Factor) -> Result<()> {
    let mut wr = csv::Writer::from_writer(csv_out);
    for (i, &id) in b.atom_ids().iter().enumerate() {
        wr.serialize(AtomRow { x: i + 1, atom_id: id }).map_err(csv_err)?;
    }
    wr.flush()?;
    let side = FactorSidecar { schema: SCHEMA, n: b.n(), atoms: b.atom_count(), meta: b.meta().cloned() };
    serde_json::to_writer_pretty(json_out, &side).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn read_factor<R: Read, J: Read>(csv_in: R, json_in: J) -> Result<Factor> {
    let side: FactorSidecar = serde_json::from_reader(json_in).map_err(|e| Error::Parse(e.to_string()))?;
    if side.schema != SCHEMA {
        return Err(Error::Parse(format!("unsupported schema {}", side.schema)));
    }
    let mut rd = csv::Reader::from_reader(csv_in);
    let mut ids = Vec::new();
    for row in rd.deserialize::<AtomRow>() {
        let row = row.map_err(csv_err)?;
        if row.x != ids.len() + 1 {
            return Err(Error::Parse(format!("expected x = {}, found {}", ids.len() + 1, row.x)));
        }
        ids.push(row.atom_id);
    }
    if ids.len() != side.n {
        return Err(Error::LengthMismatch { expected: side.n, found: ids.len() });
    }
    let b = Factor::from_labels(&ids, side.meta)?;
    if b.atom_count() != side.atoms {
        return Err(Error::Parse(format!("sidecar lists {} atoms, file has {}", side.atoms, b.atom_count())));
    }
    Ok(b)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn save_set(path: impl AsRef<Path>, a: &IntegerSet) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_set(&mut w, a)?;
    w.flush()?;
    Ok(())
}

pub fn load_set(path: impl AsRef<Path>) -> Result<IntegerSet> {
    read_set(File::open(path)?)
}

pub fn save_function(path: impl AsRef<Path>, f: &BoundedFunction) -> Result<()> {
    write_function(create(path.as_ref())?, f)
}

pub fn load_function(path: impl AsRef<Path>) -> Result<BoundedFunction> {
    read_function(File::open(path)?)
}

/// Writes `<stem>.csv` and `<stem>.json`.
pub fn save_factor(stem: impl AsRef<Path>, b: &Factor) -> Result<()> {
    let stem = stem.as_ref();
    let mut j = create(&stem.with_extension("json"))?;
    write_factor(create(&stem.with_extension("csv"))?, &mut j, b)?;
    j.flush()?;
    Ok(())
}

pub fn load_factor(stem: impl AsRef<Path>) -> Result<Factor> {
    let stem = stem.as_ref();
    read_factor(File::open(stem.with_extension("csv"))?, File::open(stem.with_extension("json"))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::{join_factors, simple_congruence_factor, simple_real_factor};

    #[test]
    fn set_round_trip() {
        let a = IntegerSet::from_members(30, [1, 5, 29, 30]).unwrap();
        let mut buf = Vec::new();
        write_set(&mut buf, &a).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "N=30\n1\n5\n29\n30\n");
        assert_eq!(read_set(&buf[..]).unwrap(), a);
    }

    #[test]
    fn set_errors() {
        assert!(read_set("".as_bytes()).is_err());
        assert!(read_set("M=3\n1\n".as_bytes()).is_err());
        assert!(matches!(read_set("N=3\n4\n".as_bytes()), Err(Error::OutOfRange { value: 4, n: 3 })));
        assert!(read_set("N=3\n2\n1\n".as_bytes()).is_err());
        assert!(read_set("N=3\nx\n".as_bytes()).is_err());
    }

    #[test]
    fn function_round_trip() {
        let f = BoundedFunction::new(vec![
            Complex64::new(0.1, -0.2),
            Complex64::new(1.0 / 3.0, 0.0),
            Complex64::new(-0.0, 1e-300),
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_function(&mut buf, &f).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("x,re,im\n"));
        assert_eq!(read_function(&buf[..]).unwrap(), f);
        assert!(read_function("x,re,im\n2,0,0\n".as_bytes()).is_err());
    }

    #[test]
    fn factor_round_trip() {
        let b = join_factors(&[
            &simple_real_factor(25, 4, 1).unwrap(),
            &simple_congruence_factor(25, 3).unwrap(),
        ])
        .unwrap();
        let (mut c, mut j) = (Vec::new(), Vec::new());
        write_factor(&mut c, &mut j, &b).unwrap();
        assert!(String::from_utf8(c.clone()).unwrap().starts_with("x,atom_id\n"));
        let json: serde_json::Value = serde_json::from_slice(&j).unwrap();
        assert_eq!(json["schema"], 1);
        assert_eq!(json["meta"]["M"], 4);
        assert_eq!(read_factor(&c[..], &j[..]).unwrap(), b);
    }
}
