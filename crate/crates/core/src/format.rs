//! On-disk formats for grid functions.
//!
//! CSV: header `x,value`, strictly increasing uniform abscissae.
//! JSON: `{"lo": .., "hi": .., "n": .., "values": [..]}`, which round-trips
//! bit-exactly.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{Grid, GridFunction};

/// Relative slack allowed when checking CSV abscissae for uniformity.
const UNIFORM_TOL: f64 = 1e-9;

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    lo: f64,
    hi: f64,
    n: usize,
    values: Vec<f64>,
}

pub fn to_json(f: &GridFunction) -> String {
    let doc = FunctionJson {
        lo: f.grid().lo(),
        hi: f.grid().hi(),
        n: f.grid().n(),
        values: f.values().to_vec(),
    };
    serde_json::to_string(&doc).expect("plain numeric document serializes")
}

pub fn from_json(text: &str) -> Result<GridFunction> {
    let doc: FunctionJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    GridFunction::new(Grid::new(doc.lo, doc.hi, doc.n)?, doc.values)
}

pub fn write_csv<W: Write>(f: &GridFunction, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["x", "value"]).map_err(io)?;
    for (x, v) in f.grid().points().zip(f.values()) {
        w.write_record([x.to_string(), v.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_csv(f: &GridFunction) -> String {
    let mut buf = Vec::new();
    write_csv(f, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_csv<R: Read>(input: R) -> Result<GridFunction> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
        return Err(Error::Parse(format!("expected header `x,value`, got {headers:?}")));
    }
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("row {}: bad number {s:?}", line + 1)))
        };
        xs.push(parse(&record[0])?);
        values.push(parse(&record[1])?);
    }
    if xs.len() < 2 {
        return Err(Error::Parse("need at least two rows".into()));
    }
    let grid = Grid::new(xs[0], xs[xs.len() - 1], xs.len())?;
    let slack = UNIFORM_TOL * (grid.hi() - grid.lo()).max(1.0);
    for (i, x) in xs.iter().enumerate() {
        if i > 0 && !(*x > xs[i - 1]) {
            return Err(Error::Parse(format!("x not strictly increasing at row {}", i + 1)));
        }
        if (x - grid.point(i)).abs() > slack {
            return Err(Error::Parse(format!("x not uniform at row {}", i + 1)));
        }
    }
    GridFunction::new(grid, values)
}

pub fn from_csv(text: &str) -> Result<GridFunction> {
    read_csv(text.as_bytes())
}

/// Loads `.json` files as JSON and anything else as CSV.
pub fn load(path: &std::path::Path) -> Result<GridFunction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        from_json(&text)
    } else {
        from_csv(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::random_density;
    use proptest::prelude::*;

    #[test]
    fn csv_round_trip() {
        let f = random_density(3, &Grid::new(-4.0, 4.0, 65).unwrap(), 0.3).unwrap();
        let back = from_csv(&to_csv(&f)).unwrap();
        assert_eq!(back.grid().n(), 65);
        for (a, b) in f.values().iter().zip(back.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn csv_rejects_bad_input() {
        assert!(from_csv("t,v\n0,1\n1,1\n").is_err());
        assert!(from_csv("x,value\n0,1\n").is_err());
        assert!(from_csv("x,value\n0,1\n1,1\n0.5,1\n").is_err());
        assert!(from_csv("x,value\n0,1\n1,1\n3,1\n").is_err());
        assert!(from_csv("x,value\n0,1\n1,-1\n2,1\n").is_err());
        assert!(from_csv("x,value\n0,1\n1,abc\n2,1\n").is_err());
    }

    #[test]
    fn json_rejects_inconsistent_length() {
        assert!(from_json(r#"{"lo":0,"hi":1,"n":3,"values":[1,2]}"#).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(
            lo in -100.0f64..0.0,
            width in 1e-3f64..100.0,
            values in prop::collection::vec(0.0f64..1e300, 2..64),
        ) {
            let grid = Grid::new(lo, lo + width, values.len()).unwrap();
            let f = GridFunction::new(grid, values).unwrap();
            let back = from_json(&to_json(&f)).unwrap();
            prop_assert_eq!(back.grid().lo().to_bits(), f.grid().lo().to_bits());
            prop_assert_eq!(back.grid().hi().to_bits(), f.grid().hi().to_bits());
            for (a, b) in f.values().iter().zip(back.values()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
