//! JSON files for arrangements and connections.
//!
//! An arrangement file is either explicit,
//!
//! ```json
//! {"dimension": 2, "hyperplanes": [{"id": "x", "form": [["1", "0"], ["0", "0"]]}]}
//! ```
//!
//! with each form coefficient a `[re, im]` pair of rationals written `"p/q"`,
//! `"p"` or a decimal, or a built-in braid arrangement `{"builtin": "A_n", "n": k}`
//! with ids `H_i_j` in lexicographic order. A connection file adds
//! `"residues": {"id": [[[re, im], …], …]}` with one row-major matrix per
//! hyperplane. JSON numbers are accepted wherever a rational is expected and
//! are read exactly from their decimal text.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::arrangement::{Arrangement, ArrangementError, Hyperplane};
use crate::connection::{ConnectionError, StandardConnection};
use crate::lauricella::{build_an, LauricellaError};
use crate::numkernel::{CMatrix, ExactMatrix, GaussianRational, ParseRationalError};

/// Errors reading or writing JSON files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    /// Malformed JSON.
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Syntax {
        /// 1-based line.
        line: usize,
        /// 1-based column.
        column: usize,
        /// Parser message.
        message: String,
    },
    /// Well-formed JSON with the wrong shape.
    #[error("at {path}: {message}")]
    Schema {
        /// JSON path of the offending value, e.g. `hyperplanes[1].form[0]`.
        path: String,
        /// What was expected.
        message: String,
    },
    /// A malformed rational.
    #[error("at {path}: {source}")]
    Rational {
        /// JSON path of the offending value.
        path: String,
        /// Parser failure.
        source: ParseRationalError,
    },
    /// Invalid arrangement data.
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    /// Invalid residue data.
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    /// Invalid built-in request.
    #[error(transparent)]
    Builtin(#[from] LauricellaError),
}

fn schema(path: &str, message: impl Into<String>) -> IoError {
    IoError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn parse_json(text: &str) -> Result<Value, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object()
        .ok_or_else(|| schema(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array()
        .ok_or_else(|| schema(path, "expected an array"))
}

fn count(v: &Value, path: &str) -> Result<usize, IoError> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn rational_text<'a>(v: &'a Value, path: &str) -> Result<std::borrow::Cow<'a, str>, IoError> {
    match v {
        Value::String(s) => Ok(s.as_str().into()),
        Value::Number(n) => Ok(n.to_string().into()),
        _ => Err(schema(path, "expected a rational string or number")),
    }
}

fn gaussian(v: &Value, path: &str) -> Result<GaussianRational, IoError> {
    let pair = array(v, path)?;
    if pair.len() != 2 {
        return Err(schema(path, "expected a [re, im] pair"));
    }
    let re = rational_text(&pair[0], &format!("{path}[0]"))?;
    let im = rational_text(&pair[1], &format!("{path}[1]"))?;
    let parse = |text: &str, part: usize| {
        crate::numkernel::parse_rational(text).map_err(|source| IoError::Rational {
            path: format!("{path}[{part}]"),
            source,
        })
    };
    Ok(GaussianRational::new(parse(&re, 0)?, parse(&im, 1)?))
}

fn arrangement_from_value(v: &Value) -> Result<Arrangement, IoError> {
    let obj = object(v, "$")?;
    if let Some(builtin) = obj.get("builtin") {
        let name = builtin
            .as_str()
            .ok_or_else(|| schema("builtin", "expected a string"))?;
        if name != "A_n" {
            return Err(schema(
                "builtin",
                format!("unknown built-in `{name}` (supported: A_n)"),
            ));
        }
        let n = count(
            obj.get("n")
                .ok_or_else(|| schema("n", "missing dimension of the built-in"))?,
            "n",
        )?;
        return Ok(build_an(n)?);
    }
    let dimension = count(
        obj.get("dimension")
            .ok_or_else(|| schema("dimension", "missing field"))?,
        "dimension",
    )?;
    let list = array(
        obj.get("hyperplanes")
            .ok_or_else(|| schema("hyperplanes", "missing field"))?,
        "hyperplanes",
    )?;
    let mut hyperplanes = Vec::with_capacity(list.len());
    for (k, h) in list.iter().enumerate() {
        let path = format!("hyperplanes[{k}]");
        let h = object(h, &path)?;
        let id = h
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| schema(&format!("{path}.id"), "expected a string id"))?;
        let form_path = format!("{path}.form");
        let coeffs = array(
            h.get("form")
                .ok_or_else(|| schema(&form_path, "missing field"))?,
            &form_path,
        )?;
        let form = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| gaussian(c, &format!("{form_path}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        hyperplanes.push(Hyperplane::new(id, form));
    }
    Ok(Arrangement::new(dimension, hyperplanes)?)
}

fn matrix_from_value(v: &Value, n: usize, path: &str) -> Result<ExactMatrix, IoError> {
    let rows = array(v, path)?;
    if rows.len() != n {
        return Err(schema(
            path,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let mut out = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let row_path = format!("{path}[{i}]");
        let entries = array(row, &row_path)?;
        if entries.len() != n {
            return Err(schema(
                &row_path,
                format!("expected {n} entries, found {}", entries.len()),
            ));
        }
        out.push(
            entries
                .iter()
                .enumerate()
                .map(|(j, e)| gaussian(e, &format!("{row_path}[{j}]")))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(if n == 0 {
        ExactMatrix::zeros(0, 0)
    } else {
        ExactMatrix::from_rows(out)
    })
}

/// Parses an arrangement file (extra fields such as `residues` are ignored).
pub fn parse_arrangement(text: &str) -> Result<Arrangement, IoError> {
    arrangement_from_value(&parse_json(text)?)
}

/// Parses a connection file into an exact connection.
pub fn parse_connection(text: &str) -> Result<StandardConnection, IoError> {
    let v = parse_json(text)?;
    let arrangement = arrangement_from_value(&v)?;
    let residues = object(
        v.get("residues")
            .ok_or_else(|| schema("residues", "missing field"))?,
        "residues",
    )?;
    let n = arrangement.dimension();
    let mut map = BTreeMap::new();
    for (id, m) in residues {
        map.insert(
            id.clone(),
            matrix_from_value(m, n, &format!("residues.{id}"))?,
        );
    }
    Ok(StandardConnection::from_residue_map(arrangement, map)?)
}

fn gaussian_value(z: &GaussianRational) -> Value {
    let [re, im] = z.to_string_pair();
    json!([re, im])
}

/// The explicit JSON form of an arrangement.
pub fn arrangement_to_value(arrangement: &Arrangement) -> Value {
    let hyperplanes: Vec<Value> = arrangement
        .hyperplanes()
        .iter()
        .map(|h| json!({"id": h.id, "form": h.form.iter().map(gaussian_value).collect::<Vec<_>>()}))
        .collect();
    json!({"dimension": arrangement.dimension(), "hyperplanes": hyperplanes})
}

/// Row-major `[[ [re, im], … ], …]` rational entries.
pub fn exact_matrix_to_value(m: &ExactMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(gaussian_value).collect()))
            .collect(),
    )
}

/// Row-major `[[ [re, im], … ], …]` floating-point entries.
pub fn cmatrix_to_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// The JSON form of an exact connection; float connections are refused.
pub fn connection_to_value(c: &StandardConnection) -> Result<Value, IoError> {
    let residues = c.exact_residues()?;
    let mut v = arrangement_to_value(c.arrangement());
    let map: Map<String, Value> = c
        .arrangement()
        .hyperplanes()
        .iter()
        .zip(residues)
        .map(|(h, r)| (h.id.clone(), exact_matrix_to_value(r)))
        .collect();
    v["residues"] = Value::Object(map);
    Ok(v)
}

/// Serializes a connection as pretty-printed JSON.
pub fn connection_to_string(c: &StandardConnection) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(&connection_to_value(c)?)
        .expect("JSON values always serialize"))
}
