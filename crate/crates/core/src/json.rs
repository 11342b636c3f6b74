//! Wire helpers: exact numbers are written as JSON integers when they fit in
//! an `i64` and as strings (`"12345678901234567890"`, `"-3/4"`) otherwise.

use crate::exact::{parse_rational, QMatrix, Q};
use crate::matrix_core::IntMatrix;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Deserialize;
use serde_json::Value;

pub const SCHEMA: &str = "v1";

pub fn bigint_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

pub fn rational_value(x: &Q) -> Value {
    if x.is_integer() {
        bigint_value(x.numer())
    } else {
        Value::String(format!("{}/{}", x.numer(), x.denom()))
    }
}

pub fn rational_vec(v: &[Q]) -> Value {
    Value::Array(v.iter().map(rational_value).collect())
}

pub fn rational_rows(m: &QMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| rational_vec(r)).collect())
}

pub fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&rational_value(x), s)
}

pub fn ser_q_vec<S: serde::Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&rational_vec(v), s)
}

pub fn ser_q_vecs<S: serde::Serializer>(v: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Value> = v.iter().map(|r| rational_vec(r)).collect();
    serde::Serialize::serialize(&rows, s)
}

/// Integer literal, `"p/q"` string, or a float with an exact binary value.
pub fn parse_q(v: &Value) -> Result<Q, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Q::from_integer(i.into()))
            } else if let Some(u) = n.as_u64() {
                Ok(Q::from_integer(u.into()))
            } else {
                let f = n.as_f64().ok_or("unrepresentable number")?;
                Q::from_float(f).ok_or_else(|| format!("non-finite number {f}"))
            }
        }
        Value::String(s) => parse_rational(s).ok_or_else(|| format!("not a rational: {s:?}")),
        other => Err(format!("expected a number, found {other}")),
    }
}

pub fn parse_int(v: &Value) -> Result<BigInt, String> {
    let q = parse_q(v)?;
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(format!("expected an integer, found {v}"))
    }
}

pub fn parse_q_vec(v: &Value) -> Result<Vec<Q>, String> {
    v.as_array()
        .ok_or_else(|| format!("expected an array, found {v}"))?
        .iter()
        .map(parse_q)
        .collect()
}

pub fn parse_q_rows(v: &Value) -> Result<Vec<Vec<Q>>, String> {
    v.as_array()
        .ok_or_else(|| format!("expected an array of rows, found {v}"))?
        .iter()
        .map(parse_q_vec)
        .collect()
}

#[derive(Deserialize)]
struct MatrixWire {
    d: Option<usize>,
    entries: Vec<Vec<Value>>,
}

fn matrix_rows(v: &Value) -> Result<Vec<Vec<Q>>, String> {
    let wire: MatrixWire = match v {
        Value::Array(_) => MatrixWire {
            d: None,
            entries: serde_json::from_value(v.clone()).map_err(|e| e.to_string())?,
        },
        _ => serde_json::from_value(v.clone()).map_err(|e| e.to_string())?,
    };
    let rows: Vec<Vec<Q>> = wire
        .entries
        .iter()
        .map(|r| r.iter().map(parse_q).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    if let Some(d) = wire.d {
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(format!("declared d = {d} does not match entries"));
        }
    }
    Ok(rows)
}

/// `{"d": n, "entries": [[...]]}` or a bare array of rows, as a rational matrix.
pub fn parse_qmatrix(v: &Value) -> Result<QMatrix, String> {
    let rows = matrix_rows(v)?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err("ragged matrix rows".into());
    }
    if rows.is_empty() {
        return Ok(QMatrix::zeros(0, 0));
    }
    Ok(QMatrix::from_rows(&rows))
}

pub fn parse_int_matrix(v: &Value) -> Result<IntMatrix, String> {
    let rows = matrix_rows(v)?;
    let rows: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| {
                    if x.is_integer() {
                        Ok(x.to_integer())
                    } else {
                        Err(format!("non-integer entry {x}"))
                    }
                })
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;
    IntMatrix::new(rows).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;
    use serde_json::json;

    #[test]
    fn rational_round_trip() {
        for x in [q_frac(3, 4), q_frac(-7, 1), q_frac(0, 1)] {
            assert_eq!(parse_q(&rational_value(&x)).unwrap(), x);
        }
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(parse_int(&bigint_value(&big)).unwrap(), big);
        assert_eq!(parse_q(&json!(0.5)).unwrap(), q_frac(1, 2));
        assert!(parse_int(&json!("1/2")).is_err());
    }

    #[test]
    fn matrix_forms() {
        let a = parse_int_matrix(&json!({"d": 2, "entries": [[2, 1], [1, 1]]})).unwrap();
        let b = parse_int_matrix(&json!([[2, 1], [1, 1]])).unwrap();
        assert_eq!(a, b);
        assert!(parse_int_matrix(&json!({"d": 3, "entries": [[2, 1], [1, 1]]})).is_err());
        assert!(parse_int_matrix(&json!([[1, 2], [3]])).is_err());
        assert!(parse_int_matrix(&json!([["1/2", 0], [0, 2]])).is_err());
        let q = parse_qmatrix(&json!([["1/2", 0], [0, 2]])).unwrap();
        assert_eq!(q[(0, 0)], q_frac(1, 2));
    }
}
