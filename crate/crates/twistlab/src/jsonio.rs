//! JSON encodings for all persistent artifacts. Scalars are "num/den"
//! strings over the rationals and plain integers over prime fields; vertex
//! and basis indices are 1-based on disk and 0-based in memory.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::absred::{NormalizedMatrix, OmegaMatrix};
use crate::algebra::Algebra;
use crate::classify::{ConnectedCycleDatum, CycleDatum, RankOneDatum};
use crate::field::{parse_rational, FieldSpec, Scalar};
use crate::linalg::{Functional, Matrix, Vector};
use crate::oracle::GridSet;
use crate::quiver::{validate_admissible_shape, AdmissibleShape, Quiver};
use crate::twist::{EGrid, TwistedAlgebra};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unsupported schema version {0}")]
    SchemaVersion(u64),
}

fn bad(msg: impl Into<String>) -> JsonError {
    JsonError::Malformed(msg.into())
}

// ---------------------------------------------------------------------------
// scalars and fields

pub fn field_to_json(f: FieldSpec) -> Value {
    Value::String(f.to_string())
}

pub fn field_from_json(v: &Value) -> Result<FieldSpec, JsonError> {
    let s = v.as_str().ok_or_else(|| bad("field must be a string"))?;
    FieldSpec::parse(s).map_err(|e| bad(e.to_string()))
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Rat(_) => Value::String(s.to_string()),
        Scalar::Fp { v, .. } => json!(v),
    }
}

pub fn scalar_from_json(field: FieldSpec, v: &Value) -> Result<Scalar, JsonError> {
    match (field, v) {
        (FieldSpec::Rationals, Value::String(s)) => {
            parse_rational(s).map_err(|e| bad(e.to_string()))
        }
        (FieldSpec::Rationals, Value::Number(n)) => n
            .as_i64()
            .map(|x| field.from_i64(x))
            .ok_or_else(|| bad("rational out of range")),
        (FieldSpec::Prime(_), Value::Number(n)) => n
            .as_i64()
            .map(|x| field.from_i64(x))
            .ok_or_else(|| bad("residue out of range")),
        _ => Err(bad("scalar must be a \"num/den\" string or an integer")),
    }
}

// ---------------------------------------------------------------------------
// vectors, matrices, functionals

pub fn vector_to_json(v: &Vector) -> Value {
    Value::Array(v.coords.iter().map(scalar_to_json).collect())
}

pub fn vector_from_json(field: FieldSpec, v: &Value) -> Result<Vector, JsonError> {
    let arr = v.as_array().ok_or_else(|| bad("vector must be an array"))?;
    Ok(Vector {
        field,
        coords: arr
            .iter()
            .map(|x| scalar_from_json(field, x))
            .collect::<Result<_, _>>()?,
    })
}

/// Bare row-major encoding, for contexts where the field is known.
pub fn matrix_rows_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows)
            .map(|i| Value::Array(m.row(i).iter().map(scalar_to_json).collect()))
            .collect(),
    )
}

pub fn matrix_from_rows_json(field: FieldSpec, v: &Value) -> Result<Matrix, JsonError> {
    let rows = v.as_array().ok_or_else(|| bad("matrix must be an array"))?;
    let mut data = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| bad("matrix row must be an array"))?;
        data.push(
            row.iter()
                .map(|x| scalar_from_json(field, x))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    if data.is_empty() || data.iter().any(|r| r.len() != data[0].len()) {
        return Err(bad("matrix rows must be non-empty and of equal length"));
    }
    Ok(Matrix::from_rows(field, data))
}

/// Standalone endomorphism encoding with explicit field and dimension.
pub fn endomap_to_json(m: &Matrix) -> Value {
    json!({
        "field": field_to_json(m.field),
        "dimension": m.rows,
        "rows": matrix_rows_to_json(m),
    })
}

pub fn endomap_from_json(v: &Value) -> Result<Matrix, JsonError> {
    let field = field_from_json(get(v, "field")?)?;
    let dim = get_usize(v, "dimension")?;
    let m = matrix_from_rows_json(field, get(v, "rows")?)?;
    if m.rows != dim || m.cols != dim {
        return Err(bad("endomorphism dimension mismatch"));
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// quivers

pub fn quiver_to_json(q: &Quiver) -> Value {
    json!({
        "n": q.n,
        "arrows": q
            .arrows()
            .iter()
            .map(|&(s, t)| json!([s + 1, t + 1]))
            .collect::<Vec<_>>(),
    })
}

pub fn quiver_from_json(v: &Value) -> Result<Quiver, JsonError> {
    let n = get_usize(v, "n")?;
    let arrows = get(v, "arrows")?
        .as_array()
        .ok_or_else(|| bad("arrows must be an array"))?
        .iter()
        .map(|a| {
            let pair = a.as_array().filter(|p| p.len() == 2);
            let pair = pair.ok_or_else(|| bad("arrow must be a [s, t] pair"))?;
            let s = pair[0]
                .as_u64()
                .filter(|&x| x >= 1)
                .ok_or_else(|| bad("vertex indices are 1-based integers"))?;
            let t = pair[1]
                .as_u64()
                .filter(|&x| x >= 1)
                .ok_or_else(|| bad("vertex indices are 1-based integers"))?;
            Ok((s as usize - 1, t as usize - 1))
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    Quiver::new(n, arrows).map_err(|e| bad(e.to_string()))
}

pub fn shape_from_json(v: &Value) -> Result<AdmissibleShape, JsonError> {
    validate_admissible_shape(quiver_from_json(v)?).map_err(|e| bad(e.to_string()))
}

// ---------------------------------------------------------------------------
// grids and twisted algebras

pub fn grid_to_json(g: &EGrid) -> Value {
    json!({
        "n": g.n,
        "m": g.m(),
        "field": field_to_json(g.algebra.field),
        "E": (0..g.n)
            .map(|i| (0..g.n).map(|j| matrix_rows_to_json(g.get(i, j))).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn grid_from_json(v: &Value) -> Result<EGrid, JsonError> {
    let n = get_usize(v, "n")?;
    let m = get_usize(v, "m")?;
    let field = field_from_json(get(v, "field")?)?;
    let e = get(v, "E")?
        .as_array()
        .filter(|rows| rows.len() == n)
        .ok_or_else(|| bad("E must be an n x n array of matrices"))?;
    let mut entries = Vec::with_capacity(n * n);
    for row in e {
        let row = row
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| bad("E must be an n x n array of matrices"))?;
        for cell in row {
            let mat = matrix_from_rows_json(field, cell)?;
            if mat.rows != m || mat.cols != m {
                return Err(bad("grid entry is not m x m"));
            }
            entries.push(mat);
        }
    }
    Ok(EGrid::new(Algebra::split(field, m), n, entries))
}

pub fn grid_set_to_json(s: &GridSet) -> Value {
    Value::Array(s.grids.iter().map(grid_to_json).collect())
}

pub fn grid_set_from_json(v: &Value) -> Result<GridSet, JsonError> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad("grid set must be an array"))?;
    Ok(GridSet::from_grids(
        arr.iter().map(grid_from_json).collect::<Result<_, _>>()?,
    ))
}

pub fn twisted_algebra_to_json(t: &TwistedAlgebra) -> Value {
    json!({
        "n": t.n,
        "m": t.m,
        "field": field_to_json(t.algebra.field),
        "dim": t.algebra.dim,
        "unit": vector_to_json(&t.algebra.unit),
        "structure": t
            .algebra
            .table
            .iter()
            .flatten()
            .map(vector_to_json)
            .collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------------
// classification data

pub fn cycle_datum_to_json(d: &CycleDatum) -> Value {
    json!({
        "field": field_to_json(d.field),
        "u": d.u.iter().map(|&x| x + 1).collect::<Vec<_>>(),
        "a": d.a.iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

pub fn cycle_datum_from_json(v: &Value) -> Result<CycleDatum, JsonError> {
    let field = field_from_json(get(v, "field")?)?;
    let u = one_based_list(get(v, "u")?)?;
    let m = u.len();
    if u.iter().any(|&x| x >= m) {
        return Err(bad("u values out of range"));
    }
    let a = get(v, "a")?
        .as_array()
        .ok_or_else(|| bad("a must be an array"))?
        .iter()
        .map(|x| scalar_from_json(field, x))
        .collect::<Result<Vec<_>, _>>()?;
    CycleDatum::new(field, u, a).map_err(|e| bad(e.to_string()))
}

pub fn rank1_datum_to_json(d: &RankOneDatum) -> Value {
    json!({
        "shape": quiver_to_json(d.shape.quiver()),
        "u": d
            .us
            .iter()
            .map(|u| u.iter().map(|&x| x + 1).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn rank1_datum_from_json(v: &Value) -> Result<RankOneDatum, JsonError> {
    let shape = shape_from_json(get(v, "shape")?)?;
    let us = get(v, "u")?
        .as_array()
        .ok_or_else(|| bad("u must be an array of arrays"))?
        .iter()
        .map(one_based_list)
        .collect::<Result<Vec<_>, _>>()?;
    let m = us.first().map_or(0, Vec::len);
    if us.iter().any(|u| u.len() != m || u.iter().any(|&x| x >= m)) {
        return Err(bad("u functions must share one domain"));
    }
    Ok(RankOneDatum { shape, us, m })
}

pub fn connected_cycle_to_json(d: &ConnectedCycleDatum) -> Value {
    json!({
        "field": field_to_json(d.field),
        "shape": quiver_to_json(d.shape.quiver()),
        "u": d
            .us
            .iter()
            .map(|u| u.iter().map(|&x| x + 1).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "a": d.a.iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

pub fn connected_cycle_from_json(v: &Value) -> Result<ConnectedCycleDatum, JsonError> {
    let field = field_from_json(get(v, "field")?)?;
    let shape = shape_from_json(get(v, "shape")?)?;
    let us = get(v, "u")?
        .as_array()
        .ok_or_else(|| bad("u must be an array of arrays"))?
        .iter()
        .map(one_based_list)
        .collect::<Result<Vec<_>, _>>()?;
    let a = get(v, "a")?
        .as_array()
        .ok_or_else(|| bad("a must be an array"))?
        .iter()
        .map(|x| scalar_from_json(field, x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConnectedCycleDatum {
        shape,
        us,
        a,
        field,
    })
}

// ---------------------------------------------------------------------------
// module structures

pub fn omega_to_json(w: &OmegaMatrix) -> Value {
    json!({
        "field": field_to_json(w.field),
        "n": w.n,
        "m": w.m,
        "entries": (0..w.n)
            .map(|i| {
                (0..w.n)
                    .map(|j| {
                        Value::Array(w.get(i, j).coeffs.iter().map(scalar_to_json).collect())
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
    })
}

pub fn omega_from_json(v: &Value) -> Result<OmegaMatrix, JsonError> {
    let field = field_from_json(get(v, "field")?)?;
    let n = get_usize(v, "n")?;
    let m = get_usize(v, "m")?;
    let rows = get(v, "entries")?
        .as_array()
        .filter(|r| r.len() == n)
        .ok_or_else(|| bad("entries must be an n x n array"))?;
    let mut entries = Vec::with_capacity(n * n);
    for row in rows {
        let row = row
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| bad("entries must be an n x n array"))?;
        for cell in row {
            let coeffs = cell
                .as_array()
                .filter(|c| c.len() == m)
                .ok_or_else(|| bad("functional must have m coefficients"))?
                .iter()
                .map(|x| scalar_from_json(field, x))
                .collect::<Result<Vec<_>, _>>()?;
            entries.push(Functional { field, coeffs });
        }
    }
    Ok(OmegaMatrix::new(field, n, m, entries))
}

pub fn normalized_matrix_to_json(n: &NormalizedMatrix) -> Value {
    json!({
        "field": field_to_json(n.matrix.field),
        "matrix": matrix_rows_to_json(&n.matrix),
        "sigmas": n
            .sigmas
            .iter()
            .map(|s| s.iter().map(|&r| r + 1).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "zs": n.zs.iter().map(matrix_rows_to_json).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------------
// documents

/// Wraps a payload in the versioned on-disk envelope; the seed is recorded
/// whenever randomness was involved.
pub fn document(kind: &str, payload: Value, seed: Option<u64>) -> Value {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("kind".into(), json!(kind));
    doc.insert("seed".into(), seed.map_or(Value::Null, |s| json!(s)));
    doc.insert("payload".into(), payload);
    Value::Object(doc)
}

/// Unwraps the envelope, checking the schema version and, if given,
/// the expected kind.
pub fn open_document<'a>(v: &'a Value, kind: Option<&str>) -> Result<&'a Value, JsonError> {
    let version = get(v, "schema_version")?
        .as_u64()
        .ok_or_else(|| bad("schema_version must be an integer"))?;
    if version != SCHEMA_VERSION {
        return Err(JsonError::SchemaVersion(version));
    }
    if let Some(expect) = kind {
        let k = get(v, "kind")?
            .as_str()
            .ok_or_else(|| bad("kind must be a string"))?;
        if k != expect {
            return Err(bad(format!("expected a {expect:?} document, got {k:?}")));
        }
    }
    get(v, "payload")
}

// ---------------------------------------------------------------------------
// helpers

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value, JsonError> {
    v.get(key)
        .ok_or_else(|| bad(format!("missing key {key:?}")))
}

fn get_usize(v: &Value, key: &str) -> Result<usize, JsonError> {
    get(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| bad(format!("{key:?} must be a non-negative integer")))
}

fn one_based_list(v: &Value) -> Result<Vec<usize>, JsonError> {
    v.as_array()
        .ok_or_else(|| bad("expected an array of 1-based indices"))?
        .iter()
        .map(|x| {
            x.as_u64()
                .filter(|&i| i >= 1)
                .map(|i| i as usize - 1)
                .ok_or_else(|| bad("indices are 1-based integers"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::grid_from_cycle_datum;
    use crate::oracle::brute_force_twisting_maps;

    #[test]
    fn scalar_round_trip() {
        let q = FieldSpec::Rationals;
        for s in [q.zero(), q.one(), q.from_ratio(-7, 3).unwrap()] {
            assert_eq!(scalar_from_json(q, &scalar_to_json(&s)).unwrap(), s);
        }
        let f = FieldSpec::Prime(5);
        for s in f.elements().unwrap() {
            assert_eq!(scalar_from_json(f, &scalar_to_json(&s)).unwrap(), s);
        }
        assert!(scalar_from_json(f, &json!("1/2")).is_err());
    }

    #[test]
    fn grid_round_trip() {
        let f = FieldSpec::Prime(3);
        let s = brute_force_twisting_maps(2, 2, f).unwrap();
        for g in &s.grids {
            let v = grid_to_json(g);
            assert_eq!(&grid_from_json(&v).unwrap(), g);
        }
        let v = grid_set_to_json(&s);
        assert_eq!(grid_set_from_json(&v).unwrap(), s);
    }

    #[test]
    fn quiver_is_one_based_on_disk() {
        let q = Quiver::new(2, vec![(0, 0), (0, 1), (1, 1)]).unwrap();
        let v = quiver_to_json(&q);
        assert_eq!(v["arrows"][1], json!([1, 2]));
        assert_eq!(quiver_from_json(&v).unwrap(), q);
    }

    #[test]
    fn datum_round_trips() {
        let q = FieldSpec::Rationals;
        let a = q.from_ratio(2, 5).unwrap();
        let d = CycleDatum::new(q, vec![1, 0], vec![a.clone(), q.one().sub_ref(&a)]).unwrap();
        let v = cycle_datum_to_json(&d);
        assert_eq!(cycle_datum_from_json(&v).unwrap(), d);

        let ws = crate::absred::omegas_from_cycle_grid(&grid_from_cycle_datum(&d));
        for w in &ws {
            assert_eq!(omega_from_json(&omega_to_json(w)).unwrap(), *w);
        }
    }

    #[test]
    fn document_envelope() {
        let doc = document("grid", json!({"x": 1}), Some(42));
        assert_eq!(doc["schema_version"], json!(SCHEMA_VERSION));
        assert_eq!(open_document(&doc, Some("grid")).unwrap(), &json!({"x": 1}));
        assert!(open_document(&doc, Some("gridset")).is_err());
        let mut stale = doc.clone();
        stale["schema_version"] = json!(99);
        assert_eq!(
            open_document(&stale, None),
            Err(JsonError::SchemaVersion(99))
        );
    }
}
