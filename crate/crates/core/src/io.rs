//! JSON file formats for detectors, ensembles, cost matrices and group
//! actions.
//!
//! A complex matrix is an array of rows, each row an array of `[re, im]`
//! pairs. Parse errors name the offending element, row and entry (1-based).

use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde_json::{json, Value};

use crate::bayes::CostMatrix;
use crate::capacity::{GroupAction, GroupElement};
use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, HermitianOperator};
use crate::povm::{Ensemble, Povm};
use crate::scalar::Real;

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| fmt_err(format!("invalid JSON: {e}")))
}

fn field<'a>(obj: &'a Value, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| fmt_err(format!("missing field `{name}`")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| fmt_err(format!("{what}: expected an array")))
}

fn number<T: Real>(v: &Value, what: &str) -> Result<T> {
    let x = v.as_f64().ok_or_else(|| fmt_err(format!("{what}: expected a number, found {v}")))?;
    if !x.is_finite() {
        return Err(fmt_err(format!("{what}: non-finite value")));
    }
    T::from_f64(x).ok_or_else(|| fmt_err(format!("{what}: {x} not representable")))
}

fn index(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| fmt_err(format!("{what}: expected a non-negative integer, found {v}")))
}

fn parse_matrix<T: Real>(v: &Value, dim: Option<usize>, what: &str) -> Result<ComplexMatrix<T>> {
    let rows = array(v, what)?;
    let d = dim.unwrap_or(rows.len());
    if rows.len() != d {
        return Err(fmt_err(format!("{what}: expected {d} rows, found {}", rows.len())));
    }
    let mut out = Vec::with_capacity(d);
    for (r, row) in rows.iter().enumerate() {
        let where_row = format!("{what}, row {}", r + 1);
        let entries = array(row, &where_row)?;
        if entries.len() != d {
            return Err(fmt_err(format!("{where_row}: expected {d} entries, found {}", entries.len())));
        }
        let mut parsed = Vec::with_capacity(d);
        for (c, entry) in entries.iter().enumerate() {
            let where_entry = format!("{where_row}, entry {}", c + 1);
            let pair = match entry.as_array() {
                Some(p) if p.len() == 2 => p,
                _ => return Err(fmt_err(format!("{where_entry}: expected [re, im], found {entry}"))),
            };
            parsed.push(Complex::new(number(&pair[0], &where_entry)?, number(&pair[1], &where_entry)?));
        }
        out.push(parsed);
    }
    ComplexMatrix::from_rows(out).map_err(|e| fmt_err(format!("{what}: {e}")))
}

fn parse_hermitian<T: Real>(v: &Value, dim: Option<usize>, what: &str) -> Result<HermitianOperator<T>> {
    HermitianOperator::new(parse_matrix(v, dim, what)?).map_err(|e| fmt_err(format!("{what}: {e}")))
}

fn matrix_json<T: Real>(m: &ComplexMatrix<T>) -> Value {
    Value::Array(
        m.rows()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|z| json!([z.re.to_f64_lossy(), z.im.to_f64_lossy()]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| fmt_err(format!("{}: {e}", path.display())))
}

/// `{"dim": d, "elements": [matrix, …]}`
pub fn parse_detector<T: Real>(text: &str) -> Result<Povm<T>> {
    let v = parse_json(text)?;
    let dim = index(field(&v, "dim")?, "dim")?;
    if dim == 0 {
        return Err(fmt_err("dim must be positive"));
    }
    let elements = array(field(&v, "elements")?, "elements")?;
    let ops = elements
        .iter()
        .enumerate()
        .map(|(j, e)| parse_hermitian(e, Some(dim), &format!("element {}", j + 1)))
        .collect::<Result<Vec<_>>>()?;
    Povm::new(ops)
}

pub fn read_detector<T: Real>(path: &Path) -> Result<Povm<T>> {
    parse_detector(&read(path)?)
}

pub fn detector_json<T: Real>(povm: &Povm<T>) -> Value {
    json!({
        "dim": povm.dim(),
        "elements": povm.elements().iter().map(|e| matrix_json(e.matrix())).collect::<Vec<_>>(),
    })
}

/// `{"states": [matrix, …], "priors": [p, …]}`
pub fn parse_ensemble<T: Real>(text: &str) -> Result<Ensemble<T>> {
    let v = parse_json(text)?;
    let states = array(field(&v, "states")?, "states")?;
    if states.is_empty() {
        return Err(fmt_err("states: empty"));
    }
    let mut ops = Vec::with_capacity(states.len());
    let mut dim = None;
    for (i, s) in states.iter().enumerate() {
        let op: HermitianOperator<T> = parse_hermitian(s, dim, &format!("state {}", i + 1))?;
        dim = Some(op.dim());
        ops.push(op);
    }
    let priors = array(field(&v, "priors")?, "priors")?
        .iter()
        .enumerate()
        .map(|(i, p)| number(p, &format!("prior {}", i + 1)))
        .collect::<Result<Vec<T>>>()?;
    Ensemble::new(ops, priors)
}

pub fn ensemble_json<T: Real>(ensemble: &Ensemble<T>) -> Value {
    json!({
        "states": ensemble.states().iter().map(|s| matrix_json(s.matrix())).collect::<Vec<_>>(),
        "priors": ensemble.priors().iter().map(|p| p.to_f64_lossy()).collect::<Vec<_>>(),
    })
}

/// `{"cost": [[c, …], …]}`
pub fn parse_cost<T: Real>(text: &str) -> Result<CostMatrix<T>> {
    let v = parse_json(text)?;
    let rows = array(field(&v, "cost")?, "cost")?;
    let cost = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            array(row, &format!("cost row {}", i + 1))?
                .iter()
                .enumerate()
                .map(|(j, c)| number(c, &format!("cost row {}, entry {}", i + 1, j + 1)))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CostMatrix::new(cost)
}

pub fn read_cost<T: Real>(path: &Path) -> Result<CostMatrix<T>> {
    parse_cost(&read(path)?)
}

pub fn cost_json<T: Real>(cost: &CostMatrix<T>) -> Value {
    let rows: Vec<Vec<f64>> = (0..cost.messages())
        .map(|i| (0..cost.hypotheses()).map(|j| cost.cost(i, j).to_f64_lossy()).collect())
        .collect();
    json!({ "cost": rows })
}

/// `{"unitaries": [matrix, …], "conjugate": [bool, …],
///   "permutation": [[h, …], …], "identity": g}`
pub fn parse_group<T: Real>(text: &str) -> Result<GroupAction<T>> {
    let v = parse_json(text)?;
    let unitaries = array(field(&v, "unitaries")?, "unitaries")?;
    let n = unitaries.len();
    let conjugate = match v.get("conjugate") {
        None => vec![false; n],
        Some(c) => array(c, "conjugate")?
            .iter()
            .enumerate()
            .map(|(g, f)| {
                f.as_bool()
                    .ok_or_else(|| fmt_err(format!("conjugate flag {}: expected a boolean", g + 1)))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let perms = array(field(&v, "permutation")?, "permutation")?;
    if conjugate.len() != n || perms.len() != n {
        return Err(fmt_err(format!(
            "group has {n} unitaries but {} conjugate flags and {} permutations",
            conjugate.len(),
            perms.len()
        )));
    }
    let mut elements = Vec::with_capacity(n);
    let mut dim = None;
    for g in 0..n {
        let unitary: ComplexMatrix<T> = parse_matrix(&unitaries[g], dim, &format!("unitary {}", g + 1))?;
        dim = Some(unitary.dim());
        let permutation = array(&perms[g], &format!("permutation {}", g + 1))?
            .iter()
            .map(|h| index(h, &format!("permutation {}", g + 1)))
            .collect::<Result<Vec<_>>>()?;
        elements.push(GroupElement {
            unitary,
            conjugate: conjugate[g],
            permutation,
        });
    }
    let identity = match v.get("identity") {
        None => 0,
        Some(i) => index(i, "identity")?,
    };
    GroupAction::new(elements, identity)
}

pub fn read_group<T: Real>(path: &Path) -> Result<GroupAction<T>> {
    parse_group(&read(path)?)
}

pub fn group_json<T: Real>(group: &GroupAction<T>) -> Value {
    let els = group.elements();
    json!({
        "unitaries": els.iter().map(|e| matrix_json(&e.unitary)).collect::<Vec<_>>(),
        "conjugate": els.iter().map(|e| e.conjugate).collect::<Vec<_>>(),
        "permutation": els.iter().map(|e| e.permutation.clone()).collect::<Vec<_>>(),
        "identity": group.identity(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
