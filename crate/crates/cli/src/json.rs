//! JSON encodings shared by the subcommands. Rationals and other exact
//! values are written as strings.

use std::collections::BTreeMap;

use anyhow::{anyhow, Context, Result};
use serde_json::{json, Value};

use satake_core::apartment::{ApartmentPoint, CompactifiedPoint};
use satake_core::building::{LatticeClass, QuadElt, Ring};
use satake_core::multval::MultVal;
use satake_core::rational::{fmt_rat, parse_rat, Rat};
use satake_core::rootsys::{parse_node_label, NodeSet, Weight};

use crate::UsageError;

pub fn rat(r: &Rat) -> Value {
    Value::String(fmt_rat(r))
}

pub fn rats(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn nodes(s: NodeSet) -> Value {
    json!(s.labels())
}

pub fn weight(w: &Weight) -> Value {
    Value::String(w.to_string())
}

pub fn vertex(v: &LatticeClass) -> Value {
    Value::Array(v.rows().iter().map(|r| Value::Array(r.iter().map(|x| Value::String(x.to_string())).collect())).collect())
}

pub fn compactified(z: &CompactifiedPoint) -> Value {
    let coords: BTreeMap<String, String> = z.coords.iter().map(|(i, v)| (format!("a{}", i + 1), v.to_string())).collect();
    json!({ "tau": nodes(z.tau), "coords": coords })
}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

pub fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| usage(format!("missing field {key:?}")))
}

pub fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| usage(format!("{what} must be a string")))
}

pub fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| usage(format!("{what} must be an array")))
}

/// A rational given as a JSON string or integer.
pub fn parse_rational(v: &Value, what: &str) -> Result<Rat> {
    match v {
        Value::String(s) => Ok(parse_rat(s)?),
        Value::Number(n) if n.is_i64() => Ok(Rat::from_integer(n.as_i64().unwrap().into())),
        _ => Err(usage(format!("{what} must be a rational string like \"3/4\""))),
    }
}

pub fn parse_ints(v: &Value, what: &str) -> Result<Vec<i64>> {
    as_array(v, what)?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| usage(format!("{what} must hold integers"))))
        .collect()
}

pub fn parse_int_matrix(v: &Value, what: &str) -> Result<Vec<Vec<i64>>> {
    as_array(v, what)?.iter().map(|r| parse_ints(r, what)).collect()
}

pub fn parse_nodes(v: &Value, rank: usize) -> Result<NodeSet> {
    let mut s = NodeSet::EMPTY;
    for l in as_array(v, "node list")? {
        s.insert(parse_node_label(as_str(l, "node label")?, rank)?);
    }
    Ok(s)
}

pub fn parse_multval(q: &Rat, v: &Value) -> Result<MultVal> {
    match v {
        Value::Number(_) => Ok(MultVal::from_rat(q, parse_rational(v, "value")?)?),
        _ => Ok(MultVal::parse(q, as_str(v, "value")?)?),
    }
}

pub fn parse_apartment_point(q: &Rat, v: &Value) -> Result<ApartmentPoint> {
    let coords = as_array(v, "apartment point")?.iter().map(|c| parse_multval(q, c)).collect::<Result<Vec<_>>>()?;
    Ok(ApartmentPoint::new(q, coords)?)
}

/// `{"tau": [...], "coords": {"a1": "q^(1/2)"}}`.
pub fn parse_compactified(q: &Rat, rank: usize, v: &Value) -> Result<CompactifiedPoint> {
    let tau = match v.get("tau") {
        Some(t) => parse_nodes(t, rank)?,
        None => NodeSet::EMPTY,
    };
    let mut coords = BTreeMap::new();
    if let Some(c) = v.get("coords") {
        let obj = c.as_object().ok_or_else(|| usage("coords must be an object keyed by node labels"))?;
        for (k, x) in obj {
            coords.insert(parse_node_label(k, rank)?, parse_multval(q, x)?);
        }
    }
    Ok(CompactifiedPoint::new(q, rank, tau, coords)?)
}

/// Rows of `a/b+c/d*w` strings.
pub fn parse_vertex(v: &Value, p: i64) -> Result<LatticeClass> {
    let rows = as_array(v, "vertex")?;
    let rows: Vec<Vec<QuadElt>> = rows
        .iter()
        .map(|r| as_array(r, "vertex row")?.iter().map(|x| Ok(QuadElt::parse(as_str(x, "entry")?, p)?)).collect())
        .collect::<Result<_>>()?;
    let l = satake_core::building::Lattice::from_rows(Ring::Ramified, p, &rows)?;
    Ok(l.class()?)
}

/// `"1,0;0,w"` as rows separated by `;`.
pub fn parse_vertex_text(s: &str, p: i64) -> Result<LatticeClass> {
    let rows: Vec<Value> =
        s.split(';').map(|r| Value::Array(r.split(',').map(|x| Value::String(x.trim().into())).collect())).collect();
    parse_vertex(&Value::Array(rows), p).with_context(|| format!("bad vertex {s:?}"))
}
