use num_rational::BigRational;
use serde_json::{Map, Value};

use super::coalgebra::{Coalgebra, Row, StateId};
use super::functor::{FunctorKind, DFA_FINAL, DFA_NONFINAL};
use super::weight::{json_rational, Monoid, Weight};
use super::ModelError;

/// Parses the JSON input format into a validated system.
pub fn parse_coalgebra(text: &str) -> Result<Coalgebra, ModelError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| ModelError::Syntax(e.to_string()))?;
    from_value(&doc)
}

pub fn from_value(doc: &Value) -> Result<Coalgebra, ModelError> {
    let top = doc.as_object().ok_or_else(|| ModelError::invalid("$", "expected an object"))?;
    let kind = parse_kind(top.get("functor").ok_or_else(|| ModelError::invalid("functor", "missing"))?)?;
    let states = top
        .get("states")
        .and_then(Value::as_array)
        .ok_or_else(|| ModelError::invalid("states", "expected an array of names"))?;
    let mut names = Vec::with_capacity(states.len());
    for (i, s) in states.iter().enumerate() {
        let s = s.as_str().ok_or_else(|| ModelError::invalid(format!("states[{i}]"), "expected a string"))?;
        names.push(s.to_string());
    }
    let empty = Map::new();
    let edges = match top.get("edges") {
        None => &empty,
        Some(v) => v.as_object().ok_or_else(|| ModelError::invalid("edges", "expected an object"))?,
    };
    let index: std::collections::HashMap<&str, StateId> =
        names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let resolve = |name: &str, path: &str| -> Result<StateId, ModelError> {
        index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::Dangling { path: path.to_string(), name: name.to_string() })
    };
    for source in edges.keys() {
        if !index.contains_key(source.as_str()) {
            return Err(ModelError::Dangling { path: format!("edges.{source}"), name: source.clone() });
        }
    }
    let mut rows = Vec::with_capacity(names.len());
    for name in &names {
        let path = format!("edges.{name}");
        let entry = edges.get(name);
        rows.push(parse_row(&kind, entry, &path, &resolve)?);
    }
    Coalgebra::new(kind, names, rows)
}

fn parse_kind(v: &Value) -> Result<FunctorKind, ModelError> {
    let obj = v.as_object().ok_or_else(|| ModelError::invalid("functor", "expected an object"))?;
    let tag = obj.get("kind").and_then(Value::as_str).ok_or_else(|| ModelError::invalid("functor.kind", "missing"))?;
    let alphabet = || -> Result<Vec<String>, ModelError> {
        let arr = obj
            .get("alphabet")
            .and_then(Value::as_array)
            .ok_or_else(|| ModelError::invalid("functor.alphabet", "expected an array of labels"))?;
        let mut out: Vec<String> = Vec::new();
        for (i, a) in arr.iter().enumerate() {
            let a = a.as_str().ok_or_else(|| ModelError::invalid(format!("functor.alphabet[{i}]"), "expected a string"))?;
            if out.iter().any(|b| b == a) {
                return Err(ModelError::invalid(format!("functor.alphabet[{i}]"), "duplicate label"));
            }
            out.push(a.to_string());
        }
        if out.is_empty() {
            return Err(ModelError::invalid("functor.alphabet", "alphabet must be nonempty"));
        }
        Ok(out)
    };
    match tag {
        "powerset" => Ok(FunctorKind::Powerset),
        "monoid" => {
            let m = obj.get("monoid").and_then(Value::as_str).unwrap_or("");
            Monoid::from_name(m)
                .map(FunctorKind::MonoidValued)
                .ok_or_else(|| ModelError::UnknownKind { path: "functor.monoid".into(), kind: m.to_string() })
        }
        "dist" => Ok(FunctorKind::Dist),
        "lmc" => Ok(FunctorKind::Lmc { alphabet: alphabet()? }),
        "dfa" => Ok(FunctorKind::Dfa { alphabet: alphabet()? }),
        "signature" => {
            let syms = obj
                .get("symbols")
                .and_then(Value::as_object)
                .ok_or_else(|| ModelError::invalid("functor.symbols", "expected an object of arities"))?;
            let mut out = Vec::new();
            for (s, a) in syms {
                let a = a
                    .as_u64()
                    .ok_or_else(|| ModelError::invalid(format!("functor.symbols.{s}"), "arity must be a natural number"))?;
                out.push((s.clone(), a as usize));
            }
            Ok(FunctorKind::signature(out))
        }
        other => Err(ModelError::UnknownKind { path: "functor.kind".into(), kind: other.to_string() }),
    }
}

fn parse_row(
    kind: &FunctorKind,
    entry: Option<&Value>,
    path: &str,
    resolve: &dyn Fn(&str, &str) -> Result<StateId, ModelError>,
) -> Result<Row, ModelError> {
    let weighted_map = |v: &Value, p: &str, monoid: Monoid| -> Result<Vec<(StateId, Weight)>, ModelError> {
        let m = v.as_object().ok_or_else(|| ModelError::invalid(p, "expected an object of weights"))?;
        let mut out = Vec::with_capacity(m.len());
        for (t, w) in m {
            let tp = format!("{p}.{t}");
            let y = resolve(t, &tp)?;
            let w = Weight::from_json(w, monoid)
                .ok_or_else(|| ModelError::invalid(&tp, format!("expected a {} weight", monoid.name())))?;
            out.push((y, w));
        }
        Ok(out)
    };
    match kind {
        FunctorKind::Powerset => {
            let Some(v) = entry else { return Ok(Row::Set(Vec::new())) };
            let arr = v.as_array().ok_or_else(|| ModelError::invalid(path, "expected an array of successor names"))?;
            let mut succ = Vec::with_capacity(arr.len());
            for (i, t) in arr.iter().enumerate() {
                let tp = format!("{path}[{i}]");
                let t = t.as_str().ok_or_else(|| ModelError::invalid(&tp, "expected a state name"))?;
                succ.push(resolve(t, &tp)?);
            }
            Ok(Row::Set(succ))
        }
        FunctorKind::MonoidValued(_) | FunctorKind::Dist => {
            let Some(v) = entry else { return Ok(Row::Weighted(Vec::new())) };
            Ok(Row::Weighted(weighted_map(v, path, kind.monoid().unwrap())?))
        }
        FunctorKind::Lmc { alphabet } => {
            let Some(v) = entry else { return Ok(Row::Labelled(vec![None; alphabet.len()])) };
            let m = v.as_object().ok_or_else(|| ModelError::invalid(path, "expected an object keyed by label"))?;
            for label in m.keys() {
                if !alphabet.contains(label) {
                    return Err(ModelError::invalid(format!("{path}.{label}"), "unknown label"));
                }
            }
            let mut rows = Vec::with_capacity(alphabet.len());
            for a in alphabet {
                let lp = format!("{path}.{a}");
                match m.get(a) {
                    None | Some(Value::Null) => rows.push(None),
                    Some(r) => {
                        let r = r.as_object().ok_or_else(|| ModelError::invalid(&lp, "expected an object of probabilities"))?;
                        let mut out: Vec<(StateId, BigRational)> = Vec::new();
                        for (t, p) in r {
                            let tp = format!("{lp}.{t}");
                            let y = resolve(t, &tp)?;
                            let p = json_rational(p).ok_or_else(|| ModelError::invalid(&tp, "expected a rational"))?;
                            out.push((y, p));
                        }
                        rows.push(Some(out));
                    }
                }
            }
            Ok(Row::Labelled(rows))
        }
        FunctorKind::Dfa { alphabet } => {
            let v = entry.ok_or_else(|| ModelError::invalid(path, "missing DFA entry"))?;
            let fin = v
                .get("final")
                .and_then(Value::as_bool)
                .ok_or_else(|| ModelError::invalid(format!("{path}.final"), "expected a boolean"))?;
            let next = v
                .get("next")
                .and_then(Value::as_object)
                .ok_or_else(|| ModelError::invalid(format!("{path}.next"), "expected an object keyed by letter"))?;
            for label in next.keys() {
                if !alphabet.contains(label) {
                    return Err(ModelError::invalid(format!("{path}.next.{label}"), "unknown letter"));
                }
            }
            let mut args = Vec::with_capacity(alphabet.len());
            for a in alphabet {
                let lp = format!("{path}.next.{a}");
                let t = next
                    .get(a)
                    .ok_or_else(|| ModelError::MissingLetter { path: lp.clone(), letter: a.clone() })?;
                let t = t.as_str().ok_or_else(|| ModelError::invalid(&lp, "expected a state name"))?;
                args.push(resolve(t, &lp)?);
            }
            Ok(Row::Term { symbol: if fin { DFA_FINAL } else { DFA_NONFINAL }, args })
        }
        FunctorKind::Signature { .. } => {
            let v = entry.ok_or_else(|| ModelError::invalid(path, "missing term entry"))?;
            let sym = v
                .get("symbol")
                .and_then(Value::as_str)
                .ok_or_else(|| ModelError::invalid(format!("{path}.symbol"), "expected a symbol name"))?;
            let symbol = kind
                .symbol_index(sym)
                .ok_or_else(|| ModelError::invalid(format!("{path}.symbol"), format!("unknown symbol {sym:?}")))?;
            let arr = match v.get("args") {
                None => Vec::new(),
                Some(a) => a
                    .as_array()
                    .ok_or_else(|| ModelError::invalid(format!("{path}.args"), "expected an array"))?
                    .clone(),
            };
            let mut args = Vec::with_capacity(arr.len());
            for (i, t) in arr.iter().enumerate() {
                let tp = format!("{path}.args[{i}]");
                let t = t.as_str().ok_or_else(|| ModelError::invalid(&tp, "expected a state name"))?;
                args.push(resolve(t, &tp)?);
            }
            Ok(Row::Term { symbol, args })
        }
    }
}
