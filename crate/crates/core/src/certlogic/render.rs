use serde_json::{json, Map, Value};

use super::dag::{EdgeRef, FormulaDag, Node, NodeId};
use super::CertError;
use crate::model::{FunctorKind, Key};

/// Text form of the formula at `root`. Nodes other than leaves that occur
/// more than once are bound with `let #k = ...` lines before the body.
pub fn render_text(dag: &FormulaDag, root: EdgeRef, kind: &FunctorKind) -> Result<String, CertError> {
    if !dag.contains(root) {
        return Err(CertError::Dangling(root.node));
    }
    let order = dag.reachable(root);
    let mut refs = vec![0usize; dag.len()];
    refs[root.node] += 1;
    for &i in &order {
        for ch in dag.node(i).children() {
            refs[ch.node] += 1;
        }
    }
    let leaf = |i: NodeId| -> Option<String> {
        match dag.node(i) {
            Node::Top => Some("T".to_string()),
            Node::Mod0(o) => Some(format!("<{}>", o.render_f1(kind))),
            _ => None,
        }
    };
    let bound = |i: NodeId| refs[i] >= 2 && leaf(i).is_none();
    let is_conj = |i: NodeId| matches!(dag.node(i), Node::Conj(..)) && !bound(i);

    // Unbound inner nodes are referenced once, so their text is moved
    // into the parent.
    let mut text: Vec<Option<String>> = vec![None; dag.len()];
    let mut lets = Vec::new();
    let take = |e: EdgeRef, text: &mut Vec<Option<String>>| -> String {
        let s = match leaf(e.node) {
            Some(s) => s,
            None if bound(e.node) => format!("#{}", e.node),
            None => text[e.node].take().expect("child rendered once"),
        };
        match (e.neg, is_conj(e.node)) {
            (true, true) => format!("~({s})"),
            (true, false) => format!("~{s}"),
            (false, _) => s,
        }
    };
    for &i in &order {
        let s = match dag.node(i) {
            Node::Top | Node::Mod0(_) => continue,
            Node::Mod2(s, d) => format!("[{}]({})", s.render(kind), take(*d, &mut text)),
            Node::Mod3(t, d, b) => {
                let d = take(*d, &mut text);
                let b = take(*b, &mut text);
                format!("[{}]({d},{b})", t.render(kind))
            }
            Node::Conj(l, r) => {
                let l = take(*l, &mut text);
                let r_conj = is_conj(r.node) && !r.neg;
                let r = take(*r, &mut text);
                if r_conj {
                    format!("{l} /\\ ({r})")
                } else {
                    format!("{l} /\\ {r}")
                }
            }
        };
        if bound(i) {
            lets.push(format!("let #{i} = {s}"));
        } else {
            text[i] = Some(s);
        }
    }
    let body = take(root, &mut text);
    lets.push(body);
    Ok(lets.join("\n"))
}

fn edge_json(e: EdgeRef) -> Value {
    json!({"node": e.node, "neg": e.neg})
}

/// The whole DAG plus named roots.
pub fn serialize_dag(dag: &FormulaDag, roots: &[(String, EdgeRef)], kind: &FunctorKind) -> Result<Value, CertError> {
    for (_, r) in roots {
        if !dag.contains(*r) {
            return Err(CertError::Dangling(r.node));
        }
    }
    let nodes: Vec<Value> = dag
        .nodes()
        .iter()
        .enumerate()
        .map(|(id, node)| {
            let key = match node {
                Node::Top | Node::Conj(..) => Value::Null,
                Node::Mod0(k) | Node::Mod2(k, _) | Node::Mod3(k, _, _) => k.to_json(kind),
            };
            let children: Vec<Value> = node.children().into_iter().map(edge_json).collect();
            json!({"id": id, "kind": node.kind_name(), "key": key, "children": children})
        })
        .collect();
    let mut delta = Map::new();
    for (name, r) in roots {
        delta.insert(name.clone(), edge_json(*r));
    }
    Ok(json!({"nodes": nodes, "delta": delta}))
}

fn malformed(msg: impl Into<String>) -> CertError {
    CertError::Malformed(msg.into())
}

fn parse_edge(v: &Value, limit: usize) -> Result<EdgeRef, CertError> {
    let node = v.get("node").and_then(Value::as_u64).ok_or_else(|| malformed("edge without node"))? as usize;
    let neg = v.get("neg").and_then(Value::as_bool).ok_or_else(|| malformed("edge without neg"))?;
    if node >= limit {
        return Err(CertError::Dangling(node));
    }
    Ok(EdgeRef { node, neg })
}

/// Inverse of [`serialize_dag`].
pub fn parse_dag(v: &Value, kind: &FunctorKind) -> Result<(FormulaDag, Vec<(String, EdgeRef)>), CertError> {
    let nodes = v.get("nodes").and_then(Value::as_array).ok_or_else(|| malformed("missing nodes"))?;
    let mut dag = FormulaDag::new();
    for (i, n) in nodes.iter().enumerate() {
        if n.get("id").and_then(Value::as_u64) != Some(i as u64) {
            return Err(malformed(format!("node {i}: ids must be consecutive")));
        }
        let children = n
            .get("children")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed(format!("node {i}: missing children")))?
            .iter()
            .map(|e| parse_edge(e, i))
            .collect::<Result<Vec<_>, _>>()?;
        let key = |arity: usize| -> Result<Key, CertError> {
            n.get("key")
                .and_then(|k| Key::from_json(k, kind, arity))
                .ok_or_else(|| malformed(format!("node {i}: bad key")))
        };
        let kind_name = n.get("kind").and_then(Value::as_str).unwrap_or("");
        let node = match (kind_name, children.as_slice()) {
            ("top", []) => Node::Top,
            ("conj", [l, r]) => Node::Conj(*l, *r),
            ("mod0", []) => Node::Mod0(key(1)?),
            ("mod2", [d]) => Node::Mod2(key(2)?, *d),
            ("mod3", [d, b]) => Node::Mod3(key(3)?, *d, *b),
            _ => return Err(malformed(format!("node {i}: unknown kind {kind_name:?} or wrong child count"))),
        };
        if dag.add(node).node != i {
            return Err(malformed(format!("node {i}: duplicate top")));
        }
    }
    let mut roots = Vec::new();
    if let Some(delta) = v.get("delta") {
        let delta = delta.as_object().ok_or_else(|| malformed("delta must be an object"))?;
        for (name, e) in delta {
            roots.push((name.clone(), parse_edge(e, dag.len())?));
        }
    }
    Ok((dag, roots))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf_and_negated_conj() {
        let k = FunctorKind::Powerset;
        let mut d = FormulaDag::new();
        let a = d.mod0(Key::Pow(0));
        assert_eq!(render_text(&d, a, &k).unwrap(), "<pow:empty>");
        let b = d.mod0(Key::Pow(1));
        let c = d.conj(a, b.negate());
        assert_eq!(render_text(&d, c, &k).unwrap(), "<pow:empty> /\\ ~<pow:nonempty>");
        assert_eq!(render_text(&d, c.negate(), &k).unwrap(), "~(<pow:empty> /\\ ~<pow:nonempty>)");
    }

    #[test]
    fn shared_nodes_get_bindings() {
        let k = FunctorKind::Powerset;
        let mut d = FormulaDag::new();
        let t = d.top();
        let a = d.mod0(Key::Pow(1));
        let m = d.mod3(Key::Pow(0b101), a, t);
        let l = d.conj(a, m);
        let r = d.conj(l, m.negate());
        let text = render_text(&d, r, &k).unwrap();
        assert_eq!(text, "let #2 = [{0,2}](<pow:nonempty>,T)\n<pow:nonempty> /\\ #2 /\\ ~#2");
    }

    #[test]
    fn right_nested_conj_parenthesized() {
        let k = FunctorKind::Powerset;
        let mut d = FormulaDag::new();
        let a = d.mod0(Key::Pow(1));
        let b = d.mod0(Key::Pow(0));
        let ab = d.conj(a, b);
        let top = d.top();
        let r = d.conj(top, ab);
        assert_eq!(render_text(&d, r, &k).unwrap(), "T /\\ (<pow:nonempty> /\\ <pow:empty>)");
    }

    #[test]
    fn json_round_trip() {
        let k = FunctorKind::Lmc { alphabet: vec!["a".into()] };
        let mut d = FormulaDag::new();
        let half = crate::model::rat(1, 2);
        let leaf = d.mod0(Key::Lmc(vec![Some(vec![half.clone()])]));
        let t = d.top();
        let m = d.mod3(Key::Lmc(vec![Some(vec![half.clone(), half.clone(), crate::model::rat(0, 1)])]), leaf, t);
        let c = d.conj(leaf, m.negate());
        let v = serialize_dag(&d, &[("x".into(), c)], &k).unwrap();
        let (back, roots) = parse_dag(&v, &k).unwrap();
        assert_eq!(back.nodes(), d.nodes());
        assert_eq!(roots, vec![("x".to_string(), c)]);
    }

    #[test]
    fn dangling_rejected() {
        let d = FormulaDag::new();
        let k = FunctorKind::Powerset;
        assert_eq!(render_text(&d, EdgeRef::pos(3), &k), Err(CertError::Dangling(3)));
        let v = json!({"nodes": [{"id": 0, "kind": "conj", "key": null, "children": [{"node": 0, "neg": false}, {"node": 0, "neg": false}]}]});
        assert_eq!(parse_dag(&v, &k).unwrap_err(), CertError::Dangling(0));
    }
}
