//! Browser bindings. Each export takes a system as JSON text and returns
//! a JSON string; errors come back as JS exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use coalcert::certlogic::{attach_certificates, distinguish, render_text, CertMap, Distinction, FormulaDag};
use coalcert::fixtures;
use coalcert::model::{parse_coalgebra, Coalgebra};
use coalcert::partition::{run, Mode, Outcome};
use coalcert::semantics::check_certificates;
use coalcert::translate::{self, eval_domain, parse_domain_formula, render_domain};

/// Domain formulae above this tree size are not rendered.
const MAX_TREE: u64 = 20_000;

fn load(system: &str) -> Result<Coalgebra, String> {
    parse_coalgebra(system).map_err(|e| e.to_string())
}

fn certify(c: &Coalgebra) -> Result<(Outcome, FormulaDag, CertMap), String> {
    let out = run(c, Mode::Auto).map_err(|e| e.to_string())?;
    let mode = Mode::Auto.resolve(c).map_err(|e| e.to_string())?;
    let (dag, map) = attach_certificates(c, &out.trace, mode, true).map_err(|e| e.to_string())?;
    let report = check_certificates(c, &out.partition, &dag, &map);
    if !report.passed() {
        return Err(format!("certificate self-check failed: {}", report.to_json(c)));
    }
    Ok((out, dag, map))
}

fn render(c: &Coalgebra, dag: &FormulaDag, root: coalcert::certlogic::EdgeRef, domain: bool) -> Result<String, String> {
    if !domain {
        return render_text(dag, root, c.kind()).map_err(|e| e.to_string());
    }
    let f = translate::translate(dag, root, c.kind());
    let size = translate::tree_size(&f);
    if size > MAX_TREE.into() {
        Ok(format!("(tree size {size}, not rendered)"))
    } else {
        Ok(render_domain(&f))
    }
}

fn names(c: &Coalgebra, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| c.name(x).to_string()).collect()
}

/// Blocks of the minimized system with one certificate each.
pub fn minimize_json(system: &str, domain: bool) -> Result<Value, String> {
    let c = load(system)?;
    let (out, dag, map) = certify(&c)?;
    let blocks = out
        .partition
        .blocks()
        .iter()
        .map(|b| Ok(json!({"states": names(&c, b), "certificate": render(&c, &dag, map.certificate(b[0]), domain)?})))
        .collect::<Result<Vec<_>, String>>()?;
    Ok(json!({"kind": c.kind().tag(), "blocks": blocks}))
}

/// A formula true at `x` and false at `y`, or `equivalent: true`.
pub fn distinguish_json(system: &str, x: &str, y: &str, domain: bool) -> Result<Value, String> {
    let c = load(system)?;
    let state = |s: &str| c.state(s).ok_or_else(|| format!("unknown state {s:?}"));
    let (xi, yi) = (state(x)?, state(y)?);
    let (_, dag, map) = certify(&c)?;
    match distinguish(xi, yi, &map, &dag).map_err(|e| e.to_string())? {
        Distinction::Equivalent => Ok(json!({"equivalent": true})),
        Distinction::Formula(e) => Ok(json!({"equivalent": false, "formula": render(&c, &dag, e, domain)?})),
    }
}

/// States satisfying a formula of the domain-specific logic.
pub fn check_json(system: &str, formula: &str) -> Result<Value, String> {
    let c = load(system)?;
    let f = parse_domain_formula(formula, c.kind()).map_err(|e| e.to_string())?;
    let ext = eval_domain(&c, &f).map_err(|e| e.to_string())?;
    Ok(json!({"extension": ext.names(&c)}))
}

/// One of the built-in example systems.
pub fn example_json(name: &str) -> Result<Value, String> {
    let c = match name {
        "fig1" => fixtures::fig1(),
        "fig2" => fixtures::fig2(),
        "threetower" => fixtures::three_tower(3),
        "layers" => fixtures::layers(3),
        other => return Err(format!("unknown example {other:?}")),
    };
    Ok(c.to_json())
}

fn js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| serde_json::to_string_pretty(&v).expect("serializable")).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn minimize(system: &str, domain: bool) -> Result<String, JsError> {
    js(minimize_json(system, domain))
}

#[wasm_bindgen(js_name = distinguish)]
pub fn distinguish_states(system: &str, x: &str, y: &str, domain: bool) -> Result<String, JsError> {
    js(distinguish_json(system, x, y, domain))
}

#[wasm_bindgen]
pub fn check(system: &str, formula: &str) -> Result<String, JsError> {
    js(check_json(system, formula))
}

#[wasm_bindgen]
pub fn example(name: &str) -> Result<String, JsError> {
    js(example_json(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_example_is_an_error() {
        assert!(example_json("fig9").is_err());
    }

    #[test]
    fn large_trees_are_elided() {
        let c = fixtures::layers(15);
        let text = c.to_json().to_string();
        let v = minimize_json(&text, true).unwrap();
        let rendered: Vec<&str> = v["blocks"].as_array().unwrap().iter().map(|b| b["certificate"].as_str().unwrap()).collect();
        assert!(rendered.iter().any(|s| s.contains("not rendered")));
    }
}
