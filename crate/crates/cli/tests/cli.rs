mod common;

use coalcert::fixtures;
use coalcert::model::parse_coalgebra;
use coalcert::semantics::eval_formula;
use coalcert::translate::{domain_from_json, eval_domain, parse_domain_formula};
use common::{coalcert, fixture};
use serde_json::Value;

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("valid JSON")
}

#[test]
fn minimize_fig1() {
    let f = fixture("fig1", &["fig1"]);
    let r = coalcert(&["minimize", &f], None);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "3 blocks\n{x}\n{x1, y}\n{z}\n");
    let r = coalcert(&["--format", "json", "minimize", &f], None);
    assert_eq!(json(&r.stdout)["blocks"], json(r#"[["x"], ["x1", "y"], ["z"]]"#));
}

#[test]
fn minimize_empty_system() {
    let r = coalcert(&["minimize", "-"], Some(r#"{"functor": {"kind": "powerset"}, "states": []}"#));
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "0 blocks\n");
}

#[test]
fn minimize_three_tower_gives_singletons() {
    let f = fixture("threetower12", &["threetower", "12"]);
    let r = coalcert(&["minimize", &f], None);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("39 blocks\n"));
    assert_eq!(r.stdout.lines().skip(1).filter(|l| !l.contains(',')).count(), 39);
}

#[test]
fn minimize_dot() {
    let f = fixture("fig2-dot", &["fig2"]);
    let r = coalcert(&["--format", "dot", "minimize", &f], None);
    assert!(r.stdout.starts_with("digraph quotient {"));
    assert!(r.stdout.contains("b1 -> b2 [label=\"tau 1\"];"));
}

#[test]
fn domain_certificates_hold_on_their_blocks() {
    let f = fixture("fig1-dom", &["fig1"]);
    let c = fixtures::fig1();
    let r = coalcert(&["--logic", "domain", "--format", "json", "certificates", &f], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    let blocks = v["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 3);
    for b in blocks {
        let phi = domain_from_json(&b["formula"], c.kind()).unwrap();
        let names: Vec<&str> = b["states"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
        assert_eq!(eval_domain(&c, &phi).unwrap().names(&c), names);
    }
    let text = coalcert(&["--logic", "domain", "certificates", &f], None);
    assert!(text.stdout.contains("{x}:\n  <> T /\\ ~<> ~<> T\n"), "{}", text.stdout);
}

#[test]
fn single_state_certificate_is_a_leaf() {
    let doc = r#"{"functor": {"kind": "powerset"}, "states": ["s"], "edges": {"s": ["s"]}}"#;
    let r = coalcert(&["certificates", "-"], Some(doc));
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "{s}:\n  <pow:nonempty>\n");
}

#[test]
fn cancellative_certificates_use_unary_modalities() {
    let f = fixture("layers8", &["layers", "8"]);
    let r = coalcert(&["--mode", "cancellative", "--format", "json", "certificates", &f], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    for node in v["dag"]["nodes"].as_array().unwrap() {
        assert!(["top", "conj", "mod0", "mod2"].contains(&node["kind"].as_str().unwrap()), "{node}");
        for ch in node["children"].as_array().unwrap() {
            assert_eq!(ch["neg"], Value::Bool(false));
        }
    }
    let text = coalcert(&["--mode", "cancellative", "certificates", &f], None);
    assert!(!text.stdout.contains('~'));
}

#[test]
fn certificate_json_round_trips() {
    let f = fixture("fig2-json", &["fig2"]);
    let c = fixtures::fig2();
    let r = coalcert(&["--format", "json", "certificates", &f], None);
    let v = json(&r.stdout);
    let (dag, roots) = coalcert::certlogic::parse_dag(&v["dag"], c.kind()).unwrap();
    assert_eq!(roots.len(), 4);
    for (name, root) in roots {
        let x = c.state(&name).unwrap();
        let ext = eval_formula(&c, &dag, root);
        assert!(ext.contains(x));
        let block: Vec<&str> = v["blocks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|b| b["states"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect::<Vec<_>>())
            .find(|b| b.contains(&name.as_str()))
            .unwrap();
        for y in 0..c.len() {
            let same_block = block.contains(&c.name(y));
            assert_eq!(ext.contains(y), same_block);
        }
    }
}

#[test]
fn distinguish_verifies_its_formula() {
    let f = fixture("fig1-dist", &["fig1"]);
    let r = coalcert(&["distinguish", &f, "x", "y"], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().last().unwrap(), "x: true, y: false");
    let r = coalcert(&["distinguish", &f, "x", "x"], None);
    assert_eq!(r.stdout, "equivalent\n");
    let r = coalcert(&["distinguish", &f, "x1", "y"], None);
    assert_eq!(r.stdout, "equivalent\n");
    let r = coalcert(&["distinguish", &f, "x", "w"], None);
    assert_eq!(r.code, 2);
}

#[test]
fn distinguish_fig2_in_domain_logic() {
    let f = fixture("fig2-dist", &["fig2"]);
    let c = fixtures::fig2();
    let r = coalcert(&["--logic", "domain", "distinguish", &f, "x", "y"], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut lines = r.stdout.lines();
    let formula = lines.next().unwrap();
    assert!(formula.contains("<tau>="), "{formula}");
    assert_eq!(lines.next().unwrap(), "x: true, y: false");
    let phi = parse_domain_formula(formula, c.kind()).unwrap();
    let ext = eval_domain(&c, &phi).unwrap();
    assert!(ext.contains(0) && !ext.contains(c.state("y").unwrap()));
    let reference = coalcert(&["check", &f, "<tau>=1/2 <tau>=1 T", "x", "y"], None);
    assert_eq!(reference.stdout, "x: true, y: false\n");
}

#[test]
fn check_lists_extension() {
    let f = fixture("fig1-check", &["fig1"]);
    let r = coalcert(&["check", &f, "T"], None);
    assert_eq!(r.stdout, "{x, x1, z, y}\n");
    let r = coalcert(&["--format", "json", "check", &f, "~<> ~<> T", "x", "y"], None);
    assert_eq!(json(&r.stdout), json(r#"{"x": true, "y": false}"#));
    let r = coalcert(&["check", &f, "<> /\\"], None);
    assert_eq!(r.code, 1);
    let r = coalcert(&["check", &f, "<tau>=1 T"], None);
    assert_eq!(r.code, 1);
}

#[test]
fn gen_fixtures() {
    let r = coalcert(&["gen", "threetower", "2"], None);
    let c = parse_coalgebra(&r.stdout).unwrap();
    assert_eq!(c.len(), 9);
    let succ = |s: &str| -> Vec<String> {
        c.successors(c.state(s).unwrap()).into_iter().map(|y| c.name(y).to_string()).collect()
    };
    assert_eq!(succ("x0"), vec!["y0"]);
    assert!(succ("y0").is_empty());
    assert_eq!(succ("z0"), vec!["x0"]);
    let r = coalcert(&["gen", "layers", "0"], None);
    let l = parse_coalgebra(&r.stdout).unwrap();
    assert_eq!(l.names(), ["w0", "x0", "y0", "z0"]);
    assert_eq!(json(&r.stdout)["edges"]["w0"], json(r#"{"w0": "1"}"#));
    let a = coalcert(&["gen", "random", "powerset", "10", "0.3", "42"], None);
    let b = coalcert(&["gen", "random", "powerset", "10", "0.3", "42"], None);
    assert_eq!(a.stdout, b.stdout);
    let seeded = coalcert(&["--seed", "42", "gen", "random", "powerset", "10", "0.3"], None);
    assert_eq!(a.stdout, seeded.stdout);
    assert_eq!(coalcert(&["gen", "random", "nope", "10", "0.3"], None).code, 2);
    assert_eq!(coalcert(&["gen", "threetower", "-1"], None).code, 2);
    assert_eq!(coalcert(&["gen", "random", "powerset", "10", "1.5"], None).code, 2);
}

#[test]
fn config_errors() {
    let f = fixture("fig1-cfg", &["fig1"]);
    let r = coalcert(&["--mode", "cancellative", "certificates", &f], None);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not cancellative"));
    assert_eq!(coalcert(&["minimize", "/nonexistent/file.json"], None).code, 2);
    assert_eq!(coalcert(&["--format", "yaml", "minimize", &f], None).code, 2);
    assert_eq!(coalcert(&["minimize", "-"], Some("[1, 2")).code, 1);
}

#[test]
fn outputs_are_deterministic() {
    let f = fixture("random-det", &["random", "dist", "20", "0.2", "7"]);
    for cmd in [vec!["--format", "json", "certificates"], vec!["--logic", "domain", "certificates"], vec!["stats"]] {
        let mut args = cmd.clone();
        args.push(&f);
        assert_eq!(coalcert(&args, None).stdout, coalcert(&args, None).stdout);
    }
}

#[test]
fn stats_report() {
    let f = fixture("threetower5", &["threetower", "5"]);
    let r = coalcert(&["--format", "json", "--no-simplify", "stats", &f], None);
    let v = json(&r.stdout);
    assert_eq!(v["states"], 18);
    assert_eq!(v["transitions"], 37);
    assert_eq!(v["blocks"], 18);
    assert!(v["dagNodes"].as_f64().unwrap() <= v["nodeBound"].as_f64().unwrap());
    assert!(v["maxSplitterHits"].as_u64().unwrap() <= v["splitterHitLimit"].as_u64().unwrap());
}

#[test]
fn large_domain_formulae_are_not_rendered() {
    let f = fixture("threetower9", &["threetower", "9"]);
    let r = coalcert(&["--logic", "domain", "--max-tree", "1000", "certificates", &f], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stderr.contains("warning: domain formula has tree size"));
    assert!(r.stdout.contains("not rendered"));
}
