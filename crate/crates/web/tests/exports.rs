use coalcert_web::{check_json, distinguish_json, example_json, minimize_json};
use serde_json::json;

fn fig1() -> String {
    example_json("fig1").unwrap().to_string()
}

#[test]
fn minimize_lists_blocks_with_certificates() {
    let v = minimize_json(&fig1(), true).unwrap();
    let states: Vec<_> = v["blocks"].as_array().unwrap().iter().map(|b| b["states"].clone()).collect();
    assert_eq!(states, vec![json!(["x"]), json!(["x1", "y"]), json!(["z"])]);
    assert_eq!(v["blocks"][0]["certificate"], "<> T /\\ ~<> ~<> T");
}

#[test]
fn distinguishing_formula_separates_the_states() {
    let sys = fig1();
    let v = distinguish_json(&sys, "x", "y", true).unwrap();
    assert_eq!(v["equivalent"], false);
    let ext = check_json(&sys, v["formula"].as_str().unwrap()).unwrap();
    let ext: Vec<&str> = ext["extension"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert!(ext.contains(&"x") && !ext.contains(&"y"));
    assert_eq!(distinguish_json(&sys, "x1", "y", false).unwrap(), json!({"equivalent": true}));
}

#[test]
fn check_reports_extension() {
    let sys = example_json("fig2").unwrap().to_string();
    let v = check_json(&sys, "<tau>=1/2 <tau>=1 T").unwrap();
    let ext = v["extension"].as_array().unwrap();
    assert!(ext.contains(&json!("x")));
    assert!(!ext.contains(&json!("y")));
}

#[test]
fn errors_are_messages() {
    assert!(minimize_json("{", false).is_err());
    assert!(distinguish_json(&fig1(), "x", "nope", false).unwrap_err().contains("unknown state"));
    assert!(check_json(&fig1(), "<> /\\").is_err());
}
