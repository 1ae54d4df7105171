use serde_json::Value;
use std::process::{Command, Output};

fn ffhecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffhecke")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = ffhecke(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert_eq!(v["schema"], 1);
    v
}

#[test]
fn graph_reports_rays_and_writes_dot() {
    let dot = std::env::temp_dir().join(format!("ffhecke-cli-{}.dot", std::process::id()));
    let v = json(&["graph", "--q", "2", "--level", "T^3", "--dot", dot.to_str().unwrap()]);
    assert_eq!(v["result"]["rays"].as_array().unwrap().len(), 4);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph quotient {"));
    std::fs::remove_file(dot).ok();
}

#[test]
fn eisenstein_ideal_quotient_for_three_linear_factors() {
    let v = json(&["ideal", "--q", "3", "--level", "T*(T-1)*(T-2)"]);
    assert_eq!(v["result"]["T_mod_E"], serde_json::json!([4, 4, 16]));
    assert_eq!(v["result"]["index_T_T0"], "16");
}

#[test]
fn component_group_at_prime_level() {
    let v = json(&["phi", "--q", "2", "--level", "T^4+T^3+1"]);
    assert_eq!(v["result"]["Phi"], serde_json::json!([2, 80]));
    assert_eq!(v["result"]["Phi_E_kernel"], serde_json::json!([5]));
}

#[test]
fn field_given_by_characteristic_and_degree() {
    let a = json(&["cusps", "--q", "4", "--level", "T*(T-1)*(T-[x])"]);
    let b = json(&["cusps", "--char", "2", "--ext", "2", "--level", "T*(T-1)*(T-[x])"]);
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn output_is_deterministic() {
    let args = ["hecke", "--q", "3", "--level", "T^2*(T-1)"];
    assert_eq!(ffhecke(&args).stdout, ffhecke(&args).stdout);
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("ffhecke-cli-{}.json", std::process::id()));
    let out = ffhecke(&["eis", "--q", "2", "--level", "T^3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "eis");
    std::fs::remove_file(path).ok();
}

#[test]
fn exit_codes() {
    assert_eq!(ffhecke(&["graph", "--q", "2", "--level", "T^^3"]).status.code(), Some(2));
    assert_eq!(ffhecke(&["graph", "--q", "6", "--level", "T"]).status.code(), Some(2));
    assert_eq!(ffhecke(&["graph", "--q", "3", "--level", "0"]).status.code(), Some(2));
    assert_eq!(ffhecke(&["verify", "--suite", "deg3", "--q", "2"]).status.code(), Some(0));
}
