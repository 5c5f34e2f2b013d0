use std::path::PathBuf;
use std::process::Command;

use sepmod_cli::{load_cases, run, Built, Output, GRID};
use sepmod_core::modelbuilder::verify::controls;
use sepmod_core::{Rational, SubmodelDescription};

fn sepmod(args: &[&str]) -> Output {
    run(std::iter::once("sepmod").chain(args.iter().copied()))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sepmod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn check_exit_codes() {
    assert_eq!(sepmod(&["check", "--structure", "dlo", "--mode", "t2", "--a", "@{0}", "--b", "@{1}"]).code, 0);
    let ehr = ["check", "--structure", "ehr", "--mode", "t2", "--a", "@{1/2;0}", "--b", "@{3/4;0}"];
    assert_eq!(sepmod(&[&ehr[..], &["--z", "acl-empty"]].concat()).code, 0);
    let out = sepmod(&ehr);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out)["verdict"]["certificate"]["offending"][0]["point"], "@{0;0}");
}

#[test]
fn ex1_refusal_names_f() {
    let out = sepmod(&["check", "--structure", "ex1", "--mode", "t0", "--a", "@{(2,3)}", "--b", "@{2:P2}"]);
    assert_eq!(out.code, 1);
    let v = json(&out);
    assert_eq!(v["verdict"]["certificate"]["offending"][0]["from_a"], "x = f(@{(2,3)})");
    assert!(v["verdict"]["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().starts_with("suspected transposition")));
    let out = sepmod(&["build", "--structure", "ex1", "--a", "@{(2,3)}", "--b", "@{2:P2}"]);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out)["refused"]["certificate"]["offending"][0]["point"], "@{2:P2}");
}

#[test]
fn usage_errors() {
    assert_eq!(sepmod(&["check", "--structure", "dlo", "--a", "@{0}"]).code, 2);
    assert_eq!(sepmod(&["check", "--structure", "dlo", "--a", "@{0}", "--b", "@{0}"]).code, 2);
    assert_eq!(sepmod(&["check", "--structure", "dlo", "--a", "@{(1,2)}", "--b", "@{0}"]).code, 2);
    assert_eq!(sepmod(&["check", "--structure", "nope", "--a", "@{0}", "--b", "@{1}"]).code, 2);
    assert_eq!(sepmod(&["frobnicate"]).code, 2);
    let cfg = scratch("bad-config.json");
    std::fs::write(&cfg, r#"{"structure": "dlo", "mode": "t0", "a": "@{0}", "b": "@{1}", "colour": "red"}"#).unwrap();
    let out = sepmod(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("colour"), "{}", out.stderr);
}

#[test]
fn config_file_and_defaults_are_echoed() {
    let cfg = scratch("config.json");
    std::fs::write(&cfg, r#"{"structure": "dlo", "mode": "t2", "a": "@{0}", "b": "@{1}"}"#).unwrap();
    let out = sepmod(&["check", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(out.code, 0);
    let c = &json(&out)["config"];
    assert_eq!((c["seed"].as_u64(), c["depth"].as_u64(), c["samples"].as_u64(), c["budget"].as_u64()), (Some(9), Some(2), Some(500), Some(200)));
}

#[test]
fn build_then_verify() {
    let d = scratch("d.json");
    let out = sepmod(&["build", "--structure", "dlo", "--a", "@{0}", "--b", "@{1}", "--budget", "40", "--out", d.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let desc: SubmodelDescription<Rational> = serde_json::from_str(&std::fs::read_to_string(&d).unwrap()).unwrap();
    assert_eq!(desc.closed_form.unwrap().text(), "M \\ {1}");
    let out = sepmod(&["verify", d.to_str().unwrap(), "--depth", "2", "--samples", "500", "--seed", "7"]);
    assert_eq!(out.code, 0, "{}", out.stdout);

    let t = scratch("t.json");
    let args = ["build", "--structure", "ehr", "--mode", "t2", "--a", "@{1/2;0}", "--b", "@{3/4;0}", "--z", "acl-empty", "--budget", "40"];
    let out = sepmod(&[&args[..], &["--out", t.to_str().unwrap()]].concat());
    assert_eq!(out.code, 0, "{}", out.stderr);
    let built: Built = serde_json::from_str(&std::fs::read_to_string(&t).unwrap()).unwrap();
    assert!(matches!(built, Built::Twin { .. }));
    assert_eq!(sepmod(&["verify", t.to_str().unwrap(), "--samples", "200"]).code, 0);
}

#[test]
fn verify_controls_and_truncated() {
    let bad = scratch("gap.json");
    std::fs::write(&bad, serde_json::to_string(&controls::interval_gap::<Rational>()).unwrap()).unwrap();
    let out = sepmod(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out)["reports"][0]["failure"]["kind"], "formula");

    let staged = scratch("staged.json");
    let out = sepmod(&["build", "--structure", "dlo", "--a", "@{0}", "--b", "@{1}", "--budget", "5", "--no-closed-form", "--out", staged.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert_eq!(sepmod(&["verify", staged.to_str().unwrap()]).code, 3);

    let junk = scratch("junk.json");
    std::fs::write(&junk, "{\"not\": 1}").unwrap();
    assert_eq!(sepmod(&["verify", junk.to_str().unwrap()]).code, 2);
}

#[test]
fn outputs_are_deterministic() {
    let args = ["build", "--structure", "ex1", "--mode", "t2", "--a", "@{(2,3)}", "--b", "@{(5,1)}", "--budget", "20"];
    let (x, y) = (sepmod(&args), sepmod(&args));
    assert_eq!(x.code, 0);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn hypergraph_closure_types() {
    let h = scratch("h.json");
    std::fs::write(&h, r#"{"X": [1, 2, 3, "w"], "Y": [[1], [2, 3, "w"]], "Z": ["w"]}"#).unwrap();
    let hp = h.to_str().unwrap();
    assert_eq!(sepmod(&["hypergraph", hp, "--mode", "t2", "--a", "1", "--b", "2"]).code, 0);
    assert_eq!(sepmod(&["hypergraph", hp, "--mode", "t0", "--a", "2,3", "--b", "1"]).code, 0);
    assert_eq!(sepmod(&["hypergraph", hp, "--a", "1", "--b", "w"]).code, 2);

    let out = sepmod(&["closure", "--structure", "ex1", "--of", "@{(2,3)}"]);
    assert_eq!(out.code, 0);
    let v = json(&out);
    let listed: Vec<&str> = v["elements"].as_array().unwrap().iter().map(|e| e["point"].as_str().unwrap()).collect();
    assert_eq!(listed, ["@{(2,3)}", "@{2:P2}"]);

    let out = sepmod(&["types", "--structure", "ehr", "--prefix", "2"]);
    assert_eq!(out.code, 0);
    assert_eq!(json(&out)["complete"], false);
}

#[test]
fn bundled_grid_shape() {
    let cases = load_cases(GRID).unwrap();
    assert!(cases.len() >= 60);
    for id in ["dlo", "ehr", "ex1"] {
        for mode in ["t0", "t2"] {
            for z in ["none", "acl-empty", "acl:"] {
                assert!(cases.iter().any(|c| c.structure.to_string() == id && c.mode.to_string() == mode && c.z.starts_with(z)), "{id} {mode} {z}");
            }
        }
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_sepmod");
    let status = Command::new(bin).args(["check", "--structure", "dlo", "--a", "@{0}", "--b", "@{1}"]).output().unwrap();
    assert_eq!(status.status.code(), Some(0));
    let status = Command::new(bin).args(["check", "--structure", "ex1", "--a", "@{(2,3)}", "--b", "@{2:P2}", "--format", "text"]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stdout).starts_with("false"));
}
