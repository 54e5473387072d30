//! End-to-end runs of the `mmconc` binary.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn mmconc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmconc")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn sep_on_two_points() {
    let tmp = tempfile::tempdir().unwrap();
    let f = write(tmp.path(), "two.csv", "x\n0\n1\n");
    let out = mmconc(&["sep", "--input", &f, "--kappa", "0.25"]);
    let v = json(&out);
    assert_eq!(v["profile"]["sep"][0], 1.0);
    assert_eq!(v["profile"]["mode"], "exact");
    assert!(String::from_utf8_lossy(&out.stderr).contains("mode: exact"));
}

#[test]
fn dims_on_singleton_are_infinite() {
    let tmp = tempfile::tempdir().unwrap();
    let f = write(tmp.path(), "one.csv", "0.5,0.5\n");
    let v = json(&mmconc(&["dims", "--input", &f]));
    for key in ["dim_concentration", "dim_separation", "dim_chavez"] {
        assert_eq!(v["report"][key], "infinity", "{key}");
    }
}

#[test]
fn emd_with_itself_is_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let f = write(tmp.path(), "pts.csv", "x,y,weight\n0,0,1\n1,0,2\n0,3,1\n");
    let v = json(&mmconc(&["emd", "--input", &f]));
    assert_eq!(v["cost"], 0.0);
    let mu = write(tmp.path(), "mu.csv", "1\n0\n0\n");
    let nu = write(tmp.path(), "nu.csv", "0\n1\n0\n");
    let v = json(&mmconc(&["emd", "--input", &f, "--mu", &mu, "--nu", &nu]));
    assert_eq!(v["cost"], 1.0);
}

#[test]
fn parse_errors_name_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let f = write(tmp.path(), "bad.csv", "0,0\n1,1\n2,oops\n");
    let out = mmconc(&["alpha", "--input", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn exact_oracle_refuses_large_spaces() {
    let out = mmconc(&[
        "alpha",
        "--generate",
        r#"{"family":"sphere","dim":2,"n":40}"#,
        "--mode",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("22"));
}

#[test]
fn unknown_experiment_and_bad_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("o");
    let out = mmconc(&["experiment", "nope", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
    assert_eq!(mmconc(&["sep", "--no-such-flag"]).status.code(), Some(2));
}

#[test]
fn experiment_limits_are_enforced() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(
        tmp.path(),
        "spec.json",
        r#"{"name":"sphere_separation","dims":[3],"n":200000,"kappa_steps":10,"restarts":1,"seed":1}"#,
    );
    let out_dir = tmp.path().join("o");
    let out = mmconc(&["experiment", "sphere_separation", "--spec", &spec, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    // a regular file where the directory should go
    let blocker = write(tmp.path(), "file", "");
    let out = mmconc(&["experiment", "hamming_dimension", "--out", &format!("{blocker}/sub")]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn generated_inputs_round_trip_through_gen() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("g");
    let spec = r#"{"family":"hamming_cube","d":3}"#;
    json(&mmconc(&["gen", "--generate", spec, "--out", dir.to_str().unwrap()]));
    let csv = dir.join("space.csv");
    let a = json(&mmconc(&["sep", "--generate", spec, "--grid", "4"]));
    let b = json(&mmconc(&[
        "sep",
        "--input",
        csv.to_str().unwrap(),
        "--metric",
        "hamming",
        "--grid",
        "4",
    ]));
    assert_eq!(a["profile"]["sep"], b["profile"]["sep"]);
    let c = json(&mmconc(&["sep", "--generate", spec, "--grid", "4", "--mode", "analytic"]));
    assert_eq!(a["profile"]["sep"], c["profile"]["sep"]);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = r#"{"family":"gaussian_cloud","d":5,"sigma":1.0,"n":300}"#;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let dir = tmp.path().join(format!("r{k}"));
        let d = dir.to_str().unwrap();
        for cmd in ["alpha", "sep", "dims", "net"] {
            let sub = format!("{d}/{cmd}");
            let extra: &[&str] = if cmd == "net" { &["--radius", "0.5,1,2"] } else { &[] };
            let mut args = vec![cmd, "--generate", spec, "--seed", "9", "--out", &sub];
            args.extend_from_slice(extra);
            json(&mmconc(&args));
        }
        let mut files = Vec::new();
        for cmd in ["alpha", "sep", "dims", "net"] {
            let mut entries: Vec<_> = std::fs::read_dir(dir.join(cmd)).unwrap().map(|e| e.unwrap().path()).collect();
            entries.sort();
            for p in entries {
                files.push((p.file_name().unwrap().to_owned(), std::fs::read(&p).unwrap()));
            }
        }
        outputs.push(files);
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn bound_prints_the_caveat() {
    let tmp = tempfile::tempdir().unwrap();
    let prof = write(tmp.path(), "p.csv", "u,n_upper\n0.00001,100000\n1,1\n");
    let out = mmconc(&["bound", "--profile", &prof, "--eps", "0.1"]);
    let v = json(&out);
    assert!(v["bound"]["n_ceil"].as_u64().unwrap() > 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("constant"));
}

#[test]
fn analytic_mode_skips_building_large_cubes() {
    let v = json(&mmconc(&[
        "sep",
        "--generate",
        r#"{"family":"hamming_cube","d":40}"#,
        "--mode",
        "analytic",
        "--kappa",
        "0.5",
    ]));
    // two halves of the cube can be pushed one coordinate apart
    assert_eq!(v["profile"]["sep"][0], 0.025);
    assert_eq!(v["profile"]["mode"], "analytic");
}
