use bvphi::io::{parse_pgm, pgm_bytes, validate_report, Image};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bvphi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvphi")).args(args).env("BVPHI_THREADS", "1").output().unwrap()
}

fn write(dir: &Path, name: &str, body: &[u8]) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn step_signal(n: usize) -> String {
    let mut s = String::from("x,u\n");
    for k in 0..n {
        let x = (k as f64 + 0.5) / n as f64;
        s += &format!("{x},{}\n", if x < 0.5 { 0.0 } else { 1.0 });
    }
    s
}

#[test]
fn version_flag() {
    let out = bvphi(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0.1.0") && text.contains("schema"), "{text}");
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let phi = write(d.path(), "phi.json", br#"{"family":"linear"}"#);
    let sig = write(d.path(), "u.csv", step_signal(16).as_bytes());
    let out = bvphi(&["modular", "--phi", &phi, "--signal", &sig]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(bvphi(&["modular", "--signal", &sig]).status.code(), Some(2));
    assert_eq!(bvphi(&["launch"]).status.code(), Some(2));
    let bad = write(d.path(), "bad.csv", b"x,u\n0.1,0\n0.2,oops\n");
    let out = bvphi(&["modular", "--phi", &phi, "--signal", &bad]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:3:"));
    let bad_phi = write(d.path(), "bad.json", br#"{"family":"nope"}"#);
    assert_eq!(bvphi(&["modular", "--phi", &bad_phi, "--signal", &sig]).status.code(), Some(3));
}

#[test]
fn modular_of_step_is_its_height() {
    let d = tempfile::tempdir().unwrap();
    let phi = write(d.path(), "phi.json", br#"{"family":"linear"}"#);
    let sig = write(d.path(), "u.csv", step_signal(32).as_bytes());
    let atoms = write(d.path(), "a.csv", b"x,jump\n0.5,1\n");
    let out = bvphi(&["modular", "--phi", &phi, "--signal", &sig, "--atoms", &atoms]);
    let r = json(&out);
    validate_report("modular", &r).unwrap();
    let total = r["total"].as_f64().unwrap();
    assert!((total - 1.0).abs() < 1e-9, "{total}");
}

#[test]
fn flags_override_config_file() {
    let d = tempfile::tempdir().unwrap();
    let phi = write(d.path(), "phi.json", br#"{"family":"power_varexp","p":{"kind":"const","value":2}}"#);
    let conf = write(d.path(), "c.json", format!(r#"{{"phi":"{phi}","x":0.0,"s":[1.0]}}"#).as_bytes());
    let r = json(&bvphi(&["conjugate", "--config", &conf]));
    let c1 = r["points"][0]["conjugate"].as_f64().unwrap();
    let r = json(&bvphi(&["conjugate", "--config", &conf, "--s", "2"]));
    let c2 = r["points"][0]["conjugate"].as_f64().unwrap();
    // t² has conjugate s²/4
    assert!((c1 - 0.25).abs() < 1e-12 && (c2 - 1.0).abs() < 1e-12, "{c1} {c2}");
    assert_eq!(r["config"]["s"][0].as_f64(), Some(2.0));
}

#[test]
fn repeat_runs_are_identical() {
    let d = tempfile::tempdir().unwrap();
    let phi = write(d.path(), "phi.json", br#"{"family":"linear"}"#);
    let sig = write(d.path(), "u.csv", step_signal(16).as_bytes());
    let args = ["dualsup", "--phi", &phi, "--signal", &sig, "--resolution", "2", "--seed", "7"];
    let a = bvphi(&args);
    let b = bvphi(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    validate_report("dualsup", &json(&a)).unwrap();
}

#[test]
fn pgm_denoise_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let phi = write(d.path(), "phi.json", br#"{"family":"linear"}"#);
    let (w, h) = (12, 10);
    let values = (0..w * h).map(|i| if i % w < w / 2 { 0.25 } else { 0.75 }).collect();
    let img = Image { width: w, height: h, maxval: 255, values };
    let input = write(d.path(), "in.pgm", &pgm_bytes(&img, true).unwrap());
    let out = d.path().join("out.pgm").display().to_string();
    let rep = d.path().join("r.json").display().to_string();
    let res = bvphi(&["denoise", "--phi", &phi, "--input", &input, "--p", "1.5", "--out", &out, "--report", &rep]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let back = parse_pgm(&std::fs::read(&out).unwrap(), &out).unwrap();
    assert_eq!((back.width, back.height), (w, h));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    validate_report("denoise", &r).unwrap();
    // a two-level image keeps its ordering after smoothing
    assert!(back.values[0] < back.values[w - 1]);
}

#[test]
fn gamma_sweep_report() {
    let d = tempfile::tempdir().unwrap();
    let phi = write(d.path(), "phi.json", br#"{"family":"linear"}"#);
    let input = write(d.path(), "f.csv", step_signal(64).as_bytes());
    let limit = d.path().join("limit.csv").display().to_string();
    let out = bvphi(&["gamma-sweep", "--phi", &phi, "--input", &input, "--kmax", "4", "--out", &limit]);
    let r = json(&out);
    validate_report("gamma-sweep", &r).unwrap();
    assert_eq!(r["energies"].as_array().unwrap().len(), 4);
    let sig = bvphi::io::load_signal(Path::new(&limit)).unwrap();
    assert_eq!(sig.values.len(), 64);
}

#[test]
fn check_conditions_report() {
    let d = tempfile::tempdir().unwrap();
    let phi = write(d.path(), "phi.json", br#"{"family":"power_varexp","p":{"kind":"power_type","alpha":1,"x0":0}}"#);
    let out = bvphi(&["check-conditions", "--phi", &phi, "--domain", "-1,1,64"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    validate_report("check-conditions", &json(&out)).unwrap();
}
