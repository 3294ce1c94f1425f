use std::path::PathBuf;
use std::process::Command;

use p1lab::cli::run_with;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("p1lab").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn cval(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("p1lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn airy_fixture() {
    let (code, out, _) = call(&["example", "--name", "airy"]);
    assert_eq!(code, 0);
    let want = json(include_str!("fixtures/airy.json"));
    assert_eq!(json(&out), want);
}

#[test]
fn p1_example_fit() {
    let (code, out, _) = call(&["example", "--name", "p1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let coeffs: Vec<(f64, f64)> = v["hamiltonian_fit"]["coeffs"].as_array().unwrap().iter().map(cval).collect();
    for ((re, im), want) in coeffs.into_iter().zip([2.0, -2.0, -4.0]) {
        assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);
    }
    // Ã₁₂ = 2 and Ã₂₁ = 4q + 2λ at q = 0.4
    assert_eq!(cval(&v["A_tilde"]["a12"][0]), (2.0, 0.0));
    let a21: Vec<(f64, f64)> = v["A_tilde"]["a21"].as_array().unwrap().iter().map(cval).collect();
    assert!((a21[0].0 - 1.6).abs() < 1e-12 && (a21[1].0 - 2.0).abs() < 1e-12);
}

#[test]
fn hamiltonian_value_and_parts() {
    let args = ["hamiltonian", "--g", "1", "--flow", "1", "--tau", "[[0.3,0]]", "--point", r#"{"q":[[0.4,0]],"p":[[-0.7,0]]}"#];
    let (code, out, _) = call(&args);
    assert_eq!(code, 0);
    let v = json(&out);
    let want = 2.0 * 0.49 - 2.0 * 0.064 - 4.0 * 0.3 * 0.4;
    assert!((cval(&v["value"]).0 - want).abs() < 1e-12);
    assert_eq!(cval(&v["parts"]["c"]), (0.0, 0.0));

    let mut sym = args.to_vec();
    sym[8] = r#"{"Q":[[0.4,0]],"P":[[-0.7,0]]}"#;
    sym.push("--symmetric");
    let v = json(&call(&sym).1);
    assert!((cval(&v["value"]).0 - want).abs() < 1e-12);
    assert!((cval(&v["closed_form"]).0 - want).abs() < 1e-12);
}

#[test]
fn construct_emits_every_flow() {
    let (code, out, _) = call(&[
        "construct",
        "--g",
        "2",
        "--canonical",
        "--tau",
        "[[0.3,0.1],[-0.5,0.2]]",
        "--point",
        r#"{"q":[[0.4,0.3],[-0.2,0.5]],"p":[[-0.6,0.2],[0.3,0.3]]}"#,
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["flows"].as_array().unwrap().len(), 2);
    assert_eq!(v["isospectral"].as_array().unwrap().len(), 2);
    // L̃₁₂ is monic of degree g
    let a12 = v["L_tilde"]["a12"].as_array().unwrap();
    assert_eq!(a12.len(), 3);
    assert_eq!(cval(&a12[2]), (1.0, 0.0));
}

#[test]
fn general_times_are_accepted() {
    let times = r#"{"r_inf":4,"hbar":[0.8,0.1],"t":[[0.1,0],[0.2,0.1],[-0.3,0],[0.4,0.2],[1.5,0.1],[0.2,-0.3]]}"#;
    let (code, out, _) = call(&["construct", "--g", "1", "--times", times, "--point", r#"{"q":[[0.5,0]],"p":[[0.1,0]]}"#]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    let tau = v["reduced_times"]["tau"].as_array().unwrap();
    assert_eq!(tau.len(), 1);
    // reduced input with the same τ converts back to the same irregular times
    let reduced = serde_json::to_string(&v["reduced_times"]).unwrap();
    let (code, back, _) = call(&["construct", "--g", "1", "--times", &reduced, "--point", r#"{"q":[[0.5,0]],"p":[[0.1,0]]}"#]);
    assert_eq!(code, 0);
    let a: Vec<(f64, f64)> = v["times"]["t"].as_array().unwrap().iter().map(cval).collect();
    let b: Vec<(f64, f64)> = json(&back)["times"]["t"].as_array().unwrap().iter().map(cval).collect();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
    }
}

#[test]
fn errors_name_the_module_error() {
    let cases: &[(&[&str], &str)] = &[
        (&["hamiltonian", "--g", "2", "--flow", "1", "--point", r#"{"q":[1],"p":[0]}"#], "WrongGenus"),
        (&["hamiltonian", "--g", "2", "--flow", "1", "--point", r#"{"q":[1,1],"p":[0,0]}"#], "PoleCollision"),
        (
            &["construct", "--g", "1", "--times", r#"{"r_inf":4,"t":[0,0,0,0,0,0]}"#, "--point", r#"{"q":[1],"p":[0]}"#],
            "DegenerateTimes",
        ),
        (
            &[
                "evolve", "--g", "1", "--flow", "1", "--times", r#"{"r_inf":4,"t":[0,0.5,0,0,2,0]}"#,
                "--from", r#"{"q":[1],"p":[0]}"#, "--to", "0.1", "--steps", "10",
            ],
            "NotCanonical",
        ),
        (&["evolve", "--g", "1", "--flow", "1", "--from", r#"{"q":[1],"p":[0]}"#, "--to", "1", "--steps", "1000"], "StepFailure"),
    ];
    for (args, name) in cases {
        let (code, _, err) = call(args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(err.contains(name), "{args:?}: {err}");
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["construct", "--g", "1", "--point", "{not json"][..],
        &["construct", "--g", "1", "--point", r#"{"q":[1]}"#],
        &["verify", "--nope"],
        &["hamiltonian", "--g", "1", "--flow", "1", "--point", r#"{"q":[["a",0]],"p":[0]}"#],
        &["example", "--name", "p2"],
        &[],
    ] {
        assert_eq!(call(args).0, 2, "{args:?}");
    }
}

#[test]
fn verify_is_deterministic() {
    let a = call(&["verify", "all", "--g", "2", "--seed", "7"]);
    let b = call(&["verify", "all", "--g", "2", "--seed", "7", "--jobs", "4"]);
    assert_eq!(a.0, 0, "{}", a.1);
    assert_eq!(a.1, b.1);
    let c = call(&["verify", "all", "--g", "2", "--seed", "8"]);
    assert_ne!(a.1, c.1);
}

#[test]
fn verify_json_rows() {
    let (code, out, _) = call(&["verify", "coeffs", "--g", "3", "--json"]);
    assert_eq!(code, 0);
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        let mut keys: Vec<&str> = r.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        keys.sort();
        assert_eq!(keys, ["anchor", "name", "pass", "residual", "threshold"]);
        assert!(r["anchor"].as_str().unwrap().starts_with("coeffs."));
    }
}

#[test]
fn evolve_writes_csv_and_sidecar() {
    let path = scratch("p1.csv");
    let (code, out, _) = call(&[
        "evolve", "--g", "1", "--flow", "1", "--from", r#"{"Q":[[0,0]],"P":[[0,0]]}"#, "--to", "[0.5,0]",
        "--steps", "500", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "tau_re,tau_im,Q1_re,Q1_im,P1_re,P1_im");
    assert_eq!(lines.count(), 501);
    let side = json(&std::fs::read_to_string(path.with_extension("json")).unwrap());
    assert_eq!(side, json(&out));
    assert!(side["painleve1_numeric"].as_f64().unwrap() < 1e-4);
    assert!(side["painleve1_exact_max"].as_f64().unwrap() < 1e-12);
    assert!(side["stopped"].is_null());
}

#[test]
fn binary_honours_tolerance_file() {
    let exe = env!("CARGO_BIN_EXE_p1lab");
    let tol = scratch("tol.json");
    std::fs::write(&tol, r#"{"mu_form": 1e-300}"#).unwrap();
    let st = Command::new(exe).args(["verify", "ham", "--g", "1"]).env("P1LAB_TOL", &tol).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&st.stdout).contains("FAIL"));

    std::fs::write(&tol, r#"{"no_such_check": 1.0}"#).unwrap();
    let st = Command::new(exe).args(["verify", "ham", "--g", "1"]).env("P1LAB_TOL", &tol).output().unwrap();
    assert_eq!(st.status.code(), Some(2));

    let st = Command::new(exe).args(["verify", "flow", "--g", "1"]).env_remove("P1LAB_TOL").output().unwrap();
    assert_eq!(st.status.code(), Some(0));
}
