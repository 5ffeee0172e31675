use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

/// Runs the binary with whitespace-separated arguments.
fn polynet(args: &str, dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polynet"))
        .args(args.split_whitespace())
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("x,y1"));
    lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn build_constant_telescopes() {
    let dir = TempDir::new().unwrap();
    let out = polynet("build --method constant --n 8 --target const1 --out m.json", dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("neurons: 8"));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    let weights: Vec<f64> = doc["outputs"][0]["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w.as_f64().unwrap())
        .collect();
    assert_eq!(weights.len(), 8);
    assert_eq!(weights[0], 1.0);
    assert!(weights[1..].iter().all(|&w| w == 0.0));
}

#[test]
fn build_relu_neuron_count() {
    let dir = TempDir::new().unwrap();
    let out = polynet(
        "build --method linear-relu --n 4 --target affine --out m.json",
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("neurons: 20"));
}

#[test]
fn spaced_design_rejects_odd_n() {
    let dir = TempDir::new().unwrap();
    let out = polynet(
        "build --method cubic-spaced --n 7 --target sin2pi --out m.json",
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("spaced design requires even N"));
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    for args in [
        "build --method cubic --n 8 --target sin2pi --slope 0.9 --out m.json",
        "build --method bogus --n 8 --target sin2pi --out m.json",
        "build --method constant --n 0 --target sin2pi --out m.json",
        "build --method constant --target sin2pi --out m.json",
        "convergence --method constant --target sin2pi --n-list 16,32 --out c.csv",
        "frobnicate",
    ] {
        assert_eq!(code(&polynet(args, dir.path())), 2, "{args}");
    }
}

#[test]
fn eval_constant_model() {
    let dir = TempDir::new().unwrap();
    polynet("build --method constant --n 5 --target const1 --out m.json", dir.path());
    let out = polynet("eval m.json --grid 3", dir.path());
    assert_eq!(code(&out), 0);
    let rows = parse_csv(&stdout(&out));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[1] == 1.0));
}

#[test]
fn eval_linear_at_knots() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("f.csv"),
        "x,f\n0,0\n0.25,0.25\n0.5,0.5\n0.75,0.75\n1,1\n",
    )
    .unwrap();
    let built = polynet("build --method linear-ramp --csv f.csv --out m.json", dir.path());
    assert_eq!(code(&built), 0, "{}", stderr(&built));
    let out = polynet("eval m.json --grid 0,0.25,0.5,0.75,1", dir.path());
    for row in parse_csv(&stdout(&out)) {
        assert!((row[1] - row[0]).abs() <= 1e-12, "{row:?}");
    }
}

#[test]
fn eval_errors() {
    let dir = TempDir::new().unwrap();
    polynet("build --method constant --n 4 --target sin2pi --out m.json", dir.path());
    assert_eq!(code(&polynet("eval m.json --grid 0", dir.path())), 2);
    assert_eq!(code(&polynet("eval missing.json", dir.path())), 3);
    fs::write(dir.path().join("bad.json"), r#"{"method": "constant"}"#).unwrap();
    let out = polynet("eval bad.json", dir.path());
    assert_eq!(code(&out), 3);
    fs::write(
        dir.path().join("kind.json"),
        fs::read_to_string(dir.path().join("m.json"))
            .unwrap()
            .replace("\"step\"", "\"swish\""),
    )
    .unwrap();
    let out = polynet("eval kind.json", dir.path());
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("activation"), "{}", stderr(&out));
}

#[test]
fn eval_output_round_trips_bitwise() {
    let dir = TempDir::new().unwrap();
    polynet("build --method cubic --n 16 --target runge --out m.json", dir.path());
    let out = polynet("eval m.json --grid 257", dir.path());
    let net = polynet::load_model(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    for row in parse_csv(&stdout(&out)) {
        let y = net.forward(row[0]).unwrap()[0];
        assert_eq!(row[1].to_bits(), y.to_bits());
    }
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let dir = TempDir::new().unwrap();
    let pass = polynet(
        "verify --method linear-relu --n 32 --target sin2pi --tol 1e-9",
        dir.path(),
    );
    assert_eq!(code(&pass), 0, "{}", stdout(&pass));
    assert!(stdout(&pass).contains("max deviation"));
    let tight = polynet(
        "verify --method constant --n 32 --target sin2pi --tol 1e-15",
        dir.path(),
    );
    assert_eq!(code(&tight), 0, "{}", stdout(&tight));
    let fail = polynet(
        "verify --method linear-relu --n 32 --target sin2pi --mismatch-oracle",
        dir.path(),
    );
    assert_eq!(code(&fail), 1);
    assert!(stdout(&fail).contains("FAIL"));
}

#[test]
fn verify_every_method() {
    let dir = TempDir::new().unwrap();
    for method in ["constant", "linear-relu", "linear-ramp", "cubic", "cubic-spaced"] {
        let out = polynet(&format!("verify --method {method} --n 16 --target runge"), dir.path());
        assert_eq!(code(&out), 0, "{method}: {}", stdout(&out));
    }
}

#[test]
fn convergence_orders_and_files() {
    let dir = TempDir::new().unwrap();
    for (method, lo, hi) in [("constant", 0.9, 1.1), ("linear-ramp", 1.9, 2.1)] {
        let sweep = format!("convergence --method {method} --target sin2pi --n-list 16,32,64,128 --out c.csv");
        let out = polynet(&sweep, dir.path());
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
        let order = summary["fitted_order"].as_f64().unwrap();
        assert!((lo..=hi).contains(&order), "{method}: {order}");
        let csv = fs::read_to_string(dir.path().join("c.csv")).unwrap();
        assert!(csv.starts_with("n,h,sup_error,l2_error\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}

#[test]
fn convergence_affine_sets_zero_error_flag() {
    let dir = TempDir::new().unwrap();
    let out = polynet(
        "convergence --method linear-relu --target affine --n-list 8,16,32 --out c.csv",
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(summary["order_applicable"], serde_json::Value::Bool(false));
    assert!(summary["fitted_order"].is_null());
}

#[test]
fn fit_kernel_recovers_weights() {
    let dir = TempDir::new().unwrap();
    let c = [0.5, -1.0, 2.0, 0.25, -0.75];
    let mut csv = String::from("x,y\n");
    for i in 0..200 {
        let x = i as f64 / 199.0;
        // triangle expansion on N = 4
        let y: f64 = c
            .iter()
            .enumerate()
            .map(|(j, cj)| cj * (1.0 - (4.0 * x - j as f64).abs()).max(0.0))
            .sum();
        csv.push_str(&format!("{x},{y}\n"));
    }
    fs::write(dir.path().join("d.csv"), csv).unwrap();
    let out = polynet(
        "fit-kernel --kernel triangle --n 4 --csv d.csv --out w.json",
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
    let omega = doc["omega"].as_array().unwrap();
    for (w, cj) in omega.iter().zip(c) {
        assert!((w.as_f64().unwrap() - cj).abs() <= 1e-8);
    }
    assert!(doc["rms_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn fit_kernel_zero_and_underdetermined() {
    let dir = TempDir::new().unwrap();
    let zeros: String = std::iter::once("x,y\n".to_string())
        .chain((0..50).map(|i| format!("{},0\n", i as f64 / 49.0)))
        .collect();
    fs::write(dir.path().join("z.csv"), zeros).unwrap();
    let out = polynet("fit-kernel --kernel bump --n 6 --csv z.csv --out w.json", dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
    assert!(doc["omega"].as_array().unwrap().iter().all(|w| w.as_f64() == Some(0.0)));

    fs::write(dir.path().join("few.csv"), "x,y\n0,1\n0.5,2\n1,3\n").unwrap();
    let out = polynet(
        "fit-kernel --kernel triangle --n 8 --csv few.csv --out w.json",
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn csv_knot_mismatch_is_rejected() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("f.csv"), "x,f\n0,0\n0.3,1\n1,0\n").unwrap();
    let out = polynet("build --method constant --csv f.csv --out m.json", dir.path());
    assert_eq!(code(&out), 2);
    fs::write(dir.path().join("g.csv"), "x,f\n0,0\n0.5,abc\n1,0\n").unwrap();
    let out = polynet("build --method constant --csv g.csv --out m.json", dir.path());
    assert_eq!(code(&out), 3);
}

#[test]
fn identical_invocations_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str| {
        let model = format!("m{tag}.json");
        let conv = format!("c{tag}.csv");
        let build = format!("build --method cubic --n 12 --target absdev --out {model}");
        polynet(&build, dir.path());
        let eval = polynet(&format!("eval {model} --grid 101"), dir.path());
        let sweep = format!("convergence --method cubic-spaced --target runge --n-list 8,16,32 --out {conv}");
        polynet(&sweep, dir.path());
        (
            fs::read(dir.path().join(&model)).unwrap(),
            eval.stdout,
            fs::read(dir.path().join(&conv)).unwrap(),
            fs::read(dir.path().join(format!("c{tag}.json"))).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn info_lists_methods_and_banner_on_stderr() {
    let dir = TempDir::new().unwrap();
    let out = polynet("info", dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in [
        "constant",
        "linear-relu",
        "linear-ramp",
        "cubic-spaced",
        "sin2pi",
        "absdev",
    ] {
        assert!(text.contains(name));
    }
    assert!(!text.contains(env!("CARGO_PKG_VERSION")));
    assert!(stderr(&out).contains(env!("CARGO_PKG_VERSION")));
}
