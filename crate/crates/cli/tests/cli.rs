use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use asymdiff::dataset::{save_grayscale_image, synth_temperature_field, write_scalar_csv};
use asymdiff::ScalarGrid;
use nalgebra::DMatrix;
use serde_json::Value;

fn asymdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asymdiff"))
        .args(args)
        .env_remove("ASYMDIFF_THREADS")
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let out = asymdiff(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn code(args: &[&str]) -> i32 {
    asymdiff(args).status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sphere_smoke_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    run_ok(&["sphere", "--n", "4", "--out", s(&out)]);
    for f in ["embedding.csv", "maps.csv", "distances.csv", "bench.csv", "diagnostics.json", "timings.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let d = json(&out.join("diagnostics.json"));
    assert_eq!(d["self_check"]["performed"], true);
    let embedding = fs::read_to_string(out.join("embedding.csv")).unwrap();
    assert_eq!(embedding.lines().count(), 5);
    assert!(embedding.lines().next().unwrap().ends_with(",u,v"));
}

#[test]
fn self_check_can_be_disabled() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["mobius", "--n", "16", "--no-self-check", "--out", s(dir.path())]);
    let d = json(&dir.path().join("diagnostics.json"));
    assert_eq!(d["self_check"]["performed"], false);
    assert!(d["raw_relative_asymmetry"].as_f64().unwrap() > 0.1);
}

#[test]
fn outputs_are_reproducible_apart_from_timings() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["sphere", "mobius"] {
        let (a, b) = (dir.path().join(format!("{cmd}_a")), dir.path().join(format!("{cmd}_b")));
        for o in [&a, &b] {
            run_ok(&[cmd, "--n", "24", "--t", "2", "--k2", "3", "--seed", "5", "--out", s(o)]);
        }
        let mut compared = 0;
        for entry in fs::read_dir(&a).unwrap() {
            let name = entry.unwrap().file_name();
            let name = name.to_str().unwrap();
            if name == "timings.json" || name == "bench.csv" {
                continue;
            }
            assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{cmd}/{name}");
            compared += 1;
        }
        assert!(compared >= 4);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = s(dir.path());
    assert_eq!(code(&["bench", "--out", o]), 2);
    assert_eq!(code(&["sphere", "--n", "16", "--k2", "9", "--out", o]), 2);
    assert_eq!(code(&["sphere", "--n", "16", "--t", "0", "--out", o]), 2);
    assert_eq!(code(&["sphere", "--n", "8,16", "--out", o]), 2);
    assert_eq!(code(&["image", "--out", o]), 2);
    assert_eq!(code(&["teapot"]), 2);
    assert_eq!(code(&["sphere", "--bogus"]), 2);
    let threads = Command::new(env!("CARGO_BIN_EXE_asymdiff"))
        .args(["sphere", "--n", "4", "--out", o])
        .env("ASYMDIFF_THREADS", "zero")
        .status()
        .unwrap();
    assert_eq!(threads.code(), Some(2));
}

#[test]
fn data_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pgm");
    fs::write(&bad, b"P6\n2 2\n255\n").unwrap();
    assert_eq!(code(&["image", "--input", s(&bad), "--out", s(dir.path())]), 3);
    let missing = dir.path().join("missing.pgm");
    assert_eq!(code(&["image", "--input", s(&missing), "--out", s(dir.path())]), 3);

    let a = synth_temperature_field(6, 6, "2000", 1).unwrap();
    let b = synth_temperature_field(7, 6, "2010", 1).unwrap();
    let (pa, pb) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_scalar_csv(&a, &pa).unwrap();
    write_scalar_csv(&b, &pb).unwrap();
    let out = dir.path().join("c");
    assert_eq!(code(&["changedata", "--input", s(&pa), "--input", s(&pb), "--out", s(&out)]), 3);
}

#[test]
fn image_reconstructs_exactly_at_full_radius() {
    let dir = tempfile::tempdir().unwrap();
    let n = 16;
    let img = ScalarGrid::dense(DMatrix::from_fn(n, n, |r, c| {
        (0.2 + 0.6 * ((r * 7 + c * 3) % 11) as f64 / 10.0).min(1.0)
    }))
    .unwrap();
    let input = dir.path().join("in.pgm");
    save_grayscale_image(&img, &input, 255).unwrap();
    let out = dir.path().join("o");
    run_ok(&["image", "--input", s(&input), "--k2", "16", "--out", s(&out)]);
    let d = json(&out.join("diagnostics.json"));
    assert_eq!(d["k2"], 8);
    assert!(d["fourier_l2_error"].as_f64().unwrap() <= 1e-8);
    assert!(d["svd_l2_error"].as_f64().unwrap() <= 1e-8);
    assert!(out.join("recon_fourier.pgm").is_file());
    assert!(out.join("recon_svd.pgm").is_file());
    let bench = fs::read_to_string(out.join("bench.csv")).unwrap();
    assert!(bench.starts_with("n,order,path,seconds,l2_error,M_B,log10_seconds,log10_l2_error"));
}

#[test]
fn changedata_reads_grids_and_orders_globals() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for tag in ["2000", "2009", "2019"] {
        let p = dir.path().join(format!("{tag}.csv"));
        write_scalar_csv(&synth_temperature_field(8, 8, tag, 4).unwrap(), &p).unwrap();
        paths.push(p);
    }
    let out = dir.path().join("o");
    run_ok(&[
        "changedata",
        "--input",
        s(&paths[0]),
        "--input",
        s(&paths[1]),
        "--input",
        s(&paths[2]),
        "--k2",
        "2",
        "--out",
        s(&out),
    ]);
    let g = json(&out.join("global.json"));
    assert_eq!(g[0]["comparison"], "2009");
    assert!(g[1]["global_distance"].as_f64().unwrap() > g[0]["global_distance"].as_f64().unwrap());
    let d = json(&out.join("diagnostics.json"));
    assert_eq!(d["self_check"]["performed"], true);
    let distances = fs::read_to_string(out.join("distances.csv")).unwrap();
    assert!(distances.starts_with("comparison,k2,cell_index,row,col,dist_sq,increase_only"));
}

#[test]
fn changedata_synthesizes_fields_without_inputs() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["changedata", "--n", "10", "--out", s(dir.path())]);
    for tag in ["2000", "2010", "2018"] {
        assert!(dir.path().join(format!("field_{tag}.csv")).is_file());
    }
    let g = json(&dir.path().join("global.json"));
    assert_eq!(g.as_array().unwrap().len(), 2);
}

#[test]
fn bench_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = asymdiff(&["bench", "--n", "8,16,32", "--k2", "2", "--out", s(dir.path())]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("log-log slope"));
    let rows = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 3 * 2);
    let t = json(&dir.path().join("timings.json"));
    assert!(t["details"]["fft_slope"].is_number());
    let d = json(&dir.path().join("diagnostics.json"));
    assert_eq!(d["self_checks"].as_array().unwrap().len(), 3);
}
