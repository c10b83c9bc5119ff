use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shannon-bounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(line: &str, k: usize) -> f64 {
    line.split(',').nth(k).unwrap().parse().unwrap()
}

#[test]
fn uniform_indices_give_log_outcomes() {
    let i2 = (1.0f64 / 6.0).to_string();
    let i3 = (1.0f64 / 36.0).to_string();
    let out = run(&["bounds", "--L", "6", "--indices", &format!("{i2},{i3}")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!((field(row, 3) - 6f64.ln()).abs() < 1e-9, "{row}");
        assert!((field(row, 4) - 6f64.ln()).abs() < 1e-9, "{row}");
    }
}

#[test]
fn infeasible_index_is_a_usage_error() {
    let out = run(&["bounds", "--L", "4", "--indices", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bad_tags_and_degrees_exit_with_two() {
    assert_eq!(run(&["coeffs", "--family", "zz", "--n", "3"]).status.code(), Some(2));
    assert_eq!(run(&["coeffs", "--family", "c", "--n", "99"]).status.code(), Some(2));
    assert_eq!(run(&["design", "--name", "cube"]).status.code(), Some(2));
    assert_eq!(run(&["figure", "--id", "fig9"]).status.code(), Some(2));
}

#[test]
fn coefficient_rows_are_exact() {
    let out = run(&["coeffs", "--family", "c", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "s,numerator,denominator,value\n\
         0,-1,1,-1.0000000000000000e0\n\
         1,18,1,1.8000000000000000e1\n\
         2,-48,1,-4.8000000000000000e1\n\
         3,32,1,3.2000000000000000e1\n"
    );
}

#[test]
fn figure_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&["figure", "--id", "fig6", "--points", "21", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(first).unwrap().lines().count(), 22);
    let piped = run(&["figure", "--id", "fig6", "--points", "21"]);
    assert_eq!(piped.stdout, fs::read(&a).unwrap());
}

#[test]
fn svg_is_written_next_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig1.csv");
    let out = run(&["figure", "--id", "fig1", "--points", "11", "--svg", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let svg = fs::read_to_string(dir.path().join("fig1.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn config_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# figure size\npoints = 4\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "figure", "--id", "fig3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 5);

    // An explicit flag wins over the file.
    let out = run(&["--config", cfg.to_str().unwrap(), "figure", "--id", "fig3", "--points", "3"]);
    assert_eq!(stdout(&out).lines().count(), 4);

    fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "figure", "--id", "fig3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn octahedron_verifies() {
    let out = run(&["design", "--name", "octahedron", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert!(last.ends_with(",true"), "{last}");
    assert!((field(last, 0) - 0.25).abs() < 1e-12);
}

#[test]
fn design_export_lists_bloch_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ico.csv");
    let out = run(&["design", "--name", "icosahedron", "--export", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next(), Some("k,nx,ny,nz"));
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn pure_qubit_von_neumann_interval() {
    let out = run(&["vn", "--d", "2", "--moments", "1,1", "--method", "taylor"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(field(row, 3).abs() < 1e-12);
    assert!((field(row, 4) - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn steering_bound_is_certified() {
    let out = run(&["steer", "--design", "mub3", "--method", "taylor", "--samples", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!((field(row, 2) - 5.0 / 12.0).abs() < 1e-12);
    assert_eq!(row.split(',').nth(3), Some("true"));
}

#[test]
fn relate_reports_both_methods() {
    let out = run(&["relate", "--design", "icosahedron", "--state", "bloch:0.3,0.1,-0.2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn quick_suite_passes() {
    let out = run(&["suite", "--quick", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.contains(" PASS ")).count(), 9, "{text}");
}
