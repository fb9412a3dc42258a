use std::path::{Path, PathBuf};
use std::process::Command;

use tangent_recon::cli::run;
use tangent_recon::io::{self, graph_from_json, parse_csv, write_csv, RunReport};
use tangent_recon::synth::{sample_figure, CurveDesc, FigureSpec};
use tangent_recon::Vec2;
use tempfile::TempDir;

fn tangent_recon(args: &[&str]) -> i32 {
    run(std::iter::once("tangent-recon").chain(args.iter().copied()))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a 24-sample unit circle with its params and truth as JSON.
fn circle_file(dir: &Path) -> (PathBuf, usize) {
    let spec = FigureSpec::new(vec![CurveDesc::circle(Vec2::ZERO, 1.0)], 1.0).with_delta(1.0);
    let fig = sample_figure(&spec, 0.3, 9).unwrap();
    let path = dir.join("circle.json");
    std::fs::write(&path, io::write_json(&io::figure_to_file(&fig)).unwrap()).unwrap();
    (path, fig.samples.len())
}

#[test]
fn reconstruct_circle_gives_the_cycle() {
    let dir = TempDir::new().unwrap();
    let (input, n) = circle_file(dir.path());
    let graph = dir.path().join("graph.json");
    let report = dir.path().join("report.json");
    let code = tangent_recon(&[
        "reconstruct",
        "--input",
        path_str(&input),
        "--strict",
        "--out-graph",
        path_str(&graph),
        "--out-report",
        path_str(&report),
    ]);
    assert_eq!(code, 0);

    let (samples, g) = graph_from_json(&std::fs::read_to_string(&graph).unwrap()).unwrap();
    assert_eq!(samples.len(), n);
    assert_eq!(g.edge_count(), n);
    assert!(g.degrees().iter().all(|&d| d == 2));

    let report: RunReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(report.strict_failures.is_empty());
    assert!(report.truth.unwrap().exact);
}

#[test]
fn csv_input_needs_parameters_on_the_command_line() {
    let dir = TempDir::new().unwrap();
    let spec = FigureSpec::new(vec![CurveDesc::circle(Vec2::ZERO, 1.0)], 1.0);
    let fig = sample_figure(&spec, 0.3, 1).unwrap();
    let input = dir.path().join("circle.csv");
    std::fs::write(&input, write_csv(&fig.samples)).unwrap();
    let graph = dir.path().join("g.json");
    let report = dir.path().join("r.json");
    let base = ["reconstruct", "--input", path_str(&input), "--out-graph", path_str(&graph), "--out-report", path_str(&report)];

    assert_eq!(tangent_recon(&base), 2);
    let mut args = base.to_vec();
    args.extend(["--epsilon", "0.3", "--kappa", "1", "--pair-source", "brute"]);
    assert_eq!(tangent_recon(&args), 0);
    let (_, g) = graph_from_json(&std::fs::read_to_string(&graph).unwrap()).unwrap();
    assert_eq!(g, fig.truth);
}

#[test]
fn strict_mode_rejects_small_separation() {
    let dir = TempDir::new().unwrap();
    let (input, _) = circle_file(dir.path());
    let report = dir.path().join("report.json");
    let code = tangent_recon(&[
        "reconstruct",
        "--input",
        path_str(&input),
        "--kappa",
        "3",
        "--epsilon",
        "0.065",
        "--delta",
        "0.015",
        "--strict",
        "--out-graph",
        path_str(&dir.path().join("graph.json")),
        "--out-report",
        path_str(&report),
    ]);
    assert_eq!(code, 1);
    assert!(!dir.path().join("graph.json").exists());
    let report: RunReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report.strict_failures, vec![io::SEPARATION_NOISE_FREE.to_string()]);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(tangent_recon(&["reconstruct", "--input", path_str(&missing), "--epsilon", "0.1", "--kappa", "1"]), 2);

    let zero = dir.path().join("zero.csv");
    std::fs::write(&zero, "0,0,1,0\n1,0,0,0\n").unwrap();
    assert_eq!(tangent_recon(&["reconstruct", "--input", path_str(&zero), "--epsilon", "0.1", "--kappa", "1"]), 2);

    let (input, _) = circle_file(dir.path());
    let out = dir.path().join("g.json");
    let args = ["reconstruct", "--input", path_str(&input), "--epsilon=-1", "--out-graph", path_str(&out)];
    assert_eq!(tangent_recon(&args), 2);

    assert_eq!(tangent_recon(&["frobnicate"]), 2);
    assert_eq!(tangent_recon(&["--help"]), 0);
}

#[test]
fn render_without_graph_draws_dots_only() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("pts.csv");
    std::fs::write(&input, "x,y,tx,ty\n0,0,1,0\n1,0,1,1\n0,1,0,1\n").unwrap();
    let svg = dir.path().join("out.svg");
    assert_eq!(tangent_recon(&["render", "--input", path_str(&input), "--no-ticks", "--out-svg", path_str(&svg)]), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<circle").count(), 3);
    assert!(!text.contains("<line"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let (input, _) = circle_file(dir.path());
    let mut outputs = Vec::new();
    for k in 0..2 {
        let graph = dir.path().join(format!("g{k}.json"));
        let svg = dir.path().join(format!("s{k}.svg"));
        let code = tangent_recon(&[
            "reconstruct",
            "--input",
            path_str(&input),
            "--mode",
            "denoise",
            "--out-graph",
            path_str(&graph),
            "--out-report",
            path_str(&dir.path().join(format!("r{k}.json"))),
            "--out-svg",
            path_str(&svg),
        ]);
        assert_eq!(code, 0);
        let render = dir.path().join(format!("render{k}.svg"));
        let code = tangent_recon(&[
            "render",
            "--input",
            path_str(&input),
            "--graph",
            path_str(&graph),
            "--out-svg",
            path_str(&render),
        ]);
        assert_eq!(code, 0);
        outputs.push([std::fs::read(&graph).unwrap(), std::fs::read(&svg).unwrap(), std::fs::read(&render).unwrap()]);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn synth_then_reconstruct_recovers_the_truth() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("figure.toml");
    std::fs::write(
        &config,
        r#"
epsilon = 0.1
seed = 4

[figure]
kappa_max = 2.0
delta = 0.4

[[figure.curves]]
kind = "circle"
center = [0.0, 0.0]
radius = 0.5

[[figure.curves]]
kind = "circle"
center = [1.5, 0.0]
radius = 0.6
"#,
    )
    .unwrap();
    let samples = dir.path().join("samples.json");
    let svg = dir.path().join("truth.svg");
    let code = tangent_recon(&["synth", "--input", path_str(&config), "--out", path_str(&samples), "--out-svg", path_str(&svg)]);
    assert_eq!(code, 0);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<line"));

    let report = dir.path().join("report.json");
    let code = tangent_recon(&[
        "reconstruct",
        "--input",
        path_str(&samples),
        "--strict",
        "--out-graph",
        path_str(&dir.path().join("graph.json")),
        "--out-report",
        path_str(&report),
    ]);
    assert_eq!(code, 0);
    let report: RunReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(report.truth.unwrap().exact);
    assert!(report.tree.is_some());
}

#[test]
fn csv_round_trip_preserves_samples() {
    let spec = FigureSpec::new(
        vec![CurveDesc::circle(Vec2::new(0.2, -0.1), 0.7), CurveDesc::segment(Vec2::new(-1.0, 1.0), Vec2::new(1.0, 1.3))],
        1.5,
    );
    let fig = sample_figure(&spec, 0.2, 3).unwrap();
    let text = write_csv(&fig.samples);
    let back = parse_csv(&text).unwrap();
    assert_eq!(back, fig.samples);
    assert_eq!(write_csv(&back), text);
}

#[test]
fn binary_reports_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_tangent-recon");
    let dir = TempDir::new().unwrap();
    let (input, _) = circle_file(dir.path());
    let status = Command::new(exe)
        .args(["reconstruct", "--input", path_str(&input), "--kappa", "1", "--epsilon", "0.9", "--strict"])
        .env(tangent_recon::cli::OUT_DIR_ENV, dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    assert!(dir.path().join("report.json").exists());

    let status = Command::new(exe)
        .args(["reconstruct", "--input", path_str(&input)])
        .env(tangent_recon::cli::OUT_DIR_ENV, dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let (_, g) = graph_from_json(&std::fs::read_to_string(dir.path().join("graph.json")).unwrap()).unwrap();
    assert_eq!(g.edge_count(), g.vertex_count());
}
