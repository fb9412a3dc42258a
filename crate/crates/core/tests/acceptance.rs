//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tangent_recon::bench::{phase_sweep, scaling_figure, time_candidate_graph, SweepConfig, SCALING_EPSILON, SCALING_RADIUS};
use tangent_recon::denoise::{polygonalize_with_denoise, DenoiseParams};
use tangent_recon::geom::{in_forbidden_zone, perp, UnorientedTangent, Vec2, ZoneParams, DEFAULT_TOL};
use tangent_recon::graph::{build_candidate_graph, polygonalize, BruteForce, Mode};
use tangent_recon::io::{validate, ReconstructionParams, Verdict, SEPARATION_NOISE_FREE};
use tangent_recon::spatial::{fast_candidate_graph, QuadTreePairs};
use tangent_recon::synth::scenes::{self, clean_case, noisy_case, Case};
use tangent_recon::synth::{compare_to_truth, inject_spurious, sample_figure};

fn report(criterion: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} [{name}]: {verdict} ({detail})");
}

const FIGURES: u64 = 100;

fn clean_cases() -> Vec<Case> {
    (0..FIGURES).map(|s| clean_case(1000 + s).expect("clean case")).collect()
}

fn noisy_cases() -> Vec<Case> {
    (0..FIGURES).map(|s| noisy_case(2000 + s).expect("noisy case")).collect()
}

#[test]
fn criterion_1_forbidden_zone_matches_two_balls() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut disagreements, mut banded) = (0, 0);
    let trials = 100_000;
    for k in 0..trials {
        let p = Vec2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let m = UnorientedTangent::from_angle(rng.random_range(0.0..PI));
        let kappa = 10f64.powf(rng.random_range(-1.0..1.0));
        let radius = 1.0 / kappa;
        let q = if k % 4 == 0 {
            // Concentrate a quarter of the points near a ball boundary.
            let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let c = p + perp(m.dir()) * (side * radius);
            c + Vec2::from_angle(rng.random_range(0.0..TAU)) * (radius + rng.random_range(-1e-6..1e-6))
        } else {
            p + Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)) * radius
        };
        let centers = [p + perp(m.dir()) * radius, p - perp(m.dir()) * radius];
        let oracle = centers.iter().any(|&c| q.distance(c) < radius);
        let near_boundary = centers.iter().any(|&c| (q.distance(c) - radius).abs() <= DEFAULT_TOL);
        if near_boundary {
            banded += 1;
            continue;
        }
        if in_forbidden_zone(q, p, m, kappa, DEFAULT_TOL) != oracle {
            disagreements += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = disagreements == 0 && elapsed < Duration::from_secs(1);
    report(
        1,
        "predicate oracle",
        pass,
        format!("{disagreements} disagreements over {trials} points, {banded} in the boundary band, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_noise_free_reconstruction_is_exact() {
    let start = Instant::now();
    let cases = clean_cases();
    let mut exact = 0;
    let mut failures = Vec::new();
    let mut max_n = 0;
    for (k, c) in cases.iter().enumerate() {
        max_n = max_n.max(c.figure.samples.len());
        let g = polygonalize(&c.figure.samples, &c.zone, Mode::NoiseFree, &BruteForce).unwrap();
        let diff = compare_to_truth(&g, &c.figure).unwrap();
        if diff.is_exact() {
            exact += 1;
        } else {
            failures.push((k, c.kind, diff.missing.len(), diff.extra.len()));
        }
    }
    let elapsed = start.elapsed();
    let pass = exact == cases.len() && elapsed < Duration::from_secs(10) && max_n <= 500;
    report(
        2,
        "noise-free exactness",
        pass,
        format!("{exact}/{} exact, largest figure {max_n} samples, {elapsed:.2?}, failures {failures:?}", cases.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_3_noisy_reconstruction_is_exact() {
    let start = Instant::now();
    let cases = noisy_cases();
    let mut exact = 0;
    let mut failures = Vec::new();
    for (k, c) in cases.iter().enumerate() {
        let g = polygonalize(&c.figure.samples, &c.zone, Mode::Noisy, &BruteForce).unwrap();
        let diff = compare_to_truth(&g, &c.figure).unwrap();
        if diff.is_exact() {
            exact += 1;
        } else {
            failures.push((k, c.kind, diff.missing.len(), diff.extra.len()));
        }
    }
    let pass = exact == cases.len();
    report(
        3,
        "noisy exactness",
        pass,
        format!("{exact}/{} exact, {:.2?}, failures {failures:?}", cases.len(), start.elapsed()),
    );
    assert!(pass);
}

#[test]
fn criterion_4_quadtree_matches_brute_force_and_scales() {
    let mut mismatches = 0;
    let mut compared = 0;
    for (cases, mode) in [(clean_cases(), Mode::NoiseFree), (noisy_cases(), Mode::Noisy)] {
        for c in &cases {
            let fast = fast_candidate_graph(&c.figure.samples, &c.zone, mode).unwrap();
            let brute = build_candidate_graph(&c.figure.samples, &c.zone, mode, &BruteForce).unwrap();
            compared += 1;
            if fast.edge_set() != brute.edge_set() {
                mismatches += 1;
            }
        }
    }

    let zp = ZoneParams::noise_free(1.0 / SCALING_RADIUS, SCALING_EPSILON).unwrap();
    let mut times = Vec::new();
    let mut sizes = Vec::new();
    for n in [1_000, 4_000, 16_000] {
        let samples = scaling_figure(n, 7).unwrap();
        let (t, _) = time_candidate_graph(&samples, &zp, &QuadTreePairs::default(), 5).unwrap();
        sizes.push(samples.len());
        times.push(t.as_secs_f64());
    }
    let ratios = [times[1] / times[0], times[2] / times[1]];
    let pass = mismatches == 0 && ratios.iter().all(|&r| r <= 5.0);
    report(
        4,
        "quadtree equivalence and scaling",
        pass,
        format!(
            "{mismatches} mismatches over {compared} figures; sizes {sizes:?}, times {:?} ms, ratios {:.2} and {:.2}",
            times.iter().map(|t| (t * 1e5).round() / 100.0).collect::<Vec<_>>(),
            ratios[0],
            ratios[1]
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_sampling_rate_scaling() {
    let start = Instant::now();
    let cfg = SweepConfig::log_spaced(1e-4, 1e-1, 8, 5, 11);
    let table = phase_sweep(&cfg).unwrap();
    let elapsed = start.elapsed();
    let dominated = table.rows.iter().all(|r| r.eps_tangent >= r.eps_baseline);
    let pass = (table.slope_tangent - 0.5).abs() <= 0.15
        && (table.slope_baseline - 1.0).abs() <= 0.15
        && dominated
        && elapsed < Duration::from_secs(300);
    for r in &table.rows {
        println!("  delta {:.3e}: eps tangent {:.4e}, eps baseline {:.4e}", r.delta, r.eps_tangent, r.eps_baseline);
    }
    report(
        5,
        "sampling-rate scaling",
        pass,
        format!(
            "slope tangent {:.3}, slope baseline {:.3}, tangent >= baseline everywhere: {dominated}, {elapsed:.2?}",
            table.slope_tangent, table.slope_baseline
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_spurious_samples() {
    let spec = scenes::two_ovals();
    let bbox = scenes::two_ovals_bbox();
    let filtered = DenoiseParams::new(1.1, 4, true).unwrap();
    let unfiltered = DenoiseParams::new(1.1, 0, true).unwrap();
    let zp = ZoneParams::noise_free(scenes::TWO_OVALS_KAPPA, scenes::TWO_OVALS_EPSILON).unwrap();

    let mut recovered = 0;
    let mut reduced = 0;
    let seeds = 100;
    for seed in 0..seeds {
        let fig = sample_figure(&spec, scenes::TWO_OVALS_EPSILON, seed).unwrap();

        let few = inject_spurious(&fig, 100, bbox, 10_000 + seed).unwrap();
        assert_eq!(few.samples.len(), 196);
        let g = polygonalize_with_denoise(&few.samples, &zp, Mode::NoiseFree, &filtered, &BruteForce).unwrap();
        let d = compare_to_truth(&g, &few).unwrap();
        if d.missing.is_empty() && d.extra.len() <= 2 {
            recovered += 1;
        }

        let many = inject_spurious(&fig, 2000, bbox, 20_000 + seed).unwrap();
        assert_eq!(many.samples.len(), 2096);
        let pairs = QuadTreePairs::default();
        let with = polygonalize_with_denoise(&many.samples, &zp, Mode::NoiseFree, &filtered, &pairs).unwrap();
        let without = polygonalize_with_denoise(&many.samples, &zp, Mode::NoiseFree, &unfiltered, &pairs).unwrap();
        let a = compare_to_truth(&with, &many).unwrap().spurious_edges;
        let b = compare_to_truth(&without, &many).unwrap().spurious_edges;
        if a < b {
            reduced += 1;
        }
    }
    let pass = recovered >= 95 && reduced >= 90;
    report(
        6,
        "spurious robustness",
        pass,
        format!("{recovered}/{seeds} seeds fully recovered with at most 2 extra edges; leaf pruning reduced spurious edges in {reduced}/{seeds}"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_degeneration_chain() {
    let dp = DenoiseParams::new(1.0, 0, false).unwrap();
    let cases = clean_cases();
    let mut equal = 0;
    for c in &cases {
        let zp = ZoneParams::new(c.zone.kappa_max, c.zone.epsilon, 0.0, 0.0, c.zone.tol).unwrap();
        let alg1 = polygonalize(&c.figure.samples, &zp, Mode::NoiseFree, &BruteForce).unwrap();
        let alg2 = polygonalize(&c.figure.samples, &zp, Mode::Noisy, &BruteForce).unwrap();
        let alg3 = polygonalize_with_denoise(&c.figure.samples, &zp, Mode::NoiseFree, &dp, &BruteForce).unwrap();
        let alg3_noisy = polygonalize_with_denoise(&c.figure.samples, &zp, Mode::Noisy, &dp, &BruteForce).unwrap();
        if alg1 == alg2 && alg2 == alg3 && alg3 == alg3_noisy {
            equal += 1;
        }
    }
    let pass = equal == cases.len();
    report(7, "degeneration chain", pass, format!("{equal}/{} figures identical across all variants", cases.len()));
    assert!(pass);
}

#[test]
fn criterion_8_small_scale_parameters_are_flagged() {
    let mut params = ReconstructionParams::new(3.0, 0.065);
    params.delta = Some(0.015);
    let checks = validate(&params, None);
    let check = checks.iter().find(|c| c.inequality == SEPARATION_NOISE_FREE).unwrap();
    let flagged = check.verdict == Verdict::Violated && (check.rhs - 0.02535).abs() < 1e-12;

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("samples.csv");
    std::fs::write(&input, "x,y,tx,ty\n0,0,1,0\n0.05,0,1,0\n0.1,0,1,0\n").unwrap();
    let out = dir.path().join("out");
    let code = tangent_recon::cli::run([
        "tangent-recon",
        "reconstruct",
        "--input",
        input.to_str().unwrap(),
        "--epsilon",
        "0.065",
        "--kappa",
        "3",
        "--delta",
        "0.015",
        "--strict",
        "--out-graph",
        out.join("graph.json").to_str().unwrap(),
        "--out-report",
        out.join("report.json").to_str().unwrap(),
    ]);
    let pass = flagged && code == 1;
    report(
        8,
        "validation fidelity",
        pass,
        format!("2 kappa epsilon^2 = {:.5} vs delta 0.015: {:?}; strict exit code {code}", check.rhs, check.verdict),
    );
    assert!(pass);
}
