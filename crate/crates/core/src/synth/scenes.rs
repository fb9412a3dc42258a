//! Ready-made figures and seeded random scene generators.

use std::f64::consts::{FRAC_PI_2, SQRT_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{inject_noise, measure_figure, sample_measured, CurveDesc, FigureSpec, SyntheticFigure};
use crate::error::{Error, Result};
use crate::geom::{Vec2, ZoneParams, DEFAULT_TOL};

/// Unit circle plus a concentric circle of radius `1 + delta`.
pub fn concentric_circles(delta: f64) -> FigureSpec {
    FigureSpec::new(
        vec![
            CurveDesc::circle(Vec2::ZERO, 1.0),
            CurveDesc::circle(Vec2::ZERO, 1.0 + delta),
        ],
        1.0,
    )
    .with_delta(delta)
}

/// Two concentric ovals whose straight runs are parallel at distance
/// `delta`, with a curvature bound equal to the inner cap curvature.
///
/// Along the runs the curves look like parallel lines, the hardest case for
/// tangent-based reconstruction; the caps bend exactly as fast as the bound
/// allows.
pub fn nested_ovals(delta: f64) -> FigureSpec {
    FigureSpec::new(
        vec![
            CurveDesc::stadium(Vec2::ZERO, 1.0, 1.0, 0.0),
            CurveDesc::stadium(Vec2::ZERO, 1.0, 1.0 + delta, 0.0),
        ],
        1.0,
    )
    .with_delta(delta)
}

/// Sample spacing, curvature bound and separation of [`two_ovals`].
pub const TWO_OVALS_EPSILON: f64 = 0.065;
pub const TWO_OVALS_KAPPA: f64 = 3.0;
pub const TWO_OVALS_DELTA: f64 = 0.18;

/// Two stadium-shaped ovals, one lying and one standing, sized so that
/// sampling at [`TWO_OVALS_EPSILON`] with jitter 0.3 gives 48 samples each.
pub fn two_ovals() -> FigureSpec {
    let radius = 0.35;
    let jitter = 0.3;
    let length = 48.0 * TWO_OVALS_EPSILON * (1.0 - 0.5 * jitter);
    let half = (length - TAU * radius) / 4.0;
    FigureSpec::new(
        vec![
            CurveDesc::stadium(Vec2::new(-0.55, 0.0), half, radius, 0.0),
            CurveDesc::stadium(Vec2::new(0.45, 0.0), half, radius, FRAC_PI_2),
        ],
        TWO_OVALS_KAPPA,
    )
    .with_delta(TWO_OVALS_DELTA)
    .with_jitter(jitter)
}

/// Box used for spurious samples around [`two_ovals`].
pub fn two_ovals_bbox() -> (Vec2, Vec2) {
    (Vec2::new(-1.1, -0.8), Vec2::new(1.1, 0.8))
}

/// `count` circles of the given radius on a square lattice with spacing
/// `pitch`, filled row by row.
pub fn circle_grid(count: usize, radius: f64, pitch: f64) -> FigureSpec {
    let cols = (count as f64).sqrt().ceil().max(1.0) as usize;
    let curves = (0..count)
        .map(|k| CurveDesc::circle(Vec2::new((k % cols) as f64 * pitch, (k / cols) as f64 * pitch), radius))
        .collect();
    FigureSpec::new(curves, 1.0 / radius)
}

/// An oval crossed by two straight strokes in front of it. The strokes
/// intersect the oval, so no separation is declared.
pub fn obscured_oval() -> FigureSpec {
    FigureSpec::new(
        vec![
            CurveDesc::stadium(Vec2::ZERO, 0.4, 0.4, 0.0),
            CurveDesc::segment(Vec2::new(-0.3, -0.9), Vec2::new(-0.2, 0.9)),
            CurveDesc::segment(Vec2::new(0.45, -0.9), Vec2::new(0.35, 0.9)),
        ],
        2.5,
    )
}

/// A sampled figure with the zone parameters it was built for.
#[derive(Debug, Clone)]
pub struct Case {
    pub kind: &'static str,
    pub figure: SyntheticFigure,
    pub zone: ZoneParams,
}

const MAX_CASE_SAMPLES: usize = 500;

/// Random curve family with its curvature bound. Separations are left to
/// measurement.
fn random_spec(rng: &mut ChaCha8Rng) -> (&'static str, FigureSpec) {
    let pick = rng.random_range(0..7);
    let angle = rng.random_range(0.0..TAU);
    let slack = rng.random_range(1.0..1.3);
    match pick {
        0 => {
            let r = rng.random_range(0.3..2.0);
            ("circle", FigureSpec::new(vec![CurveDesc::circle(Vec2::ZERO, r)], slack / r))
        }
        1 => {
            let r = rng.random_range(0.2..1.0);
            let h = rng.random_range(0.0..1.5) * r;
            ("oval", FigureSpec::new(vec![CurveDesc::stadium(Vec2::ZERO, h, r, angle)], slack / r))
        }
        2 => {
            let r = rng.random_range(0.5..1.5);
            let gap = rng.random_range(0.05..0.4) * r;
            (
                "concentric",
                FigureSpec::new(
                    vec![CurveDesc::circle(Vec2::ZERO, r), CurveDesc::circle(Vec2::ZERO, r + gap)],
                    slack / r,
                ),
            )
        }
        3 => {
            let (r1, r2) = (rng.random_range(0.3..1.0), rng.random_range(0.3..1.0));
            let gap = rng.random_range(0.05..0.5);
            let c2 = Vec2::from_angle(angle) * (r1 + r2 + gap);
            (
                "two-circles",
                FigureSpec::new(
                    vec![CurveDesc::circle(Vec2::ZERO, r1), CurveDesc::circle(c2, r2)],
                    slack / r1.min(r2),
                ),
            )
        }
        4 => {
            let r = rng.random_range(0.25..0.6);
            let h = rng.random_range(0.0..0.8);
            let inner = rng.random_range(0.3..0.8) * r;
            (
                "circle-in-oval",
                FigureSpec::new(
                    vec![
                        CurveDesc::stadium(Vec2::ZERO, h, r, angle),
                        CurveDesc::circle(Vec2::from_angle(angle) * (0.5 * h), inner),
                    ],
                    slack / inner,
                ),
            )
        }
        5 => {
            let len = rng.random_range(1.0..2.5);
            let gap = rng.random_range(0.05..0.3);
            let dir = Vec2::from_angle(angle);
            let off = Vec2::from_angle(angle + FRAC_PI_2) * gap;
            let shift = dir * rng.random_range(-0.3..0.3);
            (
                "parallel-segments",
                FigureSpec::new(
                    vec![
                        CurveDesc::segment(Vec2::ZERO, dir * len),
                        CurveDesc::segment(off + shift, off + shift + dir * len),
                    ],
                    slack,
                ),
            )
        }
        _ => {
            let r = rng.random_range(0.5..1.5);
            let gap = rng.random_range(0.05..0.3) * r;
            let sweep = rng.random_range(1.0..4.0);
            (
                "nested-arcs",
                FigureSpec::new(
                    vec![
                        CurveDesc::arc(Vec2::ZERO, r, angle, sweep),
                        CurveDesc::arc(Vec2::ZERO, r + gap, angle + 0.2, sweep),
                    ],
                    slack / r,
                ),
            )
        }
    }
}

/// A noise-free figure with `epsilon` chosen so that
/// `2 kappa epsilon^2 < delta` and `epsilon kappa < 1/sqrt(2)` hold with
/// margin, at most 500 samples.
pub fn clean_case(seed: u64) -> Result<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let (kind, spec) = random_spec(&mut rng);
        let spec = spec.with_jitter(rng.random_range(0.0..0.6));
        let metrics = measure_figure(&spec)?;
        let kappa = spec.kappa_max;
        let cap = 0.95 / (kappa * SQRT_2);
        let epsilon = match metrics.separation.delta {
            Some(delta) => (0.95 * (delta / (2.0 * kappa)).sqrt()).min(cap),
            None => cap,
        } * rng.random_range(0.6..1.0);
        let figure = sample_measured(&spec, &metrics, epsilon, rng.random())?;
        if figure.samples.len() > MAX_CASE_SAMPLES {
            continue;
        }
        let zone = ZoneParams::new(kappa, epsilon, 0.0, 0.0, DEFAULT_TOL)?;
        return Ok(Case { kind, figure, zone });
    }
    Err(Error::Figure(format!("no small enough scene for seed {seed}")))
}

/// A noisy figure satisfying `4 zeta + 4 epsilon xi + 2.1 kappa epsilon^2 <
/// delta`, `epsilon kappa < 1/sqrt(2)` and the adjacent spacing bound, with
/// noise of amplitude `(zeta, xi)` already applied.
pub fn noisy_case(seed: u64) -> Result<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let (kind, spec) = random_spec(&mut rng);
        let spec = spec.with_jitter(rng.random_range(0.0..0.4));
        let metrics = measure_figure(&spec)?;
        let Some(delta) = metrics.separation.delta else {
            continue;
        };
        let kappa = spec.kappa_max;
        let xi = rng.random_range(0.005..0.03);
        let cap = 0.95 / (kappa * SQRT_2);
        // Epsilon first with half the budget spent on zeta, then zeta from
        // what is left.
        let budget = 0.9 * delta;
        let (a, b, c) = (2.1 * kappa, 4.0 * xi, -0.5 * budget);
        let root = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        let epsilon = root.min(cap) * rng.random_range(0.7..1.0);
        let room = budget - 4.0 * epsilon * xi - 2.1 * kappa * epsilon * epsilon;
        let zeta = (room / 4.0).min(0.1 * epsilon) * rng.random_range(0.2..1.0);
        let spec = spec.with_noise_spacing(zeta, xi);
        let Ok(clean) = sample_measured(&spec, &metrics, epsilon, rng.random()) else {
            continue;
        };
        if clean.samples.len() > MAX_CASE_SAMPLES {
            continue;
        }
        let figure = inject_noise(&clean, zeta, xi, rng.random())?;
        let zone = ZoneParams::new(kappa, epsilon, zeta, xi, DEFAULT_TOL)?;
        return Ok(Case { kind, figure, zone });
    }
    Err(Error::Figure(format!("no admissible noisy scene for seed {seed}")))
}
