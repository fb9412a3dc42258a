//! Numerical re-measurement of curvature and separation.
//!
//! Declared figure properties are never trusted: curvature is recomputed by
//! central differences and separation by a dense grid search followed by a
//! local zoom on the closest candidate pairs.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::curve::CurveDesc;
use crate::geom::Vec2;

const CURVATURE_STEPS: usize = 2000;
const MAX_DENSE_POINTS: usize = 2_000_000;
const REFINE_CANDIDATES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureMeasure {
    /// Exact maximum over the analytic descriptors.
    pub exact: f64,
    /// Largest finite-difference estimate along a dense parameter sweep.
    pub measured: f64,
    pub resolution: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationMeasure {
    /// Smallest distance between distinct curves, or between points of one
    /// curve more than a quarter turn of arc apart. `None` when no such pair
    /// exists.
    pub delta: Option<f64>,
    /// Dense sampling spacing; the true infimum is within this of `delta`.
    pub resolution: f64,
}

/// Finite-difference curvature `|x'y'' - y'x''| / (x'^2 + y'^2)^(3/2)`.
pub fn measure_curvature(curves: &[CurveDesc]) -> CurvatureMeasure {
    let exact = curves.iter().map(CurveDesc::max_curvature).fold(0.0, f64::max);
    let mut measured: f64 = 0.0;
    let mut resolution: f64 = 0.0;
    for c in curves {
        let len = c.length();
        let h = (len * 1e-5).max(1e-7);
        let k_max = c.max_curvature().max(1.0 / len);
        let extent = {
            let (lo, hi) = c.bounds();
            lo.norm().max(hi.norm()).max(1.0)
        };
        // Truncation plus roundoff in the second difference.
        resolution = resolution.max(h * h * k_max.powi(3) + 8.0 * f64::EPSILON * extent / (h * h));
        for k in 0..=CURVATURE_STEPS {
            let mut s = len * k as f64 / CURVATURE_STEPS as f64;
            if !c.is_closed() {
                s = s.clamp(h, len - h);
            }
            let (a, b, m) = (c.point(s - h), c.point(s + h), c.point(s));
            let d1 = (b - a) * (0.5 / h);
            let d2 = (b - m * 2.0 + a) * (1.0 / (h * h));
            let kappa = d1.cross(d2).abs() / d1.norm_squared().powf(1.5);
            measured = measured.max(kappa);
        }
    }
    CurvatureMeasure {
        exact,
        measured,
        resolution,
    }
}

struct Dense {
    pos: Vec2,
    curve: u32,
    s: f64,
}

/// Whether two curve points count toward the separation: different curves,
/// or the same curve more than `(pi/2) / kappa_max` of arc apart.
fn qualifies(curves: &[CurveDesc], ca: usize, sa: f64, cb: usize, sb: f64, arc_threshold: f64) -> bool {
    ca != cb || curves[ca].arc_distance(sa, sb) > arc_threshold
}

/// Separation of the figure, measured with spacing at most `resolution_hint`
/// (coarsened if the dense point budget would be exceeded).
pub fn measure_separation(curves: &[CurveDesc], kappa_max: f64, resolution_hint: f64) -> SeparationMeasure {
    let arc_threshold = FRAC_PI_2 / kappa_max;
    let total_len: f64 = curves.iter().map(CurveDesc::length).sum();
    let mut h = resolution_hint;
    if total_len / h > MAX_DENSE_POINTS as f64 {
        h = total_len / MAX_DENSE_POINTS as f64;
    }

    let mut dense = Vec::new();
    let (mut lo, mut hi) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN));
    for (ci, c) in curves.iter().enumerate() {
        let len = c.length();
        let n = ((len / h).ceil() as usize).max(16);
        for k in 0..n {
            let s = if c.is_closed() {
                len * k as f64 / n as f64
            } else {
                len * k as f64 / (n - 1) as f64
            };
            let pos = c.point(s);
            lo = Vec2::new(lo.x.min(pos.x), lo.y.min(pos.y));
            hi = Vec2::new(hi.x.max(pos.x), hi.y.max(pos.y));
            dense.push(Dense {
                pos,
                curve: ci as u32,
                s,
            });
        }
    }
    if dense.is_empty() {
        return SeparationMeasure {
            delta: None,
            resolution: h,
        };
    }
    let diameter = (hi - lo).norm();

    // Grow the search radius until some qualifying pair shows up.
    let mut radius = 4.0 * h;
    let candidates = loop {
        let found = pairs_within(&dense, radius, |a, b| {
            qualifies(curves, a.curve as usize, a.s, b.curve as usize, b.s, arc_threshold)
        });
        if !found.is_empty() {
            break found;
        }
        if radius > 2.0 * diameter {
            return SeparationMeasure {
                delta: None,
                resolution: h,
            };
        }
        radius *= 2.0;
    };

    let mut best = f64::INFINITY;
    for &(d, a, b) in candidates.iter().take(REFINE_CANDIDATES) {
        best = best.min(d);
        let (pa, pb) = (&dense[a], &dense[b]);
        let refined = refine_pair(curves, pa.curve as usize, pa.s, pb.curve as usize, pb.s, 2.0 * h, arc_threshold);
        best = best.min(refined);
    }
    SeparationMeasure {
        delta: Some(best),
        resolution: h,
    }
}

/// Qualifying dense pairs closer than `radius`, nearest first.
fn pairs_within(dense: &[Dense], radius: f64, keep: impl Fn(&Dense, &Dense) -> bool) -> Vec<(f64, usize, usize)> {
    let cell = |p: Vec2| ((p.x / radius).floor() as i64, (p.y / radius).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, d) in dense.iter().enumerate() {
        grid.entry(cell(d.pos)).or_default().push(i);
    }
    let mut out = Vec::new();
    for (i, a) in dense.iter().enumerate() {
        let (cx, cy) = cell(a.pos);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else {
                    continue;
                };
                for &j in bucket {
                    if j <= i {
                        continue;
                    }
                    let b = &dense[j];
                    let d = a.pos.distance(b.pos);
                    if d <= radius && keep(a, b) {
                        out.push((d, i, j));
                    }
                }
            }
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    out
}

/// Zooms in on a local minimum of the distance between `curves[ca](s)` and
/// `curves[cb](t)` around the given parameters, staying within the
/// qualifying set.
fn refine_pair(curves: &[CurveDesc], ca: usize, sa: f64, cb: usize, sb: f64, span: f64, arc_threshold: f64) -> f64 {
    const STEPS: i32 = 10;
    let clamp = |c: &CurveDesc, s: f64| if c.is_closed() { s } else { s.clamp(0.0, c.length()) };
    let (a, b) = (&curves[ca], &curves[cb]);
    let (mut s, mut t) = (sa, sb);
    let mut best = a.point(s).distance(b.point(t));
    let mut half = span;
    for _ in 0..60 {
        let (mut bs, mut bt) = (s, t);
        for i in -STEPS..=STEPS {
            for j in -STEPS..=STEPS {
                let si = clamp(a, s + half * i as f64 / STEPS as f64);
                let tj = clamp(b, t + half * j as f64 / STEPS as f64);
                if !qualifies(curves, ca, si, cb, tj, arc_threshold) {
                    continue;
                }
                let d = a.point(si).distance(b.point(tj));
                if d < best {
                    best = d;
                    bs = si;
                    bt = tj;
                }
            }
        }
        s = bs;
        t = bt;
        half *= 0.25;
        if half < 1e-15 * (1.0 + s.abs() + t.abs()) {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn curvature_of_known_curves() {
        let c = [CurveDesc::circle(Vec2::new(3.0, -1.0), 0.5)];
        let m = measure_curvature(&c);
        assert_eq!(m.exact, 2.0);
        assert!((m.measured - 2.0).abs() <= m.resolution.max(1e-6), "{m:?}");
        let s = [CurveDesc::segment(Vec2::ZERO, Vec2::new(1.0, 1.0))];
        assert!(measure_curvature(&s).measured < 1e-6);
    }

    #[test]
    fn concentric_circles_separation() {
        for delta in [0.3, 0.01, 1e-4] {
            let c = [
                CurveDesc::circle(Vec2::ZERO, 1.0),
                CurveDesc::circle(Vec2::ZERO, 1.0 + delta),
            ];
            let m = measure_separation(&c, 1.05, delta / 4.0);
            let d = m.delta.unwrap();
            assert!((d - delta).abs() < 1e-9, "{delta}: {d}");
        }
    }

    #[test]
    fn single_circle_uses_quarter_turn_chord() {
        // Arc more than (pi/2)/kappa apart on the unit circle with kappa = 1:
        // the smallest chord is 2 sin(pi/4) = sqrt(2).
        let c = [CurveDesc::circle(Vec2::ZERO, 1.0)];
        let m = measure_separation(&c, 1.0, 0.01);
        assert!((m.delta.unwrap() - SQRT_2).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn short_segment_has_no_separation() {
        let c = [CurveDesc::segment(Vec2::ZERO, Vec2::new(0.5, 0.0))];
        assert_eq!(measure_separation(&c, 1.0, 0.01).delta, None);
    }

    #[test]
    fn parallel_segments() {
        let c = [
            CurveDesc::segment(Vec2::ZERO, Vec2::new(1.0, 0.0)),
            CurveDesc::segment(Vec2::new(0.3, 0.05), Vec2::new(2.0, 0.05)),
        ];
        let m = measure_separation(&c, 1.0, 0.01);
        assert!((m.delta.unwrap() - 0.05).abs() < 1e-9);
    }
}
