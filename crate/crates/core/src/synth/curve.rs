use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// An analytic curve with exact arc length and curvature.
///
/// All curves are parameterized by arc length `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveDesc {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Segment {
        start: [f64; 2],
        end: [f64; 2],
    },
    /// Counter-clockwise for positive `sweep`, clockwise for negative.
    Arc {
        center: [f64; 2],
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    /// Two parallel straight runs of length `2 half_length` joined by
    /// semicircular caps of `radius`, rotated by `rotation` about `center`.
    Stadium {
        center: [f64; 2],
        half_length: f64,
        radius: f64,
        #[serde(default)]
        rotation: f64,
    },
}

fn v(a: [f64; 2]) -> Vec2 {
    Vec2::new(a[0], a[1])
}

impl CurveDesc {
    pub fn circle(center: Vec2, radius: f64) -> Self {
        CurveDesc::Circle {
            center: [center.x, center.y],
            radius,
        }
    }

    pub fn segment(start: Vec2, end: Vec2) -> Self {
        CurveDesc::Segment {
            start: [start.x, start.y],
            end: [end.x, end.y],
        }
    }

    pub fn arc(center: Vec2, radius: f64, start_angle: f64, sweep: f64) -> Self {
        CurveDesc::Arc {
            center: [center.x, center.y],
            radius,
            start_angle,
            sweep,
        }
    }

    pub fn stadium(center: Vec2, half_length: f64, radius: f64, rotation: f64) -> Self {
        CurveDesc::Stadium {
            center: [center.x, center.y],
            half_length,
            radius,
            rotation,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Figure(msg));
        match *self {
            CurveDesc::Circle { radius, center } => {
                if !(radius > 0.0 && radius.is_finite()) || !v(center).is_finite() {
                    return bad(format!("circle needs a finite positive radius, got {radius}"));
                }
            }
            CurveDesc::Segment { start, end } => {
                if !(v(start).is_finite() && v(end).is_finite()) || v(start).distance(v(end)) == 0.0 {
                    return bad("segment endpoints must be finite and distinct".into());
                }
            }
            CurveDesc::Arc {
                center, radius, sweep, start_angle,
            } => {
                if !(radius > 0.0 && radius.is_finite()) || !v(center).is_finite() || !start_angle.is_finite() {
                    return bad(format!("arc needs a finite positive radius, got {radius}"));
                }
                if !(sweep.abs() > 0.0 && sweep.abs() < TAU) {
                    return bad(format!("arc sweep must lie in (0, 2 pi) in magnitude, got {sweep}"));
                }
            }
            CurveDesc::Stadium {
                center, half_length, radius, rotation,
            } => {
                if !(radius > 0.0 && radius.is_finite()) || !(half_length >= 0.0 && half_length.is_finite()) {
                    return bad(format!("stadium needs radius > 0 and half_length >= 0, got {radius}, {half_length}"));
                }
                if !v(center).is_finite() || !rotation.is_finite() {
                    return bad("stadium center and rotation must be finite".into());
                }
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, CurveDesc::Circle { .. } | CurveDesc::Stadium { .. })
    }

    pub fn length(&self) -> f64 {
        match *self {
            CurveDesc::Circle { radius, .. } => TAU * radius,
            CurveDesc::Segment { start, end } => v(start).distance(v(end)),
            CurveDesc::Arc { radius, sweep, .. } => radius * sweep.abs(),
            CurveDesc::Stadium {
                half_length, radius, ..
            } => 4.0 * half_length + TAU * radius,
        }
    }

    /// Largest curvature attained anywhere on the curve.
    pub fn max_curvature(&self) -> f64 {
        match *self {
            CurveDesc::Circle { radius, .. } | CurveDesc::Arc { radius, .. } | CurveDesc::Stadium { radius, .. } => {
                1.0 / radius
            }
            CurveDesc::Segment { .. } => 0.0,
        }
    }

    /// Position and unit tangent (in the direction of increasing `s`) at arc
    /// length `s`. Closed curves wrap; open curves clamp.
    pub fn eval(&self, s: f64) -> (Vec2, Vec2) {
        let len = self.length();
        let s = if self.is_closed() {
            s.rem_euclid(len)
        } else {
            s.clamp(0.0, len)
        };
        match *self {
            CurveDesc::Circle { center, radius } => {
                let theta = s / radius;
                (v(center) + Vec2::from_angle(theta) * radius, Vec2::from_angle(theta + FRAC_PI_2))
            }
            CurveDesc::Segment { start, end } => {
                let (a, b) = (v(start), v(end));
                let dir = (b - a) * (1.0 / len);
                (a + dir * s, dir)
            }
            CurveDesc::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let sign = sweep.signum();
                let theta = start_angle + sign * s / radius;
                (
                    v(center) + Vec2::from_angle(theta) * radius,
                    Vec2::from_angle(theta + FRAC_PI_2) * sign,
                )
            }
            CurveDesc::Stadium {
                center,
                half_length: h,
                radius: r,
                rotation,
            } => {
                // Local frame: bottom run left to right, right cap, top run
                // right to left, left cap.
                let cap = PI * r;
                let (p, t) = if s < 2.0 * h {
                    (Vec2::new(-h + s, -r), Vec2::new(1.0, 0.0))
                } else if s < 2.0 * h + cap {
                    let theta = -FRAC_PI_2 + (s - 2.0 * h) / r;
                    (Vec2::new(h, 0.0) + Vec2::from_angle(theta) * r, Vec2::from_angle(theta + FRAC_PI_2))
                } else if s < 4.0 * h + cap {
                    let u = s - 2.0 * h - cap;
                    (Vec2::new(h - u, r), Vec2::new(-1.0, 0.0))
                } else {
                    let theta = FRAC_PI_2 + (s - 4.0 * h - cap) / r;
                    (Vec2::new(-h, 0.0) + Vec2::from_angle(theta) * r, Vec2::from_angle(theta + FRAC_PI_2))
                };
                (v(center) + p.rotate(rotation), t.rotate(rotation))
            }
        }
    }

    pub fn point(&self, s: f64) -> Vec2 {
        self.eval(s).0
    }

    /// Arc-length separation of two parameters, the short way round on
    /// closed curves.
    pub fn arc_distance(&self, s: f64, t: f64) -> f64 {
        let d = (s - t).abs();
        if self.is_closed() {
            let len = self.length();
            let d = d.rem_euclid(len);
            d.min(len - d)
        } else {
            d
        }
    }

    /// An axis-aligned box `(min, max)` containing the curve.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        match *self {
            CurveDesc::Circle { center, radius } => {
                let c = v(center);
                (Vec2::new(c.x - radius, c.y - radius), Vec2::new(c.x + radius, c.y + radius))
            }
            CurveDesc::Stadium {
                center,
                half_length,
                radius,
                ..
            } => {
                let c = v(center);
                let e = half_length + radius;
                (Vec2::new(c.x - e, c.y - e), Vec2::new(c.x + e, c.y + e))
            }
            _ => {
                let n = 256;
                let len = self.length();
                let mut lo = self.point(0.0);
                let mut hi = lo;
                for k in 1..=n {
                    let p = self.point(len * k as f64 / n as f64);
                    lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                    hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
                }
                (lo, hi)
            }
        }
    }
}
