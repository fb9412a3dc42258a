//! Closed-form geometric predicates on tangent-augmented samples.
//!
//! Every sample carries an unoriented unit tangent. Around each sample sit two
//! open disks of radius `1/kappa_max` tangent to it on either side; no curve of
//! curvature at most `kappa_max` can reach them within a quarter turn, so
//! candidates inside either disk are rejected. With `v = q - p` the union of
//! the two disks is exactly `|v . m_perp| > (kappa_max / 2) |v|^2`, which is
//! the form evaluated here.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance used by every comparison.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A point or displacement in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Like [`Vec2::new`] but refuses NaN and infinite components.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Vec2 { x, y })
        } else {
            Err(Error::NonFinite(format!("({x}, {y})")))
        }
    }

    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Rotation by `angle` radians counter-clockwise.
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// `v` rotated clockwise by a quarter turn: `(x, y) -> (y, -x)`.
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

/// A unit direction defined up to sign.
///
/// Stored canonically with its first nonzero component positive, so `d` and
/// `-d` construct the same value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnorientedTangent {
    dir: Vec2,
}

impl UnorientedTangent {
    /// Normalizes and canonicalizes `(x, y)`. Zero and non-finite inputs are
    /// rejected.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::NonFinite(format!("tangent ({x}, {y})")));
        }
        let len = x.hypot(y);
        if len == 0.0 {
            return Err(Error::ZeroTangent);
        }
        // Inputs already unit up to rounding are kept as is, which makes
        // normalization idempotent.
        let (mut ux, mut uy) = if (len - 1.0).abs() <= 4.0 * f64::EPSILON {
            (x, y)
        } else {
            (x / len, y / len)
        };
        if ux < 0.0 || (ux == 0.0 && uy < 0.0) {
            ux = -ux;
            uy = -uy;
        }
        // Avoid a stored negative zero so equal directions compare bitwise equal.
        Ok(UnorientedTangent {
            dir: Vec2::new(ux + 0.0, uy + 0.0),
        })
    }

    pub fn from_vec(v: Vec2) -> Result<Self> {
        Self::new(v.x, v.y)
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::from_vec(Vec2::from_angle(theta)).expect("unit vector from an angle is nonzero")
    }

    pub fn dir(self) -> Vec2 {
        self.dir
    }

    pub fn normal(self) -> Vec2 {
        perp(self.dir)
    }

    /// Tangent rotated by `angle` radians, re-canonicalized.
    pub fn rotated(self, angle: f64) -> Self {
        Self::from_vec(self.dir.rotate(angle)).expect("rotation preserves length")
    }
}

impl<'de> Deserialize<'de> for UnorientedTangent {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = Vec2::deserialize(de)?;
        UnorientedTangent::from_vec(v).map_err(serde::de::Error::custom)
    }
}

/// A sample position together with its unoriented tangent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentSample {
    pub id: usize,
    pub pos: Vec2,
    pub tangent: UnorientedTangent,
}

impl TangentSample {
    pub fn new(id: usize, pos: Vec2, tangent: UnorientedTangent) -> Self {
        TangentSample { id, pos, tangent }
    }
}

/// Curvature bound, sample spacing, noise amplitudes and comparison tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneParams {
    pub kappa_max: f64,
    pub epsilon: f64,
    pub zeta: f64,
    pub xi: f64,
    pub tol: f64,
}

impl ZoneParams {
    /// Checks signs and finiteness only. The `epsilon * kappa_max < 1/sqrt(2)`
    /// requirement is a validation concern, reported by [`crate::io::validate`].
    pub fn new(kappa_max: f64, epsilon: f64, zeta: f64, xi: f64, tol: f64) -> Result<Self> {
        let zp = ZoneParams {
            kappa_max,
            epsilon,
            zeta,
            xi,
            tol,
        };
        zp.check()?;
        Ok(zp)
    }

    pub fn noise_free(kappa_max: f64, epsilon: f64) -> Result<Self> {
        Self::new(kappa_max, epsilon, 0.0, 0.0, DEFAULT_TOL)
    }

    pub fn check(&self) -> Result<()> {
        let all = [self.kappa_max, self.epsilon, self.zeta, self.xi, self.tol];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite zone parameter in {self:?}")));
        }
        if self.kappa_max <= 0.0 {
            return Err(Error::InvalidParams(format!("kappa_max must be > 0, got {}", self.kappa_max)));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidParams(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.zeta < 0.0 || self.xi < 0.0 || self.tol < 0.0 {
            return Err(Error::InvalidParams("zeta, xi and tol must be >= 0".into()));
        }
        Ok(())
    }
}

/// `|(p - q) . m|`, the separation of `p` and `q` measured along `m`.
pub fn tangential_distance(p: Vec2, q: Vec2, m: UnorientedTangent) -> f64 {
    (p - q).dot(m.dir()).abs()
}

/// Whether `q` lies in the open forbidden zone of the sample `(p, m)`.
pub fn in_forbidden_zone(q: Vec2, p: Vec2, m: UnorientedTangent, kappa_max: f64, tol: f64) -> bool {
    let v = q - p;
    v.dot(m.normal()).abs() > 0.5 * kappa_max * v.norm_squared() + tol
}

/// Whether `q` lies in the closed `epsilon`-ball about `p` and outside the
/// forbidden zone of `(p, m)`.
pub fn in_allowed_region(q: Vec2, p: Vec2, m: UnorientedTangent, zp: &ZoneParams) -> bool {
    let v = q - p;
    let r2 = v.norm_squared();
    r2.sqrt() <= zp.epsilon + zp.tol && v.dot(m.normal()).abs() <= 0.5 * zp.kappa_max * r2 + zp.tol
}

/// Conservative membership test for the union of allowed regions over every
/// base point within `zeta` of `p` and every tangent within `xi` of `m`.
///
/// `point_slack` widens the radius and discounts the normal offset; graph
/// construction passes `2 zeta` so the same test also covers a `zeta`-ball
/// around `q`. With zero noise and zero slack this is exactly
/// [`in_allowed_region`].
pub fn in_noisy_allowed_region(
    q: Vec2,
    p: Vec2,
    m: UnorientedTangent,
    zp: &ZoneParams,
    point_slack: f64,
) -> bool {
    let v = q - p;
    let r2 = v.norm_squared();
    let r = r2.sqrt();
    if r > zp.epsilon + point_slack + zp.tol {
        return false;
    }
    // r sin(phi - xi) expanded as offset cos(xi) - along sin(xi); negative
    // exactly when phi < xi.
    let offset = v.dot(m.normal()).abs();
    let along = v.dot(m.dir()).abs();
    let (sin_xi, cos_xi) = zp.xi.sin_cos();
    let lhs = (offset * cos_xi - along * sin_xi).max(0.0) - point_slack;
    // The companion base point is at most min(r + slack, epsilon) away; never
    // shrink below r so the bound grows monotonically with every parameter.
    let reach2 = if point_slack == 0.0 {
        r2
    } else {
        let reach = (r + point_slack).min(zp.epsilon).max(r);
        reach * reach
    };
    lhs.max(0.0) <= 0.5 * zp.kappa_max * reach2 + zp.tol
}
