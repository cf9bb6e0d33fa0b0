//! Exact spherical trigonometry on the unit sphere.
//!
//! Vertices are [`UnitVector`]s; a [`SphericalTriangle`] is three of them in
//! general position. [`triangle_metrics`] turns the vertices into the six
//! elements (sides `a, b, c` opposite angles `alpha, beta, gamma`) together
//! with the spherical excess `V` and the perimeter `S`.
//!
//! Angles are computed with a two-argument arctangent. The laws of cosines
//! are provided as standalone functions and are used as test oracles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Pairwise `|p·q|` above this bound counts as coincident or antipodal.
pub const DEGENERATE_DOT: f64 = 1.0 - 1e-12;

/// Triple products with magnitude below this bound count as coplanar.
pub const DEGENERATE_TRIPLE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate triangle: {0}")]
    DegenerateTriangle(&'static str),
    #[error("vector ({0}, {1}, {2}) cannot be normalized")]
    ZeroVector(f64, f64, f64),
}

pub(crate) type Vec3 = [f64; 3];

#[inline]
pub(crate) fn dot(p: Vec3, q: Vec3) -> f64 {
    p[0] * q[0] + p[1] * q[1] + p[2] * q[2]
}

#[inline]
pub(crate) fn cross(p: Vec3, q: Vec3) -> Vec3 {
    [
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    ]
}

#[inline]
pub(crate) fn norm(p: Vec3) -> f64 {
    dot(p, p).sqrt()
}

#[inline]
pub(crate) fn scale(p: Vec3, s: f64) -> Vec3 {
    [p[0] * s, p[1] * s, p[2] * s]
}

#[inline]
pub(crate) fn add(p: Vec3, q: Vec3) -> Vec3 {
    [p[0] + q[0], p[1] + q[1], p[2] + q[2]]
}

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVector {
    /// Normalizes `(x, y, z)`; fails for the zero vector or non-finite input.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        let n = norm([x, y, z]);
        if !(n.is_finite() && n > 0.0) {
            return Err(GeometryError::ZeroVector(x, y, z));
        }
        Ok(Self {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub(crate) fn from_array(v: Vec3) -> Result<Self, GeometryError> {
        Self::new(v[0], v[1], v[2])
    }

    /// Builds a point from polar angle `theta` (from +z) and azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub const fn north_pole() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    }

    #[inline]
    pub fn to_array(self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(self, other: UnitVector) -> f64 {
        dot(self.to_array(), other.to_array())
    }

    pub fn neg(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Applies a 3×3 matrix given in row-major order and renormalizes.
    pub fn rotated(self, m: &[[f64; 3]; 3]) -> Self {
        let v = self.to_array();
        let r = [dot(m[0], v), dot(m[1], v), dot(m[2], v)];
        Self::from_array(r).expect("rotation of a unit vector is non-zero")
    }
}

/// Great-circle distance: arccos of the clamped dot product, in `[0, π]`.
pub fn geodesic_distance(p: UnitVector, q: UnitVector) -> f64 {
    p.dot(q).clamp(-1.0, 1.0).acos()
}

/// A great circle, identified by its unit pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreatCircle {
    pub pole: UnitVector,
}

impl GreatCircle {
    pub fn new(pole: UnitVector) -> Self {
        Self { pole }
    }

    /// Orthonormal basis `(e1, e2)` of the circle's plane with `e1 × e2 = pole`.
    pub fn basis(&self) -> (Vec3, Vec3) {
        let p = self.pole.to_array();
        // pick the coordinate axis least aligned with the pole
        let axis = if p[0].abs() <= p[1].abs() && p[0].abs() <= p[2].abs() {
            [1.0, 0.0, 0.0]
        } else if p[1].abs() <= p[2].abs() {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let e1 = cross(p, axis);
        let e1 = scale(e1, 1.0 / norm(e1));
        let e2 = cross(p, e1);
        (e1, e2)
    }

    /// Point on the circle at angular position `t`, measured counterclockwise
    /// about the pole from the basis vector `e1`.
    pub fn point_at(&self, t: f64) -> UnitVector {
        let (e1, e2) = self.basis();
        let (s, c) = t.sin_cos();
        UnitVector::from_array(add(scale(e1, c), scale(e2, s))).expect("basis is orthonormal")
    }

    /// Signed distance of `p` from the circle's plane (`p · pole`).
    pub fn side(&self, p: UnitVector) -> f64 {
        p.dot(self.pole)
    }
}

/// Three vertices `A, B, C`; side `a = BC` is opposite `A`, and cyclically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalTriangle {
    pub a: UnitVector,
    pub b: UnitVector,
    pub c: UnitVector,
}

impl SphericalTriangle {
    /// Checked constructor; rejects coincident, antipodal or coplanar vertices.
    pub fn new(a: UnitVector, b: UnitVector, c: UnitVector) -> Result<Self, GeometryError> {
        let t = Self { a, b, c };
        t.check()?;
        Ok(t)
    }

    pub fn vertices(&self) -> [UnitVector; 3] {
        [self.a, self.b, self.c]
    }

    /// Scalar triple product `A · (B × C)`.
    pub fn triple_product(&self) -> f64 {
        dot(self.a.to_array(), cross(self.b.to_array(), self.c.to_array()))
    }

    pub fn check(&self) -> Result<(), GeometryError> {
        let [p, q, r] = self.vertices();
        if p.dot(q).abs() > DEGENERATE_DOT
            || q.dot(r).abs() > DEGENERATE_DOT
            || r.dot(p).abs() > DEGENERATE_DOT
        {
            return Err(GeometryError::DegenerateTriangle(
                "two vertices coincide or are antipodal",
            ));
        }
        if self.triple_product().abs() < DEGENERATE_TRIPLE {
            return Err(GeometryError::DegenerateTriangle(
                "vertices lie on one great circle",
            ));
        }
        Ok(())
    }

    pub fn rotated(&self, m: &[[f64; 3]; 3]) -> Self {
        Self {
            a: self.a.rotated(m),
            b: self.b.rotated(m),
            c: self.c.rotated(m),
        }
    }
}

/// The six elements of a spherical triangle plus its excess and perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleMetrics {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Spherical excess `alpha + beta + gamma − π` (the area).
    pub excess: f64,
    /// Perimeter `a + b + c`.
    pub perimeter: f64,
}

impl TriangleMetrics {
    /// Assembles metrics from the six elements, filling in excess and perimeter.
    pub fn from_elements(sides: [f64; 3], angles: [f64; 3]) -> Self {
        Self {
            a: sides[0],
            b: sides[1],
            c: sides[2],
            alpha: angles[0],
            beta: angles[1],
            gamma: angles[2],
            excess: angles[0] + angles[1] + angles[2] - PI,
            perimeter: sides[0] + sides[1] + sides[2],
        }
    }

    pub fn sides(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn angles(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    /// Largest law-of-cosines residual over both laws and all three rotations.
    pub fn cosine_law_residual(&self) -> f64 {
        let s = self.sides();
        let g = self.angles();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let sides = s[i].cos() - (s[j].cos() * s[k].cos() + s[j].sin() * s[k].sin() * g[i].cos());
            let angles = -g[i].cos() - (g[j].cos() * g[k].cos() - g[j].sin() * g[k].sin() * s[i].cos());
            worst = worst.max(sides.abs()).max(angles.abs());
        }
        worst
    }
}

/// Interior angle at `p` between the great-circle arcs towards `q` and `r`.
///
/// `(p×q)·(p×r) = q·r − (p·q)(p·r)` and `|(p×q)×(p×r)| = |det(p,q,r)|`.
fn vertex_angle(p: UnitVector, q: UnitVector, r: UnitVector, det_abs: f64) -> f64 {
    let cos_part = q.dot(r) - p.dot(q) * p.dot(r);
    det_abs.atan2(cos_part)
}

pub fn triangle_metrics(t: &SphericalTriangle) -> Result<TriangleMetrics, GeometryError> {
    t.check()?;
    let det = t.triple_product().abs();
    let sides = [
        geodesic_distance(t.b, t.c),
        geodesic_distance(t.c, t.a),
        geodesic_distance(t.a, t.b),
    ];
    let angles = [
        vertex_angle(t.a, t.b, t.c, det),
        vertex_angle(t.b, t.c, t.a, det),
        vertex_angle(t.c, t.a, t.b, det),
    ];
    Ok(TriangleMetrics::from_elements(sides, angles))
}

/// Side `a` from sides `b, c` and the included angle `alpha`.
pub fn law_of_cosines_sides(b: f64, c: f64, alpha: f64) -> f64 {
    (b.cos() * c.cos() + b.sin() * c.sin() * alpha.cos())
        .clamp(-1.0, 1.0)
        .acos()
}

/// Angle `alpha` from angles `beta, gamma` and the included side `a`.
pub fn law_of_cosines_angles(beta: f64, gamma: f64, a: f64) -> f64 {
    (-beta.cos() * gamma.cos() + beta.sin() * gamma.sin() * a.cos())
        .clamp(-1.0, 1.0)
        .acos()
}

/// The polar triangle. Each new vertex is the pole of the opposite side on the
/// same hemisphere as the original vertex, so `a' = π − alpha` and `alpha' = π − a`.
pub fn dual_triangle(t: &SphericalTriangle) -> Result<SphericalTriangle, GeometryError> {
    t.check()?;
    let pole = |q: UnitVector, r: UnitVector, toward: UnitVector| -> Result<UnitVector, GeometryError> {
        let n = UnitVector::from_array(cross(q.to_array(), r.to_array()))?;
        Ok(if n.dot(toward) < 0.0 { n.neg() } else { n })
    };
    SphericalTriangle::new(pole(t.b, t.c, t.a)?, pole(t.c, t.a, t.b)?, pole(t.a, t.b, t.c)?)
}
