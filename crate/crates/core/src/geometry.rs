//! Spherical coordinates, spherical bases and the rotations between the
//! local frame of a segment and the frame of an observation point.
//!
//! Angles follow the physics convention: `theta` is the polar angle from +z,
//! `phi` the azimuth from +x. On the z-axis `phi` is defined as 0.

use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// A point (or displacement) in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Point3) -> Point3 {
        Point3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        // hypot keeps tiny and huge coordinates from under/overflowing
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// `(r, theta, phi)` with `theta ∈ [0, π]` and `phi ∈ (−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCoords {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalCoords {
    /// True for the origin, where both angles are conventional zeros.
    pub fn is_degenerate(&self) -> bool {
        self.r == 0.0
    }

    pub fn to_point(self) -> Point3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Point3::new(self.r * cp * st, self.r * sp * st, self.r * ct)
    }
}

pub fn to_spherical(p: Point3) -> SphericalCoords {
    let r = p.norm();
    if r == 0.0 {
        return SphericalCoords {
            r: 0.0,
            theta: 0.0,
            phi: 0.0,
        };
    }
    let rho = p.x.hypot(p.y);
    // atan2 of (rho, z) is better conditioned than acos(z / r) near the poles
    let theta = rho.atan2(p.z);
    let phi = if rho == 0.0 {
        0.0
    } else {
        let phi = p.y.atan2(p.x);
        if phi <= -core::f64::consts::PI {
            core::f64::consts::PI
        } else {
            phi
        }
    };
    SphericalCoords { r, theta, phi }
}

/// Orthonormal right-handed spherical basis at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisTriple {
    pub u_r: Point3,
    pub u_theta: Point3,
    pub u_phi: Point3,
}

pub fn spherical_basis(p: Point3) -> Result<BasisTriple> {
    let r = p.norm();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::DegenerateDirection);
    }
    let rho = p.x.hypot(p.y);
    let (cos_t, sin_t) = (p.z / r, rho / r);
    let (cos_p, sin_p) = if rho == 0.0 { (1.0, 0.0) } else { (p.x / rho, p.y / rho) };
    Ok(BasisTriple {
        u_r: Point3::new(cos_p * sin_t, sin_p * sin_t, cos_t),
        u_theta: Point3::new(cos_p * cos_t, sin_p * cos_t, -sin_t),
        u_phi: Point3::new(-sin_p, cos_p, 0.0),
    })
}

/// Real 3×3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn from_columns(c0: Point3, c1: Point3, c2: Point3) -> Mat3 {
        Mat3([[c0.x, c1.x, c2.x], [c0.y, c1.y, c2.y], [c0.z, c1.z, c2.z]])
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn mul_mat(&self, rhs: &Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Mat3(out)
    }

    pub fn mul_vec(&self, v: Point3) -> Point3 {
        let m = &self.0;
        Point3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn frobenius_distance(&self, other: &Mat3) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d = self.0[i][j] - other.0[i][j];
                acc += d * d;
            }
        }
        acc.sqrt()
    }
}

/// Change of basis from spherical components at a point to Cartesian
/// components: columns are `[u_r, u_theta, u_phi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(pub Mat3);

impl RotationMatrix {
    pub fn as_mat3(&self) -> &Mat3 {
        &self.0
    }
}

pub fn rotation_matrix(p: Point3) -> Result<RotationMatrix> {
    let b = spherical_basis(p)?;
    Ok(RotationMatrix(Mat3::from_columns(b.u_r, b.u_theta, b.u_phi)))
}

/// `Q(p)ᵀ·Q(p_k)`: takes spherical components in the frame at `p_k` to
/// spherical components in the frame at `p`.
pub fn rotational_coherence(p: Point3, p_k: Point3) -> Result<Mat3> {
    let q = rotation_matrix(p)?;
    let q_k = rotation_matrix(p_k)?;
    Ok(q.0.transpose().mul_mat(&q_k.0))
}
