//! Closed-form Hertzian dipole fields.
//!
//! Fields are phasors with the outward-travelling `e^{−jβr}` convention.
//! The dipole transform `T` maps a moment (A·m) to the spherical field
//! components `(E_r, E_θ, E_φ)` in the dipole's own frame, i.e. the spherical
//! basis at the displacement from dipole to observation point.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{rotation_matrix, rotational_coherence, spherical_basis, Mat3, Point3};
use crate::C64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permeability, H/m (CODATA 2018).
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity, F/m, `1/(μ₀c²)`.
pub const EPSILON_0: f64 = 1.0 / (MU_0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT);

/// Evaluation points closer than this many wavelengths to a dipole are rejected.
pub const SINGULARITY_GUARD_WAVELENGTHS: f64 = 1e-9;

pub type CVec3 = [C64; 3];
pub type CMat3 = [[C64; 3]; 3];

/// Free-space medium at a single frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    frequency_hz: f64,
}

impl Medium {
    pub fn new(frequency_hz: f64) -> Result<Self> {
        if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!(
                "frequency must be positive and finite, got {frequency_hz}"
            )));
        }
        Ok(Self { frequency_hz })
    }

    pub fn frequency(&self) -> f64 {
        self.frequency_hz
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    pub fn omega(&self) -> f64 {
        2.0 * core::f64::consts::PI * self.frequency_hz
    }

    pub fn beta(&self) -> f64 {
        2.0 * core::f64::consts::PI / self.wavelength()
    }

    pub fn epsilon0(&self) -> f64 {
        EPSILON_0
    }

    pub fn mu0(&self) -> f64 {
        MU_0
    }

    /// Free-space impedance `√(μ₀/ε₀)`, ≈ 376.73 Ω.
    pub fn eta0(&self) -> f64 {
        (MU_0 / EPSILON_0).sqrt()
    }

    pub(crate) fn singularity_radius(&self) -> f64 {
        SINGULARITY_GUARD_WAVELENGTHS * self.wavelength()
    }
}

/// Dipole moment (current density times segment volume), A·m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment(pub CVec3);

impl Moment {
    pub fn new(m: CVec3) -> Result<Self> {
        if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(Self(m))
        } else {
            Err(Error::NonFinite("moment"))
        }
    }

    pub fn real(v: Point3) -> Self {
        Self([C64::new(v.x, 0.0), C64::new(v.y, 0.0), C64::new(v.z, 0.0)])
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(self.0.map(|z| z * c))
    }
}

/// Basis in which a field's three components are expressed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldFrame {
    /// `(r, θ, φ)` components in the spherical basis at the given direction.
    SphericalAt(Point3),
    /// `(x, y, z)` components.
    Cartesian,
}

/// Electric field phasor, V/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVec {
    pub e: CVec3,
    pub frame: FieldFrame,
}

impl FieldVec {
    pub fn zero(frame: FieldFrame) -> Self {
        Self {
            e: [C64::new(0.0, 0.0); 3],
            frame,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.e.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn try_add(&self, other: &FieldVec) -> Result<FieldVec> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        Ok(FieldVec {
            e: core::array::from_fn(|i| self.e[i] + other.e[i]),
            frame: self.frame,
        })
    }

    pub fn try_sub(&self, other: &FieldVec) -> Result<FieldVec> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        Ok(FieldVec {
            e: core::array::from_fn(|i| self.e[i] - other.e[i]),
            frame: self.frame,
        })
    }

    /// Re-expresses a spherical field in Cartesian components.
    pub fn to_cartesian(&self) -> Result<FieldVec> {
        match self.frame {
            FieldFrame::Cartesian => Ok(*self),
            FieldFrame::SphericalAt(p) => {
                let q = rotation_matrix(p)?;
                Ok(FieldVec {
                    e: real_mat_vec(&q.0, &self.e),
                    frame: FieldFrame::Cartesian,
                })
            }
        }
    }
}

pub(crate) fn real_mat_vec(m: &Mat3, v: &CVec3) -> CVec3 {
    core::array::from_fn(|i| (0..3).map(|k| v[k] * m.0[i][k]).sum())
}

pub(crate) fn cmat_vec(m: &CMat3, v: &CVec3) -> CVec3 {
    core::array::from_fn(|i| (0..3).map(|k| m[i][k] * v[k]).sum())
}

fn radius(d: Point3) -> Result<f64> {
    let r = d.norm();
    if r > 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Singularity {
            antenna: 0,
            segment: 0,
            distance: r,
        })
    }
}

/// Shared prefactor `e^{−jβr}/(jωε₀)`.
fn prefactor(r: f64, medium: &Medium) -> C64 {
    let phase = C64::from_polar(1.0, -medium.beta() * r);
    phase / C64::new(0.0, medium.omega() * EPSILON_0)
}

pub(crate) fn alpha_rad_r(r: f64, medium: &Medium) -> C64 {
    let beta = medium.beta();
    let bracket = C64::new(1.0 / (r * r * r), beta / (r * r));
    prefactor(r, medium) * bracket / (2.0 * core::f64::consts::PI)
}

pub(crate) fn alpha_ang_r(r: f64, medium: &Medium) -> C64 {
    let beta = medium.beta();
    let bracket = C64::new(1.0 / (r * r * r) - beta * beta / r, beta / (r * r));
    -prefactor(r, medium) * bracket / (4.0 * core::f64::consts::PI)
}

pub(crate) fn alpha_ang_ff_r(r: f64, medium: &Medium) -> C64 {
    let beta = medium.beta();
    prefactor(r, medium) * (beta * beta / (4.0 * core::f64::consts::PI * r))
}

/// Radial amplitude `e^{−jβr}/(jωε₀2π)·(1/r³ + jβ/r²)` at displacement `d`.
pub fn alpha_rad(d: Point3, medium: &Medium) -> Result<C64> {
    Ok(alpha_rad_r(radius(d)?, medium))
}

/// Angular amplitude `−e^{−jβr}/(jωε₀4π)·(1/r³ + jβ/r² − β²/r)`.
pub fn alpha_ang(d: Point3, medium: &Medium) -> Result<C64> {
    Ok(alpha_ang_r(radius(d)?, medium))
}

/// Far-field angular amplitude `β²e^{−jβr}/(jωε₀4πr)`.
pub fn alpha_ang_ff(d: Point3, medium: &Medium) -> Result<C64> {
    Ok(alpha_ang_ff_r(radius(d)?, medium))
}

fn transform_rows(d: Point3, radial: C64, angular: C64) -> Result<CMat3> {
    let b = spherical_basis(d)?;
    let row = |amp: C64, u: Point3| [amp * u.x, amp * u.y, amp * u.z];
    Ok([row(radial, b.u_r), row(angular, b.u_theta), row(angular, b.u_phi)])
}

/// Dipole field transform: rows `[α_rad·u_rᵀ; α_ang·u_θᵀ; α_ang·u_φᵀ]` at `d`.
pub fn dipole_field_transform(d: Point3, medium: &Medium) -> Result<CMat3> {
    let r = radius(d)?;
    transform_rows(d, alpha_rad_r(r, medium), alpha_ang_r(r, medium))
}

/// Far-field dipole transform: zero radial row, `α_ang,ff` on the angular rows.
pub fn ff_dipole_transform(d: Point3, medium: &Medium) -> Result<CMat3> {
    let r = radius(d)?;
    transform_rows(d, C64::new(0.0, 0.0), alpha_ang_ff_r(r, medium))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFrame {
    /// Spherical basis at `p − s` (the dipole's own frame).
    LocalSpherical,
    /// Spherical basis at `p`.
    GlobalSpherical,
    Cartesian,
}

/// Field at `p` of a dipole with moment `m` located at `s`.
pub fn dipole_field(m: &Moment, s: Point3, p: Point3, medium: &Medium, frame: OutputFrame) -> Result<FieldVec> {
    let d = p - s;
    let dist = d.norm();
    if !(dist >= medium.singularity_radius()) {
        return Err(Error::Singularity {
            antenna: 0,
            segment: 0,
            distance: dist,
        });
    }
    let local = cmat_vec(&dipole_field_transform(d, medium)?, &m.0);
    match frame {
        OutputFrame::LocalSpherical => Ok(FieldVec {
            e: local,
            frame: FieldFrame::SphericalAt(d),
        }),
        OutputFrame::GlobalSpherical => Ok(FieldVec {
            e: real_mat_vec(&rotational_coherence(p, d)?, &local),
            frame: FieldFrame::SphericalAt(p),
        }),
        OutputFrame::Cartesian => Ok(FieldVec {
            e: real_mat_vec(rotation_matrix(d)?.as_mat3(), &local),
            frame: FieldFrame::Cartesian,
        }),
    }
}
