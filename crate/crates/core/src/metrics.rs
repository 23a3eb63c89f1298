//! Oracle field summation, relative error, gain in dBd and far-field
//! convergence sweeps.
//!
//! `brute_force_field` shares only the point-to-centroid distance with
//! manifold assembly: it forms the segment moments `M̄·w` first, sums
//! closed-form Cartesian dipole fields and only then projects onto a
//! trigonometric spherical basis.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::array::{assemble_uncoupled, generate_half_wave_dipole, ArrayModel, Weights};
use crate::dipole::{FieldFrame, FieldVec, Medium, EPSILON_0};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::manifold::{assemble_ff_manifold, assemble_manifold, evaluate_field};
use crate::C64;

/// Segment count of the reference half-wave dipole.
pub const REFERENCE_SEGMENTS: usize = 40;

/// Field of the whole array at `p` for weights `w`, by direct summation over
/// every segment. Spherical components at `p`.
pub fn brute_force_field(model: &ArrayModel, w: &Weights, p: Point3) -> Result<FieldVec> {
    model.check_weights(w)?;
    let mm = model.moment_matrix();
    if !p.is_finite() {
        return Err(Error::NonFinite("observation point"));
    }
    let medium = model.medium();
    let k = medium.beta();
    let omega = medium.omega();
    let guard = medium.wavelength() * crate::dipole::SINGULARITY_GUARD_WAVELENGTHS;
    let scale = C64::new(0.0, omega * 4.0 * core::f64::consts::PI * EPSILON_0).inv();

    let mut e = [C64::new(0.0, 0.0); 3];
    for (j, seg) in model.segments().iter().enumerate() {
        let mut m = [C64::new(0.0, 0.0); 3];
        for (i, mi) in m.iter_mut().enumerate() {
            *mi = mm.row(3 * j + i).iter().zip(w.as_slice()).map(|(a, b)| a * b).sum();
        }
        // same rounding of r as the manifold path: at r = 100λ one ulp of r
        // is already ~1e−13 of phase
        let dp = p - seg.centroid;
        let r = dp.norm();
        let d = dp.to_array();
        if !(r >= guard) {
            return Err(Error::Singularity {
                antenna: seg.antenna,
                segment: seg.segment,
                distance: r,
            });
        }
        let n = [d[0] / r, d[1] / r, d[2] / r];
        let n_dot_m: C64 = (0..3).map(|i| m[i] * n[i]).sum();
        let g = C64::from_polar(1.0, -k * r) * scale;
        let near = C64::new(1.0 / (r * r * r), k / (r * r));
        let far = k * k / r;
        for i in 0..3 {
            // k²(n×m)×n/r + (3n(n·m) − m)(1/r³ + jk/r²), over jω4πε₀
            let transverse = m[i] - n_dot_m * n[i];
            let quasi_static = n_dot_m * (3.0 * n[i]) - m[i];
            e[i] += g * (transverse * far + quasi_static * near);
        }
    }

    let (theta, phi) = angles(p)?;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let basis = [[st * cp, st * sp, ct], [ct * cp, ct * sp, -st], [-sp, cp, 0.0]];
    Ok(FieldVec {
        e: core::array::from_fn(|row| (0..3).map(|i| e[i] * basis[row][i]).sum()),
        frame: FieldFrame::SphericalAt(p),
    })
}

fn angles(p: Point3) -> Result<(f64, f64)> {
    let rho = (p.x * p.x + p.y * p.y).sqrt();
    if rho == 0.0 && p.z == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let phi = if rho == 0.0 { 0.0 } else { p.y.atan2(p.x) };
    Ok((rho.atan2(p.z), phi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// `‖e_ref − e_test‖/‖e_ref‖`.
    pub relative_error: f64,
    /// `|e_ref,i − e_test,i|/‖e_ref‖` per component.
    pub components: [f64; 3],
}

pub fn relative_error(e_ref: &FieldVec, e_test: &FieldVec) -> Result<ErrorReport> {
    let diff = e_ref.try_sub(e_test)?;
    let norm = e_ref.norm();
    if !(norm > 0.0) {
        return Err(Error::ZeroReference);
    }
    Ok(ErrorReport {
        relative_error: diff.norm() / norm,
        components: core::array::from_fn(|i| diff.e[i].norm() / norm),
    })
}

/// Reference element for dBd: center-fed half-wave dipole on the z axis at
/// the origin, 40 segments, unit feed.
pub fn reference_dipole(medium: &Medium) -> Result<ArrayModel> {
    assemble_uncoupled(alloc::vec![generate_half_wave_dipole(
        Point3::ORIGIN,
        Point3::new(0.0, 0.0, 1.0),
        REFERENCE_SEGMENTS,
        medium,
    )?])
}

/// `‖E_ref(p)‖²` of the reference dipole. Points on its axis are rejected.
pub fn reference_norm_sqr(medium: &Medium, p: Point3) -> Result<f64> {
    let rho = (p.x * p.x + p.y * p.y).sqrt();
    if rho <= 1e-9 * p.norm() {
        return Err(Error::ReferenceNull);
    }
    let reference = reference_dipole(medium)?;
    let e = evaluate_field(&assemble_manifold(&reference, p)?, &Weights::ones(1))?;
    let n = e.norm_sqr();
    if !(n > 0.0) {
        return Err(Error::ReferenceNull);
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSample {
    pub gain_dbd: f64,
    pub point: Point3,
}

/// `10·log₁₀(‖E_arr(p)‖²/‖E_ref(p)‖²)`.
pub fn gain_dbd(model: &ArrayModel, w: &Weights, p: Point3) -> Result<GainSample> {
    let e = evaluate_field(&assemble_manifold(model, p)?, w)?;
    gain_from_norm_sqr(e.norm_sqr(), model.medium(), p)
}

/// Gain for an already computed `‖E‖²` (e.g. a solver objective).
pub fn gain_from_norm_sqr(e_norm_sqr: f64, medium: &Medium, p: Point3) -> Result<GainSample> {
    let reference = reference_norm_sqr(medium, p)?;
    Ok(GainSample {
        gain_dbd: 10.0 * (e_norm_sqr / reference).log10(),
        point: p,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `(r, relative error of the far-field model)`.
    pub samples: Vec<(f64, f64)>,
    /// Least-squares slope of `ln error` against `ln r`; `None` with fewer
    /// than two usable samples.
    pub slope: Option<f64>,
}

impl ConvergenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.samples.windows(2).all(|s| s[1].1 < s[0].1)
    }
}

/// Near- vs far-field relative error at `r·direction` for each radius.
pub fn convergence_sweep(
    model: &ArrayModel,
    w: &Weights,
    direction: Point3,
    radii: &[f64],
) -> Result<ConvergenceReport> {
    let u = direction
        .normalized()
        .ok_or_else(|| Error::InvalidArgument("sweep direction must be nonzero".into()))?;
    if radii.windows(2).any(|r| !(r[1] > r[0])) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidArgument("radii must be positive and increasing".into()));
    }
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        let p = u * r;
        let near = evaluate_field(&assemble_manifold(model, p)?, w)?;
        let far = evaluate_field(&assemble_ff_manifold(model, p)?, w)?;
        samples.push((r, relative_error(&near, &far)?.relative_error));
    }
    let logs: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.1 > 0.0)
        .map(|&(r, e)| (r.ln(), e.ln()))
        .collect();
    Ok(ConvergenceReport {
        slope: least_squares_slope(&logs),
        samples,
    })
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn least_squares_slope(xy: &[(f64, f64)]) -> Option<f64> {
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx > 0.0 {
        Some(sxy / sxx)
    } else {
        None
    }
}
