//! Array manifolds: the `3 × N` matrices mapping feed weights to the field
//! components `(E_r, E_θ, E_φ)` at an observation point.
//!
//! * near: every segment's dipole field rotated into the frame at `p`
//! * far: far-field dipole transform per segment, no rotation
//! * isolated: one phase center and summed moment per uncoupled antenna
//! * isotropic: scalar unit-modulus steering vector (baseline)

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::array::{ArrayModel, Weights};
use crate::dipole::{alpha_ang_ff_r, dipole_field_transform, ff_dipole_transform, CMat3, CVec3, FieldFrame, FieldVec};
use crate::error::{Error, Result};
use crate::geometry::{rotation_matrix, spherical_basis, Point3};
use crate::linalg::CMatrix;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldVariant {
    Near,
    Far,
    Isolated,
    /// Isotropic steering vector placed on the θ row, other rows zero.
    IsotropicLifted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldMatrix {
    a: CMatrix,
    point: Point3,
    variant: ManifoldVariant,
}

impl ManifoldMatrix {
    pub fn new(a: CMatrix, point: Point3, variant: ManifoldVariant) -> Result<Self> {
        if a.rows() != 3 {
            return Err(Error::DimensionMismatch {
                what: "manifold rows",
                expected: 3,
                actual: a.rows(),
            });
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("manifold"));
        }
        Ok(Self { a, point, variant })
    }

    /// The `3 × N` matrix; the field for weights `w` is `matrix()·w`.
    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn point(&self) -> Point3 {
        self.point
    }

    pub fn variant(&self) -> ManifoldVariant {
        self.variant
    }

    pub fn n_antennas(&self) -> usize {
        self.a.cols()
    }

    pub fn column(&self, n: usize) -> CVec3 {
        [self.a[(0, n)], self.a[(1, n)], self.a[(2, n)]]
    }

    /// Manifold multiplied by a complex scalar.
    pub fn scaled(&self, c: C64) -> Self {
        Self {
            a: self.a.scale(c),
            ..self.clone()
        }
    }
}

fn check_clearance(model: &ArrayModel, p: Point3) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::NonFinite("observation point"));
    }
    let guard = model.medium().singularity_radius();
    for s in model.segments() {
        let distance = p.distance(s.centroid);
        if !(distance >= guard) {
            return Err(Error::Singularity {
                antenna: s.antenna,
                segment: s.segment,
                distance,
            });
        }
    }
    Ok(())
}

fn mat3_mul(a: &CMat3, b: &CMat3) -> CMat3 {
    core::array::from_fn(|i| core::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

fn real_to_complex(m: &crate::geometry::Mat3) -> CMat3 {
    m.0.map(|row| row.map(|x| C64::new(x, 0.0)))
}

/// Accumulates `Σ_j G_j · M̄_j` column by column, skipping all-zero moment
/// blocks (the off-diagonal blocks of uncoupled arrays).
fn accumulate(model: &ArrayModel, mut per_segment: impl FnMut(usize) -> Result<CMat3>) -> Result<CMatrix> {
    let n = model.n_antennas();
    let m = model.moment_matrix();
    let zero = C64::new(0.0, 0.0);
    let mut a = CMatrix::zeros(3, n);
    for j in 0..model.total_segments() {
        let active: Vec<usize> = (0..n).filter(|&c| (0..3).any(|r| m[(3 * j + r, c)] != zero)).collect();
        if active.is_empty() {
            continue;
        }
        let g = per_segment(j)?;
        for c in active {
            let mom = model.segment_moment(j, c).0;
            for (i, row) in g.iter().enumerate() {
                a[(i, c)] += row[0] * mom[0] + row[1] * mom[1] + row[2] * mom[2];
            }
        }
    }
    Ok(a)
}

/// Near-field manifold `Aᵀ = R̄ᵀ·T̄·M̄` at `p`.
pub fn assemble_manifold(model: &ArrayModel, p: Point3) -> Result<ManifoldMatrix> {
    check_clearance(model, p)?;
    let qt = real_to_complex(&rotation_matrix(p)?.0.transpose());
    let medium = *model.medium();
    let segs = model.segments();
    let a = accumulate(model, |j| {
        let d = p - segs[j].centroid;
        let q_k = real_to_complex(&rotation_matrix(d)?.0);
        let t = dipole_field_transform(d, &medium)?;
        Ok(mat3_mul(&mat3_mul(&qt, &q_k), &t))
    })?;
    ManifoldMatrix::new(a, p, ManifoldVariant::Near)
}

/// Far-field manifold `A_ffᵀ = T̄_ff·M̄`; no rotational coherence.
pub fn assemble_ff_manifold(model: &ArrayModel, p: Point3) -> Result<ManifoldMatrix> {
    check_clearance(model, p)?;
    let medium = *model.medium();
    let segs = model.segments();
    let a = accumulate(model, |j| ff_dipole_transform(p - segs[j].centroid, &medium))?;
    ManifoldMatrix::new(a, p, ManifoldVariant::Far)
}

/// Isolated manifold for uncoupled arrays: column `n` is
/// `e^{−jβ‖p_n‖}/‖p_n‖ · g_n` with `p_n = p − c_n` measured from the antenna
/// phase center and `g_n` the far-field pattern of the summed antenna moment.
pub fn isolated_manifold(model: &ArrayModel, p: Point3) -> Result<ManifoldMatrix> {
    if !model.is_uncoupled() {
        return Err(Error::CoupledModel);
    }
    check_clearance(model, p)?;
    let medium = *model.medium();
    let guard = medium.singularity_radius();
    let mut a = CMatrix::zeros(3, model.n_antennas());
    for (n, center) in model.phase_centers().into_iter().enumerate() {
        let pn = p - center;
        let dist = pn.norm();
        if !(dist >= guard) {
            return Err(Error::Singularity {
                antenna: n,
                segment: model.antennas()[n].feed_index(),
                distance: dist,
            });
        }
        let mut total = [C64::new(0.0, 0.0); 3];
        for j in model.block_rows(n).step_by(3).map(|r| r / 3) {
            let m = model.segment_moment(j, n).0;
            for c in 0..3 {
                total[c] += m[c];
            }
        }
        let b = spherical_basis(pn)?;
        let proj = |u: Point3| total[0] * u.x + total[1] * u.y + total[2] * u.z;
        // α_ang,ff(p_n) = e^{−jβ‖p_n‖}/‖p_n‖ · β²/(jωε₀4π)
        let amp = alpha_ang_ff_r(dist, &medium);
        a[(1, n)] = amp * proj(b.u_theta);
        a[(2, n)] = amp * proj(b.u_phi);
    }
    ManifoldMatrix::new(a, p, ManifoldVariant::Isolated)
}

/// Near-field isotropic steering vector, entries `e^{−jβ‖p − c_n‖}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicSteering(pub Vec<C64>);

impl IsotropicSteering {
    /// Unit-power matched-filter weights. `conjugate = true` gives
    /// `a*/‖a‖`, which phase-aligns all elements at the focus point.
    pub fn weights(&self, conjugate: bool) -> Weights {
        let norm = self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Weights::from(
            self.0
                .iter()
                .map(|z| if conjugate { z.conj() } else { *z } / norm)
                .collect::<Vec<_>>(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn isotropic_steering(model: &ArrayModel, p: Point3) -> Result<IsotropicSteering> {
    if !p.is_finite() {
        return Err(Error::NonFinite("observation point"));
    }
    let beta = model.medium().beta();
    let guard = model.medium().singularity_radius();
    model
        .phase_centers()
        .into_iter()
        .enumerate()
        .map(|(n, c)| {
            let d = p.distance(c);
            if !(d >= guard) {
                return Err(Error::Singularity {
                    antenna: n,
                    segment: model.antennas()[n].feed_index(),
                    distance: d,
                });
            }
            Ok(C64::from_polar(1.0, -beta * d))
        })
        .collect::<Result<Vec<_>>>()
        .map(IsotropicSteering)
}

/// Isotropic steering vector lifted to a `3 × N` manifold (θ row only).
pub fn isotropic_lifted_manifold(model: &ArrayModel, p: Point3) -> Result<ManifoldMatrix> {
    let a_iso = isotropic_steering(model, p)?;
    let a = CMatrix::from_fn(
        3,
        a_iso.len(),
        |i, j| if i == 1 { a_iso.0[j] } else { C64::new(0.0, 0.0) },
    );
    ManifoldMatrix::new(a, p, ManifoldVariant::IsotropicLifted)
}

pub fn assemble_variant(model: &ArrayModel, p: Point3, variant: ManifoldVariant) -> Result<ManifoldMatrix> {
    match variant {
        ManifoldVariant::Near => assemble_manifold(model, p),
        ManifoldVariant::Far => assemble_ff_manifold(model, p),
        ManifoldVariant::Isolated => isolated_manifold(model, p),
        ManifoldVariant::IsotropicLifted => isotropic_lifted_manifold(model, p),
    }
}

/// `E = A·w` in the spherical frame at the manifold's point.
pub fn evaluate_field(a: &ManifoldMatrix, w: &Weights) -> Result<FieldVec> {
    if w.len() != a.n_antennas() {
        return Err(Error::DimensionMismatch {
            what: "weights",
            expected: a.n_antennas(),
            actual: w.len(),
        });
    }
    let e = a.matrix().mul_vec(w.as_slice());
    Ok(FieldVec {
        e: [e[0], e[1], e[2]],
        frame: FieldFrame::SphericalAt(a.point()),
    })
}
