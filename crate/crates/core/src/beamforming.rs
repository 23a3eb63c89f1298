//! Beamforming on a single manifold: maximum field strength, polarization
//! matched (fixed or jointly optimized) and PD-constrained solutions, plus
//! the back-off used to bring a power-constrained solution under a PD limit.
//!
//! The polarization projection of a field is `bᵀE`. With that convention
//! MRT is `w ∝ Aᴴ·b̄` and the jointly optimal receive polarization is
//! `b = ū₁`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::array::{ArrayModel, Weights};
use crate::dipole::CVec3;
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::linalg::{hermitian_eigen, svd_3xn, CMatrix};
use crate::manifold::{isotropic_steering, ManifoldMatrix};
use crate::power::{quadratic_form, PdMatrix};
use crate::C64;

/// Relative eigenvalue floor used when whitening by `X^{-1/2}`.
pub const PD_EIGEN_FLOOR: f64 = 1e-12;

/// Thin SVD of a manifold, `A = U·diag(s)·Vᴴ`.
#[derive(Debug, Clone)]
pub struct ManifoldSvd {
    pub u: CMatrix,
    pub s: [f64; 3],
    pub v: CMatrix,
}

impl ManifoldSvd {
    pub fn left(&self, k: usize) -> CVec3 {
        [self.u[(0, k)], self.u[(1, k)], self.u[(2, k)]]
    }

    pub fn right(&self, k: usize) -> Vec<C64> {
        self.v.column(k)
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.v.rows();
        CMatrix::from_fn(3, n, |i, j| {
            (0..3).map(|k| self.u[(i, k)] * self.s[k] * self.v[(j, k)].conj()).sum()
        })
    }
}

pub fn manifold_svd(a: &ManifoldMatrix) -> ManifoldSvd {
    let svd = svd_3xn(a.matrix());
    ManifoldSvd {
        u: svd.u,
        s: svd.s,
        v: svd.v,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeamMethod {
    Svd,
    Mrt,
    Joint,
    PdConstrained,
    Combined,
    Isotropic,
}

impl BeamMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BeamMethod::Svd => "svd",
            BeamMethod::Mrt => "mrt",
            BeamMethod::Joint => "joint",
            BeamMethod::PdConstrained => "pd",
            BeamMethod::Combined => "combined",
            BeamMethod::Isotropic => "isotropic",
        }
    }
}

/// Which constraints hold with equality in the returned solution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ActiveConstraints {
    pub power: bool,
    pub pd: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSolution {
    pub w: Weights,
    /// `‖A·w‖²`, or `|bᵀA·w|²` when a polarization is set.
    pub objective: f64,
    pub polarization: Option<CVec3>,
    pub method: BeamMethod,
    pub constraints_active: ActiveConstraints,
    /// The PD whitening hit the eigenvalue floor.
    pub regularized: bool,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(alloc::format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Rotates `w` so its largest-magnitude entry is real and positive.
/// Returns the applied phase factor.
fn fix_global_phase(w: &mut [C64]) -> C64 {
    let mut best = 0usize;
    for (i, z) in w.iter().enumerate() {
        if z.norm() > w[best].norm() {
            best = i;
        }
    }
    let m = w.get(best).map(|z| z.norm()).unwrap_or(0.0);
    if m == 0.0 {
        return C64::new(1.0, 0.0);
    }
    let phase = w[best].conj() / m;
    for z in w.iter_mut() {
        *z *= phase;
    }
    w[best] = C64::new(w[best].re, 0.0);
    phase
}

/// `‖A·w‖²`.
pub fn field_objective(a: &ManifoldMatrix, w: &Weights) -> f64 {
    a.matrix().mul_vec(w.as_slice()).iter().map(|z| z.norm_sqr()).sum()
}

/// `|bᵀA·w|²`.
pub fn polarized_objective(a: &ManifoldMatrix, b: &CVec3, w: &Weights) -> f64 {
    let e = a.matrix().mul_vec(w.as_slice());
    (b[0] * e[0] + b[1] * e[1] + b[2] * e[2]).norm_sqr()
}

fn leading_solution(a: &ManifoldMatrix, power: f64, method: BeamMethod) -> Result<(BeamSolution, CVec3)> {
    check_positive("power", power)?;
    let svd = manifold_svd(a);
    if !(svd.s[0] > 0.0) {
        return Err(Error::NoRadiatingMode);
    }
    let mut w: Vec<C64> = svd.right(0).into_iter().map(|z| z * power.sqrt()).collect();
    let phase = fix_global_phase(&mut w);
    // keep u₁ᴴ·A·w real and positive after the phase change
    let u1 = svd.left(0);
    let b = [u1[0].conj() * phase, u1[1].conj() * phase, u1[2].conj() * phase];
    let w = Weights::from(w);
    let objective = field_objective(a, &w);
    Ok((
        BeamSolution {
            w,
            objective,
            polarization: None,
            method,
            constraints_active: ActiveConstraints { power: true, pd: false },
            regularized: false,
        },
        b,
    ))
}

/// Maximizes `‖A·w‖²` subject to `‖w‖² = P`: `w = √P·v₁`.
pub fn max_field_strength(a: &ManifoldMatrix, power: f64) -> Result<BeamSolution> {
    Ok(leading_solution(a, power, BeamMethod::Svd)?.0)
}

/// Maximizes `|bᵀA·w|²` for a fixed unit polarization `b`.
pub fn mrt_polarized(a: &ManifoldMatrix, b: &CVec3, power: f64) -> Result<BeamSolution> {
    check_positive("power", power)?;
    let bn = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !bn.is_finite() || (bn - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(alloc::format!(
            "polarization must have unit norm, got {bn}"
        )));
    }
    let m = a.matrix();
    // Aᴴ·b̄ = conj(Aᵀ·b)
    let mut w: Vec<C64> = (0..m.cols())
        .map(|n| (0..3).map(|k| b[k] * m[(k, n)]).sum::<C64>().conj())
        .collect();
    let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || norm <= 1e-12 * m.frobenius_norm() {
        return Err(Error::PolarizationInNullSpace);
    }
    for z in w.iter_mut() {
        *z *= power.sqrt() / norm;
    }
    fix_global_phase(&mut w);
    let w = Weights::from(w);
    let objective = polarized_objective(a, b, &w);
    Ok(BeamSolution {
        w,
        objective,
        polarization: Some(*b),
        method: BeamMethod::Mrt,
        constraints_active: ActiveConstraints { power: true, pd: false },
        regularized: false,
    })
}

/// Jointly optimal polarization and weights: `b = ū₁`, `w = √P·v₁`.
pub fn joint_polarization(a: &ManifoldMatrix, power: f64) -> Result<BeamSolution> {
    let (mut sol, b) = leading_solution(a, power, BeamMethod::Joint)?;
    sol.objective = polarized_objective(a, &b, &sol.w);
    sol.polarization = Some(b);
    Ok(sol)
}

fn check_pd_dims(a: &ManifoldMatrix, x: &PdMatrix) -> Result<()> {
    if x.n() != a.n_antennas() {
        return Err(Error::DimensionMismatch {
            what: "PD matrix size",
            expected: a.n_antennas(),
            actual: x.n(),
        });
    }
    Ok(())
}

/// Maximizes `‖A·w‖²` subject to `wᴴXw = Q`: `w = √Q·X^{-1/2}·v₁` where `v₁`
/// is the dominant right singular vector of `A·X^{-1/2}`.
///
/// Eigenvalues of `X` below `1e−12·λ_max` are floored; the result is then
/// rescaled so the constraint is tight against the unmodified `X`.
pub fn pd_constrained(a: &ManifoldMatrix, x: &PdMatrix, q: f64) -> Result<BeamSolution> {
    check_positive("PD limit", q)?;
    check_pd_dims(a, x)?;
    let n = x.n();
    let eig = hermitian_eigen(x.matrix());
    let lmax = eig.values.first().copied().unwrap_or(0.0);
    if !(lmax > 0.0) {
        return Err(Error::ZeroPdMatrix);
    }
    let floor = PD_EIGEN_FLOOR * lmax;
    let regularized = eig.values.iter().any(|&l| l < floor);
    let inv_sqrt: Vec<f64> = eig.values.iter().map(|&l| 1.0 / l.max(floor).sqrt()).collect();
    let vecs = &eig.vectors;
    let x_inv_sqrt = CMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| vecs[(i, k)] * inv_sqrt[k] * vecs[(j, k)].conj()).sum()
    });

    let whitened = a.matrix().mul_mat(&x_inv_sqrt);
    let svd = svd_3xn(&whitened);
    if !(svd.s[0] > 0.0) {
        return Err(Error::NoRadiatingMode);
    }
    let mut w = x_inv_sqrt.mul_vec(&svd.v.column(0));
    let qf = quadratic_form(x.matrix(), &w);
    if !(qf > 0.0) {
        return Err(Error::UnboundedPdConstraint);
    }
    let scale = (q / qf).sqrt();
    for z in w.iter_mut() {
        *z *= scale;
    }
    fix_global_phase(&mut w);
    let w = Weights::from(w);
    let objective = field_objective(a, &w);
    Ok(BeamSolution {
        w,
        objective,
        polarization: None,
        method: BeamMethod::PdConstrained,
        constraints_active: ActiveConstraints { power: false, pd: true },
        regularized,
    })
}

/// `γ = min(1, √(Q/wᴴXw))`.
pub fn backoff_factor(w: &Weights, x: &PdMatrix, q: f64) -> Result<f64> {
    check_positive("PD limit", q)?;
    let qf = x.quadratic_form(w)?;
    Ok(if qf <= q { 1.0 } else { (q / qf).sqrt() })
}

/// Attenuates `w` just enough to satisfy `wᴴXw ≤ Q`.
pub fn power_backoff(w: &Weights, x: &PdMatrix, q: f64) -> Result<Weights> {
    let g = backoff_factor(w, x, q)?;
    Ok(if g == 1.0 {
        w.clone()
    } else {
        w.scaled(C64::new(g, 0.0))
    })
}

/// Both a transmit power limit `‖w‖² ≤ P` and a PD limit `wᴴXw ≤ Q`.
///
/// Takes the better of two feasible candidates: the SVD solution at `P`
/// backed off to `Q`, and the PD-constrained solution at `Q` clamped to `P`.
/// This is a heuristic, not the exact joint optimum.
pub fn combined_constraint(a: &ManifoldMatrix, x: &PdMatrix, q: f64, power: f64) -> Result<BeamSolution> {
    check_positive("power", power)?;
    check_pd_dims(a, x)?;

    let svd = max_field_strength(a, power)?;
    let g1 = backoff_factor(&svd.w, x, q)?;
    let w1 = svd.w.scaled(C64::new(g1, 0.0));
    let c1 = BeamSolution {
        objective: field_objective(a, &w1),
        w: w1,
        polarization: None,
        method: BeamMethod::Combined,
        constraints_active: ActiveConstraints {
            power: g1 == 1.0,
            pd: g1 < 1.0,
        },
        regularized: false,
    };

    let pd = pd_constrained(a, x, q)?;
    let pw = pd.w.power();
    let g2 = if pw <= power { 1.0 } else { (power / pw).sqrt() };
    let w2 = pd.w.scaled(C64::new(g2, 0.0));
    let c2 = BeamSolution {
        objective: field_objective(a, &w2),
        w: w2,
        polarization: None,
        method: BeamMethod::Combined,
        constraints_active: ActiveConstraints {
            power: g2 < 1.0,
            pd: g2 == 1.0,
        },
        regularized: pd.regularized,
    };

    Ok(if c2.objective > c1.objective { c2 } else { c1 })
}

/// Baseline: near-field isotropic matched filter at `p`, objective on the
/// supplied (physical) manifold.
pub fn isotropic_beam(
    model: &ArrayModel,
    a: &ManifoldMatrix,
    p: Point3,
    power: f64,
    conjugate: bool,
) -> Result<BeamSolution> {
    check_positive("power", power)?;
    let steering = isotropic_steering(model, p)?;
    if steering.len() != a.n_antennas() {
        return Err(Error::DimensionMismatch {
            what: "isotropic steering",
            expected: a.n_antennas(),
            actual: steering.len(),
        });
    }
    let mut w = steering.weights(conjugate).into_vec();
    for z in w.iter_mut() {
        *z *= power.sqrt();
    }
    fix_global_phase(&mut w);
    let w = Weights::from(w);
    let objective = field_objective(a, &w);
    Ok(BeamSolution {
        w,
        objective,
        polarization: None,
        method: BeamMethod::Isotropic,
        constraints_active: ActiveConstraints { power: true, pd: false },
        regularized: false,
    })
}
