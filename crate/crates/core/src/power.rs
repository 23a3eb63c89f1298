//! Plane-wave-equivalent power density `‖E‖²/(2η₀)`, sampled constraint
//! regions and the characteristic PD matrix `X` with `w*Xw` equal to the
//! region-averaged PD.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::array::{ArrayModel, Weights};
use crate::dipole::Medium;
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::manifold::{assemble_variant, evaluate_field, ManifoldMatrix, ManifoldVariant};
use crate::C64;

fn check_len(a: &ManifoldMatrix, w: &Weights) -> Result<()> {
    if a.n_antennas() != w.len() {
        return Err(Error::DimensionMismatch {
            what: "weights",
            expected: a.n_antennas(),
            actual: w.len(),
        });
    }
    Ok(())
}

/// `AᴴA`, the N×N Gram matrix of a manifold.
pub fn manifold_gram(a: &ManifoldMatrix) -> CMatrix {
    let m = a.matrix();
    let n = m.cols();
    CMatrix::from_fn(n, n, |i, j| (0..3).map(|k| m[(k, i)].conj() * m[(k, j)]).sum())
}

/// Real part of `wᴴ·X·w`.
pub fn quadratic_form(x: &CMatrix, w: &[C64]) -> f64 {
    let xw = x.mul_vec(w);
    w.iter().zip(&xw).map(|(a, b)| (a.conj() * b).re).sum()
}

/// PD at the manifold's point, evaluated as the quadratic form
/// `wᴴAᴴAw/(2η₀)`, W/m².
pub fn pd_point(a: &ManifoldMatrix, w: &Weights, medium: &Medium) -> Result<f64> {
    check_len(a, w)?;
    Ok(quadratic_form(&manifold_gram(a), w.as_slice()) / (2.0 * medium.eta0()))
}

/// PD from the field directly, `‖A·w‖²/(2η₀)`.
pub fn pd_from_field(a: &ManifoldMatrix, w: &Weights, medium: &Medium) -> Result<f64> {
    Ok(evaluate_field(a, w)?.norm_sqr() / (2.0 * medium.eta0()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionKind {
    Sphere { center: Point3, radius: f64 },
    Custom,
}

/// Points over which PD is averaged.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRegion {
    points: Vec<Point3>,
    kind: RegionKind,
}

impl SampleRegion {
    pub fn custom(points: Vec<Point3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("sample region needs at least one point".into()));
        }
        if !points.iter().all(|p| p.is_finite()) {
            return Err(Error::NonFinite("region point"));
        }
        Ok(Self {
            points,
            kind: RegionKind::Custom,
        })
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Unit vectors of an `n`-point Fibonacci (golden-angle) lattice.
pub fn fibonacci_directions(n: usize) -> Vec<Point3> {
    let golden_angle = core::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden_angle * i as f64).sin_cos();
            Point3::new(rho * c, rho * s, z)
        })
        .collect()
}

/// Deterministic, near-uniform points on a sphere.
pub fn sphere_region(center: Point3, radius: f64, n_points: usize) -> Result<SampleRegion> {
    if n_points == 0 {
        return Err(Error::InvalidArgument("sphere region needs at least one point".into()));
    }
    if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "sphere region needs a finite center and positive radius, got {radius}"
        )));
    }
    Ok(SampleRegion {
        points: fibonacci_directions(n_points)
            .into_iter()
            .map(|u| center + u * radius)
            .collect(),
        kind: RegionKind::Sphere { center, radius },
    })
}

/// Characteristic PD matrix: `w*Xw` is the mean PD over a region.
#[derive(Debug, Clone, PartialEq)]
pub struct PdMatrix {
    x: CMatrix,
    region: RegionKind,
    /// Divisor applied by normalization, if any.
    normalization: Option<f64>,
}

impl PdMatrix {
    pub fn new(x: CMatrix, region: RegionKind) -> Result<Self> {
        if x.rows() != x.cols() {
            return Err(Error::DimensionMismatch {
                what: "PD matrix columns",
                expected: x.rows(),
                actual: x.cols(),
            });
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("PD matrix"));
        }
        Ok(Self {
            x,
            region,
            normalization: None,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            x: CMatrix::identity(n),
            region: RegionKind::Custom,
            normalization: None,
        }
    }

    /// `X = Σ_p AᴴA / (2η₀·count)` from an accumulated Gram sum.
    pub fn from_gram_sum(sum: &CMatrix, count: usize, medium: &Medium, region: RegionKind) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("empty sample region".into()));
        }
        let scale = 1.0 / (2.0 * medium.eta0() * count as f64);
        Self::new(sum.scale(C64::new(scale, 0.0)), region)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn region(&self) -> RegionKind {
        self.region
    }

    pub fn normalization(&self) -> Option<f64> {
        self.normalization
    }

    pub fn quadratic_form(&self, w: &Weights) -> Result<f64> {
        if w.len() != self.n() {
            return Err(Error::DimensionMismatch {
                what: "weights",
                expected: self.n(),
                actual: w.len(),
            });
        }
        Ok(quadratic_form(&self.x, w.as_slice()))
    }

    /// Descending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.x).values
    }

    /// Hermitian within `1e−12` relative and `λ_min ≥ −1e−10·λ_max`.
    pub fn is_hermitian_psd(&self) -> bool {
        if self.x.hermitian_defect() > 1e-12 {
            return false;
        }
        let ev = self.eigenvalues();
        let max = ev.first().copied().unwrap_or(0.0);
        let min = ev.last().copied().unwrap_or(0.0);
        min >= -1e-10 * max.abs()
    }
}

/// Gram contribution `AᴴA` of one sample point.
pub fn pd_gram_at(model: &ArrayModel, p: Point3, variant: ManifoldVariant) -> Result<CMatrix> {
    Ok(manifold_gram(&assemble_variant(model, p, variant)?))
}

/// Characteristic PD matrix from the near-field manifold.
pub fn characteristic_pd_matrix(model: &ArrayModel, region: &SampleRegion) -> Result<PdMatrix> {
    characteristic_pd_matrix_with(model, region, ManifoldVariant::Near)
}

pub fn characteristic_pd_matrix_with(
    model: &ArrayModel,
    region: &SampleRegion,
    variant: ManifoldVariant,
) -> Result<PdMatrix> {
    let n = model.n_antennas();
    let mut sum = CMatrix::zeros(n, n);
    for &p in region.points() {
        let g = pd_gram_at(model, p, variant)?;
        for i in 0..n {
            for j in 0..n {
                sum[(i, j)] += g[(i, j)];
            }
        }
    }
    PdMatrix::from_gram_sum(&sum, region.len(), model.medium(), region.kind())
}

/// How the reference "maximum average PD" is chosen when normalizing.
#[derive(Debug, Clone, Copy)]
pub enum PdNormalization<'a> {
    /// Worst case over all weights: the dominant eigenvalue.
    DominantEigenvalue,
    /// Worst case over the given weight vectors (e.g. a steering sweep),
    /// each rescaled to the reference power.
    OverWeights(&'a [Weights]),
}

/// Scales `X` so a value of 1 is the maximum average PD at
/// `reference_power` watts of transmit power.
pub fn normalize_pd_matrix(x: &PdMatrix, reference_power: f64) -> Result<PdMatrix> {
    normalize_pd_matrix_by(x, reference_power, PdNormalization::DominantEigenvalue)
}

pub fn normalize_pd_matrix_by(x: &PdMatrix, reference_power: f64, how: PdNormalization<'_>) -> Result<PdMatrix> {
    if !(reference_power > 0.0) || !reference_power.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "reference power must be positive, got {reference_power}"
        )));
    }
    let peak = match how {
        PdNormalization::DominantEigenvalue => x.eigenvalues().first().copied().unwrap_or(0.0),
        PdNormalization::OverWeights(candidates) => {
            let mut best: f64 = 0.0;
            for w in candidates {
                let pw = w.power();
                if pw > 0.0 {
                    best = best.max(x.quadratic_form(w)? / pw);
                }
            }
            best
        }
    };
    if !(peak > 0.0) {
        return Err(Error::ZeroPdMatrix);
    }
    let divisor = peak * reference_power;
    Ok(PdMatrix {
        x: x.x.scale(C64::new(1.0 / divisor, 0.0)),
        region: x.region,
        normalization: Some(divisor * x.normalization.unwrap_or(1.0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{uniform_linear_array, ElementKind};
    use crate::manifold::assemble_manifold;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn medium() -> Medium {
        Medium::new(5e9).unwrap()
    }

    fn ula(n: usize) -> ArrayModel {
        let m = medium();
        uniform_linear_array(
            ElementKind::HalfWave { segments: 11 },
            n,
            m.wavelength() / 4.0,
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
            &m,
        )
        .unwrap()
    }

    fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Weights {
        Weights::from(
            (0..n)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn pd_point_two_paths_agree() {
        let m = medium();
        let model = ula(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = assemble_manifold(&model, Point3::new(0.02, 0.07, 0.01)).unwrap();
        for _ in 0..20 {
            let w = random_weights(&mut rng, 4);
            let q = pd_point(&a, &w, &m).unwrap();
            let f = pd_from_field(&a, &w, &m).unwrap();
            assert_relative_eq!(q, f, max_relative = 1e-13);
        }
    }

    #[test]
    fn pd_point_zero_and_scaling() {
        let m = medium();
        let a = assemble_manifold(&ula(3), Point3::new(0.0, 0.1, 0.0)).unwrap();
        assert_eq!(
            pd_point(&a, &Weights::from(alloc::vec![C64::new(0.0, 0.0); 3]), &m).unwrap(),
            0.0
        );
        let w = Weights::from(alloc::vec![C64::new(1.0, 0.5), C64::new(-0.2, 0.1), C64::new(0.0, 1.0)]);
        let c = C64::new(2.0, -1.0);
        let base = pd_point(&a, &w, &m).unwrap();
        assert_relative_eq!(
            pd_point(&a, &w.scaled(c), &m).unwrap(),
            base * c.norm_sqr(),
            max_relative = 1e-13
        );
        assert!(pd_point(&a, &Weights::ones(2), &m).is_err());
    }

    #[test]
    fn sphere_points_lie_on_sphere() {
        let center = Point3::new(0.1, -0.2, 0.05);
        let lam = medium().wavelength();
        let region = sphere_region(center, 2.0 * lam, 50).unwrap();
        assert_eq!(region.len(), 50);
        for p in region.points() {
            assert!((p.distance(center) - 2.0 * lam).abs() <= 1e-12 * 2.0 * lam);
        }
        assert!(sphere_region(center, 0.0, 5).is_err());
        assert!(sphere_region(center, 1.0, 0).is_err());
    }

    #[test]
    fn sphere_centroid_converges() {
        for n in [10, 50, 200, 1000] {
            let region = sphere_region(Point3::ORIGIN, 1.0, n).unwrap();
            let c = region.points().iter().fold(Point3::ORIGIN, |a, p| a + *p) * (1.0 / n as f64);
            assert!(c.norm() < 1.0 / (n as f64).sqrt(), "n = {n}: {}", c.norm());
        }
    }

    #[test]
    fn single_point_region_reproduces_pd_point() {
        let m = medium();
        let model = ula(3);
        let p = Point3::new(0.03, 0.05, -0.02);
        let x = characteristic_pd_matrix(&model, &SampleRegion::custom(alloc::vec![p]).unwrap()).unwrap();
        let a = assemble_manifold(&model, p).unwrap();
        let w = Weights::from(alloc::vec![C64::new(0.3, 0.1), C64::new(1.0, 0.0), C64::new(-0.4, 0.8)]);
        assert_relative_eq!(
            x.quadratic_form(&w).unwrap(),
            pd_point(&a, &w, &m).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn x_is_mean_of_pointwise_pd_and_psd() {
        let m = medium();
        let model = ula(4);
        let region = sphere_region(Point3::ORIGIN, 2.0 * m.wavelength(), 50).unwrap();
        let x = characteristic_pd_matrix(&model, &region).unwrap();
        assert!(x.is_hermitian_psd());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let w = random_weights(&mut rng, 4);
            let mean = region
                .points()
                .iter()
                .map(|&p| pd_from_field(&assemble_manifold(&model, p).unwrap(), &w, &m).unwrap())
                .sum::<f64>()
                / region.len() as f64;
            assert_relative_eq!(x.quadratic_form(&w).unwrap(), mean, max_relative = 1e-12);
        }
    }

    #[test]
    fn duplicated_points_leave_x_unchanged() {
        let model = ula(3);
        let region = sphere_region(Point3::ORIGIN, 0.1, 12).unwrap();
        let mut doubled = region.points().to_vec();
        doubled.extend_from_slice(region.points());
        let x1 = characteristic_pd_matrix(&model, &region).unwrap();
        let x2 = characteristic_pd_matrix(&model, &SampleRegion::custom(doubled).unwrap()).unwrap();
        let diff = x1.matrix().sub(x2.matrix()).frobenius_norm();
        assert!(diff <= 1e-14 * x1.matrix().frobenius_norm());
    }

    #[test]
    fn normalization_sets_unit_peak() {
        let m = medium();
        let model = ula(4);
        let region = sphere_region(Point3::ORIGIN, m.wavelength(), 50).unwrap();
        let x = characteristic_pd_matrix(&model, &region).unwrap();
        let xn = normalize_pd_matrix(&x, 1.0).unwrap();
        let ev = xn.eigenvalues();
        assert_relative_eq!(ev[0], 1.0, max_relative = 1e-12);

        // eigenvectors are unchanged; Q = 0.5 is met by the dominant
        // eigenvector exactly at ‖w‖² = 0.5
        let e0 = hermitian_eigen(x.matrix());
        let e1 = hermitian_eigen(xn.matrix());
        let v0 = e0.vectors.column(0);
        let v1 = e1.vectors.column(0);
        let overlap = crate::linalg::dot_conj(&v0, &v1).norm();
        assert_relative_eq!(overlap, 1.0, max_relative = 1e-10);
        let w = Weights::from(v1.iter().map(|z| z * 0.5f64.sqrt()).collect::<Vec<_>>());
        assert_relative_eq!(xn.quadratic_form(&w).unwrap(), 0.5, max_relative = 1e-12);

        let x2 = normalize_pd_matrix(&x, 2.0).unwrap();
        let w2 = Weights::from(v0.iter().map(|z| z * 2f64.sqrt()).collect::<Vec<_>>());
        assert_relative_eq!(x2.quadratic_form(&w2).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn normalization_over_weights() {
        let x = PdMatrix::new(
            CMatrix::from_fn(2, 2, |i, j| {
                if i == j {
                    C64::new([4.0, 1.0][i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            RegionKind::Custom,
        )
        .unwrap();
        let steer = [Weights::from(alloc::vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)])];
        let xn = normalize_pd_matrix_by(&x, 1.0, PdNormalization::OverWeights(&steer)).unwrap();
        // (4 + 1)/2 = 2.5 per watt
        assert_relative_eq!(xn.normalization().unwrap(), 2.5, max_relative = 1e-15);
        assert!(normalize_pd_matrix(&PdMatrix::new(CMatrix::zeros(2, 2), RegionKind::Custom).unwrap(), 1.0).is_err());
    }
}
