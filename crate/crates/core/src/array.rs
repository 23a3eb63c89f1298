//! Array data model: antenna segment geometry and the effective array moment
//! matrix `M̄` (3K̄ × N), plus analytic generators for uncoupled elements.
//!
//! Row layout of `M̄` is antenna-major, segment-minor, Cartesian component
//! innermost. Column `ℓ` holds the moments of every segment in the array when
//! only antenna `ℓ` is fed with 1 A, so coupling lives off the block diagonal.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dipole::{Medium, Moment};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::linalg::CMatrix;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSegment {
    pub centroid: Point3,
    /// Segment volume in m³; carried as metadata only.
    pub volume: Option<f64>,
}

impl DipoleSegment {
    pub fn at(centroid: Point3) -> Self {
        Self { centroid, volume: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntennaGeometry {
    segments: Vec<DipoleSegment>,
    feed_index: usize,
}

impl AntennaGeometry {
    pub fn new(segments: Vec<DipoleSegment>, feed_index: usize) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("antenna needs at least one segment".into()));
        }
        if feed_index >= segments.len() {
            return Err(Error::InvalidArgument(format!(
                "feed index {feed_index} out of range for {} segments",
                segments.len()
            )));
        }
        for (k, s) in segments.iter().enumerate() {
            if !s.centroid.is_finite() {
                return Err(Error::NonFinite("segment centroid"));
            }
            if segments[..k].iter().any(|o| o.centroid == s.centroid) {
                return Err(Error::DuplicateCentroid { antenna: 0, segment: k });
            }
        }
        Ok(Self { segments, feed_index })
    }

    pub fn segments(&self) -> &[DipoleSegment] {
        &self.segments
    }

    pub fn feed_index(&self) -> usize {
        self.feed_index
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Mean of the segment centroids, used as the antenna phase center.
    pub fn phase_center(&self) -> Point3 {
        let sum = self.segments.iter().fold(Point3::ORIGIN, |acc, s| acc + s.centroid);
        sum * (1.0 / self.segments.len() as f64)
    }
}

/// One antenna together with its segment moments for a unit feed current
/// when it radiates alone.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaElement {
    pub geometry: AntennaGeometry,
    pub moments: Vec<Moment>,
    pub medium: Medium,
}

/// Complex feed-current weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights(Vec<C64>);

impl Weights {
    pub fn new(w: Vec<C64>) -> Result<Self> {
        if w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(Self(w))
        } else {
            Err(Error::NonFinite("weights"))
        }
    }

    pub fn ones(n: usize) -> Self {
        Self(alloc::vec![C64::new(1.0, 0.0); n])
    }

    pub fn unit(n: usize, index: usize) -> Self {
        let mut w = alloc::vec![C64::new(0.0, 0.0); n];
        w[index] = C64::new(1.0, 0.0);
        Self(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }

    /// Transmit power `‖w‖²`.
    pub fn power(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scaled(&self, c: C64) -> Weights {
        Weights(self.0.iter().map(|z| z * c).collect())
    }
}

impl From<Vec<C64>> for Weights {
    fn from(w: Vec<C64>) -> Self {
        Weights(w)
    }
}

/// Location of one segment in the flattened array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentRef {
    pub antenna: usize,
    pub segment: usize,
    pub centroid: Point3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayModel {
    antennas: Vec<AntennaGeometry>,
    moment_matrix: CMatrix,
    medium: Medium,
    segments: Vec<SegmentRef>,
    offsets: Vec<usize>,
}

impl ArrayModel {
    pub fn new(antennas: Vec<AntennaGeometry>, moment_matrix: CMatrix, medium: Medium) -> Result<Self> {
        if antennas.is_empty() {
            return Err(Error::InvalidArgument("array needs at least one antenna".into()));
        }
        let mut segments = Vec::new();
        let mut offsets = Vec::with_capacity(antennas.len());
        for (n, ant) in antennas.iter().enumerate() {
            offsets.push(segments.len());
            for (k, s) in ant.segments().iter().enumerate() {
                if ant.segments()[..k].iter().any(|o| o.centroid == s.centroid) {
                    return Err(Error::DuplicateCentroid { antenna: n, segment: k });
                }
                segments.push(SegmentRef {
                    antenna: n,
                    segment: k,
                    centroid: s.centroid,
                });
            }
        }
        if moment_matrix.rows() != 3 * segments.len() {
            return Err(Error::DimensionMismatch {
                what: "moment matrix rows (3 × total segments)",
                expected: 3 * segments.len(),
                actual: moment_matrix.rows(),
            });
        }
        if moment_matrix.cols() != antennas.len() {
            return Err(Error::DimensionMismatch {
                what: "moment matrix columns (antennas)",
                expected: antennas.len(),
                actual: moment_matrix.cols(),
            });
        }
        if !moment_matrix.is_finite() {
            return Err(Error::NonFinite("moment matrix"));
        }
        Ok(Self {
            antennas,
            moment_matrix,
            medium,
            segments,
            offsets,
        })
    }

    pub fn antennas(&self) -> &[AntennaGeometry] {
        &self.antennas
    }

    pub fn n_antennas(&self) -> usize {
        self.antennas.len()
    }

    /// `K̄`, the number of segments across all antennas.
    pub fn total_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn segments(&self) -> &[SegmentRef] {
        &self.segments
    }

    pub fn moment_matrix(&self) -> &CMatrix {
        &self.moment_matrix
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    /// Row range of antenna `n`'s block in `M̄`.
    pub fn block_rows(&self, n: usize) -> core::ops::Range<usize> {
        let start = 3 * self.offsets[n];
        start..start + 3 * self.antennas[n].len()
    }

    /// Moment of flattened segment `j` under unit feed of antenna `col`.
    pub fn segment_moment(&self, j: usize, col: usize) -> Moment {
        let m = &self.moment_matrix;
        Moment([m[(3 * j, col)], m[(3 * j + 1, col)], m[(3 * j + 2, col)]])
    }

    /// True when every column is zero outside its own antenna's block.
    pub fn is_uncoupled(&self) -> bool {
        (0..self.n_antennas()).all(|col| {
            let own = self.block_rows(col);
            (0..self.moment_matrix.rows())
                .filter(|r| !own.contains(r))
                .all(|r| self.moment_matrix[(r, col)] == C64::new(0.0, 0.0))
        })
    }

    pub fn phase_centers(&self) -> Vec<Point3> {
        self.antennas.iter().map(AntennaGeometry::phase_center).collect()
    }

    /// Same geometry, moment matrix multiplied by `c`.
    pub fn scaled(&self, c: C64) -> ArrayModel {
        ArrayModel {
            moment_matrix: self.moment_matrix.scale(c),
            ..self.clone()
        }
    }

    pub(crate) fn check_weights(&self, w: &Weights) -> Result<()> {
        if w.len() != self.n_antennas() {
            return Err(Error::DimensionMismatch {
                what: "weights",
                expected: self.n_antennas(),
                actual: w.len(),
            });
        }
        Ok(())
    }
}

fn unit_axis(axis: Point3) -> Result<Point3> {
    axis.normalized()
        .ok_or_else(|| Error::InvalidArgument("antenna axis must be a nonzero finite vector".into()))
}

/// Center-fed half-wave wire along `axis` with the sinusoidal current
/// `I(z) = sin(β(L/2 − |z|))`, split into `k` equal segments.
pub fn generate_half_wave_dipole(center: Point3, axis: Point3, k: usize, medium: &Medium) -> Result<AntennaElement> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "half-wave dipole needs at least 3 segments, got {k}"
        )));
    }
    if !center.is_finite() {
        return Err(Error::NonFinite("antenna center"));
    }
    let axis = unit_axis(axis)?;
    let half = medium.wavelength() / 4.0;
    let dl = 2.0 * half / k as f64;
    let beta = medium.beta();
    let mut segments = Vec::with_capacity(k);
    let mut moments = Vec::with_capacity(k);
    for i in 0..k {
        let z = -half + (i as f64 + 0.5) * dl;
        let current = (beta * (half - z.abs())).sin();
        segments.push(DipoleSegment::at(center + axis * z));
        moments.push(Moment::real(axis * (current * dl)));
    }
    Ok(AntennaElement {
        geometry: AntennaGeometry::new(segments, k / 2)?,
        moments,
        medium: *medium,
    })
}

/// Single segment with moment `1 A · λ/100` along `axis`.
pub fn generate_hertzian(center: Point3, axis: Point3, medium: &Medium) -> Result<AntennaElement> {
    if !center.is_finite() {
        return Err(Error::NonFinite("antenna center"));
    }
    let axis = unit_axis(axis)?;
    Ok(AntennaElement {
        geometry: AntennaGeometry::new(alloc::vec![DipoleSegment::at(center)], 0)?,
        moments: alloc::vec![Moment::real(axis * (medium.wavelength() / 100.0))],
        medium: *medium,
    })
}

/// Block-diagonal moment matrix from independently radiating elements.
pub fn assemble_uncoupled(elements: Vec<AntennaElement>) -> Result<ArrayModel> {
    let first = elements
        .first()
        .ok_or_else(|| Error::InvalidArgument("array needs at least one antenna".into()))?;
    let medium = first.medium;
    for (n, e) in elements.iter().enumerate() {
        if e.medium != medium {
            return Err(Error::MediumMismatch(0, n));
        }
        if e.moments.len() != e.geometry.len() {
            return Err(Error::DimensionMismatch {
                what: "moments per antenna",
                expected: e.geometry.len(),
                actual: e.moments.len(),
            });
        }
    }
    let total: usize = elements.iter().map(|e| e.geometry.len()).sum();
    let mut m = CMatrix::zeros(3 * total, elements.len());
    let mut row = 0;
    for (col, e) in elements.iter().enumerate() {
        for mom in &e.moments {
            for c in 0..3 {
                m[(row + c, col)] = mom.0[c];
            }
            row += 3;
        }
    }
    ArrayModel::new(elements.into_iter().map(|e| e.geometry).collect(), m, medium)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    /// Half-wave dipole with the given segment count.
    HalfWave {
        segments: usize,
    },
    Hertzian,
}

/// `n` identical uncoupled elements along `layout_axis`, centered on the
/// origin, all oriented along `element_axis`.
pub fn uniform_linear_array(
    kind: ElementKind,
    n: usize,
    spacing: f64,
    layout_axis: Point3,
    element_axis: Point3,
    medium: &Medium,
) -> Result<ArrayModel> {
    if n == 0 {
        return Err(Error::InvalidArgument("array needs at least one antenna".into()));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    let layout = unit_axis(layout_axis)?;
    let elements = (0..n)
        .map(|i| {
            let center = layout * ((i as f64 - (n as f64 - 1.0) / 2.0) * spacing);
            match kind {
                ElementKind::HalfWave { segments } => generate_half_wave_dipole(center, element_axis, segments, medium),
                ElementKind::Hertzian => generate_hertzian(center, element_axis, medium),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    assemble_uncoupled(elements)
}
