//! Scenario configuration: one JSON file per run.
//!
//! Lengths (points, spacings, radii, sweep values) are in meters unless
//! `"length_unit": "wavelength"` is set. Moment-file centroids are always
//! meters. Relative moment-file paths resolve against the config's directory.

use std::fs;
use std::path::{Path, PathBuf};

use em_manifold_core::array::{uniform_linear_array, ElementKind};
use em_manifold_core::{ArrayModel, Medium, Point3, Weights, C64};
use serde::Deserialize;

use crate::error::CliError;
use crate::moment_file::load_moment_matrix;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    #[default]
    M,
    Wavelength,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Required for generated arrays; a moment file carries its own.
    pub frequency_hz: Option<f64>,
    #[serde(default)]
    pub length_unit: LengthUnit,
    pub array: ArraySource,
    pub evaluation: Option<Evaluation>,
    #[serde(default)]
    pub solver: SolverSpec,
    /// Feed weights `[[re, im], ...]`; all ones when absent.
    pub weights: Option<Vec<[f64; 2]>>,
    /// RNG seed for the `validate` suites.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ArraySource {
    Generator(GeneratorSpec),
    MomentFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    HalfWave,
    Hertzian,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub count: usize,
    pub spacing: f64,
    #[serde(default = "default_segments")]
    pub segments: usize,
    #[serde(default = "z_axis")]
    pub element_axis: [f64; 3],
    #[serde(default = "x_axis")]
    pub layout_axis: [f64; 3],
}

fn default_segments() -> usize {
    40
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn x_axis() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

fn y_axis() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Evaluation {
    Point([f64; 3]),
    Points(Vec<[f64; 3]>),
    Grid(GridSpec),
    Sphere(SphereSpec),
    Sweep(SweepSpec),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range1 {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range1 {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x: Range1,
    pub y: Range1,
    pub z: Range1,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSpec {
    #[serde(default)]
    pub center: [f64; 3],
    pub radius: f64,
    #[serde(default = "default_sphere_points")]
    pub points: usize,
}

fn default_sphere_points() -> usize {
    50
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Distance,
    Angle,
    Spacing,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// Distance sweeps: ray direction. Other sweeps: broadside direction of
    /// the focus point.
    #[serde(default = "y_axis")]
    pub direction: [f64; 3],
    /// Focus distance for angle and spacing sweeps.
    pub distance: Option<f64>,
    /// Distance sweeps: fixed focus distance (weights computed once).
    /// Angle sweeps: fixed focus angle in degrees. Absent: refocus at every
    /// sweep point.
    pub focus: Option<f64>,
    /// Adds a `gain_dbd_ff` column (weights solved on the far-field manifold).
    #[serde(default)]
    pub include_ff: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Svd,
    Mrt,
    Joint,
    Pd,
    Combined,
    Isotropic,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalize {
    /// Divide by the dominant eigenvalue (worst case over all weights).
    #[default]
    Eigen,
    /// Divide by the worst case over conjugate isotropic steering weights
    /// towards every region point.
    Steering,
    None,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub method: Method,
    #[serde(default = "one")]
    pub power_w: f64,
    /// PD limit `Q`, in units of the (optionally normalized) PD matrix.
    pub pd_limit: Option<f64>,
    pub polarization: Option<[[f64; 2]; 3]>,
    pub pd_region: Option<SphereSpec>,
    #[serde(default)]
    pub normalize: Normalize,
    #[serde(default = "one")]
    pub reference_power_w: f64,
    #[serde(default = "yes")]
    pub conjugate_isotropic: bool,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            method: Method::Svd,
            power_w: 1.0,
            pd_limit: None,
            polarization: None,
            pd_region: None,
            normalize: Normalize::Eigen,
            reference_power_w: 1.0,
            conjugate_isotropic: true,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// A parsed config plus the directory it was read from.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(Scenario {
        config: parse_config(&text)?,
        base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
    })
}

fn point(v: [f64; 3]) -> Point3 {
    Point3::from_array(v)
}

impl Scenario {
    pub fn moment_path(&self) -> Option<PathBuf> {
        match &self.config.array {
            ArraySource::MomentFile(p) if p.is_relative() => Some(self.base_dir.join(p)),
            ArraySource::MomentFile(p) => Some(p.clone()),
            ArraySource::Generator(_) => None,
        }
    }

    /// Medium of a generated array, from `frequency_hz`.
    pub fn generator_medium(&self) -> Result<Medium, CliError> {
        let f = self
            .config
            .frequency_hz
            .ok_or_else(|| CliError::Config("frequency_hz: required for generated arrays".into()))?;
        Medium::new(f).map_err(|e| CliError::Config(format!("frequency_hz: {e}")))
    }

    /// Meters per configured length unit.
    pub fn unit(&self, medium: &Medium) -> f64 {
        match self.config.length_unit {
            LengthUnit::M => 1.0,
            LengthUnit::Wavelength => medium.wavelength(),
        }
    }

    /// Builds the array. A moment file that cannot be read or validated is a
    /// [`CliError::MomentFile`].
    pub fn build_array(&self) -> Result<ArrayModel, CliError> {
        match &self.config.array {
            ArraySource::Generator(g) => {
                let medium = self.generator_medium()?;
                self.generate(g, g.spacing * self.unit(&medium), &medium)
            }
            ArraySource::MomentFile(_) => {
                let path = self.moment_path().expect("moment file source");
                let model =
                    load_moment_matrix(&path).map_err(|e| CliError::MomentFile(format!("{}: {e}", path.display())))?;
                if let Some(f) = self.config.frequency_hz {
                    if f != model.medium().frequency() {
                        return Err(CliError::Config(format!(
                            "frequency_hz: {f} differs from the moment file's {}",
                            model.medium().frequency()
                        )));
                    }
                }
                Ok(model)
            }
        }
    }

    /// Generated array with an explicit spacing in meters.
    pub fn generate(&self, g: &GeneratorSpec, spacing_m: f64, medium: &Medium) -> Result<ArrayModel, CliError> {
        let kind = match g.kind {
            GeneratorKind::HalfWave => ElementKind::HalfWave { segments: g.segments },
            GeneratorKind::Hertzian => ElementKind::Hertzian,
        };
        uniform_linear_array(
            kind,
            g.count,
            spacing_m,
            point(g.layout_axis),
            point(g.element_axis),
            medium,
        )
        .map_err(|e| CliError::Config(format!("array.generator: {e}")))
    }

    pub fn weights(&self, n: usize) -> Result<Weights, CliError> {
        match &self.config.weights {
            None => Ok(Weights::ones(n)),
            Some(w) if w.len() != n => Err(CliError::Config(format!(
                "weights: expected {n} entries (one per antenna), got {}",
                w.len()
            ))),
            Some(w) => Weights::new(w.iter().map(|&[re, im]| C64::new(re, im)).collect())
                .map_err(|e| CliError::Config(format!("weights: {e}"))),
        }
    }

    /// Evaluation points for point/points/grid/sphere specs, grid-major
    /// (x outermost, z innermost).
    pub fn points(&self, medium: &Medium) -> Result<Vec<Point3>, CliError> {
        let u = self.unit(medium);
        let scaled = |v: [f64; 3]| point(v) * u;
        match &self.config.evaluation {
            None => Err(CliError::Config("evaluation: missing".into())),
            Some(Evaluation::Point(p)) => Ok(vec![scaled(*p)]),
            Some(Evaluation::Points(ps)) if ps.is_empty() => Err(CliError::Config("evaluation.points: empty".into())),
            Some(Evaluation::Points(ps)) => Ok(ps.iter().map(|p| scaled(*p)).collect()),
            Some(Evaluation::Grid(g)) => {
                let (xs, ys, zs) = (g.x.values(), g.y.values(), g.z.values());
                if xs.is_empty() || ys.is_empty() || zs.is_empty() {
                    return Err(CliError::Config("evaluation.grid: every axis needs count ≥ 1".into()));
                }
                let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
                for &x in &xs {
                    for &y in &ys {
                        for &z in &zs {
                            out.push(Point3::new(x, y, z) * u);
                        }
                    }
                }
                Ok(out)
            }
            Some(Evaluation::Sphere(s)) => Ok(self.sphere(s, medium, "evaluation.sphere")?.points().to_vec()),
            Some(Evaluation::Sweep(_)) => Err(CliError::Config(
                "evaluation: sweeps are only valid for the pattern command".into(),
            )),
        }
    }

    pub fn sphere(
        &self,
        s: &SphereSpec,
        medium: &Medium,
        field: &str,
    ) -> Result<em_manifold_core::SampleRegion, CliError> {
        let u = self.unit(medium);
        em_manifold_core::power::sphere_region(point(s.center) * u, s.radius * u, s.points)
            .map_err(|e| CliError::Config(format!("{field}: {e}")))
    }

    /// The single focus point of a `point` evaluation.
    pub fn focus_point(&self, medium: &Medium) -> Result<Point3, CliError> {
        match &self.config.evaluation {
            Some(Evaluation::Point(p)) => Ok(point(*p) * self.unit(medium)),
            _ => Err(CliError::Config(
                "evaluation: this command needs a single `point`".into(),
            )),
        }
    }

    pub fn sweep(&self) -> Result<&SweepSpec, CliError> {
        match &self.config.evaluation {
            Some(Evaluation::Sweep(s)) => Ok(s),
            _ => Err(CliError::Config(
                "evaluation: the pattern command needs a `sweep`".into(),
            )),
        }
    }

    pub fn polarization(&self) -> Result<Option<[C64; 3]>, CliError> {
        let Some(b) = self.config.solver.polarization else {
            return Ok(None);
        };
        let b = b.map(|[re, im]| C64::new(re, im));
        let n = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(CliError::Config(
                "solver.polarization: must be a nonzero finite vector".into(),
            ));
        }
        Ok(Some(b.map(|z| z / n)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_named() {
        let err = parse_config(r#"{"frequency_hz": 5e9, "aray": {}}"#).unwrap_err();
        assert!(err.to_string().contains("aray"), "{err}");
        let err = parse_config(r#"{"frequency_hz": 5e9}"#).unwrap_err();
        assert!(err.to_string().contains("array"), "{err}");
    }

    #[test]
    fn exactly_one_array_source() {
        let both = r#"{"frequency_hz": 5e9, "array": {"generator": {"kind": "hertzian", "count": 1, "spacing": 1},
                       "moment_file": "m.json"}}"#;
        assert!(parse_config(both).is_err());
    }

    #[test]
    fn ranges() {
        let r = Range1 {
            start: 1.0,
            stop: 2.0,
            count: 3,
        };
        assert_eq!(r.values(), vec![1.0, 1.5, 2.0]);
        assert_eq!(Range1 { count: 1, ..r }.values(), vec![1.0]);
    }

    #[test]
    fn wavelength_units_scale_points() {
        let c = parse_config(
            r#"{"frequency_hz": 5e9, "length_unit": "wavelength",
                "array": {"generator": {"kind": "half_wave", "count": 4, "spacing": 0.25}},
                "evaluation": {"point": [0, 100, 0]}}"#,
        )
        .unwrap();
        let s = Scenario {
            config: c,
            base_dir: PathBuf::new(),
        };
        let m = s.generator_medium().unwrap();
        let p = s.focus_point(&m).unwrap();
        assert!((p.y - 100.0 * m.wavelength()).abs() < 1e-12);
        let model = s.build_array().unwrap();
        assert_eq!(model.n_antennas(), 4);
        assert_eq!(model.total_segments(), 160);
    }
}
