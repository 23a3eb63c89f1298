//! The `field`, `beamform`, `pattern` and `pd` commands. Each returns the
//! complete output file as a string; sweeps run on rayon and are collected
//! in input order, so output is byte-identical across runs.

use em_manifold_core::beamforming::{
    combined_constraint, isotropic_beam, joint_polarization, max_field_strength, mrt_polarized, pd_constrained,
    ActiveConstraints,
};
use em_manifold_core::linalg::CMatrix;
use em_manifold_core::manifold::{
    assemble_ff_manifold, assemble_manifold, assemble_variant, evaluate_field, isotropic_steering,
};
use em_manifold_core::metrics::gain_from_norm_sqr;
use em_manifold_core::power::{normalize_pd_matrix_by, pd_gram_at, PdNormalization, RegionKind};
use em_manifold_core::{ArrayModel, BeamSolution, Error, ManifoldVariant, Medium, PdMatrix, Point3, Weights};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::{ArraySource, Method, Normalize, Scenario, SweepAxis};
use crate::error::CliError;
use crate::format::{csv_row, json_complex, json_num, json_vec3};

pub const FIELD_HEADER: &str = "x_m,y_m,z_m,Er_re,Er_im,Eth_re,Eth_im,Eph_re,Eph_im,pd_w_m2";

/// Collects per-item results, reporting the first failure in input order.
fn in_order<T>(items: Vec<Result<T, CliError>>) -> Result<Vec<T>, CliError> {
    items.into_iter().collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

pub fn cmd_field(s: &Scenario, variant: ManifoldVariant) -> Result<String, CliError> {
    let model = s.build_array()?;
    let medium = *model.medium();
    let points = s.points(&medium)?;
    let w = s.weights(model.n_antennas())?;
    let rows = in_order(
        points
            .par_iter()
            .map(|&p| {
                let e = evaluate_field(&assemble_variant(&model, p, variant)?, &w)?;
                let pd = e.norm_sqr() / (2.0 * medium.eta0());
                let [r, t, f] = e.e;
                Ok(csv_row(&[p.x, p.y, p.z, r.re, r.im, t.re, t.im, f.re, f.im, pd]))
            })
            .collect(),
    )?;
    let mut out = String::from(FIELD_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

/// Characteristic PD matrix over `points`, always from the near-field
/// manifold unless another variant is requested.
pub fn pd_matrix(
    model: &ArrayModel,
    points: &[Point3],
    region: RegionKind,
    variant: ManifoldVariant,
) -> Result<PdMatrix, CliError> {
    let n = model.n_antennas();
    let grams = in_order(
        points
            .par_iter()
            .map(|&p| pd_gram_at(model, p, variant).map_err(CliError::from))
            .collect(),
    )?;
    let mut sum = CMatrix::zeros(n, n);
    for g in &grams {
        for i in 0..n {
            for j in 0..n {
                sum[(i, j)] += g[(i, j)];
            }
        }
    }
    Ok(PdMatrix::from_gram_sum(&sum, points.len(), model.medium(), region)?)
}

fn normalized(s: &Scenario, model: &ArrayModel, x: &PdMatrix, points: &[Point3]) -> Result<Option<PdMatrix>, CliError> {
    let p_ref = s.config.solver.reference_power_w;
    match s.config.solver.normalize {
        Normalize::None => Ok(None),
        Normalize::Eigen => Ok(Some(normalize_pd_matrix_by(
            x,
            p_ref,
            PdNormalization::DominantEigenvalue,
        )?)),
        Normalize::Steering => {
            let candidates = points
                .iter()
                .map(|&p| Ok(isotropic_steering(model, p)?.weights(true)))
                .collect::<Result<Vec<Weights>, Error>>()?;
            Ok(Some(normalize_pd_matrix_by(
                x,
                p_ref,
                PdNormalization::OverWeights(&candidates),
            )?))
        }
    }
}

/// The PD matrix used by the `pd` and `combined` solvers: sampled over
/// `solver.pd_region`, then normalized as configured.
pub fn solver_pd_matrix(s: &Scenario, model: &ArrayModel) -> Result<PdMatrix, CliError> {
    let spec = s
        .config
        .solver
        .pd_region
        .ok_or_else(|| CliError::Config("solver.pd_region: required for the pd and combined methods".into()))?;
    let region = s.sphere(&spec, model.medium(), "solver.pd_region")?;
    let x = pd_matrix(model, region.points(), region.kind(), ManifoldVariant::Near)?;
    Ok(normalized(s, model, &x, region.points())?.unwrap_or(x))
}

fn pd_limit(s: &Scenario) -> Result<f64, CliError> {
    s.config
        .solver
        .pd_limit
        .ok_or_else(|| CliError::Config("solver.pd_limit: required for the pd and combined methods".into()))
}

#[derive(Serialize)]
struct BeamOutput {
    weights: Vec<[Box<RawValue>; 2]>,
    objective: Box<RawValue>,
    gain_dbd: Box<RawValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polarization: Option<Vec<[Box<RawValue>; 2]>>,
    method: &'static str,
    constraints_active: Vec<&'static str>,
    power_w: Box<RawValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pd: Option<Box<RawValue>>,
    regularized: bool,
}

fn active_list(c: ActiveConstraints) -> Vec<&'static str> {
    let mut v = Vec::new();
    if c.power {
        v.push("power");
    }
    if c.pd {
        v.push("pd");
    }
    v
}

/// Gain of `w` at `p` through the near-field manifold; `None` where the
/// reference dipole has no field.
fn gain_at(model: &ArrayModel, w: &Weights, p: Point3) -> Result<Option<f64>, CliError> {
    let e = evaluate_field(&assemble_manifold(model, p)?, w)?;
    match gain_from_norm_sqr(e.norm_sqr(), model.medium(), p) {
        Ok(g) => Ok(Some(g.gain_dbd)),
        Err(Error::ReferenceNull) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Solves the configured beamforming problem at `p`.
pub fn solve(
    s: &Scenario,
    model: &ArrayModel,
    p: Point3,
    variant: ManifoldVariant,
) -> Result<(BeamSolution, Option<PdMatrix>), CliError> {
    let a = assemble_variant(model, p, variant)?;
    let solver = &s.config.solver;
    let power = solver.power_w;
    Ok(match solver.method {
        Method::Svd => (max_field_strength(&a, power)?, None),
        Method::Mrt => {
            let b = s
                .polarization()?
                .ok_or_else(|| CliError::Config("solver.polarization: required for method mrt".into()))?;
            (mrt_polarized(&a, &b, power)?, None)
        }
        Method::Joint => (joint_polarization(&a, power)?, None),
        Method::Pd => {
            let x = solver_pd_matrix(s, model)?;
            (pd_constrained(&a, &x, pd_limit(s)?)?, Some(x))
        }
        Method::Combined => {
            let x = solver_pd_matrix(s, model)?;
            (combined_constraint(&a, &x, pd_limit(s)?, power)?, Some(x))
        }
        Method::Isotropic => (isotropic_beam(model, &a, p, power, solver.conjugate_isotropic)?, None),
    })
}

pub fn cmd_beamform(s: &Scenario, variant: ManifoldVariant) -> Result<String, CliError> {
    let model = s.build_array()?;
    let p = s.focus_point(model.medium())?;
    let (sol, x) = solve(s, &model, p, variant)?;
    let gain = gain_at(&model, &sol.w, p)?;
    let pd = match &x {
        Some(x) => Some(json_num(x.quadratic_form(&sol.w)?)),
        None => None,
    };
    let out = BeamOutput {
        weights: sol.w.as_slice().iter().map(|&z| json_complex(z)).collect(),
        objective: json_num(sol.objective),
        gain_dbd: json_num(gain.unwrap_or(f64::NAN)),
        polarization: sol.polarization.map(|b| b.iter().map(|&z| json_complex(z)).collect()),
        method: sol.method.as_str(),
        constraints_active: active_list(sol.constraints_active),
        power_w: json_num(sol.w.power()),
        pd,
        regularized: sol.regularized,
    };
    Ok(to_json(&out))
}

fn unit_direction(v: [f64; 3], field: &str) -> Result<Point3, CliError> {
    Point3::from_array(v)
        .normalized()
        .ok_or_else(|| CliError::Config(format!("{field}: must be a nonzero vector")))
}

/// `direction` rotated by `deg` degrees about z, clockwise seen from +z
/// (broadside +y turns toward +x).
fn rotate_z(d: Point3, deg: f64) -> Point3 {
    let (s, c) = deg.to_radians().sin_cos();
    Point3::new(d.x * c + d.y * s, -d.x * s + d.y * c, d.z)
}

/// SVD, isotropic and optionally far-field-solved weights focused at `focus`.
struct FocusedWeights {
    svd: Weights,
    iso: Weights,
    ff: Option<Weights>,
}

fn focus(s: &Scenario, model: &ArrayModel, p: Point3, include_ff: bool) -> Result<FocusedWeights, CliError> {
    let power = s.config.solver.power_w;
    let a = assemble_manifold(model, p)?;
    Ok(FocusedWeights {
        svd: max_field_strength(&a, power)?.w,
        iso: isotropic_beam(model, &a, p, power, s.config.solver.conjugate_isotropic)?.w,
        ff: if include_ff {
            Some(max_field_strength(&assemble_ff_manifold(model, p)?, power)?.w)
        } else {
            None
        },
    })
}

fn pattern_row(axis_value: f64, model: &ArrayModel, fw: &FocusedWeights, p: Point3) -> Result<String, CliError> {
    let nan = f64::NAN;
    let mut vals = vec![
        axis_value,
        gain_at(model, &fw.svd, p)?.unwrap_or(nan),
        gain_at(model, &fw.iso, p)?.unwrap_or(nan),
    ];
    if let Some(w) = &fw.ff {
        vals.push(gain_at(model, w, p)?.unwrap_or(nan));
    }
    Ok(csv_row(&vals))
}

pub fn cmd_pattern(s: &Scenario, variant: ManifoldVariant) -> Result<String, CliError> {
    let sweep = *s.sweep()?;
    if sweep.count == 0 {
        return Err(CliError::Config("evaluation.sweep.count: must be at least 1".into()));
    }
    let include_ff = sweep.include_ff || variant == ManifoldVariant::Far;
    let values = crate::config::Range1 {
        start: sweep.start,
        stop: sweep.stop,
        count: sweep.count,
    }
    .values();
    let dir = unit_direction(sweep.direction, "evaluation.sweep.direction")?;
    let distance = || {
        sweep
            .distance
            .ok_or_else(|| CliError::Config("evaluation.sweep.distance: required for angle and spacing sweeps".into()))
    };

    let rows: Vec<Result<String, CliError>> = match sweep.axis {
        SweepAxis::Distance => {
            let model = s.build_array()?;
            let u = s.unit(model.medium());
            let fixed = match sweep.focus {
                Some(f) => Some(focus(s, &model, dir * (f * u), include_ff)?),
                None => None,
            };
            values
                .par_iter()
                .map(|&d| {
                    let p = dir * (d * u);
                    match &fixed {
                        Some(fw) => pattern_row(d, &model, fw, p),
                        None => pattern_row(d, &model, &focus(s, &model, p, include_ff)?, p),
                    }
                })
                .collect()
        }
        SweepAxis::Angle => {
            let model = s.build_array()?;
            let r = distance()? * s.unit(model.medium());
            let fixed = match sweep.focus {
                Some(a) => Some(focus(s, &model, rotate_z(dir, a) * r, include_ff)?),
                None => None,
            };
            values
                .par_iter()
                .map(|&a| {
                    let p = rotate_z(dir, a) * r;
                    match &fixed {
                        Some(fw) => pattern_row(a, &model, fw, p),
                        None => pattern_row(a, &model, &focus(s, &model, p, include_ff)?, p),
                    }
                })
                .collect()
        }
        SweepAxis::Spacing => {
            let ArraySource::Generator(g) = &s.config.array else {
                return Err(CliError::Config(
                    "evaluation.sweep: spacing sweeps need a generated array".into(),
                ));
            };
            let medium = s.generator_medium()?;
            let u = s.unit(&medium);
            let p = dir * (distance()? * u);
            values
                .par_iter()
                .map(|&sp| {
                    let model = s.generate(g, sp * u, &medium)?;
                    pattern_row(sp, &model, &focus(s, &model, p, include_ff)?, p)
                })
                .collect()
        }
    };
    let mut out = String::from("axis_value,gain_dbd_svd,gain_dbd_isotropic");
    if include_ff {
        out.push_str(",gain_dbd_ff");
    }
    out.push('\n');
    for r in in_order(rows)? {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize)]
struct PdSample {
    point_m: [Box<RawValue>; 3],
    pd_w_m2: Box<RawValue>,
    pd_normalized: Box<RawValue>,
}

#[derive(Serialize)]
struct PdOutput {
    n_antennas: usize,
    n_points: usize,
    /// `X` in W/m² per unit weight; `wᴴXw` is the mean PD over the points.
    matrix: Vec<Vec<[Box<RawValue>; 2]>>,
    eigenvalues: Vec<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalized_matrix: Option<Vec<Vec<[Box<RawValue>; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalization_divisor: Option<Box<RawValue>>,
    mean_pd_w_m2: Box<RawValue>,
    max_pd_w_m2: Box<RawValue>,
    samples: Vec<PdSample>,
}

fn matrix_json(m: &CMatrix) -> Vec<Vec<[Box<RawValue>; 2]>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&z| json_complex(z)).collect())
        .collect()
}

pub fn cmd_pd(s: &Scenario, variant: ManifoldVariant) -> Result<String, CliError> {
    let model = s.build_array()?;
    let medium: Medium = *model.medium();
    let points = s.points(&medium)?;
    let w = s.weights(model.n_antennas())?;
    let region = match &s.config.evaluation {
        Some(crate::config::Evaluation::Sphere(sp)) => s.sphere(sp, &medium, "evaluation.sphere")?.kind(),
        _ => RegionKind::Custom,
    };
    let x = pd_matrix(&model, &points, region, variant)?;
    let xn = normalized(s, &model, &x, &points)?;
    let pds = in_order(
        points
            .par_iter()
            .map(|&p| {
                let e = evaluate_field(&assemble_variant(&model, p, variant)?, &w)?;
                Ok(e.norm_sqr() / (2.0 * medium.eta0()))
            })
            .collect(),
    )?;
    let max = pds.iter().copied().fold(0.0f64, f64::max);
    let out = PdOutput {
        n_antennas: model.n_antennas(),
        n_points: points.len(),
        matrix: matrix_json(x.matrix()),
        eigenvalues: x.eigenvalues().into_iter().map(json_num).collect(),
        normalized_matrix: xn.as_ref().map(|m| matrix_json(m.matrix())),
        normalization_divisor: xn.as_ref().and_then(|m| m.normalization()).map(json_num),
        mean_pd_w_m2: json_num(x.quadratic_form(&w)?),
        max_pd_w_m2: json_num(max),
        samples: points
            .iter()
            .zip(&pds)
            .map(|(p, &pd)| PdSample {
                point_m: json_vec3(p.to_array()),
                pd_w_m2: json_num(pd),
                pd_normalized: json_num(if max > 0.0 { pd / max } else { f64::NAN }),
            })
            .collect(),
    };
    Ok(to_json(&out))
}
