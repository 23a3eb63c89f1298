//! JSON moment-matrix files.
//!
//! ```json
//! { "frequency_hz": 5e9,
//!   "antennas": [ { "segments": [ { "centroid_m": [0, 0, -0.01] } ] } ],
//!   "moment_matrix": [ [ [re, im], ... ], ... ] }
//! ```
//!
//! Rows run antenna-major, segment-minor, with the x, y, z components
//! innermost; one column per antenna. Floats are written in shortest
//! round-trip form, so save followed by load is bit-exact.

use std::fs;
use std::path::Path;

use em_manifold_core::linalg::CMatrix;
use em_manifold_core::{AntennaGeometry, ArrayModel, DipoleSegment, Medium, Point3, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum MomentFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed moment file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("moment matrix has {actual} rows, expected {expected} (3 × {segments} segments)")]
    RowCount {
        expected: usize,
        actual: usize,
        segments: usize,
    },
    #[error("moment matrix row {row} has {actual} entries, expected {expected} (one per antenna)")]
    RowLength { row: usize, expected: usize, actual: usize },
    #[error("moment matrix entry at row {row}, column {col}: {reason}")]
    Entry { row: usize, col: usize, reason: String },
    #[error("antenna {antenna}, segment {segment}: {reason}")]
    Segment {
        antenna: usize,
        segment: usize,
        reason: String,
    },
    #[error("invalid moment file: {0}")]
    Model(#[from] em_manifold_core::Error),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    centroid_m: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    volume_m3: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAntenna {
    segments: Vec<RawSegment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feed_index: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    frequency_hz: f64,
    antennas: Vec<RawAntenna>,
    moment_matrix: Vec<Vec<Value>>,
}

#[derive(Serialize)]
struct OutFile<'a> {
    frequency_hz: f64,
    antennas: &'a [RawAntenna],
    moment_matrix: Vec<Vec<[f64; 2]>>,
}

fn entry(v: &Value, row: usize, col: usize) -> Result<C64, MomentFileError> {
    let err = |reason: &str| MomentFileError::Entry {
        row,
        col,
        reason: reason.to_string(),
    };
    let pair = v.as_array().ok_or_else(|| err("expected [re, im]"))?;
    if pair.len() != 2 {
        return Err(err("expected exactly two numbers [re, im]"));
    }
    let re = pair[0].as_f64().ok_or_else(|| err("real part is not a number"))?;
    let im = pair[1].as_f64().ok_or_else(|| err("imaginary part is not a number"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(err("non-finite value"));
    }
    Ok(C64::new(re, im))
}

pub fn parse_moment_matrix(text: &str) -> Result<ArrayModel, MomentFileError> {
    let raw: RawFile = serde_json::from_str(text)?;
    let medium = Medium::new(raw.frequency_hz)?;

    let mut antennas = Vec::with_capacity(raw.antennas.len());
    for (n, ant) in raw.antennas.iter().enumerate() {
        let mut segments = Vec::with_capacity(ant.segments.len());
        for (k, s) in ant.segments.iter().enumerate() {
            let c = Point3::from_array(s.centroid_m);
            if !c.is_finite() {
                return Err(MomentFileError::Segment {
                    antenna: n,
                    segment: k,
                    reason: "non-finite centroid".into(),
                });
            }
            if segments.iter().any(|o: &DipoleSegment| o.centroid == c) {
                return Err(MomentFileError::Segment {
                    antenna: n,
                    segment: k,
                    reason: "duplicate centroid".into(),
                });
            }
            segments.push(DipoleSegment {
                centroid: c,
                volume: s.volume_m3,
            });
        }
        let feed = ant.feed_index.unwrap_or(segments.len() / 2);
        antennas.push(AntennaGeometry::new(segments, feed)?);
    }

    let n_seg: usize = antennas.iter().map(|a| a.len()).sum();
    let rows = raw.moment_matrix.len();
    if rows != 3 * n_seg {
        return Err(MomentFileError::RowCount {
            expected: 3 * n_seg,
            actual: rows,
            segments: n_seg,
        });
    }
    let cols = antennas.len();
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in raw.moment_matrix.iter().enumerate() {
        if row.len() != cols {
            return Err(MomentFileError::RowLength {
                row: i,
                expected: cols,
                actual: row.len(),
            });
        }
        for (j, v) in row.iter().enumerate() {
            data.push(entry(v, i, j)?);
        }
    }
    let m = CMatrix::from_row_major(rows, cols, data).expect("row lengths checked");
    Ok(ArrayModel::new(antennas, m, medium)?)
}

pub fn load_moment_matrix(path: &Path) -> Result<ArrayModel, MomentFileError> {
    let text = fs::read_to_string(path).map_err(|source| MomentFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_moment_matrix(&text)
}

pub fn to_json(model: &ArrayModel) -> String {
    let antennas: Vec<RawAntenna> = model
        .antennas()
        .iter()
        .map(|a| RawAntenna {
            segments: a
                .segments()
                .iter()
                .map(|s| RawSegment {
                    centroid_m: s.centroid.to_array(),
                    volume_m3: s.volume,
                })
                .collect(),
            feed_index: (a.feed_index() != a.len() / 2).then_some(a.feed_index()),
        })
        .collect();
    let m = model.moment_matrix();
    let out = OutFile {
        frequency_hz: model.medium().frequency(),
        antennas: &antennas,
        moment_matrix: (0..m.rows())
            .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&out).expect("finite values serialize");
    s.push('\n');
    s
}

pub fn save_moment_matrix(path: &Path, model: &ArrayModel) -> Result<(), MomentFileError> {
    fs::write(path, to_json(model)).map_err(|source| MomentFileError::Io {
        path: path.display().to_string(),
        source,
    })
}
