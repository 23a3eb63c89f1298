use em_manifold::moment_file::{load_moment_matrix, parse_moment_matrix, save_moment_matrix, to_json, MomentFileError};
use em_manifold_core::array::{assemble_uncoupled, generate_half_wave_dipole, uniform_linear_array, ElementKind};
use em_manifold_core::linalg::CMatrix;
use em_manifold_core::{ArrayModel, Medium, Point3, C64};

fn medium() -> Medium {
    Medium::new(5e9).unwrap()
}

/// Coupled-looking array: a half-wave ULA with every moment perturbed by an
/// irrational-ish complex factor so the round trip sees non-trivial bits.
fn coupled_model() -> ArrayModel {
    let m = medium();
    let lam = m.wavelength();
    let base = uniform_linear_array(
        ElementKind::HalfWave { segments: 6 },
        3,
        0.25 * lam,
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        &m,
    )
    .unwrap();
    let mm = base.moment_matrix();
    let coupled = CMatrix::from_fn(mm.rows(), mm.cols(), |i, j| {
        let z = mm[(i, j)];
        let leak = C64::new(1e-4 * (i as f64 + 0.1).sqrt(), -3e-5 * (j as f64 + 0.7).ln());
        z * C64::new(1.0, 1.0 / 3.0) + leak
    });
    ArrayModel::new(base.antennas().to_vec(), coupled, m).unwrap()
}

#[test]
fn save_then_load_is_bit_exact() {
    let model = coupled_model();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    save_moment_matrix(&path, &model).unwrap();
    let back = load_moment_matrix(&path).unwrap();

    let (a, b) = (model.moment_matrix(), back.moment_matrix());
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
    for (ga, gb) in model.antennas().iter().zip(back.antennas()) {
        assert_eq!(ga, gb);
    }
    assert_eq!(
        model.medium().frequency().to_bits(),
        back.medium().frequency().to_bits()
    );
    assert_eq!(to_json(&model), to_json(&back));
}

#[test]
fn missing_row_names_expected_count() {
    let model = coupled_model();
    let k = model.total_segments();
    let mut v: serde_json::Value = serde_json::from_str(&to_json(&model)).unwrap();
    v["moment_matrix"].as_array_mut().unwrap().pop();
    let err = parse_moment_matrix(&v.to_string()).unwrap_err();
    match &err {
        MomentFileError::RowCount { expected, actual, .. } => {
            assert_eq!(*expected, 3 * k);
            assert_eq!(*actual, 3 * k - 1);
        }
        other => panic!("unexpected error {other}"),
    }
    assert!(err.to_string().contains(&(3 * k).to_string()));
}

#[test]
fn bad_entry_reports_location() {
    let model = coupled_model();
    let mut v: serde_json::Value = serde_json::from_str(&to_json(&model)).unwrap();
    v["moment_matrix"][7][2] = serde_json::json!([1.0]);
    let err = parse_moment_matrix(&v.to_string()).unwrap_err();
    assert!(matches!(err, MomentFileError::Entry { row: 7, col: 2, .. }), "{err}");

    let mut v: serde_json::Value = serde_json::from_str(&to_json(&model)).unwrap();
    v["moment_matrix"][4][0] = serde_json::json!(["x", 0.0]);
    let err = parse_moment_matrix(&v.to_string()).unwrap_err();
    assert!(matches!(err, MomentFileError::Entry { row: 4, col: 0, .. }), "{err}");

    let mut v: serde_json::Value = serde_json::from_str(&to_json(&model)).unwrap();
    v["moment_matrix"][1]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!([0.0, 0.0]));
    let err = parse_moment_matrix(&v.to_string()).unwrap_err();
    assert!(
        matches!(
            err,
            MomentFileError::RowLength {
                row: 1,
                expected: 3,
                actual: 4
            }
        ),
        "{err}"
    );
}

#[test]
fn structural_errors() {
    let err = parse_moment_matrix("{").unwrap_err();
    assert!(matches!(err, MomentFileError::Json(_)));

    let unknown = r#"{"frequency_hz": 5e9, "antennas": [], "moment_matrix": [], "extra": 1}"#;
    assert!(matches!(
        parse_moment_matrix(unknown).unwrap_err(),
        MomentFileError::Json(_)
    ));

    let dup = r#"{"frequency_hz": 5e9,
        "antennas": [{"segments": [{"centroid_m": [0,0,0]}, {"centroid_m": [0,0,0]}]}],
        "moment_matrix": [[[1,0]],[[0,0]],[[0,0]],[[1,0]],[[0,0]],[[0,0]]]}"#;
    assert!(matches!(
        parse_moment_matrix(dup).unwrap_err(),
        MomentFileError::Segment {
            antenna: 0,
            segment: 1,
            ..
        }
    ));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.json");
    let err = load_moment_matrix(&missing).unwrap_err();
    assert!(matches!(err, MomentFileError::Io { .. }));
    assert!(err.to_string().contains("absent.json"));
}

#[test]
fn ingested_uncoupled_file_matches_generator() {
    let m = medium();
    let lam = m.wavelength();
    let elements = (0..4)
        .map(|i| {
            generate_half_wave_dipole(
                Point3::new(i as f64 * 0.5 * lam, 0.0, 0.0),
                Point3::new(0.0, 0.0, 1.0),
                40,
                &m,
            )
            .unwrap()
        })
        .collect::<Vec<_>>();
    let generated = assemble_uncoupled(elements).unwrap();
    let ingested = parse_moment_matrix(&to_json(&generated)).unwrap();
    assert!(ingested.is_uncoupled());
    assert_eq!(ingested.moment_matrix(), generated.moment_matrix());
    assert_eq!(ingested.antennas(), generated.antennas());
}
