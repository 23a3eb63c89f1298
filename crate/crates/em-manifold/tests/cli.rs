use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use em_manifold_core::array::{generate_hertzian, uniform_linear_array, ElementKind};
use em_manifold_core::dipole::{dipole_field, OutputFrame};
use em_manifold_core::{Medium, Point3};
use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_em-manifold");

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(cmd: &str, config: &Path, extra: &[&str]) -> Output {
    Command::new(BIN)
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .args(extra)
        .output()
        .unwrap()
}

fn ok_stdout(out: &Output) -> String {
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

const HERTZIAN_POINT: &str = r#"{
  "frequency_hz": 5e9,
  "array": { "generator": { "kind": "hertzian", "count": 1, "spacing": 1 } },
  "evaluation": { "point": [0.1, 0.2, 0.3] }
}"#;

const ULA4: &str = r#"{
  "frequency_hz": 5e9,
  "length_unit": "wavelength",
  "array": { "generator": { "kind": "half_wave", "count": 4, "spacing": 0.25 } },
  "evaluation": { "point": [0.7, 6, 0.4] }
}"#;

fn ula4_with_solver(solver: &str) -> String {
    ULA4.replace("\"evaluation\"", &format!("\"solver\": {solver},\n  \"evaluation\""))
}

#[test]
fn single_hertzian_field_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "c.json", HERTZIAN_POINT);
    let text = ok_stdout(&run("field", &cfg, &[]));
    let (header, rows) = csv(&text);
    assert_eq!(header.join(","), em_manifold::commands::FIELD_HEADER);
    assert_eq!(rows.len(), 1);

    let m = Medium::new(5e9).unwrap();
    let el = generate_hertzian(Point3::ORIGIN, Point3::new(0.0, 0.0, 1.0), &m).unwrap();
    let p = Point3::new(0.1, 0.2, 0.3);
    let e = dipole_field(&el.moments[0], Point3::ORIGIN, p, &m, OutputFrame::GlobalSpherical).unwrap();
    let row = &rows[0];
    assert_eq!(&row[..3], &[0.1, 0.2, 0.3]);
    for (k, z) in e.e.iter().enumerate() {
        assert!((row[3 + 2 * k] - z.re).abs() <= 1e-12 * e.norm());
        assert!((row[4 + 2 * k] - z.im).abs() <= 1e-12 * e.norm());
    }
    let pd = e.norm_sqr() / (2.0 * m.eta0());
    assert!((row[9] - pd).abs() <= 1e-12 * pd);
}

#[test]
fn far_field_variant_has_zero_radial_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{
          "frequency_hz": 5e9, "length_unit": "wavelength",
          "array": { "generator": { "kind": "half_wave", "count": 3, "spacing": 0.5 } },
          "evaluation": { "grid": { "x": {"start": -2, "stop": 2, "count": 3},
                                    "y": {"start": 3, "stop": 4, "count": 2},
                                    "z": {"start": -1, "stop": 1, "count": 2} } }
        }"#,
    );
    let text = ok_stdout(&run("field", &cfg, &["--variant", "ff"]));
    let (_, rows) = csv(&text);
    assert_eq!(rows.len(), 12);
    for r in &rows {
        assert_eq!(r[3], 0.0);
        assert_eq!(r[4], 0.0);
        assert!(r[9] > 0.0);
    }
    // grid-major: x outermost, z innermost
    let lam = Medium::new(5e9).unwrap().wavelength();
    assert!((rows[0][0] + 2.0 * lam).abs() < 1e-15 && (rows[1][2] - lam).abs() < 1e-15);
    assert!((rows[2][1] - 4.0 * lam).abs() < 1e-15);
}

#[test]
fn every_command_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, String, Vec<&str>)> = vec![
        ("field", ULA4.to_string(), vec![]),
        ("field", ULA4.to_string(), vec!["--variant", "isotropic"]),
        ("beamform", ula4_with_solver(r#"{"method": "svd"}"#), vec![]),
        (
            "beamform",
            ula4_with_solver(r#"{"method": "combined", "pd_limit": 0.3, "pd_region": {"radius": 2}}"#),
            vec![],
        ),
        (
            "pattern",
            fs::read_to_string(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/../../scenarios/ula16_distance_sweep.json"
            ))
            .unwrap(),
            vec![],
        ),
        (
            "pd",
            ULA4.replace(r#""point": [0.7, 6, 0.4]"#, r#""sphere": {"radius": 2}"#),
            vec![],
        ),
        ("validate", ULA4.to_string(), vec![]),
    ];
    for (i, (cmd, body, extra)) in cases.iter().enumerate() {
        let cfg = write_config(&dir, &format!("c{i}.json"), body);
        let a = ok_stdout(&run(cmd, &cfg, extra));
        let b = ok_stdout(&run(cmd, &cfg, extra));
        assert!(!a.is_empty());
        assert_eq!(a, b, "{cmd} output differs between runs");

        let out = dir.path().join(format!("o{i}"));
        let mut args = extra.clone();
        args.extend(["--out", out.to_str().unwrap()]);
        let c = run(cmd, &cfg, &args);
        assert!(ok_stdout(&c).is_empty());
        assert_eq!(fs::read_to_string(&out).unwrap(), a);
    }
}

#[test]
fn config_errors_exit_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            ULA4.replace("\"evaluation\"", "\"bogus_key\": 1, \"evaluation\""),
            "bogus_key",
        ),
        (ULA4.replace(r#""count": 4, "#, ""), "count"),
        (ULA4.replace("\"frequency_hz\": 5e9,", ""), "frequency_hz"),
        (ula4_with_solver(r#"{"method": "mrt"}"#), "solver.polarization"),
        (
            ula4_with_solver(r#"{"method": "pd", "pd_region": {"radius": 2}}"#),
            "pd_limit",
        ),
        (
            r#"{"frequency_hz": 5e9, "array": {"moment_file": "nope.json"}, "evaluation": {"point": [1,1,1]}}"#
                .to_string(),
            "nope.json",
        ),
    ];
    for (i, (body, field)) in cases.iter().enumerate() {
        let cfg = write_config(&dir, &format!("c{i}.json"), body);
        let cmd = if body.contains("solver") { "beamform" } else { "field" };
        let out = run(cmd, &cfg, &[]);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(2), "case {i}: {err}");
        assert!(err.contains(field), "case {i}: {err}");
        assert!(out.stdout.is_empty());
    }
    let missing = dir.path().join("absent.json");
    assert_eq!(run("field", &missing, &[]).status.code(), Some(2));
}

#[test]
fn singular_point_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "c.json", &HERTZIAN_POINT.replace("[0.1, 0.2, 0.3]", "[0, 0, 0]"));
    let out = run("field", &cfg, &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
}

#[test]
fn infeasible_problems_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    // the far-field manifold has no radial row
    let cfg = write_config(
        &dir,
        "c.json",
        &ula4_with_solver(r#"{"method": "mrt", "polarization": [[1,0],[0,0],[0,0]]}"#),
    );
    let out = run("beamform", &cfg, &["--variant", "ff"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));

    // a z-dipole has no field along its axis in the far zone
    let cfg = write_config(&dir, "d.json", &HERTZIAN_POINT.replace("[0.1, 0.2, 0.3]", "[0, 0, 50]"));
    let out = run("beamform", &cfg, &["--variant", "ff"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

fn beam(dir: &TempDir, name: &str, solver: &str, extra: &[&str]) -> Value {
    let cfg = write_config(dir, name, &ula4_with_solver(solver));
    serde_json::from_str(&ok_stdout(&run("beamform", &cfg, extra))).unwrap()
}

#[test]
fn beamform_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let svd = beam(&dir, "svd.json", r#"{"method": "svd", "power_w": 2.5}"#, &[]);
    let joint = beam(&dir, "joint.json", r#"{"method": "joint", "power_w": 2.5}"#, &[]);
    let iso = beam(&dir, "iso.json", r#"{"method": "isotropic", "power_w": 2.5}"#, &[]);

    let (o_svd, o_joint, o_iso) = (num(&svd["objective"]), num(&joint["objective"]), num(&iso["objective"]));
    assert!((o_svd - o_joint).abs() <= 1e-10 * o_svd, "{o_svd} vs {o_joint}");
    assert!(o_iso <= o_svd * (1.0 + 1e-12));
    assert!(num(&iso["gain_dbd"]) <= num(&svd["gain_dbd"]) + 1e-9);

    for v in [&svd, &joint, &iso] {
        let w = v["weights"].as_array().unwrap();
        assert_eq!(w.len(), 4);
        let p: f64 = w.iter().map(|z| num(&z[0]).powi(2) + num(&z[1]).powi(2)).sum();
        assert!((p - 2.5).abs() <= 1e-10, "{p}");
        assert!((num(&v["power_w"]) - 2.5).abs() <= 1e-10);
    }
    assert_eq!(svd["method"], "svd");
    assert_eq!(joint["method"], "joint");
    assert!(svd.get("polarization").is_none());
    assert_eq!(joint["polarization"].as_array().unwrap().len(), 3);
    assert_eq!(svd["constraints_active"], serde_json::json!(["power"]));

    let pd = beam(
        &dir,
        "pd.json",
        r#"{"method": "pd", "pd_limit": 0.5, "pd_region": {"radius": 1}}"#,
        &[],
    );
    assert!((num(&pd["pd"]) - 0.5).abs() <= 1e-10 * 0.5);
    assert_eq!(pd["constraints_active"], serde_json::json!(["pd"]));
}

#[test]
fn distance_sweep_peaks_near_focus() {
    let cfg = Path::new(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/ula16_distance_sweep.json"
    ));
    let (header, rows) = csv(&ok_stdout(&run("pattern", cfg, &[])));
    assert_eq!(
        header,
        ["axis_value", "gain_dbd_svd", "gain_dbd_isotropic", "gain_dbd_ff"]
    );
    assert_eq!(rows.len(), 39);
    for col in 1..=2 {
        let best = rows.iter().max_by(|a, b| a[col].partial_cmp(&b[col]).unwrap()).unwrap();
        assert!((3.5..=6.5).contains(&best[0]), "column {col} peaks at {}", best[0]);
    }
}

#[test]
fn angle_sweep_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{
          "frequency_hz": 5e9, "length_unit": "wavelength",
          "array": { "generator": { "kind": "half_wave", "count": 6, "spacing": 0.5 } },
          "evaluation": { "sweep": { "axis": "angle", "start": -60, "stop": 60, "count": 13, "distance": 8, "focus": 0 } }
        }"#,
    );
    let (_, rows) = csv(&ok_stdout(&run("pattern", &cfg, &[])));
    assert_eq!(rows.len(), 13);
    for i in 0..6 {
        let (a, b) = (&rows[i], &rows[12 - i]);
        assert_eq!(a[0], -b[0]);
        for c in 1..=2 {
            assert!((a[c] - b[c]).abs() < 1e-9, "angle {}: {} vs {}", b[0], a[c], b[c]);
        }
    }
    // fixed broadside focus: broadside is the best angle
    assert!(rows.iter().all(|r| r[1] <= rows[6][1] + 1e-12));
}

#[test]
fn spacing_sweep_on_uncoupled_arrays() {
    // Uncoupled generators carry no coupling, so the svd-isotropic gap only
    // reflects the element-pattern variation across the aperture. It stays
    // small and vanishes as the focus recedes.
    let dir = tempfile::tempdir().unwrap();
    let body = |distance: f64| {
        format!(
            r#"{{
              "frequency_hz": 5e9, "length_unit": "wavelength",
              "array": {{ "generator": {{ "kind": "half_wave", "count": 4, "spacing": 0.25 }} }},
              "evaluation": {{ "sweep": {{ "axis": "spacing", "start": 0.25, "stop": 4, "count": 2, "distance": {distance} }} }}
            }}"#
        )
    };
    let gaps = |distance: f64| -> Vec<(f64, f64)> {
        let cfg = write_config(&dir, &format!("s{distance}.json"), &body(distance));
        let (_, rows) = csv(&ok_stdout(&run("pattern", &cfg, &[])));
        rows.iter().map(|r| (r[0], r[1] - r[2])).collect()
    };
    let near = gaps(5.0);
    let far = gaps(20.0);
    assert_eq!(near[0].0, 0.25);
    assert_eq!(near[1].0, 4.0);
    for &(_, g) in near.iter().chain(&far) {
        assert!(g >= -1e-9, "isotropic beat svd by {g} dB");
    }
    for &(_, g) in &far {
        assert!(g < 1e-2, "gap {g} dB at 20 wavelengths");
    }
    for &(_, g) in &near {
        assert!(g < 0.25, "gap {g} dB at 5 wavelengths");
    }
    assert!(far[1].1 < near[1].1);
}

#[test]
fn validate_default_array_passes_with_slope() {
    let cfg = Path::new(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/ula4_quarter_validate.json"
    ));
    let report: Value = serde_json::from_str(&ok_stdout(&run("validate", cfg, &[]))).unwrap();
    assert_eq!(report["passed"], true);
    let suites = report["suites"].as_array().unwrap();
    let names: Vec<&str> = suites.iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        [
            "oracle",
            "convergence",
            "pd_tightness",
            "isolated_reduction",
            "pd_consistency"
        ]
    );
    let conv = &suites[1];
    let slope = num(&conv["slope"]);
    assert!((-1.3..=-0.7).contains(&slope), "{slope}");
    assert_eq!(conv["samples"].as_array().unwrap().len(), 3);
}

#[test]
fn validate_hertzian_array_runs_isolated_suite() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{"frequency_hz": 5e9, "length_unit": "wavelength",
            "array": {"generator": {"kind": "hertzian", "count": 5, "spacing": 0.5}}, "seed": 3}"#,
    );
    let report: Value = serde_json::from_str(&ok_stdout(&run("validate", &cfg, &[]))).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["suites"][3]["status"], "pass");
}

#[test]
fn corrupted_moment_file_fails_oracle_suite() {
    let dir = tempfile::tempdir().unwrap();
    let m = Medium::new(5e9).unwrap();
    let model = uniform_linear_array(
        ElementKind::HalfWave { segments: 8 },
        2,
        0.25 * m.wavelength(),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        &m,
    )
    .unwrap();
    let good = dir.path().join("good.json");
    em_manifold::moment_file::save_moment_matrix(&good, &model).unwrap();
    let cfg_body = |file: &str| format!(r#"{{"array": {{"moment_file": "{file}"}}}}"#);

    let cfg = write_config(&dir, "ok.json", &cfg_body("good.json"));
    let report: Value = serde_json::from_str(&ok_stdout(&run("validate", &cfg, &[]))).unwrap();
    assert_eq!(report["passed"], true);

    let mut v: Value = serde_json::from_str(&fs::read_to_string(&good).unwrap()).unwrap();
    v["moment_matrix"].as_array_mut().unwrap().pop();
    fs::write(dir.path().join("bad.json"), v.to_string()).unwrap();
    let cfg = write_config(&dir, "bad_cfg.json", &cfg_body("bad.json"));
    let out = run("validate", &cfg, &[]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["suites"][0]["name"], "oracle");
    assert_eq!(report["suites"][0]["status"], "fail");
    assert!(report["suites"][0]["detail"].as_str().unwrap().contains("48"));

    // the same file is a plain input error for the other commands
    let cfg = write_config(
        &dir,
        "bad_field.json",
        r#"{"array": {"moment_file": "bad.json"}, "evaluation": {"point": [1, 1, 1]}}"#,
    );
    assert_eq!(run("field", &cfg, &[]).status.code(), Some(2));
}
