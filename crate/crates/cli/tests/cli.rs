//! Contract tests for the `curvlab` binary: exit codes, report artifacts,
//! environment overrides, and subcommand behavior. Grids are kept small;
//! numerical accuracy has its own suites.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_curvlab"));
    for key in ["CURVLAB_WORKERS", "CURVLAB_JSON", "CURVLAB_PROFILES_DIR", "CURVLAB_SVG_DIR"] {
        c.env_remove(key);
    }
    c
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).expect("write config");
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn curvlab")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SPHERE_SUITE: &str = r#"seed = 7
[surface]
fixture = "sphere"
m = 2
radius = 1.0
[grid]
sizes = [64, 128]
[[checks]]
kind = "poincare"
name = "sphere-poincare"
[[checks]]
kind = "mean_curvature_total"
name = "sphere-total-mean"
[[checks]]
kind = "isoperimetric"
name = "sphere-isoperimetric"
"#;

#[test]
fn sphere_equality_suite_exits_zero_with_three_equality_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sphere.toml");
    write(&cfg, SPHERE_SUITE);
    let json = dir.path().join("report.json");
    let out = run(&["run", cfg.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 3);
    for rec in records {
        assert_eq!(rec["verdict"], "EqualityCase", "record {rec}");
    }
}

#[test]
fn json_records_keep_the_documented_field_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sphere.toml");
    write(&cfg, SPHERE_SUITE);
    let json = dir.path().join("report.json");
    let out = run(&["run", cfg.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&json).unwrap();
    let fields = [
        "\"name\"",
        "\"lhs\"",
        "\"rhs\"",
        "\"slack\"",
        "\"rel_slack\"",
        "\"tolerance\"",
        "\"verdict\"",
        "\"grid\"",
        "\"params\"",
        "\"refinement_estimate\"",
    ];
    let first_record = &text[text.find("\"name\"").unwrap()..];
    let mut at = 0;
    for f in fields {
        let pos = first_record[at..].find(f).unwrap_or_else(|| panic!("{f} missing or out of order"));
        at += pos;
    }
    assert!(text.ends_with('\n'));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sphere.toml");
    write(&cfg, SPHERE_SUITE);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(run(&["run", cfg.to_str().unwrap(), "--json", a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(run(&["run", cfg.to_str().unwrap(), "--json", b.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn empty_check_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    write(&cfg, "checks = []\n\n[surface]\nfixture = \"sphere\"\nm = 2\nradius = 1.0\n");
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no checks"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    write(
        &cfg,
        "[surface]\nfixture = \"sphere\"\nm = 2\nradius = 1.0\n\n[[checks]]\nkind = \"poincare\"\nwat = 1\n",
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown field"));
}

#[test]
fn duplicate_check_names_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dup.toml");
    write(
        &cfg,
        "[surface]\nfixture = \"sphere\"\nm = 2\nradius = 1.0\n\n[[checks]]\nkind = \"poincare\"\nname = \"x\"\n\n[[checks]]\nkind = \"isoperimetric\"\nname = \"x\"\n",
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("duplicate"));
}

#[test]
fn oversized_cap_radius_is_a_config_error() {
    // a hemisphere-or-larger geodesic cap would put the diameter past the
    // ambient injectivity bound pi/sqrt(kappa)
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cap.toml");
    write(
        &cfg,
        "[surface]\nfixture = \"geodesic_sphere\"\nkappa = 1.0\ngeodesic_radius = 3.2\n\n[[checks]]\nkind = \"mean_curvature_total\"\n",
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("radius"));
}

#[test]
fn window_past_the_cut_limit_exits_two_without_a_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cut.toml");
    write(
        &cfg,
        r#"[surface]
fixture = "geodesic_sphere"
kappa = 1.0
geodesic_radius = 0.7853981633974483
[grid]
sizes = [48, 48]
[[checks]]
kind = "mean_value"
name = "too-wide"
x0 = [0.7071067811865476, 0.7071067811865476, 0.0, 0.0]
s = 0.3
t = 1.5707963267948966
"#,
    );
    let json = dir.path().join("cut.json");
    let out = run(&["run", cfg.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("pi/(2 sqrt(kappa))"));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(doc["records"].as_array().unwrap().len(), 0);
}

#[test]
fn hypothesis_negative_fixture_reports_violation_and_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("torus.toml");
    write(
        &cfg,
        "[surface]\nfixture = \"torus\"\nbig_radius = 2.0\nsmall_radius = 0.5\n[grid]\nsizes = [64, 64]\n\n[[checks]]\nkind = \"poincare\"\nname = \"torus-poincare\"\n",
    );
    let json = dir.path().join("torus.json");
    let out = run(&["run", cfg.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(doc["records"][0]["verdict"], "HypothesisViolation");
}

#[test]
fn list_fixtures_names_the_catalog() {
    let out = run(&["list-fixtures"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in ["sphere", "ellipsoid", "geodesic_sphere", "torus", "radial_graph", "convex_graph"]
    {
        assert!(text.contains(name), "missing {name}");
    }
}

const PROFILE_SUITE: &str = r#"seed = 7
[surface]
fixture = "sphere"
m = 2
radius = 1.0
[grid]
sizes = [64, 128]
[[checks]]
kind = "monotonicity_h"
name = "profile-h"
x0 = [0.0, 0.0, 1.0]
r0 = 2.0
radii = [0.5, 1.0, 1.5, 2.0]
"#;

#[test]
fn export_profile_prints_csv_with_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("profile.toml");
    write(&cfg, PROFILE_SUITE);
    let out = run(&["export-profile", cfg.to_str().unwrap(), "--check", "profile-h"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,value,refinement_estimate"));
    assert_eq!(lines.clone().count(), 4);
    for line in lines {
        assert_eq!(line.split(',').count(), 3);
        line.split(',').for_each(|tok| {
            tok.parse::<f64>().unwrap();
        });
    }
}

#[test]
fn export_profile_unknown_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("profile.toml");
    write(&cfg, PROFILE_SUITE);
    let out = run(&["export-profile", cfg.to_str().unwrap(), "--check", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no check named"));
}

#[test]
fn export_profile_without_a_profile_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("plain.toml");
    write(&cfg, SPHERE_SUITE);
    let out = run(&["export-profile", cfg.to_str().unwrap(), "--check", "sphere-poincare"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no radial profile"));
}

#[test]
fn run_writes_profile_csv_and_svg_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("profile.toml");
    let csv_dir = dir.path().join("profiles");
    let svg_dir = dir.path().join("plots");
    write(
        &cfg,
        &format!(
            "{PROFILE_SUITE}\n[output]\nprofiles_dir = {:?}\nsvg_dir = {:?}\n",
            csv_dir.to_str().unwrap(),
            svg_dir.to_str().unwrap()
        ),
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(csv_dir.join("profile-h.csv")).unwrap();
    assert!(csv.starts_with("r,value,refinement_estimate\n"));
    let svg = std::fs::read_to_string(svg_dir.join("profile-h.svg")).unwrap();
    assert!(svg.starts_with("<svg ") && svg.contains("<polyline"));
}

#[test]
fn env_variables_override_output_paths_and_flags_beat_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sphere.toml");
    write(&cfg, SPHERE_SUITE);
    let env_json = dir.path().join("env.json");
    let out = bin()
        .args(["run", cfg.to_str().unwrap()])
        .env("CURVLAB_JSON", env_json.to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(env_json.exists(), "CURVLAB_JSON ignored");

    let flag_json = dir.path().join("flag.json");
    let out = bin()
        .args(["run", cfg.to_str().unwrap(), "--json", flag_json.to_str().unwrap()])
        .env("CURVLAB_JSON", dir.path().join("loser.json").to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_json.exists());
    assert!(!dir.path().join("loser.json").exists(), "flag should beat env");

    let out = bin()
        .args(["run", cfg.to_str().unwrap()])
        .env("CURVLAB_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn refine_filters_by_check_name_and_emits_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sphere.toml");
    write(&cfg, SPHERE_SUITE);
    let out = run(&[
        "refine",
        cfg.to_str().unwrap(),
        "--levels",
        "2",
        "--check",
        "sphere-total-mean",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("check sphere-total-mean"));
    assert!(!text.contains("sphere-poincare"));
    assert_eq!(text.lines().filter(|l| l.trim_start().starts_with("grid")).count(), 3);

    let out = run(&["refine", cfg.to_str().unwrap(), "--check", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn refine_writes_slack_resolution_plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sphere.toml");
    write(&cfg, SPHERE_SUITE);
    let svg_dir = dir.path().join("plots");
    let out = bin()
        .args(["refine", cfg.to_str().unwrap(), "--levels", "1", "--check", "sphere-poincare"])
        .env("CURVLAB_SVG_DIR", svg_dir.to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(svg_dir.join("sphere-poincare-slack.svg")).unwrap();
    assert!(svg.contains("slack vs resolution"));
}

#[test]
fn chart_coordinates_can_fix_the_ball_center() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("chart.toml");
    write(
        &cfg,
        r#"[surface]
fixture = "sphere"
m = 2
radius = 1.0
[grid]
sizes = [64, 128]
[[checks]]
kind = "monotonicity_shrinker"
name = "wrong-surface"
x0_chart = [0.2, 0.4]
radii = [0.5, 1.0]
"#,
    );
    // the unit sphere is not a shrinker, so the checker must reject it
    // after resolving x0 from chart coordinates
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("shrinker"));
}

#[test]
fn missing_required_parameter_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("missing.toml");
    write(
        &cfg,
        "[surface]\nfixture = \"sphere\"\nm = 2\nradius = 1.0\n\n[[checks]]\nkind = \"mean_value\"\nx0 = [0.0, 0.0, 1.0]\ns = 0.5\n",
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing parameter t"));
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["run"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["run", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(2));
}
