//! End-to-end runs of the compiled binary: exit codes, artifact layout,
//! and stdout for a few representative scenarios.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn eit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let out = eit(&[flag]);
        assert!(out.status.success(), "{flag}: {}", stderr(&out));
    }
}

#[test]
fn run_without_a_scenario_or_preset_exits_1() {
    let out = eit(&["run"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("provide a scenario file or --preset"));
}

#[test]
fn unknown_preset_exits_1_and_lists_the_names() {
    let out = eit(&["run", "--preset", "fig99"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("unknown preset 'fig99'"), "{err}");
    assert!(err.contains("fig9a"), "{err}");
}

#[test]
fn malformed_scenario_json_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{]").unwrap();
    let out = eit(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("scenario parse"), "{}", stderr(&out));
}

#[test]
fn missing_scenario_file_exits_3() {
    let out = eit(&["run", "/no/such/scenario.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn a_floating_island_netlist_exits_2() {
    // R2 and L2 close a loop with no path to the reference node, so the
    // nodal system is singular at every frequency.
    let dir = tempfile::tempdir().unwrap();
    let scenario = serde_json::json!({
        "model": "netlist",
        "parameters": {
            "text": "* island\nV1 1 0 AC 1\nR1 1 0 100\nR2 2 3 50\nL2 3 2 1m\n.ac lin 5 1000 2000\n"
        },
        "output": { "dir": dir.path() }
    });
    let path = dir.path().join("island.json");
    fs::write(&path, scenario.to_string()).unwrap();
    let out = eit(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("singular"), "{}", stderr(&out));
}

#[test]
fn an_out_path_that_is_a_file_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "not a directory").unwrap();
    let out = eit(&[
        "run",
        "--preset",
        "fig9a",
        "--points",
        "11",
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn points_override_changes_the_csv_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = eit(&[
        "run",
        "--preset",
        "fig9a",
        "--points",
        "11",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("fig9a.csv")).unwrap();
    // header plus one row per grid point
    assert_eq!(csv.lines().count(), 12);
    assert!(csv.starts_with("omega,delta,P_R,P_X,re_I,im_I\n"), "{csv}");
}

#[test]
fn json_format_writes_column_arrays() {
    let dir = tempfile::tempdir().unwrap();
    let out = eit(&[
        "run",
        "--preset",
        "fig9a",
        "--points",
        "21",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let spectrum = read_json(&dir.path().join("fig9a.spectrum.json"));
    assert_eq!(spectrum["omega"].as_array().unwrap().len(), 21);
    assert_eq!(spectrum["P_R"].as_array().unwrap().len(), 21);
    assert!(spectrum.get("absorption").is_none());
    // run metadata rides along regardless of format
    let meta = read_json(&dir.path().join("fig9a.run.json"));
    assert_eq!(meta["name"], "fig9a");
    assert!(meta["conventions"]["power"]
        .as_str()
        .unwrap()
        .contains("conj(V) * I"));
}

#[test]
fn matched_loops_report_a_single_transparency_window() {
    let dir = tempfile::tempdir().unwrap();
    let out = eit(&[
        "run",
        "--preset",
        "fig9a",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(
        stdout(&out).contains("classification SingleEIT"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn raising_both_loop_resistances_makes_both_windows_shallower() {
    let dir = tempfile::tempdir().unwrap();
    let depths = |preset: &str| -> Vec<f64> {
        let out = eit(&["run", "--preset", preset, "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
        let report = read_json(&dir.path().join(format!("{preset}.report.json")));
        report["dips"]
            .as_array()
            .unwrap()
            .iter()
            .map(|d| d["depth"].as_f64().unwrap())
            .collect()
    };
    let low = depths("fig10a");
    let high = depths("fig10c");
    assert_eq!(low.len(), 2);
    assert_eq!(high.len(), 2);
    for (h, l) in high.iter().zip(&low) {
        assert!(h < l, "expected shallower dips: {high:?} vs {low:?}");
    }
}

#[test]
fn verify_passes_every_route_comparison() {
    let out = eit(&["verify"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("closed form vs netlist"), "{text}");
    assert!(text.contains("time domain vs modal form"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}
