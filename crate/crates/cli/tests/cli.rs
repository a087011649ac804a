use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use anyhow::{ensure, Context, Result};
use serde_json::{json, Value};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spindle"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("the binary runs")
}

fn write_scene(dir: &Path, name: &str, scene: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(scene).unwrap()).unwrap();
    path
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("the report is JSON")
}

fn tetrahedron() -> Value {
    let a = 0.5 / 3f64.sqrt();
    json!({"dim": 3, "points": [[a, a, a], [a, -a, -a], [-a, a, -a], [-a, -a, a]]})
}

#[test]
fn euler_check_on_the_tetrahedral_body() {
    let dir = tempfile::tempdir().unwrap();
    write_scene(dir.path(), "tetra.json", &tetrahedron());
    let out = run(dir.path(), &["euler-check", "tetra.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "euler-check");
    assert_eq!(r["results"]["V"], 4);
    assert_eq!(r["results"]["E"], 6);
    assert_eq!(r["results"]["F"], 4);
    assert_eq!(r["results"]["chi"], 2);
    assert!(r["assertions"].as_array().unwrap().iter().all(|a| a["holds"] == true));
}

#[test]
fn maehara_reports_the_root_and_residual_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["maehara", "--dim", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["t_star"], 0.5);
    assert_eq!(r["results"]["residuals"].as_array().unwrap().len(), 6);
}

#[test]
fn dowker_inscribed_perimeter_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["dowker", "--r", "0.5", "--n", "4..8", "--setting", "inscribed-perimeter"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let rows = r["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|row| row["inequality"] == "<" && row["holds"] == true));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_scene(dir.path(), "bad.json", &json!({"dim": 2, "points": [[0.0, 0.0], [1.0]]}));
    let out = run(dir.path(), &["hull2d", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("points[1]"));
    std::fs::write(dir.path().join("broken.json"), "{\"dim\": 2,\n \"points\": [[0, 0]\n").unwrap();
    let out = run(dir.path(), &["hull2d", "broken.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    assert_eq!(run(dir.path(), &["nonsense"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["hull2d"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["maehara", "--dim", "3"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["dowker", "--setting", "outer-volume"]).status.code(), Some(2));
}

#[test]
fn violated_properties_exit_with_one_and_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["kneser-poulsen", "--trials", "50"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let failed: Vec<&str> = r["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["holds"] == false)
        .map(|a| a["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["minimal width decreases for (0.8, ±pi/10) -> (0.8, 0)"]);
}

#[test]
fn reports_are_deterministic_and_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let s = 0.5 * FRAC_1_SQRT_2;
    write_scene(
        dir.path(),
        "pts.json",
        &json!({"dim": 3, "points": [[0.0, 0.0, 0.0], [0.4, 0.1, 0.0], [0.1, 0.4, 0.2], [s, 0.0, s]]}),
    );
    let a = run(dir.path(), &["illuminate", "pts.json", "--trials", "60", "--seed", "9", "--report", "a.json"]);
    let b = run(dir.path(), &["illuminate", "pts.json", "--trials", "60", "--seed", "9", "--report", "b.json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let ra = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    let rb = std::fs::read_to_string(dir.path().join("b.json")).unwrap();
    assert_eq!(ra, rb);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| !["pts.json", "a.json", "b.json"].contains(&n.as_str()))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
    let r: Value = serde_json::from_str(&ra).unwrap();
    assert_eq!(r["results"]["ratio"], 1.0);
}

#[test]
fn scene_survives_the_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let scene = json!({
        "dim": 2,
        "points": [[0.1, 0.30000000000000004], [0.7, 0.2], [0.35, 0.6], [1.0 / 3.0, 0.25]],
        "centers": [],
        "radius": 1.0,
        "metadata": {"name": "quad"},
    });
    write_scene(dir.path(), "q.json", &scene);
    let r = report(&run(dir.path(), &["hull2d", "q.json"]));
    assert_eq!(r["inputs"]["scene"], scene);
}

struct SvgArc {
    from: [f64; 2],
    to: [f64; 2],
    radius: f64,
    large: bool,
    sweep: bool,
}

/// Parses every `<path d="M x y A r r 0 large sweep x y"/>` element.
fn parse_arcs(svg: &str) -> Result<Vec<SvgArc>> {
    let mut arcs = Vec::new();
    for chunk in svg.split("<path").skip(1) {
        let d = chunk.split("d=\"").nth(1).context("path without d")?;
        let d = &d[..d.find('"').context("unterminated d")?];
        let tok: Vec<&str> = d.split_whitespace().collect();
        ensure!(tok.len() == 11 && tok[0] == "M" && tok[3] == "A", "unexpected path {d}");
        let f = |i: usize| tok[i].parse::<f64>();
        ensure!(f(4)? == f(5)? && f(6)? == 0.0, "non-circular arc {d}");
        arcs.push(SvgArc {
            from: [f(1)?, f(2)?],
            to: [f(9)?, f(10)?],
            radius: f(4)?,
            large: tok[7] == "1",
            sweep: tok[8] == "1",
        });
    }
    Ok(arcs)
}

/// Center of the arc as SVG defines it: the circle through both endpoints
/// for which the flags pick this arc. A positive-angle sweep keeps the
/// center on the left of the chord for a small arc.
fn svg_center(a: &SvgArc) -> [f64; 2] {
    let (dx, dy) = (a.to[0] - a.from[0], a.to[1] - a.from[1]);
    let chord = dx.hypot(dy);
    let h = (a.radius * a.radius - chord * chord / 4.0).max(0.0).sqrt();
    let left = a.large != a.sweep;
    let s = if left { 1.0 } else { -1.0 };
    [
        a.from[0] + dx / 2.0 - s * h * dy / chord,
        a.from[1] + dy / 2.0 + s * h * dx / chord,
    ]
}

#[test]
fn svg_paths_match_the_reported_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let pts: Vec<[f64; 2]> = (0..7)
        .map(|k| {
            let t = TAU * k as f64 / 7.0 + 0.1 * (k % 3) as f64;
            [0.45 * t.cos(), 0.35 * t.sin()]
        })
        .collect();
    write_scene(dir.path(), "h.json", &json!({"dim": 2, "points": pts}));
    let out = run(dir.path(), &["hull2d", "h.json", "--svg", "h.svg"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let arcs = r["results"]["arcs"].as_array().unwrap();
    let svg = std::fs::read_to_string(dir.path().join("h.svg")).unwrap();
    assert!(svg.contains("version=\"1.1\""));
    let parsed = parse_arcs(&svg).unwrap();
    assert_eq!(parsed.len(), arcs.len());
    for (p, a) in parsed.iter().zip(arcs) {
        let c = [a["center"][0].as_f64().unwrap(), a["center"][1].as_f64().unwrap()];
        let got = svg_center(p);
        assert!((got[0] - c[0]).hypot(got[1] - c[1]) < 1e-9, "{got:?} vs {c:?}");
        assert!(p.sweep, "boundary arcs run counterclockwise");
        assert!(!p.large);
        let cross = (p.from[0] - c[0]) * (p.to[1] - c[1]) - (p.from[1] - c[1]) * (p.to[0] - c[0]);
        assert!(cross > 0.0);
    }
}

#[test]
fn kneser_poulsen_scene_draws_both_disk_polygons() {
    let dir = tempfile::tempdir().unwrap();
    let polar = |r: f64, t: f64| [r * t.cos(), r * t.sin()];
    let third = std::f64::consts::FRAC_PI_3;
    let quarter = std::f64::consts::FRAC_PI_4;
    write_scene(
        dir.path(),
        "kp.json",
        &json!({
            "dim": 2,
            "points": [[0.0, 0.0], polar(0.5, third), polar(0.5, -third)],
            "centers": [[0.0, 0.0], polar(0.5, quarter), polar(0.5, -quarter)],
        }),
    );
    let out = run(dir.path(), &["kneser-poulsen", "kp.json", "--svg", "kp.svg"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["results"]["diameter_delta"].as_f64().unwrap() < 0.0);
    let svg = std::fs::read_to_string(dir.path().join("kp.svg")).unwrap();
    let arcs = parse_arcs(&svg).unwrap();
    assert!(arcs.len() >= 4);
    assert!(arcs.iter().all(|a| a.sweep && !a.large && a.radius == 1.0));
}

#[test]
fn svg_is_rejected_for_commands_without_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["maehara", "--svg", "m.svg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("m.svg").exists());
}

#[test]
fn remaining_subcommands_succeed_on_small_inputs() {
    let dir = tempfile::tempdir().unwrap();
    write_scene(dir.path(), "tetra.json", &tetrahedron());
    write_scene(
        dir.path(),
        "sep.json",
        &json!({"dim": 2, "points": [[0.0, 0.0], [0.2, 0.1]], "centers": [[1.5, 0.0], [1.4, 0.6], [1.6, -0.5]]}),
    );
    write_scene(
        dir.path(),
        "es.json",
        &json!({"dim": 2, "points": [[0.0, 0.0], [0.5, 0.0], [0.25, 0.4], [0.25, 0.15], [0.1, 0.3]]}),
    );
    let cases: Vec<Vec<&str>> = vec![
        vec!["bp3-structure", "tetra.json"],
        vec!["standardness", "tetra.json"],
        vec!["extremal", "--n", "4..5", "--setting", "circumscribed-area"],
        vec!["titeica", "--trials", "200"],
        vec!["separate", "sep.json", "--svg", "sep.svg"],
        vec!["kirchberger", "sep.json"],
        vec!["kirchberger"],
        vec!["es-search", "es.json", "--n", "3..4"],
    ];
    for args in cases {
        let out = run(dir.path(), &args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let r = report(&run(dir.path(), &["standardness", "tetra.json"]));
    assert_eq!(r["results"]["standard"], true);
    assert_eq!(r["results"]["elements"], 16);
    let r = report(&run(dir.path(), &["kirchberger"]));
    assert_eq!(r["results"]["result"]["verdict"], "unit-circle-counterexample");
}
