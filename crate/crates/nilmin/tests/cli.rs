// Copyright 2026 The nilmin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nilmin_core::expr;
use nilmin_core::harmonic::{self, HarmonicField};
use nilmin_core::Paracomplex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

fn nilmin(config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilmin"))
        .arg("--config")
        .arg(config)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

fn run_text(text: &str) -> (i32, tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), text);
    let out = nilmin(&cfg, dir.path());
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    (out.status.code().unwrap(), dir, stderr)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

const GRID: &str =
    r#""grid": {"x_min": -0.5, "x_max": 0.5, "y_min": -0.5, "y_max": 0.5, "nx": 21, "ny": 21}"#;

fn plane(mode: &str, g: &str, tau: &str) -> String {
    format!(r#"{{"mode": "{mode}", "gauss_map": "{g}", "tau": {tau}, {GRID}}}"#)
}

#[test]
fn validate_conj_z_succeeds() {
    let (code, dir, err) = run_text(&plane("validate", "conj(z)", "1"));
    assert_eq!(code, 0, "{err}");
    let r = report(dir.path());
    assert_eq!(r["regularity"]["status"], "regular");
    assert!(r["residuals"]["max_harmonic"].as_f64().unwrap() < 1e-12);
}

#[test]
fn config_errors_exit_2() {
    let cases = [
        (plane("validate", "conj(z)", "0"), "/tau"),
        (
            format!(r#"{{"mode": "validate", "gauss_map": "conj(z)", "tua": 1, {GRID}}}"#),
            "tau",
        ),
        (r#"{"mode": "validate", "#.to_string(), ""),
        (plane("validate", "conj(z", "1"), "/gauss_map"),
    ];
    for (text, needle) in cases {
        let (code, _dir, err) = run_text(&text);
        assert_eq!(code, 2, "{text}: {err}");
        assert!(err.contains(needle), "{err} lacks {needle}");
    }
}

#[test]
fn non_harmonic_input_exits_3() {
    let (code, _dir, err) = run_text(&plane("classify", "z*conj(z)", "1"));
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("NonHarmonicInput"), "{err}");
}

#[test]
fn io_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilmin(&dir.path().join("missing.json"), dir.path());
    assert_eq!(out.status.code(), Some(4));

    let cfg = write_config(dir.path(), &plane("validate", "conj(z)", "1"));
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = nilmin(&cfg, &blocker.join("sub"));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn repeated_runs_are_identical() {
    let text = plane("synthesize", "conj(z)", "1");
    let (c1, a, _) = run_text(&text);
    let (c2, b, _) = run_text(&text);
    assert_eq!((c1, c2), (0, 0));
    for name in ["mesh_nil.obj", "mesh_mink.obj"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let (mut ra, mut rb) = (report(a.path()), report(b.path()));
    ra.as_object_mut().unwrap().remove("timing");
    rb.as_object_mut().unwrap().remove("timing");
    assert_eq!(ra, rb);
}

/// The reported harmonic residual bounds the residual recomputed at random
/// nodes, and the meshes have one finite vertex per node.
#[test]
fn reported_residuals_bound_spot_checks() {
    let g = "zbar + (1 + j)*zbar^2/2";
    let (code, dir, err) = run_text(&plane("synthesize", g, "1"));
    assert_eq!(code, 0, "{err}");
    let r = report(dir.path());
    let bound = r["residuals"]["max_harmonic"].as_f64().unwrap();
    let field = HarmonicField::closed(expr::parse(g).unwrap(), 1.0).unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let (i, j) = (rng.gen_range(0..21), rng.gen_range(0..21));
        let z = Paracomplex::new(-0.5 + 0.05 * i as f64, -0.5 + 0.05 * j as f64);
        let s = field.sample(z).unwrap();
        assert!(harmonic::harmonic_residual(&s).max_abs() <= bound + 1e-15);
    }
    assert!(r["residuals"]["max_loop_rel"].as_f64().unwrap() < 1e-4);
    for name in ["mesh_nil.obj", "mesh_mink.obj"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let verts: Vec<&str> = text.lines().filter(|l| l.starts_with("v ")).collect();
        assert_eq!(verts.len(), 21 * 21);
        for v in verts {
            assert!(v[2..]
                .split_whitespace()
                .all(|c| c.parse::<f64>().unwrap().is_finite()));
        }
    }
}

#[test]
fn grid_input_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x,y,g_re,g_im\n");
    for j in 0..21 {
        for i in 0..21 {
            let (x, y) = (-0.5 + 0.05 * i as f64, -0.5 + 0.05 * j as f64);
            csv.push_str(&format!("{x},{y},{x},{}\n", -y));
        }
    }
    std::fs::write(dir.path().join("g.csv"), csv).unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{"mode": "synthesize", "gauss_grid": "g.csv", "tau": 1, {GRID}}}"#),
    );
    let out = nilmin(&cfg, dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let grid_mesh = std::fs::read_to_string(dir.path().join("mesh_nil.obj")).unwrap();

    let (code, closed, _) = run_text(&plane("synthesize", "conj(z)", "1"));
    assert_eq!(code, 0);
    let closed_mesh = std::fs::read_to_string(closed.path().join("mesh_nil.obj")).unwrap();
    let coords = |t: &str| -> Vec<f64> {
        t.lines()
            .filter(|l| l.starts_with("v "))
            .flat_map(|l| {
                l[2..]
                    .split_whitespace()
                    .map(|c| c.parse::<f64>().unwrap())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let (a, b) = (coords(&grid_mesh), coords(&closed_mesh));
    assert_eq!(a.len(), b.len());
    let gap = a
        .iter()
        .zip(&b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1e-3, "{gap}");
}

#[test]
fn bscroll_reports_two_swallowtails() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/swallowtail.json");
    let dir = tempfile::tempdir().unwrap();
    let out = nilmin(&cfg, dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(dir.path());
    assert_eq!(r["bscroll"]["swallowtails"], 2);
    assert_eq!(r["bscroll"]["chart_check"]["agree"], true);
    let curves = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert!(curves.lines().next().unwrap().starts_with("t,x,y,kind"));
}
