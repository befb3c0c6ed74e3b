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

//! File formats: grid CSV input, OBJ meshes and curve CSV output.

use std::io::{self, Write};
use std::path::Path;

use nilmin_core::{GridSpec, Paracomplex, Vec3};

use crate::error::RunError;

#[derive(serde::Deserialize)]
struct GridRow {
    x: f64,
    y: f64,
    g_re: f64,
    g_im: f64,
}

/// Reads `x, y, g_re, g_im` rows and places them on the lattice of `spec`.
/// Every node must appear exactly once.
pub fn load_grid_csv(path: &Path, spec: &GridSpec) -> Result<Vec<Paracomplex>, RunError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => RunError::io(path, e.to_string()),
            _ => RunError::config("/gauss_grid", e.to_string()),
        })?;
    let mut values: Vec<Option<Paracomplex>> = vec![None; spec.len()];
    let (hx, hy) = (spec.hx(), spec.hy());
    for (line, row) in rdr.deserialize::<GridRow>().enumerate() {
        let row =
            row.map_err(|e| RunError::config("/gauss_grid", format!("row {}: {e}", line + 1)))?;
        let fi = (row.x - spec.x_min) / hx;
        let fj = (row.y - spec.y_min) / hy;
        let (i, j) = (fi.round(), fj.round());
        let off = (fi - i).abs().max((fj - j).abs());
        if !(off < 1e-6) || i < 0.0 || j < 0.0 || i as usize >= spec.nx || j as usize >= spec.ny {
            return Err(RunError::config(
                "/gauss_grid",
                format!(
                    "row {}: ({}, {}) is not a node of the configured grid",
                    line + 1,
                    row.x,
                    row.y
                ),
            ));
        }
        let k = spec.index(i as usize, j as usize);
        if values[k].is_some() {
            return Err(RunError::config(
                "/gauss_grid",
                format!("row {}: node given twice", line + 1),
            ));
        }
        values[k] = Some(Paracomplex::new(row.g_re, row.g_im));
    }
    values
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            v.ok_or_else(|| {
                let (i, j) = (k % spec.nx, k / spec.nx);
                RunError::config("/gauss_grid", format!("node ({i}, {j}) missing"))
            })
        })
        .collect()
}

/// OBJ with `nx * ny` vertices in row-major order and two triangles per
/// cell.
pub fn write_obj<W: Write>(mut w: W, nx: usize, ny: usize, positions: &[Vec3]) -> io::Result<()> {
    debug_assert_eq!(positions.len(), nx * ny);
    for p in positions {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let a = j * nx + i + 1;
            let b = a + 1;
            let c = a + nx + 1;
            let d = a + nx;
            writeln!(w, "f {a} {b} {c}")?;
            writeln!(w, "f {a} {c} {d}")?;
        }
    }
    w.flush()
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CurveRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub kind: &'static str,
}

pub fn write_curves<W: Write>(w: W, rows: &[CurveRow]) -> io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["t", "x", "y", "kind"])?;
    for r in rows {
        wtr.write_record([
            format!("{:.16e}", r.t),
            format!("{:.16e}", r.x),
            format!("{:.16e}", r.y),
            r.kind.to_string(),
        ])?;
    }
    wtr.flush()
}
