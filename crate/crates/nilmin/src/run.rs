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

//! The four run modes.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nilmin_core::bscroll::{self, BScrollError, CurvatureProfile};
use nilmin_core::curvature::{Ambient, StencilOrder, TangentField};
use nilmin_core::harmonic::{
    self, GridField, HarmonicField, IrregularReason, RegularityStatus, Source,
};
use nilmin_core::singular::{self, Kind, SingularError, SingularPoint, Stratum, TraceOptions};
use nilmin_core::surface::{self, ConnectionTable, IntegrationOptions, SurfaceError, SurfaceGrid};
use nilmin_core::{expr, GridSpec, Vec3};

use crate::config::{Config, Mode};
use crate::error::RunError;
use crate::io::{self, CurveRow};
use crate::report::*;

/// Where a run writes its files.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub verbose: bool,
}

macro_rules! note {
    ($opts:expr, $($arg:tt)*) => {
        if $opts.verbose {
            eprintln!($($arg)*);
        }
    };
}

fn surface_err(e: SurfaceError) -> RunError {
    match e {
        SurfaceError::NonHarmonicInput { .. } => RunError::numerical("NonHarmonicInput", e),
        _ => RunError::numerical("IntegrationFailed", e),
    }
}

fn singular_err(e: SingularError) -> RunError {
    match e {
        SingularError::LostCurve { .. } => RunError::numerical("LostCurve", e),
        _ => RunError::numerical("ClassificationFailed", e),
    }
}

fn bscroll_err(e: BScrollError) -> RunError {
    match e {
        BScrollError::NonClosedForm { .. } => RunError::numerical("NonClosedForm", e),
        BScrollError::BadInitialFrame { .. } => {
            RunError::config("/bscroll/init_frame", e.to_string())
        }
        _ => RunError::numerical("BScrollFailed", e),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e.to_string()))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| RunError::io(path, e.to_string()))
}

fn write_obj(path: &Path, nx: usize, ny: usize, pts: &[Vec3]) -> Result<(), RunError> {
    io::write_obj(create(path)?, nx, ny, pts).map_err(|e| RunError::io(path, e.to_string()))
}

fn write_curves(path: &Path, rows: &[CurveRow]) -> Result<(), RunError> {
    io::write_curves(create(path)?, rows).map_err(|e| RunError::io(path, e.to_string()))
}

fn write_report(path: &Path, report: &Report) -> Result<(), RunError> {
    std::fs::write(path, report.to_json()).map_err(|e| RunError::io(path, e.to_string()))
}

/// Runs `cfg` and writes its artifacts. On a numerical failure in mode
/// `validate` the report is still written before the error is returned.
pub fn run(cfg: &Config, opts: &RunOptions) -> Result<Report, RunError> {
    let start = Instant::now();
    let out = |p: &PathBuf| opts.out_dir.join(p);
    let mut report = Report::new(cfg);
    let result = match cfg.mode {
        Mode::Validate => validate(cfg, opts, &mut report),
        Mode::Synthesize => synthesize(cfg, opts, &mut report).map(|_| ()),
        Mode::Classify => classify(cfg, opts, &mut report),
        Mode::Bscroll => run_bscroll(cfg, opts, &mut report),
    };
    report.timing.seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(()) => {
            write_report(&out(&cfg.outputs.report), &report)?;
            Ok(report)
        }
        Err(e) => {
            if cfg.mode == Mode::Validate && matches!(e, RunError::Numerical { .. }) {
                write_report(&out(&cfg.outputs.report), &report)?;
            }
            Err(e)
        }
    }
}

fn field_of(cfg: &Config) -> Result<(HarmonicField, GridSpec), RunError> {
    let grid = cfg
        .grid
        .as_ref()
        .ok_or_else(|| RunError::config("/grid", "missing"))?;
    let spec = grid.spec();
    let source = if let Some(src) = &cfg.gauss_map {
        Source::Closed(expr::parse(src).map_err(|e| RunError::config("/gauss_map", e.to_string()))?)
    } else if let Some(path) = &cfg.gauss_grid {
        let values = io::load_grid_csv(path, &spec)?;
        Source::Grid(
            GridField::new(spec, values).map_err(|e| RunError::config("/grid", e.to_string()))?,
        )
    } else {
        return Err(RunError::config("/gauss_map", "missing"));
    };
    let field =
        HarmonicField::new(source, cfg.tau).map_err(|e| RunError::config("/tau", e.to_string()))?;
    Ok((field, spec))
}

fn validate(cfg: &Config, opts: &RunOptions, report: &mut Report) -> Result<(), RunError> {
    let (field, spec) = field_of(cfg)?;
    let tol = &cfg.tolerances;
    let mut worst = (0.0f64, 0.0, 0.0);
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let z = spec.node(i, j);
            match field.sample(z) {
                Ok(s) => {
                    let r = harmonic::harmonic_residual(&s).max_abs();
                    if !(r <= worst.0) {
                        worst = (r, z.re, z.im);
                    }
                    let (d1, d2) = harmonic::dirac_residuals(&s);
                    report.residuals.max_dirac = report
                        .residuals
                        .max_dirac
                        .max(d1.max_abs())
                        .max(d2.max_abs());
                }
                Err(_) => report.residuals.failed_nodes += 1,
            }
        }
    }
    report.residuals.max_harmonic = worst.0;
    note!(opts, "max harmonic residual {:e}", worst.0);
    let reg = harmonic::regularity_check(&field, &spec, tol.harmonic, tol.classify);
    let count = |r: IrregularReason| reg.flags.iter().filter(|f| f.reason == r).count();
    report.regularity = Some(Regularity {
        status: match reg.status {
            RegularityStatus::Regular => "regular",
            RegularityStatus::Irregular => "irregular",
            RegularityStatus::NotHarmonic => "not_harmonic",
        },
        flagged_nodes: reg.flags.len(),
        omega_vanishes: count(IrregularReason::OmegaVanishes),
        gauss_pole: count(IrregularReason::GaussPole),
        vertical: count(IrregularReason::Vertical),
        undefined: count(IrregularReason::Undefined),
    });
    if !(worst.0 <= tol.harmonic) {
        return Err(surface_err(SurfaceError::NonHarmonicInput {
            max: worst.0,
            tol: tol.harmonic,
            x: worst.1,
            y: worst.2,
        }));
    }
    Ok(())
}

/// Largest `|H - target|` over interior nodes whose metric is not close to
/// degenerate: `|EG - F^2| > det_rel * |f_x|^2 |f_y|^2` (Euclidean norms).
fn mean_curvature_summary(
    tf: &TangentField,
    ambient: &Ambient,
    target: f64,
    normals: Option<&[Vec3]>,
    det_rel: f64,
) -> (Option<f64>, usize) {
    let order = if tf.nx >= 5 && tf.ny >= 5 {
        StencilOrder::Fourth
    } else {
        StencilOrder::Second
    };
    let mut worst: Option<f64> = None;
    let mut n = 0;
    for j in 0..tf.ny {
        for i in 0..tf.nx {
            let k = j * tf.nx + i;
            let scale = tf.fx[k].dot(tf.fx[k]) * tf.fy[k].dot(tf.fy[k]);
            let hint = normals.map(|v| v[k]);
            let det_tol = det_rel * scale;
            let Ok(h) = tf.mean_curvature(i, j, ambient, order, hint, det_tol) else {
                continue;
            };
            if !h.is_finite() {
                continue;
            }
            let d = (h - target).abs();
            worst = Some(worst.map_or(d, |w| w.max(d)));
            n += 1;
        }
    }
    (worst, n)
}

fn synthesize(
    cfg: &Config,
    opts: &RunOptions,
    report: &mut Report,
) -> Result<SurfaceGrid, RunError> {
    let (field, spec) = field_of(cfg)?;
    let iopts = IntegrationOptions {
        harmonic_tol: cfg.tolerances.harmonic,
        ..Default::default()
    };
    let grid = surface::integrate(&field, &spec, &iopts).map_err(surface_err)?;
    let d = &grid.diagnostics;
    note!(
        opts,
        "integrated {}x{} grid, loop residual {:e} (relative)",
        spec.nx,
        spec.ny,
        d.max_loop_rel
    );
    let r = &mut report.residuals;
    r.max_harmonic = d.max_harmonic_residual;
    r.max_dirac = d.max_dirac_residual;
    r.max_loop_abs = Some(d.max_loop_abs);
    r.max_loop_per_area = Some(d.max_loop_per_area);
    r.max_loop_rel = Some(d.max_loop_rel);
    r.max_path_mismatch = Some(d.max_path_mismatch);
    r.max_path_mismatch_f3 = Some(d.max_path_mismatch_f3);

    let nil = ConnectionTable::new(cfg.tau);
    let (nil_max, nil_n) =
        mean_curvature_summary(&grid.nil_tangents(), &Ambient::Nil(nil), 0.0, None, 1e-2);
    let normals: Vec<Vec3> = grid
        .samples
        .iter()
        .map(|s| surface::normal_minkowski(s.g.v).unwrap_or(Vec3::ZERO))
        .collect();
    let (mink_max, mink_n) = mean_curvature_summary(
        &grid.mink_tangents(),
        &Ambient::Minkowski,
        cfg.tau,
        Some(&normals),
        1e-12,
    );
    report.mean_curvature = Some(MeanCurvature {
        nil_max_abs: nil_max,
        nil_nodes: nil_n,
        mink_max_dev: mink_max,
        mink_nodes: mink_n,
    });

    let out = |p: &PathBuf| opts.out_dir.join(p);
    write_obj(
        &out(&cfg.outputs.mesh_nil),
        spec.nx,
        spec.ny,
        &grid.positions_nil,
    )?;
    write_obj(
        &out(&cfg.outputs.mesh_mink),
        spec.nx,
        spec.ny,
        &grid.positions_mink,
    )?;
    Ok(grid)
}

fn near_curve(p: &SingularPoint, curves: &[singular::SingularCurve], radius: f64) -> Option<usize> {
    curves.iter().position(|c| {
        c.stratum == p.stratum && c.points.iter().any(|q| (q.z - p.z).max_abs() < radius)
    })
}

fn classify(cfg: &Config, opts: &RunOptions, report: &mut Report) -> Result<(), RunError> {
    synthesize(cfg, opts, report)?;
    let (field, spec) = field_of(cfg)?;
    let tol = singular::Tolerances {
        level: cfg.tolerances.level,
        classify: cfg.tolerances.classify,
    };
    let seeds = singular::detect(&field, &spec, tol).map_err(singular_err)?;
    note!(opts, "{} singular points on grid edges", seeds.len());

    let traceable = !matches!(field.source, Source::Grid(_));
    let topts = TraceOptions::new(spec, tol);
    let radius = 0.75 * spec.hx().min(spec.hy());
    let mut curves: Vec<singular::SingularCurve> = Vec::new();
    let mut entries = Vec::new();
    let mut events = Vec::new();
    let mut rows = Vec::new();
    for p in &seeds {
        let mut on = near_curve(p, &curves, radius);
        let single = p.stratum == Stratum::Both || !p.nondegenerate;
        if on.is_none() && traceable && !single {
            let curve = singular::trace_curve(&field, p, &topts).map_err(singular_err)?;
            curves.push(curve);
            on = Some(curves.len() - 1);
        }
        entries.push(PointEntry::from_point(p, on));
    }
    let copts = singular::ClassifyOptions { tol, strict: false };
    for (k, c) in curves.iter().enumerate() {
        let cls = match c.stratum {
            Stratum::SigmaG => singular::classify_sigma_g(&field, c, copts),
            _ => singular::classify_sigma_omega(c, copts),
        }
        .map_err(singular_err)?;
        let mut merged: Vec<(f64, &SingularPoint)> = cls.points.iter().map(|p| (p.t, p)).collect();
        merged.extend(cls.events.iter().map(|p| (p.t, p)));
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (t, p) in merged {
            rows.push(CurveRow {
                t,
                x: p.z.re,
                y: p.z.im,
                kind: p.kind.name(),
            });
        }
        events.extend(
            cls.events
                .iter()
                .map(|e| PointEntry::from_point(e, Some(k))),
        );
    }
    note!(opts, "{} curves, {} events", curves.len(), events.len());
    report.singular_points = Some(entries);
    report.events = Some(events);
    report.curves = Some(
        curves
            .iter()
            .map(|c| CurveSummary {
                stratum: c.stratum.name(),
                points: c.points.len(),
                closed: c.closed,
                t_range: [
                    c.points.first().map_or(0.0, |p| p.t),
                    c.points.last().map_or(0.0, |p| p.t),
                ],
            })
            .collect(),
    );
    write_curves(&opts.out_dir.join(&cfg.outputs.curves), &rows)
}

fn run_bscroll(cfg: &Config, opts: &RunOptions, report: &mut Report) -> Result<(), RunError> {
    let b = cfg
        .bscroll
        .as_ref()
        .ok_or_else(|| RunError::config("/bscroll", "missing"))?;
    let kappa = expr::parse_profile(&b.kappa)
        .map_err(|e| RunError::config("/bscroll/kappa", e.to_string()))?;
    let profile = CurvatureProfile::new(kappa, cfg.tau)
        .map_err(|e| RunError::config("/tau", e.to_string()))?;
    let s_range = (b.s_range[0], b.s_range[1]);
    let t_range = (b.t_range[0], b.t_range[1]);
    let table = bscroll::integrate_frame(&profile, b.init_state(), s_range, b.step, true)
        .map_err(bscroll_err)?;
    let max_defect = table.frames.iter().map(|f| f.defect()).fold(0.0, f64::max);
    note!(
        opts,
        "{} frames, max defect {:e}",
        table.frames.len(),
        max_defect
    );

    let grid = bscroll::scroll_eval(&table, s_range, b.ns, t_range, b.nt).map_err(bscroll_err)?;
    let n = table.frames.len().max(2);
    let cls = bscroll::classify_scroll(&table, s_range, n, cfg.tolerances.classify)
        .map_err(bscroll_err)?;

    let tol = singular::Tolerances {
        level: cfg.tolerances.level,
        classify: cfg.tolerances.classify,
    };
    let chart =
        bscroll::chart_field(table.clone()).map_err(|e| RunError::numerical("BScrollFailed", e))?;
    let chart_events =
        bscroll::classify_chart(&chart, &table, s_range, n, tol).map_err(bscroll_err)?;

    let rec = bscroll::reconstruct_nil(&table, &grid, cfg.tolerances.loop_).map_err(bscroll_err)?;
    note!(
        opts,
        "hodge sign {}, loop residual {:e} per area",
        rec.hodge_sign,
        rec.max_loop_per_area
    );

    // pair each dual-curve event with the nearest chart event of the same kind
    let special: Vec<_> = cls
        .events
        .iter()
        .filter(|e| e.kind != Kind::Unresolved)
        .collect();
    let chart_special: Vec<_> = chart_events
        .iter()
        .filter(|e| e.point.kind != Kind::Unresolved)
        .collect();
    let mut max_ds: Option<f64> = None;
    let mut agree = special.len() == chart_special.len();
    let mut entries = Vec::new();
    let src = bscroll::ScrollChartSource {
        table: table.clone(),
    };
    for e in &cls.events {
        let partner = chart_special
            .iter()
            .filter(|c| c.point.kind == e.kind)
            .min_by(|a, b| (a.s - e.s).abs().total_cmp(&(b.s - e.s).abs()));
        if e.kind != Kind::Unresolved {
            match partner {
                Some(c) => {
                    let d = (c.s - e.s).abs();
                    max_ds = Some(max_ds.map_or(d, |m| m.max(d)));
                    agree &= d <= 1e-5;
                }
                None => agree = false,
            }
        }
        let z = src.chart_point(e.s, e.t);
        entries.push(PointEntry {
            x: z.re,
            y: z.im,
            stratum: Stratum::SigmaG.name(),
            nondegenerate: true,
            kind: e.kind.name(),
            diagnostics: partner.map(|c| (&c.point.diagnostics).into()),
            curve: None,
            t: Some(e.t),
            s: Some(e.s),
        });
    }
    let count = |k: Kind| cls.events.iter().filter(|e| e.kind == k).count();
    report.bscroll = Some(BScrollSection {
        frames: table.frames.len(),
        max_frame_defect: max_defect,
        hodge_sign: rec.hodge_sign,
        max_loop_per_area: rec.max_loop_per_area,
        rejected_loop_per_area: rec.rejected_loop_per_area,
        poles: cls.poles.clone(),
        swallowtails: count(Kind::Swallowtail),
        cuspidal_cross_caps: count(Kind::CuspidalCrossCap),
        unresolved: count(Kind::Unresolved),
        chart_check: ChartCheck {
            agree,
            events: chart_special.len(),
            max_s_discrepancy: max_ds,
        },
    });
    report.events = Some(entries);
    report.residuals.max_loop_per_area = Some(rec.max_loop_per_area);

    let nil = ConnectionTable::new(cfg.tau);
    let (nil_max, nil_n) =
        mean_curvature_summary(&rec.tangents, &Ambient::Nil(nil), 0.0, None, 1e-2);
    let (mink_max, mink_n) = mean_curvature_summary(
        &grid.tangents(),
        &Ambient::Minkowski,
        cfg.tau,
        Some(&grid.normals),
        1e-12,
    );
    report.mean_curvature = Some(MeanCurvature {
        nil_max_abs: nil_max,
        nil_nodes: nil_n,
        mink_max_dev: mink_max,
        mink_nodes: mink_n,
    });

    let out = |p: &PathBuf| opts.out_dir.join(p);
    write_obj(
        &out(&cfg.outputs.mesh_nil),
        grid.ns(),
        grid.nt(),
        &rec.positions,
    )?;
    write_obj(
        &out(&cfg.outputs.mesh_mink),
        grid.ns(),
        grid.nt(),
        &grid.positions,
    )?;
    let mut rows: Vec<CurveRow> = cls
        .samples
        .iter()
        .map(|&(s, t, k)| CurveRow {
            t: s,
            x: s,
            y: t,
            kind: k.name(),
        })
        .collect();
    rows.extend(cls.events.iter().map(|e| CurveRow {
        t: e.s,
        x: e.s,
        y: e.t,
        kind: e.kind.name(),
    }));
    rows.sort_by(|a, b| a.t.total_cmp(&b.t));
    write_curves(&out(&cfg.outputs.curves), &rows)
}
