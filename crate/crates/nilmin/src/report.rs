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

//! The run report. Field order is fixed, so identical runs serialize to
//! identical bytes apart from `timing`.

use nilmin_core::singular::{Diagnostics, SingularPoint};
use serde::Serialize;

use crate::config::{Config, Mode};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: Tool,
    pub mode: Mode,
    pub config: Config,
    pub residuals: Residuals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regularity: Option<Regularity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_curvature: Option<MeanCurvature>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_points: Option<Vec<PointEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub events: Option<Vec<PointEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<CurveSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bscroll: Option<BScrollSection>,
    pub timing: Timing,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Tool {
    fn default() -> Self {
        Tool {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Residuals {
    pub max_harmonic: f64,
    pub max_dirac: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_loop_abs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_loop_per_area: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_loop_rel: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_path_mismatch: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_path_mismatch_f3: Option<f64>,
    /// Nodes where the Gauss map could not be sampled.
    pub failed_nodes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Regularity {
    pub status: &'static str,
    pub flagged_nodes: usize,
    pub omega_vanishes: usize,
    pub gauss_pole: usize,
    pub vertical: usize,
    pub undefined: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MeanCurvature {
    /// Largest `|H|` of the surface in `Nil3(tau)` over interior regular nodes.
    pub nil_max_abs: Option<f64>,
    pub nil_nodes: usize,
    /// Largest `|H - tau|` of the Minkowski counterpart.
    pub mink_max_dev: Option<f64>,
    pub mink_nodes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsEntry {
    pub re_r: Option<f64>,
    pub im_r: Option<f64>,
    pub third_sw: Option<f64>,
    pub third_ccr: Option<f64>,
    pub lambda: f64,
    pub det_direct: Option<f64>,
    pub det_formula: Option<f64>,
    pub front_measure: Option<f64>,
}

impl From<&Diagnostics> for DiagnosticsEntry {
    fn from(d: &Diagnostics) -> Self {
        DiagnosticsEntry {
            re_r: d.re_r,
            im_r: d.im_r,
            third_sw: d.third_sw,
            third_ccr: d.third_ccr,
            lambda: d.lambda,
            det_direct: d.det_direct,
            det_formula: d.det_formula,
            front_measure: d.front_measure,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointEntry {
    pub x: f64,
    pub y: f64,
    pub stratum: &'static str,
    pub nondegenerate: bool,
    pub kind: &'static str,
    pub diagnostics: Option<DiagnosticsEntry>,
    /// Index into `curves`, when the point lies on a traced curve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// B-scroll parameter `s` of the point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

impl PointEntry {
    pub fn from_point(p: &SingularPoint, curve: Option<usize>) -> Self {
        PointEntry {
            x: p.z.re,
            y: p.z.im,
            stratum: p.stratum.name(),
            nondegenerate: p.nondegenerate,
            kind: p.kind.name(),
            diagnostics: Some((&p.diagnostics).into()),
            curve,
            t: curve.map(|_| p.t),
            s: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveSummary {
    pub stratum: &'static str,
    pub points: usize,
    pub closed: bool,
    pub t_range: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct BScrollSection {
    pub frames: usize,
    pub max_frame_defect: f64,
    pub hodge_sign: f64,
    pub max_loop_per_area: f64,
    pub rejected_loop_per_area: f64,
    pub poles: Vec<f64>,
    pub swallowtails: usize,
    pub cuspidal_cross_caps: usize,
    pub unresolved: usize,
    /// Comparison with the ratio criteria in the conformal chart.
    pub chart_check: ChartCheck,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartCheck {
    pub agree: bool,
    pub events: usize,
    pub max_s_discrepancy: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

impl Report {
    pub fn new(config: &Config) -> Self {
        Report {
            tool: Tool::default(),
            mode: config.mode,
            config: config.normalized(),
            residuals: Residuals::default(),
            regularity: None,
            mean_curvature: None,
            singular_points: None,
            events: None,
            curves: None,
            bscroll: None,
            timing: Timing { seconds: 0.0 },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
