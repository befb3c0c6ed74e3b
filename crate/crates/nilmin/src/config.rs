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

//! Run configuration: a single JSON document.
//!
//! Parsing is strict. Unknown keys are rejected with the closest known key as
//! a suggestion, and every error carries a JSON pointer to the offending
//! value.

use std::path::{Path, PathBuf};

use nilmin_core::bscroll::FrameState;
use nilmin_core::{expr, GridSpec, Vec3};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("config error at {pointer}: {message}")]
pub struct ConfigError {
    /// JSON pointer, `""` for the whole document.
    pub pointer: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Validate,
    Synthesize,
    Classify,
    Bscroll,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_map: Option<String>,
    /// CSV file with columns `x, y, g_re, g_im`, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_grid: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bscroll: Option<BScrollConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    /// Base point of the integration; the grid centre when absent.
    #[serde(default)]
    pub base: Option<[f64; 2]>,
}

impl GridConfig {
    pub fn spec(&self) -> GridSpec {
        let g = GridSpec::new(
            (self.x_min, self.x_max),
            (self.y_min, self.y_max),
            self.nx,
            self.ny,
        );
        match self.base {
            Some([x, y]) => g.with_base((x, y)),
            None => g,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BScrollConfig {
    /// Curvature as an expression in `s`.
    pub kappa: String,
    pub s_range: [f64; 2],
    pub t_range: [f64; 2],
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_frame: Option<InitFrame>,
    /// Mesh resolution in `s` and `t`.
    #[serde(default = "default_mesh_n")]
    pub ns: usize,
    #[serde(default = "default_mesh_n")]
    pub nt: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitFrame {
    #[serde(default)]
    pub s0: f64,
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
}

impl InitFrame {
    pub fn state(&self) -> FrameState {
        FrameState {
            s: self.s0,
            a: Vec3(self.a),
            b: Vec3(self.b),
            c: Vec3(self.c),
            p: Vec3::ZERO,
        }
    }
}

fn default_step() -> f64 {
    1e-3
}

fn default_mesh_n() -> usize {
    81
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub level: f64,
    pub classify: f64,
    #[serde(rename = "loop")]
    pub loop_: f64,
    pub harmonic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            level: 1e-9,
            classify: 1e-7,
            loop_: 1e-6,
            harmonic: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub mesh_nil: PathBuf,
    pub mesh_mink: PathBuf,
    pub report: PathBuf,
    pub curves: PathBuf,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            mesh_nil: "mesh_nil.obj".into(),
            mesh_mink: "mesh_mink.obj".into(),
            report: "report.json".into(),
            curves: "curves.csv".into(),
        }
    }
}

const TOP: &[&str] = &[
    "mode",
    "gauss_map",
    "gauss_grid",
    "grid",
    "tau",
    "bscroll",
    "tolerances",
    "outputs",
];
const GRID: &[&str] = &["x_min", "x_max", "y_min", "y_max", "nx", "ny", "base"];
const BSCROLL: &[&str] = &[
    "kappa",
    "s_range",
    "t_range",
    "step",
    "init_frame",
    "ns",
    "nt",
];
const FRAME: &[&str] = &["s0", "a", "b", "c"];
const TOLS: &[&str] = &["level", "classify", "loop", "harmonic"];
const OUTPUTS: &[&str] = &["mesh_nil", "mesh_mink", "report", "curves"];

fn check_keys(v: &Value, pointer: &str, known: &[&str]) -> Result<(), ConfigError> {
    let Some(obj) = v.as_object() else {
        return Ok(());
    };
    for key in obj.keys() {
        if known.contains(&key.as_str()) {
            continue;
        }
        let best = known
            .iter()
            .map(|k| (strsim::osa_distance(k, key), *k))
            .min_by_key(|a| a.0);
        let hint = match best {
            Some((d, k)) if d <= 2 && d < key.len() => format!("; did you mean \"{k}\"?"),
            _ => String::new(),
        };
        return Err(ConfigError::new(
            format!("{pointer}/{key}"),
            format!("unknown key \"{key}\"{hint}"),
        ));
    }
    Ok(())
}

fn unknown_keys(v: &Value) -> Result<(), ConfigError> {
    check_keys(v, "", TOP)?;
    let nested: [(&str, &[&str]); 4] = [
        ("grid", GRID),
        ("bscroll", BSCROLL),
        ("tolerances", TOLS),
        ("outputs", OUTPUTS),
    ];
    for (key, known) in nested {
        if let Some(sub) = v.get(key) {
            check_keys(sub, &format!("/{key}"), known)?;
        }
    }
    if let Some(f) = v.get("bscroll").and_then(|b| b.get("init_frame")) {
        check_keys(f, "/bscroll/init_frame", FRAME)?;
    }
    Ok(())
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        use serde_path_to_error::Segment;
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{key}")),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    out
}

/// Parses and validates a configuration document.
pub fn parse(text: &str) -> Result<Config, ConfigError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| ConfigError::new("", format!("invalid JSON: {e}")))?;
    if !value.is_object() {
        return Err(ConfigError::new("", "expected a JSON object"));
    }
    unknown_keys(&value)?;
    let cfg: Config = serde_path_to_error::deserialize(&value).map_err(|e| {
        let pointer = pointer_of(e.path());
        ConfigError::new(pointer, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn finite(pointer: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(pointer, "must be finite"))
    }
}

fn positive(pointer: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(pointer, "must be positive"))
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        finite("/tau", self.tau)?;
        if self.tau == 0.0 {
            return Err(ConfigError::new("/tau", "tau must be non-zero"));
        }
        let t = &self.tolerances;
        positive("/tolerances/level", t.level)?;
        positive("/tolerances/classify", t.classify)?;
        positive("/tolerances/loop", t.loop_)?;
        positive("/tolerances/harmonic", t.harmonic)?;

        if self.mode == Mode::Bscroll {
            for (key, present) in [
                ("gauss_map", self.gauss_map.is_some()),
                ("gauss_grid", self.gauss_grid.is_some()),
                ("grid", self.grid.is_some()),
            ] {
                if present {
                    return Err(ConfigError::new(
                        format!("/{key}"),
                        "not used in mode bscroll",
                    ));
                }
            }
            let b = self
                .bscroll
                .as_ref()
                .ok_or_else(|| ConfigError::new("/bscroll", "required in mode bscroll"))?;
            return b.validate();
        }

        if self.bscroll.is_some() {
            return Err(ConfigError::new("/bscroll", "only used in mode bscroll"));
        }
        match (&self.gauss_map, &self.gauss_grid) {
            (Some(src), None) => {
                expr::parse(src).map_err(|e| ConfigError::new("/gauss_map", e.to_string()))?;
            }
            (None, Some(_)) => {}
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(
                    "/gauss_grid",
                    "give either gauss_map or gauss_grid",
                ))
            }
            (None, None) => return Err(ConfigError::new("/gauss_map", "required in this mode")),
        }
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| ConfigError::new("/grid", "required in this mode"))?;
        for (k, v) in [
            ("x_min", g.x_min),
            ("x_max", g.x_max),
            ("y_min", g.y_min),
            ("y_max", g.y_max),
        ] {
            finite(&format!("/grid/{k}"), v)?;
        }
        if !(g.x_min < g.x_max) {
            return Err(ConfigError::new("/grid/x_max", "must exceed x_min"));
        }
        if !(g.y_min < g.y_max) {
            return Err(ConfigError::new("/grid/y_max", "must exceed y_min"));
        }
        let min_n = if self.gauss_grid.is_some() { 5 } else { 2 };
        if g.nx < min_n {
            return Err(ConfigError::new(
                "/grid/nx",
                format!("must be at least {min_n}"),
            ));
        }
        if g.ny < min_n {
            return Err(ConfigError::new(
                "/grid/ny",
                format!("must be at least {min_n}"),
            ));
        }
        if let Some([x, y]) = g.base {
            if !(x >= g.x_min && x <= g.x_max && y >= g.y_min && y <= g.y_max) {
                return Err(ConfigError::new("/grid/base", "must lie inside the grid"));
            }
        }
        Ok(())
    }

    /// Copy with every default made explicit, for the report.
    pub fn normalized(&self) -> Config {
        let mut c = self.clone();
        if let Some(g) = c.grid.as_mut() {
            if g.base.is_none() {
                g.base = Some([0.5 * (g.x_min + g.x_max), 0.5 * (g.y_min + g.y_max)]);
            }
        }
        c
    }

    /// Resolves `gauss_grid` against the directory of the config file.
    pub fn resolve_inputs(&mut self, config_path: &Path) {
        if let (Some(p), Some(dir)) = (self.gauss_grid.as_mut(), config_path.parent()) {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }
}

impl BScrollConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        expr::parse_profile(&self.kappa)
            .map_err(|e| ConfigError::new("/bscroll/kappa", e.to_string()))?;
        for (k, r) in [("s_range", self.s_range), ("t_range", self.t_range)] {
            finite(&format!("/bscroll/{k}/0"), r[0])?;
            finite(&format!("/bscroll/{k}/1"), r[1])?;
            if !(r[0] < r[1]) {
                return Err(ConfigError::new(
                    format!("/bscroll/{k}"),
                    "must be increasing",
                ));
            }
        }
        positive("/bscroll/step", self.step)?;
        if self.step > self.s_range[1] - self.s_range[0]
            || (self.s_range[1] - self.s_range[0]) / self.step > 1e7
        {
            return Err(ConfigError::new(
                "/bscroll/step",
                "step does not fit the s range",
            ));
        }
        if self.ns < 5 {
            return Err(ConfigError::new("/bscroll/ns", "must be at least 5"));
        }
        if self.nt < 5 {
            return Err(ConfigError::new("/bscroll/nt", "must be at least 5"));
        }
        if let Some(f) = &self.init_frame {
            finite("/bscroll/init_frame/s0", f.s0)?;
            if !(f.s0 >= self.s_range[0] && f.s0 <= self.s_range[1]) {
                return Err(ConfigError::new(
                    "/bscroll/init_frame/s0",
                    "must lie in s_range",
                ));
            }
            let d = f.state().defect();
            if !(d <= nilmin_core::bscroll::FRAME_TOL) {
                return Err(ConfigError::new(
                    "/bscroll/init_frame",
                    format!("not a null frame (defect {d:e})"),
                ));
            }
        } else if !(self.s_range[0] <= 0.0 && self.s_range[1] >= 0.0) {
            return Err(ConfigError::new(
                "/bscroll/init_frame",
                "required when s_range excludes 0",
            ));
        }
        Ok(())
    }

    pub fn init_state(&self) -> FrameState {
        self.init_frame
            .as_ref()
            .map_or_else(FrameState::standard, InitFrame::state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_BSCROLL: &str = r#"{
        "mode": "bscroll", "tau": 1,
        "bscroll": {"kappa": "2", "s_range": [-2, 2], "t_range": [-3, 3]}
    }"#;

    #[test]
    fn minimal_bscroll_gets_defaults() {
        let c = parse(MINIMAL_BSCROLL).unwrap();
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.outputs, Outputs::default());
        let b = c.bscroll.unwrap();
        assert_eq!((b.step, b.ns, b.nt), (1e-3, 81, 81));
        assert_eq!(b.init_state(), FrameState::standard());
    }

    #[test]
    fn zero_tau_points_at_tau() {
        let e = parse(&MINIMAL_BSCROLL.replace("\"tau\": 1", "\"tau\": 0")).unwrap_err();
        assert_eq!(e.pointer, "/tau");
    }

    #[test]
    fn unknown_key_suggests() {
        let src = r#"{"mode": "validate", "gaussmap": "z", "tau": 1}"#;
        let e = parse(src).unwrap_err();
        assert_eq!(e.pointer, "/gaussmap");
        assert!(e.message.contains("\"gauss_map\""), "{}", e.message);
    }

    #[test]
    fn nested_type_error_has_pointer() {
        let src = r#"{"mode": "validate", "gauss_map": "z", "tau": 1,
            "grid": {"x_min": 0, "x_max": 1, "y_min": 0, "y_max": 1, "nx": "ten", "ny": 3}}"#;
        assert_eq!(parse(src).unwrap_err().pointer, "/grid/nx");
        let src = src.replace("\"ten\"", "1");
        assert_eq!(parse(&src).unwrap_err().pointer, "/grid/nx");
    }

    #[test]
    fn bad_expression_points_at_gauss_map() {
        let src = r#"{"mode": "synthesize", "gauss_map": "z +", "tau": 1,
            "grid": {"x_min": 0, "x_max": 1, "y_min": 0, "y_max": 1, "nx": 3, "ny": 3}}"#;
        assert_eq!(parse(src).unwrap_err().pointer, "/gauss_map");
    }

    #[test]
    fn mode_sections_are_exclusive() {
        let src = MINIMAL_BSCROLL.replace("\"tau\": 1", "\"tau\": 1, \"gauss_map\": \"z\"");
        assert_eq!(parse(&src).unwrap_err().pointer, "/gauss_map");
    }
}
