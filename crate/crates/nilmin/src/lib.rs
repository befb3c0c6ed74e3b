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

//! Configuration, file formats and the run pipeline behind the `nilmin`
//! command.

pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod run;

pub use config::{Config, ConfigError};
pub use error::RunError;
pub use run::{run, RunOptions};

use std::path::Path;

/// Reads and validates a config file; relative input paths are resolved
/// against its directory.
pub fn load_config(path: &Path) -> Result<Config, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e.to_string()))?;
    let mut cfg = config::parse(&text)?;
    cfg.resolve_inputs(path);
    Ok(cfg)
}
