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

use std::path::Path;

use crate::config::ConfigError;

/// Everything that stops a run, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// Numerical failure: non-harmonic input, a lost curve, a non-closed
    /// form, or any other refusal of the core routines.
    #[error("{kind}: {message}")]
    Numerical { kind: &'static str, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl RunError {
    pub fn config(pointer: &str, message: impl Into<String>) -> Self {
        RunError::Config(ConfigError::new(pointer, message))
    }

    pub fn io(path: &Path, message: impl Into<String>) -> Self {
        RunError::Io {
            path: path.display().to_string(),
            message: message.into(),
        }
    }

    pub fn numerical(kind: &'static str, err: impl std::fmt::Display) -> Self {
        RunError::Numerical {
            kind,
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical { .. } => 3,
            RunError::Io { .. } => 4,
        }
    }
}
