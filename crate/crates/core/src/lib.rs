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

//! Timelike minimal surfaces in the Lorentzian Heisenberg group `Nil3(tau)`.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational:
//!
//! * [`paracomplex`]: split-complex scalars (`j^2 = 1`) and second-order
//!   Wirtinger jets in `(z, zbar)`.
//! * [`expr`]: a small expression language for closed-form Gauss maps.
//! * [`harmonic`]: Gauss-map samples, the Lorentzian harmonic map equation,
//!   the de Sitter sphere and regularity checks.
//! * [`surface`]: the representation formulas for the minimal surface in
//!   `Nil3(tau)` and its CMC dual in Minkowski space, normals and curvature.
//! * [`singular`]: singular set detection, curve tracing and classification
//!   of cuspidal edges, swallowtails and cuspidal cross caps.
//! * [`bscroll`]: null-frame integration, B-scrolls and the dual surfaces.
//!
//! File formats, configuration and the command line live in the `nilmin`
//! crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bscroll;
pub mod curvature;
pub mod expr;
pub mod fd;
pub mod grid;
pub mod harmonic;
mod math;
pub mod paracomplex;
pub mod singular;
pub mod surface;
pub mod vec3;

pub use grid::GridSpec;
pub use paracomplex::{Jet1, Jet2, NullDivisor, Paracomplex};
pub use vec3::Vec3;
