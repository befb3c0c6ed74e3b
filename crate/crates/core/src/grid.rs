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

//! Uniform rectangular lattices in the `(x, y)` parameter plane.

use crate::math;
use crate::paracomplex::Paracomplex;

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid needs at least 2 nodes per axis, got {nx}x{ny}")]
    TooFewNodes { nx: usize, ny: usize },
    #[error("grid range must be finite and increasing")]
    BadRange,
    #[error("base point ({0}, {1}) lies outside the grid")]
    BaseOutside(f64, f64),
}

/// `nx * ny` nodes, row-major with `x` varying fastest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    /// Requested base point; integration starts at the nearest node.
    pub base: (f64, f64),
}

impl GridSpec {
    /// Grid with the base point at the centre of the rectangle.
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Self {
        GridSpec {
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
            nx,
            ny,
            base: (0.5 * (x.0 + x.1), 0.5 * (y.0 + y.1)),
        }
    }

    pub fn with_base(mut self, base: (f64, f64)) -> Self {
        self.base = base;
        self
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.nx < 2 || self.ny < 2 {
            return Err(GridError::TooFewNodes {
                nx: self.nx,
                ny: self.ny,
            });
        }
        let ok = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !ok || !(self.x_max > self.x_min) || !(self.y_max > self.y_min) {
            return Err(GridError::BadRange);
        }
        let (bx, by) = self.base;
        if !(bx >= self.x_min && bx <= self.x_max && by >= self.y_min && by <= self.y_max) {
            return Err(GridError::BaseOutside(bx, by));
        }
        Ok(())
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Coordinates at fractional lattice position, so half-integers address
    /// edge midpoints.
    pub fn point_at(&self, fi: f64, fj: f64) -> Paracomplex {
        Paracomplex::new(self.x_min + fi * self.hx(), self.y_min + fj * self.hy())
    }

    pub fn node(&self, i: usize, j: usize) -> Paracomplex {
        self.point_at(i as f64, j as f64)
    }

    pub fn base_node(&self) -> (usize, usize) {
        let fi = math::round((self.base.0 - self.x_min) / self.hx());
        let fj = math::round((self.base.1 - self.y_min) / self.hy());
        let clamp = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);
        (clamp(fi, self.nx), clamp(fj, self.ny))
    }

    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }
}
