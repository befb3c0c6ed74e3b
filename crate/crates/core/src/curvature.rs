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

//! Mean curvature of a timelike surface from sampled tangent fields.
//!
//! Tangents are stored as frame coefficients: in the E-frame of `Nil3(tau)`
//! or in the standard basis of Minkowski space. Derivatives of the
//! coefficients along the coordinate lines are taken by finite differences
//! and the connection adds the frame rotation, so
//! `H = (E n - 2F m + G l) / (2(EG - F^2))`.

use alloc::vec::Vec;

use crate::fd;
use crate::math;
use crate::surface::ConnectionTable;
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum CurvatureError {
    #[error("node ({i}, {j}) is singular: EG - F^2 = {det:e}")]
    SingularNode { i: usize, j: usize, det: f64 },
    #[error("node ({i}, {j}) has no room for the stencil")]
    Boundary { i: usize, j: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilOrder {
    /// 3-point central differences.
    Second,
    /// 5-point central differences.
    Fourth,
}

impl StencilOrder {
    fn width(self) -> usize {
        match self {
            StencilOrder::Second => 3,
            StencilOrder::Fourth => 5,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Ambient {
    Nil(ConnectionTable),
    Minkowski,
}

/// Tangent vectors `f_x, f_y` on a uniform `nx * ny` lattice, row-major.
#[derive(Clone, Debug)]
pub struct TangentField {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub fx: Vec<Vec3>,
    pub fy: Vec<Vec3>,
}

impl TangentField {
    pub fn new(nx: usize, ny: usize, hx: f64, hy: f64, fx: Vec<Vec3>, fy: Vec<Vec3>) -> Self {
        assert_eq!(fx.len(), nx * ny);
        assert_eq!(fy.len(), nx * ny);
        TangentField {
            nx,
            ny,
            hx,
            hy,
            fx,
            fy,
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// `(EG - F^2)` at a node, in the Lorentzian product.
    pub fn metric_det(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.fx[self.idx(i, j)], self.fy[self.idx(i, j)]);
        let e = a.lorentz_dot(a);
        let f = a.lorentz_dot(b);
        let g = b.lorentz_dot(b);
        e * g - f * f
    }

    fn central(
        &self,
        field: &[Vec3],
        i: usize,
        j: usize,
        along_x: bool,
        order: StencilOrder,
    ) -> Vec3 {
        let w = order.width();
        let half = (w / 2) as isize;
        let nodes: Vec<f64> = (-half..=half).map(|k| k as f64).collect();
        let wts = fd::weights(0.0, &nodes, 1);
        let h = if along_x { self.hx } else { self.hy };
        let mut out = Vec3::ZERO;
        for (k, off) in (-half..=half).enumerate() {
            let (ii, jj) = if along_x {
                ((i as isize + off) as usize, j)
            } else {
                (i, (j as isize + off) as usize)
            };
            out += (wts[1][k] / h) * field[self.idx(ii, jj)];
        }
        out
    }

    /// Mean curvature at an interior node with respect to `normal_hint`'s
    /// side (the computed unit normal is flipped to agree with it).
    pub fn mean_curvature(
        &self,
        i: usize,
        j: usize,
        ambient: &Ambient,
        order: StencilOrder,
        normal_hint: Option<Vec3>,
        det_tol: f64,
    ) -> Result<f64, CurvatureError> {
        let r = order.width() / 2;
        if i < r || j < r || i + r >= self.nx || j + r >= self.ny {
            return Err(CurvatureError::Boundary { i, j });
        }
        let k = self.idx(i, j);
        let (a, b) = (self.fx[k], self.fy[k]);
        let e = a.lorentz_dot(a);
        let f = a.lorentz_dot(b);
        let g = b.lorentz_dot(b);
        let det = e * g - f * f;
        let mut n = a.lorentz_cross(b);
        let nn = n.lorentz_dot(n);
        if !(math::abs(det) > det_tol) || !(nn > 0.0) {
            return Err(CurvatureError::SingularNode { i, j, det });
        }
        n = n.scale(1.0 / math::sqrt(nn));
        if let Some(h) = normal_hint {
            if n.lorentz_dot(h) < 0.0 {
                n = -n;
            }
        }
        let mut dxx = self.central(&self.fx, i, j, true, order);
        let mut dxy = self.central(&self.fy, i, j, true, order);
        let mut dyy = self.central(&self.fy, i, j, false, order);
        if let Ambient::Nil(c) = ambient {
            dxx += c.apply(a, a);
            dxy += c.apply(a, b);
            dyy += c.apply(b, b);
        }
        let l = dxx.lorentz_dot(n);
        let m = dxy.lorentz_dot(n);
        let nv = dyy.lorentz_dot(n);
        Ok((e * nv - 2.0 * f * m + g * l) / (2.0 * det))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The hyperbolic cylinder `(sinh u, v, cosh u)` is timelike with constant
    /// mean curvature of magnitude 1/2 in `L3`.
    #[test]
    fn hyperbolic_cylinder() {
        let (nx, ny, h) = (9, 9, 0.05);
        let mut fx = Vec::new();
        let mut fy = Vec::new();
        for _j in 0..ny {
            for i in 0..nx {
                let u = -0.2 + i as f64 * h;
                fx.push(Vec3::new(libm::cosh(u), 0.0, libm::sinh(u)));
                fy.push(Vec3::new(0.0, 1.0, 0.0));
            }
        }
        let t = TangentField::new(nx, ny, h, h, fx, fy);
        let hm = t
            .mean_curvature(4, 4, &Ambient::Minkowski, StencilOrder::Fourth, None, 1e-12)
            .unwrap();
        assert!((hm.abs() - 0.5).abs() < 1e-6, "{hm}");
        assert!(matches!(
            t.mean_curvature(0, 4, &Ambient::Minkowski, StencilOrder::Fourth, None, 1e-12),
            Err(CurvatureError::Boundary { .. })
        ));
    }
}
