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

//! Gauss-map samples and the Lorentzian harmonic map equation.
//!
//! A nowhere vertical timelike minimal surface is encoded by its normal Gauss
//! map `g` (with `|g|^2 != -1`) and the density
//! `omega_hat = -j conj(g_zbar) / (1 + |g|^2)^2`. `g` must satisfy
//! `g_{z zbar} = 2 gbar g_z g_zbar / (1 + |g|^2)`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::expr::{self, Ast};
use crate::fd;
use crate::grid::GridSpec;
use crate::math;
use crate::paracomplex::{Jet1, Jet2, Paracomplex};

/// Tolerance on `| |g|^2 + 1 |` below which a sample is refused.
pub const VERTICAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum HarmonicError {
    #[error("vertical point at ({x}, {y}): |g|^2 = -1")]
    VerticalPoint { x: f64, y: f64 },
    #[error("stereographic projection from the pole nu3 = -1")]
    ProjectionPole,
    #[error("Gauss map not defined at ({x}, {y}): null divisor at byte {position}")]
    Eval { position: usize, x: f64, y: f64 },
    #[error("point ({x}, {y}) is not a node or edge midpoint of the sampled grid")]
    OffLattice { x: f64, y: f64 },
    #[error("Gauss map produced a non-finite value at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("tau must be non-zero")]
    ZeroTau,
    #[error("sampled grid needs {needed} values and at least 5 nodes per axis, got {got}")]
    GridShape { needed: usize, got: usize },
}

/// Anything that yields the second-order jet of `g` at a point.
pub trait GaussSource {
    fn jet(&self, z: Paracomplex) -> Result<Jet2, HarmonicError>;
}

impl GaussSource for Ast {
    fn jet(&self, z: Paracomplex) -> Result<Jet2, HarmonicError> {
        expr::eval_jet(self, z).map_err(|e| HarmonicError::Eval {
            position: e.position,
            x: z.re,
            y: z.im,
        })
    }
}

/// `g` sampled on a lattice. Derivatives come from 5-point stencils
/// (shifted at the border); edge midpoints are reached by 4-point
/// interpolation of the node jets along the edge.
#[derive(Clone, Debug)]
pub struct GridField {
    spec: GridSpec,
    values: Vec<Paracomplex>,
}

impl GridField {
    /// `values` is row-major with `x` fastest, as in [`GridSpec::index`].
    pub fn new(spec: GridSpec, values: Vec<Paracomplex>) -> Result<Self, HarmonicError> {
        let needed = spec.len();
        if values.len() != needed || spec.nx < 5 || spec.ny < 5 {
            return Err(HarmonicError::GridShape {
                needed,
                got: values.len(),
            });
        }
        Ok(GridField { spec, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn at(&self, i: usize, j: usize) -> Paracomplex {
        self.values[self.spec.index(i, j)]
    }

    pub fn node_jet(&self, i: usize, j: usize) -> Jet2 {
        let s = &self.spec;
        let (sx, wx) = fd::lattice_stencil(i, s.nx, 5, s.hx(), 2).expect("nx >= 5");
        let (sy, wy) = fd::lattice_stencil(j, s.ny, 5, s.hy(), 2).expect("ny >= 5");
        let mut gx = Paracomplex::ZERO;
        let mut gxx = Paracomplex::ZERO;
        let mut gy = Paracomplex::ZERO;
        let mut gyy = Paracomplex::ZERO;
        let mut gxy = Paracomplex::ZERO;
        for a in 0..5 {
            let vx = self.at(sx + a, j);
            gx += vx.scale(wx[1][a]);
            gxx += vx.scale(wx[2][a]);
            let vy = self.at(i, sy + a);
            gy += vy.scale(wy[1][a]);
            gyy += vy.scale(wy[2][a]);
            for b in 0..5 {
                gxy += self.at(sx + a, sy + b).scale(wx[1][a] * wy[1][b]);
            }
        }
        jet_from_partials(self.at(i, j), gx, gy, gxx, gxy, gyy)
    }

    fn mid_jet(&self, along_x: bool, i: usize, j: usize) -> Jet2 {
        let n = if along_x { self.spec.nx } else { self.spec.ny };
        let k = if along_x { i } else { j };
        let start = k.saturating_sub(1).min(n - 4);
        let nodes: Vec<f64> = (0..4).map(|a| (start + a) as f64).collect();
        let w = fd::weights(k as f64 + 0.5, &nodes, 0);
        let mut out = Jet2::default();
        for (a, wa) in w[0].iter().enumerate() {
            let jet = if along_x {
                self.node_jet(start + a, j)
            } else {
                self.node_jet(i, start + a)
            };
            out = out + jet.scale(Paracomplex::real(*wa));
        }
        out
    }
}

impl GaussSource for GridField {
    fn jet(&self, z: Paracomplex) -> Result<Jet2, HarmonicError> {
        let s = &self.spec;
        let off = HarmonicError::OffLattice { x: z.re, y: z.im };
        let fi = 2.0 * (z.re - s.x_min) / s.hx();
        let fj = 2.0 * (z.im - s.y_min) / s.hy();
        let (ri, rj) = (math::round(fi), math::round(fj));
        if math::abs(fi - ri) > 1e-7 || math::abs(fj - rj) > 1e-7 || ri < 0.0 || rj < 0.0 {
            return Err(off);
        }
        let (hi, hj) = (ri as usize, rj as usize);
        if hi > 2 * (s.nx - 1) || hj > 2 * (s.ny - 1) {
            return Err(off);
        }
        match (hi % 2, hj % 2) {
            (0, 0) => Ok(self.node_jet(hi / 2, hj / 2)),
            (1, 0) => Ok(self.mid_jet(true, hi / 2, hj / 2)),
            (0, 1) => Ok(self.mid_jet(false, hi / 2, hj / 2)),
            _ => Err(off),
        }
    }
}

/// Builds a `(z, zbar)` jet from Cartesian partial derivatives.
pub fn jet_from_partials(
    v: Paracomplex,
    fx: Paracomplex,
    fy: Paracomplex,
    fxx: Paracomplex,
    fxy: Paracomplex,
    fyy: Paracomplex,
) -> Jet2 {
    let jfy = fy.mul_j();
    let jfxy = fxy.mul_j().scale(2.0);
    Jet2 {
        v,
        dz: (fx + jfy).scale(0.5),
        dzb: (fx - jfy).scale(0.5),
        dzz: (fxx + jfxy + fyy).scale(0.25),
        dzzb: (fxx - fyy).scale(0.25),
        dzbzb: (fxx - jfxy + fyy).scale(0.25),
    }
}

pub enum Source {
    Closed(Ast),
    Grid(GridField),
    Custom(Box<dyn GaussSource + Send + Sync>),
}

pub struct HarmonicField {
    pub source: Source,
    tau: f64,
}

impl HarmonicField {
    pub fn new(source: Source, tau: f64) -> Result<Self, HarmonicError> {
        if tau == 0.0 || !tau.is_finite() {
            return Err(HarmonicError::ZeroTau);
        }
        Ok(HarmonicField { source, tau })
    }

    pub fn closed(ast: Ast, tau: f64) -> Result<Self, HarmonicError> {
        Self::new(Source::Closed(ast), tau)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn jet(&self, z: Paracomplex) -> Result<Jet2, HarmonicError> {
        let jet = match &self.source {
            Source::Closed(ast) => ast.jet(z),
            Source::Grid(g) => g.jet(z),
            Source::Custom(c) => c.jet(z),
        }?;
        if !jet.is_finite() {
            return Err(HarmonicError::NonFinite { x: z.re, y: z.im });
        }
        Ok(jet)
    }

    pub fn sample(&self, z: Paracomplex) -> Result<GaussSample, HarmonicError> {
        GaussSample::from_jet(z, self.jet(z)?)
    }
}

/// `g` with derivatives and the derived density `omega_hat` at `z`.
#[derive(Clone, Copy, Debug)]
pub struct GaussSample {
    pub z: Paracomplex,
    pub g: Jet2,
    pub omega_hat: Paracomplex,
    pub omega_hat_z: Paracomplex,
    pub omega_hat_zb: Paracomplex,
}

impl GaussSample {
    pub fn from_jet(z: Paracomplex, g: Jet2) -> Result<Self, HarmonicError> {
        let m = g.v.modulus_sq();
        if math::abs(m + 1.0) < VERTICAL_TOL {
            return Err(HarmonicError::VerticalPoint { x: z.re, y: z.im });
        }
        let omega = omega_jet(&g).map_err(|_| HarmonicError::VerticalPoint { x: z.re, y: z.im })?;
        Ok(GaussSample {
            z,
            g,
            omega_hat: omega.v,
            omega_hat_z: omega.dz,
            omega_hat_zb: omega.dzb,
        })
    }

    pub fn omega_jet(&self) -> Jet1 {
        Jet1::new(self.omega_hat, self.omega_hat_z, self.omega_hat_zb)
    }

    /// `|g|^2`.
    pub fn m(&self) -> f64 {
        self.g.v.modulus_sq()
    }
}

/// `omega_hat` differentiated straight from its defining formula.
fn omega_jet(g: &Jet2) -> Result<Jet1, crate::paracomplex::NullDivisor> {
    let g1 = g.first_order();
    let gbar_z = g.conj().z_derivative();
    let m = g1 * g1.conj();
    let den = (m + Paracomplex::ONE).powi(2)?;
    gbar_z.scale(-Paracomplex::J).checked_div(den)
}

/// `g_{z zbar} - 2 gbar g_z g_zbar / (1 + |g|^2)`; zero iff harmonic.
pub fn harmonic_residual(s: &GaussSample) -> Paracomplex {
    let g = &s.g;
    let k = 2.0 / (1.0 + s.m());
    g.dzzb - (g.v.conj() * g.dz * g.dzb).scale(k)
}

/// Residuals of `omega_hat_zbar = -2j |omega_hat|^2 (1 + |g|^2) gbar` and
/// `g_zbar = j (1 + |g|^2)^2 conj(omega_hat)`.
pub fn dirac_residuals(s: &GaussSample) -> (Paracomplex, Paracomplex) {
    let w = s.omega_hat;
    let onep = 1.0 + s.m();
    let rhs1 = (Paracomplex::J * s.g.v.conj()).scale(-2.0 * w.modulus_sq() * onep);
    let rhs2 = (Paracomplex::J * w.conj()).scale(onep * onep);
    (s.omega_hat_zb - rhs1, s.g.dzb - rhs2)
}

/// A point of the de Sitter sphere `nu1^2 - nu2^2 + nu3^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeSitterPoint {
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

impl DeSitterPoint {
    /// `nu1^2 - nu2^2 + nu3^2`.
    pub fn quadratic_form(&self) -> f64 {
        self.nu1 * self.nu1 - self.nu2 * self.nu2 + self.nu3 * self.nu3
    }
}

/// `(g + gbar, j (g - gbar), 1 - |g|^2) / (1 + |g|^2)`.
pub fn to_de_sitter(g: Paracomplex) -> Result<DeSitterPoint, HarmonicError> {
    let m = g.modulus_sq();
    if math::abs(m + 1.0) < VERTICAL_TOL {
        return Err(HarmonicError::VerticalPoint { x: g.re, y: g.im });
    }
    let k = 1.0 / (1.0 + m);
    Ok(DeSitterPoint {
        nu1: 2.0 * g.re * k,
        nu2: 2.0 * g.im * k,
        nu3: (1.0 - m) * k,
    })
}

/// Inverse of [`to_de_sitter`]: `(nu1 + j nu2) / (1 + nu3)`.
pub fn stereographic(nu: DeSitterPoint) -> Result<Paracomplex, HarmonicError> {
    let d = 1.0 + nu.nu3;
    if math::abs(d) <= 1e-14 {
        return Err(HarmonicError::ProjectionPole);
    }
    Ok(Paracomplex::new(nu.nu1 / d, nu.nu2 / d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrregularReason {
    /// `omega_hat = 0` at a finite value of `g`.
    OmegaVanishes,
    /// `|g|^2` very large while `|g^2 omega_hat|^2` is small.
    GaussPole,
    Vertical,
    Undefined,
}

#[derive(Clone, Copy, Debug)]
pub struct RegularityFlag {
    pub i: usize,
    pub j: usize,
    pub z: Paracomplex,
    pub reason: IrregularReason,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularityStatus {
    Regular,
    Irregular,
    /// The field is not harmonic, so regularity is not assessed.
    NotHarmonic,
}

#[derive(Clone, Debug)]
pub struct RegularityReport {
    pub status: RegularityStatus,
    pub max_harmonic_residual: f64,
    pub flags: Vec<RegularityFlag>,
}

/// Scans the grid nodes. `harmonic_tol` bounds the harmonic residual and
/// `tol` decides when `omega_hat` counts as zero.
pub fn regularity_check(
    field: &HarmonicField,
    grid: &GridSpec,
    harmonic_tol: f64,
    tol: f64,
) -> RegularityReport {
    let mut flags = Vec::new();
    let mut samples = Vec::new();
    let mut max_res: f64 = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let z = grid.node(i, j);
            match field.sample(z) {
                Ok(s) => {
                    max_res = max_res.max(harmonic_residual(&s).max_abs());
                    samples.push((i, j, s));
                }
                Err(e) => {
                    let reason = match e {
                        HarmonicError::VerticalPoint { .. } => IrregularReason::Vertical,
                        _ => IrregularReason::Undefined,
                    };
                    flags.push(RegularityFlag { i, j, z, reason });
                }
            }
        }
    }
    if max_res > harmonic_tol {
        return RegularityReport {
            status: RegularityStatus::NotHarmonic,
            max_harmonic_residual: max_res,
            flags: Vec::new(),
        };
    }
    for (i, j, s) in samples {
        let w = s.omega_hat;
        let gmax = s.g.v.max_abs();
        if gmax > 1.0 / tol {
            if (s.g.v * s.g.v * w).max_abs() < tol {
                flags.push(RegularityFlag {
                    i,
                    j,
                    z: s.z,
                    reason: IrregularReason::GaussPole,
                });
            }
        } else if w.max_abs() < tol {
            flags.push(RegularityFlag {
                i,
                j,
                z: s.z,
                reason: IrregularReason::OmegaVanishes,
            });
        }
    }
    let status = if flags.is_empty() {
        RegularityStatus::Regular
    } else {
        RegularityStatus::Irregular
    };
    RegularityReport {
        status,
        max_harmonic_residual: max_res,
        flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(src: &str) -> HarmonicField {
        HarmonicField::closed(expr::parse(src).unwrap(), 1.0).unwrap()
    }

    fn p(re: f64, im: f64) -> Paracomplex {
        Paracomplex::new(re, im)
    }

    #[test]
    fn omega_examples() {
        let s = field("conj(z)").sample(Paracomplex::ZERO).unwrap();
        assert!(s.omega_hat.approx_eq(p(0.0, -1.0), 1e-15));
        let s = field("conj(z)").sample(Paracomplex::ONE).unwrap();
        assert!(s.omega_hat.approx_eq(p(0.0, -0.25), 1e-15));
        let s = field("0.3 + 0.2*j").sample(p(0.4, 0.1)).unwrap();
        assert!(s.omega_hat.max_abs() == 0.0);
    }

    #[test]
    fn residual_examples() {
        for src in ["conj(z)", "z"] {
            let s = field(src).sample(p(0.3, -0.2)).unwrap();
            assert!(harmonic_residual(&s).max_abs() < 1e-15);
        }
        let s = field("z*conj(z)").sample(Paracomplex::ZERO).unwrap();
        assert!(harmonic_residual(&s).approx_eq(Paracomplex::ONE, 1e-15));
        let s = field("conj(z)").sample(Paracomplex::ZERO).unwrap();
        let (a, b) = dirac_residuals(&s);
        assert!(a.max_abs() < 1e-15 && b.max_abs() < 1e-15);
        let s = field("2").sample(p(0.1, 0.1)).unwrap();
        let (a, b) = dirac_residuals(&s);
        assert!(a.max_abs() == 0.0 && b.max_abs() == 0.0);
    }

    #[test]
    fn vertical_points_are_refused() {
        let err = field("j").sample(Paracomplex::ZERO).unwrap_err();
        assert!(matches!(err, HarmonicError::VerticalPoint { .. }));
        assert!(to_de_sitter(p(0.0, 1.0)).is_err());
    }

    #[test]
    fn de_sitter_examples() {
        let nu = to_de_sitter(Paracomplex::ZERO).unwrap();
        assert_eq!((nu.nu1, nu.nu2, nu.nu3), (0.0, 0.0, 1.0));
        let nu = to_de_sitter(Paracomplex::ONE).unwrap();
        assert_eq!((nu.nu1, nu.nu2, nu.nu3), (1.0, 0.0, 0.0));
        let back = stereographic(DeSitterPoint {
            nu1: 1.0,
            nu2: 0.0,
            nu3: 0.0,
        })
        .unwrap();
        assert!(back.approx_eq(Paracomplex::ONE, 1e-15));
        let pole = DeSitterPoint {
            nu1: 0.0,
            nu2: 0.0,
            nu3: -1.0,
        };
        assert!(matches!(
            stereographic(pole),
            Err(HarmonicError::ProjectionPole)
        ));
    }

    #[test]
    fn regularity_examples() {
        let grid = GridSpec::new((-0.5, 0.5), (-0.5, 0.5), 6, 6);
        let r = regularity_check(&field("conj(z)"), &grid, 1e-10, 1e-12);
        assert_eq!(r.status, RegularityStatus::Regular);
        let r = regularity_check(&field("0.5"), &grid, 1e-10, 1e-12);
        assert_eq!(r.status, RegularityStatus::Irregular);
        assert_eq!(r.flags.len(), 36);
        let r = regularity_check(&field("z*conj(z)"), &grid, 1e-10, 1e-12);
        assert_eq!(r.status, RegularityStatus::NotHarmonic);
    }

    #[test]
    fn grid_field_matches_closed_form() {
        let ast = expr::parse("sinh(conj(z)) + 0.3*conj(z)^2").unwrap();
        let spec = GridSpec::new((-0.5, 0.5), (-0.4, 0.4), 41, 33);
        let mut vals = Vec::new();
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                vals.push(expr::eval(&ast, spec.node(i, j)).unwrap());
            }
        }
        let gf = GridField::new(spec, vals).unwrap();
        for (fi, fj) in [(3.0, 4.0), (0.0, 0.0), (10.5, 7.0), (40.0, 31.5)] {
            let z = spec.point_at(fi, fj);
            let a = gf.jet(z).unwrap();
            let b = expr::eval_jet(&ast, z).unwrap();
            for (u, v) in [(a.v, b.v), (a.dz, b.dz), (a.dzb, b.dzb), (a.dzbzb, b.dzbzb)] {
                assert!(u.approx_eq(v, 1e-4), "{fi},{fj}: {u} vs {v}");
            }
        }
        assert!(gf.jet(spec.point_at(0.25, 1.0)).is_err());
    }
}
