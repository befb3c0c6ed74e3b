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

//! Representation formulas: the timelike minimal surface `f` in `Nil3(tau)`
//! and its CMC `tau` dual `f_L` in Minkowski space.
//!
//! With `phi = ((g^2+1), j(g^2-1), 2g) omega_hat / tau`, `f_z` has frame
//! coefficients `phi` in `E1, E2, E3` and `(f_L)_z = (phi1, phi2, j phi3)`.
//! Every real 1-form `2 Re(F dz)` is integrated as `2 Re F dx + 2 Im F dy`.

use alloc::vec::Vec;

use crate::curvature::TangentField;
use crate::grid::{GridError, GridSpec};
use crate::harmonic::{harmonic_residual, GaussSample, HarmonicError, HarmonicField};
use crate::math;
use crate::paracomplex::{Jet1, Paracomplex};
use crate::vec3::Vec3;

/// Threshold on `|1 - |g|^2|` and similar denominators.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum SurfaceError {
    #[error("input is not harmonic: residual {max:e} exceeds {tol:e} at ({x}, {y})")]
    NonHarmonicInput { max: f64, tol: f64, x: f64, y: f64 },
    #[error("Gauss map on the singular stratum |g|^2 = 1; the normal is undefined")]
    GaussSingular,
    #[error("vertical point |g|^2 = -1")]
    VerticalPoint,
    #[error("degenerate frame: 2(g + gbar)^2 + (1 - |g|^2)^2 = 0")]
    FrameDegenerate,
    #[error(transparent)]
    Sample(#[from] HarmonicError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Coefficients of `f_z` in the frame `E1, E2, E3`.
#[derive(Clone, Copy, Debug)]
pub struct TangentCoeffs {
    pub phi1: Paracomplex,
    pub phi2: Paracomplex,
    pub phi3: Paracomplex,
}

impl TangentCoeffs {
    /// `-phi1^2 + phi2^2 + phi3^2`, zero for a conformal immersion.
    pub fn nullity(&self) -> Paracomplex {
        -(self.phi1 * self.phi1) + self.phi2 * self.phi2 + self.phi3 * self.phi3
    }

    /// `f_x` in the E-frame: `2 Re phi`.
    pub fn fx(&self) -> Vec3 {
        Vec3::new(2.0 * self.phi1.re, 2.0 * self.phi2.re, 2.0 * self.phi3.re)
    }

    /// `f_y` in the E-frame: `2 Im phi`.
    pub fn fy(&self) -> Vec3 {
        Vec3::new(2.0 * self.phi1.im, 2.0 * self.phi2.im, 2.0 * self.phi3.im)
    }
}

pub fn phi_from_data(s: &GaussSample, tau: f64) -> TangentCoeffs {
    let g = s.g.v;
    let w = s.omega_hat.scale(1.0 / tau);
    let g2 = g * g;
    TangentCoeffs {
        phi1: (g2 + Paracomplex::ONE) * w,
        phi2: Paracomplex::J * (g2 - Paracomplex::ONE) * w,
        phi3: (g * w).scale(2.0),
    }
}

/// `(f_L)_z` written out from the Minkowski representation formula.
pub fn minkowski_derivative(s: &GaussSample, tau: f64) -> [Paracomplex; 3] {
    let g = s.g.v;
    let w = s.omega_hat.scale(1.0 / tau);
    let g2 = g * g;
    [
        (g2 + Paracomplex::ONE) * w,
        Paracomplex::J * (g2 - Paracomplex::ONE) * w,
        (Paracomplex::J * g * w).scale(2.0),
    ]
}

/// Levi-Civita connection of the Lorentzian metric on `Nil3(tau)` with `E1`
/// timelike, in the left-invariant frame.
#[derive(Clone, Copy, Debug)]
pub struct ConnectionTable {
    /// `nabla[k][i]` holds the coefficients of `nabla_{E_k} E_i`.
    pub nabla: [[Vec3; 3]; 3],
    pub tau: f64,
}

impl ConnectionTable {
    pub fn new(tau: f64) -> Self {
        let z = Vec3::ZERO;
        let e1 = Vec3::new(tau, 0.0, 0.0);
        let e2 = Vec3::new(0.0, tau, 0.0);
        let e3 = Vec3::new(0.0, 0.0, tau);
        ConnectionTable {
            nabla: [[z, e3, -e2], [-e3, z, -e1], [-e2, -e1, z]],
            tau,
        }
    }

    /// `nabla_X Y` for constant-coefficient fields.
    pub fn apply(&self, x: Vec3, y: Vec3) -> Vec3 {
        let mut out = Vec3::ZERO;
        for k in 0..3 {
            for i in 0..3 {
                out += (x[k] * y[i]) * self.nabla[k][i];
            }
        }
        out
    }
}

/// Unit normal of `f` in the E-frame; blows up on `|g|^2 = 1`.
pub fn normal_nil(g: Paracomplex) -> Result<Vec3, SurfaceError> {
    let m = g.modulus_sq();
    if math::abs(1.0 - m) < POLE_TOL {
        return Err(SurfaceError::GaussSingular);
    }
    Ok(Vec3::new(2.0 * g.re, 2.0 * g.im, 1.0 + m).scale(1.0 / (1.0 - m)))
}

/// Unit normal of `f_L`: `-(j(g - gbar), g + gbar, 1 - |g|^2) / (1 + |g|^2)`.
pub fn normal_minkowski(g: Paracomplex) -> Result<Vec3, SurfaceError> {
    let m = g.modulus_sq();
    if math::abs(1.0 + m) < POLE_TOL {
        return Err(SurfaceError::VerticalPoint);
    }
    Ok(Vec3::new(2.0 * g.im, 2.0 * g.re, 1.0 - m).scale(-1.0 / (1.0 + m)))
}

/// Riemannian unit normal of the frontal `f`, finite across `|g|^2 = 1`.
pub fn normal_riemannian(g: Paracomplex) -> Result<Vec3, SurfaceError> {
    let m = g.modulus_sq();
    let rad = 8.0 * g.re * g.re + (1.0 - m) * (1.0 - m);
    if !(rad > 0.0) {
        return Err(SurfaceError::FrameDegenerate);
    }
    Ok(Vec3::new(-2.0 * g.re, 2.0 * g.im, 1.0 + m).scale(1.0 / math::sqrt(rad)))
}

/// Stereographic projection from the north pole of the unit timelike-normal
/// sphere: `(X1 + j X2) / (1 - X3)`.
pub fn stereographic_north(x: Vec3) -> Option<Paracomplex> {
    let d = 1.0 - x[2];
    if math::abs(d) < POLE_TOL {
        return None;
    }
    Some(Paracomplex::new(x[0] / d, x[1] / d))
}

#[derive(Clone, Copy, Debug)]
pub struct Differentials {
    /// Abresch-Rosenberg coefficient `-j g_z omega_hat`.
    pub q_ar: Paracomplex,
    /// Hopf coefficient of `f_L`, `-2j g_z omega_hat / tau`.
    pub q_l: Paracomplex,
}

pub fn differentials(s: &GaussSample, tau: f64) -> Differentials {
    let q_ar = -(Paracomplex::J * s.g.dz * s.omega_hat);
    Differentials {
        q_ar,
        q_l: q_ar.scale(2.0 / tau),
    }
}

/// `<(f_L)_zz, N_L>` computed from second derivatives of the representation,
/// an independent route to the Hopf coefficient.
pub fn hopf_direct(s: &GaussSample, tau: f64) -> Result<Paracomplex, SurfaceError> {
    let g = s.g.first_order();
    let w = s.omega_jet();
    let one = Paracomplex::ONE;
    let g2 = g * g;
    let f1: Jet1 = (g2 + one) * w;
    let f2: Jet1 = ((g2 + (-one)) * w).scale(Paracomplex::J);
    let f3: Jet1 = (g * w).scale(Paracomplex::J.scale(2.0));
    let n = normal_minkowski(s.g.v)?;
    let q = -(f1.dz.scale(n[0])) + f2.dz.scale(n[1]) + f3.dz.scale(n[2]);
    Ok(q.scale(1.0 / tau))
}

/// Max mismatch between the Nil and Minkowski integrands at a sample.
pub fn duality_check(s: &GaussSample, tau: f64) -> f64 {
    let phi = phi_from_data(s, tau);
    let l = minkowski_derivative(s, tau);
    let d1 = (phi.phi1 - l[0]).max_abs();
    let d2 = (phi.phi2 - l[1]).max_abs();
    let d3 = (Paracomplex::J * phi.phi3 - l[2]).max_abs();
    d1.max(d2).max(d3)
}

#[derive(Clone, Copy, Debug)]
pub struct FundamentalForms {
    /// Signed coefficient of `dz dzbar` in the metric induced on `f`.
    pub conf_factor_nil: f64,
    pub conf_factor_mink: f64,
    pub q_l: Paracomplex,
    pub q_ar: Paracomplex,
    /// Mean curvature of `f` estimated on the grid, when available.
    pub h_nil_est: Option<f64>,
}

pub fn fundamental_forms(s: &GaussSample, tau: f64) -> FundamentalForms {
    let m = s.m();
    let w2 = s.omega_hat.modulus_sq();
    let d = differentials(s, tau);
    FundamentalForms {
        conf_factor_nil: -4.0 * (1.0 - m) * (1.0 - m) * w2 / (tau * tau),
        conf_factor_mink: -4.0 * (1.0 + m) * (1.0 + m) * w2 / (tau * tau),
        q_l: d.q_l,
        q_ar: d.q_ar,
        h_nil_est: None,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IntegrationOptions {
    /// Refuse fields whose node harmonic residual exceeds this.
    pub harmonic_tol: f64,
    /// Position of the base node.
    pub origin_nil: Vec3,
    pub origin_mink: Vec3,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            harmonic_tol: 1e-8,
            origin_nil: Vec3::ZERO,
            origin_mink: Vec3::ZERO,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IntegrationDiagnostics {
    pub max_harmonic_residual: f64,
    /// Largest `|omega_hat_zbar|` mismatch of the structure equations.
    pub max_dirac_residual: f64,
    /// Largest absolute loop integral over a grid cell, over all forms.
    pub max_loop_abs: f64,
    /// Same, divided by the cell area.
    pub max_loop_per_area: f64,
    /// Same, divided by perimeter times the largest form coefficient.
    pub max_loop_rel: f64,
    /// Horizontal-first against vertical-first paths for `f1, f2, f_L`,
    /// relative to `1 + max |f|`.
    pub max_path_mismatch: f64,
    /// The same comparison for `f3`.
    pub max_path_mismatch_f3: f64,
}

/// Integrated surfaces on a grid, both in `Nil3(tau)` and in `L3`.
#[derive(Clone, Debug)]
pub struct SurfaceGrid {
    pub spec: GridSpec,
    pub base: (usize, usize),
    pub tau: f64,
    pub positions_nil: Vec<Vec3>,
    pub positions_mink: Vec<Vec3>,
    pub samples: Vec<GaussSample>,
    pub diagnostics: IntegrationDiagnostics,
}

impl SurfaceGrid {
    /// E-frame tangents `f_x, f_y` of `f` at every node.
    pub fn nil_tangents(&self) -> TangentField {
        let mut fx = Vec::with_capacity(self.samples.len());
        let mut fy = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            let phi = phi_from_data(s, self.tau);
            fx.push(phi.fx());
            fy.push(phi.fy());
        }
        TangentField::new(
            self.spec.nx,
            self.spec.ny,
            self.spec.hx(),
            self.spec.hy(),
            fx,
            fy,
        )
    }

    /// Tangents `(f_L)_x, (f_L)_y` at every node.
    pub fn mink_tangents(&self) -> TangentField {
        let mut fx = Vec::with_capacity(self.samples.len());
        let mut fy = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            let l = minkowski_derivative(s, self.tau);
            fx.push(Vec3::new(2.0 * l[0].re, 2.0 * l[1].re, 2.0 * l[2].re));
            fy.push(Vec3::new(2.0 * l[0].im, 2.0 * l[1].im, 2.0 * l[2].im));
        }
        TangentField::new(
            self.spec.nx,
            self.spec.ny,
            self.spec.hx(),
            self.spec.hy(),
            fx,
            fy,
        )
    }
}

/// Integration state `(f1, f2, f3, f_L3)`; `f_L1 = f1` and `f_L2 = f2`.
type State = [f64; 4];

/// Form coefficients at a sample: for each state component the paracomplex
/// `F` with `d(component) = 2 Re(F dz)`, given the running state.
fn forms(s: &GaussSample, tau: f64, y: &State) -> [Paracomplex; 4] {
    let phi = phi_from_data(s, tau);
    let f3 = phi.phi3 - phi.phi1.scale(tau * y[1]) + phi.phi2.scale(tau * y[0]);
    [phi.phi1, phi.phi2, f3, Paracomplex::J * phi.phi3]
}

fn rate(s: &GaussSample, tau: f64, y: &State, d: (f64, f64)) -> State {
    let f = forms(s, tau, y);
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = 2.0 * (f[k].re * d.0 + f[k].im * d.1);
    }
    out
}

fn axpy(y: &State, a: f64, k: &State) -> State {
    [
        y[0] + a * k[0],
        y[1] + a * k[1],
        y[2] + a * k[2],
        y[3] + a * k[3],
    ]
}

/// One classical RK4 step across an edge, using exact samples at both ends
/// and the midpoint.
fn rk4_edge(
    a: &GaussSample,
    m: &GaussSample,
    b: &GaussSample,
    tau: f64,
    y: &State,
    d: (f64, f64),
) -> State {
    let k1 = rate(a, tau, y, d);
    let k2 = rate(m, tau, &axpy(y, 0.5, &k1), d);
    let k3 = rate(m, tau, &axpy(y, 0.5, &k2), d);
    let k4 = rate(b, tau, &axpy(y, 1.0, &k3), d);
    let mut out = *y;
    for i in 0..4 {
        out[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    out
}

/// Samples at nodes and at the midpoints of horizontal and vertical edges.
struct Lattice {
    spec: GridSpec,
    nodes: Vec<GaussSample>,
    hmid: Vec<GaussSample>,
    vmid: Vec<GaussSample>,
}

impl Lattice {
    fn sample(field: &HarmonicField, spec: GridSpec) -> Result<Lattice, SurfaceError> {
        let (nx, ny) = (spec.nx, spec.ny);
        let mut nodes = Vec::with_capacity(nx * ny);
        let mut hmid = Vec::with_capacity((nx - 1) * ny);
        let mut vmid = Vec::with_capacity(nx * (ny - 1));
        for j in 0..ny {
            for i in 0..nx {
                nodes.push(field.sample(spec.point_at(i as f64, j as f64))?);
                if i + 1 < nx {
                    hmid.push(field.sample(spec.point_at(i as f64 + 0.5, j as f64))?);
                }
            }
        }
        for j in 0..ny - 1 {
            for i in 0..nx {
                vmid.push(field.sample(spec.point_at(i as f64, j as f64 + 0.5))?);
            }
        }
        Ok(Lattice {
            spec,
            nodes,
            hmid,
            vmid,
        })
    }

    fn node(&self, i: usize, j: usize) -> &GaussSample {
        &self.nodes[j * self.spec.nx + i]
    }

    /// Step from `(i, j)` to a neighbour, returning the new state.
    fn step(&self, tau: f64, y: &State, from: (usize, usize), to: (usize, usize)) -> State {
        let (hx, hy) = (self.spec.hx(), self.spec.hy());
        let (i0, j0) = from;
        let (i1, j1) = to;
        let (mid, d) = if j0 == j1 {
            let i = i0.min(i1);
            let sign = if i1 > i0 { 1.0 } else { -1.0 };
            (&self.hmid[j0 * (self.spec.nx - 1) + i], (sign * hx, 0.0))
        } else {
            let j = j0.min(j1);
            let sign = if j1 > j0 { 1.0 } else { -1.0 };
            (&self.vmid[j * self.spec.nx + i0], (0.0, sign * hy))
        };
        rk4_edge(self.node(i0, j0), mid, self.node(i1, j1), tau, y, d)
    }

    /// Integrates from the base along a row (or column) first, then along
    /// every column (or row).
    fn integrate(&self, tau: f64, base: (usize, usize), y0: State, rows_first: bool) -> Vec<State> {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        let mut out = alloc::vec![[0.0; 4]; nx * ny];
        let (ib, jb) = base;
        out[jb * nx + ib] = y0;
        let sweep = |out: &mut Vec<State>, start: (usize, usize), along_x: bool| {
            let (len, k0) = if along_x {
                (nx, start.0)
            } else {
                (ny, start.1)
            };
            let at = |k: usize| if along_x { (k, start.1) } else { (start.0, k) };
            for k in k0 + 1..len {
                let (p, q) = (at(k - 1), at(k));
                out[q.1 * nx + q.0] = self.step(tau, &out[p.1 * nx + p.0], p, q);
            }
            for k in (0..k0).rev() {
                let (p, q) = (at(k + 1), at(k));
                out[q.1 * nx + q.0] = self.step(tau, &out[p.1 * nx + p.0], p, q);
            }
        };
        sweep(&mut out, base, rows_first);
        if rows_first {
            for i in 0..nx {
                sweep(&mut out, (i, jb), false);
            }
        } else {
            for j in 0..ny {
                sweep(&mut out, (ib, j), true);
            }
        }
        out
    }
}

/// Integrates `f` and `f_L` over the grid. Both position sets are produced.
pub fn integrate(
    field: &HarmonicField,
    grid: &GridSpec,
    opts: &IntegrationOptions,
) -> Result<SurfaceGrid, SurfaceError> {
    grid.validate()?;
    let tau = field.tau();
    let lat = Lattice::sample(field, *grid)?;

    let mut diag = IntegrationDiagnostics::default();
    let mut worst = (0.0, Paracomplex::ZERO);
    for s in &lat.nodes {
        let r = harmonic_residual(s).max_abs();
        if !(r <= worst.0) {
            worst = (r, s.z);
        }
        let (d1, d2) = crate::harmonic::dirac_residuals(s);
        diag.max_dirac_residual = diag.max_dirac_residual.max(d1.max_abs()).max(d2.max_abs());
    }
    diag.max_harmonic_residual = worst.0;
    if !(worst.0 <= opts.harmonic_tol) {
        return Err(SurfaceError::NonHarmonicInput {
            max: worst.0,
            tol: opts.harmonic_tol,
            x: worst.1.re,
            y: worst.1.im,
        });
    }

    let base = grid.base_node();
    let o = opts.origin_nil;
    let y0 = [o[0], o[1], o[2], 0.0];
    let hv = lat.integrate(tau, base, y0, true);
    let vh = lat.integrate(tau, base, y0, false);

    let mut fmax: f64 = 0.0;
    let mut dmax: f64 = 0.0;
    let mut dmax3: f64 = 0.0;
    let mut f3max: f64 = 0.0;
    for (a, b) in hv.iter().zip(&vh) {
        fmax = fmax
            .max(math::abs(a[0]))
            .max(math::abs(a[1]))
            .max(math::abs(a[3]));
        f3max = f3max.max(math::abs(a[2]));
        let d = math::abs(a[0] - b[0])
            .max(math::abs(a[1] - b[1]))
            .max(math::abs(a[3] - b[3]));
        dmax = dmax.max(d);
        dmax3 = dmax3.max(math::abs(a[2] - b[2]));
    }
    diag.max_path_mismatch = dmax / (1.0 + fmax);
    diag.max_path_mismatch_f3 = dmax3 / (1.0 + f3max);

    loop_residuals(&lat, tau, &hv, &mut diag);

    let om = opts.origin_mink;
    let shift_l3 = om[2];
    let mut positions_nil = Vec::with_capacity(hv.len());
    let mut positions_mink = Vec::with_capacity(hv.len());
    for y in &hv {
        positions_nil.push(Vec3::new(y[0], y[1], y[2]));
        positions_mink.push(Vec3::new(
            y[0] - o[0] + om[0],
            y[1] - o[1] + om[1],
            y[3] + shift_l3,
        ));
    }
    Ok(SurfaceGrid {
        spec: *grid,
        base,
        tau,
        positions_nil,
        positions_mink,
        samples: lat.nodes,
        diagnostics: diag,
    })
}

/// Integrates only to read off `f_L`; same as [`integrate`].
pub fn integrate_minkowski(
    field: &HarmonicField,
    grid: &GridSpec,
    opts: &IntegrationOptions,
) -> Result<SurfaceGrid, SurfaceError> {
    integrate(field, grid, opts)
}

/// Integrates only to read off `f`; same as [`integrate`].
pub fn integrate_nil(
    field: &HarmonicField,
    grid: &GridSpec,
    opts: &IntegrationOptions,
) -> Result<SurfaceGrid, SurfaceError> {
    integrate(field, grid, opts)
}

fn loop_residuals(lat: &Lattice, tau: f64, hv: &[State], diag: &mut IntegrationDiagnostics) {
    let spec = lat.spec;
    let nx = spec.nx;
    let area = spec.cell_area();
    let perimeter = 2.0 * (spec.hx() + spec.hy());
    for j in 0..spec.ny - 1 {
        for i in 0..nx - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1), (i, j)];
            let y0 = hv[j * nx + i];
            let mut y = y0;
            let mut scale: f64 = 0.0;
            for w in corners.windows(2) {
                let f = forms(lat.node(w[0].0, w[0].1), tau, &y);
                for c in f {
                    scale = scale.max(2.0 * c.max_abs());
                }
                y = lat.step(tau, &y, w[0], w[1]);
            }
            for k in 0..4 {
                let r = math::abs(y[k] - y0[k]);
                diag.max_loop_abs = diag.max_loop_abs.max(r);
                diag.max_loop_per_area = diag.max_loop_per_area.max(r / area);
                let rel = if scale > 0.0 {
                    r / (perimeter * scale)
                } else {
                    0.0
                };
                diag.max_loop_rel = diag.max_loop_rel.max(rel);
            }
        }
    }
}
