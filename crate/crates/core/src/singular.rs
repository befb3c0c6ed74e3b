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

//! Singular sets of the surface in `Nil3(tau)` and their classification.
//!
//! The singular set is `{|g|^2 = 1}` (stratum `SigmaG`) together with
//! `{|omega_hat|^2 = 0}` (stratum `SigmaOmega`). Points are located on grid
//! edges, traced into curves, and classified either from the Gauss-map ratio
//! `r = g_z / (g^2 omega_hat)` or from the dual curve `gamma_L = f_L o gamma`.
//! Equality conditions are only ever located as sign changes along a curve.

use alloc::vec::Vec;

use crate::grid::GridSpec;
use crate::harmonic::{GaussSample, HarmonicError, HarmonicField};
use crate::math;
use crate::paracomplex::{Jet1, Paracomplex};
use crate::surface::normal_riemannian;
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum SingularError {
    #[error("point ({x}, {y}) is not on the required stratum")]
    WrongStratum { x: f64, y: f64 },
    #[error("non-degeneracy fails on the curve at ({x}, {y})")]
    DegenerateOnCurve { x: f64, y: f64 },
    #[error("lost the singular curve near ({x}, {y})")]
    LostCurve { x: f64, y: f64 },
    #[error("curve samples too coarse: stencils of order 2 and 4 differ by {diff:e}")]
    TooCoarse { diff: f64 },
    #[error(transparent)]
    Sample(#[from] HarmonicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stratum {
    SigmaG,
    SigmaOmega,
    Both,
}

impl Stratum {
    pub fn name(self) -> &'static str {
        match self {
            Stratum::SigmaG => "sigma_g",
            Stratum::SigmaOmega => "sigma_omega",
            Stratum::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Front,
    CuspidalEdge,
    Swallowtail,
    CuspidalCrossCap,
    NonFront,
    Degenerate,
    Unresolved,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Front => "front",
            Kind::CuspidalEdge => "cuspidal_edge",
            Kind::Swallowtail => "swallowtail",
            Kind::CuspidalCrossCap => "cuspidal_cross_cap",
            Kind::NonFront => "non_front",
            Kind::Degenerate => "degenerate",
            Kind::Unresolved => "unresolved",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Level-set accuracy for located points.
    pub level: f64,
    /// Threshold for the "not equal" conditions of the criteria.
    pub classify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            level: 1e-9,
            classify: 1e-7,
        }
    }
}

/// Raw criteria values at a singular point.
#[derive(Clone, Copy, Debug, Default)]
pub struct Diagnostics {
    /// Signed area density.
    pub lambda: f64,
    pub re_r: Option<f64>,
    pub im_r: Option<f64>,
    /// `Im[(|g|^2)_zbar (Im r)_z]`.
    pub third_sw: Option<f64>,
    /// `Im[(|g|^2)_zbar (Re r)_z]`.
    pub third_ccr: Option<f64>,
    /// `det(gamma', eta)` from the tangent and null direction.
    pub det_direct: Option<f64>,
    /// The same determinant from its closed-form expression.
    pub det_formula: Option<f64>,
    /// `|dN_R(eta)|` for a unit `eta`; zero means not a front.
    pub front_measure: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SingularPoint {
    pub z: Paracomplex,
    /// Curve parameter (arc length from the seed), or 0 for isolated points.
    pub t: f64,
    pub stratum: Stratum,
    pub nondegenerate: bool,
    pub kind: Kind,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug)]
pub struct SingularCurve {
    pub stratum: Stratum,
    pub points: Vec<SingularPoint>,
    /// Tangent `gamma'` at each point, `a + jb` for the direction `(a, b)`.
    pub tangents: Vec<Paracomplex>,
    pub closed: bool,
}

/// `lambda = -(2/tau^2) |omega_hat|^2 (1 - |g|^2) sqrt(2(g + gbar)^2 + (1 - |g|^2)^2)`.
pub fn area_density(s: &GaussSample, tau: f64) -> f64 {
    let g = s.g.v;
    let m = g.modulus_sq();
    let rad = 8.0 * g.re * g.re + (1.0 - m) * (1.0 - m);
    -2.0 / (tau * tau) * s.omega_hat.modulus_sq() * (1.0 - m) * math::sqrt(rad.max(0.0))
}

/// Level function of a stratum and its `z`-derivative.
pub fn level(stratum: Stratum, s: &GaussSample) -> (f64, Paracomplex) {
    match stratum {
        Stratum::SigmaOmega => {
            let w = s.omega_hat;
            (
                w.modulus_sq(),
                s.omega_hat_z * w.conj() + w * s.omega_hat_zb.conj(),
            )
        }
        _ => {
            let g = &s.g;
            (
                g.v.modulus_sq() - 1.0,
                g.dz * g.v.conj() + g.v * g.dzb.conj(),
            )
        }
    }
}

/// Direction of the level curve, `j conj(phi_z)`.
pub fn level_tangent(phi_z: Paracomplex) -> Paracomplex {
    Paracomplex::J * phi_z.conj()
}

/// The ratio `r = g_z / (g^2 omega_hat)` with its first derivatives.
#[derive(Clone, Copy, Debug)]
pub struct CriteriaRatio {
    pub r: Paracomplex,
    pub r_z: Paracomplex,
    pub r_zb: Paracomplex,
    /// `(|g|^2)_zbar`.
    pub m_zb: Paracomplex,
}

impl CriteriaRatio {
    pub fn from_sample(s: &GaussSample) -> Result<Self, SingularError> {
        let wrong = SingularError::WrongStratum {
            x: s.z.re,
            y: s.z.im,
        };
        let g = s.g.first_order();
        let gz = s.g.z_derivative();
        let den: Jet1 = g * g * s.omega_jet();
        let r = gz.checked_div(den).map_err(|_| wrong)?;
        let m = g * g.conj();
        Ok(CriteriaRatio {
            r: r.v,
            r_z: r.dz,
            r_zb: r.dzb,
            m_zb: m.dzb,
        })
    }

    fn jet(&self) -> Jet1 {
        Jet1::new(self.r, self.r_z, self.r_zb)
    }

    /// `Im[(|g|^2)_zbar (Im r)_z]`.
    pub fn third_sw(&self) -> f64 {
        (self.m_zb * self.jet().im_part().dz).im
    }

    /// `Im[(|g|^2)_zbar (Re r)_z]`.
    pub fn third_ccr(&self) -> f64 {
        (self.m_zb * self.jet().re_part().dz).im
    }
}

/// `r != 4j`, tested componentwise.
pub fn nondegenerate_g(r: &CriteriaRatio, tol: f64) -> bool {
    math::abs(r.r.re) > tol || math::abs(r.r.im - 4.0) > tol
}

/// `omega_hat_z conj(omega_hat) != 0` on `SigmaOmega \ SigmaG`.
pub fn nondegenerate_omega(s: &GaussSample, tol: Tolerances) -> Result<bool, SingularError> {
    let on_omega = math::abs(s.omega_hat.modulus_sq()) <= level_scale(tol.level, s);
    let on_g = math::abs(s.m() - 1.0) <= math::sqrt(tol.level);
    if !on_omega || on_g {
        return Err(SingularError::WrongStratum {
            x: s.z.re,
            y: s.z.im,
        });
    }
    Ok((s.omega_hat_z * s.omega_hat.conj()).max_abs() > tol.classify)
}

/// Accepted `|omega_hat|^2` on `SigmaOmega`, allowing for the Newton residual.
fn level_scale(level: f64, _s: &GaussSample) -> f64 {
    math::sqrt(level)
}

/// Fills the per-point diagnostics and the pointwise kind.
pub fn diagnose(
    stratum: Stratum,
    s: &GaussSample,
    tau: f64,
    tol: Tolerances,
) -> (bool, Kind, Diagnostics) {
    let mut d = Diagnostics {
        lambda: area_density(s, tau),
        ..Default::default()
    };
    match stratum {
        Stratum::Both => (false, Kind::Degenerate, d),
        Stratum::SigmaG => {
            let cr = match CriteriaRatio::from_sample(s) {
                Ok(c) => c,
                Err(_) => return (false, Kind::Degenerate, d),
            };
            d.re_r = Some(cr.r.re);
            d.im_r = Some(cr.r.im);
            d.third_sw = Some(cr.third_sw());
            d.third_ccr = Some(cr.third_ccr());
            let (_, phi_z) = level(Stratum::SigmaG, s);
            let gamma = level_tangent(phi_z);
            let eta = -(Paracomplex::J * (s.g.v * s.omega_hat).conj());
            d.det_direct = Some((gamma.conj() * eta).im);
            d.det_formula = Some(s.omega_hat.modulus_sq() * (cr.r.im - 4.0));
            if !nondegenerate_g(&cr, tol.classify) {
                return (false, Kind::Degenerate, d);
            }
            let front = math::abs(cr.r.re) > tol.classify;
            let kind = match (front, math::abs(cr.r.im - 4.0) > tol.classify) {
                (true, true) => Kind::CuspidalEdge,
                (true, false) => Kind::Front,
                (false, _) => Kind::NonFront,
            };
            (true, kind, d)
        }
        Stratum::SigmaOmega => {
            let w = s.omega_hat;
            let (_, phi_z) = level(Stratum::SigmaOmega, s);
            let gamma = level_tangent(phi_z);
            let eta = w.conj();
            d.det_direct = Some((gamma.conj() * eta).im);
            d.det_formula = Some(-(w * w * s.omega_hat_z.conj()).re);
            let nondeg = (s.omega_hat_z * w.conj()).max_abs() > tol.classify;
            d.front_measure = front_measure(s, eta);
            if !nondeg {
                return (false, Kind::Degenerate, d);
            }
            let front = d.front_measure.is_some_and(|f| f > tol.classify);
            let transversal = d.det_direct.is_some_and(|v| math::abs(v) > tol.classify);
            let kind = match (front, transversal) {
                (true, true) => Kind::CuspidalEdge,
                (true, false) => Kind::Front,
                (false, _) => Kind::NonFront,
            };
            (true, kind, d)
        }
    }
}

/// `|dN_R(eta / |eta|)|`, with `eta = a + jb` read as the direction `(a, b)`.
fn front_measure(s: &GaussSample, eta: Paracomplex) -> Option<f64> {
    let len = math::hypot(eta.re, eta.im);
    if !(len > 0.0) {
        return None;
    }
    let (p, q) = (eta.re / len, eta.im / len);
    let g = &s.g;
    let gx = g.dz + g.dzb;
    let gy = Paracomplex::J * (g.dz - g.dzb);
    let dg = gx.scale(p) + gy.scale(q);
    let h = 1e-6 / (1.0 + dg.max_abs());
    let a = normal_riemannian(g.v + dg.scale(h)).ok()?;
    let b = normal_riemannian(g.v - dg.scale(h)).ok()?;
    Some((a - b).scale(0.5 / h).norm())
}

/// Locates singular points on grid edges by sign changes of the level
/// functions, refined by bisection.
pub fn detect(
    field: &HarmonicField,
    grid: &GridSpec,
    tol: Tolerances,
) -> Result<Vec<SingularPoint>, SingularError> {
    let tau = field.tau();
    let (nx, ny) = (grid.nx, grid.ny);
    let mut samples = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            samples.push(field.sample(grid.node(i, j)).ok());
        }
    }
    let mut out: Vec<SingularPoint> = Vec::new();
    for stratum in [Stratum::SigmaG, Stratum::SigmaOmega] {
        for j in 0..ny {
            for i in 0..nx {
                for (di, dj) in [(1, 0), (0, 1)] {
                    let (i1, j1) = (i + di, j + dj);
                    if i1 >= nx || j1 >= ny {
                        continue;
                    }
                    let (Some(a), Some(b)) = (&samples[j * nx + i], &samples[j1 * nx + i1]) else {
                        continue;
                    };
                    let (va, vb) = (level(stratum, a).0, level(stratum, b).0);
                    if !(va * vb < 0.0 || va == 0.0) {
                        continue;
                    }
                    let z = bisect_edge(field, stratum, a.z, b.z, va, vb);
                    if out.iter().any(|p| (p.z - z).max_abs() < 1e-9) {
                        continue;
                    }
                    let s = match field.sample(z) {
                        Ok(s) => s,
                        Err(_) => continue,
                    };
                    let other = match stratum {
                        Stratum::SigmaG => Stratum::SigmaOmega,
                        _ => Stratum::SigmaG,
                    };
                    let both = math::abs(level(other, &s).0) <= math::sqrt(tol.level);
                    let st = if both { Stratum::Both } else { stratum };
                    let (nondegenerate, kind, diagnostics) = diagnose(st, &s, tau, tol);
                    out.push(SingularPoint {
                        z,
                        t: 0.0,
                        stratum: st,
                        nondegenerate,
                        kind,
                        diagnostics,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn bisect_edge(
    field: &HarmonicField,
    stratum: Stratum,
    za: Paracomplex,
    zb: Paracomplex,
    va: f64,
    vb: f64,
) -> Paracomplex {
    if va == 0.0 {
        return za;
    }
    let (mut lo, mut hi, mut flo) = (0.0f64, 1.0f64, va);
    let len = (zb - za).max_abs();
    for _ in 0..200 {
        if (hi - lo) * len < 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let z = za + (zb - za).scale(mid);
        let fm = match field.sample(z) {
            Ok(s) => level(stratum, &s).0,
            // sampled fields cannot be evaluated between nodes
            Err(_) => return za + (zb - za).scale(va / (va - vb)),
        };
        if fm == 0.0 {
            return z;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    za + (zb - za).scale(0.5 * (lo + hi))
}

/// Newton projection onto the level set along the gradient.
pub fn project(
    field: &HarmonicField,
    stratum: Stratum,
    z0: Paracomplex,
    tol: f64,
) -> Result<(Paracomplex, GaussSample), SingularError> {
    let lost = SingularError::LostCurve { x: z0.re, y: z0.im };
    let mut z = z0;
    for _ in 0..16 {
        let s = field.sample(z).map_err(|_| lost)?;
        let (phi, phi_z) = level(stratum, &s);
        if math::abs(phi) <= tol * 1e-3 {
            return Ok((z, s));
        }
        let (gx, gy) = (2.0 * phi_z.re, 2.0 * phi_z.im);
        let n2 = gx * gx + gy * gy;
        if !(n2 > 0.0) {
            return Err(lost);
        }
        let step = Paracomplex::new(phi * gx / n2, phi * gy / n2);
        z -= step;
        if step.max_abs() < 1e-15 * (1.0 + z.max_abs()) {
            let s = field.sample(z).map_err(|_| lost)?;
            if math::abs(level(stratum, &s).0) <= tol {
                return Ok((z, s));
            }
            return Err(lost);
        }
    }
    let s = field.sample(z).map_err(|_| lost)?;
    if math::abs(level(stratum, &s).0) <= tol {
        Ok((z, s))
    } else {
        Err(lost)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    /// Curves stop when they leave this rectangle.
    pub domain: GridSpec,
    pub h_max: f64,
    pub max_points: usize,
    pub tol: Tolerances,
}

impl TraceOptions {
    pub fn new(domain: GridSpec, tol: Tolerances) -> Self {
        let h = 0.5 * domain.hx().min(domain.hy());
        TraceOptions {
            domain,
            h_max: h,
            max_points: 20_000,
            tol,
        }
    }
}

/// Predictor-corrector continuation of the singular curve through `seed`,
/// in both directions, until the domain boundary or loop closure.
pub fn trace_curve(
    field: &HarmonicField,
    seed: &SingularPoint,
    opts: &TraceOptions,
) -> Result<SingularCurve, SingularError> {
    let lost = SingularError::LostCurve {
        x: seed.z.re,
        y: seed.z.im,
    };
    if seed.stratum == Stratum::Both || !seed.nondegenerate {
        return Err(lost);
    }
    let stratum = seed.stratum;
    let (z0, s0) = project(field, stratum, seed.z, opts.tol.level)?;
    let t0 = unit(level_tangent(level(stratum, &s0).1)).ok_or(lost)?;

    let (fwd, closed) = march(field, stratum, z0, t0, opts)?;
    let mut pts: Vec<(Paracomplex, f64)> = Vec::new();
    if closed {
        pts.push((z0, 0.0));
        pts.extend(fwd);
    } else {
        let (bwd, _) = march(field, stratum, z0, -t0, opts)?;
        for (z, t) in bwd.into_iter().rev() {
            pts.push((z, -t));
        }
        pts.push((z0, 0.0));
        pts.extend(fwd);
    }

    let tau = field.tau();
    let mut points = Vec::with_capacity(pts.len());
    let mut tangents = Vec::with_capacity(pts.len());
    for (z, t) in pts {
        let s = field.sample(z)?;
        let (nondegenerate, kind, diagnostics) = diagnose(stratum, &s, tau, opts.tol);
        tangents.push(level_tangent(level(stratum, &s).1));
        points.push(SingularPoint {
            z,
            t,
            stratum,
            nondegenerate,
            kind,
            diagnostics,
        });
    }
    orient_tangents(&mut tangents, &points);
    Ok(SingularCurve {
        stratum,
        points,
        tangents,
        closed,
    })
}

fn unit(v: Paracomplex) -> Option<Paracomplex> {
    let n = math::hypot(v.re, v.im);
    if n > 0.0 && n.is_finite() {
        Some(v.scale(1.0 / n))
    } else {
        None
    }
}

fn inside(d: &GridSpec, z: Paracomplex) -> bool {
    z.re >= d.x_min && z.re <= d.x_max && z.im >= d.y_min && z.im <= d.y_max
}

/// Returns points after the start with their arc-length parameter, and
/// whether the curve closed on itself.
fn march(
    field: &HarmonicField,
    stratum: Stratum,
    z0: Paracomplex,
    dir0: Paracomplex,
    opts: &TraceOptions,
) -> Result<(Vec<(Paracomplex, f64)>, bool), SingularError> {
    let h_min = opts.h_max * 1e-6;
    let mut h = opts.h_max;
    let mut z = z0;
    let mut dir = dir0;
    let mut t = 0.0;
    let mut out = Vec::new();
    while out.len() < opts.max_points {
        let pred = z + dir.scale(h);
        if !inside(&opts.domain, pred) {
            break;
        }
        match project(field, stratum, pred, opts.tol.level) {
            Ok((zn, sn)) if (zn - pred).max_abs() < 0.5 * h => {
                let Some(mut nd) = unit(level_tangent(level(stratum, &sn).1)) else {
                    return Err(SingularError::LostCurve { x: zn.re, y: zn.im });
                };
                if nd.re * dir.re + nd.im * dir.im < 0.0 {
                    nd = -nd;
                }
                let step = math::hypot(zn.re - z.re, zn.im - z.im);
                t += step;
                z = zn;
                dir = nd;
                out.push((z, t));
                if !inside(&opts.domain, z) {
                    out.pop();
                    break;
                }
                if out.len() > 3 && math::hypot(z.re - z0.re, z.im - z0.im) < 0.75 * h {
                    out.pop();
                    return Ok((out, true));
                }
                h = (h * 1.5).min(opts.h_max);
            }
            _ => {
                h *= 0.5;
                if h < h_min {
                    return Err(SingularError::LostCurve { x: z.re, y: z.im });
                }
            }
        }
    }
    Ok((out, false))
}

fn orient_tangents(tangents: &mut [Paracomplex], points: &[SingularPoint]) {
    for k in 0..tangents.len() {
        let (a, b) = if k + 1 < points.len() {
            (points[k].z, points[k + 1].z)
        } else if k > 0 {
            (points[k - 1].z, points[k].z)
        } else {
            return;
        };
        let d = b - a;
        if tangents[k].re * d.re + tangents[k].im * d.im < 0.0 {
            tangents[k] = -tangents[k];
        }
    }
}

/// Result of classifying one curve.
#[derive(Clone, Debug, Default)]
pub struct CurveClassification {
    /// Curve points with pointwise kinds.
    pub points: Vec<SingularPoint>,
    /// Swallowtails and cuspidal cross caps located between curve points.
    pub events: Vec<SingularPoint>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ClassifyOptions {
    pub tol: Tolerances,
    /// Fail on degenerate points instead of marking them.
    pub strict: bool,
}

/// Classification along a curve in `SigmaG \ SigmaOmega` from the ratio `r`.
pub fn classify_sigma_g(
    field: &HarmonicField,
    curve: &SingularCurve,
    opts: ClassifyOptions,
) -> Result<CurveClassification, SingularError> {
    if curve.stratum != Stratum::SigmaG {
        let z = curve.points.first().map_or(Paracomplex::ZERO, |p| p.z);
        return Err(SingularError::WrongStratum { x: z.re, y: z.im });
    }
    let tol = opts.tol;
    check_degenerate(curve, opts)?;
    let mut events = Vec::new();
    let eval = |z: Paracomplex| -> Option<(Paracomplex, GaussSample, CriteriaRatio)> {
        let (z, s) = project(field, Stratum::SigmaG, z, tol.level).ok()?;
        let cr = CriteriaRatio::from_sample(&s).ok()?;
        Some((z, s, cr))
    };
    for w in curve.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if !(a.nondegenerate && b.nondegenerate) {
            continue;
        }
        let (Some(ra), Some(rb)) = (a.diagnostics.re_r, b.diagnostics.re_r) else {
            continue;
        };
        let (Some(ia), Some(ib)) = (a.diagnostics.im_r, b.diagnostics.im_r) else {
            continue;
        };
        let brackets = [
            (ia - 4.0, ib - 4.0, Kind::Swallowtail),
            (ra, rb, Kind::CuspidalCrossCap),
        ];
        for (fa, fb, kind) in brackets {
            if !(fa * fb < 0.0) {
                continue;
            }
            let sigma = |cr: &CriteriaRatio| match kind {
                Kind::Swallowtail => cr.r.im - 4.0,
                _ => cr.r.re,
            };
            let Some((theta, z, s)) = bisect_segment(a.z, b.z, fa, &eval, sigma) else {
                continue;
            };
            let t = a.t + theta * (b.t - a.t);
            let (nondegenerate, _, diagnostics) = diagnose(Stratum::SigmaG, &s, field.tau(), tol);
            let re = diagnostics.re_r.unwrap_or(0.0);
            let im = diagnostics.im_r.unwrap_or(0.0);
            let ok = match kind {
                Kind::Swallowtail => {
                    math::abs(re) > tol.classify
                        && math::abs(diagnostics.third_sw.unwrap_or(0.0)) > tol.classify
                }
                _ => {
                    math::abs(im - 4.0) > tol.classify
                        && math::abs(diagnostics.third_ccr.unwrap_or(0.0)) > tol.classify
                }
            };
            let kind = if ok { kind } else { Kind::Unresolved };
            events.push(SingularPoint {
                z,
                t,
                stratum: Stratum::SigmaG,
                nondegenerate,
                kind,
                diagnostics,
            });
        }
    }
    events.sort_by(|p, q| p.t.total_cmp(&q.t));
    Ok(CurveClassification {
        points: curve.points.clone(),
        events,
    })
}

fn check_degenerate(curve: &SingularCurve, opts: ClassifyOptions) -> Result<(), SingularError> {
    if opts.strict {
        if let Some(p) = curve.points.iter().find(|p| !p.nondegenerate) {
            return Err(SingularError::DegenerateOnCurve {
                x: p.z.re,
                y: p.z.im,
            });
        }
    }
    Ok(())
}

/// Bisection on the segment `[za, zb]` projected to the curve; returns the
/// fraction along the segment, the point and its sample.
fn bisect_segment<F, S>(
    za: Paracomplex,
    zb: Paracomplex,
    fa: f64,
    eval: &F,
    sigma: S,
) -> Option<(f64, Paracomplex, GaussSample)>
where
    F: Fn(Paracomplex) -> Option<(Paracomplex, GaussSample, CriteriaRatio)>,
    S: Fn(&CriteriaRatio) -> f64,
{
    let (mut lo, mut hi, mut flo) = (0.0f64, 1.0f64, fa);
    let len = (zb - za).max_abs();
    let mut last = None;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let (z, s, cr) = eval(za + (zb - za).scale(mid))?;
        let fm = sigma(&cr);
        last = Some((mid, z, s));
        if fm == 0.0 || (hi - lo) * len < 1e-13 {
            break;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    last
}

/// Classification along a curve in `SigmaOmega \ SigmaG`. Non-degenerate
/// front points are cuspidal edges; points where `dN_R(eta) = 0` are
/// reported as non-fronts.
pub fn classify_sigma_omega(
    curve: &SingularCurve,
    opts: ClassifyOptions,
) -> Result<CurveClassification, SingularError> {
    if curve.stratum != Stratum::SigmaOmega {
        let z = curve.points.first().map_or(Paracomplex::ZERO, |p| p.z);
        return Err(SingularError::WrongStratum { x: z.re, y: z.im });
    }
    check_degenerate(curve, opts)?;
    Ok(CurveClassification {
        points: curve.points.clone(),
        events: Vec::new(),
    })
}

/// Outcome of the pointwise criteria on `(r, third_sw, third_ccr)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Degenerate,
    CuspidalEdge,
    Swallowtail,
    CuspidalCrossCap,
    /// A front point on the swallowtail threshold failing the third test.
    FrontOther,
    /// A non-front point failing the cross-cap tests.
    NonFrontOther,
}

/// Values fed to [`criteria_crosscheck`].
#[derive(Clone, Copy, Debug)]
pub struct CriteriaValues {
    pub r: Paracomplex,
    pub third_sw: f64,
    pub third_ccr: f64,
}

fn gate(re: f64, im: f64, re0: f64, im0: f64, t_sw: f64, t_ccr: f64, tol: f64) -> Gate {
    let re_nz = math::abs(re - re0) > tol;
    let im_off = math::abs(im - im0) > tol;
    match (re_nz, im_off) {
        (false, false) => Gate::Degenerate,
        (true, true) => Gate::CuspidalEdge,
        (true, false) if math::abs(t_sw) > tol => Gate::Swallowtail,
        (true, false) => Gate::FrontOther,
        (false, true) if math::abs(t_ccr) > tol => Gate::CuspidalCrossCap,
        (false, true) => Gate::NonFrontOther,
    }
}

/// Gate from the criteria on `r`.
pub fn gate_r(v: &CriteriaValues, tol: f64) -> Gate {
    gate(v.r.re, v.r.im, 0.0, 4.0, v.third_sw, v.third_ccr, tol)
}

/// Gate from the rewritten criteria on `r' = g_z / (g^2 A) = tau j r`,
/// with `A = (j / tau) omega_hat`: the roles of the real and imaginary parts
/// swap and the threshold becomes `4 tau`.
pub fn gate_primed(v: &CriteriaValues, tau: f64, tol: f64) -> Gate {
    let rp = (Paracomplex::J * v.r).scale(tau);
    let t = math::abs(tau);
    // (Re r')_z = tau (Im r)_z and (Im r')_z = tau (Re r)_z
    let sw = tau * v.third_sw;
    let ccr = tau * v.third_ccr;
    gate(rp.im, rp.re, 0.0, 4.0 * tau, sw, ccr, tol * t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub direct: Gate,
    pub primed: Gate,
}

impl CrossCheck {
    pub fn agree(&self) -> bool {
        self.direct == self.primed
    }
}

pub fn criteria_crosscheck(v: &CriteriaValues, tau: f64, tol: f64) -> CrossCheck {
    CrossCheck {
        direct: gate_r(v, tol),
        primed: gate_primed(v, tau, tol),
    }
}

/// Pointwise kind from the first two derivatives of `gamma_L`.
pub fn dual_pointwise_kind(d1: Vec3, _d2: Vec3, tol: f64) -> Kind {
    let scale = 1.0 + d1.max_abs();
    if math::abs(d1[2]) <= tol * scale {
        return Kind::NonFront;
    }
    if math::hypot(d1[0], d1[1]) > tol * scale {
        Kind::CuspidalEdge
    } else {
        Kind::Front
    }
}

/// A swallowtail or cuspidal cross cap found on a dual curve.
#[derive(Clone, Copy, Debug)]
pub struct DualEvent {
    pub s: f64,
    pub kind: Kind,
    pub d1: Vec3,
    pub d2: Vec3,
}

/// Locates the special points of the dual-curve criteria on `params` (an
/// increasing sequence) with `eval(s) = (gamma_L', gamma_L'')`.
///
/// `gamma_L' || e3` is located as a root of its first component; at such a
/// root the second component must vanish too, which is checked.
pub fn dual_curve_events<F>(eval: F, params: &[f64], tol: f64) -> Vec<DualEvent>
where
    F: Fn(f64) -> Option<(Vec3, Vec3)>,
{
    let mut out = Vec::new();
    let vals: Vec<Option<(Vec3, Vec3)>> = params.iter().map(|&s| eval(s)).collect();
    for k in 0..params.len().saturating_sub(1) {
        let (Some(a), Some(b)) = (vals[k], vals[k + 1]) else {
            continue;
        };
        for (comp, kind) in [(0usize, Kind::Swallowtail), (2, Kind::CuspidalCrossCap)] {
            let (fa, fb) = (a.0[comp], b.0[comp]);
            if !(fa * fb < 0.0) {
                continue;
            }
            let (mut lo, mut hi, mut flo) = (params[k], params[k + 1], fa);
            let mut at = None;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let Some(v) = eval(mid) else { break };
                at = Some((mid, v));
                let fm = v.0[comp];
                if fm == 0.0 || hi - lo < 1e-15 * (1.0 + math::abs(mid)) {
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let Some((s, (d1, d2))) = at else { continue };
            let scale1 = 1.0 + d1.max_abs();
            let scale2 = 1.0 + d2.max_abs();
            let not_par2 = math::hypot(d2[0], d2[1]) > tol * scale2;
            let ok = match kind {
                Kind::Swallowtail => {
                    math::abs(d1[2]) > tol * scale1
                        && math::abs(d1[1]) <= math::sqrt(tol) * scale1
                        && not_par2
                }
                _ => not_par2 && math::abs(d2[2]) > tol * scale2,
            };
            let kind = if ok { kind } else { Kind::Unresolved };
            out.push(DualEvent { s, kind, d1, d2 });
        }
    }
    out.sort_by(|p, q| p.s.total_cmp(&q.s));
    out
}

#[derive(Clone, Debug)]
pub struct DualCurveClassification {
    /// Pointwise kinds at the interior samples.
    pub kinds: Vec<(f64, Kind)>,
    pub events: Vec<DualEvent>,
}

/// Dual-curve criteria on a uniformly sampled `gamma_L`, with derivatives
/// from finite differences. Stencils of order 2 and 4 must agree to
/// `fd_tol` (relative), otherwise the sampling is too coarse.
pub fn classify_via_dual_curve(
    samples: &[(f64, Vec3)],
    tol: f64,
    fd_tol: f64,
) -> Result<DualCurveClassification, SingularError> {
    let n = samples.len();
    if n < 7 {
        return Err(SingularError::TooCoarse {
            diff: f64::INFINITY,
        });
    }
    let h = (samples[n - 1].0 - samples[0].0) / (n - 1) as f64;
    let p = |k: usize| samples[k].1;
    let mut d1 = Vec::with_capacity(n - 4);
    let mut d2 = Vec::with_capacity(n - 4);
    let mut worst: f64 = 0.0;
    for k in 2..n - 2 {
        let a4 = (p(k - 2) - p(k + 2)).scale(1.0 / 12.0) + (p(k + 1) - p(k - 1)).scale(2.0 / 3.0);
        let b4 = (p(k - 2) + p(k + 2)).scale(-1.0 / 12.0)
            + (p(k - 1) + p(k + 1)).scale(4.0 / 3.0)
            + p(k).scale(-2.5);
        let a2 = (p(k + 1) - p(k - 1)).scale(0.5);
        let b2 = p(k + 1) + p(k - 1) - p(k).scale(2.0);
        let (a4, b4, a2, b2) = (
            a4.scale(1.0 / h),
            b4.scale(1.0 / (h * h)),
            a2.scale(1.0 / h),
            b2.scale(1.0 / (h * h)),
        );
        worst = worst
            .max((a4 - a2).max_abs() / (1.0 + a4.max_abs()))
            .max((b4 - b2).max_abs() / (1.0 + b4.max_abs()));
        d1.push(a4);
        d2.push(b4);
    }
    if !(worst <= fd_tol) {
        return Err(SingularError::TooCoarse { diff: worst });
    }
    let s0 = samples[2].0;
    let m = d1.len();
    let interp = |s: f64| -> Option<(Vec3, Vec3)> {
        let x = (s - s0) / h;
        if !(x >= 0.0 && x <= (m - 1) as f64) {
            return None;
        }
        let k = (x as usize).saturating_sub(1).min(m.saturating_sub(4));
        let nodes: Vec<f64> = (0..4).map(|a| (k + a) as f64).collect();
        let w = crate::fd::weights(x, &nodes, 0);
        let mut a = Vec3::ZERO;
        let mut b = Vec3::ZERO;
        for (i, wi) in w[0].iter().enumerate() {
            a += *wi * d1[k + i];
            b += *wi * d2[k + i];
        }
        Some((a, b))
    };
    let params: Vec<f64> = (0..m).map(|k| s0 + k as f64 * h).collect();
    let kinds = params
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(&s, (&a, &b))| (s, dual_pointwise_kind(a, b, tol)))
        .collect();
    let events = dual_curve_events(interp, &params, tol);
    Ok(DualCurveClassification { kinds, events })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr;

    fn field(src: &str) -> HarmonicField {
        HarmonicField::closed(expr::parse(src).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn area_density_examples() {
        let f = field("conj(z)");
        let s = f.sample(Paracomplex::ONE).unwrap();
        assert_eq!(area_density(&s, 1.0), 0.0);
        let s = f.sample(Paracomplex::ZERO).unwrap();
        // omega_hat = -j, |omega_hat|^2 = -1
        assert!((area_density(&s, 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn nondegeneracy_of_ratio() {
        let mk = |r: Paracomplex| CriteriaRatio {
            r,
            r_z: Paracomplex::ZERO,
            r_zb: Paracomplex::ZERO,
            m_zb: Paracomplex::ZERO,
        };
        assert!(nondegenerate_g(&mk(Paracomplex::ZERO), 1e-7));
        assert!(!nondegenerate_g(&mk(Paracomplex::new(0.0, 4.0)), 1e-7));
        assert!(nondegenerate_g(&mk(Paracomplex::new(1.0, 4.0)), 1e-7));
    }

    #[test]
    fn crosscheck_examples() {
        let v = CriteriaValues {
            r: Paracomplex::new(1.0, 4.0),
            third_sw: 0.5,
            third_ccr: 0.0,
        };
        let c = criteria_crosscheck(&v, 1.0, 1e-7);
        assert_eq!(c.direct, Gate::Swallowtail);
        assert!(c.agree());
        let v = CriteriaValues {
            r: Paracomplex::new(0.0, 4.0),
            third_sw: 0.0,
            third_ccr: 0.0,
        };
        let c = criteria_crosscheck(&v, 2.0, 1e-7);
        assert_eq!((c.direct, c.primed), (Gate::Degenerate, Gate::Degenerate));
    }

    #[test]
    fn hyperbola_is_traced() {
        let f = field("conj(z)");
        let grid = GridSpec::new((0.5, 2.0), (-1.0, 1.0), 31, 41);
        let tol = Tolerances::default();
        let pts = detect(&f, &grid, tol).unwrap();
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|p| p.stratum == Stratum::SigmaG));
        let seed = SingularPoint {
            z: Paracomplex::ONE,
            t: 0.0,
            stratum: Stratum::SigmaG,
            nondegenerate: true,
            kind: Kind::Unresolved,
            diagnostics: Diagnostics::default(),
        };
        let curve = trace_curve(&f, &seed, &TraceOptions::new(grid, tol)).unwrap();
        assert!(curve.points.len() > 20);
        for p in &curve.points {
            let err = (p.z.re * p.z.re - p.z.im * p.z.im - 1.0).abs();
            assert!(err < 1e-9);
            assert_eq!(p.kind, Kind::NonFront);
        }
        let mid = curve.points.iter().position(|p| p.t == 0.0).unwrap();
        let tg = curve.tangents[mid];
        assert!(tg.re.abs() < 1e-12 && tg.im.abs() > 0.0);
        let cls = classify_sigma_g(&f, &curve, ClassifyOptions::default()).unwrap();
        assert!(cls.events.is_empty());
    }

    #[test]
    fn dual_curve_vectors() {
        let e3 = Vec3::new(0.0, 0.0, 2.0);
        assert_eq!(
            dual_pointwise_kind(e3, Vec3::new(1.0, 0.0, 0.0), 1e-9),
            Kind::Front
        );
        let x = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(dual_pointwise_kind(x, x, 1e-9), Kind::NonFront);
    }
}
