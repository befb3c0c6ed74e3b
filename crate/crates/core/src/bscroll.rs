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

//! Null frames, B-scrolls in Minkowski space and their dual minimal surfaces.
//!
//! A null frame `(A, B, C)` with `<A,A> = <B,B> = 0`, `<A,B> = -1`,
//! `C = A x B` solves `A' = kappa C`, `B' = tau C`, `C' = tau A + kappa B`.
//! The B-scroll is `f_L(s, t) = P(s) + t B(s)` with `P' = A`; it has constant
//! mean curvature `tau` with unit normal `N_L = -(C + t tau B)`.

use alloc::vec::Vec;

use crate::curvature::TangentField;
use crate::expr::{self, Ast};
use crate::harmonic::{GaussSource, HarmonicError, HarmonicField};
use crate::math;
use crate::paracomplex::{Jet2, Paracomplex};
use crate::singular::{self, DualEvent, Kind, SingularCurve, SingularPoint, Stratum, Tolerances};
use crate::vec3::Vec3;

/// Allowed defect of the frame invariants.
pub const FRAME_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum BScrollError {
    #[error("initial frame violates the null-frame relations (defect {defect:e})")]
    BadInitialFrame { defect: f64 },
    #[error("bad parameter range or step")]
    BadRange,
    #[error("cannot evaluate kappa at s = {s} (position {position})")]
    Profile { position: usize, s: f64 },
    #[error("tau must be non-zero")]
    ZeroTau,
    #[error("s = {s} lies outside the integrated range")]
    OutOfRange { s: f64 },
    #[error("singular curve has a pole at s = {s} (B3 = 0)")]
    PoleInCurve { s: f64 },
    #[error("the df3 form is not closed: loop residual {residual:e} per unit area")]
    NonClosedForm { residual: f64 },
    #[error(transparent)]
    Singular(#[from] singular::SingularError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameState {
    pub s: f64,
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
    /// Base curve `P` with `P' = A`.
    pub p: Vec3,
}

impl FrameState {
    /// The frame at `s = 0` used when none is given:
    /// `A = (1, 1, 0)`, `B = (1, -1, 0) / 2`, `C = (0, 0, -1)`.
    pub fn standard() -> Self {
        FrameState {
            s: 0.0,
            a: Vec3::new(1.0, 1.0, 0.0),
            b: Vec3::new(0.5, -0.5, 0.0),
            c: Vec3::new(0.0, 0.0, -1.0),
            p: Vec3::ZERO,
        }
    }

    /// Largest violation of the six frame relations.
    pub fn defect(&self) -> f64 {
        let (a, b, c) = (self.a, self.b, self.c);
        let rel = [
            a.lorentz_dot(a),
            b.lorentz_dot(b),
            a.lorentz_dot(b) + 1.0,
            c.lorentz_dot(c) - 1.0,
            a.lorentz_dot(c),
            b.lorentz_dot(c),
        ];
        let cross = (a.lorentz_cross(b) - c).max_abs();
        rel.iter().fold(cross, |m, r| m.max(math::abs(*r)))
    }

    fn axpy(&self, k: f64, d: &Deriv) -> FrameState {
        FrameState {
            s: self.s,
            a: self.a + k * d.a,
            b: self.b + k * d.b,
            c: self.c + k * d.c,
            p: self.p + k * d.p,
        }
    }

    /// Projects back onto the frame relations.
    pub fn renormalize(&mut self) {
        let r2 = math::sqrt(2.0);
        let mut t = (self.a + self.b).scale(1.0 / r2);
        let mut x = (self.a - self.b).scale(1.0 / r2);
        let tt = t.lorentz_dot(t);
        if tt < 0.0 {
            t = t.scale(1.0 / math::sqrt(-tt));
        }
        x += x.lorentz_dot(t) * t;
        let xx = x.lorentz_dot(x);
        if xx > 0.0 {
            x = x.scale(1.0 / math::sqrt(xx));
        }
        self.a = (t + x).scale(1.0 / r2);
        self.b = (t - x).scale(1.0 / r2);
        self.c = self.a.lorentz_cross(self.b);
    }
}

struct Deriv {
    a: Vec3,
    b: Vec3,
    c: Vec3,
    p: Vec3,
}

/// `kappa(s)` as an expression in `s`, and `tau`.
#[derive(Clone, Debug)]
pub struct CurvatureProfile {
    pub kappa: Ast,
    tau: f64,
}

impl CurvatureProfile {
    pub fn new(kappa: Ast, tau: f64) -> Result<Self, BScrollError> {
        if tau == 0.0 || !tau.is_finite() {
            return Err(BScrollError::ZeroTau);
        }
        Ok(CurvatureProfile { kappa, tau })
    }

    pub fn parse(src: &str, tau: f64) -> Result<Self, expr::ExprError> {
        let ast = expr::parse_profile(src)?;
        // tau is validated separately by callers that parse
        Ok(CurvatureProfile { kappa: ast, tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `(kappa, kappa', kappa'')` at `s`.
    pub fn eval(&self, s: f64) -> Result<(f64, f64, f64), BScrollError> {
        let v = expr::eval_profile(&self.kappa, s).map_err(|e| BScrollError::Profile {
            position: e.position,
            s,
        })?;
        if !(v.0.is_finite() && v.1.is_finite() && v.2.is_finite()) {
            return Err(BScrollError::Profile { position: 0, s });
        }
        Ok(v)
    }

    fn rhs(&self, f: &FrameState, s: f64) -> Result<Deriv, BScrollError> {
        let k = self.eval(s)?.0;
        let t = self.tau;
        Ok(Deriv {
            a: k * f.c,
            b: t * f.c,
            c: t * f.a + k * f.b,
            p: f.a,
        })
    }

    fn rk4(&self, f: &FrameState, h: f64) -> Result<FrameState, BScrollError> {
        let s = f.s;
        let k1 = self.rhs(f, s)?;
        let k2 = self.rhs(&f.axpy(0.5 * h, &k1), s + 0.5 * h)?;
        let k3 = self.rhs(&f.axpy(0.5 * h, &k2), s + 0.5 * h)?;
        let k4 = self.rhs(&f.axpy(h, &k3), s + h)?;
        let w = h / 6.0;
        Ok(FrameState {
            s: s + h,
            a: f.a + w * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
            b: f.b + w * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b),
            c: f.c + w * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c),
            p: f.p + w * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
        })
    }
}

/// Frames on a uniform grid in `s`.
#[derive(Clone, Debug)]
pub struct FrameTable {
    pub profile: CurvatureProfile,
    pub h: f64,
    pub frames: Vec<FrameState>,
}

/// RK4 from `init` over `[s0, s1]` (which must contain `init.s`) with step
/// about `h`. With `renormalize` the frame is projected after every step.
pub fn integrate_frame(
    profile: &CurvatureProfile,
    init: FrameState,
    s_range: (f64, f64),
    h: f64,
    renormalize: bool,
) -> Result<FrameTable, BScrollError> {
    let (s0, s1) = s_range;
    if !(s0 < s1 && h > 0.0 && init.s >= s0 && init.s <= s1 && (s1 - s0) / h < 1e8) {
        return Err(BScrollError::BadRange);
    }
    let defect = init.defect();
    if !(defect <= FRAME_TOL) {
        return Err(BScrollError::BadInitialFrame { defect });
    }
    let n_lo = math::round((init.s - s0) / h) as usize;
    let n_hi = math::round((s1 - init.s) / h) as usize;
    let h_lo = if n_lo > 0 {
        (init.s - s0) / n_lo as f64
    } else {
        h
    };
    let h_hi = if n_hi > 0 {
        (s1 - init.s) / n_hi as f64
    } else {
        h
    };

    let march = |n: usize, step: f64| -> Result<Vec<FrameState>, BScrollError> {
        let mut out = Vec::with_capacity(n);
        let mut f = init;
        for k in 1..=n {
            f = profile.rk4(&f, step)?;
            f.s = init.s + k as f64 * step;
            if renormalize {
                f.renormalize();
            }
            out.push(f);
        }
        Ok(out)
    };
    let lo = march(n_lo, -h_lo)?;
    let hi = march(n_hi, h_hi)?;
    let mut frames: Vec<FrameState> = lo.into_iter().rev().collect();
    frames.push(init);
    frames.extend(hi);
    let h = if n_lo + n_hi > 0 {
        (s1 - s0) / (n_lo + n_hi) as f64
    } else {
        h
    };
    Ok(FrameTable {
        profile: profile.clone(),
        h,
        frames,
    })
}

impl FrameTable {
    pub fn s_range(&self) -> (f64, f64) {
        (self.frames[0].s, self.frames[self.frames.len() - 1].s)
    }

    pub fn tau(&self) -> f64 {
        self.profile.tau
    }

    /// Frame at any `s` in range: one RK4 substep from the nearest entry.
    pub fn frame_at(&self, s: f64) -> Result<FrameState, BScrollError> {
        let (s0, s1) = self.s_range();
        let slack = 1e-9 * (1.0 + math::abs(s0) + math::abs(s1));
        if !(s >= s0 - slack && s <= s1 + slack) {
            return Err(BScrollError::OutOfRange { s });
        }
        let k = math::round((s - s0) / self.h) as usize;
        let f = self.frames[k.min(self.frames.len() - 1)];
        let ds = s - f.s;
        if ds == 0.0 {
            return Ok(f);
        }
        let mut out = self.profile.rk4(&f, ds)?;
        out.s = s;
        out.renormalize();
        Ok(out)
    }

    /// `f_L(s, t)`.
    pub fn position(&self, s: f64, t: f64) -> Result<Vec3, BScrollError> {
        let f = self.frame_at(s)?;
        Ok(f.p + t * f.b)
    }
}

/// `N_L(s, t) = -(C + t tau B)`.
pub fn scroll_normal(f: &FrameState, t: f64, tau: f64) -> Vec3 {
    -(f.c + (t * tau) * f.b)
}

/// B-scroll samples on a uniform `(s, t)` grid, row-major with `s` fastest.
#[derive(Clone, Debug)]
pub struct ScrollGrid {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub tau: f64,
    pub positions: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    /// `f_s = A + t tau C` and `f_t = B`.
    pub f_s: Vec<Vec3>,
    pub f_t: Vec<Vec3>,
}

fn linspace(r: (f64, f64), n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                r.1
            } else {
                r.0 + (r.1 - r.0) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

pub fn scroll_eval(
    table: &FrameTable,
    s_range: (f64, f64),
    ns: usize,
    t_range: (f64, f64),
    nt: usize,
) -> Result<ScrollGrid, BScrollError> {
    if ns < 2 || nt < 2 || !(s_range.0 < s_range.1) || !(t_range.0 < t_range.1) {
        return Err(BScrollError::BadRange);
    }
    let tau = table.tau();
    let s = linspace(s_range, ns);
    let t = linspace(t_range, nt);
    let frames = s
        .iter()
        .map(|&si| table.frame_at(si))
        .collect::<Result<Vec<_>, _>>()?;
    let n = ns * nt;
    let mut g = ScrollGrid {
        s: s.clone(),
        t: t.clone(),
        tau,
        positions: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        f_s: Vec::with_capacity(n),
        f_t: Vec::with_capacity(n),
    };
    for &tj in &t {
        for f in &frames {
            g.positions.push(f.p + tj * f.b);
            g.normals.push(scroll_normal(f, tj, tau));
            g.f_s.push(f.a + (tj * tau) * f.c);
            g.f_t.push(f.b);
        }
    }
    Ok(g)
}

impl ScrollGrid {
    pub fn ns(&self) -> usize {
        self.s.len()
    }

    pub fn nt(&self) -> usize {
        self.t.len()
    }

    pub fn tangents(&self) -> TangentField {
        let hs = self.s[1] - self.s[0];
        let ht = self.t[1] - self.t[0];
        TangentField::new(
            self.ns(),
            self.nt(),
            hs,
            ht,
            self.f_s.clone(),
            self.f_t.clone(),
        )
    }

    /// `g = -j stereographic_north(N_L)` at every node; `None` at the pole.
    pub fn gauss_map(&self) -> Vec<Option<Paracomplex>> {
        self.normals.iter().map(|n| recovered_gauss(*n)).collect()
    }
}

/// `-j (X1 + j X2) / (1 - X3)`.
pub fn recovered_gauss(n: Vec3) -> Option<Paracomplex> {
    crate::surface::stereographic_north(n).map(|w| -(Paracomplex::J * w))
}

/// `t(s) = -C3 / (tau B3)`, where the third component of `N_L` vanishes.
pub fn singular_parameter(table: &FrameTable, s: f64) -> Result<f64, BScrollError> {
    let f = table.frame_at(s)?;
    singular_t(&f, table.tau()).ok_or(BScrollError::PoleInCurve { s })
}

const POLE_TOL: f64 = 1e-12;

fn singular_t(f: &FrameState, tau: f64) -> Option<f64> {
    if math::abs(f.b[2]) < POLE_TOL {
        return None;
    }
    Some(-f.c[2] / (tau * f.b[2]))
}

/// `gamma_L(s) = f_L(s, t(s))` with exact first and second derivatives.
#[derive(Clone, Copy, Debug)]
pub struct DualCurvePoint {
    pub s: f64,
    pub t: f64,
    pub position: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
}

pub fn dual_curve_point(table: &FrameTable, s: f64) -> Result<DualCurvePoint, BScrollError> {
    let f = table.frame_at(s)?;
    let tau = table.tau();
    let (k, dk, _) = table.profile.eval(s)?;
    let (a, b, c) = (f.a, f.b, f.c);
    let n = c[2];
    let d = b[2];
    if math::abs(d) < POLE_TOL {
        return Err(BScrollError::PoleInCurve { s });
    }
    let n1 = tau * a[2] + k * b[2];
    let d1 = tau * c[2];
    let n2 = 2.0 * tau * k * c[2] + dk * b[2];
    let d2 = tau * (tau * a[2] + k * b[2]);
    let t = -n / (tau * d);
    let q = n1 * d - n * d1;
    let t1 = -q / (tau * d * d);
    let t2 = -((n2 * d - n * d2) / (d * d) - 2.0 * d1 * q / (d * d * d)) / tau;
    let g1 = a + (t * tau) * c + t1 * b;
    let g2 = k * c + (2.0 * t1 * tau) * c + (t * tau * tau) * a + (t * tau * k) * b + t2 * b;
    Ok(DualCurvePoint {
        s,
        t,
        position: f.p + t * b,
        d1: g1,
        d2: g2,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct ScrollEvent {
    pub s: f64,
    pub t: f64,
    pub kind: Kind,
    pub d1: Vec3,
    pub d2: Vec3,
}

#[derive(Clone, Debug, Default)]
pub struct ScrollClassification {
    /// Pointwise kinds along the singular curve.
    pub samples: Vec<(f64, f64, Kind)>,
    pub events: Vec<ScrollEvent>,
    /// Approximate parameters where `B3 = 0`.
    pub poles: Vec<f64>,
}

impl ScrollClassification {
    pub fn of_kind(&self, kind: Kind) -> impl Iterator<Item = &ScrollEvent> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}

/// Dual-curve criteria along `t(s)` on `n` samples of `s_range`, using the
/// exact derivatives of `gamma_L`. The curve is split where `B3` changes sign.
pub fn classify_scroll(
    table: &FrameTable,
    s_range: (f64, f64),
    n: usize,
    tol: f64,
) -> Result<ScrollClassification, BScrollError> {
    if n < 2 {
        return Err(BScrollError::BadRange);
    }
    let params = linspace(s_range, n);
    let b3 = params
        .iter()
        .map(|&s| table.frame_at(s).map(|f| f.b[2]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = ScrollClassification::default();
    let mut branch: Vec<f64> = Vec::new();
    let mut branches = Vec::new();
    for (k, &s) in params.iter().enumerate() {
        if math::abs(b3[k]) < POLE_TOL {
            out.poles.push(s);
            branches.push(core::mem::take(&mut branch));
            continue;
        }
        if k > 0 && b3[k - 1] * b3[k] < 0.0 {
            let (lo, hi) = (params[k - 1], s);
            out.poles.push(bisect_b3(table, lo, hi, b3[k - 1])?);
            branches.push(core::mem::take(&mut branch));
        }
        branch.push(s);
    }
    branches.push(branch);

    let eval = |s: f64| dual_curve_point(table, s).ok().map(|p| (p.d1, p.d2));
    for br in &branches {
        for &s in br {
            if let Ok(p) = dual_curve_point(table, s) {
                out.samples
                    .push((s, p.t, singular::dual_pointwise_kind(p.d1, p.d2, tol)));
            }
        }
        for DualEvent { s, kind, d1, d2 } in singular::dual_curve_events(eval, br, tol) {
            let t = dual_curve_point(table, s)?.t;
            out.events.push(ScrollEvent { s, t, kind, d1, d2 });
        }
    }
    out.events.sort_by(|a, b| a.s.total_cmp(&b.s));
    Ok(out)
}

fn bisect_b3(
    table: &FrameTable,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
) -> Result<f64, BScrollError> {
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let fm = table.frame_at(mid)?.b[2];
        if fm == 0.0 || hi - lo < 1e-15 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// Five-point Gauss-Legendre rule on [-1, 1].
const GL_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Dual surface in `Nil3(tau)` over a scroll grid.
#[derive(Clone, Debug)]
pub struct NilReconstruction {
    pub positions: Vec<Vec3>,
    /// Orientation of the Hodge star that closed the form, `+1` or `-1`.
    pub hodge_sign: f64,
    /// Largest cell loop integral divided by cell area, for the chosen sign.
    pub max_loop_per_area: f64,
    /// Same for the rejected sign.
    pub rejected_loop_per_area: f64,
    /// E-frame tangents `f_s`, `f_t`.
    pub tangents: TangentField,
    pub gauss: Vec<Option<Paracomplex>>,
}

/// Coefficients `(a_s, a_t)` of
/// `df3 = *dh - tau f2 df1 + tau f1 df2` with `h = f_L^3`, together with the
/// E3-component `*dh`.
fn df3_form(f: &FrameState, t: f64, tau: f64, sigma: f64) -> ([f64; 2], [f64; 2]) {
    let fs = f.a + (t * tau) * f.c;
    let ft = f.b;
    let pos = f.p + t * f.b;
    // induced metric [[t^2 tau^2, -1], [-1, 0]], det = -1
    let e = fs.lorentz_dot(fs);
    let ff = fs.lorentz_dot(ft);
    let gg = ft.lorentz_dot(ft);
    let det = e * gg - ff * ff;
    let root = math::sqrt(math::abs(det));
    let (hs, ht) = (fs[2], ft[2]);
    let up_s = (gg * hs - ff * ht) / det;
    let up_t = (-ff * hs + e * ht) / det;
    let star = [sigma * root * up_t, -sigma * root * up_s];
    let (x, y) = (pos[0], pos[1]);
    let form = [
        star[0] - tau * y * fs[0] + tau * x * fs[1],
        star[1] - tau * y * ft[0] + tau * x * ft[1],
    ];
    (form, star)
}

struct FormEval<'a> {
    table: &'a FrameTable,
    tau: f64,
    sigma: f64,
}

impl FormEval<'_> {
    fn at(&self, s: f64, t: f64) -> Result<[f64; 2], BScrollError> {
        Ok(df3_form(&self.table.frame_at(s)?, t, self.tau, self.sigma).0)
    }

    /// Integral along the straight segment `p -> q`.
    fn segment(&self, p: (f64, f64), q: (f64, f64)) -> Result<f64, BScrollError> {
        let (ds, dt) = (q.0 - p.0, q.1 - p.1);
        let mut acc = 0.0;
        for (x, w) in GL_X.iter().zip(GL_W) {
            let u = 0.5 * (1.0 + x);
            let a = self.at(p.0 + u * ds, p.1 + u * dt)?;
            acc += w * (a[0] * ds + a[1] * dt);
        }
        Ok(0.5 * acc)
    }

    fn max_loop_per_area(&self, s: &[f64], t: &[f64]) -> Result<f64, BScrollError> {
        let mut worst: f64 = 0.0;
        for j in 0..t.len() - 1 {
            for i in 0..s.len() - 1 {
                let c = [
                    (s[i], t[j]),
                    (s[i + 1], t[j]),
                    (s[i + 1], t[j + 1]),
                    (s[i], t[j + 1]),
                ];
                let mut l = 0.0;
                for k in 0..4 {
                    l += self.segment(c[k], c[(k + 1) % 4])?;
                }
                let area = (s[i + 1] - s[i]) * (t[j + 1] - t[j]);
                worst = worst.max(math::abs(l) / area);
            }
        }
        Ok(worst)
    }
}

/// Integrates the dual surface with `f1 = f_L^1`, `f2 = f_L^2` and `f3` from
/// the closed 1-form above; the Hodge orientation is the one whose cell loop
/// integrals stay below `loop_tol` per unit area.
pub fn reconstruct_nil(
    table: &FrameTable,
    grid: &ScrollGrid,
    loop_tol: f64,
) -> Result<NilReconstruction, BScrollError> {
    let tau = grid.tau;
    let (ns, nt) = (grid.ns(), grid.nt());
    let plus = FormEval {
        table,
        tau,
        sigma: 1.0,
    };
    let minus = FormEval {
        table,
        tau,
        sigma: -1.0,
    };
    let lp = plus.max_loop_per_area(&grid.s, &grid.t)?;
    let lm = minus.max_loop_per_area(&grid.s, &grid.t)?;
    let (form, best, other) = if lp <= lm {
        (plus, lp, lm)
    } else {
        (minus, lm, lp)
    };
    if !(best <= loop_tol) {
        return Err(BScrollError::NonClosedForm { residual: best });
    }

    // f3 = 0 at the centre node; integrate along t there, then along s
    let (bi, bj) = (ns / 2, nt / 2);
    let mut col = alloc::vec![0.0; nt];
    for j in (0..bj).rev() {
        col[j] = col[j + 1] + form.segment((grid.s[bi], grid.t[j + 1]), (grid.s[bi], grid.t[j]))?;
    }
    for j in bj + 1..nt {
        col[j] = col[j - 1] + form.segment((grid.s[bi], grid.t[j - 1]), (grid.s[bi], grid.t[j]))?;
    }
    let mut f3 = alloc::vec![0.0; ns * nt];
    for j in 0..nt {
        f3[j * ns + bi] = col[j];
        for i in (0..bi).rev() {
            let d = form.segment((grid.s[i + 1], grid.t[j]), (grid.s[i], grid.t[j]))?;
            f3[j * ns + i] = f3[j * ns + i + 1] + d;
        }
        for i in bi + 1..ns {
            let d = form.segment((grid.s[i - 1], grid.t[j]), (grid.s[i], grid.t[j]))?;
            f3[j * ns + i] = f3[j * ns + i - 1] + d;
        }
    }

    let frames = grid
        .s
        .iter()
        .map(|&s| table.frame_at(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut positions = Vec::with_capacity(ns * nt);
    let mut fx = Vec::with_capacity(ns * nt);
    let mut fy = Vec::with_capacity(ns * nt);
    for j in 0..nt {
        for i in 0..ns {
            let k = j * ns + i;
            let pl = grid.positions[k];
            positions.push(Vec3::new(pl[0], pl[1], f3[k]));
            let (_, star) = df3_form(&frames[i], grid.t[j], tau, form.sigma);
            let (fs, ft) = (grid.f_s[k], grid.f_t[k]);
            fx.push(Vec3::new(fs[0], fs[1], star[0]));
            fy.push(Vec3::new(ft[0], ft[1], star[1]));
        }
    }
    let hs = grid.s[1] - grid.s[0];
    let ht = grid.t[1] - grid.t[0];
    Ok(NilReconstruction {
        positions,
        hodge_sign: form.sigma,
        max_loop_per_area: best,
        rejected_loop_per_area: other,
        tangents: TangentField::new(ns, nt, hs, ht, fx, fy),
        gauss: grid.gauss_map(),
    })
}

/// Real function of two variables with derivatives up to order two.
#[derive(Clone, Copy, Debug, Default)]
struct Jet2R {
    v: f64,
    u: f64,
    w: f64,
    uu: f64,
    uw: f64,
    ww: f64,
}

impl Jet2R {
    fn mul(self, o: Jet2R) -> Jet2R {
        Jet2R {
            v: self.v * o.v,
            u: self.u * o.v + self.v * o.u,
            w: self.w * o.v + self.v * o.w,
            uu: self.uu * o.v + 2.0 * self.u * o.u + self.v * o.uu,
            uw: self.uw * o.v + self.u * o.w + self.w * o.u + self.v * o.uw,
            ww: self.ww * o.v + 2.0 * self.w * o.w + self.v * o.ww,
        }
    }

    fn recip(self) -> Jet2R {
        let r = 1.0 / self.v;
        let (d1, d2) = (-r * r, 2.0 * r * r * r);
        Jet2R {
            v: r,
            u: d1 * self.u,
            w: d1 * self.w,
            uu: d2 * self.u * self.u + d1 * self.uu,
            uw: d2 * self.u * self.w + d1 * self.uw,
            ww: d2 * self.w * self.w + d1 * self.ww,
        }
    }

    fn add(self, o: Jet2R, k: f64) -> Jet2R {
        Jet2R {
            v: self.v + k * o.v,
            u: self.u + k * o.u,
            w: self.w + k * o.w,
            uu: self.uu + k * o.uu,
            uw: self.uw + k * o.uw,
            ww: self.ww + k * o.ww,
        }
    }
}

/// The Gauss map of the dual surface in the conformal chart
/// `u = s`, `v = -1/t - tau^2 s / 2`, with `z` the point whose null parts
/// are `(u, v)`. Valid off `t = 0` and off `N_L^3 = 1`.
pub struct ScrollChartSource {
    pub table: FrameTable,
}

impl ScrollChartSource {
    /// Chart point of `(s, t)`.
    pub fn chart_point(&self, s: f64, t: f64) -> Paracomplex {
        let tau = self.table.tau();
        Paracomplex::from_null(s, -1.0 / t - 0.5 * tau * tau * s)
    }

    /// `(s, t)` of a chart point.
    pub fn scroll_point(&self, z: Paracomplex) -> (f64, f64) {
        let (u, v) = z.null_parts();
        let tau = self.table.tau();
        (u, -1.0 / (v + 0.5 * tau * tau * u))
    }
}

impl GaussSource for ScrollChartSource {
    fn jet(&self, z: Paracomplex) -> Result<Jet2, HarmonicError> {
        let (u, v) = z.null_parts();
        let tau = self.table.tau();
        let off = HarmonicError::OffLattice { x: z.re, y: z.im };
        let wv = v + 0.5 * tau * tau * u;
        if !(math::abs(wv) > 1e-300) {
            return Err(HarmonicError::ProjectionPole);
        }
        let t = -1.0 / wv;
        let f = self.table.frame_at(u).map_err(|_| off)?;
        let (k, dk, _) = self.table.profile.eval(u).map_err(|_| off)?;
        let (a, b, c) = (f.a, f.b, f.c);
        let t2 = t * t;
        let tt2 = tau * tau;
        // X = N_L and its (s, t) derivatives
        let x = -(c + (t * tau) * b);
        let xs = -(tau * a + k * b + (t * tt2) * c);
        let xt = -(tau * b);
        let xss = -((2.0 * tau * k) * c + dk * b + (t * tt2) * (tau * a + k * b));
        let xst = -(tt2 * c);
        // t as a function of (u, v)
        let tu = 0.5 * tt2 * t2;
        let tv = t2;
        let tuu = 0.5 * tt2 * tt2 * t2 * t;
        let tuv = tt2 * t2 * t;
        let tvv = 2.0 * t2 * t;
        let comp = |i: usize| Jet2R {
            v: x[i],
            u: xs[i] + xt[i] * tu,
            w: xt[i] * tv,
            uu: xss[i] + 2.0 * xst[i] * tu + xt[i] * tuu,
            uw: xst[i] * tv + xt[i] * tuv,
            ww: xt[i] * tvv,
        };
        let (x1, x2, x3) = (comp(0), comp(1), comp(2));
        let den = Jet2R {
            v: 1.0,
            ..Default::default()
        }
        .add(x3, -1.0);
        if !(math::abs(den.v) > 1e-12) {
            return Err(HarmonicError::ProjectionPole);
        }
        let inv = den.recip();
        let gp = x2.add(x1, 1.0).mul(inv);
        let gm = x2.add(x1, -1.0).mul(inv);
        let (gp, gm) = (scale_r(gp, -1.0), scale_r(gm, -1.0));
        let p = Paracomplex::from_null;
        Ok(Jet2 {
            v: p(gp.v, gm.v),
            dz: p(gp.u, gm.w),
            dzb: p(gp.w, gm.u),
            dzz: p(gp.uu, gm.ww),
            dzzb: p(gp.uw, gm.uw),
            dzbzb: p(gp.ww, gm.uu),
        })
    }
}

fn scale_r(j: Jet2R, k: f64) -> Jet2R {
    Jet2R {
        v: k * j.v,
        u: k * j.u,
        w: k * j.w,
        uu: k * j.uu,
        uw: k * j.uw,
        ww: k * j.ww,
    }
}

/// A Gauss-map field for the dual surface of a B-scroll.
pub fn chart_field(table: FrameTable) -> Result<HarmonicField, HarmonicError> {
    let tau = table.tau();
    HarmonicField::new(
        crate::harmonic::Source::Custom(alloc::boxed::Box::new(ScrollChartSource { table })),
        tau,
    )
}

/// An event of the ratio criteria along the chart image of `t(s)`.
#[derive(Clone, Copy, Debug)]
pub struct ChartEvent {
    pub s: f64,
    pub point: SingularPoint,
}

/// The singular curve `t(s)` in the chart, classified with the criteria on
/// `r = g_z / (g^2 omega_hat)`. `field` must come from [`chart_field`].
pub fn classify_chart(
    field: &HarmonicField,
    table: &FrameTable,
    s_range: (f64, f64),
    n: usize,
    tol: Tolerances,
) -> Result<Vec<ChartEvent>, BScrollError> {
    let tau = table.tau();
    let src = ScrollChartSource {
        table: table.clone(),
    };
    let mut branches: Vec<Vec<SingularPoint>> = alloc::vec![Vec::new()];
    for s in linspace(s_range, n) {
        let f = table.frame_at(s)?;
        let Some(t) = singular_t(&f, tau) else {
            branches.push(Vec::new());
            continue;
        };
        if !(math::abs(t) > 1e-12) || !t.is_finite() {
            branches.push(Vec::new());
            continue;
        }
        let z = src.chart_point(s, t);
        let Ok(sample) = field.sample(z) else {
            branches.push(Vec::new());
            continue;
        };
        let (nondegenerate, kind, diagnostics) =
            singular::diagnose(Stratum::SigmaG, &sample, tau, tol);
        let last = branches.last_mut().expect("non-empty");
        if let Some(prev) = last.last() {
            if prev.diagnostics.re_r.is_none() || diagnostics.re_r.is_none() {
                branches.push(Vec::new());
            }
        }
        let pt = SingularPoint {
            z,
            t: s,
            stratum: Stratum::SigmaG,
            nondegenerate,
            kind,
            diagnostics,
        };
        branches.last_mut().expect("non-empty").push(pt);
    }
    let mut out = Vec::new();
    let opts = singular::ClassifyOptions { tol, strict: false };
    for br in branches.into_iter().filter(|b| b.len() >= 2) {
        let curve = SingularCurve {
            stratum: Stratum::SigmaG,
            tangents: Vec::new(),
            points: br,
            closed: false,
        };
        for point in singular::classify_sigma_g(field, &curve, opts)?.events {
            out.push(ChartEvent {
                s: src.scroll_point(point.z).0,
                point,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> FrameTable {
        let p = CurvatureProfile::parse("2", 1.0).unwrap();
        integrate_frame(&p, FrameState::standard(), (-2.0, 2.0), 1e-3, true).unwrap()
    }

    fn closed_frame(s: f64) -> (Vec3, Vec3, Vec3) {
        let (ch, sh) = (libm::cosh(2.0 * s), libm::sinh(2.0 * s));
        (
            Vec3::new(ch, 1.0, -sh),
            Vec3::new(0.5 * ch, -0.5, -0.5 * sh),
            Vec3::new(sh, 0.0, -ch),
        )
    }

    #[test]
    fn lorentz_cross_of_initial_frame() {
        let f = FrameState::standard();
        assert_eq!(f.a.lorentz_cross(f.b), Vec3::new(0.0, 0.0, -1.0));
        assert!(f.defect() < 1e-15);
    }

    #[test]
    fn example_frame_matches() {
        let tab = example();
        let mut err: f64 = 0.0;
        for f in &tab.frames {
            let (a, b, c) = closed_frame(f.s);
            err = err
                .max((f.a - a).max_abs())
                .max((f.b - b).max_abs())
                .max((f.c - c).max_abs());
            assert!(f.defect() < 1e-9);
        }
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn bad_initial_frame() {
        let p = CurvatureProfile::parse("2", 1.0).unwrap();
        let mut f = FrameState::standard();
        f.a = Vec3::new(1.0, 1.1, 0.0);
        let e = integrate_frame(&p, f, (-1.0, 1.0), 1e-2, true).unwrap_err();
        assert!(matches!(e, BScrollError::BadInitialFrame { .. }));
    }

    #[test]
    fn flat_profile_keeps_frame() {
        let p = CurvatureProfile::parse("0", 1.0).unwrap();
        let tab = integrate_frame(&p, FrameState::standard(), (0.0, 1.0), 1e-2, true).unwrap();
        assert_eq!(tab.frames.len(), 101);
        // tau still rotates B into C, so only check the relations
        assert!(tab.frames.iter().all(|f| f.defect() < 1e-12));
    }

    #[test]
    fn singular_curve_of_example() {
        let tab = example();
        for s in [-1.5, -0.4, 0.3, 1.1] {
            let t = singular_parameter(&tab, s).unwrap();
            assert!((t + 2.0 / libm::tanh(2.0 * s)).abs() < 1e-8);
            let f = tab.frame_at(s).unwrap();
            assert!(scroll_normal(&f, t, 1.0)[2].abs() < 1e-10);
        }
        assert!(matches!(
            singular_parameter(&tab, 0.0),
            Err(BScrollError::PoleInCurve { .. })
        ));
    }

    #[test]
    fn swallowtails_of_example() {
        let tab = example();
        let cls = classify_scroll(&tab, (-2.0, 2.0), 4001, 1e-7).unwrap();
        let sw: Vec<_> = cls.of_kind(Kind::Swallowtail).collect();
        assert_eq!(sw.len(), 2);
        let s0 = 0.25 * libm::log(5.0 + 2.0 * libm::sqrt(6.0));
        assert!((sw[0].s + s0).abs() < 1e-6 && (sw[1].s - s0).abs() < 1e-6);
        assert!((sw[0].t - libm::sqrt(6.0)).abs() < 1e-6);
        let r2 = libm::sqrt(2.0);
        assert!((sw[1].d1 - Vec3::new(0.0, 0.0, r2)).max_abs() < 1e-6);
        assert!((sw[0].d1 - Vec3::new(0.0, 0.0, -r2)).max_abs() < 1e-6);
    }

    #[test]
    fn chart_gauss_map_is_harmonic() {
        let tab = example();
        let field = chart_field(tab).unwrap();
        for (x, y) in [(0.1, 0.4), (-0.3, 0.2), (0.5, -0.1)] {
            let s = field.sample(Paracomplex::new(x, y)).unwrap();
            assert!(crate::harmonic::harmonic_residual(&s).max_abs() < 1e-6);
            let (d1, d2) = crate::harmonic::dirac_residuals(&s);
            assert!(d1.max_abs() < 1e-6 && d2.max_abs() < 1e-6);
        }
    }
}
