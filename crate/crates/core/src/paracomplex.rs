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

//! Split-complex ("paracomplex") numbers and Wirtinger jets.
//!
//! A paracomplex number is `x + j y` with `j^2 = 1`. Its squared modulus
//! `x^2 - y^2` is sign-indefinite and the elements with zero modulus, the
//! multiples of `1 + j` and `1 - j`, are zero divisors.
//!
//! Every paracomplex number splits along the idempotents `e± = (1 ± j)/2`
//! as `z = u e+ + v e-` with `u = x + y` and `v = x - y`. Products act
//! componentwise on `(u, v)` and so do elementary functions, which keeps
//! `exp`, `sinh` and `cosh` total on the whole plane.
//!
//! Derivatives use `d/dz = (d/dx + j d/dy)/2` and `d/dzbar = (d/dx - j d/dy)/2`
//! throughout the crate.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::math;

/// Attempted to invert an element with `|z|^2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("null divisor: paracomplex number with zero squared modulus is not invertible")]
pub struct NullDivisor;

/// `re + j im` with `j^2 = 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Paracomplex {
    pub re: f64,
    pub im: f64,
}

impl Paracomplex {
    pub const ZERO: Paracomplex = Paracomplex { re: 0.0, im: 0.0 };
    pub const ONE: Paracomplex = Paracomplex { re: 1.0, im: 0.0 };
    pub const J: Paracomplex = Paracomplex { re: 0.0, im: 1.0 };

    #[inline]
    pub const fn new(re: f64, im: f64) -> Self {
        Paracomplex { re, im }
    }

    #[inline]
    pub const fn real(re: f64) -> Self {
        Paracomplex { re, im: 0.0 }
    }

    /// Builds `u e+ + v e-`.
    #[inline]
    pub fn from_null(u: f64, v: f64) -> Self {
        Paracomplex::new(0.5 * (u + v), 0.5 * (u - v))
    }

    /// Components `(u, v) = (re + im, re - im)` along the idempotents.
    #[inline]
    pub fn null_parts(self) -> (f64, f64) {
        (self.re + self.im, self.re - self.im)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Paracomplex::new(self.re, -self.im)
    }

    /// `z zbar = re^2 - im^2`.
    #[inline]
    pub fn modulus_sq(self) -> f64 {
        self.re * self.re - self.im * self.im
    }

    #[inline]
    pub fn scale(self, k: f64) -> Self {
        Paracomplex::new(self.re * k, self.im * k)
    }

    /// Multiplication by `j` swaps the components.
    #[inline]
    pub fn mul_j(self) -> Self {
        Paracomplex::new(self.im, self.re)
    }

    /// Largest absolute component, used for tolerance tests.
    #[inline]
    pub fn max_abs(self) -> f64 {
        math::fmax(math::abs(self.re), math::abs(self.im))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// `|a - b| <= tol * (1 + max(|a|, |b|))` on each component.
    pub fn approx_eq(self, other: Paracomplex, tol: f64) -> bool {
        let scale = 1.0 + math::fmax(self.max_abs(), other.max_abs());
        (self - other).max_abs() <= tol * scale
    }

    /// `zbar / |z|^2`.
    pub fn inverse(self) -> Result<Self, NullDivisor> {
        let m = self.modulus_sq();
        if m == 0.0 || !m.is_finite() {
            return Err(NullDivisor);
        }
        Ok(self.conj().scale(1.0 / m))
    }

    pub fn checked_div(self, rhs: Paracomplex) -> Result<Self, NullDivisor> {
        Ok(self * rhs.inverse()?)
    }

    pub fn powi(self, n: i32) -> Result<Self, NullDivisor> {
        let base = if n < 0 { self.inverse()? } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Paracomplex::ONE;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Every `w` with `w * w = self`.
    ///
    /// Writing `w = a + j b`, the equations `a^2 + b^2 = x`, `2ab = y` become
    /// `(a + b)^2 = x + y` and `(a - b)^2 = x - y`, so roots exist iff both
    /// right-hand sides are non-negative. There are four of them when both
    /// are positive, two when exactly one vanishes and one (zero) otherwise.
    pub fn sqrt_all(self) -> Vec<Paracomplex> {
        let (u, v) = self.null_parts();
        let mut out = Vec::new();
        if u < 0.0 || v < 0.0 || !u.is_finite() || !v.is_finite() {
            return out;
        }
        let su = math::sqrt(u);
        let sv = math::sqrt(v);
        for (a, b) in [(su, sv), (-su, -sv), (su, -sv), (-su, sv)] {
            let w = Paracomplex::from_null(a, b);
            if !out
                .iter()
                .any(|o: &Paracomplex| o.re == w.re && o.im == w.im)
            {
                out.push(w);
            }
        }
        out
    }

    /// Applies a real function to both idempotent components.
    #[inline]
    pub fn map_null(self, f: impl Fn(f64) -> f64) -> Self {
        let (u, v) = self.null_parts();
        Paracomplex::from_null(f(u), f(v))
    }

    pub fn exp(self) -> Self {
        self.map_null(math::exp)
    }

    pub fn sinh(self) -> Self {
        self.map_null(math::sinh)
    }

    pub fn cosh(self) -> Self {
        self.map_null(math::cosh)
    }
}

impl fmt::Display for Paracomplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0.0 {
            write!(f, "{}-{}j", self.re, -self.im)
        } else {
            write!(f, "{}+{}j", self.re, self.im)
        }
    }
}

impl From<f64> for Paracomplex {
    fn from(re: f64) -> Self {
        Paracomplex::real(re)
    }
}

impl Add for Paracomplex {
    type Output = Paracomplex;
    #[inline]
    fn add(self, rhs: Paracomplex) -> Paracomplex {
        Paracomplex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for Paracomplex {
    type Output = Paracomplex;
    #[inline]
    fn sub(self, rhs: Paracomplex) -> Paracomplex {
        Paracomplex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for Paracomplex {
    type Output = Paracomplex;
    #[inline]
    fn mul(self, rhs: Paracomplex) -> Paracomplex {
        Paracomplex::new(
            self.re * rhs.re + self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Mul<f64> for Paracomplex {
    type Output = Paracomplex;
    #[inline]
    fn mul(self, rhs: f64) -> Paracomplex {
        self.scale(rhs)
    }
}

impl Mul<Paracomplex> for f64 {
    type Output = Paracomplex;
    #[inline]
    fn mul(self, rhs: Paracomplex) -> Paracomplex {
        rhs.scale(self)
    }
}

impl Div<f64> for Paracomplex {
    type Output = Paracomplex;
    #[inline]
    fn div(self, rhs: f64) -> Paracomplex {
        Paracomplex::new(self.re / rhs, self.im / rhs)
    }
}

impl Neg for Paracomplex {
    type Output = Paracomplex;
    #[inline]
    fn neg(self) -> Paracomplex {
        Paracomplex::new(-self.re, -self.im)
    }
}

impl AddAssign for Paracomplex {
    #[inline]
    fn add_assign(&mut self, rhs: Paracomplex) {
        *self = *self + rhs;
    }
}

impl SubAssign for Paracomplex {
    #[inline]
    fn sub_assign(&mut self, rhs: Paracomplex) {
        *self = *self - rhs;
    }
}

impl MulAssign for Paracomplex {
    #[inline]
    fn mul_assign(&mut self, rhs: Paracomplex) {
        *self = *self * rhs;
    }
}

/// First-order jet: value with `d/dz` and `d/dzbar`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Jet1 {
    pub v: Paracomplex,
    pub dz: Paracomplex,
    pub dzb: Paracomplex,
}

impl Jet1 {
    pub fn constant(c: Paracomplex) -> Self {
        Jet1 {
            v: c,
            ..Default::default()
        }
    }

    pub fn new(v: Paracomplex, dz: Paracomplex, dzb: Paracomplex) -> Self {
        Jet1 { v, dz, dzb }
    }

    pub fn scale(self, k: Paracomplex) -> Self {
        Jet1::new(self.v * k, self.dz * k, self.dzb * k)
    }

    pub fn conj(self) -> Self {
        Jet1::new(self.v.conj(), self.dzb.conj(), self.dz.conj())
    }

    /// `F(w)` for a paraholomorphic `F` with `F(w) = f0`, `F'(w) = f1`.
    pub fn chain(self, f0: Paracomplex, f1: Paracomplex) -> Self {
        Jet1::new(f0, f1 * self.dz, f1 * self.dzb)
    }

    pub fn recip(self) -> Result<Self, NullDivisor> {
        let inv = self.v.inverse()?;
        Ok(self.chain(inv, -(inv * inv)))
    }

    pub fn checked_div(self, rhs: Jet1) -> Result<Self, NullDivisor> {
        Ok(self * rhs.recip()?)
    }

    pub fn powi(self, n: i32) -> Result<Self, NullDivisor> {
        if n == 0 {
            return Ok(Jet1::constant(Paracomplex::ONE));
        }
        let f0 = self.v.powi(n)?;
        let f1 = self.v.powi(n - 1)?.scale(n as f64);
        Ok(self.chain(f0, f1))
    }

    /// Square root of a real-valued jet with positive value.
    pub fn sqrt_real(self) -> Option<Self> {
        let x = self.v.re;
        if !(x > 0.0) {
            return None;
        }
        let r = math::sqrt(x);
        Some(self.chain(Paracomplex::real(r), Paracomplex::real(0.5 / r)))
    }

    /// `Re f = (f + fbar)/2` as a jet.
    pub fn re_part(self) -> Self {
        (self + self.conj()).scale(Paracomplex::real(0.5))
    }

    /// `Im f = j (f - fbar)/2` as a jet.
    pub fn im_part(self) -> Self {
        (self - self.conj()).scale(Paracomplex::new(0.0, 0.5))
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, r: Jet1) -> Jet1 {
        Jet1::new(self.v + r.v, self.dz + r.dz, self.dzb + r.dzb)
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, r: Jet1) -> Jet1 {
        Jet1::new(self.v - r.v, self.dz - r.dz, self.dzb - r.dzb)
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        Jet1::new(-self.v, -self.dz, -self.dzb)
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, r: Jet1) -> Jet1 {
        Jet1::new(
            self.v * r.v,
            self.dz * r.v + self.v * r.dz,
            self.dzb * r.v + self.v * r.dzb,
        )
    }
}

impl Add<Paracomplex> for Jet1 {
    type Output = Jet1;
    fn add(self, c: Paracomplex) -> Jet1 {
        Jet1 {
            v: self.v + c,
            ..self
        }
    }
}

/// Second-order jet in `(z, zbar)`. The mixed slot `dzzb` is shared by both
/// orders of differentiation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Jet2 {
    pub v: Paracomplex,
    pub dz: Paracomplex,
    pub dzb: Paracomplex,
    pub dzz: Paracomplex,
    pub dzzb: Paracomplex,
    pub dzbzb: Paracomplex,
}

impl Jet2 {
    pub fn constant(c: Paracomplex) -> Self {
        Jet2 {
            v: c,
            ..Default::default()
        }
    }

    /// The coordinate function `z` at `z0`.
    pub fn var_z(z0: Paracomplex) -> Self {
        Jet2 {
            v: z0,
            dz: Paracomplex::ONE,
            ..Default::default()
        }
    }

    /// The coordinate function `zbar` at `z0`.
    pub fn var_zbar(z0: Paracomplex) -> Self {
        Jet2 {
            v: z0.conj(),
            dzb: Paracomplex::ONE,
            ..Default::default()
        }
    }

    pub fn scale(self, k: Paracomplex) -> Self {
        Jet2 {
            v: self.v * k,
            dz: self.dz * k,
            dzb: self.dzb * k,
            dzz: self.dzz * k,
            dzzb: self.dzzb * k,
            dzbzb: self.dzbzb * k,
        }
    }

    /// `d_z(fbar) = conj(d_zbar f)`; second slots follow the same exchange.
    pub fn conj(self) -> Self {
        Jet2 {
            v: self.v.conj(),
            dz: self.dzb.conj(),
            dzb: self.dz.conj(),
            dzz: self.dzbzb.conj(),
            dzzb: self.dzzb.conj(),
            dzbzb: self.dzz.conj(),
        }
    }

    /// `F(w)` with `F(w) = f0`, `F'(w) = f1`, `F''(w) = f2`.
    pub fn chain(self, f0: Paracomplex, f1: Paracomplex, f2: Paracomplex) -> Self {
        Jet2 {
            v: f0,
            dz: f1 * self.dz,
            dzb: f1 * self.dzb,
            dzz: f2 * self.dz * self.dz + f1 * self.dzz,
            dzzb: f2 * self.dz * self.dzb + f1 * self.dzzb,
            dzbzb: f2 * self.dzb * self.dzb + f1 * self.dzbzb,
        }
    }

    pub fn recip(self) -> Result<Self, NullDivisor> {
        let inv = self.v.inverse()?;
        let inv2 = inv * inv;
        Ok(self.chain(inv, -inv2, (inv2 * inv).scale(2.0)))
    }

    pub fn checked_div(self, rhs: Jet2) -> Result<Self, NullDivisor> {
        Ok(self * rhs.recip()?)
    }

    pub fn powi(self, n: i32) -> Result<Self, NullDivisor> {
        match n {
            0 => Ok(Jet2::constant(Paracomplex::ONE)),
            1 => Ok(self),
            _ => {
                let f0 = self.v.powi(n)?;
                let f1 = self.v.powi(n - 1)?.scale(n as f64);
                let f2 = self.v.powi(n - 2)?.scale((n as f64) * (n as f64 - 1.0));
                Ok(self.chain(f0, f1, f2))
            }
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn sinh(self) -> Self {
        let s = self.v.sinh();
        let c = self.v.cosh();
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let s = self.v.sinh();
        let c = self.v.cosh();
        self.chain(c, s, c)
    }

    /// `Re f = (f + fbar)/2`.
    pub fn re_part(self) -> Self {
        (self + self.conj()).scale(Paracomplex::real(0.5))
    }

    /// `Im f = j (f - fbar)/2`.
    pub fn im_part(self) -> Self {
        (self - self.conj()).scale(Paracomplex::new(0.0, 0.5))
    }

    /// Drops the second-order slots.
    pub fn first_order(self) -> Jet1 {
        Jet1::new(self.v, self.dz, self.dzb)
    }

    /// `f_z` as a first-order jet.
    pub fn z_derivative(self) -> Jet1 {
        Jet1::new(self.dz, self.dzz, self.dzzb)
    }

    /// `f_zbar` as a first-order jet.
    pub fn zbar_derivative(self) -> Jet1 {
        Jet1::new(self.dzb, self.dzzb, self.dzbzb)
    }

    pub fn is_finite(&self) -> bool {
        [self.v, self.dz, self.dzb, self.dzz, self.dzzb, self.dzbzb]
            .iter()
            .all(|p| p.is_finite())
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, r: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + r.v,
            dz: self.dz + r.dz,
            dzb: self.dzb + r.dzb,
            dzz: self.dzz + r.dzz,
            dzzb: self.dzzb + r.dzzb,
            dzbzb: self.dzbzb + r.dzbzb,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, r: Jet2) -> Jet2 {
        self + (-r)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-Paracomplex::ONE)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, r: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * r.v,
            dz: self.dz * r.v + self.v * r.dz,
            dzb: self.dzb * r.v + self.v * r.dzb,
            dzz: self.dzz * r.v + (self.dz * r.dz).scale(2.0) + self.v * r.dzz,
            dzzb: self.dzzb * r.v + self.dz * r.dzb + self.dzb * r.dz + self.v * r.dzzb,
            dzbzb: self.dzbzb * r.v + (self.dzb * r.dzb).scale(2.0) + self.v * r.dzbzb,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Paracomplex, b: Paracomplex) -> bool {
        a.approx_eq(b, 1e-12)
    }

    #[test]
    fn multiplication_examples() {
        let z = Paracomplex::new(1.0, 1.0) * Paracomplex::new(1.0, -1.0);
        assert!(close(z, Paracomplex::ZERO));
        assert!(close(Paracomplex::J * Paracomplex::J, Paracomplex::ONE));
        let p = Paracomplex::new(2.0, 1.0) * Paracomplex::new(3.0, 1.0);
        assert!(close(p, Paracomplex::new(7.0, 5.0)));
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(Paracomplex::new(1.0, 1.0).modulus_sq(), 0.0);
        let z = Paracomplex::new(2.0, 1.0);
        assert_eq!(z.modulus_sq(), 3.0);
        assert_eq!((Paracomplex::J * z).modulus_sq(), -3.0);
        assert_eq!(Paracomplex::real(3.0).modulus_sq(), 9.0);
    }

    #[test]
    fn inverse_examples() {
        assert!(close(
            Paracomplex::real(2.0).inverse().unwrap(),
            Paracomplex::real(0.5)
        ));
        assert_eq!(
            Paracomplex::new(1.0, 1.0).inverse().unwrap_err(),
            NullDivisor
        );
        let inv = Paracomplex::new(2.0, 1.0).inverse().unwrap();
        assert!(close(inv, Paracomplex::new(2.0 / 3.0, -1.0 / 3.0)));
    }

    #[test]
    fn sqrt_examples() {
        let r = Paracomplex::ONE.sqrt_all();
        assert_eq!(r.len(), 4);
        for want in [
            Paracomplex::ONE,
            -Paracomplex::ONE,
            Paracomplex::J,
            -Paracomplex::J,
        ] {
            assert!(r.iter().any(|w| close(*w, want)));
        }
        assert!(Paracomplex::new(1.0, 2.0).sqrt_all().is_empty());
        let r = Paracomplex::new(5.0, 4.0).sqrt_all();
        assert_eq!(r.len(), 4);
        for want in [
            Paracomplex::new(2.0, 1.0),
            Paracomplex::new(-2.0, -1.0),
            Paracomplex::new(1.0, 2.0),
            Paracomplex::new(-1.0, -2.0),
        ] {
            assert!(r.iter().any(|w| close(*w, want)));
        }
        // boundary cases: one null component gives a pair, zero gives itself
        assert_eq!(Paracomplex::new(1.0, 1.0).sqrt_all().len(), 2);
        assert_eq!(Paracomplex::ZERO.sqrt_all().len(), 1);
    }

    #[test]
    fn coordinate_jets() {
        let z0 = Paracomplex::new(2.0, 1.0);
        let z = Jet2::var_z(z0);
        assert!(close(z.dz, Paracomplex::ONE) && close(z.dzb, Paracomplex::ZERO));
        let zb = z.conj();
        assert!(close(zb.dz, Paracomplex::ZERO) && close(zb.dzb, Paracomplex::ONE));
        let m = z * zb;
        assert!(close(m.v, Paracomplex::real(3.0)));
        assert!(close(m.dz, Paracomplex::new(2.0, -1.0)));
        assert!(close(m.dzb, Paracomplex::new(2.0, 1.0)));
        assert!(close(m.dzzb, Paracomplex::ONE));
        assert!(close(m.dzz, Paracomplex::ZERO));
    }

    #[test]
    fn re_im_jets_are_real_valued() {
        let z0 = Paracomplex::new(0.3, -0.7);
        let f = Jet2::var_z(z0).exp() * Jet2::var_zbar(z0);
        let r = f.re_part();
        let i = f.im_part();
        assert!(r.v.im.abs() < 1e-15 && i.v.im.abs() < 1e-15);
        assert!((r.v.re - f.v.re).abs() < 1e-15);
        assert!((i.v.re - f.v.im).abs() < 1e-15);
    }

    #[test]
    fn negative_powers_need_invertible_base() {
        let w = Jet2::var_z(Paracomplex::new(1.0, -1.0));
        assert!(w.powi(-2).is_err());
        assert!(w.powi(3).is_ok());
    }
}
