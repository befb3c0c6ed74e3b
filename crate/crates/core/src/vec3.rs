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

//! Three-vectors with Euclidean and Lorentzian `(-,+,+)` products.

use core::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use crate::math;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Vec3([a, b, c])
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    /// `-a1 b1 + a2 b2 + a3 b3`.
    pub fn lorentz_dot(self, o: Vec3) -> f64 {
        -self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Vec3([b * z - c * y, c * x - a * z, a * y - b * x])
    }

    /// The vector `W` with `lorentz_dot(W, Z) = det(X, Y, Z)` for every `Z`.
    pub fn lorentz_cross(self, o: Vec3) -> Vec3 {
        let e = self.cross(o);
        Vec3([-e.0[0], e.0[1], e.0[2]])
    }

    pub fn norm(self) -> f64 {
        math::sqrt(self.dot(self))
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0, |m, v| math::fmax(m, math::abs(*v)))
    }

    pub fn scale(self, k: f64) -> Vec3 {
        Vec3([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self.scale(-1.0)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentz_cross_of_initial_null_pair() {
        let a = Vec3::new(1.0, 1.0, 0.0);
        let b = Vec3::new(0.5, -0.5, 0.0);
        assert_eq!(a.lorentz_cross(b), Vec3::new(0.0, 0.0, -1.0));
        assert_eq!(a.lorentz_cross(a), Vec3::ZERO);
    }

    #[test]
    fn lorentz_cross_represents_determinant() {
        let x = Vec3::new(0.3, -1.2, 2.0);
        let y = Vec3::new(1.5, 0.4, -0.7);
        let z = Vec3::new(-0.9, 2.2, 0.1);
        let det = x.cross(y).dot(z);
        assert!((x.lorentz_cross(y).lorentz_dot(z) - det).abs() < 1e-14);
    }
}
