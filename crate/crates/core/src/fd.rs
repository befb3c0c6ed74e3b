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

//! Finite-difference weights on arbitrary 1-D stencils.

use alloc::vec;
use alloc::vec::Vec;

/// Weights `w[k][i]` such that `sum_i w[k][i] f(nodes[i])` approximates the
/// `k`-th derivative at `x0`, for `k = 0..=max_order` (Fornberg's recursion).
pub fn weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    if n == 0 {
        return c;
    }
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// A stencil of `width` consecutive lattice nodes around `index`, shifted
/// inwards at the ends of `0..len`. Returns the first node and the weights
/// for derivatives up to `max_order`, already divided by `h^k`.
pub fn lattice_stencil(
    index: usize,
    len: usize,
    width: usize,
    h: f64,
    max_order: usize,
) -> Option<(usize, Vec<Vec<f64>>)> {
    if len < width || index >= len {
        return None;
    }
    let half = width / 2;
    let start = index.saturating_sub(half).min(len - width);
    let nodes: Vec<f64> = (0..width).map(|i| (start + i) as f64).collect();
    let mut w = weights(index as f64, &nodes, max_order);
    let mut scale = 1.0;
    for row in w.iter_mut().skip(1) {
        scale *= h;
        for v in row.iter_mut() {
            *v /= scale;
        }
    }
    Some((start, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_five_point() {
        let w = weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let d1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for i in 0..5 {
            assert!((w[1][i] - d1[i]).abs() < 1e-14);
            assert!((w[2][i] - d2[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn one_sided_stencil_is_exact_on_quartics() {
        let h = 0.1;
        let f = |x: f64| 3.0 * x * x * x * x - x * x + 2.0;
        let (start, w) = lattice_stencil(0, 9, 5, h, 2).unwrap();
        assert_eq!(start, 0);
        let vals: Vec<f64> = (0..5).map(|i| f(i as f64 * h)).collect();
        let d1: f64 = w[1].iter().zip(&vals).map(|(a, b)| a * b).sum();
        let d2: f64 = w[2].iter().zip(&vals).map(|(a, b)| a * b).sum();
        assert!(d1.abs() < 1e-10);
        assert!((d2 + 2.0).abs() < 1e-8);
    }
}
