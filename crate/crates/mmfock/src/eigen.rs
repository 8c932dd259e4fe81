// Copyright 2026 The mmfock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.
//!
//! Generic over [`Real`] so it runs unchanged in extended precision.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numeric::{abs_c, Real};

pub type Matrix<T> = Vec<Vec<Complex<T>>>;

pub struct HermitianEigen<T: Real> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// `vectors[i][k]` is component i of eigenvector k.
    pub vectors: Matrix<T>,
}

const MAX_SWEEPS: usize = 100;

pub fn zeros<T: Real>(rows: usize, cols: usize) -> Matrix<T> {
    vec![vec![Complex::new(T::zero(), T::zero()); cols]; rows]
}

pub fn identity<T: Real>(n: usize) -> Matrix<T> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex::new(T::one(), T::zero());
    }
    m
}

/// `(A + A†) / 2`.
pub fn hermitize<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let half = T::from_f64(0.5);
    let n = a.len();
    let mut h = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let s = a[i][j].clone() + a[j][i].conj();
            h[i][j] = Complex::new(s.re * half.clone(), s.im * half.clone());
        }
    }
    h
}

/// `A† B`.
pub fn adjoint_mul<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (n, k, m) = (a.len(), a.first().map_or(0, Vec::len), b.first().map_or(0, Vec::len));
    let mut out = zeros(k, m);
    for i in 0..k {
        for j in 0..m {
            let mut acc = Complex::new(T::zero(), T::zero());
            for r in 0..n {
                acc = acc + a[r][i].conj() * b[r][j].clone();
            }
            out[i][j] = acc;
        }
    }
    out
}

/// `A B`.
pub fn mul<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut out = zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            let mut acc = Complex::new(T::zero(), T::zero());
            for r in 0..k {
                acc = acc + a[i][r].clone() * b[r][j].clone();
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn hermitian_eigen<T: Real>(a: &Matrix<T>) -> Result<HermitianEigen<T>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch("eigenproblem needs a square matrix".into()));
    }
    let mut h = hermitize(a);
    let mut v = identity::<T>(n);
    let frob: T = h.iter().flatten().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let tol = T::epsilon() * T::epsilon() * frob;
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + h[p][q].norm_sqr();
            }
        }
        if !(off > tol) {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut h, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NonFinite("Jacobi eigensolver did not converge"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[i][i].re.partial_cmp(&h[j][j].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| h[k][k].re.clone()).collect();
    let vectors = (0..n).map(|i| order.iter().map(|&k| v[i][k].clone()).collect()).collect();
    Ok(HermitianEigen { values, vectors })
}

/// Annihilate `h[p][q]` with a complex Givens rotation.
fn rotate<T: Real>(h: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let c = abs_c(&h[p][q]);
    if c.is_zero() {
        return;
    }
    let one = T::one();
    let e = Complex::new(h[p][q].re.clone() / c.clone(), h[p][q].im.clone() / c.clone());
    let theta = (h[q][q].re.clone() - h[p][p].re.clone()) / (T::from_f64(2.0) * c);
    let t = {
        let mag = one.clone() / (theta.abs() + (theta.clone() * theta.clone() + one.clone()).sqrt());
        if theta < T::zero() { -mag } else { mag }
    };
    let cs = one.clone() / (t.clone() * t.clone() + one).sqrt();
    let sn = t * cs.clone();
    let ec = e.conj();
    let g_pp = Complex::new(cs.clone(), T::zero());
    let g_pq = Complex::new(sn.clone(), T::zero());
    let g_qp = Complex::new(-(ec.re.clone() * sn.clone()), -(ec.im.clone() * sn));
    let g_qq = Complex::new(ec.re.clone() * cs.clone(), ec.im * cs);
    let n = h.len();
    for row in h.iter_mut().chain(v.iter_mut()) {
        let (a, b) = (row[p].clone(), row[q].clone());
        row[p] = a.clone() * g_pp.clone() + b.clone() * g_qp.clone();
        row[q] = a * g_pq.clone() + b * g_qq.clone();
    }
    for j in 0..n {
        let (a, b) = (h[p][j].clone(), h[q][j].clone());
        h[p][j] = g_pp.conj() * a.clone() + g_qp.conj() * b.clone();
        h[q][j] = g_pq.conj() * a + g_qq.conj() * b;
    }
    let zero = Complex::new(T::zero(), T::zero());
    h[p][q] = zero.clone();
    h[q][p] = zero;
    h[p][p].im = T::zero();
    h[q][q].im = T::zero();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{cplx, lower, Mp};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn check<T: Real>(a: &Matrix<T>, tol: f64) {
        let eig = hermitian_eigen(a).unwrap();
        let n = a.len();
        let av = mul(a, &eig.vectors);
        for k in 0..n {
            for i in 0..n {
                let lhs = lower(&av[i][k]);
                let rhs = lower(&eig.vectors[i][k]) * eig.values[k].to_f64();
                assert!((lhs - rhs).norm() < tol, "residual {}", (lhs - rhs).norm());
            }
        }
        let vv = adjoint_mul(&eig.vectors, &eig.vectors);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((lower(&vv[i][j]).re - want).abs() < tol && lower(&vv[i][j]).im.abs() < tol);
            }
        }
        for k in 1..n {
            assert!(eig.values[k - 1] <= eig.values[k]);
        }
    }

    #[test]
    fn known_spectrum() {
        let a: Matrix<f64> = vec![vec![cplx(2.0, 0.0), cplx(0.0, 1.0)], vec![cplx(0.0, -1.0), cplx(2.0, 0.0)]];
        let eig = hermitian_eigen(&a).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14 && (eig.values[1] - 3.0).abs() < 1e-14);
        check(&a, 1e-13);
    }

    #[test]
    fn hilbert_like_in_extended_precision() {
        let n = 10;
        let a: Matrix<Mp> = (0..n)
            .map(|i| (0..n).map(|j| cplx(2.0 * (((i + 1) * (j + 1)) as f64).sqrt() / (i + j + 2) as f64, 0.0)).collect())
            .collect();
        let eig = hermitian_eigen(&a).unwrap();
        // Smallest eigenvalue of this Gram matrix is around 1e-14; check it is resolved.
        assert!(eig.values[0].to_f64() > 0.0 && eig.values[0].to_f64() < 1e-10);
        let av = mul(&a, &eig.vectors);
        let resid = (0..n)
            .map(|i| {
                let d = av[i][0].clone() - eig.vectors[i][0].clone() * Complex::new(eig.values[0].clone(), Mp::zero());
                lower(&d).norm()
            })
            .fold(0.0, f64::max);
        assert!(resid < 1e-60);
    }

    proptest! {
        #[test]
        fn random_hermitian(entries in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 25)) {
            let a: Matrix<f64> = (0..5).map(|i| (0..5).map(|j| {
                let (re, im) = entries[5 * i + j];
                cplx(re, im)
            }).collect()).collect();
            check(&hermitize(&a), 1e-12);
        }
    }
}
