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

//! Orthonormal modes from a non-orthogonal exponential family.
//!
//! New modes are `c_k = Σ_j V[j][k] b_j`. With `R[k][l] = [b_l, b_k†]` and
//! `T[k][l] = ⟨b_k† b_l⟩` the requirements `[c_i, c_j†] = δ_ij` and
//! `⟨c_i† c_j⟩ = λ_i δ_ij` read `V† R V = 1` and `V† T V = diag(λ)`, i.e.
//! the generalized problem `T v = λ R v`. It is solved by whitening with
//! the eigenvectors of R and diagonalizing the whitened T.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::correlator::{normal_ordered, CorrelatorCache};
use crate::eigen::{adjoint_mul, hermitian_eigen, hermitize, mul, zeros, Matrix};
use crate::emitter::EmitterSpec;
use crate::error::{Error, Result};
use crate::modes::{commutator_in, gram_matrix, ExpMode};
use crate::numeric::{abs_c, lower, Real};

/// Relative eigenvalue floor for R below which directions are dropped.
pub fn default_deflation<T: Real>() -> f64 {
    if T::epsilon().to_f64() > 1e-20 {
        1e-10
    } else {
        1e-40
    }
}

#[derive(Clone, Debug)]
pub struct OrthoBasis<T: Real> {
    pub base: Vec<ExpMode>,
    /// D x K coefficient matrix; column k defines `c_k`.
    pub v: Matrix<T>,
    pub lambdas: Vec<T>,
    pub r: Matrix<T>,
    pub t: Matrix<T>,
    /// Eigenvalues of R that fell below the deflation floor.
    pub deflated: Vec<f64>,
}

impl<T: Real> OrthoBasis<T> {
    /// Number of retained orthonormal modes.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas_f64(&self) -> Vec<f64> {
        self.lambdas.iter().map(Real::to_f64).collect()
    }

    /// `max |V† R V - 1|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = adjoint_mul(&self.v, &mul(&self.r, &self.v));
        let mut worst = 0.0f64;
        for (i, row) in g.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((lower(z) - want).norm());
            }
        }
        worst
    }

    /// Orthogonalize the family using correlators from the engine.
    pub fn build(spec: &EmitterSpec, base: &[ExpMode]) -> Result<Self> {
        let d = base.len();
        let mut t = zeros::<T>(d, d);
        for k in 0..d {
            for l in k..d {
                let v = normal_ordered::<T>(spec, &base[l..=l], &base[k..=k])?;
                t[l][k] = v.conj();
                t[k][l] = v;
            }
        }
        let r = gram_matrix::<T>(base);
        let mut basis = orthogonalize(&t, &r, default_deflation::<T>())?;
        basis.base = base.to_vec();
        Ok(basis)
    }

    /// Orthogonalize using the first-order entries of a cache.
    pub fn from_cache(cache: &CorrelatorCache<T>) -> Result<Self> {
        let base = cache.base();
        let d = base.len();
        let mut t = zeros::<T>(d, d);
        for k in 0..d {
            for l in 0..d {
                // ⟨b_l b_k†⟩ - [b_l, b_k†] = ⟨b_k† b_l⟩
                t[k][l] = cache.get1(l, k)? - commutator_in::<T>(&base[l], &base[k]);
            }
        }
        let r = gram_matrix::<T>(base);
        let mut basis = orthogonalize(&t, &r, default_deflation::<T>())?;
        basis.base = base.to_vec();
        Ok(basis)
    }
}

/// Solve `T v = λ R v` with `V† R V = 1`, eigenvalues descending.
///
/// Directions with R-eigenvalue below `rel_floor` times the largest are
/// dropped and listed in `deflated`. The returned basis has an empty
/// `base`; callers attach the mode family.
pub fn orthogonalize<T: Real>(t: &Matrix<T>, r: &Matrix<T>, rel_floor: f64) -> Result<OrthoBasis<T>> {
    let d = r.len();
    if t.len() != d || t.iter().chain(r).any(|row| row.len() != d) || d == 0 {
        return Err(Error::DimensionMismatch("T and R must be square and of equal size".into()));
    }
    let (t, r) = (hermitize(t), hermitize(r));
    let er = hermitian_eigen(&r)?;
    let mu_max = er.values[d - 1].clone();
    if !(mu_max > T::zero()) {
        return Err(Error::InvalidArgument("Gram matrix is not positive".into()));
    }
    let floor = mu_max * T::from_f64(rel_floor);
    let mut deflated = Vec::new();
    let mut kept = Vec::new();
    for (k, mu) in er.values.iter().enumerate() {
        if *mu > floor {
            kept.push(k);
        } else {
            deflated.push(mu.to_f64());
        }
    }
    if !deflated.is_empty() {
        log::warn!("Gram matrix ill-conditioned: deflated {} direction(s) with eigenvalues {:?}", deflated.len(), deflated);
    }
    let kk = kept.len();
    let mut w = zeros::<T>(d, kk);
    for (c, &k) in kept.iter().enumerate() {
        let s = T::one() / er.values[k].sqrt();
        for i in 0..d {
            let z = &er.vectors[i][k];
            w[i][c] = Complex::new(z.re.clone() * s.clone(), z.im.clone() * s.clone());
        }
    }
    let h = hermitize(&adjoint_mul(&w, &mul(&t, &w)));
    let eh = hermitian_eigen(&h)?;
    let v_raw = mul(&w, &eh.vectors);

    // Largest-magnitude component of each column, for tie-breaks and phase.
    let lead: Vec<usize> = (0..kk)
        .map(|c| {
            let mut best = 0;
            for i in 1..d {
                if abs_c(&v_raw[i][c]) > abs_c(&v_raw[best][c]) {
                    best = i;
                }
            }
            best
        })
        .collect();
    let scale = eh.values.iter().fold(1.0f64, |m, x| m.max(x.to_f64().abs()));
    let mut order: Vec<usize> = (0..kk).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (eh.values[a].to_f64(), eh.values[b].to_f64());
        if (la - lb).abs() <= 1e-12 * scale {
            lead[a].cmp(&lead[b])
        } else {
            lb.partial_cmp(&la).unwrap_or(std::cmp::Ordering::Equal)
        }
    });
    let mut v = zeros::<T>(d, kk);
    let mut lambdas = Vec::with_capacity(kk);
    for (c, &k) in order.iter().enumerate() {
        let p = &v_raw[lead[k]][k];
        let mag = abs_c(p);
        let phase = Complex::new(p.re.clone() / mag.clone(), -(p.im.clone() / mag));
        for i in 0..d {
            v[i][c] = v_raw[i][k].clone() * phase.clone();
        }
        v[lead[k]][c].im = T::zero();
        lambdas.push(eh.values[k].clone());
    }
    Ok(OrthoBasis { base: Vec::new(), v, lambdas, r, t, deflated })
}

/// JSON form of a basis; `v` holds interleaved re/im rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisFile {
    pub base: Vec<ExpMode>,
    pub lambdas: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    /// Lossless text of the same entries.
    pub v_exact: Vec<Vec<String>>,
    pub precision: String,
    pub deflated: Vec<f64>,
}

impl<T: Real> OrthoBasis<T> {
    pub fn to_file(&self) -> BasisFile {
        BasisFile {
            base: self.base.clone(),
            lambdas: self.lambdas_f64(),
            v: self.v.iter().map(|row| row.iter().flat_map(|z| [z.re.to_f64(), z.im.to_f64()]).collect()).collect(),
            v_exact: self
                .v
                .iter()
                .map(|row| row.iter().flat_map(|z| [z.re.to_exact_string(), z.im.to_exact_string()]).collect())
                .collect(),
            precision: T::precision_tag().to_string(),
            deflated: self.deflated.clone(),
        }
    }

    /// Rebuild from a file; T and lambdas are recomputed for consistency.
    pub fn from_file(file: &BasisFile, spec: &EmitterSpec) -> Result<Self> {
        let fresh = Self::build(spec, &file.base)?;
        let d = file.base.len();
        let parse = |s: &String| T::parse_exact(s).ok_or_else(|| Error::Malformed(format!("bad number {s:?}")));
        let mut v = zeros::<T>(d, fresh.len());
        if file.v_exact.len() != d || file.v_exact.iter().any(|row| row.len() != 2 * fresh.len()) {
            return Err(Error::DimensionMismatch("basis file does not match its mode family".into()));
        }
        for i in 0..d {
            for k in 0..fresh.len() {
                v[i][k] = Complex::new(parse(&file.v_exact[i][2 * k])?, parse(&file.v_exact[i][2 * k + 1])?);
            }
        }
        Ok(OrthoBasis { v, ..fresh })
    }
}
