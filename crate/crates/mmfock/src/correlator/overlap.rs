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

//! Vacuum overlaps `⟨0| b_1^{k_1} .. b_D^{k_D} |φ⟩`.
//!
//! States are the remaining occupations `k' <= k`. With `m = |k'|`,
//!
//! ```text
//! (z_m + Σ_j k'_j (x_j/2 - i y_j)) W(k') = Σ_j k'_j sqrt(x_j γ_m) W(k' - e_j)
//! ```
//!
//! and `W(0) = 1`. The state space is the box `Π (k_j + 1)`.

use num_complex::Complex;

use crate::emitter::EmitterSpec;
use crate::error::{Error, Result};
use crate::modes::ExpMode;
use crate::numeric::{lift, scale, Real};

/// Box states above this count trigger a warning.
pub const OVERLAP_BUDGET: usize = 1 << 22;

/// Number of recurrence states for an occupation tuple.
pub fn overlap_dimension(k: &[usize]) -> usize {
    k.iter().map(|&kj| kj + 1).product()
}

pub fn overlap_amplitude<T: Real>(spec: &EmitterSpec, base: &[ExpMode], k: &[usize]) -> Result<Complex<T>> {
    if base.len() != k.len() {
        return Err(Error::DimensionMismatch(format!("{} modes but {} occupations", base.len(), k.len())));
    }
    let zero = Complex::new(T::zero(), T::zero());
    if k.iter().sum::<usize>() != spec.photons() {
        return Ok(zero);
    }
    let dim = overlap_dimension(k);
    if dim > OVERLAP_BUDGET {
        log::warn!("overlap state space has {dim} states (budget {OVERLAP_BUDGET})");
    }
    let d = k.len();
    let mut stride = vec![1usize; d];
    for j in 1..d {
        stride[j] = stride[j - 1] * (k[j - 1] + 1);
    }
    let kappa: Vec<Complex<T>> = base.iter().map(|m| lift(m.kappa_bra())).collect();
    let sqrt_x: Vec<T> = base.iter().map(|m| T::from_f64(m.gamma).sqrt()).collect();
    let sqrt_g: Vec<T> = spec.gamma().iter().map(|&g| T::from_f64(g).sqrt()).collect();
    let one = Complex::new(T::one(), T::zero());

    let mut w = vec![zero.clone(); dim];
    w[0] = one.clone();
    let mut cur = vec![0usize; d];
    for idx in 1..dim {
        // Advance the mixed-radix counter.
        let mut j = 0;
        loop {
            cur[j] += 1;
            if cur[j] <= k[j] {
                break;
            }
            cur[j] = 0;
            j += 1;
        }
        let m: usize = cur.iter().sum();
        let mut lambda = lift::<T>(spec.z(m));
        let mut acc = zero.clone();
        for j in 0..d {
            if cur[j] == 0 {
                continue;
            }
            let kj = T::from_usize(cur[j]);
            lambda = lambda + scale(&kappa[j], &kj);
            let wt = kj * sqrt_x[j].clone() * sqrt_g[m].clone();
            acc = acc + scale(&w[idx - stride[j]], &wt);
        }
        w[idx] = acc / lambda;
    }
    let out = w[dim - 1].clone();
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(Error::NonFinite("overlap recurrence"));
    }
    Ok(out)
}
