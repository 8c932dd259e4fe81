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

//! Correlators of exponential modes in the emitted N-photon state.
//!
//! `correlator` returns `⟨φ| b_{l_1}..b_{l_n} b†_{r_1}..b†_{r_n} |φ⟩`. It is
//! assembled by normal ordering: every partial pairing of left and right
//! modes contributes the product of the paired commutators times the
//! normal-ordered correlator of the unpaired modes, which comes from the
//! recurrence chain in [`chain`].

mod cache;
mod chain;
mod overlap;

use std::collections::HashMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use cache::{CacheEntry, CacheFile, CorrelatorCache};
pub use chain::{chain_dimension, SparseChain, MAX_ORDER};
pub use overlap::{overlap_amplitude, overlap_dimension, OVERLAP_BUDGET};

use crate::emitter::EmitterSpec;
use crate::error::{Error, Result};
use crate::modes::{commutator_in, ExpMode};
use crate::numeric::Real;
use chain::ChainSetup;

/// A correlator request: annihilated modes on the left, created on the right.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelatorRequest {
    pub spec: EmitterSpec,
    pub left: Vec<ExpMode>,
    pub right: Vec<ExpMode>,
}

impl CorrelatorRequest {
    pub fn new(spec: EmitterSpec, left: Vec<ExpMode>, right: Vec<ExpMode>) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::UnbalancedRequest { left: left.len(), right: right.len() });
        }
        if left.is_empty() {
            return Err(Error::InvalidArgument("correlator needs at least one mode pair".into()));
        }
        if left.len() > spec.photons() {
            return Err(Error::OrderExceedsPhotons { order: left.len(), photons: spec.photons() });
        }
        Ok(CorrelatorRequest { spec, left, right })
    }

    pub fn order(&self) -> usize {
        self.left.len()
    }

    pub fn chain_i<T: Real>(&self) -> Result<Complex<T>> {
        chain_i(&self.spec, &self.left, &self.right)
    }

    pub fn correlator<T: Real>(&self) -> Result<Complex<T>> {
        correlator(&self.spec, &self.left, &self.right)
    }
}

/// `⟨φ|φ⟩`, evaluated with the order-zero chain.
pub fn norm<T: Real>(spec: &EmitterSpec) -> Result<T> {
    Ok(normal_ordered::<T>(spec, &[], &[])?.re)
}

/// Normal-ordered correlator `⟨φ| b†_{right}.. b_{left}.. |φ⟩`.
///
/// Zero when the order exceeds the photon number.
pub fn normal_ordered<T: Real>(spec: &EmitterSpec, left: &[ExpMode], right: &[ExpMode]) -> Result<Complex<T>> {
    if left.len() == right.len() && left.len() > spec.photons() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    ChainSetup::<T>::new(spec, left, right)?.sweep()
}

/// The chain integral `I_q = (N-q)!/N! · G_q`, without forming factorials.
pub fn chain_i<T: Real>(spec: &EmitterSpec, left: &[ExpMode], right: &[ExpMode]) -> Result<Complex<T>> {
    let q = left.len();
    let n = spec.photons();
    if q > n {
        return Err(Error::OrderExceedsPhotons { order: q, photons: n });
    }
    let g = ChainSetup::<T>::new(spec, left, right)?.sweep()?;
    let mut s = T::one();
    for j in 0..q {
        s = s / T::from_usize(n - j);
    }
    Ok(Complex::new(g.re * s.clone(), g.im * s))
}

/// `⟨φ| b_{left}.. b†_{right}.. |φ⟩` via the partial-pairing expansion.
pub fn correlator<T: Real>(spec: &EmitterSpec, left: &[ExpMode], right: &[ExpMode]) -> Result<Complex<T>> {
    if left.len() != right.len() {
        return Err(Error::UnbalancedRequest { left: left.len(), right: right.len() });
    }
    let n = left.len();
    if n > spec.photons() {
        return Err(Error::OrderExceedsPhotons { order: n, photons: spec.photons() });
    }
    assemble(spec, left, right)
}

/// Partial-pairing assembly; orders above N keep only fully paired terms.
pub(crate) fn assemble<T: Real>(spec: &EmitterSpec, left: &[ExpMode], right: &[ExpMode]) -> Result<Complex<T>> {
    let n = left.len();
    if n > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("order {n} above supported maximum {MAX_ORDER}")));
    }
    let comm: Vec<Vec<Complex<T>>> =
        left.iter().map(|l| right.iter().map(|r| commutator_in::<T>(l, r)).collect()).collect();
    let mut memo: HashMap<(usize, usize), Complex<T>> = HashMap::new();
    let mut total = Complex::new(T::zero(), T::zero());
    let full = (1usize << n) - 1;
    let mut stack = vec![(0usize, 0usize, 0usize, Complex::new(T::one(), T::zero()))];
    // Depth-first over left indices: (next left, paired-left mask, paired-right mask, weight).
    while let Some((i, lp, rp, w)) = stack.pop() {
        if i == n {
            let key = (full & !lp, full & !rp);
            let g = match memo.get(&key) {
                Some(g) => g.clone(),
                None => {
                    let sub_l: Vec<ExpMode> = (0..n).filter(|j| key.0 >> j & 1 == 1).map(|j| left[j]).collect();
                    let sub_r: Vec<ExpMode> = (0..n).filter(|j| key.1 >> j & 1 == 1).map(|j| right[j]).collect();
                    let g = normal_ordered::<T>(spec, &sub_l, &sub_r)?;
                    memo.insert(key, g.clone());
                    g
                }
            };
            total = total + w * g;
            continue;
        }
        stack.push((i + 1, lp, rp, w.clone()));
        for j in 0..n {
            if rp >> j & 1 == 0 {
                stack.push((i + 1, lp | 1 << i, rp | 1 << j, w.clone() * comm[i][j].clone()));
            }
        }
    }
    Ok(total)
}

/// Mean photon number `⟨φ| b† b |φ⟩` of a mode.
pub fn photon_number<T: Real>(spec: &EmitterSpec, mode: &ExpMode) -> Result<T> {
    Ok(normal_ordered::<T>(spec, std::slice::from_ref(mode), std::slice::from_ref(mode))?.re)
}

#[cfg(test)]
mod tests;
