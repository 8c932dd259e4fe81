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

//! Recurrence chain for normal-ordered correlators.
//!
//! The quantity computed is `G = ⟨φ| b†_{r_1}..b†_{r_q} b_{l_1}..b_{l_q} |φ⟩`.
//! Reading the emission history backwards from the last photon, every step
//! is one of: a photon shared by bra and ket, a photon absorbed by a pending
//! left mode, or a photon absorbed by a pending right mode. A state records
//! the number `r` of shared photons still to come and the pending sets
//! `S`, `T` of left and right modes, giving `4^q (N - q + 1)` states.
//!
//! With `k = r + |S|` and `k' = r + |T|` the current ket and bra levels,
//!
//! ```text
//! Λ(r,S,T) W(r,S,T) = sqrt(γ_k γ_k') W(r-1,S,T)
//!                   + Σ_{j∈S} sqrt(γ_k x_j) W(r,S-j,T)
//!                   + Σ_{j∈T} sqrt(γ_k' x̃_j) W(r,S,T-j)
//! Λ = z_k + conj(z_k') + Σ_{j∈S} (x_j/2 - i y_j) + Σ_{j∈T} (x̃_j/2 + i ỹ_j)
//! ```
//!
//! with `W(0,∅,∅) = 1` and `G = W(N-q, all, all)`. The factorials of the
//! textbook form never appear, so intermediate values stay of order `N^q`.
//! The sweep runs one `r`-layer at a time; each layer is a sparse
//! triangular block acting on the previous layer's vector.

use num_complex::Complex;

use crate::emitter::EmitterSpec;
use crate::error::{Error, Result};
use crate::modes::ExpMode;
use crate::numeric::{lift, scale, Real};

/// Largest supported correlator order.
pub const MAX_ORDER: usize = 12;

/// Precomputed per-request quantities shared by the sweep and the explicit
/// sparse form.
pub(crate) struct ChainSetup<T: Real> {
    pub q: usize,
    pub layers: usize,
    z: Vec<Complex<T>>,
    sqrt_gamma: Vec<T>,
    sqrt_x_left: Vec<T>,
    sqrt_x_right: Vec<T>,
    rate_left: Vec<Complex<T>>,
    rate_right: Vec<Complex<T>>,
}

impl<T: Real> ChainSetup<T> {
    pub fn new(spec: &EmitterSpec, left: &[ExpMode], right: &[ExpMode]) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::UnbalancedRequest { left: left.len(), right: right.len() });
        }
        let q = left.len();
        let n = spec.photons();
        if q > n {
            return Err(Error::OrderExceedsPhotons { order: q, photons: n });
        }
        if q > MAX_ORDER {
            return Err(Error::InvalidArgument(format!("order {q} above supported maximum {MAX_ORDER}")));
        }
        let z = (0..=n).map(|m| lift::<T>(spec.z(m))).collect();
        let sqrt_gamma = spec.gamma().iter().map(|&g| T::from_f64(g).sqrt()).collect();
        let sx = |m: &ExpMode| T::from_f64(m.gamma).sqrt();
        // Per-mask sums of pending-mode decay constants.
        let masks = 1usize << q;
        let mut rate_left = vec![Complex::new(T::zero(), T::zero()); masks];
        let mut rate_right = rate_left.clone();
        for mask in 1..masks {
            let j = mask.trailing_zeros() as usize;
            let prev = mask & (mask - 1);
            rate_left[mask] = rate_left[prev].clone() + lift::<T>(left[j].kappa_bra());
            rate_right[mask] = rate_right[prev].clone() + lift::<T>(right[j].kappa_bra().conj());
        }
        Ok(ChainSetup {
            q,
            layers: n - q + 1,
            z,
            sqrt_gamma,
            sqrt_x_left: left.iter().map(sx).collect(),
            sqrt_x_right: right.iter().map(sx).collect(),
            rate_left,
            rate_right,
        })
    }

    pub fn dim(&self) -> usize {
        self.layers << (2 * self.q)
    }

    pub fn index(&self, r: usize, s: usize, t: usize) -> usize {
        ((r << self.q) | s) << self.q | t
    }

    fn lambda(&self, r: usize, s: usize, t: usize) -> Complex<T> {
        let k = r + s.count_ones() as usize;
        let kb = r + t.count_ones() as usize;
        self.z[k].clone() + self.z[kb].conj() + self.rate_left[s].clone() + self.rate_right[t].clone()
    }

    /// Outgoing transitions of a nonterminal state as (r, S, T, weight).
    pub fn successors(&self, r: usize, s: usize, t: usize) -> Vec<(usize, usize, usize, T)> {
        let k = r + s.count_ones() as usize;
        let kb = r + t.count_ones() as usize;
        let mut out = Vec::with_capacity(1 + 2 * self.q);
        if r > 0 {
            out.push((r - 1, s, t, self.sqrt_gamma[k].clone() * self.sqrt_gamma[kb].clone()));
        }
        for j in 0..self.q {
            if s >> j & 1 == 1 {
                out.push((r, s & !(1 << j), t, self.sqrt_gamma[k].clone() * self.sqrt_x_left[j].clone()));
            }
        }
        for j in 0..self.q {
            if t >> j & 1 == 1 {
                out.push((r, s, t & !(1 << j), self.sqrt_gamma[kb].clone() * self.sqrt_x_right[j].clone()));
            }
        }
        out
    }

    /// `1 / Λ` for a nonterminal state.
    pub fn inv_lambda(&self, r: usize, s: usize, t: usize) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        one / self.lambda(r, s, t)
    }

    /// Layer-by-layer sweep. Returns G.
    pub fn sweep(&self) -> Result<Complex<T>> {
        let q = self.q;
        let width = 1usize << (2 * q);
        let full = (1usize << q) - 1;
        let zero = Complex::new(T::zero(), T::zero());
        let mut prev: Vec<Complex<T>> = Vec::new();
        let mut cur = vec![zero.clone(); width];
        for r in 0..self.layers {
            for s in 0..=full {
                for t in 0..=full {
                    let idx = (s << q) | t;
                    if r == 0 && s == 0 && t == 0 {
                        cur[idx] = Complex::new(T::one(), T::zero());
                        continue;
                    }
                    let mut acc = zero.clone();
                    for (r2, s2, t2, w) in self.successors(r, s, t) {
                        let v = if r2 == r { &cur[(s2 << q) | t2] } else { &prev[(s2 << q) | t2] };
                        acc = acc + scale(v, &w);
                    }
                    cur[idx] = acc * self.inv_lambda(r, s, t);
                }
            }
            if cur.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(Error::NonFinite("correlator chain"));
            }
            prev = std::mem::replace(&mut cur, vec![zero.clone(); width]);
        }
        Ok(prev[(full << q) | full].clone())
    }
}

/// Explicit sparse operator of the chain on the full state space.
///
/// `W = M W + e_0`, where `e_0` marks the terminal state. Since every
/// transition lowers the remaining-event count, `M` is nilpotent and the
/// fixed point is reached after `N + q` applications from `e_0`.
pub struct SparseChain<T: Real> {
    pub dim: usize,
    pub terminal: usize,
    pub target: usize,
    /// Row-wise entries `(row, col, value)` of `M`.
    pub entries: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> SparseChain<T> {
    pub fn build(spec: &EmitterSpec, left: &[ExpMode], right: &[ExpMode]) -> Result<Self> {
        let setup = ChainSetup::<T>::new(spec, left, right)?;
        let full = (1usize << setup.q) - 1;
        let mut entries = Vec::new();
        for r in 0..setup.layers {
            for s in 0..=full {
                for t in 0..=full {
                    if r == 0 && s == 0 && t == 0 {
                        continue;
                    }
                    let inv = setup.inv_lambda(r, s, t);
                    let row = setup.index(r, s, t);
                    for (r2, s2, t2, w) in setup.successors(r, s, t) {
                        entries.push((row, setup.index(r2, s2, t2), scale(&inv, &w)));
                    }
                }
            }
        }
        Ok(SparseChain {
            dim: setup.dim(),
            terminal: 0,
            target: setup.index(setup.layers - 1, full, full),
            entries,
        })
    }

    /// One application `v -> M v + e_0`.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim];
        out[self.terminal] = Complex::new(T::one(), T::zero());
        for (row, col, val) in &self.entries {
            out[*row] = out[*row].clone() + val.clone() * v[*col].clone();
        }
        out
    }
}

/// State-space dimension `4^q (N - q + 1)` of the chain for order q.
pub fn chain_dimension(photons: usize, order: usize) -> Option<usize> {
    if order > photons {
        return None;
    }
    Some((photons - order + 1) << (2 * order))
}
