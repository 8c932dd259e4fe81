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

//! Brute-force reference evaluation for small photon numbers.
//!
//! The emitted state is `|φ⟩ = (1/N!) ∫ A(t) a†(t_1)..a†(t_N) |0⟩` with the
//! time-ordered amplitude
//!
//! ```text
//! A = Π_j sqrt(γ_j) exp{[i(ω_{j-1} - ω_j) + (γ_{j-1} - γ_j)/2] t_(j)}
//! ```
//!
//! where `t_(1)` is the latest time. Correlators are expanded over every
//! permutation pairing bra and ket creation operators, and each resulting
//! integral is split over all total orderings of its time variables. On an
//! ordered simplex the integrand is a single exponential and
//! `∫_{τ1>..>τM>0} exp(Σ a_k τ_k) = Π_k 1 / (-(a_1 + .. + a_k))`.
//!
//! Nothing here shares code with the recurrence engine.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::emitter::EmitterSpec;
use crate::error::{Error, Result};
use crate::modes::{commutator, ExpMode};

/// Largest photon number accepted by the correlator and overlap oracles.
pub const ORACLE_MAX_N: usize = 4;
/// Largest photon number accepted by [`amplitude_direct`].
pub const AMPLITUDE_MAX_N: usize = 8;

fn level_exponent(spec: &EmitterSpec, j: usize) -> Complex64 {
    let (g, w) = (spec.gamma(), spec.omega());
    Complex64::new(0.5 * (g[j - 1] - g[j]), w[j - 1] - w[j])
}

/// Time-ordered emission amplitude at arbitrary (unsorted) times.
pub fn amplitude_direct(spec: &EmitterSpec, times: &[f64]) -> Result<Complex64> {
    let n = spec.photons();
    if n > AMPLITUDE_MAX_N {
        return Err(Error::OracleLimit { limit: AMPLITUDE_MAX_N, got: n });
    }
    if times.len() != n {
        return Err(Error::DimensionMismatch(format!("{} times for {} photons", times.len(), n)));
    }
    if times.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::InvalidArgument("times must be nonnegative".into()));
    }
    let mut sorted = times.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, &t) in sorted.iter().enumerate() {
        acc *= spec.gamma()[j + 1].sqrt() * (level_exponent(spec, j + 1) * t).exp();
    }
    Ok(acc)
}

/// Visit every permutation of `0..n` in lexicographic order.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { return };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Value of the ordered-simplex integral for exponents listed latest first.
fn simplex_integral(exps: &[Complex64]) -> Complex64 {
    let mut partial = Complex64::new(0.0, 0.0);
    let mut acc = Complex64::new(1.0, 0.0);
    for a in exps {
        partial += a;
        acc /= -partial;
    }
    acc
}

#[derive(Clone, Copy, PartialEq)]
enum Var {
    /// Shared by bra and ket amplitudes.
    Shared,
    /// In the ket amplitude, carrying `conj(B_l)` of left mode i.
    Left(usize),
    /// In the bra amplitude, carrying `B_r` of right mode j.
    Right(usize),
}

/// `∫ conj(A(v, s)) A(u, s) Π conj(B_l(u)) Π B_r(v)` over all times.
fn contraction_integral(spec: &EmitterSpec, left: &[ExpMode], right: &[ExpMode]) -> Complex64 {
    let n = spec.photons();
    let q = left.len();
    let mut vars = vec![Var::Shared; n - q];
    vars.extend((0..q).map(Var::Left));
    vars.extend((0..q).map(Var::Right));
    let prefactor = spec.gamma()[1..].iter().product::<f64>()
        * left.iter().chain(right).map(|m| m.gamma.sqrt()).product::<f64>();
    let ket: Vec<Complex64> = (1..=n).map(|j| level_exponent(spec, j)).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut exps = vec![Complex64::new(0.0, 0.0); vars.len()];
    for_each_permutation(vars.len(), |order| {
        let (mut kk, mut bb) = (0, 0);
        for (pos, &v) in order.iter().enumerate() {
            exps[pos] = match vars[v] {
                Var::Shared => {
                    let e = ket[kk] + ket[bb].conj();
                    kk += 1;
                    bb += 1;
                    e
                }
                Var::Left(i) => {
                    let e = ket[kk] - left[i].kappa_bra();
                    kk += 1;
                    e
                }
                Var::Right(j) => {
                    let e = ket[bb].conj() - right[j].kappa_bra().conj();
                    bb += 1;
                    e
                }
            };
        }
        total += simplex_integral(&exps);
    });
    total * prefactor
}

fn check_request(spec: &EmitterSpec, left: &[ExpMode], right: &[ExpMode]) -> Result<()> {
    if spec.photons() > ORACLE_MAX_N {
        return Err(Error::OracleLimit { limit: ORACLE_MAX_N, got: spec.photons() });
    }
    if left.len() != right.len() {
        return Err(Error::UnbalancedRequest { left: left.len(), right: right.len() });
    }
    if left.len() > spec.photons() {
        return Err(Error::OrderExceedsPhotons { order: left.len(), photons: spec.photons() });
    }
    Ok(())
}

/// `⟨φ| b_{left}.. b†_{right}.. |φ⟩` by permutation expansion.
///
/// With empty mode lists this is `⟨φ|φ⟩`.
pub fn correlator_direct(spec: &EmitterSpec, left: &[ExpMode], right: &[ExpMode]) -> Result<Complex64> {
    check_request(spec, left, right)?;
    let n = spec.photons();
    let q = left.len();
    let m = n + q;
    // Slots 0..n are amplitude arguments, slot n + i belongs to mode i.
    // The bra assigns slot s to time t_s, the ket to time t_{π(s)}.
    let mut classes: HashMap<(Vec<Option<usize>>, usize, usize), u64> = HashMap::new();
    for_each_permutation(m, |pi| {
        let mut pairing = vec![None; q];
        let (mut lmask, mut rmask) = ((1usize << q) - 1, (1usize << q) - 1);
        for j in 0..q {
            let var = pi[n + j];
            if var >= n {
                pairing[var - n] = Some(j);
                lmask &= !(1 << (var - n));
                rmask &= !(1 << j);
            }
        }
        *classes.entry((pairing, lmask, rmask)).or_insert(0) += 1;
    });
    let mut integrals: HashMap<(usize, usize), Complex64> = HashMap::new();
    let mut keys: Vec<_> = classes.into_iter().collect();
    keys.sort_by(|a, b| (a.0 .1, a.0 .2, &a.0 .0).cmp(&(b.0 .1, b.0 .2, &b.0 .0)));
    let mut total = Complex64::new(0.0, 0.0);
    for ((pairing, lmask, rmask), count) in keys {
        let paired: Complex64 = pairing
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|j| commutator(&left[i], &right[j])))
            .product();
        let j = *integrals.entry((lmask, rmask)).or_insert_with(|| {
            let l: Vec<ExpMode> = (0..q).filter(|i| lmask >> i & 1 == 1).map(|i| left[i]).collect();
            let r: Vec<ExpMode> = (0..q).filter(|i| rmask >> i & 1 == 1).map(|i| right[i]).collect();
            contraction_integral(spec, &l, &r)
        });
        total += paired * j * count as f64;
    }
    let nf: f64 = (1..=n).map(|k| k as f64).product();
    Ok(total / (nf * nf))
}

/// `⟨φ| b†_{right}.. b_{left}.. |φ⟩` by direct integration.
pub fn normal_ordered_direct(spec: &EmitterSpec, left: &[ExpMode], right: &[ExpMode]) -> Result<Complex64> {
    check_request(spec, left, right)?;
    let rest: f64 = (1..=spec.photons() - left.len()).map(|k| k as f64).product();
    Ok(contraction_integral(spec, left, right) / rest)
}

/// `⟨φ|φ⟩` by direct integration.
pub fn norm_direct(spec: &EmitterSpec) -> Result<f64> {
    Ok(correlator_direct(spec, &[], &[])?.re)
}

/// `⟨0| Π b_j^{k_j} |φ⟩` by direct integration.
pub fn overlap_direct(spec: &EmitterSpec, base: &[ExpMode], k: &[usize]) -> Result<Complex64> {
    let n = spec.photons();
    if n > ORACLE_MAX_N {
        return Err(Error::OracleLimit { limit: ORACLE_MAX_N, got: n });
    }
    if base.len() != k.len() {
        return Err(Error::DimensionMismatch(format!("{} modes but {} occupations", base.len(), k.len())));
    }
    if k.iter().sum::<usize>() != n {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let slots: Vec<&ExpMode> = k.iter().zip(base).flat_map(|(&kj, m)| std::iter::repeat(m).take(kj)).collect();
    let prefactor = spec.gamma()[1..].iter().map(|g| g.sqrt()).product::<f64>()
        * slots.iter().map(|m| m.gamma.sqrt()).product::<f64>();
    let mut total = Complex64::new(0.0, 0.0);
    let mut exps = vec![Complex64::new(0.0, 0.0); n];
    for_each_permutation(n, |order| {
        for (pos, &v) in order.iter().enumerate() {
            exps[pos] = level_exponent(spec, pos + 1) - slots[v].kappa_bra();
        }
        total += simplex_integral(&exps);
    });
    Ok(total * prefactor)
}
