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

//! Few-mode description of the emitted state in an orthonormal basis.
//!
//! Occupations and ratios come straight from the basis eigenvalues. The
//! number variance is assembled from cached four-point functions of the
//! base modes. Projection onto `d` modes evaluates
//! `⟨0| c_1^{j_1} .. c_d^{j_d} |φ⟩` for every occupation tuple at once: with
//! `w_a(s) = Σ_i V[a][i] s_i`, the generating polynomial
//! `P(s) = Σ_k W(k) Π_a w_a^{k_a} / k_a!` satisfies
//! `⟨0| Π c_i^{j_i} |φ⟩ = Π j_i! · [s^j] P`, and P obeys the same recurrence
//! as the overlaps `W(k)` with every step multiplied by `w_a(s)`. When the
//! base rates are integer multiples of a common rate at a common frequency,
//! the recurrence depends on `k` only through `(|k|, Σ_a c_a k_a)`, and the
//! states collapse accordingly.

use std::collections::{BTreeMap, HashMap};

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::basis::OrthoBasis;
use crate::correlator::CorrelatorCache;
use crate::emitter::EmitterSpec;
use crate::error::{Error, Result};
use crate::modes::{commutator_in, ExpMode};
use crate::numeric::{compositions, lift, lower, scale, Real};

/// Default photon-number cap for projection.
pub const PROJECT_MAX_PHOTONS: usize = 12;
/// Polynomial coefficients above this count trigger a warning.
pub const PROJECT_BUDGET: usize = 1 << 24;

/// Photon numbers `⟨c_k† c_k⟩` of the first d modes.
pub fn mode_occupations<T: Real>(basis: &OrthoBasis<T>, d: usize) -> Result<Vec<f64>> {
    check_d(basis, d)?;
    Ok(basis.lambdas_f64()[..d].to_vec())
}

/// Fraction of the N photons held by the first d modes.
pub fn ratio_c<T: Real>(spec: &EmitterSpec, basis: &OrthoBasis<T>, d: usize) -> Result<f64> {
    Ok(mode_occupations(basis, d)?.iter().sum::<f64>() / spec.photons() as f64)
}

fn check_d<T: Real>(basis: &OrthoBasis<T>, d: usize) -> Result<()> {
    if d == 0 || d > basis.len() {
        return Err(Error::InvalidArgument(format!("d = {d} must lie in 1..={}", basis.len())));
    }
    Ok(())
}

/// Standard deviation of `n_d = Σ_{i<d} c_i† c_i`.
///
/// Uses `⟨c_i† c_j† c_j c_i⟩ = ⟨c_i c_j c_j† c_i†⟩ - 1 - δ_ij - n_i - n_j - 2δ_ij n_i`
/// for orthonormal modes with diagonal one-body density, and
/// `⟨n_d²⟩ = Σ_{ij} ⟨c_i† c_j† c_j c_i⟩ + ⟨n_d⟩`.
pub fn variance_sigma<T: Real>(basis: &OrthoBasis<T>, d: usize, cache: &CorrelatorCache<T>) -> Result<f64> {
    check_d(basis, d)?;
    if cache.base() != basis.base.as_slice() {
        return Err(Error::CacheMismatch {
            expected: "cache over the basis mode family".into(),
            found: "cache over a different family".into(),
        });
    }
    if cache.max_order() < 2 {
        return Err(Error::MissingCacheEntry(vec![0, 0, 0, 0]));
    }
    let dd = basis.base.len();
    let mut f = vec![Complex::new(T::zero(), T::zero()); dd * dd * dd * dd];
    for a in 0..dd {
        for b in 0..dd {
            for c in 0..dd {
                for e in 0..dd {
                    f[((a * dd + b) * dd + c) * dd + e] = cache.get2(a, b, c, e)?;
                }
            }
        }
    }
    let v = &basis.v;
    let n: Vec<T> = basis.lambdas[..d].to_vec();
    let one = T::one();
    let mut second = T::zero();
    for i in 0..d {
        for j in 0..d {
            let four = antinormal_four(v, &f, dd, i, j);
            let mut val = four.re - one.clone() - n[i].clone() - n[j].clone();
            if i == j {
                val = val - one.clone() - T::from_f64(2.0) * n[i].clone();
            }
            second = second + val;
        }
    }
    let mean = n.iter().fold(T::zero(), |acc, x| acc + x.clone());
    let var = second + mean.clone() - mean.clone() * mean;
    let var = var.to_f64();
    if !var.is_finite() {
        return Err(Error::NonFinite("number variance"));
    }
    Ok(var.max(0.0).sqrt())
}

/// `⟨c_i c_j c_j† c_i†⟩` from base-mode four-point functions.
fn antinormal_four<T: Real>(v: &[Vec<Complex<T>>], f: &[Complex<T>], dd: usize, i: usize, j: usize) -> Complex<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut p = vec![zero.clone(); dd * dd];
    for c in 0..dd {
        for e in 0..dd {
            p[c * dd + e] = v[c][j].conj() * v[e][i].conj();
        }
    }
    let mut total = zero.clone();
    for a in 0..dd {
        for b in 0..dd {
            let mut inner = zero.clone();
            let row = &f[(a * dd + b) * dd * dd..(a * dd + b + 1) * dd * dd];
            for (x, y) in row.iter().zip(&p) {
                inner = inner + x.clone() * y.clone();
            }
            total = total + v[a][i].clone() * v[b][j].clone() * inner;
        }
    }
    total
}

/// Amplitudes of a state truncated to d orthonormal modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationAmplitudes {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Squared norm of the truncated state.
    pub norm: f64,
    pub entries: Vec<AmplitudeEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub occ: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

impl OccupationAmplitudes {
    /// Build from `(tuple, amplitude)` pairs; tuples must share length and sum.
    pub fn new(d: usize, n: usize, amps: Vec<(Vec<usize>, Complex64)>) -> Result<Self> {
        for (occ, _) in &amps {
            if occ.len() != d || occ.iter().sum::<usize>() != n {
                return Err(Error::DimensionMismatch(format!("tuple {occ:?} is not a {d}-mode state of {n} photons")));
            }
        }
        let norm = amps.iter().map(|(_, a)| a.norm_sqr()).sum();
        Ok(OccupationAmplitudes {
            d,
            n,
            norm,
            entries: amps.into_iter().map(|(occ, a)| AmplitudeEntry { occ, re: a.re, im: a.im }).collect(),
        })
    }

    pub fn amplitude(&self, occ: &[usize]) -> Complex64 {
        self.entries
            .iter()
            .find(|e| e.occ == occ)
            .map_or(Complex64::new(0.0, 0.0), |e| Complex64::new(e.re, e.im))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], Complex64)> {
        self.entries.iter().map(|e| (e.occ.as_slice(), Complex64::new(e.re, e.im)))
    }

    /// Copy rescaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        if !(self.norm > 0.0) {
            return Err(Error::InvalidArgument("cannot normalize a zero state".into()));
        }
        let s = 1.0 / self.norm.sqrt();
        let amps = self.iter().map(|(o, a)| (o.to_vec(), a * s)).collect();
        OccupationAmplitudes::new(self.d, self.n, amps)
    }

    /// `⟨c_i† c_i⟩` of the truncated state.
    pub fn occupations(&self) -> Vec<f64> {
        let mut occ = vec![0.0; self.d];
        for (t, a) in self.iter() {
            for (o, &k) in occ.iter_mut().zip(t) {
                *o += a.norm_sqr() * k as f64;
            }
        }
        occ
    }
}

/// Rate bookkeeping for the collapsed recurrence.
enum RateKeys {
    /// Rates `c_a * unit` at a common frequency.
    Ladder { multiples: Vec<usize>, unit: f64, omega: f64 },
    General,
}

fn classify_rates(base: &[ExpMode]) -> RateKeys {
    let omega = base[0].omega;
    let unit = base.iter().map(|m| m.gamma).fold(f64::INFINITY, f64::min);
    let mut multiples = Vec::with_capacity(base.len());
    for m in base {
        let r = m.gamma / unit;
        let c = r.round();
        if m.omega != omega || (r - c).abs() > 1e-12 * r || c < 1.0 {
            return RateKeys::General;
        }
        multiples.push(c as usize);
    }
    // Exact integer multiples only; otherwise keys would merge distinct rates.
    if base.iter().zip(&multiples).any(|(m, &c)| m.gamma != unit * c as f64) {
        return RateKeys::General;
    }
    RateKeys::Ladder { multiples, unit, omega }
}

/// Homogeneous polynomials in d variables, by degree.
struct MonomialTables {
    /// `shift[m][idx][i]`: index in degree m+1 of monomial idx times s_i.
    shift: Vec<Vec<Vec<usize>>>,
    tuples: Vec<Vec<Vec<usize>>>,
}

impl MonomialTables {
    fn new(n: usize, d: usize) -> Self {
        let tuples: Vec<Vec<Vec<usize>>> = (0..=n).map(|m| compositions(m, d)).collect();
        let rank: Vec<HashMap<Vec<usize>, usize>> = tuples
            .iter()
            .map(|ts| ts.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect())
            .collect();
        let shift = (0..n)
            .map(|m| {
                tuples[m]
                    .iter()
                    .map(|t| {
                        (0..d)
                            .map(|i| {
                                let mut u = t.clone();
                                u[i] += 1;
                                rank[m + 1][&u]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        MonomialTables { shift, tuples }
    }
}

/// Project the state onto the first d basis modes.
pub fn project<T: Real>(spec: &EmitterSpec, basis: &OrthoBasis<T>, d: usize) -> Result<OccupationAmplitudes> {
    project_with_cap(spec, basis, d, PROJECT_MAX_PHOTONS)
}

pub fn project_with_cap<T: Real>(
    spec: &EmitterSpec,
    basis: &OrthoBasis<T>,
    d: usize,
    max_photons: usize,
) -> Result<OccupationAmplitudes> {
    project_impl(spec, basis, d, max_photons, true)
}

fn project_impl<T: Real>(
    spec: &EmitterSpec,
    basis: &OrthoBasis<T>,
    d: usize,
    max_photons: usize,
    collapse: bool,
) -> Result<OccupationAmplitudes> {
    check_d(basis, d)?;
    let n = spec.photons();
    if n > max_photons {
        return Err(Error::BudgetExceeded { dim: n, budget: max_photons });
    }
    let base = &basis.base;
    let dd = base.len();
    if dd == 0 || basis.v.len() != dd {
        return Err(Error::DimensionMismatch("basis has no mode family attached".into()));
    }
    let tables = MonomialTables::new(n, d);
    let zero = Complex::new(T::zero(), T::zero());
    let sqrt_g: Vec<T> = spec.gamma().iter().map(|&g| T::from_f64(g).sqrt()).collect();
    let sqrt_x: Vec<T> = base.iter().map(|m| T::from_f64(m.gamma).sqrt()).collect();
    let kappa: Vec<Complex<T>> = base.iter().map(|m| lift(m.kappa_bra())).collect();
    let keys = if collapse { classify_rates(base) } else { RateKeys::General };

    // Key -> polynomial of the current degree.
    let mut level: BTreeMap<Vec<usize>, Vec<Complex<T>>> = BTreeMap::new();
    let start_key = match &keys {
        RateKeys::Ladder { .. } => vec![0],
        RateKeys::General => vec![0; dd],
    };
    level.insert(start_key, vec![Complex::new(T::one(), T::zero())]);
    for m in 1..=n {
        let width = tables.tuples[m].len();
        if width * level.len() > PROJECT_BUDGET {
            log::warn!("projection holds {} coefficients at degree {m} (budget {PROJECT_BUDGET})", width * level.len());
        }
        let mut next: BTreeMap<Vec<usize>, Vec<Complex<T>>> = BTreeMap::new();
        for (key, poly) in &level {
            for a in 0..dd {
                let new_key = match &keys {
                    RateKeys::Ladder { multiples, .. } => vec![key[0] + multiples[a]],
                    RateKeys::General => {
                        let mut k = key.clone();
                        k[a] += 1;
                        k
                    }
                };
                let wt = sqrt_x[a].clone() * sqrt_g[m].clone();
                let target = next.entry(new_key).or_insert_with(|| vec![zero.clone(); width]);
                for i in 0..d {
                    let coef = scale(&basis.v[a][i], &wt);
                    for (idx, c) in poly.iter().enumerate() {
                        let dst = tables.shift[m - 1][idx][i];
                        target[dst] = target[dst].clone() + coef.clone() * c.clone();
                    }
                }
            }
        }
        for (key, poly) in next.iter_mut() {
            let lambda = match &keys {
                RateKeys::Ladder { unit, omega, .. } => {
                    lift::<T>(spec.z(m))
                        + Complex::new(
                            T::from_f64(0.5) * T::from_f64(*unit) * T::from_usize(key[0]),
                            -(T::from_f64(*omega) * T::from_usize(m)),
                        )
                }
                RateKeys::General => key
                    .iter()
                    .zip(&kappa)
                    .fold(lift::<T>(spec.z(m)), |acc, (&k, kap)| acc + scale(kap, &T::from_usize(k))),
            };
            let inv = Complex::new(T::one(), T::zero()) / lambda;
            for c in poly.iter_mut() {
                *c = c.clone() * inv.clone();
            }
        }
        level = next;
    }
    let width = tables.tuples[n].len();
    let mut total = vec![zero.clone(); width];
    for poly in level.values() {
        for (t, c) in total.iter_mut().zip(poly) {
            *t = t.clone() + c.clone();
        }
    }
    let mut amps = Vec::with_capacity(width);
    let mut norm = T::zero();
    for (tuple, coef) in tables.tuples[n].iter().zip(total) {
        let fact = tuple.iter().fold(T::one(), |acc, &j| acc * factorial_t::<T>(j));
        let alpha = scale(&coef, &fact.sqrt());
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::NonFinite("effective-state projection"));
        }
        norm = norm + alpha.norm_sqr();
        amps.push((tuple.clone(), lower(&alpha)));
    }
    let mut out = OccupationAmplitudes::new(d, n, amps)?;
    out.norm = norm.to_f64();
    Ok(out)
}

fn factorial_t<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_usize(k))
}

/// `⟨c_i c_j c_k† c_l†⟩` assembled from base four-point functions; used by
/// the consistency tests and the CLI diagnostics.
pub fn four_point<T: Real>(basis: &OrthoBasis<T>, cache: &CorrelatorCache<T>, idx: [usize; 4]) -> Result<Complex<T>> {
    let dd = basis.base.len();
    let v = &basis.v;
    let mut total = Complex::new(T::zero(), T::zero());
    for a in 0..dd {
        for b in 0..dd {
            for c in 0..dd {
                for e in 0..dd {
                    let w = v[a][idx[0]].clone() * v[b][idx[1]].clone() * v[c][idx[2]].conj() * v[e][idx[3]].conj();
                    total = total + w * cache.get2(a, b, c, e)?;
                }
            }
        }
    }
    Ok(total)
}

/// `[c_i, c_j†]` recomputed from the Gram matrix.
pub fn mode_commutator<T: Real>(basis: &OrthoBasis<T>, i: usize, j: usize) -> Complex<T> {
    let dd = basis.base.len();
    let mut total = Complex::new(T::zero(), T::zero());
    for a in 0..dd {
        for b in 0..dd {
            total = total
                + basis.v[a][i].clone() * basis.v[b][j].conj() * commutator_in::<T>(&basis.base[a], &basis.base[b]);
        }
    }
    total
}
