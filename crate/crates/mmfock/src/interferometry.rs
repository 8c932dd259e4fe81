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

//! Mach-Zehnder interferometer with d internal modes per arm.
//!
//! Each internal mode pair is rotated by
//! `a†(φ) = cos(φ/2) a† + sin(φ/2) b†`, `b†(φ) = -sin(φ/2) a† + cos(φ/2) b†`.
//! Derivatives use the generator `a† -> b†/2`, `b† -> -a†/2` applied to the
//! input before evolution. Detector loss thins every outcome binomially.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::effective::OccupationAmplitudes;
use crate::error::{Error, Result};
use crate::numeric::{binomial, factorial};

/// Outcomes below this probability use the second-order expansion.
pub const CFI_FLOOR: f64 = 1e-14;

/// Size guard for the occupation-basis simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Photons per arm.
    pub max_arm_photons: usize,
    /// Internal modes per arm.
    pub max_modes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_arm_photons: 12, max_modes: 3 }
    }
}

type Key = (Vec<usize>, Vec<usize>);

/// Amplitudes over `(α, β)` occupation tuples of the two arms.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoArmState {
    pub d: usize,
    pub amps: BTreeMap<Key, Complex64>,
}

impl TwoArmState {
    /// Product of two single-arm states.
    pub fn product(a: &OccupationAmplitudes, b: &OccupationAmplitudes) -> Result<Self> {
        Self::product_with(a, b, &Limits::default())
    }

    pub fn product_with(a: &OccupationAmplitudes, b: &OccupationAmplitudes, limits: &Limits) -> Result<Self> {
        if a.d != b.d {
            return Err(Error::DimensionMismatch(format!("arms carry {} and {} modes", a.d, b.d)));
        }
        if a.d > limits.max_modes || a.n.max(b.n) > limits.max_arm_photons {
            return Err(Error::BudgetExceeded {
                dim: a.n.max(b.n).max(a.d),
                budget: limits.max_arm_photons,
            });
        }
        let mut amps = BTreeMap::new();
        for (ta, xa) in a.iter() {
            for (tb, xb) in b.iter() {
                let z = xa * xb;
                if z != Complex64::new(0.0, 0.0) {
                    amps.insert((ta.to_vec(), tb.to_vec()), z);
                }
            }
        }
        Ok(TwoArmState { d: a.d, amps })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &TwoArmState) -> Complex64 {
        self.amps
            .iter()
            .filter_map(|(k, z)| other.amps.get(k).map(|w| z.conj() * w))
            .sum()
    }

    pub fn amplitude(&self, a: &[usize], b: &[usize]) -> Complex64 {
        self.amps.get(&(a.to_vec(), b.to_vec())).copied().unwrap_or_default()
    }

    /// Total photon numbers present, in ascending order.
    pub fn photon_totals(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.amps.keys().map(|(a, b)| a.iter().sum::<usize>() + b.iter().sum::<usize>()).collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    /// Apply a map acting on the occupation pair of internal mode k.
    fn map_mode(&self, k: usize, mut f: impl FnMut(usize, usize, &mut dyn FnMut(usize, usize, Complex64))) -> TwoArmState {
        let mut out: BTreeMap<Key, Complex64> = BTreeMap::new();
        for ((a, b), z) in &self.amps {
            let mut emit = |p: usize, q: usize, w: Complex64| {
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                a2[k] = p;
                b2[k] = q;
                *out.entry((a2, b2)).or_default() += z * w;
            };
            f(a[k], b[k], &mut emit);
        }
        out.retain(|_, z| *z != Complex64::new(0.0, 0.0));
        TwoArmState { d: self.d, amps: out }
    }

    fn add(&mut self, other: &TwoArmState) {
        for (k, z) in &other.amps {
            *self.amps.entry(k.clone()).or_default() += z;
        }
    }
}

/// Amplitudes `⟨p, M-p| U(φ) |α, β⟩` for one internal mode pair.
fn rotation_row(alpha: usize, beta: usize, phi: f64) -> Vec<f64> {
    let (s, c) = (0.5 * phi).sin_cos();
    let m = alpha + beta;
    let mut row = vec![0.0; m + 1];
    let norm = (factorial(alpha) * factorial(beta)).sqrt();
    for i in 0..=alpha {
        for j in 0..=beta {
            let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
            let term = binomial(alpha, i)
                * binomial(beta, j)
                * c.powi((i + beta - j) as i32)
                * s.powi((alpha - i + j) as i32)
                * sign;
            row[i + j] += term;
        }
    }
    for (p, r) in row.iter_mut().enumerate() {
        *r *= (factorial(p) * factorial(m - p)).sqrt() / norm;
    }
    row
}

fn rotate(state: &TwoArmState, phi: f64) -> TwoArmState {
    let mut cur = state.clone();
    let mut rows: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
    for k in 0..state.d {
        cur = cur.map_mode(k, |a, b, emit| {
            let row = rows.entry((a, b)).or_insert_with(|| rotation_row(a, b, phi));
            let m = a + b;
            for (p, &w) in row.iter().enumerate() {
                if w != 0.0 {
                    emit(p, m - p, Complex64::new(w, 0.0));
                }
            }
        });
    }
    cur
}

/// Generator of the rotation applied to an input state.
fn generator(state: &TwoArmState) -> TwoArmState {
    let mut total = TwoArmState { d: state.d, amps: BTreeMap::new() };
    for k in 0..state.d {
        let part = state.map_mode(k, |a, b, emit| {
            if a > 0 {
                emit(a - 1, b + 1, Complex64::new(0.5 * ((a * (b + 1)) as f64).sqrt(), 0.0));
            }
            if b > 0 {
                emit(a + 1, b - 1, Complex64::new(-0.5 * (((a + 1) * b) as f64).sqrt(), 0.0));
            }
        });
        total.add(&part);
    }
    total.amps.retain(|_, z| *z != Complex64::new(0.0, 0.0));
    total
}

/// Output state `U(φ) |A⟩|B⟩`.
pub fn evolve(a: &OccupationAmplitudes, b: &OccupationAmplitudes, phi: f64) -> Result<TwoArmState> {
    Ok(rotate(&TwoArmState::product(a, b)?, phi))
}

/// `∂_φ U(φ) |A⟩|B⟩`, unnormalized.
pub fn derivative_state(a: &OccupationAmplitudes, b: &OccupationAmplitudes, phi: f64) -> Result<TwoArmState> {
    Ok(rotate(&generator(&TwoArmState::product(a, b)?), phi))
}

/// Pure-state QFI `4(⟨∂ψ|∂ψ⟩ - |⟨∂ψ|ψ⟩|²)`; independent of φ.
pub fn qfi_pure(a: &OccupationAmplitudes, b: &OccupationAmplitudes) -> Result<f64> {
    let psi = TwoArmState::product(a, b)?;
    let dpsi = generator(&psi);
    let norm = psi.norm_sqr();
    if !(norm > 0.0) {
        return Ok(0.0);
    }
    let overlap = dpsi.inner(&psi) / norm;
    Ok(4.0 * (dpsi.norm_sqr() / norm - overlap.norm_sqr()))
}

/// `Q = Σ_j n_j (1 + m_j) + m_j (1 + n_j)`.
pub fn qfi_from_occupations(n: &[f64], m: &[f64]) -> Result<f64> {
    if n.len() != m.len() {
        return Err(Error::DimensionMismatch(format!("{} and {} occupations", n.len(), m.len())));
    }
    if n.iter().chain(m).any(|&x| !(x >= 0.0)) {
        return Err(Error::InvalidArgument("occupations must be non-negative".into()));
    }
    Ok(n.iter().zip(m).map(|(&nj, &mj)| nj * (1.0 + mj) + mj * (1.0 + nj)).sum())
}

/// `ρ[j][k] = ⟨a_j† a_k⟩` of a single-arm state.
pub fn one_body_density(state: &OccupationAmplitudes) -> Vec<Vec<Complex64>> {
    let d = state.d;
    let mut rho = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    let amps: HashMap<&[usize], Complex64> = state.iter().collect();
    for (t, z) in state.iter() {
        for j in 0..d {
            for k in 0..d {
                if t[k] == 0 {
                    continue;
                }
                // a_j† a_k |t⟩ = sqrt(t_k (t_j + 1 - δ_jk)) |t - e_k + e_j⟩
                let mut u = t.to_vec();
                u[k] -= 1;
                u[j] += 1;
                if let Some(w) = amps.get(u.as_slice()) {
                    let f = ((t[k] * u[j]) as f64).sqrt();
                    rho[j][k] += w.conj() * z * f;
                }
            }
        }
    }
    rho
}

/// QFI of a product input with fixed photon number per arm:
/// `Σ_jk (δ_jk + ρA_kj) ρB_jk + (δ_jk + ρB_kj) ρA_jk`.
///
/// Reduces to [`qfi_from_occupations`] when both densities are diagonal.
pub fn qfi_from_densities(ra: &[Vec<Complex64>], rb: &[Vec<Complex64>]) -> Result<f64> {
    let d = ra.len();
    if rb.len() != d {
        return Err(Error::DimensionMismatch(format!("{d} and {} modes", rb.len())));
    }
    let mut q = Complex64::new(0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            let delta = if j == k { 1.0 } else { 0.0 };
            q += (ra[k][j] + delta) * rb[j][k] + (rb[k][j] + delta) * ra[j][k];
        }
    }
    Ok(q.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Granularity {
    /// Counts resolved by internal mode.
    Mnr,
    /// Counts per output port only.
    Nr,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Mnr => "MNR",
            Granularity::Nr => "NR",
        })
    }
}

impl FromStr for Granularity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "MNR" => Ok(Granularity::Mnr),
            "NR" => Ok(Granularity::Nr),
            _ => Err(Error::InvalidArgument(format!("unknown granularity {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// Counts at output a; one entry per mode, or the total for NR.
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub p: f64,
    pub dp: f64,
    /// `∂²P/∂φ²` restricted to vanishing amplitudes; the limit term for zero-probability outcomes.
    pub curvature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub granularity: Granularity,
    pub eta: f64,
    pub phi: f64,
    pub entries: Vec<Outcome>,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|o| o.p).sum()
    }
}

/// Output-port statistics after detector loss of transmissivity η.
pub fn lossy_distribution(
    a: &OccupationAmplitudes,
    b: &OccupationAmplitudes,
    phi: f64,
    eta: f64,
    granularity: Granularity,
) -> Result<OutcomeDistribution> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!("transmissivity {eta} outside [0, 1]")));
    }
    let psi = evolve(a, b, phi)?;
    let dpsi = derivative_state(a, b, phi)?;
    let mut keys: Vec<&Key> = psi.amps.keys().chain(dpsi.amps.keys()).collect();
    keys.sort();
    keys.dedup();

    let mut acc: BTreeMap<Key, [f64; 3]> = BTreeMap::new();
    for key in keys {
        let z = psi.amps.get(key).copied().unwrap_or_default();
        let dz = dpsi.amps.get(key).copied().unwrap_or_default();
        let vals = [z.norm_sqr(), 2.0 * (z.conj() * dz).re, 2.0 * dz.norm_sqr()];
        let counts: Vec<usize> = key.0.iter().chain(&key.1).copied().collect();
        for_each_thinning(&counts, eta, |kept, w| {
            let (ka, kb) = kept.split_at(key.0.len());
            let label = match granularity {
                Granularity::Mnr => (ka.to_vec(), kb.to_vec()),
                Granularity::Nr => (vec![ka.iter().sum()], vec![kb.iter().sum()]),
            };
            let slot = acc.entry(label).or_insert([0.0; 3]);
            for (s, v) in slot.iter_mut().zip(vals) {
                *s += w * v;
            }
        });
    }
    let entries = acc
        .into_iter()
        .map(|((a, b), [p, dp, curvature])| Outcome { a, b, p, dp, curvature })
        .collect();
    Ok(OutcomeDistribution { granularity, eta, phi, entries })
}

/// Visit every `kept <= counts` with its binomial survival weight.
fn for_each_thinning(counts: &[usize], eta: f64, mut f: impl FnMut(&[usize], f64)) {
    if eta == 1.0 {
        f(counts, 1.0);
        return;
    }
    let weights: Vec<Vec<f64>> = counts
        .iter()
        .map(|&n| (0..=n).map(|k| binomial(n, k) * eta.powi(k as i32) * (1.0 - eta).powi((n - k) as i32)).collect())
        .collect();
    let mut kept = vec![0usize; counts.len()];
    loop {
        let w: f64 = kept.iter().zip(&weights).map(|(&k, ws)| ws[k]).product();
        if w != 0.0 {
            f(&kept, w);
        }
        let mut i = 0;
        loop {
            if i == kept.len() {
                return;
            }
            if kept[i] < counts[i] {
                kept[i] += 1;
                break;
            }
            kept[i] = 0;
            i += 1;
        }
    }
}

/// Classical Fisher information with the bookkeeping of floored outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfiReport {
    pub value: f64,
    /// Probability mass of outcomes evaluated through the limit term instead of `dP²/P`.
    pub dropped_mass: f64,
}

pub fn cfi(dist: &OutcomeDistribution) -> f64 {
    cfi_report(dist).value
}

pub fn cfi_report(dist: &OutcomeDistribution) -> CfiReport {
    let mut value = 0.0;
    let mut dropped_mass = 0.0;
    for o in &dist.entries {
        if o.p >= CFI_FLOOR {
            value += o.dp * o.dp / o.p;
        } else {
            // P ≈ P̈ δ²/2 near a zero gives dP²/P -> 2 P̈.
            value += 2.0 * o.curvature;
            dropped_mass += o.p;
        }
    }
    CfiReport { value: value.max(0.0), dropped_mass }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub phi: f64,
    pub eta: f64,
    pub granularity: Granularity,
    pub c: f64,
    /// Lossless pure-state QFI.
    pub q: f64,
    /// Shot-noise reference, the total photon number.
    pub snl: f64,
    pub dropped_mass: f64,
}

/// CFI over a `(η, φ)` grid; rows are ordered by η, then φ.
pub fn cfi_scan(
    a: &OccupationAmplitudes,
    b: &OccupationAmplitudes,
    phis: &[f64],
    etas: &[f64],
    granularity: Granularity,
) -> Result<Vec<ScanRow>> {
    if phis.is_empty() || etas.is_empty() {
        return Err(Error::InvalidArgument("scan grids must be nonempty".into()));
    }
    let q = qfi_pure(a, b)?;
    let snl = (a.n + b.n) as f64;
    let grid: Vec<(f64, f64)> = etas.iter().flat_map(|&e| phis.iter().map(move |&p| (e, p))).collect();
    grid.par_iter()
        .map(|&(eta, phi)| {
            let rep = cfi_report(&lossy_distribution(a, b, phi, eta, granularity)?);
            Ok(ScanRow { phi, eta, granularity, c: rep.value, q, snl, dropped_mass: rep.dropped_mass })
        })
        .collect()
}

/// Named input states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Total N photons, N/2 per arm in a single mode.
    TwinFock(usize),
    /// `Σ_j |j, n-j⟩ / sqrt(n+1)` in each arm.
    Psi1(usize),
    /// `(|0, n⟩ + |n, 0⟩) / sqrt(2)` in each arm.
    Psi2(usize),
}

impl Preset {
    /// The single-arm state fed into both arms.
    pub fn arm_state(&self) -> Result<OccupationAmplitudes> {
        match *self {
            Preset::TwinFock(n) => {
                if n % 2 != 0 {
                    return Err(Error::InvalidArgument(format!("twin Fock needs an even photon number, got {n}")));
                }
                OccupationAmplitudes::new(1, n / 2, vec![(vec![n / 2], Complex64::new(1.0, 0.0))])
            }
            Preset::Psi1(n) => {
                let c = Complex64::new(1.0 / ((n + 1) as f64).sqrt(), 0.0);
                OccupationAmplitudes::new(2, n, (0..=n).rev().map(|j| (vec![j, n - j], c)).collect())
            }
            Preset::Psi2(n) => {
                if n == 0 {
                    return Err(Error::InvalidArgument("psi2 needs at least one photon".into()));
                }
                let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                OccupationAmplitudes::new(2, n, vec![(vec![n, 0], c), (vec![0, n], c)])
            }
        }
    }
}

impl FromStr for Preset {
    type Err = Error;
    /// Accepts `"twin-fock 10"`, `"psi1 5"`, `"psi2 5"` (space or `=` separated).
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(|c: char| c.is_whitespace() || c == '=' || c == ':').filter(|p| !p.is_empty());
        let (name, arg) = (parts.next(), parts.next());
        let bad = || Error::InvalidArgument(format!("unrecognised preset {s:?}"));
        let n: usize = arg.ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if parts.next().is_some() {
            return Err(bad());
        }
        match name.ok_or_else(bad)? {
            "twin-fock" => Ok(Preset::TwinFock(n)),
            "psi1" => Ok(Preset::Psi1(n)),
            "psi2" => Ok(Preset::Psi2(n)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::TwinFock(n) => write!(f, "twin-fock {n}"),
            Preset::Psi1(n) => write!(f, "psi1 {n}"),
            Preset::Psi2(n) => write!(f, "psi2 {n}"),
        }
    }
}

#[cfg(test)]
mod tests;
