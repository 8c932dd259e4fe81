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

//! Exponential wavepacket modes.
//!
//! A mode with rate γ and frequency ω has the temporal profile
//! `B(t) = sqrt(γ) exp(-t (iω + γ/2))` for t >= 0, and annihilator
//! `b = ∫ B(t)* a(t) dt`.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpMode {
    pub gamma: f64,
    pub omega: f64,
}

impl ExpMode {
    pub fn new(gamma: f64, omega: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) || !omega.is_finite() {
            return Err(Error::InvalidMode(format!("rate {gamma} must be positive and frequency {omega} finite")));
        }
        Ok(ExpMode { gamma, omega })
    }

    /// Decay constant of the annihilator profile B*: gamma/2 - i omega.
    pub fn kappa_bra(&self) -> Complex64 {
        Complex64::new(0.5 * self.gamma, -self.omega)
    }

    /// Profile value at time t.
    pub fn profile(&self, t: f64) -> Complex64 {
        self.gamma.sqrt() * (-Complex64::new(0.5 * self.gamma, self.omega) * t).exp()
    }
}

/// `[b_1, b_2†] = 2 sqrt(γ1 γ2) / (γ1 + γ2 + 2i(ω2 - ω1))`.
pub fn commutator(m1: &ExpMode, m2: &ExpMode) -> Complex64 {
    if m1 == m2 {
        return Complex64::new(1.0, 0.0);
    }
    let num = 2.0 * (m1.gamma * m2.gamma).sqrt();
    Complex64::new(num, 0.0) / Complex64::new(m1.gamma + m2.gamma, 2.0 * (m2.omega - m1.omega))
}

/// Commutator evaluated in the working precision.
pub fn commutator_in<T: Real>(m1: &ExpMode, m2: &ExpMode) -> Complex<T> {
    if m1 == m2 {
        return Complex::new(T::one(), T::zero());
    }
    let num = (T::from_f64(m1.gamma) * T::from_f64(m2.gamma)).sqrt();
    let two = T::from_f64(2.0);
    let den = Complex::new(
        T::from_f64(m1.gamma) + T::from_f64(m2.gamma),
        two.clone() * (T::from_f64(m2.omega) - T::from_f64(m1.omega)),
    );
    Complex::new(two * num, T::zero()) / den
}

/// Modes with rates j N / ln N for j = 1..D, all at frequency omega0.
pub fn ladder_family(n: f64, d: usize, omega0: f64) -> Result<Vec<ExpMode>> {
    if !(n >= 2.0) {
        return Err(Error::InvalidArgument(format!("ladder family needs N >= 2, got {n}")));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("ladder family needs D >= 1".into()));
    }
    let x = n / n.ln();
    (1..=d).map(|j| ExpMode::new(j as f64 * x, omega0)).collect()
}

/// Gram matrix with `R[k][l] = [b_l, b_k†]`, so that modes
/// `c = Σ_j v_j b_j` satisfy `[c, c'†] = v'† R v`.
pub fn gram_matrix<T: Real>(base: &[ExpMode]) -> Vec<Vec<Complex<T>>> {
    base.iter()
        .map(|mk| base.iter().map(|ml| commutator_in(ml, mk)).collect())
        .collect()
}
