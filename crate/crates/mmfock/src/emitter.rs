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

//! The N-level emitter that produces the photonic state.
//!
//! Level n has frequency `omega[n]` and decays to level n-1 at rate
//! `gamma[n]`. The ground level is pinned at `omega[0] = gamma[0] = 0`.
//! Rates and frequencies are in units of the waveguide coupling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmitterSpec {
    #[serde(rename = "N")]
    n: usize,
    omega: Vec<f64>,
    gamma: Vec<f64>,
}

impl EmitterSpec {
    pub fn new(omega: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if omega.len() != gamma.len() {
            return Err(Error::InvalidSpec(format!(
                "omega has {} entries but gamma has {}",
                omega.len(),
                gamma.len()
            )));
        }
        if omega.len() < 2 {
            return Err(Error::InvalidSpec("need at least one excited level".into()));
        }
        if omega[0] != 0.0 || gamma[0] != 0.0 {
            return Err(Error::InvalidSpec("ground level must have omega = gamma = 0".into()));
        }
        if let Some(j) = (1..gamma.len()).find(|&j| !(gamma[j] > 0.0 && gamma[j].is_finite())) {
            return Err(Error::InvalidSpec(format!("gamma[{j}] = {} is not positive", gamma[j])));
        }
        if let Some(j) = (0..omega.len()).find(|&j| !omega[j].is_finite()) {
            return Err(Error::InvalidSpec(format!("omega[{j}] is not finite")));
        }
        Ok(EmitterSpec { n: omega.len() - 1, omega, gamma })
    }

    /// Number of photons emitted.
    pub fn photons(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// z_m = gamma_m / 2 + i omega_m.
    pub fn z(&self, m: usize) -> Complex64 {
        Complex64::new(0.5 * self.gamma[m], self.omega[m])
    }
}

/// Collective decay: omega_n = n omega0, gamma_n = Gamma n (N - n + 1).
pub fn superradiant_spec(n: usize, gamma1d: f64, omega0: f64) -> Result<EmitterSpec> {
    check_preset(n, gamma1d)?;
    let omega = (0..=n).map(|k| k as f64 * omega0).collect();
    let gamma = (0..=n).map(|k| gamma1d * (k * (n + 1 - k)) as f64).collect();
    EmitterSpec::new(omega, gamma)
}

/// Kerr-type ladder: omega_n = n omega_a + n (n - 1) U, gamma_n = n Gamma.
pub fn kerr_spec(n: usize, gamma1d: f64, omega_a: f64, u: f64) -> Result<EmitterSpec> {
    check_preset(n, gamma1d)?;
    let omega = (0..=n)
        .map(|k| {
            let k = k as f64;
            k * omega_a + k * (k - 1.0) * u
        })
        .collect();
    let gamma = (0..=n).map(|k| k as f64 * gamma1d).collect();
    EmitterSpec::new(omega, gamma)
}

fn check_preset(n: usize, gamma1d: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSpec("N must be at least 1".into()));
    }
    if !(gamma1d > 0.0 && gamma1d.is_finite()) {
        return Err(Error::InvalidSpec(format!("Gamma1d = {gamma1d} must be positive")));
    }
    Ok(())
}

/// Accepted JSON forms of an emitter description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpecSource {
    Preset(PresetSpec),
    Explicit(EmitterSpec),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "lowercase")]
pub enum PresetSpec {
    Superradiant {
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "Gamma1d", default = "unit")]
        gamma1d: f64,
        #[serde(default)]
        omega0: f64,
    },
    Kerr {
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "Gamma1d", default = "unit")]
        gamma1d: f64,
        #[serde(default)]
        omega_a: f64,
        #[serde(rename = "U", default)]
        u: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl SpecSource {
    pub fn resolve(&self) -> Result<EmitterSpec> {
        match self {
            SpecSource::Explicit(spec) => EmitterSpec::new(spec.omega.clone(), spec.gamma.clone()),
            SpecSource::Preset(PresetSpec::Superradiant { n, gamma1d, omega0 }) => {
                superradiant_spec(*n, *gamma1d, *omega0)
            }
            SpecSource::Preset(PresetSpec::Kerr { n, gamma1d, omega_a, u }) => {
                kerr_spec(*n, *gamma1d, *omega_a, *u)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<EmitterSpec> {
        let src: SpecSource = serde_json::from_str(text)?;
        src.resolve()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn superradiant_examples() {
        let s = superradiant_spec(1, 1.0, 0.0).unwrap();
        assert_eq!(s.gamma(), &[0.0, 1.0]);
        assert_eq!(s.omega(), &[0.0, 0.0]);
        let s = superradiant_spec(3, 1.0, 2.0).unwrap();
        assert_eq!(s.gamma(), &[0.0, 3.0, 4.0, 3.0]);
        assert_eq!(s.omega(), &[0.0, 2.0, 4.0, 6.0]);
        let s = superradiant_spec(100, 1.0, 0.0).unwrap();
        assert_eq!(s.gamma()[50], 2550.0);
    }

    #[test]
    fn kerr_examples() {
        let s = kerr_spec(2, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(s.omega(), &[0.0, 1.0, 3.0]);
        assert_eq!(s.gamma(), &[0.0, 1.0, 2.0]);
        let s = kerr_spec(3, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(s.omega(), &[0.0, 0.0, 2.0, 6.0]);
        assert_eq!(s.gamma(), &[0.0, 2.0, 4.0, 6.0]);
        assert_eq!(kerr_spec(1, 1.3, 0.7, 9.0).unwrap(), superradiant_spec(1, 1.3, 0.7).unwrap());
    }

    #[test]
    fn presets_reject_bad_input() {
        assert!(superradiant_spec(0, 1.0, 0.0).is_err());
        assert!(superradiant_spec(3, 0.0, 0.0).is_err());
        assert!(kerr_spec(0, 1.0, 0.0, 0.0).is_err());
        assert!(kerr_spec(2, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn explicit_spec_validation() {
        assert!(EmitterSpec::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(EmitterSpec::new(vec![0.5, 1.0], vec![0.0, 1.0]).is_err());
        assert!(EmitterSpec::new(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(EmitterSpec::new(vec![0.0, 1.0], vec![0.0, 2.0]).is_ok());
    }

    #[test]
    fn json_forms() {
        let a = SpecSource::from_json(r#"{"preset":"superradiant","N":3,"Gamma1d":1.0,"omega0":2.0}"#)
            .unwrap();
        assert_eq!(a, superradiant_spec(3, 1.0, 2.0).unwrap());
        let b = SpecSource::from_json(r#"{"preset":"kerr","N":2,"omega_a":1.0,"U":0.5}"#).unwrap();
        assert_eq!(b, kerr_spec(2, 1.0, 1.0, 0.5).unwrap());
        let c = SpecSource::from_json(r#"{"N":1,"omega":[0,0.5],"gamma":[0,2]}"#).unwrap();
        assert_eq!(c.gamma(), &[0.0, 2.0]);
        assert!(SpecSource::from_json(r#"{"N":1,"omega":[0,0.5],"gamma":[0,-2]}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn superradiant_rates_are_symmetric(n in 1usize..200, g in 0.01f64..10.0) {
                let s = superradiant_spec(n, g, 0.3).unwrap();
                for k in 1..=n {
                    prop_assert_eq!(s.gamma()[k], s.gamma()[n - k + 1]);
                }
            }

            #[test]
            fn presets_satisfy_invariants(n in 1usize..150, g in 0.01f64..10.0, w in -5.0f64..5.0, u in -2.0f64..2.0) {
                for s in [superradiant_spec(n, g, w).unwrap(), kerr_spec(n, g, w, u).unwrap()] {
                    prop_assert_eq!(s.omega().len(), n + 1);
                    prop_assert_eq!(s.gamma()[0], 0.0);
                    prop_assert_eq!(s.omega()[0], 0.0);
                    prop_assert!(s.gamma()[1..].iter().all(|&x| x > 0.0));
                }
            }
        }
    }
}
