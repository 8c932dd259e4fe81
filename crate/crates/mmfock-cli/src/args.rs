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

//! Command-line arguments. Every struct serializes into the provenance
//! header of the output, except fields that must not affect it.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "mmfock", version, about = "Multimode Fock states from nonlinear decays and their interferometry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,

    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub jobs: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// IEEE double.
    Double,
    /// 320-bit binary floating point.
    Extended,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitterPreset {
    Superradiant,
    Kerr,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Occupations and photon fractions of the leading orthonormal modes.
    Characterize(BasisCmd),
    /// Photons in exponential modes, for one rate or a rate grid.
    PhotonNumber(PhotonNumberCmd),
    /// Fractions C_d of photons in the first d modes.
    Ratios(BasisCmd),
    /// Spread of the photon number in the first d modes.
    Variance(VarianceCmd),
    /// Amplitudes of the state projected onto d modes.
    EffectiveState(EffectiveCmd),
    /// Quantum Fisher information of a twin input.
    Qfi(QfiCmd),
    /// Classical Fisher information at one phase and transmissivity.
    Cfi(CfiCmd),
    /// Classical Fisher information over phase and transmissivity grids.
    CfiScan(CfiScanCmd),
    /// Correlator of exponential modes.
    Correlator(CorrelatorCmd),
    /// Vacuum overlap of exponential-mode annihilators with the state.
    Overlap(OverlapCmd),
    /// Correlator cache management.
    #[command(subcommand)]
    Cache(CacheCmd),
}

#[derive(Args, Debug, Clone, Serialize, Default)]
pub struct SpecArgs {
    /// Emitter JSON: a file path or an inline object.
    #[arg(long)]
    pub spec: Option<String>,
    /// Built-in level structure.
    #[arg(long, value_enum)]
    pub preset: Option<EmitterPreset>,
    /// Number of photons for a preset.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Single-emitter decay rate for a preset.
    #[arg(long, default_value_t = 1.0)]
    pub gamma1d: f64,
    /// Transition frequency (superradiant) and frequency of the mode family.
    #[arg(long, default_value_t = 0.0)]
    pub omega0: f64,
    /// Kerr bare frequency.
    #[arg(long, default_value_t = 0.0)]
    pub omega_a: f64,
    /// Kerr nonlinearity.
    #[arg(long = "U", default_value_t = 0.0)]
    pub u: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BasisArgs {
    /// Size of the exponential mode family (rates j N/ln N, j = 1..D).
    #[arg(long = "D", default_value_t = 10)]
    pub big_d: usize,
    /// Number of leading orthonormal modes reported.
    #[arg(long = "d", default_value_t = 4)]
    pub d: usize,
    /// Arithmetic used by the orthogonalization.
    #[arg(long, value_enum, default_value_t = Precision::Extended)]
    pub precision: Precision,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BasisCmd {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VarianceCmd {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Reuse or populate a correlator cache in this directory.
    #[arg(long)]
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EffectiveCmd {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Rescale the projected state to unit norm.
    #[arg(long)]
    pub normalize: bool,
    /// Largest photon number accepted by the projection.
    #[arg(long, default_value_t = 12)]
    pub max_photons: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PhotonNumberCmd {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Single mode rate.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Lower end of a log-spaced rate grid.
    #[arg(long)]
    pub gamma_min: Option<f64>,
    /// Upper end of a log-spaced rate grid.
    #[arg(long)]
    pub gamma_max: Option<f64>,
    /// Points in the rate grid.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    /// Grid spanning [x/4, 4x] around x = N/ln N.
    #[arg(long)]
    pub around_optimum: bool,
    /// Mode frequency; defaults to --omega0.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Add brute-force reference values (N <= 4).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Precision::Double)]
    pub precision: Precision,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CorrelatorCmd {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Annihilated modes as gamma:omega pairs, comma separated.
    #[arg(long)]
    pub left: String,
    /// Created modes as gamma:omega pairs, comma separated.
    #[arg(long)]
    pub right: String,
    /// Return the normal-ordered correlator instead.
    #[arg(long)]
    pub normal_ordered: bool,
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Precision::Double)]
    pub precision: Precision,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OverlapCmd {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Modes as gamma:omega pairs, comma separated.
    #[arg(long)]
    pub modes: String,
    /// Occupations per mode, comma separated; they must sum to N.
    #[arg(long)]
    pub k: String,
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Precision::Double)]
    pub precision: Precision,
}

/// Where the twin interferometer input comes from.
#[derive(Args, Debug, Clone, Serialize)]
pub struct StateArgs {
    /// Twin Fock input with N photons in total.
    #[arg(long)]
    pub twin_fock: Option<usize>,
    /// Named input: "twin-fock N", "psi1 n" or "psi2 n".
    #[arg(long)]
    pub input: Option<String>,
    /// Effective state JSON for arm A (and arm B unless --state-b is given).
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long)]
    pub state_b: Option<PathBuf>,
    /// Emitter whose projected state enters both arms.
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QfiCmd {
    #[command(flatten)]
    pub state: StateArgs,
    /// Occupations of arm A, comma separated.
    #[arg(long)]
    pub occupations: Option<String>,
    /// Occupations of arm B; defaults to arm A.
    #[arg(long)]
    pub occupations_b: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CfiCmd {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub phi: f64,
    /// Detector transmissivity.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value = "NR")]
    pub granularity: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CfiScanCmd {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 0.0)]
    pub phi_min: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub phi_max: f64,
    /// Points in the phase grid, ends included.
    #[arg(long, default_value_t = 50)]
    pub phi_steps: usize,
    /// Transmissivities, comma separated.
    #[arg(long, default_value = "1")]
    pub eta: String,
    /// Granularities, comma separated.
    #[arg(long, default_value = "NR,MNR")]
    pub granularity: String,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum CacheCmd {
    /// Compute and store correlators of a mode family.
    Build(CacheBuildCmd),
    /// Summarize a cache file.
    Inspect(CacheInspectCmd),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CacheBuildCmd {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long = "D", default_value_t = 10)]
    pub big_d: usize,
    /// Highest correlator order stored (1 or 2).
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[arg(long, default_value = ".mmfock-cache")]
    pub dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Precision::Extended)]
    pub precision: Precision,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CacheInspectCmd {
    pub path: PathBuf,
}
