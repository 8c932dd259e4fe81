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

//! Multimode N-photon states emitted by nonlinear decays into a waveguide.
//!
//! The crate evaluates correlators of exponential wavepacket modes through a
//! factorial-free recurrence, builds orthonormal effective modes, projects the
//! state onto a few of them, and scores the result as an interferometric probe.

pub mod basis;
pub mod correlator;
pub mod effective;
pub mod eigen;
pub mod emitter;
pub mod error;
pub mod interferometry;
pub mod modes;
pub mod numeric;
pub mod oracle;

pub use emitter::{kerr_spec, superradiant_spec, EmitterSpec};
pub use error::{Error, Result};
pub use modes::{commutator, ladder_family, ExpMode};
pub use numeric::{Mp, Real};
