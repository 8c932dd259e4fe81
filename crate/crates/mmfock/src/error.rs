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

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid emitter spec: {0}")]
    InvalidSpec(String),
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("correlator order {order} exceeds photon number {photons}")]
    OrderExceedsPhotons { order: usize, photons: usize },
    #[error("left and right mode lists differ in length ({left} vs {right})")]
    UnbalancedRequest { left: usize, right: usize },
    #[error("non-finite intermediate value in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("state space of dimension {dim} exceeds budget {budget}")]
    BudgetExceeded { dim: usize, budget: usize },
    #[error("oracle limited to N <= {limit}, got N = {got}")]
    OracleLimit { limit: usize, got: usize },
    #[error("cache fingerprint mismatch: expected {expected}, found {found}")]
    CacheMismatch { expected: String, found: String },
    #[error("missing cache entry {0:?}")]
    MissingCacheEntry(Vec<usize>),
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "invalid_spec",
            Error::InvalidMode(_) => "invalid_mode",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::OrderExceedsPhotons { .. } => "order_exceeds_photons",
            Error::UnbalancedRequest { .. } => "unbalanced_request",
            Error::NonFinite(_) => "non_finite",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::OracleLimit { .. } => "oracle_limit",
            Error::CacheMismatch { .. } => "cache_mismatch",
            Error::MissingCacheEntry(_) => "missing_cache_entry",
            Error::Malformed(_) => "malformed",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
