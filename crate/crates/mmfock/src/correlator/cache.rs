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

//! Table of `⟨b_i b†_j⟩` and `⟨b_i b_j b†_k b†_l⟩` over a fixed base family.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::assemble;
use crate::emitter::EmitterSpec;
use crate::error::{Error, Result};
use crate::modes::ExpMode;
use crate::numeric::Real;

#[derive(Clone, Debug)]
pub struct CorrelatorCache<T: Real> {
    fingerprint: String,
    spec: EmitterSpec,
    base: Vec<ExpMode>,
    max_order: usize,
    table: BTreeMap<Vec<usize>, Complex<T>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub indices: Vec<usize>,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheFile {
    pub fingerprint: String,
    pub precision: String,
    pub spec: EmitterSpec,
    pub base: Vec<ExpMode>,
    pub max_order: usize,
    pub entries: Vec<CacheEntry>,
}

/// Hash of everything the cached values depend on.
pub fn fingerprint<T: Real>(spec: &EmitterSpec, base: &[ExpMode], max_order: usize) -> String {
    let mut h = Sha256::new();
    h.update(T::precision_tag().as_bytes());
    h.update((max_order as u64).to_le_bytes());
    h.update((spec.photons() as u64).to_le_bytes());
    for x in spec.omega().iter().chain(spec.gamma()) {
        h.update(x.to_bits().to_le_bytes());
    }
    h.update((base.len() as u64).to_le_bytes());
    for m in base {
        h.update(m.gamma.to_bits().to_le_bytes());
        h.update(m.omega.to_bits().to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Canonical index tuples stored for a family of `d` modes.
fn canonical_keys(d: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut keys = Vec::new();
    for i in 0..d {
        for j in 0..d {
            keys.push(vec![i, j]);
        }
    }
    if max_order >= 2 {
        for i in 0..d {
            for j in i..d {
                for k in 0..d {
                    for l in k..d {
                        keys.push(vec![i, j, k, l]);
                    }
                }
            }
        }
    }
    keys
}

impl<T: Real> CorrelatorCache<T> {
    /// Compute every entry up to `max_order` (1 or 2).
    pub fn build(spec: &EmitterSpec, base: &[ExpMode], max_order: usize) -> Result<Self> {
        if !(1..=2).contains(&max_order) {
            return Err(Error::InvalidArgument(format!("cache order must be 1 or 2, got {max_order}")));
        }
        let keys = canonical_keys(base.len(), max_order);
        let values: Vec<Result<Complex<T>>> = keys
            .par_iter()
            .map(|key| {
                let h = key.len() / 2;
                let left: Vec<ExpMode> = key[..h].iter().map(|&i| base[i]).collect();
                let right: Vec<ExpMode> = key[h..].iter().map(|&i| base[i]).collect();
                assemble::<T>(spec, &left, &right)
            })
            .collect();
        let mut table = BTreeMap::new();
        for (key, v) in keys.into_iter().zip(values) {
            table.insert(key, v?);
        }
        Ok(CorrelatorCache {
            fingerprint: fingerprint::<T>(spec, base, max_order),
            spec: spec.clone(),
            base: base.to_vec(),
            max_order,
            table,
        })
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn base(&self) -> &[ExpMode] {
        &self.base
    }

    pub fn spec(&self) -> &EmitterSpec {
        &self.spec
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of stored entries after symmetry reduction.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// `⟨b_i b†_j⟩`.
    pub fn get1(&self, i: usize, j: usize) -> Result<Complex<T>> {
        self.table.get(&vec![i, j]).cloned().ok_or(Error::MissingCacheEntry(vec![i, j]))
    }

    /// `⟨b_i b_j b†_k b†_l⟩`.
    pub fn get2(&self, i: usize, j: usize, k: usize, l: usize) -> Result<Complex<T>> {
        let key = vec![i.min(j), i.max(j), k.min(l), k.max(l)];
        self.table.get(&key).cloned().ok_or(Error::MissingCacheEntry(vec![i, j, k, l]))
    }

    pub fn to_file(&self) -> CacheFile {
        CacheFile {
            fingerprint: self.fingerprint.clone(),
            precision: T::precision_tag().to_string(),
            spec: self.spec.clone(),
            base: self.base.clone(),
            max_order: self.max_order,
            entries: self
                .table
                .iter()
                .map(|(k, v)| CacheEntry { indices: k.clone(), re: v.re.to_exact_string(), im: v.im.to_exact_string() })
                .collect(),
        }
    }

    pub fn from_file(file: CacheFile) -> Result<Self> {
        if file.precision != T::precision_tag() {
            return Err(Error::Malformed(format!(
                "cache precision {} does not match {}",
                file.precision,
                T::precision_tag()
            )));
        }
        let spec = EmitterSpec::new(file.spec.omega().to_vec(), file.spec.gamma().to_vec())?;
        let expected = fingerprint::<T>(&spec, &file.base, file.max_order);
        if expected != file.fingerprint {
            return Err(Error::CacheMismatch { expected, found: file.fingerprint });
        }
        let mut table = BTreeMap::new();
        for e in file.entries {
            let parse = |s: &str| T::parse_exact(s).ok_or_else(|| Error::Malformed(format!("bad number {s:?}")));
            table.insert(e.indices, Complex::new(parse(&e.re)?, parse(&e.im)?));
        }
        Ok(CorrelatorCache { fingerprint: file.fingerprint, spec, base: file.base, max_order: file.max_order, table })
    }

    /// File name used inside a cache directory.
    pub fn file_name(fingerprint: &str) -> String {
        format!("correlators-{}.json", &fingerprint[..16.min(fingerprint.len())])
    }

    /// Write into `dir` atomically; returns the final path.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(Self::file_name(&self.fingerprint));
        let tmp = dir.join(format!(".{}.tmp", Self::file_name(&self.fingerprint)));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(serde_json::to_string_pretty(&self.to_file())?.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Load a cache file, refusing it unless it matches the request.
    pub fn load(path: &Path, spec: &EmitterSpec, base: &[ExpMode], max_order: usize) -> Result<Self> {
        let file: CacheFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        let expected = fingerprint::<T>(spec, base, max_order);
        if file.fingerprint != expected {
            return Err(Error::CacheMismatch { expected, found: file.fingerprint });
        }
        Self::from_file(file)
    }

    /// Load from `dir` when a matching file exists, else build and save.
    pub fn load_or_build(dir: &Path, spec: &EmitterSpec, base: &[ExpMode], max_order: usize) -> Result<(Self, bool)> {
        let fp = fingerprint::<T>(spec, base, max_order);
        let path = dir.join(Self::file_name(&fp));
        if path.exists() {
            return Ok((Self::load(&path, spec, base, max_order)?, true));
        }
        let cache = Self::build(spec, base, max_order)?;
        cache.save(dir)?;
        Ok((cache, false))
    }
}
