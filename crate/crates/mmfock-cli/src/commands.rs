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

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;

use mmfock::basis::OrthoBasis;
use mmfock::correlator::{self, CacheFile, CorrelatorCache};
use mmfock::effective::{self, OccupationAmplitudes};
use mmfock::emitter::SpecSource;
use mmfock::interferometry::{self as mz, Granularity, Preset};
use mmfock::numeric::lower;
use mmfock::{kerr_spec, ladder_family, oracle, superradiant_spec, EmitterSpec, Error, ExpMode, Mp, Real, Result};

use crate::args::*;
use crate::output::{Cell, Report};

macro_rules! dispatch {
    ($prec:expr, $f:ident($($arg:expr),*)) => {
        match $prec {
            Precision::Double => $f::<f64>($($arg),*),
            Precision::Extended => $f::<Mp>($($arg),*),
        }
    };
}

/// Execute a parsed command line.
pub fn run(cli: &Cli) -> Result<Report> {
    let config = serde_json::to_value(&cli.command)?;
    let started = Instant::now();
    let report = match &cli.command {
        Command::Characterize(c) => dispatch!(c.basis.precision, characterize(c, config, true)),
        Command::Ratios(c) => dispatch!(c.basis.precision, characterize(c, config, false)),
        Command::Variance(c) => dispatch!(c.basis.precision, variance(c, config)),
        Command::EffectiveState(c) => dispatch!(c.basis.precision, effective_state(c, config)),
        Command::PhotonNumber(c) => dispatch!(c.precision, photon_number(c, config)),
        Command::Correlator(c) => dispatch!(c.precision, correlator_cmd(c, config)),
        Command::Overlap(c) => dispatch!(c.precision, overlap(c, config)),
        Command::Qfi(c) => qfi(c, config),
        Command::Cfi(c) => cfi(c, config),
        Command::CfiScan(c) => cfi_scan(c, config),
        Command::Cache(CacheCmd::Build(c)) => dispatch!(c.precision, cache_build(c, config)),
        Command::Cache(CacheCmd::Inspect(c)) => cache_inspect(c, config),
    }?;
    log::info!("{} finished in {:.3} s", report.command, started.elapsed().as_secs_f64());
    Ok(report)
}

/// Input files named on the command line; outputs may not overwrite them.
pub fn input_paths(cli: &Cli) -> Vec<PathBuf> {
    let spec_path = |s: &SpecArgs| s.spec.as_ref().filter(|t| !t.trim_start().starts_with('{')).map(PathBuf::from);
    let state = |s: &StateArgs| {
        let mut v: Vec<PathBuf> = s.state.iter().chain(&s.state_b).cloned().collect();
        v.extend(spec_path(&s.spec));
        v
    };
    match &cli.command {
        Command::Characterize(c) | Command::Ratios(c) => spec_path(&c.spec).into_iter().collect(),
        Command::Variance(c) => spec_path(&c.spec).into_iter().collect(),
        Command::EffectiveState(c) => spec_path(&c.spec).into_iter().collect(),
        Command::PhotonNumber(c) => spec_path(&c.spec).into_iter().collect(),
        Command::Correlator(c) => spec_path(&c.spec).into_iter().collect(),
        Command::Overlap(c) => spec_path(&c.spec).into_iter().collect(),
        Command::Qfi(c) => state(&c.state),
        Command::Cfi(c) => state(&c.state),
        Command::CfiScan(c) => state(&c.state),
        Command::Cache(CacheCmd::Build(c)) => spec_path(&c.spec).into_iter().collect(),
        Command::Cache(CacheCmd::Inspect(c)) => vec![c.path.clone()],
    }
}

fn has_spec(a: &SpecArgs) -> bool {
    a.spec.is_some() || a.preset.is_some()
}

pub fn resolve_spec(a: &SpecArgs) -> Result<EmitterSpec> {
    if let Some(s) = &a.spec {
        let text = if s.trim_start().starts_with('{') { s.clone() } else { fs::read_to_string(s)? };
        return SpecSource::from_json(&text);
    }
    let n = || a.n.ok_or_else(|| Error::InvalidArgument("a preset needs --N".into()));
    match a.preset {
        Some(EmitterPreset::Superradiant) => superradiant_spec(n()?, a.gamma1d, a.omega0),
        Some(EmitterPreset::Kerr) => kerr_spec(n()?, a.gamma1d, a.omega_a, a.u),
        None => Err(Error::InvalidArgument("give --spec or --preset".into())),
    }
}

fn family(spec: &EmitterSpec, a: &SpecArgs, big_d: usize) -> Result<Vec<ExpMode>> {
    ladder_family(spec.photons() as f64, big_d, a.omega0)
}

fn basis_for<T: Real>(spec: &EmitterSpec, a: &SpecArgs, b: &BasisArgs) -> Result<OrthoBasis<T>> {
    let base = family(spec, a, b.big_d)?;
    let t = Instant::now();
    let basis = OrthoBasis::<T>::build(spec, &base)?;
    log::info!("basis over {} modes built in {:.3} s", base.len(), t.elapsed().as_secs_f64());
    Ok(basis)
}

fn basis_notes<T: Real>(r: &mut Report, spec: &EmitterSpec, basis: &OrthoBasis<T>) {
    r.note("N", spec.photons());
    r.note("precision", T::precision_tag());
    r.note("retained_modes", basis.len());
    r.note("orthonormality_error", basis.orthonormality_error());
    r.note("deflated_eigenvalues", basis.deflated.len());
}

fn characterize<T: Real>(c: &BasisCmd, config: Value, with_occupations: bool) -> Result<Report> {
    let spec = resolve_spec(&c.spec)?;
    let basis = basis_for::<T>(&spec, &c.spec, &c.basis)?;
    let d = c.basis.d.min(basis.len());
    let occ = effective::mode_occupations(&basis, d)?;
    let n = spec.photons() as f64;
    let (name, cols): (_, &[&str]) =
        if with_occupations { ("characterize", &["d", "occupation", "C"]) } else { ("ratios", &["d", "C"]) };
    let mut r = Report::new(name, config, cols);
    basis_notes(&mut r, &spec, &basis);
    let mut cum = 0.0;
    for (i, o) in occ.iter().enumerate() {
        cum += o;
        let mut row: Vec<Cell> = vec![(i + 1).into()];
        if with_occupations {
            row.push((*o).into());
        }
        row.push((cum / n).into());
        r.row(row);
    }
    Ok(r)
}

fn variance<T: Real>(c: &VarianceCmd, config: Value) -> Result<Report> {
    let spec = resolve_spec(&c.spec)?;
    let base = family(&spec, &c.spec, c.basis.big_d)?;
    let t = Instant::now();
    let cache = match &c.cache_dir {
        Some(dir) => {
            let (cache, hit) = CorrelatorCache::<T>::load_or_build(dir, &spec, &base, 2)?;
            log::info!("correlator cache {} in {}", if hit { "hit" } else { "miss" }, dir.display());
            cache
        }
        None => CorrelatorCache::<T>::build(&spec, &base, 2)?,
    };
    log::info!("{} cached correlators ready in {:.3} s", cache.len(), t.elapsed().as_secs_f64());
    let basis = OrthoBasis::from_cache(&cache)?;
    let d = c.basis.d.min(basis.len());
    let occ = effective::mode_occupations(&basis, d)?;
    let mut r = Report::new("variance", config, &["d", "mean", "sigma"]);
    basis_notes(&mut r, &spec, &basis);
    for k in 1..=d {
        let sigma = effective::variance_sigma(&basis, k, &cache)?;
        r.row(vec![k.into(), occ[..k].iter().sum::<f64>().into(), sigma.into()]);
    }
    Ok(r)
}

fn tuple_label(t: &[usize]) -> String {
    t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn effective_state<T: Real>(c: &EffectiveCmd, config: Value) -> Result<Report> {
    let spec = resolve_spec(&c.spec)?;
    let basis = basis_for::<T>(&spec, &c.spec, &c.basis)?;
    let mut state = effective::project_with_cap(&spec, &basis, c.basis.d, c.max_photons)?;
    let fidelity = state.norm;
    if c.normalize {
        state = state.normalized()?;
    }
    let mut r = Report::new("effective-state", config, &["occupations", "re", "im", "probability"]);
    basis_notes(&mut r, &spec, &basis);
    r.note("fidelity", fidelity);
    for (t, a) in state.iter() {
        r.row(vec![tuple_label(t).into(), a.re.into(), a.im.into(), a.norm_sqr().into()]);
    }
    r.payload = Some(("state".into(), serde_json::to_value(&state)?));
    Ok(r)
}

fn log_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidArgument(format!("bad rate grid [{lo}, {hi}] with {steps} steps")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..steps).map(|i| (a + (b - a) * i as f64 / (steps - 1) as f64).exp()).collect())
}

fn lin_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(hi >= lo) {
        return Err(Error::InvalidArgument(format!("bad grid [{lo}, {hi}] with {steps} steps")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

/// Rates scanned by `photon-number`.
pub fn rate_grid(c: &PhotonNumberCmd, n: usize) -> Result<Vec<f64>> {
    if c.around_optimum {
        let x = n as f64 / (n as f64).ln();
        return log_grid(x / 4.0, 4.0 * x, c.steps);
    }
    match (c.gamma, c.gamma_min, c.gamma_max) {
        (Some(g), None, None) => Ok(vec![g]),
        (None, Some(lo), Some(hi)) => log_grid(lo, hi, c.steps),
        _ => Err(Error::InvalidArgument("give --gamma, or --gamma-min with --gamma-max, or --around-optimum".into())),
    }
}

fn photon_number<T: Real>(c: &PhotonNumberCmd, config: Value) -> Result<Report> {
    let spec = resolve_spec(&c.spec)?;
    let omega = c.omega.unwrap_or(c.spec.omega0);
    let rates = rate_grid(c, spec.photons())?;
    let mut cols = vec!["gamma", "omega", "n", "fraction"];
    if c.oracle {
        cols.push("oracle_n");
    }
    let values: Vec<(f64, Option<f64>)> = rates
        .par_iter()
        .map(|&g| {
            let mode = ExpMode::new(g, omega)?;
            let n = correlator::photon_number::<T>(&spec, &mode)?.to_f64();
            let o = if c.oracle { Some(oracle::normal_ordered_direct(&spec, &[mode], &[mode])?.re) } else { None };
            Ok((n, o))
        })
        .collect::<Result<_>>()?;
    let mut r = Report::new("photon-number", config, &cols);
    let n_tot = spec.photons() as f64;
    r.note("N", spec.photons());
    if spec.photons() >= 2 {
        r.note("N_over_lnN", n_tot / n_tot.ln());
    }
    let mut best = 0;
    for (i, (&g, (n, o))) in rates.iter().zip(&values).enumerate() {
        if *n > values[best].0 {
            best = i;
        }
        let mut row: Vec<Cell> = vec![g.into(), omega.into(), (*n).into(), (n / n_tot).into()];
        if let Some(o) = o {
            row.push((*o).into());
        }
        r.row(row);
    }
    r.note("argmax_gamma", rates[best]);
    Ok(r)
}

/// Parse `gamma:omega,gamma:omega,...`.
pub fn parse_modes(s: &str) -> Result<Vec<ExpMode>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (g, w) = p.split_once(':').unwrap_or((p, "0"));
            let num = |x: &str| {
                x.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad mode {p:?}; expected gamma:omega")))
            };
            ExpMode::new(num(g)?, num(w)?)
        })
        .collect()
}

fn parse_list<F: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<F>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<F>().map_err(|_| Error::InvalidArgument(format!("bad {what} {p:?}"))))
        .collect()
}

fn correlator_cmd<T: Real>(c: &CorrelatorCmd, config: Value) -> Result<Report> {
    let spec = resolve_spec(&c.spec)?;
    let (left, right) = (parse_modes(&c.left)?, parse_modes(&c.right)?);
    let value = if c.normal_ordered {
        correlator::normal_ordered::<T>(&spec, &left, &right)?
    } else {
        correlator::correlator::<T>(&spec, &left, &right)?
    };
    let z = lower(&value);
    let mut cols = vec!["order", "re", "im"];
    let mut row: Vec<Cell> = vec![left.len().into(), z.re.into(), z.im.into()];
    if c.oracle {
        let o = if c.normal_ordered {
            oracle::normal_ordered_direct(&spec, &left, &right)?
        } else {
            oracle::correlator_direct(&spec, &left, &right)?
        };
        cols.extend(["oracle_re", "oracle_im", "abs_diff"]);
        row.extend([o.re.into(), o.im.into(), (z - o).norm().into()]);
    }
    let mut r = Report::new("correlator", config, &cols);
    r.note("N", spec.photons());
    r.row(row);
    Ok(r)
}

fn overlap<T: Real>(c: &OverlapCmd, config: Value) -> Result<Report> {
    let spec = resolve_spec(&c.spec)?;
    let modes = parse_modes(&c.modes)?;
    let k: Vec<usize> = parse_list(&c.k, "occupation")?;
    let z = lower(&correlator::overlap_amplitude::<T>(&spec, &modes, &k)?);
    let mut cols = vec!["re", "im"];
    let mut row: Vec<Cell> = vec![z.re.into(), z.im.into()];
    if c.oracle {
        let o = oracle::overlap_direct(&spec, &modes, &k)?;
        cols.extend(["oracle_re", "oracle_im", "abs_diff"]);
        row.extend([o.re.into(), o.im.into(), (z - o).norm().into()]);
    }
    let mut r = Report::new("overlap", config, &cols);
    r.note("N", spec.photons());
    r.row(row);
    Ok(r)
}

/// Read an effective state, either bare or inside an `effective-state` JSON report.
pub fn load_state(path: &Path) -> Result<OccupationAmplitudes> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let v = v.get("state").cloned().unwrap_or(v);
    let s: OccupationAmplitudes = serde_json::from_value(v)?;
    OccupationAmplitudes::new(s.d, s.n, s.iter().map(|(t, a)| (t.to_vec(), a)).collect())
}

struct Inputs {
    a: OccupationAmplitudes,
    b: OccupationAmplitudes,
    label: String,
}

fn resolve_inputs(s: &StateArgs) -> Result<Inputs> {
    let preset = |p: Preset| -> Result<Inputs> {
        let arm = p.arm_state()?;
        Ok(Inputs { a: arm.clone(), b: arm, label: p.to_string() })
    };
    if let Some(n) = s.twin_fock {
        return preset(Preset::TwinFock(n));
    }
    if let Some(text) = &s.input {
        return preset(text.parse()?);
    }
    if let Some(path) = &s.state {
        let a = load_state(path)?;
        let b = match &s.state_b {
            Some(p) => load_state(p)?,
            None => a.clone(),
        };
        return Ok(Inputs { a: a.normalized()?, b: b.normalized()?, label: "state file".into() });
    }
    if has_spec(&s.spec) {
        let spec = resolve_spec(&s.spec)?;
        let arm = dispatch!(s.basis.precision, projected_arm(&spec, s))?;
        return Ok(Inputs { a: arm.clone(), b: arm, label: format!("twin emitter, d = {}", s.basis.d) });
    }
    Err(Error::InvalidArgument("give --twin-fock, --input, --state or an emitter".into()))
}

fn projected_arm<T: Real>(spec: &EmitterSpec, s: &StateArgs) -> Result<OccupationAmplitudes> {
    let basis = basis_for::<T>(spec, &s.spec, &s.basis)?;
    let state = effective::project(spec, &basis, s.basis.d)?;
    log::info!("projected onto {} modes with fidelity {:.6}", s.basis.d, state.norm);
    state.normalized()
}

fn emitter_occupations<T: Real>(spec: &EmitterSpec, s: &StateArgs) -> Result<Vec<f64>> {
    let basis = basis_for::<T>(spec, &s.spec, &s.basis)?;
    effective::mode_occupations(&basis, s.basis.d.min(basis.len()))
}

fn na() -> Cell {
    Cell::Text("NA".into())
}

fn qfi(c: &QfiCmd, config: Value) -> Result<Report> {
    let mut r = Report::new("qfi", config, &["source", "N", "Q", "Q_occupations", "SNL"]);
    let occupation_row = |label: String, n: &[f64], m: &[f64], pure: Cell| -> Result<Vec<Cell>> {
        let total: f64 = n.iter().chain(m).sum();
        let q = mz::qfi_from_occupations(n, m)?;
        Ok(vec![label.into(), total.into(), pure, q.into(), total.into()])
    };
    if let Some(text) = &c.occupations {
        let n: Vec<f64> = parse_list(text, "occupation")?;
        let m: Vec<f64> = match &c.occupations_b {
            Some(t) => parse_list(t, "occupation")?,
            None => n.clone(),
        };
        r.row(occupation_row("occupations".into(), &n, &m, na())?);
        return Ok(r);
    }
    let s = &c.state;
    if s.twin_fock.is_none() && s.input.is_none() && s.state.is_none() && has_spec(&s.spec) {
        // Large emitters: the occupation formula needs only the basis eigenvalues.
        let spec = resolve_spec(&s.spec)?;
        let occ = dispatch!(s.basis.precision, emitter_occupations(&spec, s))?;
        r.note("arm_photons", spec.photons());
        r.row(occupation_row(format!("twin emitter, d = {}", occ.len()), &occ, &occ, na())?);
        return Ok(r);
    }
    let inputs = resolve_inputs(s)?;
    let q = mz::qfi_pure(&inputs.a, &inputs.b)?;
    r.row(occupation_row(inputs.label, &inputs.a.occupations(), &inputs.b.occupations(), q.into())?);
    Ok(r)
}

const FISHER_COLUMNS: [&str; 7] = ["phi", "eta", "granularity", "C", "Q", "SNL", "dropped_mass"];

fn fisher_row(row: &mz::ScanRow) -> Vec<Cell> {
    vec![
        row.phi.into(),
        row.eta.into(),
        row.granularity.to_string().into(),
        row.c.into(),
        row.q.into(),
        row.snl.into(),
        row.dropped_mass.into(),
    ]
}

fn cfi(c: &CfiCmd, config: Value) -> Result<Report> {
    let inputs = resolve_inputs(&c.state)?;
    let g: Granularity = c.granularity.parse()?;
    let rows = mz::cfi_scan(&inputs.a, &inputs.b, &[c.phi], &[c.eta], g)?;
    let mut r = Report::new("cfi", config, &FISHER_COLUMNS);
    r.note("input", &inputs.label);
    r.row(fisher_row(&rows[0]));
    Ok(r)
}

fn cfi_scan(c: &CfiScanCmd, config: Value) -> Result<Report> {
    let inputs = resolve_inputs(&c.state)?;
    let phis = lin_grid(c.phi_min, c.phi_max, c.phi_steps)?;
    let etas: Vec<f64> = parse_list(&c.eta, "transmissivity")?;
    let grans: Vec<Granularity> = c
        .granularity
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse())
        .collect::<Result<_>>()?;
    if etas.is_empty() || grans.is_empty() {
        return Err(Error::InvalidArgument("scan grids must be nonempty".into()));
    }
    let mut r = Report::new("cfi-scan", config, &FISHER_COLUMNS);
    r.note("input", &inputs.label);
    for g in grans {
        for row in mz::cfi_scan(&inputs.a, &inputs.b, &phis, &etas, g)? {
            r.row(fisher_row(&row));
        }
    }
    Ok(r)
}

fn cache_build<T: Real>(c: &CacheBuildCmd, config: Value) -> Result<Report> {
    let spec = resolve_spec(&c.spec)?;
    let base = family(&spec, &c.spec, c.big_d)?;
    let (cache, hit) = CorrelatorCache::<T>::load_or_build(&c.dir, &spec, &base, c.order)?;
    log::info!("correlator cache {}", if hit { "hit" } else { "built" });
    let path = c.dir.join(CorrelatorCache::<T>::file_name(cache.fingerprint()));
    let mut r = Report::new("cache build", config, &["path", "fingerprint", "entries", "reused"]);
    r.row(vec![
        path.display().to_string().into(),
        cache.fingerprint().into(),
        cache.len().into(),
        (if hit { "yes" } else { "no" }).into(),
    ]);
    Ok(r)
}

fn cache_inspect(c: &CacheInspectCmd, config: Value) -> Result<Report> {
    let file: CacheFile = serde_json::from_str(&fs::read_to_string(&c.path)?)?;
    let (n, d, order, precision) = (file.spec.photons(), file.base.len(), file.max_order, file.precision.clone());
    let entries = if precision == f64::precision_tag() {
        CorrelatorCache::<f64>::from_file(file)?.len()
    } else if precision == Mp::precision_tag() {
        CorrelatorCache::<Mp>::from_file(file)?.len()
    } else {
        return Err(Error::Malformed(format!("unknown cache precision {precision:?}")));
    };
    let mut r = Report::new("cache inspect", config, &["precision", "N", "D", "max_order", "entries"]);
    r.row(vec![precision.into(), n.into(), d.into(), order.into(), entries.into()]);
    Ok(r)
}
