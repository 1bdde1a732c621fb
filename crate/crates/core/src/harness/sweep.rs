//! Time sweeps over random bath realizations, written out as CSV.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::{canonical_angles, chsh_closed_form, chsh_s, AngleSet, BathGeometry};
use crate::decoherence::{factors_at, gaussian_rate, FrequencySelector};
use crate::density::{rho_common_bath, rho_two_baths};
use crate::entanglement::{
    concurrence, concurrence_closed_common, concurrence_closed_two_baths,
    entanglement_entropy_from_concurrence,
};
use crate::error::{invalid, Error, Result};
use crate::harness::sampling::{sample_bath_stream, OmegaDist, SamplingSpec, ThetaLaw};
use crate::types::{make_bell_state, Bath, BathLabel, DecoherenceFactors, Environment, PairState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Each central spin in its own bath.
    TwoBath,
    /// Both central spins in one shared bath.
    CommonBath,
    /// Only central spin 1 is coupled; spin 2 sees the uncoupled bath.
    OneCoupled,
}

impl Scenario {
    pub fn geometry(self) -> BathGeometry {
        match self {
            Scenario::CommonBath => BathGeometry::Common,
            _ => BathGeometry::TwoBaths,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    Bell(u8),
    /// `[re, im]` for `a↑↑, a↑↓, a↓↑, a↓↓`.
    Amplitudes([[f64; 2]; 4]),
}

impl InitialState {
    pub fn pair_state(&self) -> Result<PairState> {
        match self {
            InitialState::Bell(i) => make_bell_state(*i),
            InitialState::Amplitudes(a) => PairState::new(a.map(|[re, im]| Complex64::new(re, im))),
        }
    }

    fn bell_index(&self) -> Option<u8> {
        match self {
            InitialState::Bell(i) => Some(*i),
            InitialState::Amplitudes(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    #[serde(default)]
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// `steps` evenly spaced times from `start` to `stop` inclusive.
    pub fn points(&self) -> Vec<f64> {
        let n = self.steps;
        let dt = (self.stop - self.start) / (n - 1) as f64;
        (0..n)
            .map(|k| if k + 1 == n { self.stop } else { self.start + k as f64 * dt })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    Factors,
    Concurrence,
    Entropy,
    Chsh,
    GaussianFit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleChoice {
    Canonical,
    Explicit(AngleSet),
}

impl AngleChoice {
    pub fn angles(&self) -> AngleSet {
        match self {
            AngleChoice::Canonical => canonical_angles(),
            AngleChoice::Explicit(a) => *a,
        }
    }
}

/// Bath sizes and sampling laws of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathConfig {
    pub n_spins: usize,
    /// Size of the second bath in the two-bath scenario; defaults to `n_spins`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_spins2: Option<usize>,
    #[serde(default)]
    pub omega_dist: OmegaDist,
    #[serde(default)]
    pub omega2_dist: OmegaDist,
    #[serde(default)]
    pub theta_law: ThetaLaw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub initial_state: InitialState,
    pub time_grid: TimeGrid,
    pub n_trials: usize,
    pub outputs: Vec<Observable>,
    pub angle_set: AngleChoice,
    pub bath: BathConfig,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::TwoBath,
            initial_state: InitialState::Bell(1),
            time_grid: TimeGrid {
                start: 0.0,
                stop: 1.0,
                steps: 101,
            },
            n_trials: 1,
            outputs: vec![
                Observable::Factors,
                Observable::Concurrence,
                Observable::Entropy,
                Observable::Chsh,
            ],
            angle_set: AngleChoice::Canonical,
            bath: BathConfig {
                n_spins: 100,
                n_spins2: None,
                omega_dist: OmegaDist::default(),
                omega2_dist: OmegaDist::default(),
                theta_law: ThetaLaw::default(),
            },
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let g = &self.time_grid;
        if g.steps < 2 {
            return invalid(format!("time grid needs at least 2 steps, got {}", g.steps));
        }
        if !g.start.is_finite() || !g.stop.is_finite() || g.stop < g.start {
            return invalid(format!("time grid [{}, {}] is not a finite increasing range", g.start, g.stop));
        }
        if self.n_trials < 1 {
            return invalid("n_trials must be at least 1");
        }
        if self.outputs.is_empty() {
            return invalid("no outputs selected");
        }
        self.initial_state.pair_state()?;
        let a = self.angle_set.angles();
        AngleSet::new(a.theta1, a.theta2, a.theta1p, a.theta2p)?;
        self.spec(BathLabel::Bath1, 0).validate()?;
        if self.scenario == Scenario::CommonBath {
            self.spec(BathLabel::Common, 0).validate()?;
        }
        Ok(())
    }

    fn spec(&self, label: BathLabel, n_spins: usize) -> SamplingSpec {
        SamplingSpec {
            n_spins,
            label,
            omega_dist: self.bath.omega_dist,
            omega2_dist: self.bath.omega2_dist,
            theta_law: self.bath.theta_law,
            seed: self.seed,
        }
    }

    fn wants(&self, o: Observable) -> bool {
        self.outputs.contains(&o)
    }

    /// Environment of trial `trial`. Each bath of each trial reads its own
    /// RNG stream, so trials are independent of evaluation order.
    pub fn environment(&self, trial: usize) -> Result<Environment> {
        let stream = |slot: u64| (trial as u64) * 4 + slot;
        let n1 = self.bath.n_spins;
        match self.scenario {
            Scenario::TwoBath => Environment::separate(
                sample_bath_stream(&self.spec(BathLabel::Bath1, n1), stream(0))?,
                sample_bath_stream(&self.spec(BathLabel::Bath2, self.bath.n_spins2.unwrap_or(n1)), stream(1))?,
            ),
            Scenario::OneCoupled => Environment::separate(
                sample_bath_stream(&self.spec(BathLabel::Bath1, n1), stream(0))?,
                Bath::trivial(BathLabel::Bath2),
            ),
            Scenario::CommonBath => {
                Environment::common(sample_bath_stream(&self.spec(BathLabel::Common, n1), stream(2))?)
            }
        }
    }

    /// Factors reported in `re_*`/`im_*` and `gauss_*` columns.
    fn factor_names(&self) -> &'static [&'static str] {
        match self.scenario {
            Scenario::CommonBath => &["r1", "r2", "r12p", "r12m"],
            _ => &["r1", "r2"],
        }
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["trial".to_string(), "time".to_string()];
        if self.wants(Observable::Factors) {
            for f in self.factor_names() {
                cols.push(format!("re_{f}"));
                cols.push(format!("im_{f}"));
            }
        }
        if self.wants(Observable::Concurrence) {
            cols.push("concurrence".into());
            if self.initial_state.bell_index().is_some() {
                cols.push("concurrence_closed".into());
            }
        }
        if self.wants(Observable::Entropy) {
            cols.push("entropy".into());
        }
        if self.wants(Observable::Chsh) {
            cols.extend(["S", "S1", "S2", "S3", "S4"].map(String::from));
        }
        if self.wants(Observable::GaussianFit) {
            for f in self.factor_names() {
                cols.push(format!("gauss_{f}"));
            }
        }
        cols
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RowLabel {
    Trial(usize),
    Mean,
    Std,
}

impl std::fmt::Display for RowLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowLabel::Trial(k) => write!(f, "{k}"),
            RowLabel::Mean => f.write_str("mean"),
            RowLabel::Std => f.write_str("std"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub label: RowLabel,
    pub time: f64,
    /// One value per column after `trial` and `time`.
    pub values: Vec<f64>,
}

/// All rows of a sweep: trial rows in `(trial, time)` order, then per-time
/// mean and standard deviation rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name).map(|i| i - 2)
    }

    pub fn trial_rows(&self, trial: usize) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.label == RowLabel::Trial(trial))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        let mut rec = Vec::with_capacity(self.columns.len());
        for row in &self.rows {
            rec.clear();
            rec.push(row.label.to_string());
            rec.push(row.time.to_string());
            rec.extend(row.values.iter().map(|v| v.to_string()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::InternalConsistency(e.to_string()))
    }
}

fn push_complex(values: &mut Vec<f64>, z: Complex64) {
    values.push(z.re);
    values.push(z.im);
}

fn trial_rows(cfg: &SweepConfig, psi: &PairState, trial: usize, times: &[f64]) -> Result<Vec<SweepRow>> {
    let env = cfg.environment(trial)?;
    let geometry = cfg.scenario.geometry();
    let angles = cfg.angle_set.angles();
    let bell = cfg.initial_state.bell_index();
    let rates: Vec<f64> = if cfg.wants(Observable::GaussianFit) {
        match &env {
            Environment::Separate { bath1, bath2 } => vec![
                gaussian_rate(bath1, FrequencySelector::Single)?,
                gaussian_rate(bath2, FrequencySelector::Single)?,
            ],
            Environment::Common(b) => [
                FrequencySelector::First,
                FrequencySelector::Second,
                FrequencySelector::Sum,
                FrequencySelector::Difference,
            ]
            .iter()
            .map(|&s| gaussian_rate(b, s))
            .collect::<Result<_>>()?,
        }
    } else {
        Vec::new()
    };

    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let f: DecoherenceFactors = factors_at(&env, t)?;
        let rho = match (f.r12_plus, f.r12_minus) {
            (Some(p), Some(m)) => rho_common_bath(psi, f.r1, f.r2, p, m)?,
            _ => rho_two_baths(psi, f.r1, f.r2)?,
        };
        let mut values = Vec::new();
        if cfg.wants(Observable::Factors) {
            push_complex(&mut values, f.r1);
            push_complex(&mut values, f.r2);
            if let (Some(p), Some(m)) = (f.r12_plus, f.r12_minus) {
                push_complex(&mut values, p);
                push_complex(&mut values, m);
            }
        }
        let need_c = cfg.wants(Observable::Concurrence) || cfg.wants(Observable::Entropy);
        let c = if need_c { concurrence(&rho)? } else { 0.0 };
        if cfg.wants(Observable::Concurrence) {
            values.push(c);
            if let Some(i) = bell {
                values.push(match (f.r12_plus, f.r12_minus) {
                    (Some(p), Some(m)) => concurrence_closed_common(i, p, m)?,
                    _ => concurrence_closed_two_baths(f.r1, f.r2),
                });
            }
        }
        if cfg.wants(Observable::Entropy) {
            values.push(entanglement_entropy_from_concurrence(c)?);
        }
        if cfg.wants(Observable::Chsh) {
            values.push(chsh_s(&angles, &rho)?);
            for i in 1..=4 {
                values.push(chsh_closed_form(i, geometry, &angles, &f)?);
            }
        }
        for &a in &rates {
            values.push((-a * t * t).exp());
        }
        rows.push(SweepRow {
            label: RowLabel::Trial(trial),
            time: t,
            values,
        });
    }
    Ok(rows)
}

/// Runs every trial of `cfg` and appends per-time ensemble statistics.
///
/// Trials run in parallel but their rows are assembled in trial order and
/// the statistics are summed in that order, so the output does not depend
/// on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let psi = cfg.initial_state.pair_state()?;
    let times = cfg.time_grid.points();
    let per_trial: Vec<Vec<SweepRow>> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|k| trial_rows(cfg, &psi, k, &times))
        .collect::<Result<_>>()?;

    let columns = cfg.columns();
    let width = columns.len() - 2;
    let n = cfg.n_trials as f64;
    let mut stats = Vec::with_capacity(2 * times.len());
    let mut std_rows = Vec::with_capacity(times.len());
    for (ti, &t) in times.iter().enumerate() {
        let mut mean = vec![0.0; width];
        for rows in &per_trial {
            for (m, v) in mean.iter_mut().zip(&rows[ti].values) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; width];
        if cfg.n_trials > 1 {
            for rows in &per_trial {
                for ((s, v), m) in var.iter_mut().zip(&rows[ti].values).zip(&mean) {
                    *s += (v - m) * (v - m);
                }
            }
            var.iter_mut().for_each(|s| *s /= n - 1.0);
        }
        stats.push(SweepRow {
            label: RowLabel::Mean,
            time: t,
            values: mean,
        });
        std_rows.push(SweepRow {
            label: RowLabel::Std,
            time: t,
            values: var.into_iter().map(f64::sqrt).collect(),
        });
    }
    let mut rows: Vec<SweepRow> = per_trial.into_iter().flatten().collect();
    rows.extend(stats);
    rows.extend(std_rows);
    Ok(SweepTable { columns, rows })
}

/// Sidecar path for a CSV output: `<out>.meta.toml`.
pub fn metadata_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.toml");
    PathBuf::from(s)
}

/// Structured-text record of the config, seed and column layout of a run.
pub fn metadata_toml(cfg: &SweepConfig, table: &SweepTable) -> Result<String> {
    let ensemble = if cfg.n_trials == 1 {
        "single-realization"
    } else {
        "ensemble"
    };
    let to_err = |e: toml::ser::Error| Error::InternalConsistency(e.to_string());
    let mut doc = toml::Table::new();
    doc.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    doc.insert("ensemble".into(), ensemble.into());
    doc.insert(
        "columns".into(),
        toml::Value::Array(table.columns.iter().map(|c| c.as_str().into()).collect()),
    );
    doc.insert("config".into(), toml::Value::try_from(cfg).map_err(to_err)?);
    toml::to_string(&doc).map_err(to_err)
}

/// Runs the sweep and writes the CSV and its metadata sidecar. Nothing is
/// written if the sweep fails.
pub fn run_sweep_to_file(cfg: &SweepConfig, out: &Path) -> Result<SweepTable> {
    let table = run_sweep(cfg)?;
    let csv = table.to_csv_string()?;
    let meta = metadata_toml(cfg, &table)?;
    std::fs::write(out, csv)?;
    std::fs::write(metadata_path(out), meta)?;
    Ok(table)
}
