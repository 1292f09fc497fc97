//! Experiment configuration and Monte Carlo campaigns.
//!
//! A campaign runs one resonance event for every `L` in `model.L_list` and
//! produces one [`ResultRow`] per `L`. The CSV written by
//! [`write_results_csv`] depends only on the configuration and the seed.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, interaction_sup_norm, InteractionSpec, SymMatrix};
use crate::lattice::{Cube, Site};
use crate::randomfield::{sample_field, validate, DistributionSpec};
use crate::wegner::{
    decay_fit, delta0, disjoint_offset, h_star, mc_estimate, DecayFit, EventKind, EventSpec, Interval, MCResult,
    ModelSpec, WegnerParams,
};

/// Version of the CSV column layout produced by [`write_results_csv`].
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub wegner: WegnerConfig,
    pub run: RunConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lyapunov: Option<LyapunovConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "L_list")]
    pub l_list: Vec<u32>,
    #[serde(default)]
    pub distribution: DistributionSpec,
    #[serde(default)]
    pub interaction: InteractionSpec,
    #[serde(default)]
    pub h: f64,
    /// Center of the first cube; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WegnerConfig {
    #[serde(flatten)]
    pub params: WegnerParams,
    #[serde(default)]
    pub interval: IntervalChoice,
}

/// How the energy interval `I0` around `E0` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalChoice {
    /// `[E0 - δ0, E0 + δ0]` with `δ0 = ½e^{-σ L0^β}` from the configured `L0`.
    #[default]
    Delta0,
    /// As `Delta0` but with `L0 = L` for each cube size.
    Delta0AtL,
    HalfWidth(f64),
    Explicit {
        lo: f64,
        hi: f64,
    },
}

impl IntervalChoice {
    pub fn resolve(&self, p: &WegnerParams, l: u32) -> Result<Interval> {
        match *self {
            IntervalChoice::Delta0 => Interval::centered(p.e0, delta0(p.sigma, p.l0, p.beta)),
            IntervalChoice::Delta0AtL => Interval::centered(p.e0, delta0(p.sigma, l, p.beta)),
            IntervalChoice::HalfWidth(w) => Interval::centered(p.e0, w),
            IntervalChoice::Explicit { lo, hi } => Interval::new(lo, hi),
        }
        .map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKindName {
    Fixed,
    Variable,
    TwoVolume,
}

impl EventKindName {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKindName::Fixed => "fixed",
            EventKindName::Variable => "variable",
            EventKindName::TwoVolume => "two_volume",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub event_kind: EventKindName,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one_worker")]
    pub workers: usize,
    /// Second-cube offset for two-volume runs (`n·d` integers); defaults to
    /// `2L+1` along the first coordinate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<i64>>,
}

fn one_worker() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConfig {
    pub energies: Vec<f64>,
    pub steps: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Check every constraint that can be checked before sampling.
    /// Returns advisory warnings (currently: `d != 1`).
    pub fn validate(&self) -> Result<Vec<String>> {
        let m = &self.model;
        if m.n == 0 || m.d == 0 {
            return Err(Error::Config("model.n and model.d must be positive".into()));
        }
        if m.l_list.is_empty() {
            return Err(Error::Config("model.L_list is empty".into()));
        }
        if m.l_list.contains(&0) {
            return Err(Error::Config("every L in model.L_list must be at least 1".into()));
        }
        if let Some(c) = &m.center {
            if c.len() != m.n * m.d {
                return Err(Error::Config(format!("model.center has {} components, expected {}", c.len(), m.n * m.d)));
            }
        }
        validate(&m.distribution)?;
        if !m.h.is_finite() {
            return Err(Error::Config("model.h must be finite".into()));
        }
        if let InteractionSpec::PairContact { amplitude, .. } = m.interaction {
            if !amplitude.is_finite() {
                return Err(Error::Config("interaction amplitude must be finite".into()));
            }
        }
        self.wegner.params.validate()?;
        for &l in &m.l_list {
            self.wegner.interval.resolve(&self.wegner.params, l)?;
        }
        if self.run.trials == 0 {
            return Err(Error::Config("run.trials must be at least 1".into()));
        }
        if let Some(off) = &self.run.offset {
            if off.len() != m.n * m.d {
                return Err(Error::Config(format!("run.offset has {} components, expected {}", off.len(), m.n * m.d)));
            }
        }
        if let Some(ly) = &self.lyapunov {
            if m.d != 1 {
                return Err(Error::Config("lyapunov runs require d = 1".into()));
            }
            if ly.steps < crate::transfer::MIN_STEPS {
                return Err(Error::Config(format!("lyapunov.steps must be at least {}", crate::transfer::MIN_STEPS)));
            }
        }
        let mut warnings = Vec::new();
        if m.d != 1 {
            warnings.push(format!("d = {} (the resonance bounds are stated for d = 1)", m.d));
        }
        Ok(warnings)
    }

    pub fn center(&self) -> Result<Site> {
        match &self.model.center {
            Some(c) => Site::new(self.model.n, self.model.d, c.clone()),
            None => Site::origin(self.model.n, self.model.d),
        }
    }

    pub fn cube(&self, l: u32) -> Result<Cube> {
        Ok(Cube::new(self.center()?, l))
    }

    /// The event evaluated for cube radius `l`.
    pub fn event_spec(&self, l: u32) -> Result<EventSpec> {
        let p = &self.wegner.params;
        let kind = match self.run.event_kind {
            EventKindName::Fixed => EventKind::Fixed { energy: p.e0 },
            EventKindName::Variable => EventKind::Variable { interval: self.wegner.interval.resolve(p, l)? },
            EventKindName::TwoVolume => EventKind::TwoVolume {
                interval: self.wegner.interval.resolve(p, l)?,
                offset: self.run.offset.clone().unwrap_or_else(|| disjoint_offset(self.model.n, self.model.d, l)),
            },
        };
        Ok(EventSpec {
            model: ModelSpec {
                cube: self.cube(l)?,
                distribution: self.model.distribution.clone(),
                interaction: self.model.interaction.clone(),
                h: self.model.h,
            },
            kind,
            eps: p.resonance_width(l),
        })
    }
}

/// One CSV row: a campaign at one cube radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub schema: u32,
    pub event_kind: &'static str,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "L")]
    pub l: u32,
    pub distribution: String,
    pub interaction: String,
    pub h: f64,
    pub h_star: f64,
    pub beta: f64,
    pub sigma: f64,
    #[serde(rename = "L0")]
    pub l0: u32,
    pub q: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    pub interval_lo: f64,
    pub interval_hi: f64,
    pub eps: f64,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Rows plus the non-deterministic bookkeeping kept out of the CSV.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub rows: Vec<ResultRow>,
    pub wall_times: Vec<Duration>,
    pub fit: Option<DecayFit>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Run the campaign. `seed` and `workers` override the config when given.
pub fn run(config: &ExperimentConfig, seed: Option<u64>, workers: Option<usize>) -> Result<RunReport> {
    let warnings = config.validate()?;
    let seed = seed.unwrap_or(config.run.seed);
    let workers = workers.unwrap_or(config.run.workers);
    let p = &config.wegner.params;

    // resolve everything first so a bad config produces no rows at all
    let events: Vec<(u32, EventSpec)> =
        config.model.l_list.iter().map(|&l| config.event_spec(l).map(|e| (l, e))).collect::<Result<_>>()?;
    for (_, e) in &events {
        e.validate()?;
    }

    let distribution = serde_json::to_string(&config.model.distribution)?;
    let interaction = serde_json::to_string(&config.model.interaction)?;
    let mut rows = Vec::with_capacity(events.len());
    let mut wall_times = Vec::with_capacity(events.len());
    let mut points = Vec::with_capacity(events.len());
    for (l, event) in events {
        let start = Instant::now();
        let r: MCResult = mc_estimate(&event, config.run.trials, seed, workers)?;
        wall_times.push(start.elapsed());
        let threshold = f64::from(l).powf(-p.q);
        let (lo, hi) = match &event.kind {
            EventKind::Fixed { energy } => (*energy, *energy),
            EventKind::Variable { interval } | EventKind::TwoVolume { interval, .. } => (interval.lo, interval.hi),
        };
        rows.push(ResultRow {
            schema: CSV_SCHEMA_VERSION,
            event_kind: config.run.event_kind.as_str(),
            n: config.model.n,
            d: config.model.d,
            l,
            distribution: distribution.clone(),
            interaction: interaction.clone(),
            h: config.model.h,
            h_star: h_star(interaction_sup_norm(&event.model.cube, &event.model.interaction), p.sigma, p.l0, p.beta),
            beta: p.beta,
            sigma: p.sigma,
            l0: p.l0,
            q: p.q,
            e0: p.e0,
            interval_lo: lo,
            interval_hi: hi,
            eps: event.eps,
            seed,
            trials: r.trials,
            successes: r.successes,
            p_hat: r.p_hat,
            ci_lo: r.ci95.lo,
            ci_hi: r.ci95.hi,
            threshold,
            pass: r.ci95.hi <= threshold,
        });
        points.push((l, r));
    }
    let fit = if points.len() >= 2 { Some(decay_fit(&points, p.beta, p.q)?) } else { None };
    Ok(RunReport { rows, wall_times, fit, warnings })
}

/// RFC-4180 CSV with a header row.
pub fn write_results_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// The Hamiltonian for the first `L` of the config, field trial 0.
pub fn dump_matrix(config: &ExperimentConfig, seed: Option<u64>) -> Result<SymMatrix> {
    config.validate()?;
    let l = config.model.l_list[0];
    let cube = config.cube(l)?;
    let points = cube.single_particle_points();
    let field =
        sample_field(&config.model.distribution, points.iter().map(Vec::as_slice), seed.unwrap_or(config.run.seed), 0)?;
    build_hamiltonian(&cube, &field, &config.model.interaction, config.model.h)
}
