//! Monte Carlo estimation of resonance probabilities.
//!
//! Trial `t` samples the field with key `(seed, t)`, so the success count is
//! a pure function of the configuration and seed: each worker evaluates
//! whole trials and the reduction is an integer sum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, InteractionSpec};
use crate::lattice::{Cube, Site};
use crate::randomfield::{sample_field, validate, DistributionSpec};
use crate::spectral::spectrum_near;

use super::events::{fixed_energy_event, two_volume_event, variable_energy_event};
use super::intervals::Interval;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Estimated success probability with a Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCResult {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci95: Interval,
}

impl MCResult {
    pub fn new(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 || successes > trials {
            return Err(Error::Argument(format!("{successes} successes in {trials} trials")));
        }
        let p_hat = successes as f64 / trials as f64;
        Ok(Self { trials, successes, p_hat, ci95: wilson_interval(successes, trials, Z95) })
    }
}

/// Wilson score interval, clipped to `[0, 1]` and widened to contain the
/// point estimate.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Interval {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let mut lo = (center - half).max(0.0);
    let mut hi = (center + half).min(1.0);
    if successes == 0 {
        lo = 0.0;
    }
    if successes == trials {
        hi = 1.0;
    }
    Interval { lo: lo.min(p), hi: hi.max(p) }
}

/// Which resonance event a campaign estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Fixed {
        energy: f64,
    },
    Variable {
        interval: Interval,
    },
    /// The second cube is the first translated by `offset` (`n·d` integers).
    TwoVolume {
        interval: Interval,
        offset: Vec<i64>,
    },
}

/// A random Hamiltonian family on one cube.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub cube: Cube,
    pub distribution: DistributionSpec,
    pub interaction: InteractionSpec,
    pub h: f64,
}

/// Everything needed to evaluate one event per trial.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSpec {
    pub model: ModelSpec,
    pub kind: EventKind,
    pub eps: f64,
}

impl EventSpec {
    pub fn validate(&self) -> Result<()> {
        validate(&self.model.distribution)?;
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(Error::Config(format!("eps must be a non-negative finite number, got {}", self.eps)));
        }
        if !self.model.h.is_finite() {
            return Err(Error::Config("h must be finite".into()));
        }
        if let EventKind::TwoVolume { offset, .. } = &self.kind {
            let want = self.model.cube.n() * self.model.cube.d();
            if offset.len() != want {
                return Err(Error::Config(format!(
                    "two-volume offset has {} components, expected n·d = {want}",
                    offset.len()
                )));
            }
        }
        Ok(())
    }

    fn second_cube(&self) -> Result<Option<Cube>> {
        match &self.kind {
            EventKind::TwoVolume { offset, .. } => {
                let c = &self.model.cube;
                Ok(Some(Cube::new(c.center().translated(offset)?, c.radius())))
            }
            _ => Ok(None),
        }
    }

    fn window(&self) -> Interval {
        match &self.kind {
            EventKind::Fixed { energy } => Interval::point(*energy),
            EventKind::Variable { interval } | EventKind::TwoVolume { interval, .. } => *interval,
        }
    }

    /// Evaluate the event for one trial.
    pub fn evaluate(&self, seed: u64, trial: u64) -> Result<bool> {
        let m = &self.model;
        let second = self.second_cube()?;
        let mut points = m.cube.single_particle_points();
        if let Some(c2) = &second {
            points.extend(c2.single_particle_points());
            points.sort();
            points.dedup();
        }
        let field = sample_field(&m.distribution, points.iter().map(Vec::as_slice), seed, trial)?;
        let window = self.window();
        let spectrum_of = |cube: &Cube| {
            let a = build_hamiltonian(cube, &field, &m.interaction, m.h)?;
            spectrum_near(&a, window.lo, window.hi, self.eps)
        };
        let sx = spectrum_of(&m.cube)?;
        Ok(match &self.kind {
            EventKind::Fixed { energy } => fixed_energy_event(&sx, *energy, self.eps),
            EventKind::Variable { interval } => variable_energy_event(&sx, interval, self.eps),
            EventKind::TwoVolume { interval, .. } => {
                let sy = spectrum_of(second.as_ref().expect("two-volume event has a second cube"))?;
                two_volume_event(&sx, &sy, interval, self.eps)
            }
        })
    }
}

/// Default two-volume offset: `2L+1` along the first coordinate, making the
/// cubes disjoint.
pub fn disjoint_offset(n: usize, d: usize, radius: u32) -> Vec<i64> {
    let mut off = vec![0; n * d];
    off[0] = 2 * i64::from(radius) + 1;
    off
}

/// Estimate the event probability over `trials` independent fields.
/// `workers = 0` uses rayon's default pool size.
pub fn mc_estimate(event: &EventSpec, trials: u64, seed: u64, workers: usize) -> Result<MCResult> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    event.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let successes = pool.install(|| {
        (0..trials).into_par_iter().map(|t| event.evaluate(seed, t).map(u64::from)).try_reduce(|| 0, |a, b| Ok(a + b))
    })?;
    MCResult::new(successes, trials)
}

/// A model on the cube of radius `radius` centred at the origin.
pub fn origin_model(
    n: usize,
    d: usize,
    radius: u32,
    distribution: DistributionSpec,
    interaction: InteractionSpec,
    h: f64,
) -> Result<ModelSpec> {
    Ok(ModelSpec { cube: Cube::new(Site::origin(n, d)?, radius), distribution, interaction, h })
}
