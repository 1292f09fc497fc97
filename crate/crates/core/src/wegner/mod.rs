//! Resonance events, perturbation thresholds, Monte Carlo estimation and
//! decay fits.

mod events;
mod fit;
mod intervals;
mod montecarlo;
mod perturbation;

pub use events::{fixed_energy_event, two_volume_event, variable_energy_event};
pub use fit::{decay_fit, DecayFit, PolynomialCheck};
pub use intervals::{fatten, Interval, IntervalUnion};
pub use montecarlo::{
    disjoint_offset, mc_estimate, origin_model, wilson_interval, EventKind, EventSpec, MCResult, ModelSpec, Z95,
};
pub use perturbation::{
    delta0, h_star, perturbation_check, Clause, PerturbationOutcome, PerturbationQuantities, RegimeParams,
};

use serde::{Deserialize, Serialize};

/// Scale and bound parameters shared by the resonance statements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WegnerParams {
    pub beta: f64,
    pub sigma: f64,
    #[serde(rename = "L0")]
    pub l0: u32,
    pub q: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
}

impl WegnerParams {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(crate::Error::Config(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.sigma > 0.0) {
            return Err(crate::Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.l0 == 0 {
            return Err(crate::Error::Config("L0 must be positive".into()));
        }
        if !(self.q > 0.0) {
            return Err(crate::Error::Config(format!("q must be positive, got {}", self.q)));
        }
        Ok(())
    }

    /// `e^{-σ L^β}`.
    pub fn resonance_width(&self, l: u32) -> f64 {
        (-self.sigma * f64::from(l).powf(self.beta)).exp()
    }
}
