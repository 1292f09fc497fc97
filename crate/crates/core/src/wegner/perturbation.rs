//! Weak-interaction thresholds and the resolvent-perturbation check.
//!
//! For `|h| < h*` with `h* = 1 / (2‖U‖ e^{σ L0^β})` the interaction moves no
//! eigenvalue by more than `½ e^{-σ L0^β}`, so an energy that is
//! `e^{-σ L0^β}`-far from the non-interacting spectrum stays at least half
//! that far from the interacting one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, interaction_sup_norm, InteractionSpec};
use crate::lattice::Cube;
use crate::randomfield::FieldSample;
use crate::spectral::{full_spectrum, resolvent_from_dist};

/// Relative slack for the floating-point evaluation of the norm inequality.
const NORM_INEQUALITY_SLACK: f64 = 1e-9;

/// `1 / (2 · u_norm · e^{σ L0^β})`; infinite without interaction.
pub fn h_star(u_norm: f64, sigma: f64, l0: u32, beta: f64) -> f64 {
    if u_norm == 0.0 {
        return f64::INFINITY;
    }
    1.0 / (2.0 * u_norm * (sigma * f64::from(l0).powf(beta)).exp())
}

/// `½ e^{-σ L0^β}`.
pub fn delta0(sigma: f64, l0: u32, beta: f64) -> f64 {
    0.5 * (-sigma * f64::from(l0).powf(beta)).exp()
}

/// Everything computed for one perturbation instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationQuantities {
    pub h: f64,
    pub energy: f64,
    pub u_norm: f64,
    pub h_star: f64,
    /// `e^{-σ L0^β}`
    pub threshold: f64,
    pub dist_free: f64,
    pub dist_interacting: f64,
    pub resolvent_free: Option<f64>,
    pub resolvent_interacting: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    /// `‖G_h‖ <= ‖G_0‖ + |h|‖U‖‖G_0‖‖G_h‖`
    NormInequality,
    /// `dist(E, σ(H_0)) > e^{-σL0^β} ⇒ dist(E, σ(H_h)) >= ½e^{-σL0^β}`
    StabilityImplication,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PerturbationOutcome {
    Pass(PerturbationQuantities),
    Counterexample {
        clause: Clause,
        quantities: PerturbationQuantities,
    },
    /// A resolvent does not exist at `E`; the instance is not checked.
    Skipped(PerturbationQuantities),
}

impl PerturbationOutcome {
    pub fn quantities(&self) -> &PerturbationQuantities {
        match self {
            PerturbationOutcome::Pass(q)
            | PerturbationOutcome::Counterexample { quantities: q, .. }
            | PerturbationOutcome::Skipped(q) => q,
        }
    }

    pub fn is_counterexample(&self) -> bool {
        matches!(self, PerturbationOutcome::Counterexample { .. })
    }
}

/// Parameters of the weak-interaction regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    pub sigma: f64,
    pub beta: f64,
    pub l0: u32,
}

/// Check both clauses on one sampled instance. `|h|` must be below
/// `h*(‖U‖_cube, σ, L0, β)`.
pub fn perturbation_check(
    cube: &Cube,
    field: &FieldSample,
    inter: &InteractionSpec,
    h: f64,
    energy: f64,
    regime: RegimeParams,
) -> Result<PerturbationOutcome> {
    let u_norm = interaction_sup_norm(cube, inter);
    let hs = h_star(u_norm, regime.sigma, regime.l0, regime.beta);
    if !(h.abs() < hs) {
        return Err(Error::Argument(format!("|h| = {} is not below h* = {hs}", h.abs())));
    }
    let threshold = (-regime.sigma * f64::from(regime.l0).powf(regime.beta)).exp();

    let free = build_hamiltonian(cube, field, inter, 0.0)?;
    let interacting = build_hamiltonian(cube, field, inter, h)?;
    let dist_free = full_spectrum(&free)?.dist(energy);
    let dist_interacting = full_spectrum(&interacting)?.dist(energy);
    let resolvent_free = resolvent_from_dist(&free, dist_free);
    let resolvent_interacting = resolvent_from_dist(&interacting, dist_interacting);

    let quantities = PerturbationQuantities {
        h,
        energy,
        u_norm,
        h_star: hs,
        threshold,
        dist_free,
        dist_interacting,
        resolvent_free,
        resolvent_interacting,
    };

    let (Some(g0), Some(gh)) = (resolvent_free, resolvent_interacting) else {
        return Ok(PerturbationOutcome::Skipped(quantities));
    };

    let rhs = g0 + h.abs() * u_norm * g0 * gh;
    if gh > rhs * (1.0 + NORM_INEQUALITY_SLACK) {
        return Ok(PerturbationOutcome::Counterexample { clause: Clause::NormInequality, quantities });
    }
    if dist_free > threshold && dist_interacting < 0.5 * threshold {
        return Ok(PerturbationOutcome::Counterexample { clause: Clause::StabilityImplication, quantities });
    }
    Ok(PerturbationOutcome::Pass(quantities))
}
