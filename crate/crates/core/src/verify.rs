//! Self-check suites: each compares one computational path against an
//! independent reference and reports the worst deviation seen.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, InteractionSpec};
use crate::lattice::{Cube, Site};
use crate::oracle::{
    brute_dist, exact_two_volume_margin, exact_variable_margin, grid_two_volume_event, grid_variable_event,
    random_hamiltonian, random_spectrum, InstanceRng,
};
use crate::randomfield::{sample_field, DistributionSpec};
use crate::spectral::{dist_by_bisection, full_spectrum, resolvent_norm, smallest_singular_value, Spectrum};
use crate::tensor::{max_rank_deviation, particle_spectra, sumset_spectrum};
use crate::transfer::lyapunov;
use crate::wegner::{
    h_star, perturbation_check, two_volume_event, variable_energy_event, Interval, PerturbationOutcome, RegimeParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    Tensor,
    Dist,
    Resolvent,
    Events,
    Perturbation,
    Lyapunov,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Tensor, Suite::Dist, Suite::Resolvent, Suite::Events, Suite::Perturbation, Suite::Lyapunov];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Tensor => "tensor",
            Suite::Dist => "dist",
            Suite::Resolvent => "resolvent",
            Suite::Events => "events",
            Suite::Perturbation => "perturbation",
            Suite::Lyapunov => "lyapunov",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Argument(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Flip the sign of one hopping term in the directly assembled
    /// Hamiltonian of the tensor suite.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    /// Largest deviation observed, in the suite's own metric.
    pub worst: f64,
    pub tolerance: f64,
    pub note: String,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<13} {}  cases={} failures={} worst={:.3e} tol={:.1e}",
            self.suite.name(),
            if self.passed { "PASS" } else { "FAIL" },
            self.cases,
            self.failures,
            self.worst,
            self.tolerance
        )?;
        if !self.note.is_empty() {
            write!(f, "  ({})", self.note)?;
        }
        Ok(())
    }
}

pub fn verify(suites: &[Suite], opts: VerifyOptions) -> Result<Vec<SuiteReport>> {
    suites
        .iter()
        .map(|s| match s {
            Suite::Tensor => tensor_suite(opts),
            Suite::Dist => dist_suite(opts),
            Suite::Resolvent => resolvent_suite(opts),
            Suite::Events => events_suite(opts),
            Suite::Perturbation => perturbation_suite(opts),
            Suite::Lyapunov => lyapunov_suite(opts),
        })
        .collect()
}

fn report(suite: Suite, cases: usize, failures: usize, worst: f64, tolerance: f64, note: String) -> SuiteReport {
    SuiteReport { suite, passed: failures == 0, cases, failures, worst, tolerance, note }
}

fn tensor_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    const TOL: f64 = 1e-9;
    let mut worst: f64 = 0.0;
    let (mut cases, mut failures) = (0, 0);
    for l in 1..=6 {
        let cube = Cube::new(Site::origin(2, 1)?, l);
        let pts = cube.single_particle_points();
        for trial in 0..50 {
            let field = sample_field(&DistributionSpec::default(), pts.iter().map(Vec::as_slice), opts.seed, trial)?;
            let mut direct = build_hamiltonian(&cube, &field, &InteractionSpec::None, 0.0)?;
            if opts.inject_fault {
                let (i, j, v) = direct.upper()[0];
                direct.set(i, j, -v);
            }
            let direct = full_spectrum(&direct)?;
            let sums = sumset_spectrum(&particle_spectra(&cube, &field)?)?;
            let dev = max_rank_deviation(sums.sums(), &direct);
            worst = worst.max(dev);
            cases += 1;
            failures += usize::from(!(dev <= TOL));
        }
    }
    let note = if opts.inject_fault { "fault injected".to_string() } else { String::new() };
    Ok(report(Suite::Tensor, cases, failures, worst, TOL, note))
}

fn dist_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    const TOL: f64 = 1e-9;
    let mut rng = InstanceRng::new(opts.seed ^ 0xd157);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..100 {
        let a = random_hamiltonian(&mut rng, 200);
        let (lo, hi) = a.gershgorin();
        let e = rng.uniform(lo, hi);
        let dense = full_spectrum(&a)?;
        let dev = (dist_by_bisection(&a, e) - brute_dist(dense.eigenvalues(), e)).abs();
        worst = worst.max(dev);
        failures += usize::from(!(dev <= TOL));
    }
    Ok(report(Suite::Dist, 100, failures, worst, TOL, String::new()))
}

fn resolvent_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    const TOL: f64 = 1e-8;
    let mut rng = InstanceRng::new(opts.seed ^ 0x2e50);
    let mut worst: f64 = 0.0;
    let (mut cases, mut failures, mut resampled) = (0, 0, 0);
    while cases < 100 {
        let a = random_hamiltonian(&mut rng, 200);
        let (lo, hi) = a.gershgorin();
        let e = rng.uniform(lo, hi);
        let Some(g) = resolvent_norm(&a, e)? else {
            resampled += 1;
            continue;
        };
        let dev = (g * smallest_singular_value(&a, e)? - 1.0).abs();
        worst = worst.max(dev);
        cases += 1;
        failures += usize::from(!(dev <= TOL));
    }
    let note = if resampled > 0 { format!("{resampled} resonant energies resampled") } else { String::new() };
    Ok(report(Suite::Resolvent, cases, failures, worst, TOL, note))
}

fn random_event_instance(rng: &mut InstanceRng) -> (f64, Interval) {
    let eps = 10f64.powf(rng.uniform(-3.0, 0.0));
    let lo = rng.uniform(-1.0, 11.0);
    let width = if rng.below(4) == 0 { 0.0 } else { rng.uniform(0.0, 2.0) };
    (eps, Interval { lo, hi: lo + width })
}

#[derive(Debug, Default)]
struct EventTally {
    failures: usize,
    excluded: usize,
    /// Disagreements where the grid misses a feasible set that is non-empty
    /// but shorter than one grid step.
    below_resolution: usize,
}

impl EventTally {
    fn record(&mut self, got: bool, want: bool, exact_margin: f64, eps: f64) {
        if got != want {
            self.failures += 1;
            if got && exact_margin <= eps && 2.0 * (eps - exact_margin) < eps / 100.0 {
                self.below_resolution += 1;
            }
        }
    }
}

fn event_tally(seed: u64) -> Result<EventTally> {
    let mut rng = InstanceRng::new(seed ^ 0xe7e7);
    let mut tally = EventTally::default();
    for _ in 0..1000 {
        let spec = random_spectrum(&mut rng, 30, 0.0, 10.0);
        let (eps, i0) = random_event_instance(&mut rng);
        match grid_variable_event(&spec, &i0, eps, eps / 100.0, 1e-6 * eps) {
            None => tally.excluded += 1,
            Some(want) => {
                let got = variable_energy_event(&Spectrum::new(spec.clone())?, &i0, eps);
                tally.record(got, want, exact_variable_margin(&spec, &i0), eps);
            }
        }
    }
    for _ in 0..1000 {
        let x = random_spectrum(&mut rng, 30, 0.0, 10.0);
        let y = random_spectrum(&mut rng, 30, 0.0, 10.0);
        let (eps, i0) = random_event_instance(&mut rng);
        match grid_two_volume_event(&x, &y, &i0, eps, eps / 100.0, 1e-6 * eps) {
            None => tally.excluded += 1,
            Some(want) => {
                let got = two_volume_event(&Spectrum::new(x.clone())?, &Spectrum::new(y.clone())?, &i0, eps);
                tally.record(got, want, exact_two_volume_margin(&x, &y, &i0), eps);
            }
        }
    }
    Ok(tally)
}

fn events_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    let t = event_tally(opts.seed)?;
    let mut note = format!("{} boundary instances excluded", t.excluded);
    if t.below_resolution > 0 {
        note.push_str(&format!("; {} disagreements below grid resolution", t.below_resolution));
    }
    Ok(report(Suite::Events, 2000 - t.excluded, t.failures, t.failures as f64, 0.0, note))
}

fn perturbation_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    let regime = RegimeParams { sigma: 1.0, beta: 0.5, l0: 3 };
    let inter = InteractionSpec::PairContact { range: 0, amplitude: 1.0 };
    let cube = Cube::new(Site::origin(2, 1)?, 3);
    let pts = cube.single_particle_points();
    let hs = h_star(crate::hamiltonian::interaction_sup_norm(&cube, &inter), regime.sigma, regime.l0, regime.beta);
    let mut rng = InstanceRng::new(opts.seed ^ 0x9e47);
    let (mut failures, mut skipped) = (0, 0);
    let mut first_failure = String::new();
    let mut worst_ratio: f64 = 0.0;
    for trial in 0..1000u64 {
        let field = sample_field(&DistributionSpec::default(), pts.iter().map(Vec::as_slice), opts.seed, trial)?;
        let h = if trial % 2 == 0 { 0.9 * hs } else { -0.9 * hs };
        let e = rng.uniform(0.0, 10.0);
        match perturbation_check(&cube, &field, &inter, h, e, regime)? {
            PerturbationOutcome::Pass(q) => {
                // eigenvalue shift relative to the Weyl bound |h|·‖U‖
                let shift = (q.dist_free - q.dist_interacting).abs();
                worst_ratio = worst_ratio.max(shift / (h.abs() * q.u_norm));
            }
            PerturbationOutcome::Skipped(_) => skipped += 1,
            PerturbationOutcome::Counterexample { clause, quantities } => {
                if failures == 0 {
                    first_failure = format!("{clause:?}: {quantities:?}");
                }
                failures += 1;
            }
        }
    }
    let mut note = format!("{skipped} skipped; worst shift/(|h|·‖U‖) = {worst_ratio:.3}");
    if !first_failure.is_empty() {
        note.push_str("; first counterexample ");
        note.push_str(&first_failure);
    }
    Ok(report(Suite::Perturbation, 1000 - skipped, failures, worst_ratio, 1.0, note))
}

fn lyapunov_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    const TOL: f64 = 5e-3;
    let zero = DistributionSpec::point_mass(0.0);
    let outside = lyapunov(5.0, &zero, 1_000_000, opts.seed, 0)?;
    let center = lyapunov(2.0, &zero, 1_000_000, opts.seed, 0)?;
    let random = lyapunov(2.5, &DistributionSpec::default(), 1_000_000, opts.seed, 0)?;
    let exact = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    let dev_out = (outside.gamma_hat - exact).abs();
    let dev_center = center.gamma_hat.abs();
    let positive = random.gamma_hat - 2.0 * random.stderr > 0.0;
    let failures = usize::from(!(dev_out <= TOL)) + usize::from(!(dev_center <= TOL)) + usize::from(!positive);
    let note = format!(
        "γ(5)={:.5}, γ(2)={:.2e}, bernoulli γ(2.5)={:.4}±{:.1e}",
        outside.gamma_hat, center.gamma_hat, random.gamma_hat, random.stderr
    );
    Ok(report(Suite::Lyapunov, 3, failures, dev_out.max(dev_center), TOL, note))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn injected_fault_breaks_tensor_suite() {
        let clean = verify(&[Suite::Tensor], VerifyOptions::default()).unwrap();
        assert!(clean[0].passed, "{}", clean[0]);
        let broken = verify(&[Suite::Tensor], VerifyOptions { seed: 0, inject_fault: true }).unwrap();
        assert!(!broken[0].passed);
    }

    #[test]
    fn grid_disagreements_are_below_resolution() {
        for seed in 0..3 {
            let t = event_tally(seed).unwrap();
            assert_eq!(t.failures, t.below_resolution, "seed {seed}: {t:?}");
        }
    }

    #[test]
    fn events_match_exact_margins() {
        let mut rng = InstanceRng::new(77);
        for _ in 0..2000 {
            let x = random_spectrum(&mut rng, 30, 0.0, 10.0);
            let y = random_spectrum(&mut rng, 30, 0.0, 10.0);
            let (eps, i0) = random_event_instance(&mut rng);
            let (sx, sy) = (Spectrum::new(x.clone()).unwrap(), Spectrum::new(y.clone()).unwrap());
            let m = exact_variable_margin(&x, &i0);
            if (m - eps).abs() > 1e-12 * eps {
                assert_eq!(variable_energy_event(&sx, &i0, eps), m <= eps);
            }
            let m = exact_two_volume_margin(&x, &y, &i0);
            if (m - eps).abs() > 1e-12 * eps {
                assert_eq!(two_volume_event(&sx, &sy, &i0, eps), m <= eps);
            }
        }
    }
}
