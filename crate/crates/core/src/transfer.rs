//! One-dimensional transfer matrices and the top Lyapunov exponent.
//!
//! For `Hψ = Eψ` with `H = -Δ + V` on `Z`,
//! `ψ(x+1) = (2 + v(x) - E)ψ(x) - ψ(x-1)`, i.e.
//! `(ψ(x+1), ψ(x))ᵀ = T(E, v(x)) (ψ(x), ψ(x-1))ᵀ`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::randomfield::{draw, validate, DistributionSpec, Violation};

pub const MIN_STEPS: u64 = 1_000;
pub const BATCHES: u64 = 20;

/// `[[2 + v - E, -1], [1, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix([[f64; 2]; 2]);

impl TransferMatrix {
    pub fn new(energy: f64, v: f64) -> Self {
        Self([[2.0 + v - energy, -1.0], [1.0, 0.0]])
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.0
    }

    pub fn det(&self) -> f64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, u: [f64; 2]) -> [f64; 2] {
        let m = self.0;
        [m[0][0] * u[0] + m[0][1] * u[1], m[1][0] * u[0] + m[1][1] * u[1]]
    }

    /// Largest eigenvalue modulus; with unit determinant the eigenvalues
    /// solve `λ² - tλ + 1 = 0`.
    pub fn spectral_radius(&self) -> f64 {
        let t = self.0[0][0];
        let disc = t * t - 4.0;
        if disc <= 0.0 {
            1.0
        } else {
            0.5 * (t.abs() + disc.sqrt())
        }
    }
}

pub fn transfer_matrix(energy: f64, v: f64) -> TransferMatrix {
    TransferMatrix::new(energy, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub energy: f64,
    pub gamma_hat: f64,
    /// Standard error from batch means.
    pub stderr: f64,
    pub steps: u64,
}

/// Top Lyapunov exponent at `energy` from `steps` transfer matrices with
/// potential values `draw(spec, seed, trial, [x])`, `x = 0, 1, …`.
///
/// Point masses are accepted here (the distribution check is skipped for
/// the single-point clause only).
pub fn lyapunov(energy: f64, spec: &DistributionSpec, steps: u64, seed: u64, trial: u64) -> Result<LyapunovEstimate> {
    if steps < MIN_STEPS {
        return Err(Error::Argument(format!("lyapunov needs at least {MIN_STEPS} steps, got {steps}")));
    }
    match validate(spec) {
        Ok(()) | Err(Violation::SinglePointSupport) => {}
        Err(v) => return Err(v.into()),
    }

    let per_batch = steps / BATCHES;
    let mut u = [1.0f64, 0.0];
    let mut batch_means = Vec::with_capacity(BATCHES as usize);
    let mut total = 0.0;
    let mut x: i64 = 0;
    for b in 0..BATCHES {
        // the last batch absorbs the remainder
        let len = if b + 1 == BATCHES { steps - per_batch * (BATCHES - 1) } else { per_batch };
        let mut acc = 0.0;
        for _ in 0..len {
            let v = draw(spec, seed, trial, &[x]);
            x += 1;
            let w = TransferMatrix::new(energy, v).apply(u);
            let norm = w[0].hypot(w[1]);
            acc += norm.ln();
            u = [w[0] / norm, w[1] / norm];
        }
        total += acc;
        batch_means.push(acc / len as f64);
    }

    let gamma_hat = total / steps as f64;
    let k = batch_means.len() as f64;
    let mean = batch_means.iter().sum::<f64>() / k;
    let var = batch_means.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(LyapunovEstimate { energy, gamma_hat, stderr: (var / k).sqrt(), steps })
}

/// [`lyapunov`] at every energy, sharing the same potential sample.
pub fn lyapunov_sweep(
    energies: &[f64],
    spec: &DistributionSpec,
    steps: u64,
    seed: u64,
) -> Result<Vec<LyapunovEstimate>> {
    energies.iter().map(|&e| lyapunov(e, spec, steps, seed, 0)).collect()
}

/// CSV with header `E,gamma_hat,stderr`.
pub fn write_sweep_csv<W: Write>(rows: &[LyapunovEstimate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["E", "gamma_hat", "stderr"])?;
    for r in rows {
        w.write_record([r.energy.to_string(), r.gamma_hat.to_string(), r.stderr.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
