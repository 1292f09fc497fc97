//! Brute-force reference computations used by the self-check suites.
//!
//! Nothing here shares code with the paths it checks: distances are linear
//! scans over eigenvalues, events are decided on an energy grid, and
//! instances come from a small self-contained generator.

use crate::hamiltonian::{build_hamiltonian, InteractionSpec, SymMatrix};
use crate::lattice::{Cube, Site};
use crate::randomfield::{mix64, sample_field, unit_uniform, DistributionSpec};
use crate::wegner::Interval;

/// Deterministic stream of pseudo-random numbers for instance generation.
#[derive(Debug, Clone)]
pub struct InstanceRng(u64);

impl InstanceRng {
    pub fn new(seed: u64) -> Self {
        Self(mix64(seed ^ 0x5851_f42d_4c95_7f2d))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        mix64(self.0)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        unit_uniform(self.next_u64())
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// `min |λ - e|` by linear scan.
pub fn brute_dist(eigenvalues: &[f64], e: f64) -> f64 {
    eigenvalues.iter().map(|l| (l - e).abs()).fold(f64::INFINITY, f64::min)
}

/// Grid `lo, lo + step, …` over the interval, always including `hi`.
pub fn energy_grid(interval: &Interval, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let count = (interval.length() / step).floor() as usize;
    for k in 0..=count {
        grid.push(interval.lo + k as f64 * step);
    }
    if grid.last() != Some(&interval.hi) {
        grid.push(interval.hi);
    }
    grid
}

/// Outcome of a grid decision: `None` when some grid energy falls inside
/// the boundary band `|margin| <= band` and the instance is excluded.
pub type GridDecision = Option<bool>;

/// `∃ E on the grid: dist(E, σ) <= eps`.
pub fn grid_variable_event(eigenvalues: &[f64], interval: &Interval, eps: f64, step: f64, band: f64) -> GridDecision {
    let mut hit = false;
    for e in energy_grid(interval, step) {
        let margin = brute_dist(eigenvalues, e) - eps;
        if margin.abs() <= band {
            return None;
        }
        hit |= margin <= 0.0;
    }
    Some(hit)
}

/// `∃ E on the grid: max(dist(E, σx), dist(E, σy)) <= eps`.
pub fn grid_two_volume_event(
    x: &[f64],
    y: &[f64],
    interval: &Interval,
    eps: f64,
    step: f64,
    band: f64,
) -> GridDecision {
    let mut hit = false;
    for e in energy_grid(interval, step) {
        let margin = brute_dist(x, e).max(brute_dist(y, e)) - eps;
        if margin.abs() <= band {
            return None;
        }
        hit |= margin <= 0.0;
    }
    Some(hit)
}

/// `min_{E in I} dist(E, σ)`, exactly: the nearest eigenvalue clamped
/// into the interval.
pub fn exact_variable_margin(eigenvalues: &[f64], interval: &Interval) -> f64 {
    eigenvalues.iter().map(|&l| (l - l.clamp(interval.lo, interval.hi)).abs()).fold(f64::INFINITY, f64::min)
}

/// `min_{E in I} max(dist(E, σx), dist(E, σy))`, exactly. For one pair
/// `(a, b)` the inner function is convex in `E` with minimum at the
/// midpoint, so clamping the midpoint into `I` attains it.
pub fn exact_two_volume_margin(x: &[f64], y: &[f64], interval: &Interval) -> f64 {
    let mut best = f64::INFINITY;
    for &a in x {
        for &b in y {
            let e = (0.5 * (a + b)).clamp(interval.lo, interval.hi);
            best = best.min((e - a).abs().max((e - b).abs()));
        }
    }
    best
}

/// A random lattice Hamiltonian of dimension at most `max_dim`, with a
/// random geometry, disorder law, interaction and coupling.
pub fn random_hamiltonian(rng: &mut InstanceRng, max_dim: usize) -> SymMatrix {
    const SHAPES: [(usize, usize); 5] = [(1, 1), (2, 1), (1, 2), (3, 1), (2, 2)];
    loop {
        let (n, d) = SHAPES[rng.below(SHAPES.len() as u64) as usize];
        let l = 1 + rng.below(12) as u32;
        let cube = Cube::new(Site::origin(n, d).expect("positive shape"), l);
        if cube.site_count() > max_dim {
            continue;
        }
        let dist = if rng.below(2) == 0 {
            DistributionSpec::default()
        } else {
            DistributionSpec::Uniform { lo: -2.0, hi: 2.0 }
        };
        let inter = InteractionSpec::PairContact { range: rng.below(2) as u32, amplitude: rng.uniform(-1.0, 1.0) };
        let h = rng.uniform(-0.5, 0.5);
        let pts = cube.single_particle_points();
        let field = sample_field(&dist, pts.iter().map(Vec::as_slice), rng.next_u64(), 0).expect("valid distribution");
        return build_hamiltonian(&cube, &field, &inter, h).expect("field covers cube");
    }
}

/// A sorted synthetic spectrum of `1..=max_len` values in `[lo, hi]`.
pub fn random_spectrum(rng: &mut InstanceRng, max_len: u64, lo: f64, hi: f64) -> Vec<f64> {
    let len = 1 + rng.below(max_len);
    let mut v: Vec<f64> = (0..len).map(|_| rng.uniform(lo, hi)).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_ends() {
        let g = energy_grid(&Interval { lo: 0.0, hi: 1.0 }, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(energy_grid(&Interval::point(2.0), 0.1), vec![2.0]);
    }

    #[test]
    fn generator_respects_dimension_cap() {
        let mut rng = InstanceRng::new(3);
        for _ in 0..20 {
            assert!(random_hamiltonian(&mut rng, 200).dim() <= 200);
        }
    }

    #[test]
    fn band_excludes_grazing_instances() {
        // eigenvalue exactly eps away from the single grid point
        assert_eq!(grid_variable_event(&[1.5], &Interval::point(1.0), 0.5, 0.005, 1e-9), None);
        assert_eq!(grid_variable_event(&[1.5], &Interval::point(1.0), 0.6, 0.006, 1e-9), Some(true));
    }
}
