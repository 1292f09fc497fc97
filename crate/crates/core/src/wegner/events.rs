//! Resonance events for a sampled spectrum. All comparisons are closed
//! (`dist <= eps`).

use crate::spectral::Spectrum;

use super::intervals::{fatten, Interval};

/// `dist(E, σ) <= eps`.
pub fn fixed_energy_event(spec: &Spectrum, energy: f64, eps: f64) -> bool {
    spec.dist(energy) <= eps
}

/// `∃ E ∈ I0 : dist(E, σ) <= eps`, i.e. some eigenvalue lies within `eps`
/// of the interval.
pub fn variable_energy_event(spec: &Spectrum, interval: &Interval, eps: f64) -> bool {
    // eigenvalues are sorted: only the neighbours of the interval matter
    let k = spec.count_below(interval.lo);
    let ev = spec.eigenvalues();
    let near = [k.checked_sub(1), Some(k)];
    near.into_iter().flatten().filter_map(|i| ev.get(i)).any(|&l| interval.dist(l) <= eps)
}

/// `∃ E ∈ I0` within `eps` of both spectra: the fattened spectra and the
/// interval have a common point.
pub fn two_volume_event(spec_x: &Spectrum, spec_y: &Spectrum, interval: &Interval, eps: f64) -> bool {
    if !(eps > 0.0) {
        // zero radius: a common eigenvalue inside the interval
        return spec_x.eigenvalues().iter().any(|&l| interval.contains(l) && spec_y.dist(l) == 0.0);
    }
    let (Ok(fx), Ok(fy)) = (fatten(spec_x, eps), fatten(spec_y, eps)) else {
        return false;
    };
    !fx.intersect_interval(interval).intersect(&fy).is_empty()
}
