//! Decay-rate fit of estimated resonance probabilities against `L^β`, and
//! the polynomial bound check `P <= L^{-q}` on Wilson upper limits.

use serde::Serialize;

use crate::error::{Error, Result};

use super::montecarlo::MCResult;

/// Upper confidence limit versus the polynomial bound at one `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolynomialCheck {
    pub l: u32,
    pub bound: f64,
    pub upper: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    /// `(L, p_hat)` for every input point.
    pub points: Vec<(u32, f64)>,
    /// Least-squares slope of `-ln p_hat` against `L^β`; `None` unless at
    /// least two points have `p_hat > 0` at distinct `L`.
    pub alpha_hat: Option<f64>,
    pub passes_polynomial: Vec<PolynomialCheck>,
}

impl DecayFit {
    pub fn all_pass(&self) -> bool {
        self.passes_polynomial.iter().all(|c| c.passes)
    }
}

pub fn decay_fit(points: &[(u32, MCResult)], beta: f64, q: f64) -> Result<DecayFit> {
    if points.len() < 2 {
        return Err(Error::Argument(format!("decay fit needs at least 2 points, got {}", points.len())));
    }
    let usable: Vec<(f64, f64)> =
        points.iter().filter(|(_, r)| r.p_hat > 0.0).map(|(l, r)| (f64::from(*l).powf(beta), -r.p_hat.ln())).collect();
    let alpha_hat = least_squares_slope(&usable);

    let passes_polynomial = points
        .iter()
        .map(|(l, r)| {
            let bound = f64::from(*l).powf(-q);
            PolynomialCheck { l: *l, bound, upper: r.ci95.hi, passes: r.ci95.hi <= bound }
        })
        .collect();

    Ok(DecayFit { points: points.iter().map(|(l, r)| (*l, r.p_hat)).collect(), alpha_hat, passes_polynomial })
}

fn least_squares_slope(xy: &[(f64, f64)]) -> Option<f64> {
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wegner::intervals::Interval;

    fn synthetic(l: u32, p: f64) -> (u32, MCResult) {
        let r = MCResult { trials: 1, successes: 0, p_hat: p, ci95: Interval { lo: p, hi: p } };
        (l, r)
    }

    #[test]
    fn exact_exponential_gives_exact_rate() {
        let beta = 0.5;
        let pts: Vec<_> =
            [4u32, 9, 16, 25].iter().map(|&l| synthetic(l, (-2.0 * f64::from(l).powf(beta)).exp())).collect();
        let fit = decay_fit(&pts, beta, 2.0).unwrap();
        assert!((fit.alpha_hat.unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn single_nonzero_point_has_no_rate() {
        let pts = vec![synthetic(8, 0.1), synthetic(16, 0.0)];
        let fit = decay_fit(&pts, 0.5, 1.0).unwrap();
        assert_eq!(fit.alpha_hat, None);
        assert_eq!(fit.passes_polynomial.len(), 2);
        assert!(decay_fit(&pts[..1], 0.5, 1.0).is_err());
    }

    #[test]
    fn zero_successes_pass_quadratic_bound() {
        let pts: Vec<_> = [8u32, 16, 32].iter().map(|&l| (l, MCResult::new(0, 10_000).unwrap())).collect();
        let fit = decay_fit(&pts, 0.5, 2.0).unwrap();
        assert_eq!(fit.alpha_hat, None);
        assert!(fit.all_pass());
        let last = fit.passes_polynomial[2];
        assert!((last.bound - 32f64.powi(-2)).abs() < 1e-18);
        assert!(last.upper < last.bound);
    }
}
