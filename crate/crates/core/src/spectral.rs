//! Spectra, eigenvalue counting by inertia, distance to the spectrum and
//! resolvent norms.
//!
//! Small matrices (up to [`DENSE_LIMIT`]) are diagonalized densely. Larger
//! ones are handled through [`count_below`], which reduces the band matrix
//! to tridiagonal form, factors `T - E·I = LDLᵀ` and counts negative pivots
//! (Sylvester's law of inertia).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SymMatrix;

/// Largest dimension handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 4096;

/// Bracket width at which eigenvalue bisection stops. Applied as an absolute
/// width, so it is a relative width of at most 1e-10 whenever `|λ| >= 1` and
/// the returned midpoint stays within 5e-11 of the eigenvalue at any scale
/// (down to the spacing of doubles).
pub const BISECTION_TOL: f64 = 1e-10;

const PIVOT_GUARD: f64 = 1e-14;
const PIVOT_SHIFT: f64 = 1e-12;
const MAX_SHIFT_RETRIES: u32 = 64;

/// Sorted eigenvalues of a symmetric matrix, or a sorted subset of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Sorts the input; NaNs are rejected.
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.iter().any(|v| v.is_nan()) {
            return Err(Error::Argument("NaN eigenvalue".into()));
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    /// Number of eigenvalues strictly below `e`.
    pub fn count_below(&self, e: f64) -> usize {
        self.eigenvalues.partition_point(|&v| v < e)
    }

    /// `min |λ - e|`; infinite for an empty spectrum.
    pub fn dist(&self, e: f64) -> f64 {
        let k = self.count_below(e);
        let below = k.checked_sub(1).map(|i| e - self.eigenvalues[i]);
        let above = self.eigenvalues.get(k).map(|v| v - e);
        match (below, above) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => f64::INFINITY,
        }
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.eigenvalues
    }
}

/// All eigenvalues of `a`, ascending.
pub fn full_spectrum(a: &SymMatrix) -> Result<Spectrum> {
    if a.dim() > DENSE_LIMIT {
        return Err(Error::Capacity { dim: a.dim(), limit: DENSE_LIMIT });
    }
    let eig = nalgebra::SymmetricEigen::new(a.to_dense());
    Spectrum::new(eig.eigenvalues.iter().copied().collect())
}

/// Result of an inertia count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inertia {
    /// Eigenvalues strictly below the (possibly shifted) energy.
    pub count: usize,
    /// Total micro-shift added to the energy after near-zero pivots.
    pub shift: f64,
}

/// Number of eigenvalues of `a` strictly below `e`.
///
/// When a pivot of the factorization is below `1e-14·(1+‖A‖∞)` the count is
/// redone at `e + 1e-12·(1+‖A‖∞)`; the accumulated shift is reported.
/// For repeated counts on one matrix use [`InertiaCounter`].
pub fn count_below(a: &SymMatrix, e: f64) -> Inertia {
    InertiaCounter::new(a).count_below(e)
}

/// Eigenvalue counter for one matrix.
///
/// The band matrix is first reduced to a tridiagonal `T = QᵀAQ` by Givens
/// rotations with bulge chasing, once, in `O(n²b)`. Each count then factors
/// `T - E·I = LDLᵀ` in `O(n)`; since `A - E·I = (QL) D (QL)ᵀ`, the negative
/// pivots of `D` count the eigenvalues of `A` below `E`. Unlike `LDLᵀ` on
/// the band itself this is backward stable: no pivot growth can flip a sign.
#[derive(Debug, Clone)]
pub struct InertiaCounter {
    diag: Vec<f64>,
    /// Squared off-diagonal of the tridiagonal form.
    off_sq: Vec<f64>,
    scale: f64,
}

impl InertiaCounter {
    pub fn new(a: &SymMatrix) -> Self {
        let (diag, off) = BandWork::new(a).tridiagonalize();
        Self { diag, off_sq: off.iter().map(|x| x * x).collect(), scale: 1.0 + a.inf_norm() }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn count_below(&self, e: f64) -> Inertia {
        let mut shift = 0.0;
        for _ in 0..MAX_SHIFT_RETRIES {
            if let Some(count) = self.negative_pivots(e + shift, PIVOT_GUARD * self.scale) {
                return Inertia { count, shift };
            }
            shift += PIVOT_SHIFT * self.scale;
        }
        // every retry hit a tiny pivot; accept the last factorization as is
        let count = self.negative_pivots(e + shift, 0.0).unwrap_or(0);
        Inertia { count, shift }
    }

    /// Negative pivots of `T - e·I`, or `None` when a pivot is smaller than
    /// `guard` in magnitude.
    fn negative_pivots(&self, e: f64, guard: f64) -> Option<usize> {
        let mut negatives = 0;
        let mut piv = 1.0;
        for (i, d) in self.diag.iter().enumerate() {
            piv = d - e - if i > 0 { self.off_sq[i - 1] / piv } else { 0.0 };
            if piv.abs() < guard || !piv.is_finite() {
                return None;
            }
            negatives += usize::from(piv < 0.0);
        }
        Some(negatives)
    }
}

/// Lower band storage with one extra diagonal for the bulge created while
/// reducing to tridiagonal form. Entry `(i, j)`, `0 <= i - j <= w`, lives at
/// `data[i * (w + 1) + (i - j)]`.
struct BandWork {
    n: usize,
    b: usize,
    w: usize,
    data: Vec<f64>,
}

impl BandWork {
    fn new(a: &SymMatrix) -> Self {
        let n = a.dim();
        let b = a.bandwidth();
        let w = b + 1;
        let mut m = Self { n, b, w, data: vec![0.0; n * (w + 1)] };
        for (i, d) in a.diag().iter().enumerate() {
            m.set(i, i, *d);
        }
        for &(i, j, v) in a.upper() {
            m.set(j, i, v);
        }
        m
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.w {
            return 0.0;
        }
        self.data[i * (self.w + 1) + (i - j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.w {
            debug_assert!(v == 0.0, "fill outside the band at ({i}, {j})");
            return;
        }
        self.data[i * (self.w + 1) + (i - j)] = v;
    }

    /// Apply the rotation in plane `(p, p+1)` that zeroes entry `(p+1, col)`.
    fn annihilate(&mut self, p: usize, col: usize) {
        let q = p + 1;
        let (x, y) = (self.get(p, col), self.get(q, col));
        let r = x.hypot(y);
        if r == 0.0 {
            return;
        }
        let (c, s) = (x / r, y / r);
        let lo = p.saturating_sub(self.w);
        let hi = (q + self.w).min(self.n - 1);
        for m in lo..=hi {
            if m == p || m == q {
                continue;
            }
            let (a, b) = (self.get(p, m), self.get(q, m));
            self.set(p, m, c * a + s * b);
            self.set(q, m, c * b - s * a);
        }
        let (app, apq, aqq) = (self.get(p, p), self.get(p, q), self.get(q, q));
        self.set(p, p, c * c * app + 2.0 * c * s * apq + s * s * aqq);
        self.set(q, q, s * s * app - 2.0 * c * s * apq + c * c * aqq);
        self.set(p, q, c * s * (aqq - app) + (c * c - s * s) * apq);
        self.set(q, col, 0.0);
    }

    /// Diagonal and sub-diagonal of an orthogonally similar tridiagonal.
    fn tridiagonalize(mut self) -> (Vec<f64>, Vec<f64>) {
        let (n, b) = (self.n, self.b);
        for k in 0..n.saturating_sub(2) {
            for r in (2..=b).rev() {
                let q = k + r;
                if q >= n || self.get(q, k) == 0.0 {
                    continue;
                }
                self.annihilate(q - 1, k);
                // the rotation leaves one entry just outside the band at
                // (q + b, q - 1); chase it off the bottom of the matrix
                let (mut i, mut j) = (q + b, q - 1);
                while i < n && self.get(i, j) != 0.0 {
                    self.annihilate(i - 1, j);
                    j = i - 1;
                    i += b;
                }
            }
        }
        let diag = (0..n).map(|i| self.get(i, i)).collect();
        let off = (1..n).map(|i| self.get(i, i - 1)).collect();
        (diag, off)
    }
}

/// Distance from `e` to the spectrum of `a`: dense for small matrices,
/// inertia bisection otherwise.
pub fn dist_to_spectrum(a: &SymMatrix, e: f64) -> Result<f64> {
    if a.dim() <= DENSE_LIMIT {
        Ok(full_spectrum(a)?.dist(e))
    } else {
        Ok(dist_by_bisection(a, e))
    }
}

/// Locate the `k`-th smallest eigenvalue (1-based) in `[lo, hi]` by
/// bisection on [`count_below`]. Requires `count_below(lo) < k <= count_below(hi)`.
fn bisect_kth(counter: &InertiaCounter, k: usize, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        let width_ok = hi - lo <= BISECTION_TOL;
        if width_ok || mid <= lo || mid >= hi {
            return mid;
        }
        if counter.count_below(mid).count >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Padded Gershgorin interval, strictly containing the spectrum.
fn enclosing_interval(a: &SymMatrix) -> (f64, f64) {
    let (lo, hi) = a.gershgorin();
    let pad = 1e-8 * (1.0 + a.inf_norm());
    (lo - pad, hi + pad)
}

/// [`dist_to_spectrum`] through inertia bisection only.
pub fn dist_by_bisection(a: &SymMatrix, e: f64) -> f64 {
    let (glo, ghi) = enclosing_interval(a);
    let counter = InertiaCounter::new(a);
    if e <= glo {
        return bisect_kth(&counter, 1, glo, ghi) - e;
    }
    if e >= ghi {
        return e - bisect_kth(&counter, a.dim(), glo, ghi);
    }
    let k = counter.count_below(e).count;
    let below = (k > 0).then(|| e - bisect_kth(&counter, k, glo, e));
    let above = (k < a.dim()).then(|| bisect_kth(&counter, k + 1, e, ghi) - e);
    match (below, above) {
        (Some(x), Some(y)) => x.min(y).max(0.0),
        (Some(x), None) => x.max(0.0),
        (None, Some(y)) => y.max(0.0),
        (None, None) => f64::INFINITY,
    }
}

/// Eigenvalues inside `[lo, hi]` found by bisection, each to
/// [`BISECTION_TOL`].
pub fn eigenvalues_in_window(a: &SymMatrix, lo: f64, hi: f64) -> Result<Spectrum> {
    if lo > hi {
        return Err(Error::Argument(format!("empty window [{lo}, {hi}]")));
    }
    let (glo, ghi) = enclosing_interval(a);
    let lo = lo.max(glo);
    let hi = hi.min(ghi);
    if lo > hi {
        return Spectrum::new(Vec::new());
    }
    let counter = InertiaCounter::new(a);
    let below_lo = counter.count_below(lo).count;
    // eigenvalues equal to hi are included
    let up_to_hi = counter.count_below(next_up(hi)).count;
    let found = (below_lo + 1..=up_to_hi).map(|k| bisect_kth(&counter, k, lo, next_up(hi)).clamp(lo, hi)).collect();
    Spectrum::new(found)
}

/// Eigenvalues needed to decide any event within `eps` of `[lo, hi]`:
/// the whole spectrum for small matrices, a bisected window otherwise.
pub fn spectrum_near(a: &SymMatrix, lo: f64, hi: f64, eps: f64) -> Result<Spectrum> {
    if a.dim() <= DENSE_LIMIT {
        full_spectrum(a)
    } else {
        eigenvalues_in_window(a, lo - eps, hi + eps)
    }
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

/// `‖(A - E)⁻¹‖ = 1/dist(E, σ(A))`, or `None` when `E` is (numerically) an
/// eigenvalue.
pub fn resolvent_norm(a: &SymMatrix, e: f64) -> Result<Option<f64>> {
    let dist = dist_to_spectrum(a, e)?;
    Ok(resolvent_from_dist(a, dist))
}

pub(crate) fn resolvent_from_dist(a: &SymMatrix, dist: f64) -> Option<f64> {
    let floor = 4.0 * f64::EPSILON * (1.0 + a.inf_norm());
    (dist > floor).then(|| 1.0 / dist)
}

/// Smallest singular value of `A - E·I` from a dense SVD. Independent of
/// the eigenvalue path; used to check [`resolvent_norm`].
pub fn smallest_singular_value(a: &SymMatrix, e: f64) -> Result<f64> {
    if a.dim() > DENSE_LIMIT {
        return Err(Error::Capacity { dim: a.dim(), limit: DENSE_LIMIT });
    }
    let mut m = a.to_dense();
    for i in 0..a.dim() {
        m[(i, i)] -= e;
    }
    let sv = m.singular_values();
    Ok(sv.iter().copied().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hamiltonian, InteractionSpec};
    use crate::lattice::{Cube, Site};
    use crate::randomfield::{sample_field, DistributionSpec};

    fn path3() -> SymMatrix {
        SymMatrix::from_dense(&[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]).unwrap()
    }

    fn random_hamiltonian(n: usize, d: usize, l: u32, seed: u64) -> SymMatrix {
        let c = Cube::new(Site::origin(n, d).unwrap(), l);
        let pts = c.single_particle_points();
        let spec = DistributionSpec::Uniform { lo: -2.0, hi: 2.0 };
        let f = sample_field(&spec, pts.iter().map(Vec::as_slice), seed, 0).unwrap();
        build_hamiltonian(&c, &f, &InteractionSpec::PairContact { range: 0, amplitude: 1.0 }, 0.3).unwrap()
    }

    #[test]
    fn small_closed_forms() {
        let s = full_spectrum(&SymMatrix::diagonal(vec![3.0, 1.0]).unwrap()).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 3.0]);

        let s = full_spectrum(&path3()).unwrap();
        let r2 = 2f64.sqrt();
        for (got, want) in s.eigenvalues().iter().zip([2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((got - want).abs() < 1e-10);
        }
        // independent closed form 2 - 2cos(kπ/4)
        for (k, got) in s.eigenvalues().iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 4.0).cos();
            assert!((got - want).abs() < 1e-10);
        }

        let s = full_spectrum(&SymMatrix::from_dense(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap()).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-12);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_limit_is_enforced() {
        let m = SymMatrix::diagonal(vec![0.0; DENSE_LIMIT + 1]).unwrap();
        assert!(matches!(full_spectrum(&m), Err(Error::Capacity { .. })));
    }

    #[test]
    fn counting_examples() {
        let m = SymMatrix::diagonal(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(count_below(&m, 1.5).count, 2);
        let a = random_hamiltonian(2, 1, 2, 1);
        let (lo, _) = a.gershgorin();
        assert_eq!(count_below(&a, lo - 1e-3).count, 0);
    }

    #[test]
    fn tiny_pivot_triggers_deterministic_shift() {
        // E exactly on the first pivot
        let m = SymMatrix::diagonal(vec![1.0, 2.0]).unwrap();
        let got = count_below(&m, 1.0);
        assert!(got.shift > 0.0);
        assert_eq!(got.count, 1);
        assert_eq!(count_below(&m, 1.0), got);
    }

    #[test]
    fn count_matches_dense_on_random_hamiltonian() {
        // 7x7 two-particle cube: dim 49; 1x1 with d=2, L=3: also 49
        for (seed, (n, d, l)) in [(2, 1, 3), (1, 2, 3), (1, 1, 24)].into_iter().enumerate() {
            let a = random_hamiltonian(n, d, l, seed as u64);
            let s = full_spectrum(&a).unwrap();
            let (lo, hi) = a.gershgorin();
            for k in 0..200 {
                let e = lo + (hi - lo) * (k as f64 + 0.5) / 200.0;
                assert_eq!(count_below(&a, e).count, s.count_below(e), "E={e}");
            }
        }
    }

    #[test]
    fn counts_are_exact_next_to_bernoulli_degeneracies() {
        // Bernoulli fields on 2-d cubes have exact, repeated eigenvalues that
        // make leading minors of A - E·I nearly singular for E close to them
        let spec = DistributionSpec::Bernoulli { p: 0.5, lo: 0.0, hi: 1.0 };
        for (l, seed) in [(1, 0), (1, 5), (2, 1), (2, 2), (3, 3)] {
            let c = Cube::new(Site::origin(1, 2).unwrap(), l);
            let pts = c.single_particle_points();
            let f = sample_field(&spec, pts.iter().map(Vec::as_slice), seed, 0).unwrap();
            let a = build_hamiltonian(&c, &f, &InteractionSpec::None, 0.0).unwrap();
            let s = full_spectrum(&a).unwrap();
            let counter = InertiaCounter::new(&a);
            for &lam in s.eigenvalues() {
                for t in [-1e-8, -1e-9, -3e-10, 3e-10, 1e-9, 1e-8] {
                    let e = lam + t;
                    if s.dist(e) < 1e-10 {
                        continue;
                    }
                    assert_eq!(counter.count_below(e).count, s.count_below(e), "L={l} seed={seed} E={e}");
                }
            }
        }
    }

    #[test]
    fn distance_examples() {
        let m = SymMatrix::diagonal(vec![1.0, 3.0]).unwrap();
        assert_eq!(dist_to_spectrum(&m, 2.0).unwrap(), 1.0);
        assert_eq!(dist_to_spectrum(&m, 3.0).unwrap(), 0.0);
        assert!((dist_by_bisection(&m, 2.0) - 1.0).abs() < 1e-9);
        assert!(dist_by_bisection(&m, 3.0) < 1e-9);
        assert!((dist_by_bisection(&m, -4.0) - 5.0).abs() < 1e-9);
        assert!((dist_by_bisection(&m, 10.0) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn bisection_agrees_with_dense() {
        for seed in 0..10 {
            let a = random_hamiltonian(2, 1, 3, 100 + seed);
            let s = full_spectrum(&a).unwrap();
            let (lo, hi) = a.gershgorin();
            for k in 0..10 {
                let e = lo + (hi - lo) * (k as f64 * 0.097 + 0.01);
                assert!((dist_by_bisection(&a, e) - s.dist(e)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn window_eigenvalues_match_dense() {
        let a = random_hamiltonian(2, 1, 4, 77);
        let s = full_spectrum(&a).unwrap();
        let w = eigenvalues_in_window(&a, 3.0, 5.0).unwrap();
        let want: Vec<f64> = s.eigenvalues().iter().copied().filter(|v| (3.0..=5.0).contains(v)).collect();
        assert_eq!(w.dim(), want.len());
        for (x, y) in w.eigenvalues().iter().zip(&want) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn resolvent_examples() {
        let m = SymMatrix::diagonal(vec![1.0, 3.0]).unwrap();
        assert_eq!(resolvent_norm(&m, 2.0).unwrap(), Some(1.0));
        assert_eq!(resolvent_norm(&m, 1.0).unwrap(), None);
        assert!((smallest_singular_value(&m, 2.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_and_gershgorin() {
        let a = random_hamiltonian(2, 1, 5, 4);
        let s = full_spectrum(&a).unwrap();
        let sum: f64 = s.eigenvalues().iter().sum();
        let scale = 1.0 + a.inf_norm();
        assert!((sum - a.trace()).abs() <= 1e-8 * a.dim() as f64 * scale);
        let (lo, hi) = a.gershgorin();
        assert!(s.min().unwrap() >= lo - 1e-10 * scale);
        assert!(s.max().unwrap() <= hi + 1e-10 * scale);
    }
}
