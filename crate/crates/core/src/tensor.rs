//! Non-interacting spectra as sums of single-particle spectra.
//!
//! At `h = 0` the `n`-particle Hamiltonian on a cube is the Kronecker sum of
//! the single-particle Hamiltonians on its factor cubes, so its eigenvalues
//! are all sums `λ⁽¹⁾_{j₁} + … + λ⁽ⁿ⁾_{jₙ}`. Eigenvectors are never formed.

use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, InteractionSpec};
use crate::lattice::Cube;
use crate::randomfield::FieldSample;
use crate::spectral::{full_spectrum, Spectrum};

/// The multiset of all sums of one eigenvalue from each term.
#[derive(Debug, Clone, PartialEq)]
pub struct SumsetSpectrum {
    terms: Vec<Spectrum>,
    sums: Spectrum,
}

impl SumsetSpectrum {
    pub fn terms(&self) -> &[Spectrum] {
        &self.terms
    }

    pub fn sums(&self) -> &Spectrum {
        &self.sums
    }

    pub fn into_sums(self) -> Spectrum {
        self.sums
    }
}

pub fn sumset_spectrum(spectra: &[Spectrum]) -> Result<SumsetSpectrum> {
    let (first, rest) =
        spectra.split_first().ok_or_else(|| Error::Argument("sumset of an empty sequence of spectra".into()))?;
    let mut sums = first.eigenvalues().to_vec();
    for s in rest {
        sums = sums.iter().flat_map(|a| s.eigenvalues().iter().map(move |b| a + b)).collect();
    }
    Ok(SumsetSpectrum { terms: spectra.to_vec(), sums: Spectrum::new(sums)? })
}

/// Single-particle spectra on each factor cube of `cube`, same field.
pub fn particle_spectra(cube: &Cube, field: &FieldSample) -> Result<Vec<Spectrum>> {
    (0..cube.n())
        .map(|i| {
            let h1 = build_hamiltonian(&cube.particle_cube(i), field, &InteractionSpec::None, 0.0)?;
            full_spectrum(&h1)
        })
        .collect()
}

/// Largest rank-matched gap between the sumset of single-particle spectra
/// and the directly diagonalized non-interacting `n`-particle Hamiltonian.
pub fn verify_decomposition(cube: &Cube, field: &FieldSample) -> Result<f64> {
    let direct = full_spectrum(&build_hamiltonian(cube, field, &InteractionSpec::None, 0.0)?)?;
    let sumset = sumset_spectrum(&particle_spectra(cube, field)?)?;
    Ok(max_rank_deviation(sumset.sums(), &direct))
}

/// `max_k |a_k - b_k|` over sorted eigenvalues; infinite when the lengths
/// differ.
pub fn max_rank_deviation(a: &Spectrum, b: &Spectrum) -> f64 {
    if a.dim() != b.dim() {
        return f64::INFINITY;
    }
    a.eigenvalues().iter().zip(b.eigenvalues()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
