//! Finite-volume Hamiltonian `H = -Δ + V + hU` on an `n`-particle cube.
//!
//! `-Δ` is stored positive semidefinite: `2nd` on the diagonal and `-1` for
//! every nearest-neighbour pair (`|x - y|_1 = 1`) with both ends inside the
//! cube. Hops leaving the cube are dropped and the diagonal is left as is
//! (Dirichlet restriction).

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{point_sup_distance, Cube, Site};
use crate::randomfield::FieldSample;

/// Inter-particle potential `U`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InteractionSpec {
    #[default]
    None,
    /// `U(x) = amplitude · #{i < j : |x_i - x_j| <= range}`.
    PairContact { range: u32, amplitude: f64 },
}

impl InteractionSpec {
    /// `U(x)` at one configuration.
    pub fn value(&self, site: &Site) -> f64 {
        match self {
            InteractionSpec::None => 0.0,
            InteractionSpec::PairContact { range, amplitude } => {
                let n = site.n();
                let mut pairs = 0u32;
                for i in 0..n {
                    for j in i + 1..n {
                        if point_sup_distance(site.particle(i), site.particle(j)) <= u64::from(*range) {
                            pairs += 1;
                        }
                    }
                }
                amplitude * f64::from(pairs)
            }
        }
    }

    /// `|amplitude| · n(n-1)/2`, an upper bound for `|U|` anywhere.
    pub fn global_bound(&self, n: usize) -> f64 {
        match self {
            InteractionSpec::None => 0.0,
            InteractionSpec::PairContact { amplitude, .. } => amplitude.abs() * (n * (n - 1) / 2) as f64,
        }
    }
}

/// `max |U(x)|` over the sites of `cube`, by exhaustive scan.
pub fn interaction_sup_norm(cube: &Cube, inter: &InteractionSpec) -> f64 {
    match inter {
        InteractionSpec::None => 0.0,
        _ => {
            let bound = inter.global_bound(cube.n());
            let mut best: f64 = 0.0;
            for s in cube.sites() {
                best = best.max(inter.value(&s).abs());
                if best == bound {
                    break;
                }
            }
            best
        }
    }
}

/// A real symmetric matrix stored as its diagonal plus the strictly upper
/// triangle in coordinate form, sorted by `(row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    diag: Vec<f64>,
    upper: Vec<(usize, usize, f64)>,
}

impl SymMatrix {
    /// Build from a diagonal and strictly-upper entries. Zero entries are
    /// dropped; duplicates and out-of-range indices are rejected.
    pub fn from_parts(diag: Vec<f64>, mut upper: Vec<(usize, usize, f64)>) -> Result<Self> {
        let dim = diag.len();
        if dim == 0 {
            return Err(Error::Argument("matrix dimension must be positive".into()));
        }
        upper.retain(|e| e.2 != 0.0);
        for &(i, j, _) in &upper {
            if i >= j || j >= dim {
                return Err(Error::Argument(format!(
                    "entry ({i}, {j}) is not strictly upper triangular in dimension {dim}"
                )));
            }
        }
        upper.sort_by_key(|e| (e.0, e.1));
        if upper.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Argument("duplicate off-diagonal entry".into()));
        }
        Ok(Self { diag, upper })
    }

    /// Build from dense rows; the rows must be exactly symmetric.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Argument("matrix is not square".into()));
        }
        let mut upper = Vec::new();
        #[allow(clippy::needless_range_loop)]
        for i in 0..dim {
            for j in i + 1..dim {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::Argument(format!("matrix is not symmetric at ({i}, {j})")));
                }
                upper.push((i, j, rows[i][j]));
            }
        }
        Self::from_parts((0..dim).map(|i| rows[i][i]).collect(), upper)
    }

    pub fn diagonal(dim_values: Vec<f64>) -> Result<Self> {
        Self::from_parts(dim_values, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Strictly upper entries `(row, col, value)`, sorted.
    pub fn upper(&self) -> &[(usize, usize, f64)] {
        &self.upper
    }

    pub fn nnz(&self) -> usize {
        self.diag.len() + 2 * self.upper.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let key = (i.min(j), i.max(j));
        self.upper.binary_search_by_key(&key, |e| (e.0, e.1)).map_or(0.0, |k| self.upper[k].2)
    }

    /// Overwrite entry `(i, j)` and its mirror.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        if i == j {
            self.diag[i] = value;
            return;
        }
        let key = (i.min(j), i.max(j));
        match self.upper.binary_search_by_key(&key, |e| (e.0, e.1)) {
            Ok(k) if value == 0.0 => {
                self.upper.remove(k);
            }
            Ok(k) => self.upper[k].2 = value,
            Err(_) if value == 0.0 => {}
            Err(k) => self.upper.insert(k, (key.0, key.1, value)),
        }
    }

    /// Largest `j - i` over stored off-diagonal entries.
    pub fn bandwidth(&self) -> usize {
        self.upper.iter().map(|e| e.1 - e.0).max().unwrap_or(0)
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        let mut rows: Vec<f64> = self.diag.iter().map(|d| d.abs()).collect();
        for &(i, j, v) in &self.upper {
            rows[i] += v.abs();
            rows[j] += v.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Union of Gershgorin discs, as `(lo, hi)`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut radius = vec![0.0; self.dim()];
        for &(i, j, v) in &self.upper {
            radius[i] += v.abs();
            radius[j] += v.abs();
        }
        self.diag
            .iter()
            .zip(&radius)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (d, r)| (lo.min(d - r), hi.max(d + r)))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diag));
        for &(i, j, v) in &self.upper {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    /// `self - other`, which must have the same dimension.
    pub fn difference(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("{} vs {}", self.dim(), other.dim())));
        }
        let diag = self.diag.iter().zip(&other.diag).map(|(a, b)| a - b).collect();
        let mut upper = self.upper.clone();
        let mut out = SymMatrix { diag, upper: Vec::new() };
        for &(i, j, v) in &other.upper {
            upper.push((i, j, -v));
        }
        upper.sort_by_key(|e| (e.0, e.1));
        for (i, j, v) in upper {
            let cur = out.get(i, j);
            out.set(i, j, cur + v);
        }
        Ok(out)
    }

    /// Write one line `row col value` per nonzero entry, both triangles,
    /// row-major order. Values use the shortest representation that
    /// round-trips.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        let dim = self.dim();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for &(i, j, v) in &self.upper {
            rows[i].push((j, v));
            rows[j].push((i, v));
        }
        writeln!(out, "# dim {dim}")?;
        let mut line = String::new();
        for (i, row) in rows.iter_mut().enumerate() {
            if self.diag[i] != 0.0 {
                row.push((i, self.diag[i]));
            }
            row.sort_by_key(|e| e.0);
            for &(j, v) in row.iter() {
                line.clear();
                let _ = writeln!(line, "{i} {j} {v:?}");
                out.write_all(line.as_bytes())?;
            }
        }
        Ok(())
    }

    /// Parse the format produced by [`write_dump`](Self::write_dump).
    pub fn read_dump<R: BufRead>(input: R) -> Result<Self> {
        let mut dim = None;
        let mut entries = Vec::new();
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("# dim ") {
                dim = Some(rest.trim().parse::<usize>().map_err(|e| Error::Argument(e.to_string()))?);
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse_err = || Error::Argument(format!("malformed dump line: {line:?}"));
            let i: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(parse_err)?;
            let j: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(parse_err)?;
            let v: f64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(parse_err)?;
            entries.push((i, j, v));
        }
        let dim = dim.ok_or_else(|| Error::Argument("dump has no '# dim' header".into()))?;
        let mut diag = vec![0.0; dim];
        let mut upper = Vec::new();
        for &(i, j, v) in &entries {
            if i >= dim || j >= dim {
                return Err(Error::Argument(format!("entry ({i}, {j}) outside dimension {dim}")));
            }
            if i == j {
                diag[i] = v;
            } else if i < j {
                upper.push((i, j, v));
            }
        }
        let m = Self::from_parts(diag, upper)?;
        for &(i, j, v) in &entries {
            if m.get(i, j) != v {
                return Err(Error::Argument(format!("dump is not symmetric at ({i}, {j})")));
            }
        }
        Ok(m)
    }
}

/// Assemble `-Δ + Σ_j V(x_j) + hU` on `cube` in the lexicographic site basis.
pub fn build_hamiltonian(cube: &Cube, field: &FieldSample, inter: &InteractionSpec, h: f64) -> Result<SymMatrix> {
    let n = cube.n();
    let d = cube.d();
    let nd = n * d;
    let side = cube.side();
    let dim = cube.site_count();
    let kinetic = (2 * nd) as f64;

    // stride of flat coordinate c in the lexicographic ordinal
    let strides: Vec<usize> = (0..nd).map(|c| side.pow((nd - 1 - c) as u32)).collect();
    let radius = i64::from(cube.radius());

    let mut diag = Vec::with_capacity(dim);
    let mut upper = Vec::with_capacity(dim * nd);
    for (k, site) in cube.sites().enumerate() {
        let mut potential = 0.0;
        for p in site.particles() {
            potential += field.value(p)?;
        }
        let u = if h == 0.0 { 0.0 } else { h * inter.value(&site) };
        diag.push(kinetic + potential + u);

        for (c, stride) in strides.iter().enumerate() {
            // only the +1 neighbour, so each bond appears once in the upper triangle
            if site.coords()[c] - cube.center().coords()[c] < radius {
                upper.push((k, k + stride, -1.0));
            }
        }
    }
    upper.sort_by_key(|e| (e.0, e.1));
    Ok(SymMatrix { diag, upper })
}

/// Short human-readable summary, for logs.
pub fn describe(m: &SymMatrix) -> String {
    let (lo, hi) = m.gershgorin();
    format!("dim={} nnz={} bandwidth={} gershgorin=[{lo}, {hi}]", m.dim(), m.nnz(), m.bandwidth())
}
