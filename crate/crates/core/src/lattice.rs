//! Configuration space of `n` particles on `Z^d`.
//!
//! A [`Site`] is a point of `(Z^d)^n` stored as a flat vector of `n·d`
//! integers, particle `i` occupying `coords[i*d..(i+1)*d]`. A [`Cube`] is a
//! sup-norm ball around a center site; its sites are enumerated in
//! lexicographic order of the flat coordinates, and that order is the
//! matrix basis used everywhere else in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `(Z^d)^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    n: usize,
    d: usize,
    coords: Vec<i64>,
}

impl Site {
    pub fn new(n: usize, d: usize, coords: Vec<i64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Dimension(format!("particle count and dimension must be positive (n={n}, d={d})")));
        }
        if coords.len() != n * d {
            return Err(Error::Dimension(format!(
                "expected {} coordinates for n={n}, d={d}, got {}",
                n * d,
                coords.len()
            )));
        }
        Ok(Self { n, d, coords })
    }

    /// The origin of `(Z^d)^n`.
    pub fn origin(n: usize, d: usize) -> Result<Self> {
        Self::new(n, d, vec![0; n * d])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// Position of particle `i` (0-based) in `Z^d`.
    pub fn particle(&self, i: usize) -> &[i64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn particles(&self) -> impl Iterator<Item = &[i64]> {
        self.coords.chunks(self.d)
    }

    /// This site translated by `offset` (a flat vector of `n·d` integers).
    pub fn translated(&self, offset: &[i64]) -> Result<Self> {
        if offset.len() != self.coords.len() {
            return Err(Error::Dimension(format!(
                "offset has {} components, site has {}",
                offset.len(),
                self.coords.len()
            )));
        }
        let coords = self.coords.iter().zip(offset).map(|(a, b)| a + b).collect();
        Ok(Self { n: self.n, d: self.d, coords })
    }

    fn check_same_shape(&self, other: &Site) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::Dimension(format!(
                "sites live in different spaces: (n={}, d={}) vs (n={}, d={})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }
}

/// `max_i |a_i - b_i|` over all `n·d` components.
pub fn sup_norm(a: &Site, b: &Site) -> Result<u64> {
    a.check_same_shape(b)?;
    Ok(a.coords.iter().zip(&b.coords).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0))
}

/// `sum_i |a_i - b_i|` over all `n·d` components.
pub fn one_norm(a: &Site, b: &Site) -> Result<u64> {
    a.check_same_shape(b)?;
    Ok(a.coords.iter().zip(&b.coords).map(|(x, y)| x.abs_diff(*y)).sum())
}

/// Sup-norm distance between two points of `Z^d` (single-particle coordinates).
pub(crate) fn point_sup_distance(a: &[i64], b: &[i64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0)
}

/// The `n`-particle cube `{y : |y - center| <= radius}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    center: Site,
    radius: u32,
}

impl Cube {
    pub fn new(center: Site, radius: u32) -> Self {
        Self { center, radius }
    }

    pub fn center(&self) -> &Site {
        &self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn n(&self) -> usize {
        self.center.n
    }

    pub fn d(&self) -> usize {
        self.center.d
    }

    /// Side length `2L+1`.
    pub fn side(&self) -> usize {
        2 * self.radius as usize + 1
    }

    /// `(2L+1)^{nd}`.
    pub fn site_count(&self) -> usize {
        self.side().pow((self.n() * self.d()) as u32)
    }

    pub fn contains(&self, site: &Site) -> bool {
        sup_norm(&self.center, site).is_ok_and(|r| r <= u64::from(self.radius))
    }

    /// The single-particle cube `C^{(1)}_L(x_i)` around particle `i`.
    pub fn particle_cube(&self, i: usize) -> Cube {
        let center = Site { n: 1, d: self.d(), coords: self.center.particle(i).to_vec() };
        Cube::new(center, self.radius)
    }

    /// Every point of `Z^d` that some particle can occupy inside the cube.
    /// Sorted and deduplicated.
    pub fn single_particle_points(&self) -> Vec<Vec<i64>> {
        let mut points: Vec<Vec<i64>> =
            (0..self.n()).flat_map(|i| enumerate_sites(&self.particle_cube(i)).into_iter().map(|s| s.coords)).collect();
        points.sort();
        points.dedup();
        points
    }

    /// Ordinal of `site` in the lexicographic enumeration, or `None` when
    /// the site lies outside the cube. `O(nd)`.
    pub fn index_of(&self, site: &Site) -> Option<usize> {
        if site.n != self.n() || site.d != self.d() {
            return None;
        }
        let side = self.side() as i64;
        let r = i64::from(self.radius);
        let mut idx: usize = 0;
        for (x, c) in site.coords.iter().zip(&self.center.coords) {
            let local = x - c + r;
            if !(0..side).contains(&local) {
                return None;
            }
            idx = idx * side as usize + local as usize;
        }
        Some(idx)
    }

    /// The site at ordinal `k` of the enumeration.
    pub fn site_at(&self, mut k: usize) -> Option<Site> {
        if k >= self.site_count() {
            return None;
        }
        let side = self.side();
        let r = i64::from(self.radius);
        let mut coords = vec![0i64; self.center.coords.len()];
        for (slot, c) in coords.iter_mut().zip(&self.center.coords).rev() {
            *slot = c - r + (k % side) as i64;
            k /= side;
        }
        Some(Site { n: self.n(), d: self.d(), coords })
    }

    /// Sites in lexicographic order of their flat coordinates.
    pub fn sites(&self) -> SiteIter<'_> {
        SiteIter { cube: self, next: 0, total: self.site_count() }
    }
}

/// Enumerate the cube's sites in matrix-basis order.
pub fn enumerate_sites(cube: &Cube) -> Vec<Site> {
    cube.sites().collect()
}

pub struct SiteIter<'a> {
    cube: &'a Cube,
    next: usize,
    total: usize,
}

impl Iterator for SiteIter<'_> {
    type Item = Site;

    fn next(&mut self) -> Option<Site> {
        if self.next >= self.total {
            return None;
        }
        let s = self.cube.site_at(self.next);
        self.next += 1;
        s
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.total - self.next;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for SiteIter<'_> {}
