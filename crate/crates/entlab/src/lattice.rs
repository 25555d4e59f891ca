//! Geometry of finite lattice boxes Λ_M = [-M,M]^d ∩ Z^d.
//!
//! Every matrix-valued module indexes sites through the flat index map
//! defined here, so the ordering convention is load-bearing: coordinates are
//! enumerated row-major with the *first* coordinate most significant, i.e.
//! `flat = ((x_1+M)·L + (x_2+M))·L + ... + (x_d+M)` with `L = 2M+1`.
//! Distances are max-norm, `dist(C_1,C_2) = min ||x-y||_inf`, and boundaries
//! are `∂C = {x ∈ C : dist(x, C^c) = 1}` where everything outside the parent
//! box counts as C^c (Dirichlet truncation).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Lattice coordinate. Only the first `dimension` entries are meaningful;
/// trailing entries are zero.
pub type Coord = [i64; 3];

/// Max-norm distance between two coordinates.
pub fn dist_inf(a: Coord, b: Coord) -> i64 {
    (0..3).map(|k| (a[k] - b[k]).abs()).max().unwrap()
}

/// A finite box Λ_M = [-M,M]^d ∩ Z^d with its site↔flat-index bijection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dimension: usize,
    pub half_width: i64,
}

impl LatticeSpec {
    pub fn new(dimension: usize, half_width: i64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::Geometry(format!(
                "dimension must be in 1..=3, got {dimension}"
            )));
        }
        if half_width < 1 {
            return Err(Error::Geometry(format!(
                "half_width must be >= 1, got {half_width}"
            )));
        }
        Ok(LatticeSpec {
            dimension,
            half_width,
        })
    }

    /// Side length L = 2M+1.
    pub fn side(&self) -> i64 {
        2 * self.half_width + 1
    }

    /// Number of sites L^d.
    pub fn site_count(&self) -> usize {
        (self.side() as usize).pow(self.dimension as u32)
    }

    pub fn contains(&self, x: Coord) -> bool {
        (0..self.dimension).all(|k| x[k].abs() <= self.half_width)
            && (self.dimension..3).all(|k| x[k] == 0)
    }

    /// Row-major flat index of an in-box coordinate.
    pub fn flatten(&self, x: Coord) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let l = self.side();
        let mut idx = 0i64;
        for &xk in x.iter().take(self.dimension) {
            idx = idx * l + (xk + self.half_width);
        }
        Some(idx as usize)
    }

    pub fn unflatten(&self, mut idx: usize) -> Coord {
        debug_assert!(idx < self.site_count());
        let l = self.side() as usize;
        let mut x = [0i64; 3];
        for k in (0..self.dimension).rev() {
            x[k] = (idx % l) as i64 - self.half_width;
            idx /= l;
        }
        x
    }

    /// All sites in flat-index order.
    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.site_count()).map(move |i| self.unflatten(i))
    }

    /// In-box nearest neighbors (||x-y||_1 = 1) of a site.
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let x = self.unflatten(idx);
        let mut out = Vec::with_capacity(2 * self.dimension);
        for k in 0..self.dimension {
            for step in [-1i64, 1] {
                let mut y = x;
                y[k] += step;
                if let Some(j) = self.flatten(y) {
                    out.push(j);
                }
            }
        }
        out
    }

    /// Flat index of the origin.
    pub fn center(&self) -> usize {
        self.flatten([0, 0, 0]).expect("origin is always in the box")
    }
}

/// A subset of a box, stored as a sorted set of flat indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    spec: LatticeSpec,
    sites: Vec<usize>,
}

/// Wire format: {"dimension", "half_width", "sites": [flat indices]}.
#[derive(Serialize, Deserialize)]
struct RegionWire {
    dimension: usize,
    half_width: i64,
    sites: Vec<usize>,
}

impl Serialize for Region {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RegionWire {
            dimension: self.spec.dimension,
            half_width: self.spec.half_width,
            sites: self.sites.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = RegionWire::deserialize(d)?;
        let spec = LatticeSpec::new(w.dimension, w.half_width).map_err(serde::de::Error::custom)?;
        Region::from_sites(spec, w.sites).map_err(serde::de::Error::custom)
    }
}

impl Region {
    /// Build a region from arbitrary flat indices; sorts and rejects
    /// duplicates or out-of-box indices.
    pub fn from_sites(spec: LatticeSpec, mut sites: Vec<usize>) -> Result<Self> {
        sites.sort_unstable();
        if sites.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Geometry("duplicate site in region".into()));
        }
        if let Some(&last) = sites.last() {
            if last >= spec.site_count() {
                return Err(Error::Geometry(format!(
                    "site index {last} outside box with {} sites",
                    spec.site_count()
                )));
            }
        }
        Ok(Region { spec, sites })
    }

    pub fn full_box(spec: LatticeSpec) -> Self {
        Region {
            spec,
            sites: (0..spec.site_count()).collect(),
        }
    }

    pub fn empty(spec: LatticeSpec) -> Self {
        Region {
            spec,
            sites: Vec::new(),
        }
    }

    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.sites.binary_search(&idx).is_ok()
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        self.sites.iter().map(move |&i| self.spec.unflatten(i))
    }

    /// Complement within the parent box.
    pub fn complement(&self) -> Region {
        let mut mask = vec![false; self.spec.site_count()];
        for &i in &self.sites {
            mask[i] = true;
        }
        Region {
            spec: self.spec,
            sites: (0..mask.len()).filter(|&i| !mask[i]).collect(),
        }
    }

    /// Union of two regions over the same box.
    pub fn union(&self, other: &Region) -> Result<Region> {
        if self.spec != other.spec {
            return Err(Error::Geometry("region parents differ".into()));
        }
        let mut sites = self.sites.clone();
        sites.extend_from_slice(&other.sites);
        sites.sort_unstable();
        sites.dedup();
        Ok(Region {
            spec: self.spec,
            sites,
        })
    }

    pub fn intersection(&self, other: &Region) -> Result<Region> {
        if self.spec != other.spec {
            return Err(Error::Geometry("region parents differ".into()));
        }
        let sites = self
            .sites
            .iter()
            .copied()
            .filter(|&i| other.contains(i))
            .collect();
        Ok(Region {
            spec: self.spec,
            sites,
        })
    }
}

/// The sub-cube {x : ||x||_inf <= m} of a box with half-width M >= m.
pub fn cube_region(spec: LatticeSpec, inner_half_width: i64) -> Result<Region> {
    if inner_half_width < 0 || inner_half_width > spec.half_width {
        return Err(Error::Geometry(format!(
            "inner half-width {inner_half_width} outside 0..={}",
            spec.half_width
        )));
    }
    let sites = (0..spec.site_count())
        .filter(|&i| {
            let x = spec.unflatten(i);
            (0..spec.dimension).all(|k| x[k].abs() <= inner_half_width)
        })
        .collect();
    Ok(Region { spec, sites })
}

/// ∂C = {x ∈ C : dist(x, C^c) = 1}. Sites beyond the parent box belong to
/// C^c, so the rim of a full box is its own boundary.
pub fn boundary(region: &Region) -> Region {
    let spec = region.spec;
    let mut mask = vec![false; spec.site_count()];
    for &i in region.sites() {
        mask[i] = true;
    }
    let sites = region
        .sites()
        .iter()
        .copied()
        .filter(|&i| {
            let nbrs = spec.neighbors(i);
            // a step leaving the box counts as leaving C
            nbrs.len() < 2 * spec.dimension || nbrs.iter().any(|&j| !mask[j])
        })
        .collect();
    Region { spec, sites }
}

/// min over pairs of the max-norm distance; 0 iff the regions intersect.
pub fn set_distance(a: &Region, b: &Region) -> Result<i64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("set_distance of an empty region".into()));
    }
    let mut best = i64::MAX;
    for xa in a.coords() {
        for xb in b.coords() {
            best = best.min(dist_inf(xa, xb));
            if best == 0 {
                return Ok(0);
            }
        }
    }
    Ok(best)
}

/// Distance of a single site to a region (max-norm).
pub fn site_distance(spec: LatticeSpec, idx: usize, b: &Region) -> Result<i64> {
    if b.is_empty() {
        return Err(Error::Domain("site_distance to an empty region".into()));
    }
    let x = spec.unflatten(idx);
    Ok(b.coords().map(|y| dist_inf(x, y)).min().unwrap())
}

/// Finite-box halfspace cut: sites with `sign·(x_axis - offset) >= 0`.
/// `axis` is 1-based. `half_cut(+, k)` and `half_cut(-, k-1)` partition
/// the box.
pub fn half_cut(spec: LatticeSpec, axis: usize, offset: i64, sign: i8) -> Result<Region> {
    if axis == 0 || axis > spec.dimension {
        return Err(Error::Geometry(format!(
            "axis {axis} outside 1..={}",
            spec.dimension
        )));
    }
    if offset.abs() > spec.half_width {
        return Err(Error::Geometry(format!(
            "offset {offset} outside box of half-width {}",
            spec.half_width
        )));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Geometry("sign must be +1 or -1".into()));
    }
    let k = axis - 1;
    let sites = (0..spec.site_count())
        .filter(|&i| {
            let x = spec.unflatten(i);
            (sign as i64) * (x[k] - offset) >= 0
        })
        .collect();
    Ok(Region { spec, sites })
}
