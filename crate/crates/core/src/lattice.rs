//! Periodic lattice bookkeeping shared by both code families.
//!
//! Sites carry integer coordinates modulo `L`; stabilizer generators live on
//! cells (elementary cubes in 3D, faces/vertices in 2D) addressed by the
//! integer coordinate of their lower corner. Qubit indices are site-major
//! with x fastest, two qubits per site.

use serde::{Deserialize, Serialize};

/// Coordinate triple; 2D lattices keep the third component at zero.
pub type Coord = [i64; 3];

/// Shape of a periodic lattice hosting a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    /// Spatial dimension, 2 or 3.
    pub dimension: usize,
    /// Sites per axis; periodic in all axes.
    pub size: usize,
    /// Qubits per site (2 for both code families here).
    pub qubits_per_site: usize,
}

impl LatticeSpec {
    pub fn new(dimension: usize, size: usize, qubits_per_site: usize) -> Self {
        LatticeSpec { dimension, size, qubits_per_site }
    }

    /// Number of lattice sites.
    pub fn sites(&self) -> usize {
        self.size.pow(self.dimension as u32)
    }

    /// Total number of physical qubits.
    pub fn qubits(&self) -> usize {
        self.sites() * self.qubits_per_site
    }

    /// Reduce a coordinate into `[0, L)` per axis.
    #[inline]
    pub fn wrap(&self, c: Coord) -> Coord {
        let l = self.size as i64;
        let mut out = [0i64; 3];
        for a in 0..3 {
            out[a] = c[a].rem_euclid(l);
        }
        if self.dimension == 2 {
            out[2] = 0;
        }
        out
    }

    /// Site-major index of a (wrapped) site coordinate.
    #[inline]
    pub fn site_index(&self, c: Coord) -> usize {
        let c = self.wrap(c);
        let l = self.size as i64;
        (c[0] + l * (c[1] + l * c[2])) as usize
    }

    /// Inverse of [`site_index`](Self::site_index).
    #[inline]
    pub fn site_coord(&self, idx: usize) -> Coord {
        let l = self.size;
        let x = (idx % l) as i64;
        let y = ((idx / l) % l) as i64;
        let z = if self.dimension == 3 { (idx / (l * l)) as i64 } else { 0 };
        [x, y, z]
    }

    /// Qubit index for `(site, q)` with `q < qubits_per_site`.
    #[inline]
    pub fn qubit_index(&self, site: Coord, q: usize) -> usize {
        self.site_index(site) * self.qubits_per_site + q
    }

    /// Inverse of [`qubit_index`](Self::qubit_index).
    #[inline]
    pub fn qubit_coord(&self, idx: usize) -> (Coord, usize) {
        let q = idx % self.qubits_per_site;
        (self.site_coord(idx / self.qubits_per_site), q)
    }

    /// Wrapped per-axis displacement, reduced into `(-L/2, L/2]`.
    #[inline]
    pub fn wrap_delta(&self, d: i64) -> i64 {
        let l = self.size as i64;
        let mut d = d.rem_euclid(l);
        if d > l / 2 {
            d -= l;
        }
        d
    }
}
