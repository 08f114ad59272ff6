//! Periodic l-infinity geometry: distances, r-connected component labeling in
//! O(N) via box tiling, and minimal enclosing boxes on the torus.
//!
//! Defects of different sectors never connect; clustering is performed per
//! sector. All coordinates are integer cell indices; the dual (half-integer)
//! centers are implicit.

use crate::code::{Defect, DefectSet, Sector};
use crate::lattice::Coord;
use std::collections::VecDeque;

/// Wrapped l-infinity distance between two cell (or site) coordinates.
pub fn distance(u: Coord, v: Coord, l: usize) -> i64 {
    let ll = l as i64;
    (0..3)
        .map(|a| {
            let d = (u[a] - v[a]).rem_euclid(ll);
            d.min(ll - d)
        })
        .max()
        .unwrap()
}

/// Axis-aligned box on the torus, addressed by its lowest cell corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicBox {
    /// Lowest cell coordinate per axis (dual center at +1/2).
    pub corner: Coord,
    /// Cells per axis, each in `[1, L]`.
    pub extents: [i64; 3],
    /// True when some axis had two equal longest gaps (box non-unique);
    /// resolved by the smallest-starting-coordinate tie-break.
    pub ambiguous: bool,
}

impl PeriodicBox {
    /// Largest per-axis extent in cells (the spec's `diameter` field).
    pub fn diameter(&self) -> i64 {
        self.extents.iter().copied().max().unwrap()
    }

    /// l-infinity distance between the extreme dual vertices of the box:
    /// `diameter() - 1`. This is the quantity compared against the
    /// topological-order scale.
    pub fn span(&self) -> i64 {
        self.diameter() - 1
    }

    pub fn volume(&self) -> i64 {
        self.extents.iter().product()
    }

    /// Does a wrapped cell coordinate fall inside the box?
    pub fn contains(&self, cell: Coord, l: usize) -> bool {
        let ll = l as i64;
        (0..3).all(|a| {
            let d = (cell[a] - self.corner[a]).rem_euclid(ll);
            d < self.extents[a]
        })
    }

    /// Grow by `pad` cells on every side (clamped to the lattice).
    pub fn grown(&self, pad: i64, l: usize) -> PeriodicBox {
        let ll = l as i64;
        let mut corner = self.corner;
        let mut extents = self.extents;
        for a in 0..3 {
            let e = (self.extents[a] + 2 * pad).min(ll);
            corner[a] = (self.corner[a] - pad).rem_euclid(ll);
            extents[a] = e;
        }
        PeriodicBox { corner, extents, ambiguous: self.ambiguous }
    }
}

impl std::fmt::Display for PeriodicBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{},{},{}]+[{}x{}x{}]",
            self.corner[0], self.corner[1], self.corner[2], self.extents[0], self.extents[1], self.extents[2]
        )
    }
}

/// A maximal r-connected component of a syndrome.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub defects: DefectSet,
    /// Scale at which the component was extracted.
    pub scale: i64,
    /// Cached minimal enclosing box of the member cells.
    pub bounding: PeriodicBox,
    pub sector: Sector,
}

/// Minimal enclosing interval per axis: the complement of the longest
/// circular gap between consecutive coordinates. Ties are broken toward the
/// smallest starting coordinate and flagged.
fn axis_interval(coords: &mut Vec<i64>, l: i64) -> (i64, i64, bool) {
    coords.sort_unstable();
    coords.dedup();
    let m = coords.len();
    debug_assert!(m >= 1);
    if m == 1 {
        return (coords[0], 1, false);
    }
    let mut best_gap = -1i64;
    let mut best_start = 0i64;
    let mut tie = false;
    for i in 0..m {
        let next = if i + 1 == m { coords[0] + l } else { coords[i + 1] };
        let gap = next - coords[i];
        let start = next % l;
        if gap > best_gap {
            best_gap = gap;
            best_start = start;
            tie = false;
        } else if gap == best_gap {
            tie = true;
            if start < best_start {
                best_start = start;
            }
        }
    }
    (best_start, l - best_gap + 1, tie)
}

/// Minimal enclosing box of a set of cells on the torus.
pub fn minimal_enclosing_box_of_cells(cells: &[Coord], l: usize) -> PeriodicBox {
    assert!(!cells.is_empty(), "enclosing box of an empty set");
    let ll = l as i64;
    let mut corner = [0i64; 3];
    let mut extents = [1i64; 3];
    let mut ambiguous = false;
    for a in 0..3 {
        let mut coords: Vec<i64> = cells.iter().map(|c| c[a].rem_euclid(ll)).collect();
        let (start, extent, tie) = axis_interval(&mut coords, ll);
        corner[a] = start;
        extents[a] = extent;
        ambiguous |= tie;
    }
    PeriodicBox { corner, extents, ambiguous }
}

/// Minimal enclosing box of a cluster's member defects.
pub fn minimal_enclosing_box(cluster: &DefectSet, l: usize) -> PeriodicBox {
    let cells: Vec<Coord> = cluster.iter().map(|d| d.cell).collect();
    minimal_enclosing_box_of_cells(&cells, l)
}

/// Partition a syndrome into maximal r-connected components in O(N).
///
/// The torus is tiled into boxes of side at most `r`; defects sharing a tile
/// are connected outright, adjacency between tiles is decided by the pairwise
/// predicate (1-D projection for face neighbors, cumulative tables for edge
/// and corner neighbors), and components are collected by FIFO flood over the
/// tile graph in lexicographic scan order.
pub fn connected_components(s: &DefectSet, r: usize, l: usize) -> Vec<Cluster> {
    let mut out = Vec::new();
    for sector in [Sector::XType, Sector::ZType] {
        let cells: Vec<Coord> = s.iter().filter(|d| d.sector == sector).map(|d| d.cell).collect();
        if cells.is_empty() {
            continue;
        }
        for comp in label_components(&cells, r.max(1) as i64, l as i64) {
            let defects: DefectSet = comp.iter().map(|&c| Defect::new(c, sector)).collect();
            let bounding = minimal_enclosing_box_of_cells(&comp, l);
            out.push(Cluster { defects, scale: r as i64, bounding, sector });
        }
    }
    out
}

struct TileGrid {
    t: [i64; 3],
    r: i64,
}

impl TileGrid {
    fn tile_of(&self, c: Coord) -> [i64; 3] {
        [c[0] / self.r, c[1] / self.r, c[2] / self.r]
    }

    fn tile_index(&self, t: [i64; 3]) -> usize {
        (t[0] + self.t[0] * (t[1] + self.t[1] * t[2])) as usize
    }

    fn count(&self) -> usize {
        (self.t[0] * self.t[1] * self.t[2]) as usize
    }
}

/// Tiles the `sigma`-ward band `0 < delta <= r` can reach along one axis.
/// Only the transitions across the wrap need two candidates: the trailing
/// tile is smaller than `r` whenever `r` does not divide `L`, so the wrapped
/// band may straddle two tile indices.
fn axis_candidates(tile: i64, sigma: i64, t: i64, r: i64, l: i64) -> Vec<(i64, i64)> {
    match sigma {
        0 => vec![(tile, 0)],
        1 => {
            if tile < t - 1 {
                let mut v = vec![(tile + 1, 0)];
                if tile == t - 2 && t * r > l {
                    v.push((0, 1));
                }
                v
            } else {
                vec![(0, 1)]
            }
        }
        _ => {
            if tile > 0 {
                vec![(tile - 1, 0)]
            } else {
                let mut v = vec![(t - 1, -1)];
                if t * r > l && t >= 2 {
                    v.push((t - 2, -1));
                }
                v
            }
        }
    }
}

fn label_components(cells: &[Coord], r: i64, l: i64) -> Vec<Vec<Coord>> {
    let tiles_per_axis = (l + r - 1) / r;
    let grid = TileGrid { t: [tiles_per_axis; 3], r };
    let mut occupied: Vec<Vec<usize>> = vec![Vec::new(); grid.count()];
    let norm: Vec<Coord> =
        cells.iter().map(|c| [c[0].rem_euclid(l), c[1].rem_euclid(l), c[2].rem_euclid(l)]).collect();
    for (i, c) in norm.iter().enumerate() {
        occupied[grid.tile_index(grid.tile_of(*c))].push(i);
    }

    // Flood over nonempty tiles; lexicographic scan for deterministic labels.
    let mut label: Vec<Option<usize>> = vec![None; grid.count()];
    let mut components: Vec<Vec<Coord>> = Vec::new();
    let mut scan: Vec<usize> = (0..grid.count()).filter(|&t| !occupied[t].is_empty()).collect();
    scan.sort_unstable();

    let sigmas = neighbor_offsets(&grid);
    for &start in &scan {
        if label[start].is_some() {
            continue;
        }
        let comp_id = components.len();
        components.push(Vec::new());
        let mut queue = VecDeque::new();
        label[start] = Some(comp_id);
        queue.push_back(start);
        while let Some(tile) = queue.pop_front() {
            let tc = [
                (tile as i64) % grid.t[0],
                (tile as i64 / grid.t[0]) % grid.t[1],
                tile as i64 / (grid.t[0] * grid.t[1]),
            ];
            for &i in &occupied[tile] {
                components[comp_id].push(cells[i]);
            }
            for sigma in &sigmas {
                let per_axis: Vec<Vec<(i64, i64)>> = (0..3)
                    .map(|a| axis_candidates(tc[a], sigma[a], grid.t[a], r, l))
                    .collect();
                for &(nx, sx) in &per_axis[0] {
                    for &(ny, sy) in &per_axis[1] {
                        for &(nz, sz) in &per_axis[2] {
                            let nt = [nx, ny, nz];
                            let shift = [sx, sy, sz];
                            let n_idx = grid.tile_index(nt);
                            if n_idx == tile
                                || occupied[n_idx].is_empty()
                                || label[n_idx].is_some()
                            {
                                continue;
                            }
                            if tiles_adjacent(
                                &norm,
                                &occupied[tile],
                                &occupied[n_idx],
                                *sigma,
                                shift,
                                r,
                                l,
                            ) {
                                label[n_idx] = Some(comp_id);
                                queue.push_back(n_idx);
                            }
                        }
                    }
                }
            }
        }
        components[comp_id].sort_unstable();
    }
    components
}

fn neighbor_offsets(grid: &TileGrid) -> Vec<[i64; 3]> {
    let choices = |a: usize| -> Vec<i64> {
        if grid.t[a] == 1 {
            vec![0]
        } else {
            vec![-1, 0, 1]
        }
    };
    let mut out = Vec::new();
    for x in choices(0) {
        for y in choices(1) {
            for z in choices(2) {
                if (x, y, z) != (0, 0, 0) {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

/// Does some pair `(u in B, v in B')` satisfy the per-axis conditions
/// `|delta| <= r` along the active axes of `sigma`? Axes with `sigma = 0`
/// hold automatically because tiles have extent at most `r`.
fn tiles_adjacent(
    norm: &[Coord],
    b: &[usize],
    b_prime: &[usize],
    sigma: [i64; 3],
    shift: [i64; 3],
    r: i64,
    l: i64,
) -> bool {
    let active: Vec<usize> = (0..3).filter(|&a| sigma[a] != 0).collect();
    // Oriented coordinate: increases toward B' along each active axis.
    let orient = |idx: usize, a: usize, shifted: bool| -> i64 {
        let mut c = norm[idx][a];
        if shifted {
            c += shift[a] * l;
        }
        sigma[a] * c
    };
    match active.len() {
        1 => {
            let a = active[0];
            let hi = b.iter().map(|&u| orient(u, a, false)).max().unwrap();
            let lo = b_prime.iter().map(|&v| orient(v, a, true)).min().unwrap();
            lo - hi <= r
        }
        _ => {
            // Cumulative table over B' in the active axes: delta'(i..) = 1 iff
            // some defect of B' has all oriented coordinates <= i.
            let k = active.len();
            let mut base = vec![i64::MAX; k];
            for &v in b_prime {
                for (ai, &a) in active.iter().enumerate() {
                    base[ai] = base[ai].min(orient(v, a, true));
                }
            }
            let dims: Vec<usize> = vec![r as usize; k];
            let total: usize = dims.iter().product();
            let mut table = vec![false; total];
            let flat = |ix: &[usize]| -> usize {
                let mut f = 0;
                for (d, &i) in dims.iter().zip(ix).rev() {
                    f = f * d + i;
                }
                f
            };
            for &v in b_prime {
                let mut ix = vec![0usize; k];
                let mut ok = true;
                for (ai, &a) in active.iter().enumerate() {
                    let o = (orient(v, a, true) - base[ai]) as usize;
                    if o >= dims[ai] {
                        ok = false;
                        break;
                    }
                    ix[ai] = o;
                }
                if ok {
                    table[flat(&ix)] = true;
                }
            }
            // Prefix-OR along each axis.
            for ai in 0..k {
                let stride: usize = dims[..ai].iter().product();
                for f in 0..total {
                    let coord = (f / stride) % dims[ai];
                    if coord > 0 && table[f - stride] {
                        table[f] = table[f] || table[f - stride];
                    }
                }
            }
            // Query each defect of B.
            'outer: for &u in b {
                let mut ix = vec![0usize; k];
                for (ai, &a) in active.iter().enumerate() {
                    let bound = orient(u, a, false) + r - base[ai];
                    if bound < 0 {
                        continue 'outer;
                    }
                    ix[ai] = (bound as usize).min(dims[ai] - 1);
                }
                if table[flat(&ix)] {
                    return true;
                }
            }
            false
        }
    }
}
