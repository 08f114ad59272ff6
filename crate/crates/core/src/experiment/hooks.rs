//! Hook error paths: the recursive low-barrier error family of the cubic
//! code. A level-p hook separates one defect from a small cluster by
//! distance 2^p; the generating path costs exactly 2p + 4 defects.
//!
//! Construction: the level-0 hook is a weight-2 error creating four defects.
//! Doubling maps every flip of the level-p path to a four-flip gadget whose
//! net effect dilates the syndrome by a factor of two; the flips inside each
//! gadget are ordered by exhaustive local search to keep the running defect
//! count at the 2p + 4 budget.

use crate::code::CodeDescriptor;
use crate::lattice::Coord;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Single-qubit letter of one path step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliLetter {
    X,
    Z,
}

/// Ordered list of single-qubit flips plus the defect count after each step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPath {
    /// `(site, qubit, letter)` per step; consecutive operators differ on
    /// exactly one qubit.
    pub flips: Vec<(Coord, usize, PauliLetter)>,
    /// Defect count m_i after step i (unwrapped lattice).
    pub counts: Vec<usize>,
}

impl ErrorPath {
    /// Energy cost: the peak defect count along the path.
    pub fn cost(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

/// Cells whose X-type generator is flipped by a Z letter (cells are
/// `site - offset`); same tables as the sweep.
const ZQ0_CELLS: [Coord; 4] = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]];
const ZQ1_CELLS: [Coord; 4] = [[1, 0, 0], [0, 1, 0], [1, 1, 1], [1, 1, 0]];

fn toggle_cells(set: &mut HashSet<Coord>, site: Coord, q: usize) {
    let offsets = if q == 0 { &ZQ0_CELLS } else { &ZQ1_CELLS };
    for v in offsets {
        let cell = [site[0] - v[0], site[1] - v[1], site[2] - v[2]];
        if !set.insert(cell) {
            set.remove(&cell);
        }
    }
}

/// Build the level-p hook path.
///
/// Every doubling replaces a flip at `u` with four flips at `2u - v` over the
/// four support offsets of the same qubit; gadget-internal order is chosen to
/// minimize the running peak (deterministic tie-break).
pub fn hook_path(level: usize, size: usize) -> Result<ErrorPath> {
    if size < 3 || (1u128 << (level + 1)) > size as u128 {
        return Err(Error::DoesNotFit { level, size });
    }
    // Level-0 hook: a weight-2 error creating four defects, one of them
    // separated from the other three.
    let mut flips: Vec<(Coord, usize)> = vec![([0, 0, 0], 0), ([0, 0, -1], 1)];
    for _ in 0..level {
        flips = double(&flips);
    }
    let mut defects: HashSet<Coord> = HashSet::new();
    let mut counts = Vec::with_capacity(flips.len());
    let mut out = Vec::with_capacity(flips.len());
    for &(site, q) in &flips {
        toggle_cells(&mut defects, site, q);
        counts.push(defects.len());
        out.push((site, q, PauliLetter::Z));
    }
    debug_assert_eq!(defects.len(), 4, "hook leaves four defects");
    Ok(ErrorPath { flips: out, counts })
}

/// One doubling step over the whole flip sequence.
fn double(flips: &[(Coord, usize)]) -> Vec<(Coord, usize)> {
    let mut out = Vec::with_capacity(flips.len() * 4);
    let mut defects: HashSet<Coord> = HashSet::new();
    for &(u, q) in flips {
        let offsets = if q == 0 { &ZQ0_CELLS } else { &ZQ1_CELLS };
        let gadget: Vec<Coord> = offsets
            .iter()
            .map(|v| [2 * u[0] - v[0], 2 * u[1] - v[1], 2 * u[2] - v[2]])
            .collect();
        let order = best_gadget_order(&defects, &gadget, q);
        for &site in &order {
            toggle_cells(&mut defects, site, q);
            out.push((site, q));
        }
    }
    out
}

/// Exhaustive search over the 24 orders of one gadget for the one with the
/// lowest intermediate peak; ties break toward the lexicographically first
/// permutation.
fn best_gadget_order(defects: &HashSet<Coord>, gadget: &[Coord], q: usize) -> Vec<Coord> {
    let idx = [0usize, 1, 2, 3];
    let mut best: Option<(usize, Vec<Coord>)> = None;
    permutations(&idx, &mut |perm| {
        let mut trial = defects.clone();
        let mut peak = 0usize;
        for &i in perm {
            toggle_cells(&mut trial, gadget[i], q);
            peak = peak.max(trial.len());
        }
        let order: Vec<Coord> = perm.iter().map(|&i| gadget[i]).collect();
        if best.as_ref().map_or(true, |(p, _)| peak < *p) {
            best = Some((peak, order));
        }
    });
    best.unwrap().1
}

fn permutations(items: &[usize; 4], f: &mut impl FnMut(&[usize])) {
    let mut idx = *items;
    // Heap's algorithm, fixed n = 4.
    fn heap(k: usize, arr: &mut [usize; 4], f: &mut impl FnMut(&[usize])) {
        if k == 1 {
            f(arr);
            return;
        }
        for i in 0..k {
            heap(k - 1, arr, f);
            if k % 2 == 0 {
                arr.swap(i, k - 1);
            } else {
                arr.swap(0, k - 1);
            }
        }
    }
    heap(4, &mut idx, f);
}

/// Evaluate a path's cost on the code's torus: the maximum defect count of
/// the accumulated operator over all prefixes.
pub fn path_cost(code: &CodeDescriptor, path: &ErrorPath) -> usize {
    use crate::code::Sector;
    let mut defects: HashSet<(usize, Sector)> = HashSet::new();
    let mut peak = 0usize;
    for &(site, q, letter) in &path.flips {
        let sector = match letter {
            PauliLetter::Z => Sector::XType,
            PauliLetter::X => Sector::ZType,
        };
        for cell in code.flipped_cells(sector, site, q) {
            let key = (code.cell_index(cell), sector);
            if !defects.insert(key) {
                defects.remove(&key);
            }
        }
        peak = peak.max(defects.len());
    }
    peak
}
