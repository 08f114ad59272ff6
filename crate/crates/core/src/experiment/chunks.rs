//! Hierarchical chunk decomposition of error-site sets.
//!
//! A level-0 chunk is a single site; a level-n chunk is a disjoint union of
//! two level-(n-1) chunks with diameter at most Q^n / 2. With E_n the union
//! of all level-n chunks, the decomposition reports the disjoint layers
//! F_n = E_n \ E_{n+1}. A high maximum level flags error geometry capable of
//! confusing the hierarchical decoder.

use crate::geometry::distance;
use crate::lattice::{Coord, LatticeSpec};
use crate::{Error, Result};
use std::collections::HashSet;

/// Decomposition output: disjoint site layers `F_0 ..= F_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkDecomposition {
    pub q: usize,
    /// `levels[n]` is F_n; the union over n restores the input set.
    pub levels: Vec<Vec<Coord>>,
    /// Largest n with E_n nonempty.
    pub max_level: usize,
}

/// Guard against pathological chunk growth on dense inputs.
const CHUNK_BUDGET: usize = 200_000;

/// Q^n / 2 compared without overflow: is `2 * d <= Q^n`?
fn within_chunk_diameter(d: i64, q: usize, n: u32) -> bool {
    match (q as u128).checked_pow(n) {
        Some(bound) => (2 * d as i128) as u128 as i128 <= bound as i128,
        None => true,
    }
}

fn set_diameter(sites: &[u32], coords: &[Coord], l: usize) -> i64 {
    let mut d = 0;
    for (i, &a) in sites.iter().enumerate() {
        for &b in &sites[i + 1..] {
            d = d.max(distance(coords[a as usize], coords[b as usize], l));
        }
    }
    d
}

/// Compute the chunk decomposition of a site set.
///
/// Level-(n+1) membership is certified constructively: the level-n chunks are
/// enumerated (deduplicated) and paired greedily; a site belongs to E_{n+1}
/// iff it lies in some disjoint pair of level-n chunks whose union satisfies
/// the diameter bound.
pub fn chunk_decompose(e: &[Coord], q: usize, lattice: &LatticeSpec) -> Result<ChunkDecomposition> {
    if q < 6 {
        return Err(Error::QTooSmall(q));
    }
    let l = lattice.size;
    let coords: Vec<Coord> = {
        let mut v: Vec<Coord> = e.iter().map(|c| lattice.wrap(*c)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let m = coords.len();
    if m == 0 {
        return Ok(ChunkDecomposition { q, levels: vec![Vec::new()], max_level: 0 });
    }

    // chunks[n] holds the level-n chunks as sorted index lists.
    let mut chunks: Vec<Vec<u32>> = (0..m as u32).map(|i| vec![i]).collect();
    let mut membership: Vec<HashSet<u32>> = vec![(0..m as u32).collect()];

    let mut level = 1u32;
    loop {
        let mut next: Vec<Vec<u32>> = Vec::new();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for i in 0..chunks.len() {
            for j in i + 1..chunks.len() {
                let (a, b) = (&chunks[i], &chunks[j]);
                if a.iter().any(|x| b.contains(x)) {
                    continue;
                }
                let mut union: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
                union.sort_unstable();
                if seen.contains(&union) {
                    continue;
                }
                if !within_chunk_diameter(set_diameter(&union, &coords, l), q, level) {
                    continue;
                }
                seen.insert(union.clone());
                next.push(union);
                if next.len() > CHUNK_BUDGET {
                    return Err(Error::ChunkBudgetExceeded(CHUNK_BUDGET));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        let mut e_n: HashSet<u32> = HashSet::new();
        for c in &next {
            e_n.extend(c.iter().copied());
        }
        membership.push(e_n);
        chunks = next;
        level += 1;
    }

    let max_level = membership.len() - 1;
    let mut levels = Vec::with_capacity(max_level + 1);
    for n in 0..=max_level {
        let empty = HashSet::new();
        let above = membership.get(n + 1).unwrap_or(&empty);
        let mut f_n: Vec<Coord> = membership[n]
            .iter()
            .filter(|i| !above.contains(i))
            .map(|&i| coords[i as usize])
            .collect();
        f_n.sort_unstable();
        levels.push(f_n);
    }
    Ok(ChunkDecomposition { q, levels, max_level })
}

impl ChunkDecomposition {
    /// Union of the layers (the input set, deduplicated).
    pub fn all_sites(&self) -> Vec<Coord> {
        let mut v: Vec<Coord> = self.levels.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    /// E_n: union of layers n and above.
    pub fn e_level(&self, n: usize) -> Vec<Coord> {
        let mut v: Vec<Coord> = self.levels[n..].iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    /// Structure check: every Q^n-connected component of F_n has diameter at
    /// most Q^n and is separated from the rest of E_n by more than Q^(n+1)/3.
    pub fn check_structure(&self, lattice: &LatticeSpec) -> bool {
        let l = lattice.size;
        for n in 0..self.levels.len() {
            let qn = (self.q as i64).saturating_pow(n as u32);
            let f_n = &self.levels[n];
            let e_n = self.e_level(n);
            for comp in components_at_scale(f_n, qn, l) {
                let mut d = 0;
                for (i, &a) in comp.iter().enumerate() {
                    for &b in &comp[i + 1..] {
                        d = d.max(distance(a, b, l));
                    }
                }
                if d > qn {
                    return false;
                }
                for &u in &comp {
                    for &v in &e_n {
                        if comp.contains(&v) {
                            continue;
                        }
                        // distance must exceed Q^(n+1)/3
                        if 3 * distance(u, v, l) <= (self.q as i64).saturating_pow(n as u32 + 1) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Plain pairwise component labeling used only for the structure check.
fn components_at_scale(sites: &[Coord], r: i64, l: usize) -> Vec<Vec<Coord>> {
    let n = sites.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if distance(sites[i], sites[j], l) <= r {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::HashMap<usize, Vec<Coord>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(sites[i]);
    }
    groups.into_values().collect()
}
