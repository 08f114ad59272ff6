//! Stabilizer code definitions: the 3D cubic code and the 2D toric code.
//!
//! Both codes are CSS with one X-type and one Z-type generator per lattice
//! cell. Generators are described by fixed support tables (offsets from the
//! cell corner, qubit index); Pauli masks are materialized on demand so that
//! large lattices never store the full generator list.
//!
//! Coordinate conventions for the cubic code: a cell `c` (an elementary cube)
//! is addressed by the integer coordinate of one corner; its dual center sits
//! at `c + (1/2,1/2,1/2)`. Qubit pairs per site are indexed 0/1 matching the
//! left/right letters of the two-qubit labels. A single-qubit X or Z error
//! flips exactly four generators, a Y flips eight.

use crate::lattice::{Coord, LatticeSpec};
use crate::logical::{LogicalBasis, StabilizerSpan};
use crate::pauli::PauliOperator;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::OnceLock;

/// Generator sector. X-type generators are flipped by Z errors and vice versa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// Pure-X generators (cubic `G^X`, toric stars).
    XType,
    /// Pure-Z generators (cubic `G^Z`, toric plaquettes).
    ZType,
}

impl Sector {
    pub fn other(self) -> Sector {
        match self {
            Sector::XType => Sector::ZType,
            Sector::ZType => Sector::XType,
        }
    }
}

/// Code family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeKind {
    Cubic3d,
    Toric2d,
}

impl std::fmt::Display for CodeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CodeKind::Cubic3d => write!(f, "cubic3d"),
            CodeKind::Toric2d => write!(f, "toric2d"),
        }
    }
}

impl std::str::FromStr for CodeKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cubic3d" | "cubic" => Ok(CodeKind::Cubic3d),
            "toric2d" | "toric" => Ok(CodeKind::Toric2d),
            other => Err(format!("unknown code kind `{other}`")),
        }
    }
}

/// One flipped generator: the cell it lives on plus its sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Defect {
    pub cell: Coord,
    pub sector: Sector,
}

impl Defect {
    pub fn new(cell: Coord, sector: Sector) -> Self {
        Defect { cell, sector }
    }
}

/// A syndrome: the set of flipped generators. Symmetric difference is the
/// group operation and the defect count is the energy (J = 1/2 units).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefectSet {
    defects: BTreeSet<Defect>,
}

impl DefectSet {
    pub fn new() -> Self {
        DefectSet::default()
    }

    pub fn from_iter<I: IntoIterator<Item = Defect>>(iter: I) -> Self {
        let mut s = DefectSet::new();
        for d in iter {
            s.toggle(d);
        }
        s
    }

    /// Flip membership of one defect.
    pub fn toggle(&mut self, d: Defect) {
        if !self.defects.remove(&d) {
            self.defects.insert(d);
        }
    }

    pub fn contains(&self, d: &Defect) -> bool {
        self.defects.contains(d)
    }

    pub fn len(&self) -> usize {
        self.defects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Defect> + '_ {
        self.defects.iter()
    }

    /// Symmetric difference with another set.
    pub fn xor(&self, other: &DefectSet) -> DefectSet {
        let mut out = self.clone();
        for d in other.iter() {
            out.toggle(*d);
        }
        out
    }

    /// Defects of one sector only.
    pub fn sector(&self, sector: Sector) -> DefectSet {
        DefectSet {
            defects: self.defects.iter().filter(|d| d.sector == sector).copied().collect(),
        }
    }
}

impl FromIterator<Defect> for DefectSet {
    fn from_iter<I: IntoIterator<Item = Defect>>(iter: I) -> Self {
        DefectSet::from_iter(iter)
    }
}

/// Cubic `G^X` support: X letters on the cube's eight vertices.
const CUBIC_X_SUPPORT: &[(Coord, usize)] = &[
    ([0, 0, 0], 0),
    ([0, 1, 1], 0),
    ([1, 0, 1], 0),
    ([1, 1, 0], 0),
    ([1, 0, 0], 1),
    ([0, 1, 0], 1),
    ([1, 1, 1], 1),
    ([1, 1, 0], 1),
];

/// Cubic `G^Z` support.
const CUBIC_Z_SUPPORT: &[(Coord, usize)] = &[
    ([0, 0, 0], 0),
    ([0, 0, 1], 0),
    ([1, 0, 1], 0),
    ([0, 1, 1], 0),
    ([1, 0, 0], 1),
    ([0, 1, 0], 1),
    ([0, 0, 1], 1),
    ([1, 1, 1], 1),
];

/// Toric star (X-type) at a vertex: the four incident edges.
const TORIC_X_SUPPORT: &[(Coord, usize)] = &[
    ([0, 0, 0], 0),
    ([-1, 0, 0], 0),
    ([0, 0, 0], 1),
    ([0, -1, 0], 1),
];

/// Toric plaquette (Z-type) on a face: the four bounding edges.
const TORIC_Z_SUPPORT: &[(Coord, usize)] = &[
    ([0, 0, 0], 0),
    ([0, 1, 0], 0),
    ([0, 0, 0], 1),
    ([1, 0, 0], 1),
];

/// An immutable code instance; shareable across threads, all operations pure.
#[derive(Debug)]
pub struct CodeDescriptor {
    pub kind: CodeKind,
    pub lattice: LatticeSpec,
    /// Topological-order scale: boxes up to this vertex diameter are locally
    /// correctable.
    pub l_tqo: usize,
    /// No-strings aspect-ratio constant (5 for the cubic code).
    pub alpha: usize,
    pub(crate) logical: OnceLock<Result<LogicalBasis>>,
    pub(crate) span: OnceLock<StabilizerSpan>,
}

/// Build a code instance on an `L`-periodic lattice.
pub fn build_code(kind: CodeKind, size: usize) -> Result<CodeDescriptor> {
    if size < 3 {
        return Err(Error::InvalidSize(size));
    }
    let lattice = match kind {
        CodeKind::Cubic3d => LatticeSpec::new(3, size, 2),
        CodeKind::Toric2d => LatticeSpec::new(2, size, 2),
    };
    let alpha = match kind {
        CodeKind::Cubic3d => 5,
        CodeKind::Toric2d => 1,
    };
    // Topological-order scale: L/2 for the cubic code by convention; the
    // toric code is string-free up to boxes missing one full column, so its
    // true scale L-2 applies.
    let l_tqo = match kind {
        CodeKind::Cubic3d => size / 2,
        CodeKind::Toric2d => size - 2,
    };
    Ok(CodeDescriptor {
        kind,
        lattice,
        l_tqo,
        alpha,
        logical: OnceLock::new(),
        span: OnceLock::new(),
    })
}

/// Certificate that the cubic code at size `L` has code dimension k(L) = 2:
/// true iff `L` is odd and not a multiple of 15 or 63. Stated only for
/// `3 <= L <= 200`.
pub fn validate_lattice_size(size: usize) -> Result<bool> {
    if size < 3 {
        return Err(Error::InvalidSize(size));
    }
    if size > 200 {
        return Err(Error::OutOfValidatedRange(size));
    }
    Ok(size % 2 == 1 && size % 15 != 0 && size % 63 != 0)
}

impl CodeDescriptor {
    /// Support table (offset, qubit) of a generator of the given sector.
    pub fn support_table(&self, sector: Sector) -> &'static [(Coord, usize)] {
        match (self.kind, sector) {
            (CodeKind::Cubic3d, Sector::XType) => CUBIC_X_SUPPORT,
            (CodeKind::Cubic3d, Sector::ZType) => CUBIC_Z_SUPPORT,
            (CodeKind::Toric2d, Sector::XType) => TORIC_X_SUPPORT,
            (CodeKind::Toric2d, Sector::ZType) => TORIC_Z_SUPPORT,
        }
    }

    /// Number of generators (equals the qubit count for both families).
    pub fn generator_count(&self) -> usize {
        2 * self.lattice.sites()
    }

    /// All generator ids in a fixed order.
    pub fn generators(&self) -> impl Iterator<Item = Defect> + '_ {
        let sites = self.lattice.sites();
        (0..sites).flat_map(move |i| {
            let cell = self.lattice.site_coord(i);
            [Defect::new(cell, Sector::XType), Defect::new(cell, Sector::ZType)]
        })
    }

    /// Materialize the Pauli mask of one generator.
    pub fn generator(&self, cell: Coord, sector: Sector) -> PauliOperator {
        let mut p = PauliOperator::identity(self.lattice.qubits());
        for &(off, q) in self.support_table(sector) {
            let site = [cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]];
            let idx = self.lattice.qubit_index(site, q);
            match sector {
                Sector::XType => p.flip_x(idx),
                Sector::ZType => p.flip_z(idx),
            }
        }
        p
    }

    /// Cells of `sector` generators flipped by a single-qubit letter of the
    /// opposite type on `(site, q)`. A Z letter flips X-type generators and
    /// an X letter flips Z-type generators; cells are returned unwrapped.
    pub fn flipped_cells(&self, gen_sector: Sector, site: Coord, q: usize) -> Vec<Coord> {
        self.support_table(gen_sector)
            .iter()
            .filter(|(_, tq)| *tq == q)
            .map(|(off, _)| [site[0] - off[0], site[1] - off[1], site[2] - off[2]])
            .collect()
    }

    /// Wrapped dense index of a cell (one per site coordinate).
    pub fn cell_index(&self, cell: Coord) -> usize {
        self.lattice.site_index(cell)
    }
}

/// Syndrome of a Pauli operator: the set of generators anticommuting with it.
///
/// Computed sparsely from the operator's support; satisfies
/// `S(P∘Q) = S(P) ⊕ S(Q)`.
pub fn syndrome(code: &CodeDescriptor, p: &PauliOperator) -> DefectSet {
    let mut s = DefectSet::new();
    for idx in p.support() {
        let (site, q) = code.lattice.qubit_coord(idx);
        if p.z_bit(idx) {
            for cell in code.flipped_cells(Sector::XType, site, q) {
                s.toggle(Defect::new(code.lattice.wrap(cell), Sector::XType));
            }
        }
        if p.x_bit(idx) {
            for cell in code.flipped_cells(Sector::ZType, site, q) {
                s.toggle(Defect::new(code.lattice.wrap(cell), Sector::ZType));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letters_at(code: &CodeDescriptor, cell: Coord, sector: Sector, v: Coord) -> (bool, bool) {
        // (qubit0 acted, qubit1 acted) at cube vertex cell + v
        let g = code.generator(cell, sector);
        let site = [cell[0] + v[0], cell[1] + v[1], cell[2] + v[2]];
        let i0 = code.lattice.qubit_index(site, 0);
        let i1 = code.lattice.qubit_index(site, 1);
        match sector {
            Sector::XType => (g.x_bit(i0), g.x_bit(i1)),
            Sector::ZType => (g.z_bit(i0), g.z_bit(i1)),
        }
    }

    /// The eight cube vertices in the order the double-letter patterns are
    /// spelled (front-top-left, front-top-right, front-bottom-left, ...).
    const VERTEX_ORDER: [Coord; 8] = [
        [1, 0, 1],
        [0, 0, 1],
        [1, 1, 1],
        [0, 1, 1],
        [0, 1, 0],
        [1, 1, 0],
        [0, 0, 0],
        [1, 0, 0],
    ];

    #[test]
    fn cubic_generator_patterns_are_bit_exact() {
        let code = build_code(CodeKind::Cubic3d, 4).unwrap();
        let cell = [1, 2, 0];
        // (q0, q1) letter presence per vertex: ZI ZZ IZ ZI IZ II ZI IZ
        let z_pattern = [
            (true, false),
            (true, true),
            (false, true),
            (true, false),
            (false, true),
            (false, false),
            (true, false),
            (false, true),
        ];
        // XI II IX XI IX XX XI IX
        let x_pattern = [
            (true, false),
            (false, false),
            (false, true),
            (true, false),
            (false, true),
            (true, true),
            (true, false),
            (false, true),
        ];
        for (i, v) in VERTEX_ORDER.iter().enumerate() {
            assert_eq!(letters_at(&code, cell, Sector::ZType, *v), z_pattern[i], "Z vertex {i}");
            assert_eq!(letters_at(&code, cell, Sector::XType, *v), x_pattern[i], "X vertex {i}");
        }
        assert_eq!(code.generator(cell, Sector::XType).weight(), 8);
        assert_eq!(code.generator(cell, Sector::ZType).weight(), 8);
    }

    #[test]
    fn counts_match_for_both_codes() {
        let cubic = build_code(CodeKind::Cubic3d, 5).unwrap();
        assert_eq!(cubic.lattice.qubits(), 250);
        assert_eq!(cubic.generator_count(), 250);
        let toric = build_code(CodeKind::Toric2d, 8).unwrap();
        assert_eq!(toric.lattice.qubits(), 128);
        assert_eq!(toric.generator_count(), 128);
        assert_eq!(toric.generators().filter(|d| d.sector == Sector::ZType).count(), 64);
        assert_eq!(toric.generators().filter(|d| d.sector == Sector::XType).count(), 64);
    }

    #[test]
    fn small_size_is_rejected() {
        assert_eq!(build_code(CodeKind::Cubic3d, 2).unwrap_err(), Error::InvalidSize(2));
    }

    #[test]
    fn all_generator_pairs_commute_exhaustively() {
        for (kind, l) in [(CodeKind::Cubic3d, 3), (CodeKind::Cubic3d, 4), (CodeKind::Toric2d, 4)] {
            let code = build_code(kind, l).unwrap();
            let gens: Vec<PauliOperator> =
                code.generators().map(|d| code.generator(d.cell, d.sector)).collect();
            for i in 0..gens.len() {
                for j in i + 1..gens.len() {
                    assert!(gens[i].commutes_with(&gens[j]), "{kind} L={l} pair ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn single_qubit_defect_counts() {
        let code = build_code(CodeKind::Cubic3d, 5).unwrap();
        for idx in [0usize, 17, 249] {
            let mut x = PauliOperator::identity(250);
            x.flip_x(idx);
            assert_eq!(syndrome(&code, &x).len(), 4);
            let mut z = PauliOperator::identity(250);
            z.flip_z(idx);
            assert_eq!(syndrome(&code, &z).len(), 4);
            let y = x.compose(&z);
            assert_eq!(syndrome(&code, &y).len(), 8);
        }
        // Toric: single X flips two plaquettes, single Z two stars.
        let toric = build_code(CodeKind::Toric2d, 6).unwrap();
        let mut x = PauliOperator::identity(toric.lattice.qubits());
        x.flip_x(5);
        assert_eq!(syndrome(&toric, &x).len(), 2);
    }

    #[test]
    fn syndrome_matches_dense_symplectic_definition() {
        let code = build_code(CodeKind::Cubic3d, 3).unwrap();
        let n = code.lattice.qubits();
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            rng_state
        };
        for _ in 0..20 {
            let mut p = PauliOperator::identity(n);
            for _ in 0..6 {
                let i = (next() % n as u64) as usize;
                if next() & 1 == 0 {
                    p.flip_x(i);
                } else {
                    p.flip_z(i);
                }
            }
            let s = syndrome(&code, &p);
            for d in code.generators() {
                let g = code.generator(d.cell, d.sector);
                assert_eq!(g.symplectic(&p) == 1, s.contains(&d));
            }
        }
    }

    #[test]
    fn syndrome_is_additive() {
        let code = build_code(CodeKind::Cubic3d, 4).unwrap();
        let n = code.lattice.qubits();
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 11
        };
        for _ in 0..50 {
            let mut p = PauliOperator::identity(n);
            let mut q = PauliOperator::identity(n);
            for _ in 0..10 {
                p.flip_x((next() % n as u64) as usize);
                q.flip_z((next() % n as u64) as usize);
            }
            let lhs = syndrome(&code, &p.compose(&q));
            let rhs = syndrome(&code, &p).xor(&syndrome(&code, &q));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn lattice_size_validation() {
        assert!(validate_lattice_size(5).unwrap());
        assert!(validate_lattice_size(9).unwrap());
        assert!(!validate_lattice_size(15).unwrap());
        assert!(!validate_lattice_size(63).unwrap());
        assert!(!validate_lattice_size(189).unwrap());
        assert!(!validate_lattice_size(6).unwrap());
        assert_eq!(validate_lattice_size(201).unwrap_err(), Error::OutOfValidatedRange(201));
        assert_eq!(validate_lattice_size(2).unwrap_err(), Error::InvalidSize(2));
    }
}
