//! Logical operator extraction and Pauli classification.
//!
//! Logical representatives are computed from the GF(2) kernel of the
//! commutation constraints (CSS form: X-logicals are x-vectors commuting
//! with every Z-type generator, taken modulo the X-type generator span) and
//! paired symplectically.

use crate::code::{CodeDescriptor, CodeKind, Sector};
use crate::gf2::{self, BitMatrix};
use crate::pauli::PauliOperator;
use crate::{code, Error, Result};

/// Symplectically paired logical representatives.
#[derive(Debug, Clone)]
pub struct LogicalBasis {
    /// Code dimension exponent: the code space holds 2^k states.
    pub k: usize,
    /// `(X̄_i, Z̄_i)` pairs; X̄_i anticommutes with Z̄_i and commutes with
    /// every other representative and every generator.
    pub pairs: Vec<(PauliOperator, PauliOperator)>,
    /// True when `k` was cross-checked against the validated-size criterion
    /// (cubic code) or the torus homology count (toric code).
    pub validated: bool,
}

impl LogicalBasis {
    /// All 2k representatives, X̄s then Z̄s of each pair interleaved.
    pub fn representatives(&self) -> impl Iterator<Item = &PauliOperator> + '_ {
        self.pairs.iter().flat_map(|(x, z)| [x, z])
    }
}

/// Classification of a Pauli relative to the code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliClass {
    /// Element of the generator span.
    Stabilizer,
    /// Syndrome-free but acting non-trivially on the code space.
    NontrivialLogical,
    /// Non-empty syndrome.
    Detectable,
}

/// Cached row-reduced generator spans for membership tests.
#[derive(Debug)]
pub struct StabilizerSpan {
    x_rref: BitMatrix,
    x_pivots: Vec<usize>,
    z_rref: BitMatrix,
    z_pivots: Vec<usize>,
}

fn support_matrix(code: &CodeDescriptor, sector: Sector) -> BitMatrix {
    let n = code.lattice.qubits();
    let sites = code.lattice.sites();
    let mut m = BitMatrix::zero(sites, n);
    for (r, cell_idx) in (0..sites).enumerate() {
        let cell = code.lattice.site_coord(cell_idx);
        for &(off, q) in code.support_table(sector) {
            let site = [cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]];
            m.flip(r, code.lattice.qubit_index(site, q));
        }
    }
    m
}

pub(crate) fn stabilizer_span(code: &CodeDescriptor) -> &StabilizerSpan {
    code.span.get_or_init(|| {
        let mut x_rref = support_matrix(code, Sector::XType);
        let x_pivots = x_rref.rref();
        let mut z_rref = support_matrix(code, Sector::ZType);
        let z_pivots = z_rref.rref();
        StabilizerSpan { x_rref, x_pivots, z_rref, z_pivots }
    })
}

impl StabilizerSpan {
    /// True iff the operator is a product of generators.
    pub fn contains(&self, p: &PauliOperator) -> bool {
        let mut x = p.x_words().to_vec();
        self.x_rref.reduce_vec(&self.x_pivots, &mut x);
        if !gf2::vec_is_zero(&x) {
            return false;
        }
        let mut z = p.z_words().to_vec();
        self.z_rref.reduce_vec(&self.z_pivots, &mut z);
        gf2::vec_is_zero(&z)
    }
}

/// Representatives of one CSS side: kernel of `constraints` modulo the row
/// space of `span`. Returns exactly the quotient basis.
fn coset_basis(constraints: &BitMatrix, span_rref: &BitMatrix, span_pivots: &[usize], n: usize) -> Vec<Vec<u64>> {
    let mut c = constraints.clone();
    let piv = c.rref();
    let kernel = c.kernel_from_rref(&piv);
    // Reduce each kernel vector modulo the span, then keep an independent set.
    let mut reduced: Vec<Vec<u64>> = Vec::new();
    for mut v in kernel {
        span_rref.reduce_vec(span_pivots, &mut v);
        if !gf2::vec_is_zero(&v) {
            reduced.push(v);
        }
    }
    let mut m = BitMatrix::zero(reduced.len(), n);
    for (r, v) in reduced.iter().enumerate() {
        for i in 0..n {
            if gf2::vec_get(v, i) {
                m.set(r, i, true);
            }
        }
    }
    let piv = m.rref();
    (0..piv.len()).map(|r| m.row(r).to_vec()).collect()
}

/// Compute the logical basis of a code.
///
/// For the cubic code at validated sizes and the toric code, a computed
/// dimension other than k = 2 signals a generator-construction bug and is
/// reported as [`Error::DegenerateCodeSpace`]. Outside the validated list the
/// computed k stands, flagged unvalidated.
pub fn logical_basis(code: &CodeDescriptor) -> Result<&LogicalBasis> {
    code.logical
        .get_or_init(|| compute_logical_basis(code))
        .as_ref()
        .map_err(|e| e.clone())
}

fn compute_logical_basis(code: &CodeDescriptor) -> Result<LogicalBasis> {
    let n = code.lattice.qubits();
    let span = stabilizer_span(code);

    // X-logicals: x-vectors commuting with every Z-type generator, modulo
    // the X-type span; Z-logicals dually.
    let z_support = support_matrix(code, Sector::ZType);
    let x_support = support_matrix(code, Sector::XType);
    let mut x_reps = coset_basis(&z_support, &span.x_rref, &span.x_pivots, n);
    let mut z_reps = coset_basis(&x_support, &span.z_rref, &span.z_pivots, n);

    if x_reps.len() != z_reps.len() {
        return Err(Error::DegenerateCodeSpace { expected: x_reps.len(), found: z_reps.len() });
    }
    let k = x_reps.len();

    let expected = match code.kind {
        CodeKind::Toric2d => Some(2),
        CodeKind::Cubic3d => match code::validate_lattice_size(code.lattice.size) {
            Ok(true) => Some(2),
            _ => None,
        },
    };
    let validated = match expected {
        Some(e) if e == k => true,
        Some(e) => return Err(Error::DegenerateCodeSpace { expected: e, found: k }),
        None => false,
    };

    // Symplectic pairing: arrange <x_i, z_j> = delta_ij.
    for i in 0..k {
        let j = (i..k)
            .find(|&j| gf2::vec_dot(&x_reps[i], &z_reps[j]) == 1)
            .expect("non-degenerate symplectic form on the logical quotient");
        z_reps.swap(i, j);
        for j2 in 0..k {
            if j2 != i && gf2::vec_dot(&x_reps[i], &z_reps[j2]) == 1 {
                let (a, b) = index_two(&mut z_reps, j2, i);
                gf2::vec_xor(a, b);
            }
        }
        for i2 in 0..k {
            if i2 != i && gf2::vec_dot(&x_reps[i2], &z_reps[i]) == 1 {
                let (a, b) = index_two(&mut x_reps, i2, i);
                gf2::vec_xor(a, b);
            }
        }
    }

    let pairs = x_reps
        .into_iter()
        .zip(z_reps)
        .map(|(x, z)| {
            (PauliOperator::from_masks(n, &x, &[]), PauliOperator::from_masks(n, &[], &z))
        })
        .collect();
    Ok(LogicalBasis { k, pairs, validated })
}

fn index_two<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &T) {
    debug_assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

/// Classify a Pauli operator as stabilizer, non-trivial logical, or
/// detectable (non-empty syndrome).
pub fn classify(code: &CodeDescriptor, p: &PauliOperator) -> Result<PauliClass> {
    if !code::syndrome(code, p).is_empty() {
        return Ok(PauliClass::Detectable);
    }
    let basis = logical_basis(code)?;
    let commutes_all = basis.representatives().all(|rep| p.commutes_with(rep));
    if commutes_all && stabilizer_span(code).contains(p) {
        Ok(PauliClass::Stabilizer)
    } else {
        Ok(PauliClass::NontrivialLogical)
    }
}
