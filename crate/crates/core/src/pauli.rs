//! Bit-packed Pauli operators over GF(2).
//!
//! A Pauli on `n` qubits is stored as two bit arrays: a Y on qubit `i` sets
//! both `xmask[i]` and `zmask[i]`. Global phases are deliberately dropped;
//! composition is bitwise XOR and every operator is its own inverse.

use serde::{Deserialize, Serialize};

const WORD: usize = 64;

#[inline]
fn words(n: usize) -> usize {
    (n + WORD - 1) / WORD
}

/// Phase-free n-qubit Pauli operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    n: usize,
    xmask: Vec<u64>,
    zmask: Vec<u64>,
}

impl PauliOperator {
    /// Identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        PauliOperator { n, xmask: vec![0; words(n)], zmask: vec![0; words(n)] }
    }

    /// Build from packed mask words (padded or truncated to fit `n`).
    pub fn from_masks(n: usize, xmask: &[u64], zmask: &[u64]) -> Self {
        let w = words(n);
        let mut p = PauliOperator::identity(n);
        for i in 0..w.min(xmask.len()) {
            p.xmask[i] = xmask[i];
        }
        for i in 0..w.min(zmask.len()) {
            p.zmask[i] = zmask[i];
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_bit(&self, i: usize) -> bool {
        self.xmask[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, i: usize) -> bool {
        self.zmask[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn flip_x(&mut self, i: usize) {
        self.xmask[i / WORD] ^= 1 << (i % WORD);
    }

    #[inline]
    pub fn flip_z(&mut self, i: usize) {
        self.zmask[i / WORD] ^= 1 << (i % WORD);
    }

    pub fn set_x(&mut self, i: usize, v: bool) {
        let w = &mut self.xmask[i / WORD];
        let m = 1u64 << (i % WORD);
        if v { *w |= m } else { *w &= !m }
    }

    pub fn set_z(&mut self, i: usize, v: bool) {
        let w = &mut self.zmask[i / WORD];
        let m = 1u64 << (i % WORD);
        if v { *w |= m } else { *w &= !m }
    }

    /// In-place composition (bitwise XOR of both masks).
    pub fn compose_with(&mut self, other: &PauliOperator) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.xmask.iter_mut().zip(&other.xmask) {
            *a ^= b;
        }
        for (a, b) in self.zmask.iter_mut().zip(&other.zmask) {
            *a ^= b;
        }
    }

    /// `self ∘ other` as a new operator.
    pub fn compose(&self, other: &PauliOperator) -> PauliOperator {
        let mut out = self.clone();
        out.compose_with(other);
        out
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.xmask
            .iter()
            .zip(&self.zmask)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.xmask.iter().all(|w| *w == 0) && self.zmask.iter().all(|w| *w == 0)
    }

    /// Symplectic product: 1 iff the two operators anticommute.
    pub fn symplectic(&self, other: &PauliOperator) -> u8 {
        debug_assert_eq!(self.n, other.n);
        let mut acc = 0u32;
        for i in 0..self.xmask.len() {
            acc ^= (self.xmask[i] & other.zmask[i]).count_ones();
            acc ^= (self.zmask[i] & other.xmask[i]).count_ones();
        }
        (acc & 1) as u8
    }

    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        self.symplectic(other) == 0
    }

    /// Indices of qubits in the support.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for w in 0..self.xmask.len() {
            let mut bits = self.xmask[w] | self.zmask[w];
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(w * WORD + b);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Raw X mask words (for GF(2) routines).
    pub fn x_words(&self) -> &[u64] {
        &self.xmask
    }

    /// Raw Z mask words.
    pub fn z_words(&self) -> &[u64] {
        &self.zmask
    }
}

impl std::fmt::Display for PauliOperator {
    /// Sparse rendering such as `X3 Z17 Y40`; identity prints as `I`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for i in self.support() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let letter = match (self.x_bit(i), self.z_bit(i)) {
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
                (false, false) => unreachable!(),
            };
            write!(f, "{letter}{i}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_is_involutive() {
        let mut p = PauliOperator::identity(130);
        p.flip_x(0);
        p.flip_z(67);
        p.flip_x(129);
        p.flip_z(129);
        let q = p.clone();
        p.compose_with(&q);
        assert!(p.is_identity());
    }

    #[test]
    fn weight_counts_y_once() {
        let mut p = PauliOperator::identity(10);
        p.flip_x(3);
        p.flip_z(3);
        p.flip_z(7);
        assert_eq!(p.weight(), 2);
    }

    #[test]
    fn anticommutation_of_x_and_z() {
        let mut x = PauliOperator::identity(5);
        x.flip_x(2);
        let mut z = PauliOperator::identity(5);
        z.flip_z(2);
        assert_eq!(x.symplectic(&z), 1);
        let mut z_other = PauliOperator::identity(5);
        z_other.flip_z(3);
        assert_eq!(x.symplectic(&z_other), 0);
    }
}
