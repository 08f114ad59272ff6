//! iid error models: the per-qubit bit-flip benchmark model and the
//! site-based occupancy model used by the chunk diagnostics.

use crate::code::CodeDescriptor;
use crate::lattice::{Coord, LatticeSpec};
use crate::pauli::PauliOperator;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Which iid model to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ErrorModel {
    /// Every qubit suffers an independent X with probability `p`
    /// (the threshold-benchmark model).
    PerQubit { p: f64 },
    /// Every site is occupied independently with probability `epsilon`; an
    /// occupied site receives X flips by the per-code sub-model (cubic: each
    /// of the two qubits independently with probability 1/2; toric: one of
    /// the two qubits, chosen uniformly).
    SiteOccupancy { epsilon: f64 },
}

/// Sites occupied under the site model.
pub fn sample_iid_sites<R: Rng>(epsilon: f64, lattice: &LatticeSpec, rng: &mut R) -> Vec<Coord> {
    let mut out = Vec::new();
    for i in 0..lattice.sites() {
        if rng.gen::<f64>() < epsilon {
            out.push(lattice.site_coord(i));
        }
    }
    out
}

/// Draw an X-type error operator from the model.
pub fn sample_error<R: Rng>(code: &CodeDescriptor, model: ErrorModel, rng: &mut R) -> PauliOperator {
    let lat = &code.lattice;
    let mut p = PauliOperator::identity(lat.qubits());
    match model {
        ErrorModel::PerQubit { p: rate } => {
            for q in 0..lat.qubits() {
                if rng.gen::<f64>() < rate {
                    p.flip_x(q);
                }
            }
        }
        ErrorModel::SiteOccupancy { epsilon } => {
            for site in sample_iid_sites(epsilon, lat, rng) {
                match code.kind {
                    crate::code::CodeKind::Cubic3d => {
                        for q in 0..2 {
                            if rng.gen::<bool>() {
                                p.flip_x(lat.qubit_index(site, q));
                            }
                        }
                    }
                    crate::code::CodeKind::Toric2d => {
                        let q = usize::from(rng.gen::<bool>());
                        p.flip_x(lat.qubit_index(site, q));
                    }
                }
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::stream;

    #[test]
    fn extreme_rates() {
        let lat = LatticeSpec::new(3, 10, 2);
        let mut rng = stream(1, 0);
        assert!(sample_iid_sites(0.0, &lat, &mut rng).is_empty());
        assert_eq!(sample_iid_sites(1.0, &lat, &mut rng).len(), 1000);
    }

    #[test]
    fn occupancy_mean_matches_binomial() {
        let lat = LatticeSpec::new(3, 10, 2);
        let eps = 0.05;
        let draws = 10_000usize;
        let mut total = 0usize;
        for i in 0..draws {
            let mut rng = stream(99, i as u64);
            total += sample_iid_sites(eps, &lat, &mut rng).len();
        }
        let mean = total as f64 / draws as f64;
        let expect = eps * 1000.0;
        let sigma = (1000.0 * eps * (1.0 - eps) / draws as f64).sqrt();
        assert!((mean - expect).abs() < 3.0 * sigma, "mean {mean} vs {expect} +- {sigma}");
    }
}
