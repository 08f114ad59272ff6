//! Simulation laboratory for topological quantum memories.
//!
//! This crate implements two stabilizer code families on periodic lattices
//! (a 3D cubic code with two qubits per site and the 2D toric code), a
//! hierarchical renormalization-group decoder built on O(N) cluster
//! decomposition and an O(V) sweep ("broom") annihilator, continuous-time
//! Metropolis dynamics (BKL) for thermal noise, and experiment harnesses
//! that measure memory time and decoder error thresholds.
//!
//! Layout:
//!
//! - [`lattice`], [`pauli`], [`code`]: lattices, bit-packed Pauli algebra,
//!   stabilizer generators and syndromes.
//! - [`gf2`]: packed GF(2) linear algebra used by solvers and logical-operator
//!   extraction.
//! - [`logical`]: logical operator bases and error classification.
//! - [`geometry`]: periodic l-infinity geometry, r-connected components,
//!   minimal enclosing boxes.
//! - [`neutral`]: cluster neutrality tests and annihilation operators.
//! - [`decoder`]: level-p error correction and the full RG decoder.
//! - [`thermal`]: BKL dynamics and memory-time sampling.
//! - [`experiment`]: error models, threshold sweeps, chunk decomposition,
//!   hook paths, records and campaigns.

pub mod code;
pub mod decoder;
pub mod experiment;
pub mod geometry;
pub mod gf2;
pub mod lattice;
pub mod logical;
pub mod neutral;
pub mod pauli;
pub mod thermal;

mod error;

pub use code::{build_code, syndrome, validate_lattice_size, CodeDescriptor, CodeKind, Defect, DefectSet, Sector};
pub use decoder::{ec_level, p_max, rg_decode, DecodeOutcome, DecoderMode, Verdict};
pub use error::Error;
pub use geometry::{connected_components, distance, minimal_enclosing_box, Cluster, PeriodicBox};
pub use lattice::LatticeSpec;
pub use logical::{logical_basis, LogicalBasis, PauliClass};
pub use neutral::{broom_annihilate, solve_in_box, test_neutral, AnnihilationResult};
pub use pauli::PauliOperator;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
