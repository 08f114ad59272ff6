//! Continuous-time Metropolis (BKL) dynamics of the bit-flip error
//! configuration at inverse temperature beta, with periodic trial decoding.
//!
//! Only X flips on the 2L^3 qubits are simulated (one CSS sector; the other
//! follows by duality), so the simulation is purely classical: the error is
//! a bit array, the syndrome a binary array over the L^3 cells. Rates take
//! the Metropolis form min(1, e^(-beta dE)) with unit attempt frequency; a
//! single-qubit flip changes the defect count by an even integer in [-4, 4],
//! so rates fall into five classes and move selection is O(1) per event.

use crate::code::{CodeDescriptor, CodeKind, Defect, DefectSet, Sector};
use crate::decoder::{rg_decode, DecoderMode};
use crate::logical::logical_basis;
use crate::pauli::PauliOperator;
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Parameters of one thermal memory-time experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThermalConfig {
    /// Inverse temperature (coupling J = 1/2, so one defect costs energy 1).
    pub beta: f64,
    pub size: usize,
    /// Trial-decode interval; defaults to e^(4 beta) / 100.
    pub t_ec: f64,
    /// Simulation cutoff; samples still alive here are censored.
    pub t_max: f64,
    pub seed: u64,
    pub mode: DecoderMode,
}

impl ThermalConfig {
    pub fn new(beta: f64, size: usize) -> Self {
        assert!(beta > 0.0, "beta must be positive");
        let t_ec = (4.0 * beta).exp() / 100.0;
        ThermalConfig { beta, size, t_ec, t_max: 1e4 * t_ec, seed: 0, mode: DecoderMode::Specialized }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }
}

/// Metropolis acceptance rate min(1, e^(-beta dE)).
pub fn metropolis_rate(d_e: i64, beta: f64) -> f64 {
    if d_e <= 0 {
        1.0
    } else {
        (-beta * d_e as f64).exp()
    }
}

/// How one sample ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureKind {
    /// The decoder could not remove all defects.
    DecoderAbort,
    /// Decoding succeeded but the residual acts on the code space.
    NontrivialLogical,
    /// Still alive at `t_max`.
    Censored,
}

impl std::fmt::Display for FailureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FailureKind::DecoderAbort => write!(f, "decoder-abort"),
            FailureKind::NontrivialLogical => write!(f, "nontrivial-logical"),
            FailureKind::Censored => write!(f, "censored"),
        }
    }
}

impl std::str::FromStr for FailureKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "decoder-abort" => Ok(FailureKind::DecoderAbort),
            "nontrivial-logical" => Ok(FailureKind::NontrivialLogical),
            "censored" => Ok(FailureKind::Censored),
            other => Err(format!("unknown failure kind `{other}`")),
        }
    }
}

/// One Monte Carlo outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemorySample {
    /// Failure time; for uncensored samples an integer multiple of `t_ec`.
    pub t_fail: f64,
    pub kind: FailureKind,
}

/// Evolving error configuration with incremental defect and rate tables.
///
/// Invariants (checked by [`SimState::check_consistency`]): the defect grid
/// equals the syndrome of the error, each qubit's rate class matches the
/// defect count of its four incident cells, and the total rate is the exact
/// sum over classes.
pub struct SimState<'a> {
    code: &'a CodeDescriptor,
    pub beta: f64,
    /// X part of the accumulated error.
    pub error: PauliOperator,
    /// Defect occupancy per cell (Z-type generators).
    defect: Vec<bool>,
    defect_count: usize,
    /// Per-qubit count of defective incident cells (0..=4).
    incident_defects: Vec<u8>,
    /// Rate class per defective-neighbor count: rate = min(1, e^(-beta(4-2c))).
    class_rate: [f64; 5],
    /// Qubits per class plus positional index for O(1) swap-removal.
    buckets: [Vec<u32>; 5],
    slot: Vec<u32>,
    /// Cached tables: cells touched by a qubit flip, qubits touching a cell.
    qubit_cells: Vec<[u32; 4]>,
    cell_qubits: Vec<[u32; 8]>,
    /// Continuous simulation clock.
    pub clock: f64,
    steps: u64,
}

impl<'a> SimState<'a> {
    /// Vacuum state at inverse temperature beta.
    pub fn new(code: &'a CodeDescriptor, beta: f64) -> Self {
        assert_eq!(code.kind, CodeKind::Cubic3d, "thermal dynamics target the cubic code");
        let lat = &code.lattice;
        let n = lat.qubits();
        let cells = lat.sites();
        let mut qubit_cells = vec![[0u32; 4]; n];
        let mut cell_qubits = vec![[0u32; 8]; cells];
        let mut fill = vec![0usize; cells];
        for idx in 0..n {
            let (site, q) = lat.qubit_coord(idx);
            let touched = code.flipped_cells(Sector::ZType, site, q);
            debug_assert_eq!(touched.len(), 4);
            for (k, cell) in touched.iter().enumerate() {
                let ci = code.cell_index(*cell);
                qubit_cells[idx][k] = ci as u32;
                cell_qubits[ci][fill[ci]] = idx as u32;
                fill[ci] += 1;
            }
        }
        debug_assert!(fill.iter().all(|&f| f == 8));
        let class_rate =
            [metropolis_rate(4, beta), metropolis_rate(2, beta), 1.0, 1.0, 1.0];
        let mut buckets: [Vec<u32>; 5] = Default::default();
        buckets[0] = (0..n as u32).collect();
        let slot = (0..n as u32).collect();
        SimState {
            code,
            beta,
            error: PauliOperator::identity(n),
            defect: vec![false; cells],
            defect_count: 0,
            incident_defects: vec![0; n],
            class_rate,
            buckets,
            slot,
            qubit_cells,
            cell_qubits,
            clock: 0.0,
            steps: 0,
        }
    }

    pub fn defect_count(&self) -> usize {
        self.defect_count
    }

    /// Defect-count change of flipping X on `qubit`, from the four incident
    /// cells in O(1).
    pub fn delta_energy(&self, qubit: usize) -> i64 {
        4 - 2 * self.incident_defects[qubit] as i64
    }

    /// Exact total rate, summed per class.
    pub fn total_rate(&self) -> f64 {
        self.buckets
            .iter()
            .zip(&self.class_rate)
            .map(|(b, r)| b.len() as f64 * r)
            .sum()
    }

    fn move_bucket(&mut self, qubit: u32, from: usize, to: usize) {
        let pos = self.slot[qubit as usize] as usize;
        let last = *self.buckets[from].last().unwrap();
        self.buckets[from].swap_remove(pos);
        if pos < self.buckets[from].len() {
            self.slot[last as usize] = pos as u32;
        }
        self.slot[qubit as usize] = self.buckets[to].len() as u32;
        self.buckets[to].push(qubit);
    }

    /// Apply an X flip, updating defects and rate classes of the O(1)
    /// neighborhood.
    pub fn flip(&mut self, qubit: usize) {
        self.error.flip_x(qubit);
        for k in 0..4 {
            let cell = self.qubit_cells[qubit][k] as usize;
            let now = !self.defect[cell];
            self.defect[cell] = now;
            let delta: i8 = if now { 1 } else { -1 };
            self.defect_count = (self.defect_count as i64 + delta as i64) as usize;
            let qubits = self.cell_qubits[cell];
            for nq in qubits {
                let from = self.incident_defects[nq as usize] as usize;
                let to = (from as i8 + delta) as usize;
                self.incident_defects[nq as usize] = to as u8;
                self.move_bucket(nq, from, to);
            }
        }
    }

    /// One BKL event: pick a qubit with probability proportional to its rate,
    /// draw the waiting time, and apply the flip.
    pub fn bkl_step<R: Rng>(&mut self, rng: &mut R) -> Result<(usize, f64)> {
        let (qubit, dt) = self.propose(rng)?;
        self.flip(qubit);
        self.clock += dt;
        self.steps += 1;
        #[cfg(debug_assertions)]
        {
            if self.steps % (1 << 16) == 0 {
                self.check_consistency();
            }
        }
        Ok((qubit, dt))
    }

    /// Sample the next move and waiting time without applying them.
    pub fn propose<R: Rng>(&self, rng: &mut R) -> Result<(usize, f64)> {
        let total = self.total_rate();
        if total <= 0.0 {
            return Err(Error::FrozenState);
        }
        let mut u = rng.gen::<f64>() * total;
        let mut class = 4;
        for c in 0..5 {
            let mass = self.buckets[c].len() as f64 * self.class_rate[c];
            if u < mass {
                class = c;
                break;
            }
            u -= mass;
        }
        // Floating slack can spill past the last nonempty class.
        while self.buckets[class].is_empty() {
            class = (class + 4) % 5;
        }
        let qubit = self.buckets[class][rng.gen_range(0..self.buckets[class].len())] as usize;
        let dt = -(1.0 - rng.gen::<f64>()).ln() / total;
        Ok((qubit, dt))
    }

    /// Export the current syndrome as a defect set.
    pub fn syndrome_snapshot(&self) -> DefectSet {
        let lat = &self.code.lattice;
        (0..self.defect.len())
            .filter(|&i| self.defect[i])
            .map(|i| Defect::new(lat.site_coord(i), Sector::ZType))
            .collect()
    }

    /// Recompute everything from scratch and compare against the maintained
    /// tables; the rate comparison is exact because the total is always
    /// re-summed per class.
    pub fn check_consistency(&self) {
        let s = crate::code::syndrome(self.code, &self.error);
        let maintained = self.syndrome_snapshot();
        assert_eq!(s, maintained, "defect grid diverged from syndrome");
        for q in 0..self.incident_defects.len() {
            let cnt = (0..4)
                .filter(|&k| self.defect[self.qubit_cells[q][k] as usize])
                .count();
            assert_eq!(cnt as u8, self.incident_defects[q], "incident count at qubit {q}");
        }
    }
}

/// Evolve a fresh state from the vacuum, trial-decoding a copy of the
/// syndrome every `t_ec`; report the first failing trial or censor at
/// `t_max`.
pub fn memory_time_sample<R: Rng>(
    code: &CodeDescriptor,
    config: &ThermalConfig,
    rng: &mut R,
) -> Result<MemorySample> {
    let basis = logical_basis(code)?;
    let z_reps: Vec<&PauliOperator> = basis.pairs.iter().map(|(_, z)| z).collect();
    let mut state = SimState::new(code, config.beta);
    let mut trial = 1u64;
    loop {
        let (qubit, dt) = state.propose(rng)?;
        let event_time = state.clock + dt;
        // Trials scheduled strictly before the next event see the current
        // configuration.
        while (trial as f64) * config.t_ec <= event_time {
            let t_trial = trial as f64 * config.t_ec;
            if t_trial > config.t_max {
                return Ok(MemorySample { t_fail: config.t_max, kind: FailureKind::Censored });
            }
            if let Some(kind) = run_trial(code, &state, &z_reps, config.mode) {
                return Ok(MemorySample { t_fail: t_trial, kind });
            }
            trial += 1;
        }
        state.flip(qubit);
        state.clock = event_time;
        if state.clock > config.t_max {
            return Ok(MemorySample { t_fail: config.t_max, kind: FailureKind::Censored });
        }
    }
}

fn run_trial(
    code: &CodeDescriptor,
    state: &SimState,
    z_reps: &[&PauliOperator],
    mode: DecoderMode,
) -> Option<FailureKind> {
    if state.defect_count() == 0 {
        return None;
    }
    let snapshot = state.syndrome_snapshot();
    let outcome = rg_decode(code, &snapshot, mode);
    if !outcome.success() {
        return Some(FailureKind::DecoderAbort);
    }
    // Residual error after correction is X-only and syndrome-free; it acts
    // on the code space iff it anticommutes with some logical Z.
    let residual = state.error.compose(&outcome.correction);
    if z_reps.iter().any(|z| residual.symplectic(z) == 1) {
        return Some(FailureKind::NontrivialLogical);
    }
    None
}

/// Sample mean of the uncensored failure times and its standard error
/// (sample standard deviation over sqrt(n)). Censored samples are excluded;
/// the caller learns how many via [`censored_count`].
pub fn estimate_tau(samples: &[MemorySample]) -> Result<(f64, f64)> {
    let times: Vec<f64> = samples
        .iter()
        .filter(|s| s.kind != FailureKind::Censored)
        .map(|s| s.t_fail)
        .collect();
    if times.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: times.len() });
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

pub fn censored_count(samples: &[MemorySample]) -> usize {
    samples.iter().filter(|s| s.kind == FailureKind::Censored).count()
}
