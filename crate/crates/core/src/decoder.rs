//! The hierarchical RG decoder: level-p error correction over p = 0..p_max.

use crate::code::{syndrome, CodeDescriptor, DefectSet};
use crate::geometry::{connected_components, PeriodicBox};
use crate::neutral::test_neutral;
use crate::pauli::PauliOperator;
use serde::{Deserialize, Serialize};

/// Cluster annihilation policy.
///
/// `Standard` annihilates only provably neutral clusters and is the default
/// for threshold benchmarks. `Specialized` applies the recorded sweep
/// operator in any case and is the default inside the thermal simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecoderMode {
    Standard,
    Specialized,
}

impl std::str::FromStr for DecoderMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(DecoderMode::Standard),
            "specialized" => Ok(DecoderMode::Specialized),
            other => Err(format!("unknown decoder mode `{other}`")),
        }
    }
}

/// Decode verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Success,
    Failure,
}

/// One examined cluster in the trace.
#[derive(Debug, Clone)]
pub struct ClusterTrace {
    pub bounding: PeriodicBox,
    pub annihilated: bool,
}

/// Per-level decoding trace.
#[derive(Debug, Clone)]
pub struct LevelTrace {
    pub level: u32,
    pub examined: usize,
    pub annihilated: usize,
    pub clusters: Vec<ClusterTrace>,
}

/// Full decoder outcome. On success the residual is empty and the correction
/// reproduces the input syndrome; on failure the correction still accounts
/// for the annihilated part.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub verdict: Verdict,
    pub correction: PauliOperator,
    pub trace: Vec<LevelTrace>,
    pub residual: DefectSet,
}

impl DecodeOutcome {
    pub fn success(&self) -> bool {
        self.verdict == Verdict::Success
    }

    /// Line-oriented text log: one line per examined cluster.
    pub fn log_lines(&self) -> String {
        let mut out = String::new();
        for lvl in &self.trace {
            for c in &lvl.clusters {
                out.push_str(&format!(
                    "p={} box={} verdict={}\n",
                    lvl.level,
                    c.bounding,
                    if c.annihilated { "annihilated" } else { "kept" }
                ));
            }
        }
        out
    }
}

/// Largest integer p such that 2^p is below both L/2 and the
/// topological-order scale; clamped at 0 for degenerate sizes.
pub fn p_max(code: &CodeDescriptor) -> u32 {
    let l = code.lattice.size as u64;
    let l_tqo = code.l_tqo as u64;
    let mut p = 0u32;
    while (2u64 << (p + 1)) < 2 * l_tqo && (2u64 << (p + 1)) < l {
        p += 1;
    }
    p
}

/// One level of error correction: partition the syndrome into
/// 2^p-connected components and try to annihilate each.
pub fn ec_level(
    code: &CodeDescriptor,
    s: &DefectSet,
    p: u32,
    mode: DecoderMode,
) -> (PauliOperator, DefectSet, LevelTrace) {
    let scale = 1usize << p;
    let clusters = connected_components(s, scale, code.lattice.size);
    let mut q = PauliOperator::identity(code.lattice.qubits());
    let mut annihilated = 0usize;
    let mut cluster_traces = Vec::with_capacity(clusters.len());
    let mut next = s.clone();
    for cluster in &clusters {
        let r = test_neutral(code, cluster, mode);
        if r.annihilated() {
            annihilated += 1;
        }
        if !r.operator.is_identity() {
            q.compose_with(&r.operator);
            next = next.xor(&cluster.defects).xor(&r.residual);
        }
        cluster_traces.push(ClusterTrace { bounding: cluster.bounding, annihilated: r.annihilated() });
    }
    debug_assert_eq!(next, s.xor(&syndrome(code, &q)), "level bookkeeping out of sync");
    let trace =
        LevelTrace { level: p, examined: clusters.len(), annihilated, clusters: cluster_traces };
    (q, next, trace)
}

/// Full RG decode: run `ec_level` for p = 0..p_max, accumulating the
/// correction; succeed iff the syndrome empties. The input is never mutated
/// (trial decodes run on copies).
pub fn rg_decode(code: &CodeDescriptor, s: &DefectSet, mode: DecoderMode) -> DecodeOutcome {
    let mut correction = PauliOperator::identity(code.lattice.qubits());
    let mut current = s.clone();
    let mut trace = Vec::new();
    for p in 0..=p_max(code) {
        if current.is_empty() {
            break;
        }
        let (q, next, lvl) = ec_level(code, &current, p, mode);
        correction.compose_with(&q);
        current = next;
        trace.push(lvl);
    }
    let verdict = if current.is_empty() { Verdict::Success } else { Verdict::Failure };
    DecodeOutcome { verdict, correction, trace, residual: current }
}
