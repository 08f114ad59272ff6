//! End-to-end decoder correctness on small lattices.

use topomem_core::code::{build_code, syndrome, CodeKind, Sector};
use topomem_core::decoder::{ec_level, p_max, rg_decode, DecoderMode, Verdict};
use topomem_core::experiment::stream;
use topomem_core::logical::{classify, PauliClass};
use topomem_core::pauli::PauliOperator;

use rand::Rng;

fn decode_and_classify(
    code: &topomem_core::CodeDescriptor,
    err: &PauliOperator,
    mode: DecoderMode,
) -> Option<PauliClass> {
    let s = syndrome(code, err);
    let out = rg_decode(code, &s, mode);
    if !out.success() {
        return None;
    }
    Some(classify(code, &err.compose(&out.correction)).unwrap())
}

#[test]
fn all_single_qubit_errors_correct_on_l5() {
    let code = build_code(CodeKind::Cubic3d, 5).unwrap();
    let n = code.lattice.qubits();
    for mode in [DecoderMode::Specialized, DecoderMode::Standard] {
        for qubit in 0..n {
            for letter in 0..3 {
                let mut err = PauliOperator::identity(n);
                if letter != 1 {
                    err.flip_x(qubit);
                }
                if letter != 0 {
                    err.flip_z(qubit);
                }
                let class = decode_and_classify(&code, &err, mode);
                assert_eq!(
                    class,
                    Some(PauliClass::Stabilizer),
                    "qubit {qubit} letter {letter} mode {mode:?}"
                );
            }
        }
    }
}

#[test]
fn random_weight_two_errors_correct_on_l5() {
    let code = build_code(CodeKind::Cubic3d, 5).unwrap();
    let n = code.lattice.qubits();
    for case in 0..500u64 {
        let mut rng = stream(0x2ECC, case);
        let mut err = PauliOperator::identity(n);
        for _ in 0..2 {
            let q = rng.gen_range(0..n);
            if rng.gen::<bool>() {
                err.flip_x(q);
            } else {
                err.flip_z(q);
            }
        }
        let class = decode_and_classify(&code, &err, DecoderMode::Specialized);
        assert_eq!(class, Some(PauliClass::Stabilizer), "case {case}: {err}");
    }
}

#[test]
fn toric_short_strings_correct() {
    let code = build_code(CodeKind::Toric2d, 16).unwrap();
    let n = code.lattice.qubits();
    for case in 0..300u64 {
        let mut rng = stream(0x70C1, case);
        let mut err = PauliOperator::identity(n);
        // A few short X strings.
        for _ in 0..rng.gen_range(1..=3) {
            let start = [rng.gen_range(0..16i64), rng.gen_range(0..16i64), 0];
            let horizontal = rng.gen::<bool>();
            let len = rng.gen_range(1..=3i64);
            for k in 0..len {
                let site = if horizontal { [start[0] + k, start[1], 0] } else { [start[0], start[1] + k, 0] };
                err.flip_x(code.lattice.qubit_index(site, usize::from(!horizontal)));
            }
        }
        let class = decode_and_classify(&code, &err, DecoderMode::Standard);
        assert_eq!(class, Some(PauliClass::Stabilizer), "case {case}");
    }
}

#[test]
fn charged_pair_beyond_scale_is_left_alone() {
    // Two charged clusters at distance > 2^p keep the syndrome unchanged in
    // standard mode.
    let code = build_code(CodeKind::Toric2d, 16).unwrap();
    use topomem_core::code::{Defect, DefectSet};
    let s: DefectSet = [
        Defect::new([1, 1, 0], Sector::ZType),
        Defect::new([9, 1, 0], Sector::ZType),
    ]
    .into_iter()
    .collect();
    for p in 0..=p_max(&code) {
        let (q, next, trace) = ec_level(&code, &s, p, DecoderMode::Standard);
        assert!(q.is_identity(), "level {p}");
        assert_eq!(next, s);
        assert_eq!(trace.annihilated, 0);
    }
}

#[test]
fn defect_count_is_monotone_in_standard_mode() {
    let code = build_code(CodeKind::Cubic3d, 9).unwrap();
    let n = code.lattice.qubits();
    for case in 0..100u64 {
        let mut rng = stream(0x33CC, case);
        let mut err = PauliOperator::identity(n);
        for _ in 0..rng.gen_range(1..=12) {
            err.flip_x(rng.gen_range(0..n));
        }
        let mut s = syndrome(&code, &err);
        let mut last = s.len();
        for p in 0..=p_max(&code) {
            let (_, next, _) = ec_level(&code, &s, p, DecoderMode::Standard);
            assert!(next.len() <= last, "case {case} level {p}");
            last = next.len();
            s = next;
        }
    }
}

#[test]
fn residual_matches_recomputation_on_failures() {
    let code = build_code(CodeKind::Cubic3d, 7).unwrap();
    let n = code.lattice.qubits();
    let mut failures = 0;
    for case in 0..200u64 {
        let mut rng = stream(0xFA11, case);
        let mut err = PauliOperator::identity(n);
        for _ in 0..20 {
            err.flip_x(rng.gen_range(0..n));
        }
        let s = syndrome(&code, &err);
        let out = rg_decode(&code, &s, DecoderMode::Standard);
        let recomputed = s.xor(&syndrome(&code, &out.correction));
        assert_eq!(out.residual, recomputed, "case {case}");
        if out.verdict == Verdict::Failure {
            failures += 1;
            assert!(!out.residual.is_empty());
        }
    }
    // Dense 20-flip errors on L=7 should defeat the decoder at least once.
    assert!(failures > 0);
}

#[test]
fn trace_reports_examined_clusters() {
    let code = build_code(CodeKind::Cubic3d, 9).unwrap();
    let n = code.lattice.qubits();
    let mut err = PauliOperator::identity(n);
    err.flip_x(code.lattice.qubit_index([1, 1, 1], 0));
    err.flip_x(code.lattice.qubit_index([6, 6, 6], 1));
    let s = syndrome(&code, &err);
    let out = rg_decode(&code, &s, DecoderMode::Specialized);
    assert!(out.success());
    assert!(!out.trace.is_empty());
    let first = &out.trace[0];
    assert_eq!(first.level, 0);
    assert_eq!(first.examined, 2);
    assert_eq!(first.annihilated, 2);
    let log = out.log_lines();
    assert_eq!(log.lines().count(), 2);
    assert!(log.contains("p=0"));
    assert!(log.contains("annihilated"));
}
