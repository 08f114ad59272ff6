//! Property tests for the core algebraic and geometric invariants.

use proptest::prelude::*;

use topomem_core::code::{build_code, syndrome, CodeKind, Defect, DefectSet, Sector};
use topomem_core::experiment::records::{
    memory_csv, parse_memory_csv, parse_threshold_csv, threshold_csv, MemoryTimeRecord,
    ThresholdRecord,
};
use topomem_core::geometry::{connected_components, minimal_enclosing_box_of_cells};
use topomem_core::pauli::PauliOperator;
use topomem_core::thermal::FailureKind;

fn flips() -> impl Strategy<Value = Vec<(usize, bool)>> {
    prop::collection::vec((0usize..250, any::<bool>()), 0..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn syndrome_additivity(a in flips(), b in flips()) {
        let code = build_code(CodeKind::Cubic3d, 5).unwrap();
        let build = |list: &Vec<(usize, bool)>| {
            let mut p = PauliOperator::identity(250);
            for &(q, x) in list {
                if x { p.flip_x(q) } else { p.flip_z(q) }
            }
            p
        };
        let (pa, pb) = (build(&a), build(&b));
        prop_assert_eq!(
            syndrome(&code, &pa.compose(&pb)),
            syndrome(&code, &pa).xor(&syndrome(&code, &pb))
        );
    }

    #[test]
    fn components_partition_the_syndrome(
        cells in prop::collection::hash_set(([0i64..11, 0i64..11, 0i64..11]), 0..26),
        r in 1usize..9,
    ) {
        let s: DefectSet = cells.iter().map(|&c| Defect::new(c, Sector::XType)).collect();
        let comps = connected_components(&s, r, 11);
        let total: usize = comps.iter().map(|c| c.defects.len()).sum();
        prop_assert_eq!(total, s.len());
        let mut seen = DefectSet::new();
        for c in &comps {
            for d in c.defects.iter() {
                prop_assert!(!seen.contains(d), "defect in two components");
                seen.toggle(*d);
            }
        }
        prop_assert_eq!(seen, s);
    }

    #[test]
    fn enclosing_box_contains_and_is_tight(
        cells in prop::collection::hash_set(([0i64..13, 0i64..13, 0i64..13]), 1..10),
    ) {
        let v: Vec<[i64; 3]> = cells.into_iter().collect();
        let b = minimal_enclosing_box_of_cells(&v, 13);
        for &c in &v {
            prop_assert!(b.contains(c, 13));
        }
        for a in 0..3 {
            prop_assert!(b.extents[a] >= 1 && b.extents[a] <= 13);
        }
    }

    #[test]
    fn memory_records_round_trip(
        size in 3usize..40,
        beta in 0.1f64..8.0,
        seed in any::<u64>(),
        sample in any::<u64>(),
        t in 1e-3f64..1e12,
        kind_pick in 0u8..3,
    ) {
        let kind = match kind_pick {
            0 => FailureKind::DecoderAbort,
            1 => FailureKind::NontrivialLogical,
            _ => FailureKind::Censored,
        };
        let rec = MemoryTimeRecord::new(CodeKind::Cubic3d, size, beta, seed, sample, t, kind);
        let parsed = parse_memory_csv(&memory_csv(&[rec.clone()])).unwrap();
        prop_assert_eq!(&parsed[..], &[rec.clone()][..]);
        let json: MemoryTimeRecord =
            serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        prop_assert_eq!(json, rec);
    }

    #[test]
    fn threshold_records_round_trip(
        size in 3usize..64,
        rate in 1e-4f64..0.5,
        seed in any::<u64>(),
        trials in 1u64..1_000_000,
        failures in 0u64..1_000_000,
    ) {
        let rec = ThresholdRecord {
            code: CodeKind::Toric2d,
            size,
            rate: topomem_core::experiment::records::round_sig9(rate),
            seed,
            trials,
            failures: failures.min(trials),
        };
        let parsed = parse_threshold_csv(&threshold_csv(&[rec.clone()])).unwrap();
        prop_assert_eq!(&parsed[..], &[rec][..]);
    }
}

#[test]
fn estimate_tau_recovers_synthetic_exponential() {
    // 10^3 exponential draws with true tau = 100: estimate within 3 ci.
    use rand::Rng;
    let mut rng = topomem_core::experiment::stream(0x7a0, 0);
    let samples: Vec<_> = (0..1000)
        .map(|_| {
            let u: f64 = 1.0 - rng.gen::<f64>();
            topomem_core::thermal::MemorySample {
                t_fail: -100.0 * u.ln(),
                kind: FailureKind::DecoderAbort,
            }
        })
        .collect();
    let (tau, ci) = topomem_core::thermal::estimate_tau(&samples).unwrap();
    assert!((tau - 100.0).abs() < 3.0 * ci, "tau {tau} ci {ci}");
}
