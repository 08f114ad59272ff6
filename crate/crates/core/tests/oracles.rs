//! Oracle equivalence suites: every fast-path algorithm is checked against an
//! independent brute-force route on randomized inputs.

use std::collections::{HashMap, HashSet};

use topomem_core::code::{build_code, syndrome, CodeKind, Defect, DefectSet, Sector};
use topomem_core::experiment::chunks::{chunk_decompose, ChunkDecomposition};
use topomem_core::experiment::stream;
use topomem_core::geometry::{
    connected_components, distance, minimal_enclosing_box_of_cells,
};
use topomem_core::lattice::{Coord, LatticeSpec};
use topomem_core::neutral::{broom_annihilate, solve_in_box};
use topomem_core::pauli::PauliOperator;
use topomem_core::thermal::SimState;

use rand::Rng;

/// Naive O(m^2) union-find clustering used as the reference partition.
fn naive_components(cells: &[Coord], r: i64, l: usize) -> Vec<Vec<Coord>> {
    let n = cells.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if distance(cells[i], cells[j], l) <= r {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: HashMap<usize, Vec<Coord>> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(cells[i]);
    }
    let mut out: Vec<Vec<Coord>> = groups
        .into_values()
        .map(|mut v| {
            v.sort_unstable();
            v
        })
        .collect();
    out.sort_unstable();
    out
}

fn random_cells<R: Rng>(rng: &mut R, l: usize, max_count: usize, dims: usize) -> Vec<Coord> {
    let count = rng.gen_range(0..=max_count);
    let mut set = HashSet::new();
    for _ in 0..count {
        let mut c = [0i64; 3];
        for a in 0..dims {
            c[a] = rng.gen_range(0..l as i64);
        }
        set.insert(c);
    }
    set.into_iter().collect()
}

#[test]
fn components_match_pairwise_oracle() {
    // 10^3 random syndromes across sizes and scales, 3D and 2D.
    let mut cases = 0;
    for (case, &(l, dims)) in [(9usize, 3usize), (8, 3), (12, 3), (7, 2), (16, 2)]
        .iter()
        .cycle()
        .take(1000)
        .enumerate()
    {
        let mut rng = stream(0xC0_FFEE, case as u64);
        let cells = random_cells(&mut rng, l, 24, dims);
        let s: DefectSet = cells.iter().map(|&c| Defect::new(c, Sector::XType)).collect();
        for r in [1usize, 2, 4, 8] {
            let fast = connected_components(&s, r, l);
            let mut got: Vec<Vec<Coord>> = fast
                .iter()
                .map(|c| {
                    let mut v: Vec<Coord> = c.defects.iter().map(|d| d.cell).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            got.sort_unstable();
            let want = naive_components(&cells, r as i64, l);
            assert_eq!(got, want, "L={l} dims={dims} r={r} cells={cells:?}");
            cases += 1;
        }
    }
    assert!(cases >= 4000);
}

#[test]
fn component_monotonicity_in_scale() {
    for case in 0..200u64 {
        let mut rng = stream(0xA11CE, case);
        let cells = random_cells(&mut rng, 11, 18, 3);
        let s: DefectSet = cells.iter().map(|&c| Defect::new(c, Sector::ZType)).collect();
        let fine = connected_components(&s, 2, 11);
        let coarse = connected_components(&s, 5, 11);
        // Every 2-component must be contained in exactly one 5-component.
        for f in &fine {
            let hosts: Vec<_> = coarse
                .iter()
                .filter(|c| f.defects.iter().all(|d| c.defects.contains(d)))
                .collect();
            assert_eq!(hosts.len(), 1);
        }
    }
}

#[test]
fn inter_cluster_distance_exceeds_scale() {
    for case in 0..300u64 {
        let mut rng = stream(0xD15C0, case);
        let cells = random_cells(&mut rng, 10, 16, 3);
        let s: DefectSet = cells.iter().map(|&c| Defect::new(c, Sector::XType)).collect();
        let r = [1usize, 2, 3, 4][case as usize % 4];
        let comps = connected_components(&s, r, 10);
        // Partition: union restores the set, pairwise disjoint.
        let total: usize = comps.iter().map(|c| c.defects.len()).sum();
        assert_eq!(total, s.len());
        for (i, a) in comps.iter().enumerate() {
            for b in comps.iter().skip(i + 1) {
                let mut min_d = i64::MAX;
                for u in a.defects.iter() {
                    for v in b.defects.iter() {
                        min_d = min_d.min(distance(u.cell, v.cell, 10));
                    }
                }
                assert!(min_d > r as i64, "clusters closer than scale {r}");
            }
        }
    }
}

/// Exhaustive minimal enclosing interval: scan all L start offsets.
fn oracle_box(cells: &[Coord], l: usize) -> [i64; 3] {
    let ll = l as i64;
    let mut extents = [1i64; 3];
    for a in 0..3 {
        let coords: HashSet<i64> = cells.iter().map(|c| c[a].rem_euclid(ll)).collect();
        let mut best = ll;
        for start in 0..ll {
            let max_off = coords.iter().map(|&c| (c - start).rem_euclid(ll)).max().unwrap();
            best = best.min(max_off + 1);
        }
        extents[a] = best;
    }
    extents
}

#[test]
fn enclosing_box_matches_exhaustive_scan() {
    for case in 0..500u64 {
        let mut rng = stream(0xB0B0, case);
        let l = [5usize, 8, 9, 13][case as usize % 4];
        let cells = random_cells(&mut rng, l, 10, 3);
        if cells.is_empty() {
            continue;
        }
        let b = minimal_enclosing_box_of_cells(&cells, l);
        let want = oracle_box(&cells, l);
        assert_eq!(b.extents, want, "L={l} cells={cells:?}");
        for &c in &cells {
            assert!(b.contains(c, l));
        }
        // Minimality: shrinking any axis by one must exclude a member.
        for a in 0..3 {
            if b.extents[a] == 1 {
                continue;
            }
            let excluded = cells.iter().any(|&c| {
                let off = (c[a] - b.corner[a]).rem_euclid(l as i64);
                off == b.extents[a] - 1
            });
            assert!(excluded, "axis {a} shrinkable");
        }
    }
}

#[test]
fn spec_axis_examples_from_oracle() {
    // Dual centers {0.5, 7.5}, L=8: wrapped two-cell interval.
    assert_eq!(oracle_box(&[[0, 0, 0], [7, 0, 0]], 8)[0], 2);
    // Dual centers {0.5, 2.5, 5.5}, L=8: equal longest gaps; the minimal
    // interval covers six cells either way.
    assert_eq!(oracle_box(&[[0, 0, 0], [2, 0, 0], [5, 0, 0]], 8)[0], 6);
    let b = minimal_enclosing_box_of_cells(&[[0, 0, 0], [2, 0, 0], [5, 0, 0]], 8);
    assert!(b.ambiguous);
}

// ---------------------------------------------------------------------------
// Broom vs generic solver
// ---------------------------------------------------------------------------

/// Random Z-type operator supported in a box with the given corner/extent.
fn random_z_error_in_box<R: Rng>(
    code: &topomem_core::CodeDescriptor,
    rng: &mut R,
    corner: Coord,
    side: i64,
) -> PauliOperator {
    let mut p = PauliOperator::identity(code.lattice.qubits());
    let flips = rng.gen_range(1..=(side * side) as usize);
    for _ in 0..flips {
        let site = [
            corner[0] + rng.gen_range(0..side),
            corner[1] + rng.gen_range(0..side),
            corner[2] + rng.gen_range(0..side),
        ];
        let q = rng.gen_range(0..2);
        p.flip_z(code.lattice.qubit_index(site, q));
    }
    p
}

#[test]
fn broom_annihilates_random_neutral_clusters() {
    // Generate-and-check over random boxes up to side 8.
    let code = build_code(CodeKind::Cubic3d, 21).unwrap();
    let mut checked = 0;
    for case in 0..1000u64 {
        let mut rng = stream(0x5EED, case);
        let side = rng.gen_range(2..=8i64);
        let corner = [
            rng.gen_range(0..21i64),
            rng.gen_range(0..21i64),
            rng.gen_range(0..21i64),
        ];
        let err = random_z_error_in_box(&code, &mut rng, corner, side);
        let s = syndrome(&code, &err);
        if s.is_empty() {
            continue;
        }
        let b = topomem_core::geometry::minimal_enclosing_box(&s, 21);
        let r = broom_annihilate(&code, &s, &b, Sector::XType).unwrap();
        assert!(r.annihilated(), "case {case}: neutral cluster left residual {:?}", r.residual);
        assert_eq!(syndrome(&code, &r.operator), s, "case {case}: wrong syndrome");
        checked += 1;
    }
    assert!(checked > 900);
}

#[test]
fn broom_verdict_agrees_with_box_solver() {
    // Random (not necessarily neutral) defect patterns in boxes up to 6^3.
    let code = build_code(CodeKind::Cubic3d, 19).unwrap();
    let mut neutral_cases = 0;
    let mut charged_cases = 0;
    for case in 0..1000u64 {
        let mut rng = stream(0xAB1DE, case);
        let side = rng.gen_range(1..=6i64);
        let corner = [
            rng.gen_range(0..19i64),
            rng.gen_range(0..19i64),
            rng.gen_range(0..19i64),
        ];
        // Half the cases are syndromes of box-supported errors (neutral by
        // construction), half arbitrary patterns (almost always charged).
        let s: DefectSet = if case % 2 == 0 {
            let err = random_z_error_in_box(&code, &mut rng, corner, side.max(2));
            syndrome(&code, &err)
        } else {
            let mut cells = HashSet::new();
            for _ in 0..rng.gen_range(1..=10) {
                cells.insert([
                    corner[0] + rng.gen_range(0..side),
                    corner[1] + rng.gen_range(0..side),
                    corner[2] + rng.gen_range(0..side),
                ]);
            }
            cells
                .iter()
                .map(|&c| Defect::new(code.lattice.wrap(c), Sector::XType))
                .collect()
        };
        if s.is_empty() {
            continue;
        }
        let b = topomem_core::geometry::minimal_enclosing_box(&s, 19);
        let sweep = broom_annihilate(&code, &s, &b, Sector::XType).unwrap();
        let solved = solve_in_box(&code, &s, &b);
        assert_eq!(
            sweep.annihilated(),
            solved.is_some(),
            "case {case}: sweep and solver disagree on {s:?}"
        );
        if let Some(op) = solved {
            assert_eq!(syndrome(&code, &op), s);
            neutral_cases += 1;
        } else {
            charged_cases += 1;
        }
    }
    assert!(neutral_cases > 50, "want some neutral cases, got {neutral_cases}");
    assert!(charged_cases > 50, "want some charged cases, got {charged_cases}");
}

#[test]
fn neutrality_is_invariant_under_stabilizer_multiplication() {
    let code = build_code(CodeKind::Cubic3d, 15).unwrap();
    for case in 0..100u64 {
        let mut rng = stream(0x57AB, case);
        let corner = [rng.gen_range(0..15i64), rng.gen_range(0..15), rng.gen_range(0..15)];
        let err = random_z_error_in_box(&code, &mut rng, corner, 4);
        // Multiply by a Z-type generator inside the box: same syndrome class.
        let gcell = [
            corner[0] + rng.gen_range(0..3),
            corner[1] + rng.gen_range(0..3),
            corner[2] + rng.gen_range(0..3),
        ];
        let equivalent = err.compose(&code.generator(code.lattice.wrap(gcell), Sector::ZType));
        let (s1, s2) = (syndrome(&code, &err), syndrome(&code, &equivalent));
        assert_eq!(s1, s2, "stabilizers are syndrome-free");
    }
}

// ---------------------------------------------------------------------------
// delta_energy vs recomputation
// ---------------------------------------------------------------------------

#[test]
fn delta_energy_matches_full_syndrome_recomputation() {
    let code = build_code(CodeKind::Cubic3d, 7).unwrap();
    let n = code.lattice.qubits();
    let mut rng = stream(0xDE17A, 1);
    let mut state = SimState::new(&code, 0.9);
    for case in 0..10_000usize {
        let q = rng.gen_range(0..n);
        let predicted = state.delta_energy(q);
        let before = syndrome(&code, &state.error).len() as i64;
        state.flip(q);
        let after = syndrome(&code, &state.error).len() as i64;
        assert_eq!(after - before, predicted, "case {case} qubit {q}");
    }
}

// ---------------------------------------------------------------------------
// Chunk decomposition vs exhaustive oracle
// ---------------------------------------------------------------------------

/// Exponential-time exact chunk oracle: enumerate all subsets.
fn oracle_e_levels(sites: &[Coord], q: usize, l: usize) -> Vec<HashSet<Coord>> {
    let m = sites.len();
    assert!(m <= 12);
    // is_chunk[n] holds the subset masks that are level-n chunks.
    let mut level_masks: Vec<HashSet<u32>> = Vec::new();
    level_masks.push((0..m as u32).map(|i| 1u32 << i).collect());
    loop {
        let prev = level_masks.last().unwrap();
        let n = level_masks.len() as u32;
        let mut next: HashSet<u32> = HashSet::new();
        let bound = (q as i64).saturating_pow(n);
        let prev_vec: Vec<u32> = prev.iter().copied().collect();
        for (i, &a) in prev_vec.iter().enumerate() {
            for &b in &prev_vec[i + 1..] {
                if a & b != 0 {
                    continue;
                }
                let u = a | b;
                let mut diam = 0i64;
                let members: Vec<Coord> = (0..m)
                    .filter(|i| u >> i & 1 == 1)
                    .map(|i| sites[i])
                    .collect();
                for (x, &p1) in members.iter().enumerate() {
                    for &p2 in &members[x + 1..] {
                        diam = diam.max(distance(p1, p2, l));
                    }
                }
                if 2 * diam <= bound {
                    next.insert(u);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level_masks.push(next);
    }
    level_masks
        .iter()
        .map(|masks| {
            let mut e = HashSet::new();
            for &mask in masks {
                for i in 0..m {
                    if mask >> i & 1 == 1 {
                        e.insert(sites[i]);
                    }
                }
            }
            e
        })
        .collect()
}

fn decomposition_e_levels(d: &ChunkDecomposition) -> Vec<HashSet<Coord>> {
    (0..d.levels.len()).map(|n| d.e_level(n).into_iter().collect()).collect()
}

#[test]
fn chunks_match_exhaustive_oracle() {
    let lat = LatticeSpec::new(3, 60, 2);
    for case in 0..1000u64 {
        let mut rng = stream(0xC4A9, case);
        let count = rng.gen_range(1..=12usize);
        let mut sites = HashSet::new();
        // Mix local clumps and spread-out sites so all levels get exercised.
        let clump = [rng.gen_range(0..60i64), rng.gen_range(0..60), rng.gen_range(0..60)];
        for _ in 0..count {
            let local = rng.gen_bool(0.6);
            let c = if local {
                [
                    clump[0] + rng.gen_range(-6..=6i64),
                    clump[1] + rng.gen_range(-6..=6),
                    clump[2] + rng.gen_range(-6..=6),
                ]
            } else {
                [rng.gen_range(0..60i64), rng.gen_range(0..60), rng.gen_range(0..60)]
            };
            sites.insert(lat.wrap(c));
        }
        let sites: Vec<Coord> = sites.into_iter().collect();
        let d = chunk_decompose(&sites, 10, &lat).unwrap();
        let got = decomposition_e_levels(&d);
        let want = oracle_e_levels(&sites, 10, 60);
        assert_eq!(got.len(), want.len(), "case {case}: depth mismatch");
        for (n, (g, w)) in got.iter().zip(&want).enumerate() {
            assert_eq!(g, w, "case {case} level {n}");
        }
        assert!(d.check_structure(&lat), "case {case}: structure proposition violated");
    }
}
