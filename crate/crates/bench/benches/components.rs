use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topomem_core::code::{Defect, DefectSet, Sector};
use topomem_core::geometry::connected_components;

fn random_syndrome(l: usize, density: f64, seed: u64) -> DefectSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = DefectSet::new();
    for x in 0..l as i64 {
        for y in 0..l as i64 {
            for z in 0..l as i64 {
                if rng.gen::<f64>() < density {
                    s.toggle(Defect::new([x, y, z], Sector::XType));
                }
            }
        }
    }
    s
}

fn bench_components(c: &mut Criterion) {
    let mut group = c.benchmark_group("connected_components");
    for &l in &[16usize, 32, 64] {
        let s = random_syndrome(l, 0.02, 5);
        for &r in &[2usize, 8] {
            group.bench_with_input(BenchmarkId::new(format!("L{l}"), r), &r, |b, &r| {
                b.iter(|| connected_components(&s, r, l).len());
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_components);
criterion_main!(benches);
