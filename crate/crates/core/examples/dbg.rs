use rayon::prelude::*;
use std::time::Instant;
use topomem_core::code::{build_code, syndrome, CodeKind};
use topomem_core::decoder::{rg_decode, DecoderMode};
use topomem_core::experiment::noise::{sample_error, ErrorModel};
use topomem_core::experiment::{mix, param_key, stream};
use topomem_core::logical::logical_basis;
use topomem_core::pauli::PauliOperator;

fn main() {
    let start = Instant::now();
    let sizes = [8usize, 16, 24, 32];
    let rates = [0.05f64, 0.06, 0.065, 0.07, 0.08, 0.09];
    let trials = 10_000u64;
    let mut total = vec![vec![0.0f64; rates.len()]; sizes.len()];
    let mut aborts = vec![vec![0.0f64; rates.len()]; sizes.len()];
    for (si, &l) in sizes.iter().enumerate() {
        let code = build_code(CodeKind::Toric2d, l).unwrap();
        let z_reps: Vec<PauliOperator> =
            logical_basis(&code).unwrap().pairs.iter().map(|(_, z)| z.clone()).collect();
        for (ri, &p) in rates.iter().enumerate() {
            let key = param_key(&[l as u64, p.to_bits(), 1]);
            let (f, a): (u64, u64) = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = stream(123, mix(key, t));
                    let err = sample_error(&code, ErrorModel::PerQubit { p }, &mut rng);
                    let s = syndrome(&code, &err);
                    let out = rg_decode(&code, &s, DecoderMode::Standard);
                    if !out.success() {
                        return (1u64, 1u64);
                    }
                    let res = err.compose(&out.correction);
                    (u64::from(z_reps.iter().any(|z| res.symplectic(z) == 1)), 0u64)
                })
                .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
            total[si][ri] = f as f64 / trials as f64;
            aborts[si][ri] = a as f64 / trials as f64;
        }
    }
    for (name, data) in [("total", &total), ("abort-only", &aborts)] {
        println!("== {name}");
        for (si, &l) in sizes.iter().enumerate() {
            let row: Vec<String> = data[si].iter().map(|f| format!("{:.4}", f)).collect();
            println!("L={:2}: {}", l, row.join("  "));
        }
        // last-crossing estimator per consecutive pair
        for w in 0..sizes.len() - 1 {
            let (a, b) = (w, w + 1);
            let d: Vec<f64> = (0..rates.len()).map(|i| data[b][i] - data[a][i]).collect();
            for i in (0..rates.len() - 1).rev() {
                if d[i] < 0.0 && d[i + 1] >= 0.0 {
                    let (x0, x1) = (rates[i].ln(), rates[i + 1].ln());
                    let x = x0 + (x1 - x0) * (-d[i]) / (d[i + 1] - d[i]);
                    println!("  pair (L{},L{}): crossing {:.4}", sizes[a], sizes[b], x.exp());
                    break;
                }
            }
        }
    }
    println!("elapsed {:?}", start.elapsed());
}
