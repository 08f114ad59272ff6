//! Threshold campaigns under iid bit-flip noise with the standard decoder.

use super::records::ThresholdRecord;
use super::{mix, param_key, stream};
use crate::code::{build_code, syndrome, CodeKind};
use crate::decoder::{rg_decode, DecoderMode};
use crate::experiment::noise::{sample_error, ErrorModel};
use crate::logical::logical_basis;
use crate::pauli::PauliOperator;
use crate::Result;
use rayon::prelude::*;

/// Campaign parameters.
#[derive(Debug, Clone)]
pub struct ThresholdOptions {
    pub kind: CodeKind,
    pub sizes: Vec<usize>,
    pub rates: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub mode: DecoderMode,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            kind: CodeKind::Toric2d,
            sizes: vec![8, 16, 24, 32],
            rates: vec![0.05, 0.06, 0.065, 0.07, 0.08, 0.09],
            trials: 10_000,
            seed: 0,
            mode: DecoderMode::Standard,
        }
    }
}

/// Failure fraction per (L, p) point: a trial fails when the decoder aborts
/// or the residual acts on the code space. Failure counts are reproducible
/// bit-for-bit from `(seed, parameters)` regardless of worker count.
pub fn threshold_sweep(opts: &ThresholdOptions) -> Result<Vec<ThresholdRecord>> {
    let mut out = Vec::new();
    for &size in &opts.sizes {
        let code = build_code(opts.kind, size)?;
        let z_reps: Vec<PauliOperator> =
            logical_basis(&code)?.pairs.iter().map(|(_, z)| z.clone()).collect();
        for &rate in &opts.rates {
            let point_key = param_key(&[size as u64, rate.to_bits(), 1]);
            let failures: u64 = (0..opts.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = stream(opts.seed, mix(point_key, trial));
                    let err = sample_error(&code, ErrorModel::PerQubit { p: rate }, &mut rng);
                    let s = syndrome(&code, &err);
                    let outcome = rg_decode(&code, &s, opts.mode);
                    if !outcome.success() {
                        return 1u64;
                    }
                    let residual = err.compose(&outcome.correction);
                    u64::from(z_reps.iter().any(|z| residual.symplectic(z) == 1))
                })
                .sum();
            out.push(ThresholdRecord {
                code: opts.kind,
                size,
                rate,
                seed: opts.seed,
                trials: opts.trials,
                failures,
            });
        }
    }
    Ok(out)
}

/// Wilson score interval for a binomial fraction.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Point estimate of the threshold: the crossing of failure-fraction curves
/// for consecutive sizes, linearly interpolated in log p, averaged over the
/// size pairs that do cross.
pub fn crossing_estimate(records: &[ThresholdRecord]) -> Option<f64> {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut crossings = Vec::new();
    for w in sizes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let curve = |size: usize| -> Vec<(f64, f64)> {
            let mut pts: Vec<(f64, f64)> = records
                .iter()
                .filter(|r| r.size == size)
                .map(|r| (r.rate, r.failure_fraction()))
                .collect();
            pts.sort_by(|x, y| x.0.total_cmp(&y.0));
            pts
        };
        let ca = curve(a);
        let cb = curve(b);
        if ca.len() != cb.len() || ca.is_empty() {
            continue;
        }
        // d(p) = f_large(p) - f_small(p) changes sign at the crossing.
        let d: Vec<(f64, f64)> =
            ca.iter().zip(&cb).map(|(&(p, fa), &(_, fb))| (p, fb - fa)).collect();
        for pair in d.windows(2) {
            let (p0, d0) = pair[0];
            let (p1, d1) = pair[1];
            if d0 == 0.0 {
                crossings.push(p0);
                break;
            }
            if d0 < 0.0 && d1 >= 0.0 {
                let (x0, x1) = (p0.ln(), p1.ln());
                let x = x0 + (x1 - x0) * (-d0) / (d1 - d0);
                crossings.push(x.exp());
                break;
            }
        }
    }
    if crossings.is_empty() {
        None
    } else {
        Some(crossings.iter().sum::<f64>() / crossings.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_never_fails() {
        let opts = ThresholdOptions {
            kind: CodeKind::Toric2d,
            sizes: vec![8],
            rates: vec![0.0],
            trials: 50,
            seed: 1,
            mode: DecoderMode::Standard,
        };
        let recs = threshold_sweep(&opts).unwrap();
        assert_eq!(recs[0].failures, 0);
    }

    #[test]
    fn sweep_is_reproducible() {
        let opts = ThresholdOptions {
            kind: CodeKind::Toric2d,
            sizes: vec![8],
            rates: vec![0.08],
            trials: 200,
            seed: 33,
            mode: DecoderMode::Standard,
        };
        let a = threshold_sweep(&opts).unwrap();
        let b = threshold_sweep(&opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wilson_brackets_fraction() {
        let (lo, hi) = wilson_interval(50, 1000, 1.96);
        assert!(lo < 0.05 && 0.05 < hi);
        assert!(lo > 0.03 && hi < 0.07);
    }

    #[test]
    fn crossing_on_synthetic_curves() {
        // f_L(p) crosses between sizes exactly at p = 0.07.
        let mut records = Vec::new();
        for (size, slope) in [(8usize, 1.0f64), (16, 2.0)] {
            for rate in [0.05, 0.06, 0.07, 0.08, 0.09] {
                let f = 0.5 + slope * (rate - 0.07);
                records.push(ThresholdRecord {
                    code: CodeKind::Toric2d,
                    size,
                    rate,
                    seed: 0,
                    trials: 1_000_000,
                    failures: (f * 1e6) as u64,
                });
            }
        }
        let pc = crossing_estimate(&records).unwrap();
        assert!((pc - 0.07).abs() < 1e-3, "pc = {pc}");
    }
}
