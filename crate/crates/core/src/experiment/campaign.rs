//! Memory-time campaigns: fan out independent thermal samples across a
//! worker pool, aggregate per-point summaries, and fit the size and
//! temperature scalings where the data allow.

use super::records::MemoryTimeRecord;
use super::{mix, param_key, stream};
use crate::code::{build_code, validate_lattice_size, CodeKind};
use crate::decoder::DecoderMode;
use crate::logical::logical_basis;
use crate::thermal::{censored_count, estimate_tau, memory_time_sample, ThermalConfig};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct CampaignOptions {
    pub betas: Vec<f64>,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub mode: DecoderMode,
    /// Censoring cutoff as a multiple of the trial interval.
    pub t_max_factor: f64,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions {
            betas: vec![4.0],
            sizes: vec![5],
            samples: 100,
            seed: 0,
            mode: DecoderMode::Specialized,
            t_max_factor: 1e4,
        }
    }
}

/// Aggregate of one (beta, L) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryTimeSummary {
    pub beta: f64,
    pub size: usize,
    pub tau: f64,
    pub ci: f64,
    pub n: usize,
    pub censored: usize,
    pub wall_seconds: f64,
}

/// Least-squares exponent of a power law y ~ x^a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub stderr: f64,
}

/// Fit `ln y = a ln x + b` and report the slope with its standard error.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<PowerLawFit> {
    fit_line(&points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect::<Vec<_>>())
        .map(|(a, se)| PowerLawFit { exponent: a, stderr: se })
}

/// Slope and its standard error of an ordinary least-squares line.
pub fn fit_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let stderr = if n > 2 {
        let ssr: f64 = points
            .iter()
            .map(|p| {
                let pred = my + slope * (p.0 - mx);
                (p.1 - pred).powi(2)
            })
            .sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some((slope, stderr))
}

/// Fitted scalings of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignFits {
    /// Per beta: exponent of tau(L) ~ L^a over the provided sizes.
    pub power_law: Vec<(f64, PowerLawFit)>,
    /// Slope and intercept of ln(max_L tau) vs beta^2, when >= 2 betas.
    pub quadratic_beta: Option<(f64, f64)>,
}

/// Run the campaign. Sizes must pass the validated-size certificate; samples
/// are embarrassingly parallel with one RNG stream per sample, so results do
/// not depend on worker count.
pub fn memory_time_campaign(
    opts: &CampaignOptions,
) -> Result<(Vec<MemoryTimeRecord>, Vec<MemoryTimeSummary>, CampaignFits)> {
    for &size in &opts.sizes {
        if !validate_lattice_size(size)? {
            return Err(Error::InvalidSize(size));
        }
    }
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &beta in &opts.betas {
        for &size in &opts.sizes {
            let start = Instant::now();
            let code = build_code(CodeKind::Cubic3d, size)?;
            logical_basis(&code)?;
            let config = ThermalConfig {
                t_max: opts.t_max_factor * ThermalConfig::new(beta, size).t_ec,
                mode: opts.mode,
                ..ThermalConfig::new(beta, size)
            };
            let point = param_key(&[size as u64, beta.to_bits()]);
            let samples: Vec<_> = (0..opts.samples as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream(opts.seed, mix(point, i));
                    memory_time_sample(&code, &config, &mut rng).map(|s| (i, s))
                })
                .collect::<Result<Vec<_>>>()?;
            for (i, s) in &samples {
                records.push(MemoryTimeRecord::new(
                    CodeKind::Cubic3d,
                    size,
                    beta,
                    opts.seed,
                    *i,
                    s.t_fail,
                    s.kind,
                ));
            }
            let raw: Vec<_> = samples.iter().map(|(_, s)| *s).collect();
            if let Ok((tau, ci)) = estimate_tau(&raw) {
                summaries.push(MemoryTimeSummary {
                    beta,
                    size,
                    tau,
                    ci,
                    n: raw.len(),
                    censored: censored_count(&raw),
                    wall_seconds: start.elapsed().as_secs_f64(),
                });
            }
        }
    }

    let mut power_law = Vec::new();
    for &beta in &opts.betas {
        let pts: Vec<(f64, f64)> = summaries
            .iter()
            .filter(|s| s.beta == beta)
            .map(|s| (s.size as f64, s.tau))
            .collect();
        if let Some(fit) = fit_power_law(&pts) {
            power_law.push((beta, fit));
        }
    }
    let quad_pts: Vec<(f64, f64)> = opts
        .betas
        .iter()
        .filter_map(|&beta| {
            summaries
                .iter()
                .filter(|s| s.beta == beta)
                .map(|s| s.tau)
                .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))))
                .map(|tau_max| (beta * beta, tau_max.ln()))
        })
        .collect();
    let quadratic_beta = if quad_pts.len() >= 2 {
        fit_line(&quad_pts).map(|(slope, _)| {
            let mx = quad_pts.iter().map(|p| p.0).sum::<f64>() / quad_pts.len() as f64;
            let my = quad_pts.iter().map(|p| p.1).sum::<f64>() / quad_pts.len() as f64;
            (slope, my - slope * mx)
        })
    } else {
        None
    };

    Ok((records, summaries, CampaignFits { power_law, quadratic_beta }))
}
