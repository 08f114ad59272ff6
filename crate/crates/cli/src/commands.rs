//! Subcommand implementations.

use crate::Common;
use anyhow::{bail, Context};
use std::io::Write;
use std::path::Path;

use topomem_core::code::{build_code, syndrome, CodeKind, Defect, DefectSet, Sector};
use topomem_core::decoder::{rg_decode, DecoderMode};
use topomem_core::experiment::campaign::{memory_time_campaign, CampaignOptions};
use topomem_core::experiment::chunks::chunk_decompose;
use topomem_core::experiment::hooks::{hook_path, path_cost};
use topomem_core::experiment::noise::sample_iid_sites;
use topomem_core::experiment::records;
use topomem_core::experiment::threshold::{
    crossing_estimate, threshold_sweep, wilson_interval, ThresholdOptions,
};
use topomem_core::experiment::stream;
use topomem_core::logical::{classify, PauliClass};
use topomem_core::pauli::PauliOperator;

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

struct Resolved {
    code: CodeKind,
    sizes: Vec<usize>,
    betas: Vec<f64>,
    rates: Vec<f64>,
    samples: u64,
    seed: u64,
    mode: DecoderMode,
    format: Format,
    out: Option<std::path::PathBuf>,
}

fn resolve(c: &Common, default_code: CodeKind, default_mode: DecoderMode) -> anyhow::Result<Resolved> {
    let code = match &c.code {
        Some(s) => s.parse::<CodeKind>().map_err(|e| anyhow::anyhow!(e))?,
        None => default_code,
    };
    let mode = match &c.mode {
        Some(s) => s.parse::<DecoderMode>().map_err(|e| anyhow::anyhow!(e))?,
        None => default_mode,
    };
    let format = match c.format.as_deref() {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => bail!("unknown format `{other}`"),
    };
    if let Some(workers) = c.workers {
        // Ignore failure if a pool already exists (e.g. repeated merge).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    Ok(Resolved {
        code,
        sizes: c.size.clone(),
        betas: c.beta.clone(),
        rates: c.rate.clone(),
        samples: c.samples.unwrap_or(100),
        seed: c.seed.unwrap_or(0),
        mode,
        format,
        out: c.out.clone(),
    })
}

fn emit(out: &Option<std::path::PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

pub fn decode(c: &Common, input: &Path) -> anyhow::Result<()> {
    let r = resolve(c, CodeKind::Cubic3d, DecoderMode::Standard)?;
    let size = *r.sizes.first().context("--size required")?;
    let code = build_code(r.code, size)?;
    let text = std::fs::read_to_string(input)
        .with_context(|| format!("reading {}", input.display()))?;

    let mut error: Option<PauliOperator> = None;
    let mut defects = DefectSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap();
        let nums: Vec<&str> = parts.collect();
        let bad = || anyhow::anyhow!("{}:{}: malformed line `{line}`", input.display(), lineno + 1);
        match tag {
            "X" | "Z" | "Y" => {
                if nums.len() != 4 {
                    return Err(bad());
                }
                let coord: Vec<i64> = nums[..3]
                    .iter()
                    .map(|s| s.parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad())?;
                let q: usize = nums[3].parse().map_err(|_| bad())?;
                let idx = code.lattice.qubit_index([coord[0], coord[1], coord[2]], q);
                let op = error.get_or_insert_with(|| PauliOperator::identity(code.lattice.qubits()));
                if tag != "Z" {
                    op.flip_x(idx);
                }
                if tag != "X" {
                    op.flip_z(idx);
                }
            }
            "D" => {
                if nums.len() != 4 {
                    return Err(bad());
                }
                let coord: Vec<i64> = nums[..3]
                    .iter()
                    .map(|s| s.parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad())?;
                let sector = match nums[3] {
                    "x" | "X" => Sector::XType,
                    "z" | "Z" => Sector::ZType,
                    _ => return Err(bad()),
                };
                defects.toggle(Defect::new(
                    code.lattice.wrap([coord[0], coord[1], coord[2]]),
                    sector,
                ));
            }
            _ => return Err(bad()),
        }
    }
    let s = match &error {
        Some(op) => {
            if !defects.is_empty() {
                bail!("input mixes error letters and syndrome defects");
            }
            syndrome(&code, op)
        }
        None => defects,
    };
    let outcome = rg_decode(&code, &s, r.mode);
    let mut report = String::new();
    report.push_str(&format!("verdict: {:?}\n", outcome.verdict));
    report.push_str(&format!("defects: {}\n", s.len()));
    report.push_str(&format!("correction: {}\n", outcome.correction));
    if let Some(err) = &error {
        if outcome.success() {
            let class = classify(&code, &err.compose(&outcome.correction))?;
            report.push_str(&format!(
                "residual class: {}\n",
                match class {
                    PauliClass::Stabilizer => "stabilizer",
                    PauliClass::NontrivialLogical => "nontrivial-logical",
                    PauliClass::Detectable => "detectable",
                }
            ));
        }
    }
    report.push_str("trace:\n");
    report.push_str(&outcome.log_lines());
    emit(&r.out, &report)
}

pub fn threshold(c: &Common) -> anyhow::Result<()> {
    let r = resolve(c, CodeKind::Toric2d, DecoderMode::Standard)?;
    if r.sizes.is_empty() || r.rates.is_empty() {
        bail!("--size and --rate are required");
    }
    let opts = ThresholdOptions {
        kind: r.code,
        sizes: r.sizes.clone(),
        rates: r.rates.clone(),
        trials: r.samples,
        seed: r.seed,
        mode: r.mode,
    };
    let recs = threshold_sweep(&opts)?;
    match r.format {
        Format::Csv => emit(&r.out, &records::threshold_csv(&recs)),
        Format::Json => {
            let wilson: Vec<_> = recs
                .iter()
                .map(|rec| {
                    let (lo, hi) = wilson_interval(rec.failures, rec.trials, 1.96);
                    serde_json::json!({
                        "record": rec,
                        "failure_fraction": rec.failure_fraction(),
                        "wilson95": [lo, hi],
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "points": wilson,
                "crossing_estimate": crossing_estimate(&recs),
            });
            emit(&r.out, &format!("{}\n", serde_json::to_string_pretty(&doc)?))
        }
    }
}

pub fn memory_time(c: &Common, t_max_factor: Option<f64>) -> anyhow::Result<()> {
    let r = resolve(c, CodeKind::Cubic3d, DecoderMode::Specialized)?;
    if r.code != CodeKind::Cubic3d {
        bail!("memory-time targets the cubic code");
    }
    if r.sizes.is_empty() || r.betas.is_empty() {
        bail!("--size and --beta are required");
    }
    let opts = CampaignOptions {
        betas: r.betas.clone(),
        sizes: r.sizes.clone(),
        samples: r.samples as usize,
        seed: r.seed,
        mode: r.mode,
        t_max_factor: t_max_factor.unwrap_or(1e4),
    };
    let (recs, summaries, fits) = memory_time_campaign(&opts)?;
    match r.format {
        Format::Csv => emit(&r.out, &records::memory_csv(&recs)),
        Format::Json => {
            let doc = serde_json::json!({
                "records": recs,
                "summaries": summaries,
                "fits": fits,
            });
            emit(&r.out, &format!("{}\n", serde_json::to_string_pretty(&doc)?))
        }
    }
}

pub fn chunk(c: &Common, q: usize) -> anyhow::Result<()> {
    let r = resolve(c, CodeKind::Cubic3d, DecoderMode::Standard)?;
    let size = *r.sizes.first().context("--size required")?;
    let rate = *r.rates.first().context("--rate required")?;
    let code = build_code(r.code, size)?;
    let mut lines = String::new();
    for sample in 0..r.samples {
        let mut rng = stream(r.seed, sample);
        let sites = sample_iid_sites(rate, &code.lattice, &mut rng);
        let d = chunk_decompose(&sites, q, &code.lattice)?;
        let sizes: Vec<usize> = d.levels.iter().map(|f| f.len()).collect();
        lines.push_str(&format!(
            "sample={} sites={} max_level={} layer_sizes={:?}\n",
            sample,
            sites.len(),
            d.max_level,
            sizes
        ));
    }
    emit(&r.out, &lines)
}

pub fn hook(c: &Common, level: usize) -> anyhow::Result<()> {
    let r = resolve(c, CodeKind::Cubic3d, DecoderMode::Standard)?;
    let size = r.sizes.first().copied().unwrap_or(1 << (level + 2));
    let path = hook_path(level, size)?;
    let mut report = format!(
        "level={} flips={} cost={} final_defects={}\n",
        level,
        path.flips.len(),
        path.cost(),
        path.counts.last().copied().unwrap_or(0)
    );
    if size >= 3 && (1usize << (level + 1)) <= size {
        if let Ok(code) = build_code(CodeKind::Cubic3d, size) {
            report.push_str(&format!("torus_cost(L={}) = {}\n", size, path_cost(&code, &path)));
        }
    }
    emit(&r.out, &report)
}

pub fn selftest() -> anyhow::Result<()> {
    use topomem_core::geometry::minimal_enclosing_box;
    use topomem_core::neutral::{broom_annihilate, solve_in_box};
    use rand::Rng;

    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{}: {}", name, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    let cubic = build_code(CodeKind::Cubic3d, 5)?;
    check("cubic qubit count", cubic.lattice.qubits() == 250);
    let mut commute = true;
    let gens: Vec<_> = cubic.generators().map(|d| cubic.generator(d.cell, d.sector)).collect();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            commute &= gens[i].commutes_with(&gens[j]);
        }
    }
    check("generator commutation (L=5)", commute);

    let mut agree = true;
    let big = build_code(CodeKind::Cubic3d, 13)?;
    for case in 0..50u64 {
        let mut rng = stream(0x7e57, case);
        let mut err = PauliOperator::identity(big.lattice.qubits());
        for _ in 0..rng.gen_range(1..6) {
            err.flip_z(rng.gen_range(0..big.lattice.qubits()));
        }
        let s = syndrome(&big, &err).sector(Sector::XType);
        if s.is_empty() {
            continue;
        }
        let b = minimal_enclosing_box(&s, 13);
        if b.extents.iter().any(|&e| e + 2 > 13) {
            continue;
        }
        let sweep = broom_annihilate(&big, &s, &b, Sector::XType)?;
        let solved = solve_in_box(&big, &s, &b);
        agree &= sweep.annihilated() == solved.is_some();
        if sweep.annihilated() {
            agree &= syndrome(&big, &sweep.operator).sector(Sector::XType) == s;
        }
    }
    check("sweep agrees with box solver", agree);

    let toric = build_code(CodeKind::Toric2d, 8)?;
    let mut err = PauliOperator::identity(toric.lattice.qubits());
    err.flip_x(toric.lattice.qubit_index([2, 3, 0], 0));
    let out = rg_decode(&toric, &syndrome(&toric, &err), DecoderMode::Standard);
    check("toric single-flip decode", out.success());

    let mut state = topomem_core::thermal::SimState::new(&cubic, 1.0);
    let mut rng = stream(1, 1);
    for _ in 0..500 {
        state.bkl_step(&mut rng)?;
    }
    state.check_consistency();
    check("bkl consistency after 500 events", true);

    if failures > 0 {
        bail!("{failures} selftest checks failed");
    }
    Ok(())
}
