use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use apme::barrier::{BarrierSpec, Envelope};
use apme::initial::{bump, gaussian, spike, truncate, SpikeParams};
use apme::params::ExponentSet;
use apme::solver::snapshot::{read_binary, read_csv, write_binary, write_csv, Snapshot};
use apme::solver::{run, run_lockstep, Field, Frame, Grid, RunRecord, Scheme};
use apme::transform::{ScalingMap, DEFAULT_COVERAGE_LIMIT};
use apme::verify::{
    barrier_dominance, comparison_check, decay_exponent_fit, envelope_check, mass_conservation,
    mass_exponent_probe, monotone_approximation, probe_samples, scaling_equivalence, Bound,
    CheckReport, Status,
};

use crate::config::{ExperimentConfig, Generator, CHECK_NAMES};

/// Whether every selected check passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Output files of one command, written in order by [`Output::flush`].
pub struct Output {
    dir: PathBuf,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Output {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    /// Queues `bytes` under `name` and returns the path it will have.
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push((p.clone(), bytes));
        p
    }

    pub fn flush(self) -> Result<()> {
        for (path, bytes) in self.files {
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
            w.write_all(&bytes)?;
            w.flush()?;
        }
        Ok(())
    }
}

pub fn exponents(cfg: &ExperimentConfig) -> Result<ExponentSet> {
    Ok(ExponentSet::new(&cfg.m)?)
}

pub fn scheme(cfg: &ExperimentConfig) -> Result<Scheme> {
    Ok(Scheme::new(exponents(cfg)?).with_safety(cfg.safety))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut r = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    let snap = if path.extension().is_some_and(|e| e == "csv") {
        read_csv(&mut r)
    } else {
        read_binary(&mut r)
    };
    snap.with_context(|| format!("reading {}", path.display()))
}

fn snapshot_bytes(field: &Field, m: &[f64], csv: bool) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    if csv {
        write_csv(&mut buf, field, m)?;
    } else {
        write_binary(&mut buf, field, m)?;
    }
    Ok(buf)
}

/// Generates the configured initial data.
pub fn initial_field(cfg: &ExperimentConfig) -> Result<Field> {
    let i = &cfg.initial;
    let field = if i.generator == Generator::FromSnapshot {
        let path = i.path.as_ref().ok_or_else(|| anyhow!("from_snapshot needs initial.path"))?;
        let snap = read_snapshot(path)?;
        if snap.field.grid().dim() != cfg.m.len() {
            bail!("snapshot {} is {}-d, exponents are {}-d", path.display(), snap.field.grid().dim(), cfg.m.len());
        }
        snap.field
    } else {
        let grid = Grid::new(&cfg.sizes, &cfg.half_widths)?;
        let f = match i.generator {
            Generator::Gaussian => gaussian(&grid, &i.center, &i.width, i.amplitude)?,
            Generator::Bump => bump(&grid, &i.center, &i.width, i.amplitude)?,
            _ => {
                let sp = SpikeParams {
                    at: i.spike_at.clone(),
                    radius: i.spike_radius,
                    power: i.spike_power,
                    height: i.spike_height,
                    tail: i.tail,
                };
                spike(&grid, &i.center, &i.width, i.amplitude, &sp)?
            }
        };
        if cfg.frame == Frame::Rescaled {
            Field::new(grid, f.into_values(), 0.0, Frame::Rescaled)?
        } else {
            f
        }
    };
    let field = match i.truncate {
        Some(k) => truncate(&field, k),
        None => field,
    };
    match i.mass {
        Some(m) if field.mass() > 0.0 => Ok(field.scaled(m / field.mass())?),
        Some(_) => bail!("cannot rescale data with zero mass"),
        None => Ok(field),
    }
}

fn times_or_end(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.snapshot_times.is_empty() {
        vec![cfg.t_end]
    } else {
        cfg.snapshot_times.clone()
    }
}

fn log_times(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..=k)
        .map(|j| lo * (hi / lo).powf(j as f64 / k as f64))
        .collect()
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> Vec<u8> {
    let mut s = format!("{header}\n");
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s.into_bytes()
}

pub fn params(e: &ExponentSet, out: &mut Output) -> Result<Verdict> {
    let report = e.report()?;
    print!("{report}");
    out.add("params.txt", report.into_bytes());
    Ok(Verdict::Pass)
}

pub fn barrier(e: &ExponentSet, c0: f64, a: f64, horizon: f64, samples: usize, seed: u64, out: &mut Output) -> Result<Verdict> {
    let spec = BarrierSpec::build(e, c0, a, horizon)?;
    let mut report = spec.report();
    let mut ok = true;
    for (label, lam) in [("unit", 1.0), ("barrier", spec.lambda())] {
        let c = spec.residual_certificate(lam, samples, seed)?;
        ok &= c.holds();
        report.push_str(&format!(
            "certificate.{label}.lambda: {:e}\ncertificate.{label}.samples: {}\ncertificate.{label}.seed: {}\ncertificate.{label}.min_residual: {:e}\ncertificate.{label}.max_residual: {:e}\ncertificate.{label}.holds: {}\n",
            c.lambda,
            c.samples,
            c.seed,
            c.min,
            c.max,
            c.holds()
        ));
    }
    report.push_str(&format!("plateau_margin: {:e}\n", spec.plateau_margin(64)));
    print!("{report}");
    out.add("barrier.txt", report.into_bytes());
    Ok(if ok { Verdict::Pass } else { Verdict::Fail })
}

pub fn transform(input: &Path, target: Option<Grid>, out: &mut Output) -> Result<Verdict> {
    let snap = read_snapshot(input)?;
    let map = ScalingMap::new(ExponentSet::new(&snap.m)?)?;
    let target = target.unwrap_or_else(|| snap.field.grid().clone());
    let (mapped, tag) = match snap.field.frame() {
        Frame::Original => (map.push_field(&snap.field, &target, DEFAULT_COVERAGE_LIMIT)?, "rescaled"),
        Frame::Rescaled => (map.pull_field(&snap.field, &target, DEFAULT_COVERAGE_LIMIT)?, "original"),
    };
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("snapshot");
    let path = out.add(&format!("{stem}.{tag}.apme"), snapshot_bytes(&mapped, &snap.m, false)?);
    println!("input: {}\noutput: {}", input.display(), path.display());
    if mapped.grid().dim() == 1 {
        let p = out.add(&format!("{stem}.{tag}.csv"), snapshot_bytes(&mapped, &snap.m, true)?);
        println!("output: {}", p.display());
    }
    println!("frame: {}\ntime: {:e}\nmass: {:e}", mapped.frame(), mapped.time(), mapped.mass());
    Ok(Verdict::Pass)
}

pub fn solve(cfg: &ExperimentConfig, out: &mut Output) -> Result<Verdict> {
    let s = scheme(cfg)?;
    let u0 = initial_field(cfg)?;
    let rec = run(&s, u0, cfg.t_end, &cfg.snapshot_times)?;
    for (k, f) in rec.snapshots.iter().enumerate() {
        out.add(&format!("snapshots/snap_{k:04}.apme"), snapshot_bytes(f, &cfg.m, false)?);
        if f.grid().dim() == 1 {
            out.add(&format!("snapshots/snap_{k:04}.csv"), snapshot_bytes(f, &cfg.m, true)?);
        }
    }
    out.add("snapshots/final.apme", snapshot_bytes(&rec.last, &cfg.m, false)?);
    let series = out.add("series.csv", rec.series_csv().into_bytes());
    let mut r = CheckReport::new("solve");
    r.measure("t_end", rec.last.time())
        .measure("steps", rec.steps as f64)
        .measure("snapshots", rec.snapshots.len() as f64)
        .measure("initial_mass", rec.initial_mass())
        .measure("final_mass", rec.last.mass())
        .measure("final_sup_norm", rec.last.sup_norm())
        .measure("mass_drift", rec.mass_drift())
        .measure("outflow_fraction", rec.outflow_fraction())
        .measure("identity_defect", rec.max_identity_defect)
        .measure("limited_node_steps", rec.limited_nodes as f64)
        .measure("clipped_nodes", rec.clipped_nodes as f64);
    r.artifacts.push(series);
    let r = r.finish(true);
    let text = r.render();
    print!("{text}");
    out.add("solve.txt", text.into_bytes());
    Ok(Verdict::Pass)
}

type Artifacts = Vec<(String, Vec<u8>)>;

fn series(name: &str, rec: &RunRecord) -> (String, Vec<u8>) {
    (format!("{name}_series.csv"), rec.series_csv().into_bytes())
}

fn barrier_spec(cfg: &ExperimentConfig, u0: &Field) -> Result<BarrierSpec> {
    let e = exponents(cfg)?;
    Ok(match &cfg.barrier {
        Some(b) => BarrierSpec::build(&e, b.c0, b.a, b.horizon)?,
        None => BarrierSpec::dominating(&e, u0.sup_norm(), &u0.support_extent(), cfg.t_end.max(f64::MIN_POSITIVE))?,
    })
}

fn original(u0: &Field) -> Result<()> {
    if u0.frame() != Frame::Original || u0.time() != 0.0 {
        bail!("this check needs original-frame data at t = 0");
    }
    Ok(())
}

/// Runs one named check.
pub fn run_check(name: &str, cfg: &ExperimentConfig) -> Result<(CheckReport, Artifacts)> {
    let k = &cfg.checks;
    let s = scheme(cfg)?;
    let e = s.exponents().clone();
    let u0 = initial_field(cfg)?;
    let mut art = Artifacts::new();
    let report = match name {
        "mass" => {
            let rec = run(&s, u0, cfg.t_end, &cfg.snapshot_times)?;
            art.push(series(name, &rec));
            mass_conservation(&rec, k.mass_tol)?
        }
        "decay" => {
            let (lo, hi) = k.decay_window;
            let start = u0.time();
            let times: Vec<f64> = log_times(lo, hi, 12).into_iter().filter(|t| *t >= start).collect();
            let rec = run(&s, u0, hi, &times)?;
            art.push(series(name, &rec));
            art.push((
                "decay_points.csv".into(),
                csv("time,sup_norm", rec.snapshots.iter().map(|f| vec![f.time(), f.sup_norm()])),
            ));
            decay_exponent_fit(&rec, e.beta(), k.decay_window, k.decay_tol)?
        }
        "probe" => {
            let samples = probe_samples(&s, &u0, &k.probe_scalings, k.probe_time)?;
            art.push(("probe.csv".into(), csv("mass,sup_norm", samples.iter().map(|p| vec![p.0, p.1]))));
            let mut r = mass_exponent_probe(&e, &samples)?;
            r.measure("probe_time", k.probe_time);
            r
        }
        "comparison" => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let g = u0.grid().clone();
            let times = times_or_end(cfg);
            let mut violations = 0.0;
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..k.comparison_pairs.max(1) {
                let c: Vec<f64> = g.half_widths().iter().map(|l| rng.gen_range(-0.4..0.4) * l).collect();
                let w: Vec<f64> = g.half_widths().iter().map(|l| rng.gen_range(0.1..0.35) * l).collect();
                let amp = rng.gen_range(0.2..1.0) * u0.sup_norm().max(f64::MIN_POSITIVE);
                let extra = bump(&g, &c, &w, amp)?;
                let sum: Vec<f64> = u0.values().iter().zip(extra.values()).map(|(a, b)| a + b).collect();
                let v0 = Field::new(g.clone(), sum, u0.time(), u0.frame())?;
                let recs = run_lockstep(&s, vec![u0.clone(), v0], cfg.t_end, &times)?;
                let r = comparison_check(&recs[0], &recs[1])?;
                violations += r.value("violations").unwrap_or(0.0);
                worst = worst.max(r.value("max_excess").unwrap_or(f64::NEG_INFINITY));
            }
            let mut r = CheckReport::new("comparison");
            r.measure("pairs", k.comparison_pairs.max(1) as f64)
                .measure("violations", violations)
                .measure("max_excess", worst)
                .measure("seed", cfg.seed as f64)
                .expect("violations", 0.0, 0.0, Bound::AtMost);
            r.finish(false)
        }
        "dominance" => {
            original(&u0)?;
            let spec = barrier_spec(cfg, &u0)?;
            let horizon = spec.horizon();
            let mut times: Vec<f64> = cfg.snapshot_times.iter().copied().filter(|t| *t <= horizon).collect();
            if times.is_empty() {
                times = (0..=4).map(|j| horizon * j as f64 / 4.0).collect();
            }
            let rec = run(&s, u0, *times.last().unwrap(), &times)?;
            art.push(series(name, &rec));
            barrier_dominance(&rec, &spec, k.barrier_tol)?
        }
        "envelope" => {
            original(&u0)?;
            let spec = barrier_spec(cfg, &u0)?;
            let c1 = k.envelope_c1.unwrap_or(u0.sup_norm());
            let env = Envelope::covering(&spec, c1, &u0.support_extent())?;
            let v0 = Field::new(u0.grid().clone(), u0.values().to_vec(), 0.0, Frame::Rescaled)?;
            let times: Vec<f64> = (0..=6).map(|j| k.envelope_tau * j as f64 / 6.0).collect();
            let rec = run(&s, v0, k.envelope_tau, &times)?;
            art.push(series(name, &rec));
            envelope_check(&rec, &env, k.barrier_tol)?
        }
        "scaling" => {
            original(&u0)?;
            let sizes = k.rescaled_sizes.clone().unwrap_or(cfg.sizes.clone());
            let half = k.rescaled_half_widths.clone().unwrap_or(cfg.half_widths.clone());
            let target = Grid::new(&sizes, &half)?;
            let eq = scaling_equivalence(&s, &u0, &target, &k.scaling_taus, k.scaling_tol)?;
            art.push(("scaling.csv".into(), csv("tau,rel_l1", eq.differences.iter().map(|d| vec![d.0, d.1]))));
            eq.report
        }
        "monotone" => {
            let times = times_or_end(cfg);
            let a = monotone_approximation(&s, &u0, &k.truncation_levels, cfg.t_end, &times, k.monotone_tol)?;
            art.push((
                "monotone.csv".into(),
                csv(
                    "k,truncated_mass,l1_gap",
                    a.masses.iter().zip(&a.gaps).map(|(m, g)| vec![m.0, m.1, g.1]),
                ),
            ));
            a.report
        }
        other => bail!("unknown check '{other}' (expected one of {})", CHECK_NAMES.join(", ")),
    };
    Ok((report, art))
}

/// Runs the named checks concurrently and writes one report per check.
pub fn verify(names: &[String], cfg: &ExperimentConfig, out: &mut Output) -> Result<Verdict> {
    for n in names {
        if !CHECK_NAMES.contains(&n.as_str()) {
            bail!("unknown check '{n}' (expected one of {})", CHECK_NAMES.join(", "));
        }
    }
    let results: Vec<Result<(CheckReport, Artifacts)>> = names.par_iter().map(|n| run_check(n, cfg)).collect();
    let mut verdict = Verdict::Pass;
    for (name, res) in names.iter().zip(results) {
        let (mut report, art) = res.with_context(|| format!("check '{name}'"))?;
        for (file, bytes) in art {
            let p = out.add(&file, bytes);
            report.artifacts.push(p);
        }
        if report.status == Status::Fail {
            verdict = Verdict::Fail;
        }
        let text = report.render();
        print!("{text}");
        out.add(&format!("{name}.txt"), text.into_bytes());
    }
    Ok(verdict)
}

/// Mass sweep: the probe over the configured scalings.
pub fn sweep(cfg: &ExperimentConfig, out: &mut Output) -> Result<Verdict> {
    verify(&["probe".to_string()], cfg, out)
}
