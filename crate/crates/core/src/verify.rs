//! Numerical checks. Each returns a [`CheckReport`] whose status is derived
//! from its expectations: a report fails iff some measured value violates its
//! bound.

use std::fmt::{self, Write as _};
use std::path::PathBuf;

use thiserror::Error;

use crate::barrier::{BarrierError, BarrierSpec, Envelope};
use crate::initial::truncate;
use crate::params::ExponentSet;
use crate::solver::{run, run_lockstep, Field, Frame, Grid, RunRecord, Scheme, SolverError};
use crate::transform::{ScalingMap, TransformError, DEFAULT_COVERAGE_LIMIT};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("initial mass is zero")]
    ZeroMass,
    #[error("degenerate window: {0}")]
    DegenerateWindow(String),
    #[error("insufficient scalings: {0}")]
    InsufficientScalings(String),
    #[error("runs do not match: {0}")]
    Mismatch(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Informational,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Informational => "informational",
        })
    }
}

/// How a measured value is compared with its expected value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    /// `|measured − value| ≤ tolerance`.
    Within,
    /// `measured ≤ value + tolerance`.
    AtMost,
    /// `measured ≥ value − tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
}

impl Expectation {
    pub fn holds(&self, measured: f64) -> bool {
        match self.bound {
            Bound::Within => (measured - self.value).abs() <= self.tolerance,
            Bound::AtMost => measured <= self.value + self.tolerance,
            Bound::AtLeast => measured >= self.value - self.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub measured: Vec<(String, f64)>,
    pub expected: Vec<Expectation>,
    pub notes: Vec<String>,
    pub artifacts: Vec<PathBuf>,
}

impl CheckReport {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            status: Status::Pass,
            measured: Vec::new(),
            expected: Vec::new(),
            notes: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn measure(&mut self, quantity: &str, value: f64) -> &mut Self {
        self.measured.push((quantity.to_string(), value));
        self
    }

    pub fn expect(&mut self, quantity: &str, value: f64, tolerance: f64, bound: Bound) -> &mut Self {
        self.expected.push(Expectation {
            quantity: quantity.to_string(),
            value,
            tolerance,
            bound,
        });
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn value(&self, quantity: &str) -> Option<f64> {
        self.measured
            .iter()
            .find(|(q, _)| q == quantity)
            .map(|(_, v)| *v)
    }

    /// Expectations whose measured value is missing or out of bounds.
    pub fn violations(&self) -> Vec<&Expectation> {
        self.expected
            .iter()
            .filter(|e| !self.value(&e.quantity).is_some_and(|v| e.holds(v)))
            .collect()
    }

    /// Sets the status from the expectations (pass/fail), or to
    /// informational when `informational` is set.
    pub fn finish(mut self, informational: bool) -> Self {
        self.status = if informational {
            Status::Informational
        } else if self.violations().is_empty() {
            Status::Pass
        } else {
            Status::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    /// `key: value` lines.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "check: {}", self.name);
        let _ = writeln!(s, "status: {}", self.status);
        for (q, v) in &self.measured {
            let _ = writeln!(s, "measured.{q}: {v:e}");
        }
        for e in &self.expected {
            let rel = match e.bound {
                Bound::Within => "within",
                Bound::AtMost => "at_most",
                Bound::AtLeast => "at_least",
            };
            let ok = self.value(&e.quantity).is_some_and(|v| e.holds(v));
            let _ = writeln!(
                s,
                "expected.{}: {} {:e} tol {:e} ({})",
                e.quantity,
                rel,
                e.value,
                e.tolerance,
                if ok { "ok" } else { "violated" }
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        for a in &self.artifacts {
            let _ = writeln!(s, "artifact: {}", a.display());
        }
        s
    }
}

/// Least-squares line through `(x, y)`: returns `(slope, intercept)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Identity gate applied to every run.
const IDENTITY_TOL: f64 = 1e-10;

/// Mass conservation of one run.
///
/// The per-step identity `Δmass = −dt·boundary flux` must hold to `1e-10`
/// relative with no clipped nodes. If less than `tol` of the mass left the
/// box, the total drift must also stay below `tol`; otherwise the support
/// reached the boundary and the drift is reported as informational.
pub fn mass_conservation(rec: &RunRecord, tol: f64) -> Result<CheckReport, VerifyError> {
    let m0 = rec.initial_mass();
    if m0 <= 0.0 {
        return Err(VerifyError::ZeroMass);
    }
    let drift = rec.mass_drift();
    let out = rec.outflow_fraction();
    let mut r = CheckReport::new("mass");
    r.measure("initial_mass", m0)
        .measure("final_mass", rec.last.mass())
        .measure("drift", drift)
        .measure("identity_defect", rec.max_identity_defect)
        .measure("outflow_fraction", out)
        .measure("clipped_nodes", rec.clipped_nodes as f64)
        .measure("limited_node_steps", rec.limited_nodes as f64)
        .measure("steps", rec.steps as f64);
    r.expect("identity_defect", 0.0, IDENTITY_TOL, Bound::AtMost)
        .expect("clipped_nodes", 0.0, 0.0, Bound::AtMost);
    let interior = out <= tol;
    if interior {
        r.expect("drift", 0.0, tol, Bound::AtMost);
    } else {
        r.note(format!(
            "support reached the boundary: {out:.3e} of the mass left the box"
        ));
    }
    let identity_ok = r.violations().is_empty();
    Ok(r.finish(!interior && identity_ok))
}

/// Log-log slope of the sup norm over the snapshots in `[t_lo, t_hi]`,
/// compared with `−1/β` to within `rel_tol` relative.
pub fn decay_exponent_fit(
    rec: &RunRecord,
    beta: f64,
    window: (f64, f64),
    rel_tol: f64,
) -> Result<CheckReport, VerifyError> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(VerifyError::DegenerateWindow(format!("[{lo}, {hi}]")));
    }
    let pts: Vec<&Field> = rec
        .snapshots
        .iter()
        .filter(|f| f.time() >= lo * (1.0 - 1e-12) && f.time() <= hi * (1.0 + 1e-12))
        .collect();
    if pts.len() < 3 {
        return Err(VerifyError::DegenerateWindow(format!(
            "{} snapshots in [{lo}, {hi}], need at least 3",
            pts.len()
        )));
    }
    if pts.iter().any(|f| f.sup_norm() <= 0.0) {
        return Err(VerifyError::DegenerateWindow("zero sup norm in window".into()));
    }
    let x: Vec<f64> = pts.iter().map(|f| f.time().ln()).collect();
    let y: Vec<f64> = pts.iter().map(|f| f.sup_norm().ln()).collect();
    let (slope, intercept) = fit_line(&x, &y)
        .ok_or_else(|| VerifyError::DegenerateWindow("snapshots share one time".into()))?;
    let target = -1.0 / beta;
    let mut r = CheckReport::new("decay");
    r.measure("slope", slope)
        .measure("log_prefactor", intercept)
        .measure("window_lo", lo)
        .measure("window_hi", hi)
        .measure("points", pts.len() as f64)
        .expect("slope", target, rel_tol * target.abs(), Bound::Within);
    Ok(r.finish(false))
}

/// Runs `base·s` for every scaling `s` to time `t_star` and returns
/// `(mass, sup_norm(t_star))` pairs.
pub fn probe_samples(
    scheme: &Scheme,
    base: &Field,
    scalings: &[f64],
    t_star: f64,
) -> Result<Vec<(f64, f64)>, VerifyError> {
    scalings
        .iter()
        .map(|&s| {
            let u0 = base.scaled(s)?;
            let m = u0.mass();
            let rec = run(scheme, u0, t_star, &[])?;
            Ok((m, rec.last.sup_norm()))
        })
        .collect()
}

/// Fits `σ` in `sup_norm(t*) ∝ mass^σ`; reports `2/β` and `2/(nβ)` next to
/// it. Always informational.
pub fn mass_exponent_probe(
    e: &ExponentSet,
    samples: &[(f64, f64)],
) -> Result<CheckReport, VerifyError> {
    if samples.len() < 4 {
        return Err(VerifyError::InsufficientScalings(format!(
            "{} scalings, need at least 4",
            samples.len()
        )));
    }
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if !(lo > 0.0 && hi / lo >= 10.0 * (1.0 - 1e-12)) {
        return Err(VerifyError::InsufficientScalings(format!(
            "masses span [{lo:e}, {hi:e}], need at least one decade"
        )));
    }
    if samples.iter().any(|s| s.1 <= 0.0) {
        return Err(VerifyError::InsufficientScalings("zero sup norm".into()));
    }
    let x: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (sigma, c) = fit_line(&x, &y).expect("distinct masses");
    let resid = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - sigma * a - c).abs())
        .fold(0.0, f64::max);
    let n = e.dim() as f64;
    let mut r = CheckReport::new("probe");
    r.measure("sigma", sigma)
        .measure("candidate_two_over_beta", 2.0 / e.beta())
        .measure("candidate_two_over_n_beta", 2.0 / (n * e.beta()))
        .measure("max_log_residual", resid)
        .measure("scalings", samples.len() as f64)
        .measure("mass_span", hi / lo)
        .note("the measured exponent is reported, not gated");
    Ok(r.finish(true))
}

fn check_pair(u: &RunRecord, v: &RunRecord) -> Result<(), VerifyError> {
    if u.snapshots.len() != v.snapshots.len() {
        return Err(VerifyError::Mismatch(format!(
            "{} vs {} snapshots",
            u.snapshots.len(),
            v.snapshots.len()
        )));
    }
    for (a, b) in u.snapshots.iter().zip(&v.snapshots) {
        if a.grid() != b.grid() {
            return Err(VerifyError::Mismatch("different grids".into()));
        }
        if a.time() != b.time() {
            return Err(VerifyError::Mismatch(format!(
                "snapshot times {} vs {}",
                a.time(),
                b.time()
            )));
        }
    }
    Ok(())
}

/// Nodewise `u ≤ v + 1e-12·sup(v)` at every snapshot.
pub fn comparison_check(u: &RunRecord, v: &RunRecord) -> Result<CheckReport, VerifyError> {
    check_pair(u, v)?;
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for (a, b) in u.snapshots.iter().zip(&v.snapshots) {
        let slack = 1e-12 * b.sup_norm();
        for (x, y) in a.values().iter().zip(b.values()) {
            let excess = x - y;
            worst = worst.max(excess);
            if excess > slack {
                violations += 1;
            }
        }
    }
    let mut r = CheckReport::new("comparison");
    r.measure("violations", violations as f64)
        .measure("max_excess", worst)
        .measure("snapshots", u.snapshots.len() as f64)
        .expect("violations", 0.0, 0.0, Bound::AtMost);
    Ok(r.finish(false))
}

/// Every snapshot with `t ≤ T` satisfies `u ≤ ū(·,t) + tol·C₀` at all nodes.
pub fn barrier_dominance(
    rec: &RunRecord,
    spec: &BarrierSpec,
    tol: f64,
) -> Result<CheckReport, VerifyError> {
    let slack = tol * spec.c0();
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0usize;
    for f in rec.snapshots.iter().filter(|f| f.time() <= spec.horizon()) {
        if f.frame() != Frame::Original {
            return Err(VerifyError::Precondition("dominance needs original-frame snapshots".into()));
        }
        checked += 1;
        let g = f.grid();
        for (k, &u) in f.values().iter().enumerate() {
            let bar = spec.supersolution(&g.point(k), f.time())?;
            let excess = (u - bar) / spec.c0();
            worst = worst.max(excess);
            if u > bar + slack {
                violations += 1;
            }
        }
    }
    if checked == 0 {
        return Err(VerifyError::Precondition("no snapshot inside the barrier horizon".into()));
    }
    let mut r = CheckReport::new("dominance");
    r.measure("violations", violations as f64)
        .measure("max_excess_over_c0", worst)
        .measure("snapshots", checked as f64)
        .measure("c0", spec.c0())
        .measure("lambda", spec.lambda())
        .measure("plateau_margin", spec.plateau_margin(64))
        .expect("violations", 0.0, 0.0, Bound::AtMost);
    Ok(r.finish(false))
}

/// Every rescaled snapshot satisfies `V ≤ F + tol·C₁` at all nodes.
pub fn envelope_check(rec: &RunRecord, env: &Envelope, tol: f64) -> Result<CheckReport, VerifyError> {
    if rec.frame != Frame::Rescaled {
        return Err(VerifyError::Precondition("envelope needs a rescaled-frame run".into()));
    }
    let v0 = rec.series[0].sup_norm;
    if env.c1() < v0 {
        return Err(VerifyError::Precondition(format!(
            "envelope height C1 = {} is below the data maximum {v0}",
            env.c1()
        )));
    }
    let slack = tol * env.c1();
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for f in &rec.snapshots {
        let g = f.grid();
        for (k, &v) in f.values().iter().enumerate() {
            let bound = env.eval(&g.point(k))?;
            worst = worst.max((v - bound) / env.c1());
            if v > bound + slack {
                violations += 1;
            }
        }
    }
    let mut r = CheckReport::new("envelope");
    r.measure("violations", violations as f64)
        .measure("max_excess_over_c1", worst)
        .measure("snapshots", rec.snapshots.len() as f64)
        .measure("c1", env.c1())
        .measure("r1", env.r1())
        .measure("lambda1", env.lambda1())
        .expect("violations", 0.0, 0.0, Bound::AtMost);
    Ok(r.finish(false))
}

/// Result of [`scaling_equivalence`]: the report plus the per-time
/// relative differences.
#[derive(Debug, Clone)]
pub struct Equivalence {
    pub report: CheckReport,
    pub differences: Vec<(f64, f64)>,
}

/// Solves the original equation from `u0`, pushes the snapshots at
/// `t(τ_k)` through the change of variables onto `rescaled_grid`, solves the
/// rescaled equation from the same data directly, and compares the two at
/// every `τ_k` in relative L¹.
pub fn scaling_equivalence(
    scheme: &Scheme,
    u0: &Field,
    rescaled_grid: &Grid,
    taus: &[f64],
    tol: f64,
) -> Result<Equivalence, VerifyError> {
    if u0.frame() != Frame::Original || u0.time() != 0.0 {
        return Err(VerifyError::Precondition("data must be original-frame at t = 0".into()));
    }
    if taus.is_empty() {
        return Err(VerifyError::Precondition("no matched times".into()));
    }
    let map = ScalingMap::new(scheme.exponents().clone())?;
    let times = taus
        .iter()
        .map(|&tau| map.t_of_tau(tau))
        .collect::<Result<Vec<_>, _>>()?;
    let t_end = *times.last().unwrap();
    let orig = run(scheme, u0.clone(), t_end, &times)?;
    let v0 = map.push_field(u0, rescaled_grid, DEFAULT_COVERAGE_LIMIT)?;
    let resc = run(scheme, v0, *taus.last().unwrap(), taus)?;
    let mut r = CheckReport::new("scaling");
    let mut differences = Vec::new();
    for (k, (&tau, (uf, vf))) in taus
        .iter()
        .zip(orig.snapshots.iter().zip(&resc.snapshots))
        .enumerate()
    {
        let pushed = map.push_field(uf, rescaled_grid, DEFAULT_COVERAGE_LIMIT)?;
        let pushed = pushed.with_time(vf.time());
        let rel = pushed.l1_distance(vf)? / vf.mass().max(f64::MIN_POSITIVE);
        differences.push((tau, rel));
        let q = format!("rel_l1_{k}");
        r.measure(&format!("tau_{k}"), tau)
            .measure(&q, rel)
            .expect(&q, 0.0, tol, Bound::AtMost);
    }
    r.measure("original_identity_defect", orig.max_identity_defect)
        .measure("rescaled_identity_defect", resc.max_identity_defect);
    Ok(Equivalence {
        report: r.finish(false),
        differences,
    })
}

/// Result of [`monotone_approximation`].
#[derive(Debug, Clone)]
pub struct Approximation {
    pub report: CheckReport,
    /// `(k, relative L¹ gap to the untruncated run at the final time)`.
    pub gaps: Vec<(f64, f64)>,
    /// `(k, mass of the truncated data)`.
    pub masses: Vec<(f64, f64)>,
}

/// Runs the truncations `min(k, u₀)χ_{|x|<k}` for every `k` together with
/// `u₀` itself (lockstep), and checks that the runs are ordered in `k` at
/// every snapshot, that the L¹ gap to the `u₀` run at the final time
/// decreases in `k`, and that the last gap is at most `tol` relative.
pub fn monotone_approximation(
    scheme: &Scheme,
    u0: &Field,
    ks: &[f64],
    t_end: f64,
    snapshot_times: &[f64],
    tol: f64,
) -> Result<Approximation, VerifyError> {
    if ks.len() < 3 {
        return Err(VerifyError::Precondition(format!(
            "{} truncation levels, need at least 3",
            ks.len()
        )));
    }
    if ks.windows(2).any(|w| w[1] <= w[0]) || ks[0] <= 0.0 {
        return Err(VerifyError::Precondition("truncation levels must increase".into()));
    }
    if snapshot_times.is_empty() {
        return Err(VerifyError::Precondition("no snapshot times".into()));
    }
    let mut fields: Vec<Field> = ks.iter().map(|&k| truncate(u0, k)).collect();
    let masses: Vec<(f64, f64)> = ks.iter().zip(&fields).map(|(&k, f)| (k, f.mass())).collect();
    fields.push(u0.clone());
    let recs = run_lockstep(scheme, fields, t_end, snapshot_times)?;
    let full = recs.last().unwrap();
    let mut r = CheckReport::new("monotone");
    let mut violations = 0usize;
    // recs[k] ≤ recs[k+1], with the untruncated run last.
    for pair in recs.windows(2) {
        let c = comparison_check(&pair[0], &pair[1])?;
        violations += c.value("violations").unwrap_or(0.0) as usize;
    }
    let full_last = full.snapshots.last().unwrap();
    let norm = full_last.mass().max(f64::MIN_POSITIVE);
    let mut gaps = Vec::new();
    for (&k, rec) in ks.iter().zip(&recs) {
        let gap = rec.snapshots.last().unwrap().l1_distance(full_last)? / norm;
        gaps.push((k, gap));
    }
    let increasing_gaps = gaps.windows(2).filter(|w| w[1].1 > w[0].1).count();
    let mass_out_of_order = masses.windows(2).filter(|w| w[1].1 < w[0].1).count();
    r.measure("order_violations", violations as f64)
        .measure("gap_increases", increasing_gaps as f64)
        .measure("final_gap", gaps.last().unwrap().1)
        .measure("truncated_mass_decreases", mass_out_of_order as f64)
        .measure("data_mass", u0.mass())
        .expect("order_violations", 0.0, 0.0, Bound::AtMost)
        .expect("gap_increases", 0.0, 0.0, Bound::AtMost)
        .expect("truncated_mass_decreases", 0.0, 0.0, Bound::AtMost)
        .expect("final_gap", 0.0, tol, Bound::AtMost);
    for (k, g) in &gaps {
        r.measure(&format!("gap_k{k}"), *g);
    }
    for ((k, m), rec) in masses.iter().zip(&recs) {
        r.measure(&format!("mass_k{k}"), *m)
            .measure(&format!("identity_defect_k{k}"), rec.max_identity_defect);
    }
    Ok(Approximation {
        report: r.finish(false),
        gaps,
        masses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::bump;

    #[test]
    fn fit_line_recovers_slope() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|v| -0.5 * v + 2.0).collect();
        let (s, c) = fit_line(&x, &y).unwrap();
        assert!((s + 0.5).abs() < 1e-12 && (c - 2.0).abs() < 1e-12);
        assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn report_status_follows_expectations() {
        let mut r = CheckReport::new("x");
        r.measure("a", 1.0).expect("a", 0.0, 0.5, Bound::AtMost);
        let r = r.finish(false);
        assert_eq!(r.status, Status::Fail);
        assert!(r.render().contains("status: fail"));
        let mut r = CheckReport::new("y");
        r.measure("a", 0.2).expect("a", 0.0, 0.5, Bound::Within);
        assert_eq!(r.finish(false).status, Status::Pass);
    }

    #[test]
    fn missing_measurement_is_a_violation() {
        let mut r = CheckReport::new("z");
        r.expect("ghost", 0.0, 1.0, Bound::AtLeast);
        assert_eq!(r.finish(false).status, Status::Fail);
    }

    #[test]
    fn equal_runs_compare_equal() {
        let s = Scheme::new(ExponentSet::new(&[2.0]).unwrap());
        let g = Grid::new(&[81], &[4.0]).unwrap();
        let u0 = bump(&g, &[0.0], &[1.0], 1.0).unwrap();
        let recs = run_lockstep(&s, vec![u0.clone(), u0], 0.1, &[0.05, 0.1]).unwrap();
        let r = comparison_check(&recs[0], &recs[1]).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.value("max_excess"), Some(0.0));
    }

    #[test]
    fn probe_requires_spread() {
        let e = ExponentSet::new(&[1.0]).unwrap();
        let few = [(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)];
        assert!(mass_exponent_probe(&e, &few).is_err());
        let narrow = [(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (4.0, 4.0)];
        assert!(mass_exponent_probe(&e, &narrow).is_err());
        let ok = [(1.0, 1.0), (3.0, 3.0), (10.0, 10.0), (30.0, 30.0)];
        let r = mass_exponent_probe(&e, &ok).unwrap();
        assert_eq!(r.status, Status::Informational);
        assert!((r.value("sigma").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_mass_is_rejected() {
        let s = Scheme::new(ExponentSet::new(&[1.0]).unwrap());
        let g = Grid::new(&[11], &[1.0]).unwrap();
        let rec = run(&s, Field::zeros(g, 0.0, Frame::Original), 0.01, &[]).unwrap();
        assert!(matches!(mass_conservation(&rec, 0.005), Err(VerifyError::ZeroMass)));
    }
}
