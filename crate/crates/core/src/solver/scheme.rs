//! Conservative explicit update for both frames.
//!
//! Fluxes live on cell faces. Face `f` of a line separates nodes `f−1` and
//! `f`; the diffusive flux is `−(φ(u_f) − φ(u_{f−1}))/Δ` and, in the rescaled
//! frame, the drift flux is `a_f·u_upwind` with velocity `a_f = −α_i y_f`.
//! Nodes outside the box are zero ghosts, so the only mass leaving the
//! domain is the flux through the two outermost faces of every line, and
//! `Δmass = −dt·outflow` telescopes exactly up to roundoff.
//!
//! For `m_i < 1` the step bound only resolves `φ_i'` down to the floor `ε`,
//! and nodes holding less than about `ε` could be emptied below zero. Each
//! node's outgoing fluxes are therefore scaled down, when necessary, so that
//! it never exports more than it holds. The scaled flux is used on both sides
//! of the face, which keeps the update conservative. Under the monotone step
//! bound with every `m_i ≥ 1` the scaling never activates.

use std::cell::RefCell;

use rayon::prelude::*;

use crate::params::ExponentSet;
use crate::solver::field::sum_fixed;
use crate::solver::{Field, Frame, Grid, SolverError};

/// Fraction of the monotonicity limit used by [`Scheme::stable_dt`].
pub const SAFETY: f64 = 0.9;
/// Floor below which `φ'(s)` is not resolved when bounding the step for
/// exponents `m_i < 1`.
pub const EPS_FLOOR: f64 = 1e-6;

/// Result of one explicit step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub field: Field,
    /// Mass that left the box during the step (`dt × boundary flux`).
    pub outflow: f64,
    /// Number of nodes whose outgoing fluxes had to be scaled down.
    pub limited: usize,
    /// Number of nodes that still went negative and were reset to zero.
    pub clipped: usize,
    /// Mass added by those resets.
    pub clipped_mass: f64,
}

/// Scratch buffers reused from step to step.
#[derive(Default)]
struct Workspace {
    phi: Vec<f64>,
    flux: Vec<Vec<f64>>,
    export: Vec<f64>,
    acc: Vec<f64>,
}

thread_local! {
    static WORKSPACE: RefCell<Workspace> = RefCell::new(Workspace::default());
}

/// Explicit monotone scheme for a fixed exponent set.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    exponents: ExponentSet,
    safety: f64,
    eps: f64,
}

#[inline]
fn pow_m(s: f64, m: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if m == 1.0 {
        s
    } else if m == 2.0 {
        s * s
    } else if m == 0.5 {
        s.sqrt()
    } else if m == 1.5 {
        s * s.sqrt()
    } else {
        (m * s.ln()).exp()
    }
}

impl Scheme {
    pub fn new(exponents: ExponentSet) -> Self {
        Self {
            exponents,
            safety: SAFETY,
            eps: EPS_FLOOR,
        }
    }

    pub fn with_safety(mut self, safety: f64) -> Self {
        self.safety = safety;
        self
    }

    pub fn with_floor(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn exponents(&self) -> &ExponentSet {
        &self.exponents
    }

    pub fn safety(&self) -> f64 {
        self.safety
    }

    /// Per-axis bound `L_i = m_i·max(ũ^{m_i−1}, ε^{m_i−1})` on `φ_i'`, with
    /// `ũ = max(u_max, ε)`.
    pub fn lipschitz(&self, u_max: f64) -> Vec<f64> {
        let u = u_max.max(self.eps);
        self.exponents
            .m()
            .iter()
            .map(|&m| m * u.powf(m - 1.0).max(self.eps.powf(m - 1.0)))
            .collect()
    }

    /// Largest step keeping the update monotone:
    /// `safety / Σ_i (2L_i/Δ_i²  [+ |α_i|(L_i + Δ_i/2)/Δ_i in the rescaled frame])`.
    pub fn stable_dt(&self, f: &Field) -> f64 {
        let grid = f.grid();
        let lip = self.lipschitz(f.sup_norm());
        let mut rate = 0.0;
        for i in 0..grid.dim() {
            let dx = grid.spacings()[i];
            rate += 2.0 * lip[i] / (dx * dx);
            if f.frame() == Frame::Rescaled {
                let a = self.exponents.alpha()[i].abs();
                rate += a * (grid.half_widths()[i] + 0.5 * dx) / dx;
            }
        }
        self.safety / rate
    }

    /// One step of whichever equation `f.frame()` selects.
    pub fn step(&self, f: &Field, dt: f64) -> Result<StepOutcome, SolverError> {
        match f.frame() {
            Frame::Original => self.step_original(f, dt),
            Frame::Rescaled => self.step_rescaled(f, dt),
        }
    }

    /// `u' = u + dt Σ_i D²_i(u^{m_i})`.
    pub fn step_original(&self, u: &Field, dt: f64) -> Result<StepOutcome, SolverError> {
        if u.frame() != Frame::Original {
            return Err(SolverError::WrongFrame {
                expected: Frame::Original,
                got: u.frame(),
            });
        }
        self.advance(u, dt)
    }

    /// `V' = V + dτ Σ_i [D²_i(V^{m_i}) + D¹_i(α_i y_i V)]`, drift upwinded.
    pub fn step_rescaled(&self, v: &Field, dtau: f64) -> Result<StepOutcome, SolverError> {
        if v.frame() != Frame::Rescaled {
            return Err(SolverError::WrongFrame {
                expected: Frame::Rescaled,
                got: v.frame(),
            });
        }
        self.advance(v, dtau)
    }

    fn advance(&self, f: &Field, dt: f64) -> Result<StepOutcome, SolverError> {
        let grid = f.grid();
        if grid.dim() != self.exponents.dim() {
            return Err(SolverError::Grid(format!(
                "{}-d field for {}-d exponents",
                grid.dim(),
                self.exponents.dim()
            )));
        }
        let limit = self.stable_dt(f);
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(SolverError::Unstable { dt, limit });
        }
        WORKSPACE.with(|ws| {
            let mut ws = ws.borrow_mut();
            let (outflow_rate, limited) = self.divergence(f, dt, &mut ws);
            Ok(self.finish(f, dt, &ws.acc, outflow_rate, limited))
        })
    }

    /// Fills `ws.acc` with the (limited) flux divergence; returns the boundary
    /// outflow rate and the number of limited nodes.
    fn divergence(&self, f: &Field, dt: f64, ws: &mut Workspace) -> (f64, usize) {
        let grid = f.grid();
        let vals = f.values();
        let n = grid.dim();
        let Workspace {
            phi,
            flux: fluxes,
            export,
            acc,
        } = ws;
        fluxes.resize_with(n, Vec::new);
        let mut phi_m = f64::NAN;
        for (axis, flux) in fluxes.iter_mut().enumerate() {
            let m = self.exponents.m()[axis];
            if m != phi_m {
                phi.clear();
                phi.extend(vals.iter().map(|&s| pow_m(s, m)));
                phi_m = m;
            }
            let drift = match f.frame() {
                Frame::Original => None,
                Frame::Rescaled => Some(self.exponents.alpha()[axis]),
            };
            face_fluxes(grid, axis, phi, vals, drift, flux);
        }

        // Mass each node would export during the step, then the fraction of
        // it the node can afford.
        export.clear();
        export.resize(vals.len(), 0.0);
        for (axis, flux) in fluxes.iter().enumerate() {
            let w = dt / grid.spacings()[axis];
            let (_, len, inner) = grid.axis_layout(axis);
            export
                .par_chunks_mut(len * inner)
                .zip(flux.par_chunks((len + 1) * inner))
                .for_each(|(eb, fb)| {
                    for (e, (r, l)) in eb.iter_mut().zip(fb[inner..].iter().zip(fb.iter())) {
                        *e += w * (r.max(0.0) - l.min(0.0));
                    }
                });
        }
        let mut limited = 0;
        for (q, &u) in export.iter_mut().zip(vals) {
            *q = if *q > u {
                limited += 1;
                u / *q * (1.0 - 1e-12)
            } else {
                1.0
            };
        }
        let ratio = &*export;

        acc.clear();
        acc.resize(vals.len(), 0.0);
        let mut outflow_rate = 0.0;
        for (axis, flux) in fluxes.iter_mut().enumerate() {
            let (_, len, inner) = grid.axis_layout(axis);
            if limited > 0 {
                scale_by_donor(len, inner, flux, ratio);
            }
            let inv_dx = 1.0 / grid.spacings()[axis];
            acc.par_chunks_mut(len * inner)
                .zip(flux.par_chunks((len + 1) * inner))
                .for_each(|(ab, fb)| {
                    for (a, (l, r)) in ab.iter_mut().zip(fb.iter().zip(&fb[inner..])) {
                        *a += (l - r) * inv_dx;
                    }
                });
            outflow_rate += boundary_outflow(grid, axis, flux);
        }
        (outflow_rate, limited)
    }

    fn finish(&self, f: &Field, dt: f64, acc: &[f64], outflow_rate: f64, limited: usize) -> StepOutcome {
        let grid = f.grid();
        let vals = f.values();
        let mut clipped = 0;
        let mut clipped_sum = 0.0;
        let mut next = Vec::with_capacity(vals.len());
        for (v, a) in vals.iter().zip(acc) {
            let w = v + dt * a;
            if w < 0.0 {
                clipped += 1;
                clipped_sum -= w;
                next.push(0.0);
            } else {
                next.push(w);
            }
        }
        let field = Field::from_parts_unchecked(grid.clone(), next, f.time() + dt, f.frame());
        StepOutcome {
            field,
            outflow: dt * outflow_rate,
            limited,
            clipped,
            clipped_mass: clipped_sum * grid.cell_volume(),
        }
    }
}

/// Face fluxes along `axis`, stored block by block: face `f` of the line
/// `(o, ·, r)` sits at `(o·(len+1) + f)·inner + r`, so within a block face
/// `j` lies between nodes `j − inner` and `j`.
fn face_fluxes(
    grid: &Grid,
    axis: usize,
    phi: &[f64],
    vals: &[f64],
    drift: Option<f64>,
    flux: &mut Vec<f64>,
) {
    let (outer, len, inner) = grid.axis_layout(axis);
    let dx = grid.spacings()[axis];
    let inv_dx = 1.0 / dx;
    let lo = -grid.half_widths()[axis];
    let velocities: Option<Vec<f64>> = drift.map(|alpha| {
        (0..=len)
            .map(|f| -alpha * (lo + (f as f64 - 0.5) * dx))
            .collect()
    });
    let block = len * inner;
    flux.resize(outer * (len + 1) * inner, 0.0);
    flux.par_chunks_mut((len + 1) * inner)
        .zip(phi.par_chunks(block).zip(vals.par_chunks(block)))
        .for_each(|(fb, (phi_b, val_b))| {
            for (f, p) in fb[..inner].iter_mut().zip(&phi_b[..inner]) {
                *f = -p * inv_dx;
            }
            for (f, (p, q)) in fb[inner..block]
                .iter_mut()
                .zip(phi_b[inner..].iter().zip(&phi_b[..block - inner]))
            {
                *f = -(p - q) * inv_dx;
            }
            for (f, q) in fb[block..].iter_mut().zip(&phi_b[block - inner..]) {
                *f = q * inv_dx;
            }
            if let Some(vel) = &velocities {
                for (f, &a) in vel.iter().enumerate() {
                    let src = if a > 0.0 {
                        (f > 0).then(|| &val_b[(f - 1) * inner..f * inner])
                    } else {
                        (f < len).then(|| &val_b[f * inner..(f + 1) * inner])
                    };
                    if let Some(src) = src {
                        for (fl, v) in fb[f * inner..(f + 1) * inner].iter_mut().zip(src) {
                            *fl += a * v;
                        }
                    }
                }
            }
        });
}

/// Multiplies each face flux by the ratio of the node it drains.
fn scale_by_donor(len: usize, inner: usize, flux: &mut [f64], ratio: &[f64]) {
    let block = len * inner;
    flux.par_chunks_mut((len + 1) * inner)
        .zip(ratio.par_chunks(block))
        .for_each(|(fb, rb)| {
            for (fl, r) in fb[..inner].iter_mut().zip(rb) {
                if *fl < 0.0 {
                    *fl *= r;
                }
            }
            for (fl, (l, r)) in fb[inner..block]
                .iter_mut()
                .zip(rb.iter().zip(&rb[inner..]))
            {
                *fl *= if *fl > 0.0 { *l } else { *r };
            }
            for (fl, l) in fb[block..].iter_mut().zip(&rb[block - inner..]) {
                if *fl > 0.0 {
                    *fl *= l;
                }
            }
        });
}

/// Outward flux through the two end faces of every line along `axis`.
fn boundary_outflow(grid: &Grid, axis: usize, flux: &[f64]) -> f64 {
    let (_, len, inner) = grid.axis_layout(axis);
    let face_area = grid.cell_volume() / grid.spacings()[axis];
    let partials: Vec<f64> = flux
        .par_chunks((len + 1) * inner)
        .map(|fb| sum_fixed(&fb[len * inner..]) - sum_fixed(&fb[..inner]))
        .collect();
    sum_fixed(&partials) * face_area
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_1d(n: usize, l: f64, f: impl Fn(f64) -> f64) -> Field {
        let g = Grid::new(&[n], &[l]).unwrap();
        Field::from_fn(g, 0.0, Frame::Original, |p| f(p[0])).unwrap()
    }

    #[test]
    fn stable_dt_linear() {
        let s = Scheme::new(ExponentSet::new(&[1.0]).unwrap());
        let u = field_1d(201, 1.0, |x| (-x * x).exp());
        let dx = u.grid().spacings()[0];
        assert!((s.stable_dt(&u) - 0.9 * dx * dx / 2.0).abs() < 1e-18);
    }

    #[test]
    fn stable_dt_quadratic() {
        let s = Scheme::new(ExponentSet::new(&[2.0]).unwrap());
        let u = field_1d(101, 1.0, |x| 4.0 * (1.0 - x * x));
        let dx = u.grid().spacings()[0];
        assert_eq!(u.sup_norm(), 4.0);
        assert!((s.stable_dt(&u) - 0.9 * dx * dx / 16.0).abs() < 1e-18);
    }

    #[test]
    fn stable_dt_quarters_with_spacing() {
        let s = Scheme::new(ExponentSet::new(&[2.0]).unwrap());
        let a = field_1d(101, 1.0, |x| 1.0 - x * x);
        let b = field_1d(201, 1.0, |x| 1.0 - x * x);
        assert!((s.stable_dt(&a) / s.stable_dt(&b) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn stable_dt_zero_field_is_finite() {
        let s = Scheme::new(ExponentSet::new(&[1.5]).unwrap());
        let u = field_1d(11, 1.0, |_| 0.0);
        let dt = s.stable_dt(&u);
        assert!(dt.is_finite() && dt > 0.0);
        let s = Scheme::new(ExponentSet::new(&[0.5]).unwrap());
        assert!(s.stable_dt(&u).is_finite());
    }

    #[test]
    fn constant_interior_is_unchanged() {
        let s = Scheme::new(ExponentSet::new(&[2.0]).unwrap());
        let u = field_1d(41, 2.0, |x| if x.abs() <= 1.0 { 0.7 } else { 0.0 });
        let dt = s.stable_dt(&u);
        let out = s.step_original(&u, dt).unwrap();
        for (k, (a, b)) in u.values().iter().zip(out.field.values()).enumerate() {
            let x = u.grid().coord(0, k);
            if x.abs() < 0.9 {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn rejects_large_step_and_wrong_frame() {
        let s = Scheme::new(ExponentSet::new(&[1.0]).unwrap());
        let u = field_1d(11, 1.0, |x| 1.0 - x * x);
        let dt = s.stable_dt(&u);
        assert!(matches!(
            s.step_original(&u, 1.01 * dt),
            Err(SolverError::Unstable { .. })
        ));
        assert!(s.step_original(&u, 0.0).is_err());
        assert!(matches!(
            s.step_rescaled(&u, dt),
            Err(SolverError::WrongFrame { .. })
        ));
    }

    #[test]
    fn zero_stays_zero_rescaled() {
        let s = Scheme::new(ExponentSet::new(&[0.8, 1.2]).unwrap());
        let g = Grid::new(&[9, 7], &[1.0, 1.0]).unwrap();
        let v = Field::zeros(g, 0.0, Frame::Rescaled);
        let out = s.step_rescaled(&v, s.stable_dt(&v)).unwrap();
        assert!(out.field.values().iter().all(|&x| x == 0.0));
        assert_eq!(out.outflow, 0.0);
    }

    #[test]
    fn step_mass_identity() {
        let e = ExponentSet::new(&[0.8, 1.2]).unwrap();
        let s = Scheme::new(e);
        let g = Grid::new(&[17, 13], &[1.0, 1.0]).unwrap();
        for frame in [Frame::Original, Frame::Rescaled] {
            let u = Field::from_fn(g.clone(), 0.0, frame, |p| {
                1.0 + 0.3 * p[0] - 0.2 * p[1] * p[1]
            })
            .unwrap();
            let out = s.step(&u, s.stable_dt(&u)).unwrap();
            assert_eq!(out.clipped, 0);
            let defect = out.field.mass() - u.mass() + out.outflow;
            assert!(defect.abs() < 1e-13 * u.mass(), "{frame}: {defect}");
            assert!(out.outflow > 0.0);
        }
    }

    #[test]
    fn pow_m_special_cases() {
        for &s in &[0.0f64, 1e-12, 0.3, 2.0, 17.5] {
            for &m in &[0.5, 0.8, 1.0, 1.5, 2.0, 2.7] {
                let want = if s == 0.0 { 0.0 } else { s.powf(m) };
                assert!((pow_m(s, m) - want).abs() <= 1e-14 * want.max(1e-300));
            }
        }
    }
}
