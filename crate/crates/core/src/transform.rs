//! Self-similar change of variables between the original equation in
//! `(x, t)` and the rescaled drift-diffusion equation in `(y, τ)`:
//!
//! `h(t) = (1+βt)^{1/β}`, `τ = ln h`, `y_i = x_i h^{−α_i}`, `V = h·u`.

use rayon::prelude::*;
use thiserror::Error;

use crate::params::ExponentSet;
use crate::solver::{Field, Frame, Grid, SolverError};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("time {0} must be finite and nonnegative")]
    NegativeTime(f64),
    #[error("beta = {0} must be positive")]
    NonPositiveBeta(f64),
    #[error("point has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("field is in the {got} frame, expected {expected}")]
    WrongFrame { expected: Frame, got: Frame },
    #[error("target grid misses {fraction:.3e} of the mass (allowed {limit:.1e})")]
    Coverage { fraction: f64, limit: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Mass fraction a resampling may lose to the edge of the target box before
/// [`ScalingMap::push_field`] refuses.
pub const DEFAULT_COVERAGE_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingMap {
    exponents: ExponentSet,
}

impl ScalingMap {
    pub fn new(exponents: ExponentSet) -> Result<Self, TransformError> {
        let b = exponents.beta();
        if !(b > 0.0) {
            return Err(TransformError::NonPositiveBeta(b));
        }
        Ok(Self { exponents })
    }

    pub fn exponents(&self) -> &ExponentSet {
        &self.exponents
    }

    pub fn h_of_t(&self, t: f64) -> Result<f64, TransformError> {
        check_time(t)?;
        let b = self.exponents.beta();
        Ok((1.0 + b * t).powf(1.0 / b))
    }

    /// `τ(t) = ln h(t) = ln(1+βt)/β`.
    pub fn tau_of_t(&self, t: f64) -> Result<f64, TransformError> {
        check_time(t)?;
        let b = self.exponents.beta();
        Ok((b * t).ln_1p() / b)
    }

    /// `t(τ) = (e^{βτ} − 1)/β`.
    pub fn t_of_tau(&self, tau: f64) -> Result<f64, TransformError> {
        check_time(tau)?;
        let b = self.exponents.beta();
        Ok((b * tau).exp_m1() / b)
    }

    /// `(x, t, u) ↦ (y, τ, V)`.
    pub fn forward_point(
        &self,
        x: &[f64],
        t: f64,
        u: f64,
    ) -> Result<(Vec<f64>, f64, f64), TransformError> {
        self.check_dim(x)?;
        let h = self.h_of_t(t)?;
        let tau = self.tau_of_t(t)?;
        let y = x
            .iter()
            .zip(self.exponents.alpha())
            .map(|(xi, a)| xi * (-a * tau).exp())
            .collect();
        Ok((y, tau, h * u))
    }

    /// `(y, τ, V) ↦ (x, t, u)`.
    pub fn backward_point(
        &self,
        y: &[f64],
        tau: f64,
        v: f64,
    ) -> Result<(Vec<f64>, f64, f64), TransformError> {
        self.check_dim(y)?;
        let t = self.t_of_tau(tau)?;
        let x = y
            .iter()
            .zip(self.exponents.alpha())
            .map(|(yi, a)| yi * (a * tau).exp())
            .collect();
        Ok((x, t, (-tau).exp() * v))
    }

    /// Resamples an original-frame field at time `t` onto `target` as the
    /// rescaled field `V(y, τ(t)) = h·u(y_i h^{α_i}, t)`, using multilinear
    /// interpolation (zero outside the source box).
    ///
    /// Fails when more than `coverage_limit` of the mass of `u` sits at
    /// points whose image lies outside `target`.
    pub fn push_field(
        &self,
        u: &Field,
        target: &Grid,
        coverage_limit: f64,
    ) -> Result<Field, TransformError> {
        if u.frame() != Frame::Original {
            return Err(TransformError::WrongFrame {
                expected: Frame::Original,
                got: u.frame(),
            });
        }
        self.check_grid(target)?;
        let t = u.time();
        let h = self.h_of_t(t)?;
        let tau = self.tau_of_t(t)?;
        let shrink: Vec<f64> = self
            .exponents
            .alpha()
            .iter()
            .map(|a| (-a * tau).exp())
            .collect();
        let lost = mass_outside(u, target, &shrink);
        let total = u.mass();
        let fraction = if total > 0.0 { lost / total } else { 0.0 };
        if fraction > coverage_limit {
            return Err(TransformError::Coverage {
                fraction,
                limit: coverage_limit,
            });
        }
        let stretch: Vec<f64> = shrink.iter().map(|s| 1.0 / s).collect();
        let values = resample(u, target, &stretch, h);
        Ok(Field::new(target.clone(), values, tau, Frame::Rescaled)?)
    }

    /// Inverse of [`push_field`](Self::push_field): `u(x, t(τ)) = e^{−τ}V(x_i e^{−α_iτ}, τ)`.
    pub fn pull_field(
        &self,
        v: &Field,
        target: &Grid,
        coverage_limit: f64,
    ) -> Result<Field, TransformError> {
        if v.frame() != Frame::Rescaled {
            return Err(TransformError::WrongFrame {
                expected: Frame::Rescaled,
                got: v.frame(),
            });
        }
        self.check_grid(target)?;
        let tau = v.time();
        let t = self.t_of_tau(tau)?;
        let grow: Vec<f64> = self
            .exponents
            .alpha()
            .iter()
            .map(|a| (a * tau).exp())
            .collect();
        let lost = mass_outside(v, target, &grow);
        let total = v.mass();
        let fraction = if total > 0.0 { lost / total } else { 0.0 };
        if fraction > coverage_limit {
            return Err(TransformError::Coverage {
                fraction,
                limit: coverage_limit,
            });
        }
        let stretch: Vec<f64> = grow.iter().map(|s| 1.0 / s).collect();
        let values = resample(v, target, &stretch, (-tau).exp());
        Ok(Field::new(target.clone(), values, t, Frame::Original)?)
    }

    fn check_dim(&self, p: &[f64]) -> Result<(), TransformError> {
        if p.len() != self.exponents.dim() {
            return Err(TransformError::Dimension {
                expected: self.exponents.dim(),
                got: p.len(),
            });
        }
        Ok(())
    }

    fn check_grid(&self, g: &Grid) -> Result<(), TransformError> {
        if g.dim() != self.exponents.dim() {
            return Err(TransformError::Dimension {
                expected: self.exponents.dim(),
                got: g.dim(),
            });
        }
        Ok(())
    }
}

fn check_time(t: f64) -> Result<(), TransformError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(TransformError::NegativeTime(t));
    }
    Ok(())
}

/// Target node `p` reads the source at `p_i·stretch_i`, scaled by `amp`.
fn resample(src: &Field, target: &Grid, stretch: &[f64], amp: f64) -> Vec<f64> {
    (0..target.len())
        .into_par_iter()
        .map(|k| {
            let p: Vec<f64> = target
                .point(k)
                .iter()
                .zip(stretch)
                .map(|(y, s)| y * s)
                .collect();
            amp * src.grid().interpolate(src.values(), &p)
        })
        .collect()
}

/// Mass of `src` at nodes whose image `p_i·factor_i` falls outside `target`.
fn mass_outside(src: &Field, target: &Grid, factor: &[f64]) -> f64 {
    let g = src.grid();
    let mut s = 0.0;
    for (k, &v) in src.values().iter().enumerate() {
        if v > 0.0 {
            let out = g
                .point(k)
                .iter()
                .zip(factor)
                .zip(target.half_widths())
                .any(|((x, f), l)| (x * f).abs() > l * (1.0 + 1e-12));
            if out {
                s += v;
            }
        }
    }
    s * g.cell_volume()
}
