//! Initial-data generators.

use crate::solver::{Field, Frame, Grid, SolverError};

fn check_len(grid: &Grid, what: &str, v: &[f64]) -> Result<(), SolverError> {
    if v.len() != grid.dim() {
        return Err(SolverError::Grid(format!(
            "{what} has {} entries for a {}-d grid",
            v.len(),
            grid.dim()
        )));
    }
    Ok(())
}

fn positive(what: &str, v: &[f64]) -> Result<(), SolverError> {
    if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(SolverError::Grid(format!("{what} entry {x} is not positive")));
    }
    Ok(())
}

/// `amplitude · exp(−Σ (x_i − c_i)²/(2σ_i²))`.
pub fn gaussian(
    grid: &Grid,
    center: &[f64],
    sigma: &[f64],
    amplitude: f64,
) -> Result<Field, SolverError> {
    check_len(grid, "center", center)?;
    check_len(grid, "width", sigma)?;
    positive("width", sigma)?;
    Field::from_fn(grid.clone(), 0.0, Frame::Original, |p| {
        let q: f64 = p
            .iter()
            .zip(center)
            .zip(sigma)
            .map(|((x, c), s)| (x - c) * (x - c) / (2.0 * s * s))
            .sum();
        amplitude * (-q).exp()
    })
}

/// `amplitude · (1 − ρ²)²₊` with `ρ² = Σ ((x_i − c_i)/r_i)²`; compactly
/// supported in the ellipsoid with semi-axes `r_i`.
pub fn bump(
    grid: &Grid,
    center: &[f64],
    radius: &[f64],
    amplitude: f64,
) -> Result<Field, SolverError> {
    check_len(grid, "center", center)?;
    check_len(grid, "width", radius)?;
    positive("width", radius)?;
    Field::from_fn(grid.clone(), 0.0, Frame::Original, |p| {
        let rho2: f64 = p
            .iter()
            .zip(center)
            .zip(radius)
            .map(|((x, c), r)| ((x - c) / r).powi(2))
            .sum();
        let s = (1.0 - rho2).max(0.0);
        amplitude * s * s
    })
}

/// Parameters of [`spike`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeParams {
    /// Location of the singularity (should not coincide with a node).
    pub at: Vec<f64>,
    /// Radius of the singular part.
    pub radius: f64,
    /// Exponent `p < n` of the integrable singularity `|x − at|^{−p}`.
    pub power: f64,
    /// Height `a` of `a·((|x−at|/radius)^{−p} − 1)₊`.
    pub height: f64,
    /// Height `b` of the slowly decaying tail `b/(1 + |x|²)`.
    pub tail: f64,
}

/// Bump plus an integrable point singularity plus a slowly decaying tail:
/// data that is neither bounded by any truncation height nor supported in
/// any small ball.
pub fn spike(
    grid: &Grid,
    center: &[f64],
    radius: &[f64],
    amplitude: f64,
    s: &SpikeParams,
) -> Result<Field, SolverError> {
    check_len(grid, "spike location", &s.at)?;
    if !(s.power >= 0.0 && s.power < grid.dim() as f64) {
        return Err(SolverError::Grid(format!(
            "spike power {} must lie in [0, {})",
            s.power,
            grid.dim()
        )));
    }
    positive("spike radius", &[s.radius])?;
    let base = bump(grid, center, radius, amplitude)?;
    let values = grid
        .points()
        .zip(base.values())
        .map(|(p, b)| {
            let d = p
                .iter()
                .zip(&s.at)
                .map(|(x, a)| (x - a) * (x - a))
                .sum::<f64>()
                .sqrt();
            let r2: f64 = p.iter().map(|x| x * x).sum();
            let sing = if d < s.radius {
                s.height * ((d / s.radius).powf(-s.power) - 1.0)
            } else {
                0.0
            };
            b + sing + s.tail / (1.0 + r2)
        })
        .collect();
    Field::new(grid.clone(), values, 0.0, Frame::Original)
}

/// `min(k, u₀)·χ_{|x| < k}`.
pub fn truncate(u0: &Field, k: f64) -> Field {
    let g = u0.grid();
    let values: Vec<f64> = g
        .points()
        .zip(u0.values())
        .map(|(p, &v)| {
            let r2: f64 = p.iter().map(|x| x * x).sum();
            if r2 < k * k {
                v.min(k)
            } else {
                0.0
            }
        })
        .collect();
    Field::new(g.clone(), values, u0.time(), u0.frame()).expect("truncation keeps values valid")
}
