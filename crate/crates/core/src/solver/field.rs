use std::fmt;
use std::str::FromStr;

use crate::solver::{Grid, SolverError};

/// Which equation a field belongs to: the original equation in `(x, t)` or
/// the rescaled drift-diffusion equation in `(y, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    Original,
    Rescaled,
}

impl Frame {
    pub fn tag(self) -> u8 {
        match self {
            Frame::Original => 0,
            Frame::Rescaled => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Frame::Original),
            1 => Some(Frame::Rescaled),
            _ => None,
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Original => "original",
            Frame::Rescaled => "rescaled",
        })
    }
}

impl FromStr for Frame {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "original" => Ok(Frame::Original),
            "rescaled" => Ok(Frame::Rescaled),
            other => Err(format!("unknown frame '{other}' (original | rescaled)")),
        }
    }
}

/// Nonnegative nodal values on a [`Grid`] at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
    time: f64,
    frame: Frame,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64, frame: Frame) -> Result<Self, SolverError> {
        if values.len() != grid.len() {
            return Err(SolverError::Shape {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if !(time >= 0.0 && time.is_finite()) {
            return Err(SolverError::NegativeTime(time));
        }
        if let Some(k) = values.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(SolverError::NegativeValue {
                index: k,
                value: values[k],
            });
        }
        Ok(Self {
            grid,
            values,
            time,
            frame,
        })
    }

    pub fn zeros(grid: Grid, time: f64, frame: Frame) -> Self {
        let values = vec![0.0; grid.len()];
        Self {
            grid,
            values,
            time,
            frame,
        }
    }

    /// Samples `f` at the nodes; negative samples are rejected.
    pub fn from_fn<F: FnMut(&[f64]) -> f64>(
        grid: Grid,
        time: f64,
        frame: Frame,
        f: F,
    ) -> Result<Self, SolverError> {
        let values = grid.sample(f);
        Self::new(grid, values, time, frame)
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<f64>, time: f64, frame: Frame) -> Self {
        Self {
            grid,
            values,
            time,
            frame,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn time(&self) -> f64 {
        self.time
    }
    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Midpoint-rule mass `Σ values · Π Δ_i` (every node carries a full cell,
    /// so a constant `c` on `N` nodes integrates to `c·N·Δ`).
    pub fn mass(&self) -> f64 {
        sum_fixed(&self.values) * self.grid.cell_volume()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ |self − other| · Π Δ_i`.
    pub fn l1_distance(&self, other: &Field) -> Result<f64, SolverError> {
        self.check_same_grid(other)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum();
        Ok(s * self.grid.cell_volume())
    }

    /// Multiplies every value by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> Result<Field, SolverError> {
        Field::new(
            self.grid.clone(),
            self.values.iter().map(|v| v * factor).collect(),
            self.time,
            self.frame,
        )
    }

    /// `max |x_i|` over nodes with positive value, per axis; zeros for an
    /// all-zero field.
    pub fn support_extent(&self) -> Vec<f64> {
        let n = self.grid.dim();
        let mut ext = vec![0.0f64; n];
        for (k, &v) in self.values.iter().enumerate() {
            if v > 0.0 {
                for (i, j) in self.grid.multi_index(k).into_iter().enumerate() {
                    ext[i] = ext[i].max(self.grid.coord(i, j).abs());
                }
            }
        }
        ext
    }

    /// Mass carried by the nodes on the outer faces of the box.
    pub fn boundary_layer_mass(&self) -> f64 {
        let sizes = self.grid.sizes();
        let mut s = 0.0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > 0.0 {
                let idx = self.grid.multi_index(k);
                if idx.iter().zip(sizes).any(|(&j, &n)| j == 0 || j + 1 == n) {
                    s += v;
                }
            }
        }
        s * self.grid.cell_volume()
    }

    pub(crate) fn check_same_grid(&self, other: &Field) -> Result<(), SolverError> {
        if self.grid != other.grid {
            return Err(SolverError::Grid("fields live on different grids".into()));
        }
        Ok(())
    }
}

/// Left-to-right summation; every reduction in the crate goes through this
/// so results do not depend on thread count.
pub(crate) fn sum_fixed(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in v {
        s += x;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_mass_counts_full_cells() {
        let g = Grid::new(&[101], &[0.5]).unwrap();
        let f = Field::from_fn(g, 0.0, Frame::Original, |_| 1.0).unwrap();
        assert!((f.mass() - 1.01).abs() < 1e-12);
    }

    #[test]
    fn mass_is_linear() {
        let g = Grid::new(&[21, 11], &[1.0, 2.0]).unwrap();
        let f = Field::from_fn(g, 0.0, Frame::Original, |p| (-p[0] * p[0] - p[1] * p[1]).exp()).unwrap();
        let s = f.scaled(3.5).unwrap();
        assert!((s.mass() - 3.5 * f.mass()).abs() < 1e-12 * s.mass());
        assert_eq!(s.sup_norm(), 3.5);
    }

    #[test]
    fn rejects_bad_values() {
        let g = Grid::new(&[3], &[1.0]).unwrap();
        assert!(matches!(
            Field::new(g.clone(), vec![0.0, -1.0, 0.0], 0.0, Frame::Original),
            Err(SolverError::NegativeValue { index: 1, .. })
        ));
        assert!(Field::new(g.clone(), vec![0.0; 2], 0.0, Frame::Original).is_err());
        assert!(Field::new(g, vec![0.0; 3], -1.0, Frame::Original).is_err());
    }

    #[test]
    fn support_extent_tracks_positive_nodes() {
        let g = Grid::new(&[21, 21], &[1.0, 1.0]).unwrap();
        let f = Field::from_fn(g, 0.0, Frame::Original, |p| {
            if p[0].abs() <= 0.31 && p[1].abs() <= 0.51 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let e = f.support_extent();
        assert!((e[0] - 0.3).abs() < 1e-12 && (e[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn frame_round_trip() {
        for fr in [Frame::Original, Frame::Rescaled] {
            assert_eq!(Frame::from_tag(fr.tag()), Some(fr));
            assert_eq!(fr.to_string().parse::<Frame>().unwrap(), fr);
        }
        assert!("sideways".parse::<Frame>().is_err());
    }
}
