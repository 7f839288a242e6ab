use crate::params::MAX_DIM;
use crate::solver::SolverError;

/// Tensor-product box `Π [−L_i, L_i]` with `sizes[i]` nodes per axis.
///
/// Node `j` on axis `i` sits at `−L_i + j·Δ_i`, `Δ_i = 2L_i/(sizes_i − 1)`.
/// Values are stored row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    sizes: Vec<usize>,
    half_widths: Vec<f64>,
    spacings: Vec<f64>,
}

impl Grid {
    pub fn new(sizes: &[usize], half_widths: &[f64]) -> Result<Self, SolverError> {
        let n = sizes.len();
        if n == 0 || n > MAX_DIM {
            return Err(SolverError::Grid(format!("unsupported dimension {n}")));
        }
        if half_widths.len() != n {
            return Err(SolverError::Grid(format!(
                "{} half-widths for {n} axes",
                half_widths.len()
            )));
        }
        if let Some(s) = sizes.iter().find(|&&s| s < 2) {
            return Err(SolverError::Grid(format!("axis with {s} nodes (need >= 2)")));
        }
        if let Some(l) = half_widths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(SolverError::Grid(format!("half-width {l} is not positive")));
        }
        let spacings = sizes
            .iter()
            .zip(half_widths)
            .map(|(&s, &l)| 2.0 * l / (s - 1) as f64)
            .collect();
        Ok(Self {
            sizes: sizes.to_vec(),
            half_widths: half_widths.to_vec(),
            spacings,
        })
    }

    /// Grid with the given spacing `dx` on each axis (sizes rounded to fit).
    pub fn with_spacing(half_widths: &[f64], dx: &[f64]) -> Result<Self, SolverError> {
        let sizes: Vec<usize> = half_widths
            .iter()
            .zip(dx)
            .map(|(l, d)| (2.0 * l / d).round() as usize + 1)
            .collect();
        Self::new(&sizes, half_widths)
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }
    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Π Δ_i`, the quadrature weight of every node.
    pub fn cell_volume(&self) -> f64 {
        self.spacings.iter().product()
    }

    /// Row-major stride of each axis.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for i in (0..self.dim().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.sizes[i + 1];
        }
        s
    }

    pub fn coord(&self, axis: usize, j: usize) -> f64 {
        -self.half_widths[axis] + j as f64 * self.spacings[axis]
    }

    /// Multi-index of a flat index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            idx[i] = flat % self.sizes[i];
            flat /= self.sizes[i];
        }
        idx
    }

    /// Coordinates of a flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(i, &j)| self.coord(i, j))
            .collect()
    }

    /// Coordinates of every node, in storage order.
    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |k| self.point(k))
    }

    /// Evaluates `f` at every node.
    pub fn sample<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> Vec<f64> {
        self.points().map(|p| f(&p)).collect()
    }

    /// Decomposition `(outer, len, inner)` for sweeps along `axis`: node
    /// `(o, k, r)` has flat index `(o·len + k)·inner + r`.
    pub(crate) fn axis_layout(&self, axis: usize) -> (usize, usize, usize) {
        let outer = self.sizes[..axis].iter().product();
        let inner = self.sizes[axis + 1..].iter().product();
        (outer, self.sizes[axis], inner)
    }

    /// Multilinear interpolation of nodal `values` at `x`; zero outside the box.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        let n = self.dim();
        let strides = self.strides();
        let mut lower = [0usize; MAX_DIM];
        let mut frac = [0.0f64; MAX_DIM];
        for i in 0..n {
            let s = (x[i] + self.half_widths[i]) / self.spacings[i];
            let last = (self.sizes[i] - 1) as f64;
            if !(s >= 0.0 && s <= last) {
                return 0.0;
            }
            let j = (s.floor() as usize).min(self.sizes[i] - 2);
            lower[i] = j;
            frac[i] = s - j as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut flat = 0;
            for i in 0..n {
                let up = corner >> i & 1;
                w *= if up == 1 { frac[i] } else { 1.0 - frac[i] };
                flat += (lower[i] + up) * strides[i];
            }
            if w != 0.0 {
                acc += w * values[flat];
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_coords() {
        let g = Grid::new(&[2001], &[10.0]).unwrap();
        assert!((g.spacings()[0] - 0.01).abs() < 1e-15);
        assert_eq!(g.coord(0, 0), -10.0);
        assert!((g.coord(0, 2000) - 10.0).abs() < 1e-12);
        let g = Grid::with_spacing(&[10.0], &[0.01]).unwrap();
        assert_eq!(g.sizes(), &[2001]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(&[], &[]).is_err());
        assert!(Grid::new(&[3, 3, 3, 3], &[1.0; 4]).is_err());
        assert!(Grid::new(&[1], &[1.0]).is_err());
        assert!(Grid::new(&[5], &[0.0]).is_err());
        assert!(Grid::new(&[5, 5], &[1.0]).is_err());
    }

    #[test]
    fn strides_and_indices() {
        let g = Grid::new(&[3, 4, 5], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(g.strides(), vec![20, 5, 1]);
        assert_eq!(g.multi_index(20 * 2 + 5 * 3 + 4), vec![2, 3, 4]);
        assert_eq!(g.axis_layout(1), (3, 4, 5));
        assert_eq!(g.axis_layout(0), (1, 3, 20));
        assert_eq!(g.axis_layout(2), (12, 5, 1));
    }

    #[test]
    fn interpolation_reproduces_bilinear() {
        let g = Grid::new(&[11, 7], &[1.0, 2.0]).unwrap();
        let f = |p: &[f64]| 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[1];
        let v = g.sample(f);
        for x in [[0.13, -0.77], [-0.99, 1.99], [1.0, 2.0], [-1.0, -2.0]] {
            assert!((g.interpolate(&v, &x) - f(&x)).abs() < 1e-12);
        }
        assert_eq!(g.interpolate(&v, &[1.01, 0.0]), 0.0);
    }
}
