//! Uniform periodic grids in one and two dimensions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grids are 1D or 2D, got n = {0}")]
    Dimension(usize),
    #[error("axis {axis} has {points} points; at least 8 are needed")]
    TooFewPoints { axis: usize, points: usize },
    #[error("spacing differs between axes: {0} vs {1}")]
    Anisotropic(f64, f64),
    #[error("extent must be positive, got {0}")]
    Extent(f64),
    #[error("expected {expected} grid values, got {got}")]
    Size { expected: usize, got: usize },
}

/// A periodic box `[-L_k/2, L_k/2)` sampled at `x = -L_k/2 + i h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    extent: Vec<f64>,
    points: Vec<usize>,
}

impl GridSpec {
    pub fn new(extent: Vec<f64>, points: Vec<usize>) -> Result<GridSpec, GridError> {
        let n = extent.len();
        if !(1..=2).contains(&n) || points.len() != n {
            return Err(GridError::Dimension(n.max(points.len())));
        }
        for (axis, (&l, &p)) in extent.iter().zip(&points).enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(GridError::Extent(l));
            }
            if p < 8 {
                return Err(GridError::TooFewPoints { axis: axis + 1, points: p });
            }
        }
        let h0 = extent[0] / points[0] as f64;
        for k in 1..n {
            let h = extent[k] / points[k] as f64;
            if (h - h0).abs() > 1e-12 * h0 {
                return Err(GridError::Anisotropic(h0, h));
            }
        }
        Ok(GridSpec { extent, points })
    }

    /// A square box with `points` per axis.
    pub fn cube(n: usize, extent: f64, points: usize) -> Result<GridSpec, GridError> {
        GridSpec::new(vec![extent; n], vec![points; n])
    }

    pub fn n(&self) -> usize {
        self.extent.len()
    }

    pub fn h(&self) -> f64 {
        self.extent[0] / self.points[0] as f64
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.n() as i32)
    }

    /// Length of the contiguous last axis.
    pub fn row_len(&self) -> usize {
        *self.points.last().unwrap()
    }

    /// Multi-index of a flat index; axis 1 is the slowest.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        match self.n() {
            1 => [idx, 0],
            _ => [idx / self.points[1], idx % self.points[1]],
        }
    }

    pub fn flatten(&self, i: [usize; 2]) -> usize {
        match self.n() {
            1 => i[0],
            _ => i[0] * self.points[1] + i[1],
        }
    }

    /// Coordinate of index `i` on `axis` (1-based).
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        -self.extent[axis - 1] / 2.0 + i as f64 * self.h()
    }

    /// Coordinates of a flat index; unused axes are 0.
    pub fn position(&self, idx: usize) -> [f64; 2] {
        let i = self.unflatten(idx);
        let mut x = [0.0; 2];
        for a in 1..=self.n() {
            x[a - 1] = self.coord(a, i[a - 1]);
        }
        x
    }

    /// Flat index of the periodic neighbour `idx ± e_axis`.
    pub fn neighbor(&self, idx: usize, axis: usize, forward: bool) -> usize {
        let mut i = self.unflatten(idx);
        let p = self.points[axis - 1];
        let k = &mut i[axis - 1];
        *k = if forward { (*k + 1) % p } else { (*k + p - 1) % p };
        self.flatten(i)
    }

    /// Distance from `c` to the nearest face of the box.
    pub fn distance_to_boundary(&self, c: &[f64]) -> f64 {
        (0..self.n())
            .map(|k| self.extent[k] / 2.0 - c.get(k).copied().unwrap_or(0.0).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_len(&self, v: &[f64]) -> Result<(), GridError> {
        if v.len() == self.len() {
            Ok(())
        } else {
            Err(GridError::Size { expected: self.len(), got: v.len() })
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.position(i))).collect()
    }

    /// Centered difference `(v[i+e_k] − v[i−e_k]) / 2h` at a flat index.
    pub fn centered(&self, v: &[f64], idx: usize, axis: usize) -> f64 {
        (v[self.neighbor(idx, axis, true)] - v[self.neighbor(idx, axis, false)]) / (2.0 * self.h())
    }

    /// Forward difference `(v[i+e_k] − v[i]) / h`.
    pub fn forward(&self, v: &[f64], idx: usize, axis: usize) -> f64 {
        (v[self.neighbor(idx, axis, true)] - v[idx]) / self.h()
    }

    /// 3-point (1D) or 5-point (2D) Laplacian at a flat index.
    pub fn laplacian_at(&self, v: &[f64], idx: usize) -> f64 {
        let mut acc = -2.0 * self.n() as f64 * v[idx];
        for a in 1..=self.n() {
            acc += v[self.neighbor(idx, a, true)] + v[self.neighbor(idx, a, false)];
        }
        acc / (self.h() * self.h())
    }

    /// Shifts a field by `s` cells along `axis`: `out[i] = v[i − s e_axis]`.
    pub fn shift(&self, v: &[f64], axis: usize, s: usize) -> Vec<f64> {
        let p = self.points[axis - 1];
        (0..self.len())
            .map(|idx| {
                let mut i = self.unflatten(idx);
                i[axis - 1] = (i[axis - 1] + p - s % p) % p;
                v[self.flatten(i)]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GridSpec::cube(3, 1.0, 16).is_err());
        assert!(GridSpec::cube(1, 1.0, 4).is_err());
        assert!(GridSpec::new(vec![1.0, 2.0], vec![16, 16]).is_err());
        let g = GridSpec::new(vec![1.0, 2.0], vec![16, 32]).unwrap();
        assert_eq!(g.len(), 512);
        assert_eq!(g.h(), 1.0 / 16.0);
    }

    #[test]
    fn coordinates_and_neighbours() {
        let g = GridSpec::cube(2, 8.0, 8).unwrap();
        assert_eq!(g.position(0), [-4.0, -4.0]);
        assert_eq!(g.position(g.flatten([4, 5])), [0.0, 1.0]);
        assert_eq!(g.neighbor(g.flatten([7, 0]), 1, true), g.flatten([0, 0]));
        assert_eq!(g.neighbor(g.flatten([7, 0]), 2, false), g.flatten([7, 7]));
        assert_eq!(g.distance_to_boundary(&[1.0, -3.0]), 1.0);
    }

    #[test]
    fn laplacian_of_a_discrete_mode() {
        let g = GridSpec::cube(1, 2.0 * std::f64::consts::PI, 32).unwrap();
        let v = g.sample(|x| x[0].sin());
        let h = g.h();
        let eig = -(2.0 - 2.0 * h.cos()) / (h * h);
        for i in 0..g.len() {
            assert!((g.laplacian_at(&v, i) - eig * v[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_moves_values() {
        let g = GridSpec::cube(2, 8.0, 8).unwrap();
        let v: Vec<f64> = (0..64).map(|i| i as f64).collect();
        let s = g.shift(&v, 2, 1);
        assert_eq!(s[g.flatten([3, 4])], v[g.flatten([3, 3])]);
        assert_eq!(g.shift(&s, 2, 7), v);
    }
}
