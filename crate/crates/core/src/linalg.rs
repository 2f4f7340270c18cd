//! Minimal dense real matrix support for amplitude-encoding matrices.

use crate::error::{Error, Result};

/// Dense square matrix of `f64`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    /// Largest deviation of `M^T M` from the identity.
    pub fn orthogonality_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let mut dot = 0.0;
                for r in 0..n {
                    dot += self.get(r, i) * self.get(r, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn check_orthogonal(&self, tol: f64) -> Result<()> {
        let deviation = self.orthogonality_deviation();
        if deviation > tol {
            Err(Error::NonOrthogonal { deviation })
        } else {
            Ok(())
        }
    }

    /// Scatters rows: row `i` of `self` becomes row `destination[i]` of the result.
    ///
    /// `destination` must be a bijection on `0..dim`.
    pub fn scatter_rows(&self, destination: &[usize]) -> Result<Self> {
        if destination.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                got: destination.len(),
            });
        }
        let mut seen = vec![false; self.dim];
        let mut out = Self::zeros(self.dim);
        for (src, &dst) in destination.iter().enumerate() {
            if dst >= self.dim || seen[dst] {
                return Err(Error::InvalidGate(format!(
                    "row destination {dst} is out of range or repeated"
                )));
            }
            seen[dst] = true;
            for c in 0..self.dim {
                out.set(dst, c, self.get(src, c));
            }
        }
        Ok(out)
    }

    /// Orthogonal matrix whose first column equals the given unit vector.
    ///
    /// Built from a Householder reflector so the remaining columns form an
    /// orthonormal completion. Returns the identity for the first basis vector.
    pub fn with_first_column(unit: &[f64]) -> Result<Self> {
        let n = unit.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let norm: f64 = unit.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnit(norm));
        }
        let mut e0_dist: f64 = (unit[0] - 1.0).abs();
        for v in &unit[1..] {
            e0_dist = e0_dist.max(v.abs());
        }
        if e0_dist < 1e-14 {
            return Ok(Self::identity(n));
        }

        // w = (e0 + u) reflects e0 onto -u; negating the reflector puts u in
        // the first column. Stable for u[0] >= 0; the difference form covers
        // the rest.
        let (mut w, negate): (Vec<f64>, bool) = if unit[0] >= 0.0 {
            let mut w = unit.to_vec();
            w[0] += 1.0;
            (w, true)
        } else {
            let mut w: Vec<f64> = unit.iter().map(|v| -v).collect();
            w[0] += 1.0;
            (w, false)
        };
        let wn: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut w {
            *v /= wn;
        }
        let mut m = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let id = if r == c { 1.0 } else { 0.0 };
                let h = id - 2.0 * w[r] * w[c];
                m.set(r, c, if negate { -h } else { h });
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn first_column_completion_is_orthogonal() {
        let u = [0.5, 0.5, 0.5, 0.5];
        let m = SquareMatrix::with_first_column(&u).unwrap();
        for (r, expect) in u.iter().enumerate() {
            assert_abs_diff_eq!(m.get(r, 0), expect, epsilon = 1e-12);
        }
        assert!(m.orthogonality_deviation() < 1e-12);
    }

    #[test]
    fn first_basis_vector_gives_identity() {
        let m = SquareMatrix::with_first_column(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(m, SquareMatrix::identity(4));
    }

    #[test]
    fn negative_leading_entry_is_stable() {
        let u = [-0.6, 0.8];
        let m = SquareMatrix::with_first_column(&u).unwrap();
        assert_abs_diff_eq!(m.get(0, 0), -0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(m.get(1, 0), 0.8, epsilon = 1e-12);
        assert!(m.orthogonality_deviation() < 1e-12);
    }

    #[test]
    fn scatter_rows_round_trip() {
        let m = SquareMatrix::from_row_major(3, (0..9).map(|v| v as f64).collect()).unwrap();
        let scattered = m.scatter_rows(&[2, 0, 1]).unwrap();
        // row 0 moved to row 2
        assert_eq!(scattered.get(2, 0), 0.0);
        assert_eq!(scattered.get(2, 1), 1.0);
        assert_eq!(scattered.get(0, 0), 3.0);
        assert!(m.scatter_rows(&[0, 0, 1]).is_err());
    }

    #[test]
    fn non_unit_vector_rejected() {
        assert!(SquareMatrix::with_first_column(&[1.0, 1.0]).is_err());
    }
}
