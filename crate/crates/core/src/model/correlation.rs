use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

const PSD_TOLERANCE: f64 = 1e-10;
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Instantaneous correlation matrix of the driving Brownian motions.
///
/// Symmetric, unit diagonal, entries in `[-1, 1]`, positive semidefinite up
/// to an eigenvalue tolerance of `-1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::config("correlation.matrix", "empty matrix"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::config(
                    format!("correlation.matrix[{i}]"),
                    format!("expected {dim} entries, got {}", row.len()),
                ));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() || !(-1.0..=1.0).contains(&x) {
                    return Err(Error::config(
                        format!("correlation.matrix[{i}][{j}]"),
                        format!("entry {x} outside [-1, 1]"),
                    ));
                }
            }
            data.extend_from_slice(row);
        }
        for i in 0..dim {
            if (data[i * dim + i] - 1.0).abs() > SYMMETRY_TOLERANCE {
                return Err(Error::config(
                    format!("correlation.matrix[{i}][{i}]"),
                    "diagonal entries must equal 1",
                ));
            }
            for j in 0..i {
                if (data[i * dim + j] - data[j * dim + i]).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::config(
                        format!("correlation.matrix[{i}][{j}]"),
                        "matrix is not symmetric",
                    ));
                }
            }
        }
        let matrix = Self { dim, data };
        let min_eigenvalue = matrix.min_eigenvalue();
        if min_eigenvalue < -PSD_TOLERANCE {
            return Err(Error::NotCorrelation { min_eigenvalue });
        }
        Ok(matrix)
    }

    /// `ρ_ij = exp(-β |t_i - t_j|)` over the given reference times.
    pub fn exponential(beta: f64, times: &[f64]) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::config(
                "correlation.beta",
                format!("beta must be nonnegative, got {beta}"),
            ));
        }
        let dim = times.len();
        let mut data = Vec::with_capacity(dim * dim);
        for &ti in times {
            for &tj in times {
                data.push((-beta * (ti - tj).abs()).exp());
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `ρ_ij`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Dense lower-triangular factor, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    dim: usize,
    data: Vec<f64>,
}

impl LowerTriangular {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Writes `L z` into `out`.
    #[inline]
    pub fn mul_vec(&self, z: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            let row = &self.data[i * self.dim..i * self.dim + i + 1];
            *o = row.iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }

    /// `L Lᵀ` as a row-major vector.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..=i.min(j))
                    .map(|k| self.get(i, k) * self.get(j, k))
                    .sum();
            }
        }
        out
    }
}

/// Cholesky factor `L` with `L Lᵀ = ρ`.
///
/// Semidefinite input is handled by zeroing columns whose pivot falls below
/// the eigenvalue tolerance, which reproduces singular correlation structures
/// (e.g. perfectly correlated rates) exactly.
pub fn cholesky_factor(corr: &CorrelationMatrix) -> Result<LowerTriangular> {
    let n = corr.dim();
    let min_eigenvalue = corr.min_eigenvalue();
    if min_eigenvalue < -PSD_TOLERANCE {
        return Err(Error::NotCorrelation { min_eigenvalue });
    }
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let pivot = corr.get(j, j) - (0..j).map(|k| l[j * n + k] * l[j * n + k]).sum::<f64>();
        if pivot <= PSD_TOLERANCE {
            // column of the Schur complement vanishes for PSD input
            continue;
        }
        let d = pivot.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let s = corr.get(i, j) - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
            l[i * n + j] = s / d;
        }
    }
    Ok(LowerTriangular { dim: n, data: l })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_gram_error(corr: &CorrelationMatrix) -> f64 {
        let l = cholesky_factor(corr).unwrap();
        let g = l.gram();
        let n = corr.dim();
        (0..n * n)
            .map(|k| (g[k] - corr.get(k / n, k % n)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_factor() {
        let l = cholesky_factor(&CorrelationMatrix::identity(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn textbook_two_by_two() {
        let c = CorrelationMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let l = cholesky_factor(&c).unwrap();
        assert_eq!(l.get(0, 0), 1.0);
        assert_eq!(l.get(0, 1), 0.0);
        assert_eq!(l.get(1, 0), 0.5);
        assert!((l.get(1, 1) - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exponential_form_round_trip() {
        let c = CorrelationMatrix::exponential(0.1, &[1.0, 2.0, 3.0]).unwrap();
        assert!(max_gram_error(&c) <= 1e-12);
    }

    #[test]
    fn perfectly_correlated_is_reproduced() {
        let c = CorrelationMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let l = cholesky_factor(&c).unwrap();
        assert_eq!(l.get(1, 0), 1.0);
        assert_eq!(l.get(1, 1), 0.0);
        assert!(max_gram_error(&c) <= 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let rows = vec![
            vec![1.0, 0.9, -0.9],
            vec![0.9, 1.0, 0.9],
            vec![-0.9, 0.9, 1.0],
        ];
        match CorrelationMatrix::from_rows(&rows) {
            Err(Error::NotCorrelation { min_eigenvalue }) => assert!(min_eigenvalue < -0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_asymmetric_and_bad_diagonal() {
        assert!(CorrelationMatrix::from_rows(&[vec![1.0, 0.2], vec![0.3, 1.0]]).is_err());
        assert!(CorrelationMatrix::from_rows(&[vec![0.9, 0.0], vec![0.0, 1.0]]).is_err());
        assert!(CorrelationMatrix::from_rows(&[vec![1.0, 1.5], vec![1.5, 1.0]]).is_err());
    }
}
