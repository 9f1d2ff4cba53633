//! LU decomposition with partial pivoting, for linear solves and inverses.

use super::{C64, ComplexMatrix};
use crate::error::{Error, Result};

/// Packed LU factors of a square matrix, `P A = L U` with unit-diagonal `L`.
#[derive(Debug, Clone)]
pub struct Lu {
    /// L (strictly lower part, unit diagonal implied) and U (upper part)
    /// packed into one matrix.
    factors: ComplexMatrix,
    /// Row permutation: `perm[i]` is the source row of factored row `i`.
    perm: Vec<usize>,
    /// Smallest pivot magnitude encountered; a conditioning hint.
    min_pivot: f64,
    /// Largest pivot magnitude encountered.
    max_pivot: f64,
}

impl ComplexMatrix {
    /// Factors the matrix as `P A = L U` with partial pivoting.
    ///
    /// Fails with [`Error::Singular`] when a pivot falls below a hard
    /// underflow floor; near-singular but formally invertible inputs factor
    /// successfully and report their smallest pivot through
    /// [`Lu::min_pivot`].
    pub fn lu(&self) -> Result<Lu> {
        let d = self.dim();
        let mut f = self.clone();
        let mut perm: Vec<usize> = (0..d).collect();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot: f64 = 0.0;

        for k in 0..d {
            // Pick the largest remaining entry in column k as pivot.
            let mut best = k;
            let mut best_mag = f[(k, k)].norm();
            for i in k + 1..d {
                let mag = f[(i, k)].norm();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag < 1e-300 {
                return Err(Error::Singular { pivot: best_mag });
            }
            if best != k {
                for j in 0..d {
                    let tmp = f[(k, j)];
                    f[(k, j)] = f[(best, j)];
                    f[(best, j)] = tmp;
                }
                perm.swap(k, best);
            }
            min_pivot = min_pivot.min(best_mag);
            max_pivot = max_pivot.max(best_mag);

            let pivot = f[(k, k)];
            for i in k + 1..d {
                let m = f[(i, k)] / pivot;
                f[(i, k)] = m;
                for j in k + 1..d {
                    let sub = m * f[(k, j)];
                    f[(i, j)] -= sub;
                }
            }
        }

        Ok(Lu {
            factors: f,
            perm,
            min_pivot,
            max_pivot,
        })
    }

    /// Matrix inverse via LU.
    pub fn inverse(&self) -> Result<ComplexMatrix> {
        self.lu()?.inverse()
    }
}

impl Lu {
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    /// Crude condition indicator: ratio of extreme pivot magnitudes.
    pub fn pivot_ratio(&self) -> f64 {
        if self.min_pivot > 0.0 {
            self.max_pivot / self.min_pivot
        } else {
            f64::INFINITY
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let d = self.factors.dim();
        assert_eq!(b.len(), d, "solve dimension mismatch");
        // Forward substitution on the permuted right-hand side.
        let mut y: Vec<C64> = (0..d).map(|i| b[self.perm[i]]).collect();
        for i in 0..d {
            for j in 0..i {
                let sub = self.factors[(i, j)] * y[j];
                y[i] -= sub;
            }
        }
        // Back substitution.
        for i in (0..d).rev() {
            for j in i + 1..d {
                let sub = self.factors[(i, j)] * y[j];
                y[i] -= sub;
            }
            y[i] /= self.factors[(i, i)];
        }
        y
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let d = self.factors.dim();
        assert_eq!(b.dim(), d, "solve dimension mismatch");
        let mut out = ComplexMatrix::zeros(d);
        for j in 0..d {
            let col = self.solve(&b.col(j));
            out.set_col(j, &col);
        }
        out
    }

    /// Inverse from the factorization.
    pub fn inverse(&self) -> Result<ComplexMatrix> {
        Ok(self.solve_mat(&ComplexMatrix::identity(self.factors.dim())))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{C64, ComplexMatrix};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, -1.0), c(3.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(4.0, 2.0)],
        ])
        .unwrap();
        let x = vec![c(1.0, 1.0), c(-2.0, 0.5), c(0.0, -3.0)];
        let b = a.mul_vec(&x);
        let got = a.lu().unwrap().solve(&b);
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-12, "got {g:?}, expected {e:?}");
        }
    }

    #[test]
    fn inverse_times_original_is_identity() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.0, 1.0)],
            vec![c(3.0, 0.0), c(1.0, -1.0)],
        ])
        .unwrap();
        let inv = a.inverse().unwrap();
        let prod = &a * &inv;
        assert!(prod.distance(&ComplexMatrix::identity(2)) < 1e-13);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        assert!(a.lu().is_err());
    }
}
