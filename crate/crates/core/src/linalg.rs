//! Small dense kernels for the symmetric systems that appear in the tests
//! (at most a few dozen unknowns).

use crate::scalar::{noise_floor, Scalar};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SquareMatrix<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> SquareMatrix<S> {
    pub(crate) fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![S::zero(); dim * dim],
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub(crate) fn add(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.dim + j] += v;
    }

    /// `R A R'` for a restriction matrix `R` given as rows.
    pub(crate) fn congruence(&self, rows: &[Vec<S>]) -> Self {
        let q = rows.len();
        let mut out = Self::zeros(q);
        for a in 0..q {
            for b in 0..q {
                let mut acc = S::zero();
                for i in 0..self.dim {
                    if rows[a][i] == S::zero() {
                        continue;
                    }
                    for j in 0..self.dim {
                        acc += rows[a][i] * self.get(i, j) * rows[b][j];
                    }
                }
                out.set(a, b, acc);
            }
        }
        out
    }
}

/// Lower Cholesky factor of a positive semi-definite matrix.
///
/// Pivots that vanish to rounding are zeroed and their index reported as
/// dropped, which turns later solves into a generalized inverse restricted to
/// the non-degenerate directions.
#[derive(Debug, Clone)]
pub(crate) struct Cholesky<S> {
    lower: SquareMatrix<S>,
    dropped: Vec<bool>,
}

impl<S: Scalar> Cholesky<S> {
    pub(crate) fn factor(a: &SquareMatrix<S>) -> Option<Self> {
        let scale = (0..a.dim())
            .map(|i| a.get(i, i).abs())
            .fold(S::zero(), S::max);
        Self::factor_with_scale(a, scale)
    }

    /// Pivots below rounding noise of `scale` count as zero.
    pub(crate) fn factor_with_scale(a: &SquareMatrix<S>, scale: S) -> Option<Self> {
        let n = a.dim();
        let floor = noise_floor(scale);
        let mut lower = SquareMatrix::zeros(n);
        let mut dropped = vec![false; n];
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= lower.get(j, k) * lower.get(j, k);
            }
            if d < -floor.max(S::min_positive_value()) {
                return None;
            }
            if d <= floor {
                dropped[j] = true;
                continue;
            }
            let piv = d.sqrt();
            lower.set(j, j, piv);
            for i in (j + 1)..n {
                let mut v = a.get(i, j);
                for k in 0..j {
                    v -= lower.get(i, k) * lower.get(j, k);
                }
                lower.set(i, j, v / piv);
            }
        }
        Some(Self { lower, dropped })
    }

    pub(crate) fn rank(&self) -> usize {
        self.dropped.iter().filter(|d| !**d).count()
    }

    /// Forward substitution `L z = b`; `None` if `b` has a component along a
    /// dropped direction that is not itself rounding noise.
    fn forward(&self, b: &[S]) -> Option<Vec<S>> {
        let n = self.lower.dim();
        let scale = b.iter().fold(S::zero(), |m, v| m.max(v.abs()));
        let tol = noise_floor(scale) * S::of_usize(n.max(1));
        let mut z = vec![S::zero(); n];
        for i in 0..n {
            let mut v = b[i];
            for k in 0..i {
                v -= self.lower.get(i, k) * z[k];
            }
            if self.dropped[i] {
                if v.abs() > tol {
                    return None;
                }
                z[i] = S::zero();
            } else {
                z[i] = v / self.lower.get(i, i);
            }
        }
        Some(z)
    }

    /// `b' A⁻ b`.
    pub(crate) fn quadratic_form_inverse(&self, b: &[S]) -> Option<S> {
        self.forward(b).map(|z| z.iter().map(|v| *v * *v).sum())
    }

    /// Solves `A x = b`; requires full rank.
    pub(crate) fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        if self.rank() != self.lower.dim() {
            return None;
        }
        let mut x = self.forward(b)?;
        let n = x.len();
        for i in (0..n).rev() {
            let mut v = x[i];
            for k in (i + 1)..n {
                v -= self.lower.get(k, i) * x[k];
            }
            x[i] = v / self.lower.get(i, i);
        }
        Some(x)
    }

    /// Diagonal of `A⁻¹`; requires full rank.
    pub(crate) fn inverse_diagonal(&self) -> Option<Vec<S>> {
        let n = self.lower.dim();
        let mut diag = Vec::with_capacity(n);
        let mut unit = vec![S::zero(); n];
        for i in 0..n {
            unit.iter_mut().for_each(|u| *u = S::zero());
            unit[i] = S::one();
            diag.push(self.solve(&unit)?[i]);
        }
        Some(diag)
    }
}

/// Least-squares fit of `y` on the columns of `x` (rows are observations).
pub(crate) struct LeastSquares<S> {
    pub coefficients: Vec<S>,
    pub residuals: Vec<S>,
    /// Diagonal of `(X'X)⁻¹`.
    pub xtx_inv_diag: Vec<S>,
}

pub(crate) fn least_squares<S: Scalar>(x: &[Vec<S>], y: &[S]) -> Option<LeastSquares<S>> {
    let k = x.first()?.len();
    let mut xtx = SquareMatrix::zeros(k);
    let mut xty = vec![S::zero(); k];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in 0..=i {
                xtx.add(i, j, row[i] * row[j]);
            }
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            xtx.set(i, j, xtx.get(j, i));
        }
    }
    let chol = Cholesky::factor(&xtx)?;
    let coefficients = chol.solve(&xty)?;
    let xtx_inv_diag = chol.inverse_diagonal()?;
    let residuals = x
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            yi - row
                .iter()
                .zip(&coefficients)
                .map(|(a, b)| *a * *b)
                .sum::<S>()
        })
        .collect();
    Some(LeastSquares {
        coefficients,
        residuals,
        xtx_inv_diag,
    })
}
