//! Samples from the linear model and ordinary least squares.

use nalgebra::{DMatrix, DVector};
use rand::RngCore;

use super::{DesignLaw, ErrorLaw};
use crate::error::{invalid, Error, Result};

/// Observations `(x_i, y_i)` of `y = x'β + ε`, design stored `n × p`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample {
    x: DMatrix<f64>,
    y: DVector<f64>,
}

impl RegressionSample {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.nrows(),
                got: y.len(),
            });
        }
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(invalid("x", "design must be non-empty"));
        }
        for (index, &value) in x.iter().chain(y.iter()).enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
        }
        Ok(Self { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    /// `y - x b`.
    pub fn residuals(&self, b: &DVector<f64>) -> DVector<f64> {
        &self.y - &self.x * b
    }
}

/// Draws `n` observations; also returns the true errors.
pub fn simulate_regression(
    design: &dyn DesignLaw,
    law: &dyn ErrorLaw,
    beta: &[f64],
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<(RegressionSample, Vec<f64>)> {
    let p = design.dim();
    if beta.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: beta.len(),
        });
    }
    let mut x = DMatrix::zeros(n, p);
    let mut row = vec![0.0; p];
    for i in 0..n {
        design.sample_into(rng, &mut row);
        for j in 0..p {
            x[(i, j)] = row[j];
        }
    }
    let eps = law.sample(n, rng);
    let b = DVector::from_column_slice(beta);
    let y = &x * &b + DVector::from_column_slice(&eps);
    Ok((RegressionSample::new(x, y)?, eps))
}

/// Least-squares coefficients with the plug-in influence terms
/// `(X'X/n)^{-1} x_i ε̂_i`, one row per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    pub influence: DMatrix<f64>,
}

/// Ordinary least squares through the Cholesky factor of the Gram matrix.
pub fn ols_fit(s: &RegressionSample) -> Result<OlsFit> {
    let n = s.n() as f64;
    let gram = s.x.transpose() * &s.x;
    let chol = gram.clone().cholesky().ok_or(Error::SingularDesign)?;
    // Cholesky succeeds on barely positive matrices; refuse those too.
    let diag = chol.l_dirty().diagonal();
    let (dmin, dmax) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    if !(dmin > 1e-10 * dmax) {
        return Err(Error::SingularDesign);
    }
    let beta = chol.solve(&(s.x.transpose() * &s.y));
    let residuals = s.residuals(&beta);
    let inv_second_moment = chol.inverse() * n;
    let mut influence = &s.x * inv_second_moment.transpose();
    for (i, mut row) in influence.row_iter_mut().enumerate() {
        row *= residuals[i];
    }
    Ok(OlsFit {
        beta,
        residuals,
        influence,
    })
}
