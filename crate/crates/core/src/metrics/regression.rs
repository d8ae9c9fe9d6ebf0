//! Ordinary least squares for the frequency/preference comparison.
//!
//! Category totals are regressed on named predictors (for instance median
//! English word frequency and mean value preference). Predictors are scaled
//! to mean 0 and SD 1 before fitting; standardized weights come from a refit
//! with the outcome scaled as well.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::stats;

/// Largest accepted condition number of the design matrix.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RegressionError {
    #[error("need at least {needed} observations for {predictors} predictors, got {n}")]
    TooFewObservations { n: usize, predictors: usize, needed: usize },
    #[error("predictor '{name}' has {got} values, expected {expected}")]
    LengthMismatch { name: String, got: usize, expected: usize },
    #[error("predictor '{0}' is constant")]
    ConstantPredictor(String),
    #[error("outcome is constant")]
    ConstantOutcome,
    #[error("predictors are collinear (condition number {0:.3e})")]
    Collinear(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub b: f64,
    pub b_se: f64,
    pub b_ci: [f64; 2],
    pub t: f64,
    pub p: f64,
    /// Standardized weight; absent for the intercept.
    pub beta: Option<f64>,
    pub beta_ci: Option<[f64; 2]>,
    /// Squared semi-partial correlation: R² lost when the predictor is dropped.
    pub sr2: Option<f64>,
    /// Zero-order correlation with the outcome.
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub n: usize,
    pub predictors: Vec<String>,
    pub standardized_predictors: bool,
    pub intercept: Coefficient,
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_statistic: f64,
    pub f_p: f64,
    pub df_model: usize,
    pub df_residual: usize,
    pub fitted: Vec<f64>,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn predict(&self, xs: &[f64]) -> f64 {
        self.intercept.b + self.coefficients.iter().zip(xs).map(|(c, x)| c.b * x).sum::<f64>()
    }
}

struct Fit {
    coef: DVector<f64>,
    se: DVector<f64>,
    fitted: DVector<f64>,
    r_squared: f64,
    df_residual: usize,
}

fn design(columns: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, columns.len() + 1, |i, j| if j == 0 { 1.0 } else { columns[j - 1][i] })
}

fn fit(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<Fit, RegressionError> {
    let (n, k) = x.shape();
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond <= MAX_CONDITION) {
        return Err(RegressionError::Collinear(cond));
    }
    let coef = svd.solve(y, 0.0).expect("svd computed with both factors");
    let fitted = x * &coef;
    let resid = y - &fitted;
    let sse = resid.norm_squared();
    let my = y.mean();
    let sst: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let df_residual = n - k;
    let sigma2 = if df_residual > 0 { sse / df_residual as f64 } else { f64::NAN };
    // (XᵀX)⁻¹ = V Σ⁻² Vᵀ
    let v_t = svd.v_t.as_ref().expect("computed");
    let inv_s2 = DMatrix::from_diagonal(&svd.singular_values.map(|s| 1.0 / (s * s)));
    let xtx_inv = v_t.transpose() * inv_s2 * v_t;
    let se = DVector::from_fn(k, |j, _| (sigma2 * xtx_inv[(j, j)]).sqrt());
    Ok(Fit {
        coef,
        se,
        fitted,
        r_squared: if sst > 0.0 { 1.0 - sse / sst } else { f64::NAN },
        df_residual,
    })
}

/// OLS with intercept on raw predictors.
pub fn fit_ols(outcome: &[f64], predictors: &[(String, Vec<f64>)]) -> Result<RegressionResult, RegressionError> {
    regress(outcome, predictors, false)
}

/// OLS with intercept after scaling every predictor to mean 0, SD 1.
pub fn frequency_regression(
    outcome: &[f64],
    predictors: &[(String, Vec<f64>)],
) -> Result<RegressionResult, RegressionError> {
    regress(outcome, predictors, true)
}

fn regress(
    outcome: &[f64],
    predictors: &[(String, Vec<f64>)],
    scale_predictors: bool,
) -> Result<RegressionResult, RegressionError> {
    let n = outcome.len();
    let p = predictors.len();
    if n < p + 2 {
        return Err(RegressionError::TooFewObservations { n, predictors: p, needed: p + 2 });
    }
    let mut raw_cols = Vec::with_capacity(p);
    let mut std_cols = Vec::with_capacity(p);
    for (name, xs) in predictors {
        if xs.len() != n {
            return Err(RegressionError::LengthMismatch { name: name.clone(), got: xs.len(), expected: n });
        }
        let z = stats::standardize(xs).ok_or_else(|| RegressionError::ConstantPredictor(name.clone()))?;
        raw_cols.push(if scale_predictors { z.clone() } else { xs.clone() });
        std_cols.push(z);
    }
    let y = DVector::from_column_slice(outcome);
    let y_std = DVector::from_vec(stats::standardize(outcome).ok_or(RegressionError::ConstantOutcome)?);

    let x = design(&raw_cols, n);
    let main = fit(&x, &y)?;
    let standardized = fit(&design(&std_cols, n), &y_std)?;

    let df = main.df_residual as f64;
    let tdist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let tcrit = tdist.inverse_cdf(0.975);
    let two_sided = |t: f64| 2.0 * (1.0 - tdist.cdf(t.abs()));

    let coefficient = |j: usize, name: String, extra: Option<(f64, f64)>| {
        let b = main.coef[j];
        let se = main.se[j];
        let t = b / se;
        let (beta, beta_ci, sr2, r) = match extra {
            Some((sr2, r)) => {
                let beta = standardized.coef[j];
                let bse = standardized.se[j];
                (Some(beta), Some([beta - tcrit * bse, beta + tcrit * bse]), Some(sr2), Some(r))
            }
            None => (None, None, None, None),
        };
        Coefficient {
            name,
            b,
            b_se: se,
            b_ci: [b - tcrit * se, b + tcrit * se],
            t,
            p: two_sided(t),
            beta,
            beta_ci,
            sr2,
            r,
        }
    };

    let mut coefficients = Vec::with_capacity(p);
    for (j, (name, xs)) in predictors.iter().enumerate() {
        let reduced_cols: Vec<Vec<f64>> =
            raw_cols.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, c)| c.clone()).collect();
        let r2_reduced = if reduced_cols.is_empty() { 0.0 } else { fit(&design(&reduced_cols, n), &y)?.r_squared };
        let sr2 = (main.r_squared - r2_reduced).max(0.0);
        let r = stats::pearson(xs, outcome).unwrap_or(f64::NAN);
        coefficients.push(coefficient(j + 1, name.clone(), Some((sr2, r))));
    }
    let intercept = coefficient(0, "(Intercept)".into(), None);

    let ssr = main.r_squared;
    let f_statistic = (ssr / p as f64) / ((1.0 - ssr) / df);
    let f_p = statrs::distribution::FisherSnedecor::new(p as f64, df)
        .map(|f| 1.0 - f.cdf(f_statistic))
        .unwrap_or(f64::NAN);

    Ok(RegressionResult {
        n,
        predictors: predictors.iter().map(|(n, _)| n.clone()).collect(),
        standardized_predictors: scale_predictors,
        intercept,
        coefficients,
        r_squared: main.r_squared,
        adj_r_squared: 1.0 - (1.0 - main.r_squared) * (n as f64 - 1.0) / df,
        f_statistic,
        f_p,
        df_model: p,
        df_residual: main.df_residual,
        fitted: main.fitted.iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Closed-form normal equations solved by Gauss-Jordan elimination with
    /// partial pivoting. Independent of the SVD path above.
    pub(crate) fn normal_equations(y: &[f64], cols: &[Vec<f64>]) -> Vec<f64> {
        let n = y.len();
        let k = cols.len() + 1;
        let xval = |i: usize, j: usize| if j == 0 { 1.0 } else { cols[j - 1][i] };
        let mut a = vec![vec![0.0; k + 1]; k];
        for r in 0..k {
            for c in 0..k {
                a[r][c] = (0..n).map(|i| xval(i, r) * xval(i, c)).sum();
            }
            a[r][k] = (0..n).map(|i| xval(i, r) * y[i]).sum();
        }
        for col in 0..k {
            let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, piv);
            let d = a[col][col];
            for v in a[col].iter_mut() {
                *v /= d;
            }
            for r in 0..k {
                if r != col {
                    let f = a[r][col];
                    let pivot_row = a[col].clone();
                    for (v, pv) in a[r].iter_mut().zip(pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        a.iter().map(|row| row[k]).collect()
    }

    fn named(cols: &[Vec<f64>]) -> Vec<(String, Vec<f64>)> {
        cols.iter().enumerate().map(|(i, c)| (format!("x{}", i + 1), c.clone())).collect()
    }

    #[test]
    fn recovers_planted_coefficients() {
        let x1 = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let x2 = vec![3.0, -1.0, 4.0, 1.0, -5.0, 9.0, 2.0, -6.0, 5.0, 3.0];
        let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| 2.0 * a + 3.0 * b + 7.0).collect();
        let res = fit_ols(&y, &named(&[x1, x2])).unwrap();
        assert!((res.coefficients[0].b - 2.0).abs() < 1e-9);
        assert!((res.coefficients[1].b - 3.0).abs() < 1e-9);
        assert!((res.intercept.b - 7.0).abs() < 1e-9);
        assert!((res.r_squared - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scaled_predictors_keep_planted_weights() {
        // predictors already at mean 0, SD 1: scaling is a no-op
        let x1 = stats::standardize(&[1.0, 4.0, 2.0, 8.0, 5.0, 7.0, 3.0, 9.0, 6.0, 0.0]).unwrap();
        let x2 = stats::standardize(&[2.0, 2.5, 9.0, 1.0, 4.0, 3.0, 8.0, 0.5, 7.0, 6.0]).unwrap();
        let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| 2.0 * a + 3.0 * b + 7.0).collect();
        let res = frequency_regression(&y, &named(&[x1, x2])).unwrap();
        assert!((res.coefficients[0].b - 2.0).abs() < 1e-9);
        assert!((res.coefficients[1].b - 3.0).abs() < 1e-9);
        assert!((res.intercept.b - 7.0).abs() < 1e-9);
    }

    #[test]
    fn matches_normal_equations_on_random_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let n = rng.random_range(6..30);
            let p = rng.random_range(1..4);
            let cols: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.random_range(-10.0..10.0)).collect()).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
            let res = fit_ols(&y, &named(&cols)).unwrap();
            let oracle = normal_equations(&y, &cols);
            assert!((res.intercept.b - oracle[0]).abs() < 1e-9);
            for j in 0..p {
                assert!((res.coefficients[j].b - oracle[j + 1]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn invariants_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cols: Vec<Vec<f64>> = (0..2).map(|_| (0..10).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        let y: Vec<f64> = (0..10).map(|i| cols[0][i] * 5.0 - cols[1][i] + rng.random_range(0.0..1.0)).collect();
        let res = frequency_regression(&y, &named(&cols)).unwrap();
        let scaled: Vec<Vec<f64>> = cols.iter().map(|c| stats::standardize(c).unwrap()).collect();
        // predictions reproduce fitted values
        for i in 0..10 {
            let pred = res.predict(&[scaled[0][i], scaled[1][i]]);
            assert!((pred - res.fitted[i]).abs() < 1e-9);
        }
        // R² = 1 − SSE/SST
        let my = stats::mean(&y);
        let sse: f64 = y.iter().zip(&res.fitted).map(|(a, b)| (a - b).powi(2)).sum();
        let sst: f64 = y.iter().map(|a| (a - my).powi(2)).sum();
        assert!((res.r_squared - (1.0 - sse / sst)).abs() < 1e-12);
        // beta = b · sd(x_scaled) / sd(y) with scaled predictors
        let sdy = stats::sample_sd(&y);
        for c in &res.coefficients {
            assert!((c.beta.unwrap() - c.b / sdy).abs() < 1e-9);
            let sr2 = c.sr2.unwrap();
            assert!((0.0..=res.r_squared).contains(&sr2));
        }
    }

    #[test]
    fn collinear_predictors_are_rejected() {
        let x1: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v + 1.0).collect();
        let y: Vec<f64> = (0..10).map(|i| (i * i) as f64).collect();
        assert!(matches!(fit_ols(&y, &named(&[x1, x2])), Err(RegressionError::Collinear(_))));
    }

    #[test]
    fn too_few_observations() {
        assert!(matches!(
            fit_ols(&[1.0, 2.0, 3.0], &named(&[vec![1.0, 2.0, 4.0], vec![0.0, 1.0, 0.0]])),
            Err(RegressionError::TooFewObservations { .. })
        ));
    }
}
