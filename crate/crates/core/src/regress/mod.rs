//! Curve models of the ratio over time: the symmetric four-parameter
//! logistic (4PL) sigmoid and the quartic polynomial, with R², AIC and
//! AIC-based model ranking.

mod compare;
mod fourpl;
mod metrics;
mod quartic;

use serde_json::{json, Value};
use thiserror::Error;

use crate::scalar::Real;

pub use self::compare::{compare_models, Ranking};
pub use self::fourpl::{eval_4pl, fit_4pl, FourPl};
pub use self::metrics::{aic, r_squared, rss};
pub use self::quartic::{fit_quartic, Quartic};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("x values are not distinct enough to determine the model")]
    DegenerateX,
    #[error("observations have zero variance")]
    ZeroTotalVariance,
    #[error("residual sum of squares must be positive, got {0}")]
    NonPositiveRss(f64),
    #[error("fits were made on different data")]
    MismatchedData,
    #[error("4PL is undefined at x = 0 when b <= 0")]
    UndefinedAtZero,
    #[error("x must be non-negative, got {0}")]
    NegativeX(f64),
    #[error("point {0} is not finite")]
    NonFinite(usize),
    #[error("{0}")]
    InvalidOptions(String),
    #[error("observations and predictions differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// Controls for the iterative 4PL fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Convergence threshold on the relative RSS change between accepted steps.
    pub tolerance: f64,
    pub multistart_count: usize,
    pub b_bounds: (f64, f64),
    /// Lower bound on `c`, minutes.
    pub c_min: f64,
    /// Upper bound on `c` as a multiple of the largest x.
    pub c_max_factor: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-12,
            multistart_count: 16,
            b_bounds: (0.01, 50.0),
            c_min: 0.1,
            c_max_factor: 1e5,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<(), FitError> {
        let bad = |m: &str| Err(FitError::InvalidOptions(m.into()));
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if self.multistart_count == 0 {
            return bad("multistart_count must be at least 1");
        }
        let (lo, hi) = self.b_bounds;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad("b bounds must satisfy 0 < lo <= hi");
        }
        if !(self.c_min > 0.0 && self.c_max_factor > 0.0 && self.c_max_factor.is_finite()) {
            return bad("c bounds must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model<T> {
    FourPl(FourPl<T>),
    Quartic(Quartic<T>),
}

impl<T: Real> Model<T> {
    pub fn eval(&self, x: T) -> Result<T, FitError> {
        match self {
            Model::FourPl(m) => m.eval(x),
            Model::Quartic(m) => Ok(m.eval(x)),
        }
    }

    pub fn parameter_count(&self) -> usize {
        match self {
            Model::FourPl(_) => 4,
            Model::Quartic(_) => 5,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Model::FourPl(_) => "4pl",
            Model::Quartic(_) => "quartic",
        }
    }

    fn params_json(&self) -> Value {
        let f = |v: T| v.as_f64();
        match self {
            Model::FourPl(m) => json!({"a": f(m.a), "b": f(m.b), "c": f(m.c), "d": f(m.d)}),
            Model::Quartic(m) => {
                let [a, b, c, d, e] = m.coefficients;
                json!({"a": f(a), "b": f(b), "c": f(c), "d": f(d), "e": f(e)})
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitWarning {
    /// As many parameters as points: the curve passes through every point
    /// and AIC is reported as negative infinity.
    Interpolating,
    /// A nonlinear parameter sits on its bound.
    AtBound,
    /// No start met the convergence tolerance.
    NotConverged,
    /// All observations are equal.
    ConstantObservations,
}

impl FitWarning {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitWarning::Interpolating => "interpolating",
            FitWarning::AtBound => "at_bound",
            FitWarning::NotConverged => "not_converged",
            FitWarning::ConstantObservations => "constant_observations",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T> {
    pub model: Model<T>,
    pub points: Vec<(T, T)>,
    pub rss: T,
    pub r_squared: T,
    /// Negative infinity when the fit interpolates.
    pub aic: T,
    pub k: usize,
    pub n: usize,
    pub converged: bool,
    pub iterations: usize,
    pub warnings: Vec<FitWarning>,
}

/// RSS at or below this fraction of Σy² counts as exact interpolation.
pub const INTERPOLATION_RSS: f64 = 1e-9;

impl<T: Real> FitResult<T> {
    pub(crate) fn assemble(
        model: Model<T>,
        points: &[(T, T)],
        converged: bool,
        iterations: usize,
        mut warnings: Vec<FitWarning>,
    ) -> Result<Self, FitError> {
        let predictions = points.iter().map(|&(x, _)| model.eval(x)).collect::<Result<Vec<_>, _>>()?;
        let observed: Vec<T> = points.iter().map(|p| p.1).collect();
        let rss = metrics::rss(&observed, &predictions)?;
        let k = model.parameter_count();
        let n = points.len();
        let scale: T = observed.iter().map(|&y| y * y).sum();
        let interpolating = n <= k || rss <= T::of(INTERPOLATION_RSS) * scale;
        let r_squared = match metrics::r_squared(&observed, &predictions) {
            Ok(r) => r,
            Err(FitError::ZeroTotalVariance) => {
                warnings.push(FitWarning::ConstantObservations);
                if interpolating {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Err(e) => return Err(e),
        };
        let aic = if interpolating {
            warnings.push(FitWarning::Interpolating);
            T::neg_infinity()
        } else {
            metrics::aic(rss, n, k)?
        };
        if !converged {
            warnings.push(FitWarning::NotConverged);
        }
        Ok(Self {
            model,
            points: points.to_vec(),
            rss,
            r_squared,
            aic,
            k,
            n,
            converged,
            iterations,
            warnings,
        })
    }

    pub fn is_interpolating(&self) -> bool {
        self.warnings.contains(&FitWarning::Interpolating)
    }

    pub fn predictions(&self) -> Vec<T> {
        self.points
            .iter()
            .map(|&(x, _)| self.model.eval(x).unwrap_or_else(|_| T::nan()))
            .collect()
    }

    /// `{model_type, params, rss, r_squared, aic, n, k, converged, iterations}`
    /// plus `warnings`. An interpolating fit exports `aic` as `null`.
    pub fn to_json(&self) -> Value {
        let aic = self.aic.as_f64();
        json!({
            "model_type": self.model.type_name(),
            "params": self.model.params_json(),
            "rss": self.rss.as_f64(),
            "r_squared": self.r_squared.as_f64(),
            "aic": if aic.is_finite() { json!(aic) } else { Value::Null },
            "n": self.n,
            "k": self.k,
            "converged": self.converged,
            "iterations": self.iterations,
            "warnings": self.warnings.iter().map(FitWarning::as_str).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn check_points<T: Real>(points: &[(T, T)], needed: usize) -> Result<(), FitError> {
    if points.len() < needed {
        return Err(FitError::TooFewPoints {
            needed,
            found: points.len(),
        });
    }
    if let Some(i) = points.iter().position(|(x, y)| !(x.is_finite() && y.is_finite())) {
        return Err(FitError::NonFinite(i));
    }
    Ok(())
}

pub(crate) fn distinct_x<T: Real>(points: &[(T, T)]) -> usize {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0.as_f64()).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.len()
}
