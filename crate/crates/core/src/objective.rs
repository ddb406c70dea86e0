//! Objectives evaluated on the full row-sum vector.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use core::fmt;

use crate::stats::{compensated_sum, sample_variance};
use crate::{Error, Result};

/// A scalar convex function applied to each row sum.
#[derive(Clone)]
pub struct ConvexFn {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ConvexFn {
    /// Wraps an arbitrary function. Convexity is the caller's promise.
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f) }
    }

    /// Looks up a built-in function by name.
    ///
    /// Known names: `square`, `abs`, `exp`, `pow:<p>` (`|s|^p`, `p >= 1`),
    /// `stop-loss:<k>` (`max(s - k, 0)`).
    pub fn builtin(name: &str) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let param = |a: Option<&str>| -> Result<f64> {
            a.and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or(Error::InvalidArgument("convex function parameter"))
        };
        let f = match head {
            "square" => Self::new("square", |s| s * s),
            "abs" => Self::new("abs", libm::fabs),
            "exp" => Self::new("exp", libm::exp),
            "pow" => {
                let p = param(arg)?;
                if p < 1.0 {
                    return Err(Error::InvalidArgument("pow exponent must be >= 1"));
                }
                Self::new(name.to_string(), move |s| libm::pow(libm::fabs(s), p))
            }
            "stop-loss" => {
                let k = param(arg)?;
                Self::new(name.to_string(), move |s| if s > k { s - k } else { 0.0 })
            }
            _ => return Err(Error::InvalidArgument("unknown convex function")),
        };
        Ok(f)
    }

    /// Name used in reports.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluates the function at `s`.
    pub fn eval(&self, s: f64) -> f64 {
        (self.f)(s)
    }
}

impl fmt::Debug for ConvexFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ConvexFn").field(&self.name).finish()
    }
}

/// What a rearrangement minimizes, as a function of the full row sums.
#[derive(Debug, Clone)]
pub enum Objective {
    /// Sample variance of the row sums (divisor `m - 1`).
    Variance,
    /// `(1/m) * sum_i f(S_i)` for a convex `f`.
    ExpectedConvex(ConvexFn),
}

impl Objective {
    /// Evaluates the objective on a row-sum vector.
    pub fn evaluate(&self, row_sums: &[f64]) -> Result<f64> {
        if row_sums.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let value = match self {
            Objective::Variance => sample_variance(row_sums),
            Objective::ExpectedConvex(f) => {
                compensated_sum(row_sums.iter().map(|&s| f.eval(s))) / row_sums.len() as f64
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::InvalidObjective(value))
        }
    }

    /// Short label, `variance` or `cvx:<name>`.
    pub fn label(&self) -> String {
        match self {
            Objective::Variance => "variance".to_string(),
            Objective::ExpectedConvex(f) => alloc::format!("cvx:{}", f.name()),
        }
    }

    /// Parses `variance` or `cvx:<builtin>`.
    pub fn parse(label: &str) -> Result<Self> {
        if label == "variance" {
            Ok(Objective::Variance)
        } else if let Some(name) = label.strip_prefix("cvx:") {
            Ok(Objective::ExpectedConvex(ConvexFn::builtin(name)?))
        } else {
            Err(Error::InvalidArgument("objective must be `variance` or `cvx:<name>`"))
        }
    }
}
