//! Model fitting: the Menzerath-Altmann curve for clause lengths and the
//! shifted negative binomial for the sentence-length distribution.

pub mod lm;
pub mod mal;
pub mod negbin;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mal::{fit_mal, mal_eval, MalFit, MalParams, MalProblem};
pub use negbin::{
    fit_negbin, fit_negbin_with, negbin_pmf, predicted_counts, NegBinFit, NegBinMethod, NegBinParams,
};

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} rows with sentences, found {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("no convergence after {iterations} iterations (best objective {value:e} at {params:?})")]
    Convergence {
        params: Vec<f64>,
        value: f64,
        iterations: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
}

/// Which mean clause length the curve is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Words,
    Syllables,
}

/// Per-point weights of the least-squares objective.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Share of sentences in the row.
    #[default]
    Count,
    Uniform,
}

/// `s² (JᵀJ)⁻¹` with `s² = SSR / dof`. `None` when singular or `dof == 0`.
pub(crate) fn covariance(jacobian: &DMatrix<f64>, ssr: f64, dof: usize) -> Option<DMatrix<f64>> {
    if dof == 0 {
        return None;
    }
    let jtj = jacobian.transpose() * jacobian;
    let inv = jtj.try_inverse()?;
    Some(inv * (ssr / dof as f64))
}
