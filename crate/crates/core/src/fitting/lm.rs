//! Damped Gauss-Newton (Levenberg-Marquardt) minimization.
//!
//! The optimizer works on any objective that can supply a value, a gradient and
//! a positive semi-definite curvature matrix at a point. For least squares the
//! curvature is the Gauss-Newton matrix `2 JᵀJ`; for likelihoods the Fisher
//! information plays the same role. Each iteration solves
//!
//! ```text
//! (H + λ·diag(H)) δ = -g
//! ```
//!
//! and accepts the step when it lowers the objective, shrinking `λ`;
//! otherwise `λ` grows and the step is retried.

use nalgebra::{DMatrix, DVector};

/// Value, gradient and curvature of an objective at one point.
#[derive(Debug, Clone)]
pub struct LocalModel {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub curvature: DMatrix<f64>,
}

pub trait Objective {
    fn dim(&self) -> usize;

    /// Objective value alone. `None` outside the domain.
    fn value(&self, params: &DVector<f64>) -> Option<f64>;

    fn local(&self, params: &DVector<f64>) -> Option<LocalModel>;
}

/// A residual vector and its Jacobian, as used by least squares.
pub trait Residuals {
    fn dim(&self) -> usize;

    fn residuals(&self, params: &DVector<f64>) -> Option<DVector<f64>>;

    /// Rows are residuals, columns are parameters.
    fn jacobian(&self, params: &DVector<f64>) -> Option<DMatrix<f64>>;
}

/// Sum of squared residuals, `Σ rᵢ²`.
pub struct SumOfSquares<'a, R>(pub &'a R);

impl<R: Residuals> Objective for SumOfSquares<'_, R> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, params: &DVector<f64>) -> Option<f64> {
        let r = self.0.residuals(params)?;
        let v = r.norm_squared();
        v.is_finite().then_some(v)
    }

    fn local(&self, params: &DVector<f64>) -> Option<LocalModel> {
        let r = self.0.residuals(params)?;
        let j = self.0.jacobian(params)?;
        let value = r.norm_squared();
        if !value.is_finite() || j.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let jt = j.transpose();
        Some(LocalModel {
            value,
            gradient: &jt * &r * 2.0,
            curvature: &jt * &j * 2.0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub max_iterations: usize,
    /// Relative step size below which the iteration stops.
    pub xtol: f64,
    /// Relative decrease of the objective below which the iteration stops.
    pub ftol: f64,
    pub initial_damping: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            max_iterations: 1000,
            xtol: 1e-13,
            ftol: 1e-16,
            initial_damping: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub params: DVector<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const MAX_DAMPING: f64 = 1e20;

fn damped_step(model: &LocalModel, damping: f64) -> Option<DVector<f64>> {
    let n = model.gradient.len();
    let max_diag = (0..n)
        .map(|i| model.curvature[(i, i)])
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut system = model.curvature.clone();
    for i in 0..n {
        let d = model.curvature[(i, i)].max(1e-12 * max_diag);
        system[(i, i)] += damping * d;
    }
    let step = system.cholesky()?.solve(&(-&model.gradient));
    step.iter().all(|v| v.is_finite()).then_some(step)
}

/// Minimizes `objective` from `start`. Returns `None` when the objective is
/// undefined at the start point.
pub fn minimize<O: Objective>(objective: &O, start: DVector<f64>, settings: &Settings) -> Option<Outcome> {
    let mut params = start;
    let mut model = objective.local(&params)?;
    let mut damping = settings.initial_damping;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        iterations += 1;
        if model.value == 0.0 || model.gradient.iter().all(|g| *g == 0.0) {
            return Some(Outcome {
                params,
                value: model.value,
                iterations,
                converged: true,
            });
        }

        let candidate = damped_step(&model, damping).and_then(|step| {
            let next = &params + &step;
            objective.value(&next).map(|v| (step, next, v))
        });

        match candidate {
            Some((step, next, value)) if value < model.value => {
                let decrease = model.value - value;
                let small_step = step.norm() <= settings.xtol * (params.norm() + settings.xtol);
                let small_decrease = decrease <= settings.ftol * model.value;
                let Some(next_model) = objective.local(&next) else {
                    damping *= 4.0;
                    continue;
                };
                params = next;
                model = next_model;
                damping = (damping / 3.0).max(1e-15);
                if small_step || small_decrease {
                    return Some(Outcome {
                        params,
                        value: model.value,
                        iterations,
                        converged: true,
                    });
                }
            }
            _ => {
                damping *= 4.0;
                if damping > MAX_DAMPING {
                    // No descent step exists at working precision.
                    return Some(Outcome {
                        params,
                        value: model.value,
                        iterations,
                        converged: true,
                    });
                }
            }
        }
    }

    Some(Outcome {
        params,
        value: model.value,
        iterations,
        converged: false,
    })
}

/// Central finite-difference Jacobian, for checking analytic Jacobians.
pub fn numerical_jacobian<R: Residuals>(model: &R, params: &DVector<f64>) -> Option<DMatrix<f64>> {
    let base = model.residuals(params)?;
    let mut jac = DMatrix::zeros(base.len(), params.len());
    for k in 0..params.len() {
        let h = 1e-6 * params[k].abs().max(1.0);
        let mut hi = params.clone();
        hi[k] += h;
        let mut lo = params.clone();
        lo[k] -= h;
        let diff = (model.residuals(&hi)? - model.residuals(&lo)?) / (2.0 * h);
        jac.set_column(k, &diff);
    }
    Some(jac)
}
