//! Menzerath-Altmann curve `f(x) = A · x^b · exp(-c / x)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::lm::{self, Residuals, Settings, SumOfSquares};
use super::{FitError, Target, Weighting};
use crate::aggregate::AggregateTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MalParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl MalParams {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        MalParams { a, b, c }
    }

    fn to_vector(self) -> DVector<f64> {
        DVector::from_vec(vec![self.a, self.b, self.c])
    }

    fn from_slice(v: &[f64]) -> Self {
        MalParams::new(v[0], v[1], v[2])
    }

    /// Curve value without the domain check.
    pub fn value_at(&self, x: f64) -> f64 {
        self.a * x.powf(self.b) * (-self.c / x).exp()
    }
}

pub fn mal_eval(x: f64, params: &MalParams) -> Result<f64, FitError> {
    if x.is_nan() || x <= 0.0 {
        return Err(FitError::Domain(format!("curve is defined for x > 0, got {x}")));
    }
    Ok(params.value_at(x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MalFit {
    pub params: MalParams,
    /// Approximate standard errors from the Gauss-Newton covariance.
    pub std_errors: MalParams,
    /// Minimized weighted squared residual divided by the number of points.
    pub chi2_per_n: f64,
    pub points: usize,
    pub target: Target,
    pub weighting: Weighting,
    pub iterations: usize,
}

/// Weighted residuals `√w · (y - f(x))` over the data points.
#[derive(Debug, Clone)]
pub struct MalProblem {
    xs: Vec<f64>,
    ys: Vec<f64>,
    sqrt_w: Vec<f64>,
}

impl MalProblem {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, weights: Vec<f64>) -> Self {
        assert!(xs.len() == ys.len() && xs.len() == weights.len());
        MalProblem {
            xs,
            ys,
            sqrt_w: weights.into_iter().map(f64::sqrt).collect(),
        }
    }

    pub fn from_table(table: &AggregateTable, target: Target, weighting: Weighting) -> Self {
        let total = table.total_sentences as f64;
        let (mut xs, mut ys, mut ws) = (Vec::new(), Vec::new(), Vec::new());
        for row in table.nonzero_rows() {
            xs.push(f64::from(row.x));
            ys.push(match target {
                Target::Words => row.mean_words,
                Target::Syllables => row.mean_syllables,
            });
            ws.push(match weighting {
                Weighting::Count => row.sentences as f64 / total,
                Weighting::Uniform => 1.0,
            });
        }
        MalProblem::new(xs, ys, ws)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Weighted sum of squared residuals at `params`.
    pub fn objective(&self, params: &MalParams) -> f64 {
        self.residuals(&params.to_vector())
            .map_or(f64::INFINITY, |r| r.norm_squared())
    }

    /// Starting point: `A = y₁·e^0.3`, `b` from the log-log slope of the first
    /// five points, `c = 0.3`.
    pub fn initial_guess(&self) -> MalParams {
        let n = self.len().min(5);
        let lx: Vec<f64> = self.xs[..n].iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = self.ys[..n].iter().map(|y| y.max(f64::MIN_POSITIVE).ln()).collect();
        let mx = lx.iter().sum::<f64>() / n as f64;
        let my = ly.iter().sum::<f64>() / n as f64;
        let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        MalParams::new(self.ys[0] * 0.3_f64.exp(), b, 0.3)
    }

    /// The primary start followed by a fixed 2×2×2 grid around it.
    pub fn starts(&self) -> Vec<MalParams> {
        let g = self.initial_guess();
        let mut starts = vec![g];
        for a in [0.5 * g.a, 2.0 * g.a] {
            for b in [g.b - 0.3, g.b + 0.3] {
                for c in [0.0, 1.0] {
                    starts.push(MalParams::new(a, b, c));
                }
            }
        }
        starts
    }
}

impl Residuals for MalProblem {
    fn dim(&self) -> usize {
        3
    }

    fn residuals(&self, p: &DVector<f64>) -> Option<DVector<f64>> {
        let params = MalParams::from_slice(p.as_slice());
        let r = DVector::from_iterator(
            self.len(),
            self.xs
                .iter()
                .zip(&self.ys)
                .zip(&self.sqrt_w)
                .map(|((&x, &y), &w)| w * (y - params.value_at(x))),
        );
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    fn jacobian(&self, p: &DVector<f64>) -> Option<DMatrix<f64>> {
        let params = MalParams::from_slice(p.as_slice());
        let mut j = DMatrix::zeros(self.len(), 3);
        for (i, (&x, &w)) in self.xs.iter().zip(&self.sqrt_w).enumerate() {
            let e = x.powf(params.b) * (-params.c / x).exp();
            let f = params.a * e;
            j[(i, 0)] = -w * e;
            j[(i, 1)] = -w * f * x.ln();
            j[(i, 2)] = w * f / x;
        }
        Some(j)
    }
}

/// Fits the curve to one column of the table.
pub fn fit_mal(table: &AggregateTable, target: Target, weighting: Weighting) -> Result<MalFit, FitError> {
    let problem = MalProblem::from_table(table, target, weighting);
    let (params, std_errors, chi2_per_n, iterations) = fit_problem(&problem)?;
    Ok(MalFit {
        params,
        std_errors,
        chi2_per_n,
        points: problem.len(),
        target,
        weighting,
        iterations,
    })
}

/// Runs the multi-start fit on an arbitrary problem. Returns the parameters,
/// their standard errors, χ²/N and the iteration count of the winning start.
pub fn fit_problem(problem: &MalProblem) -> Result<(MalParams, MalParams, f64, usize), FitError> {
    if problem.len() < 4 {
        return Err(FitError::InsufficientData {
            needed: 4,
            found: problem.len(),
        });
    }
    let settings = Settings::default();
    let objective = SumOfSquares(problem);

    let mut best: Option<lm::Outcome> = None;
    let mut best_unconverged: Option<lm::Outcome> = None;
    for start in problem.starts() {
        let Some(outcome) = lm::minimize(&objective, start.to_vector(), &settings) else {
            continue;
        };
        let slot = if outcome.converged { &mut best } else { &mut best_unconverged };
        // strict comparison keeps the earliest start on ties
        if slot.as_ref().is_none_or(|b| outcome.value < b.value) {
            *slot = Some(outcome);
        }
    }

    let Some(best) = best else {
        let fallback = best_unconverged.map(|o| (o.params.as_slice().to_vec(), o.value, o.iterations));
        return Err(match fallback {
            Some((params, value, iterations)) => FitError::Convergence {
                params,
                value,
                iterations,
            },
            None => FitError::Domain("objective undefined at every start point".into()),
        });
    };

    let params = MalParams::from_slice(best.params.as_slice());
    let m = problem.len();
    let chi2_per_n = best.value / m as f64;
    let std_errors = problem
        .jacobian(&best.params)
        .and_then(|j| super::covariance(&j, best.value, m - 3))
        .map(|cov| MalParams::new(cov[(0, 0)].sqrt(), cov[(1, 1)].sqrt(), cov[(2, 2)].sqrt()))
        .unwrap_or(MalParams::new(f64::NAN, f64::NAN, f64::NAN));
    Ok((params, std_errors, chi2_per_n, best.iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::AggregateRow;

    fn table(points: &[(f64, u64)]) -> AggregateTable {
        let rows = points
            .iter()
            .enumerate()
            .map(|(i, &(y, n))| AggregateRow {
                x: i as u32 + 1,
                mean_words: if n > 0 { y } else { 0.0 },
                mean_syllables: if n > 0 { 2.0 * y } else { 0.0 },
                sentences: n,
            })
            .collect();
        AggregateTable::from_rows(rows).unwrap()
    }

    #[test]
    fn eval_examples() {
        let words = MalParams::new(6.80, -0.11, 0.32);
        assert!((mal_eval(1.0, &words).unwrap() - 4.94).abs() < 0.005);
        let syl = MalParams::new(13.9, -0.08, 0.35);
        assert!((mal_eval(2.0, &syl).unwrap() - 11.04).abs() < 0.005);
        let flat = MalParams::new(3.5, 0.0, 0.0);
        for x in [0.5, 1.0, 7.0, 100.0] {
            assert_eq!(mal_eval(x, &flat).unwrap(), 3.5);
        }
    }

    #[test]
    fn eval_domain() {
        let p = MalParams::new(1.0, 0.0, 0.0);
        assert!(matches!(mal_eval(0.0, &p), Err(FitError::Domain(_))));
        assert!(matches!(mal_eval(-2.0, &p), Err(FitError::Domain(_))));
        assert!(mal_eval(f64::NAN, &p).is_err());
    }

    #[test]
    fn decreasing_in_c() {
        for x in [1.0, 2.5, 9.0] {
            let mut prev = f64::INFINITY;
            for c in [0.0, 0.1, 0.5, 1.0, 2.0] {
                let v = mal_eval(x, &MalParams::new(5.0, -0.2, c)).unwrap();
                assert!(v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn three_points_is_insufficient() {
        let t = table(&[(5.0, 10), (5.2, 5), (5.1, 2)]);
        assert!(matches!(
            fit_mal(&t, Target::Words, Weighting::Count),
            Err(FitError::InsufficientData { needed: 4, found: 3 })
        ));
        // zero rows do not count
        let t = table(&[(5.0, 10), (5.2, 5), (0.0, 0), (5.1, 2)]);
        assert!(fit_mal(&t, Target::Words, Weighting::Uniform).is_err());
    }

    #[test]
    fn recovers_noiseless_curve() {
        let truth = MalParams::new(5.0, -0.1, 0.3);
        let points: Vec<(f64, u64)> = (1..=16).map(|x| (truth.value_at(f64::from(x)), 100 / x as u64 + 1)).collect();
        let fit = fit_mal(&table(&points), Target::Words, Weighting::Count).unwrap();
        assert!((fit.params.a - 5.0).abs() < 1e-6, "{:?}", fit.params);
        assert!((fit.params.b + 0.1).abs() < 1e-6);
        assert!((fit.params.c - 0.3).abs() < 1e-6);
        assert!(fit.chi2_per_n < 1e-20);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let problem = MalProblem::new(
            (1..=10).map(f64::from).collect(),
            (1..=10).map(|x| 5.0 + 0.1 * f64::from(x)).collect(),
            (1..=10).map(|x| 1.0 / f64::from(x)).collect(),
        );
        let p = DVector::from_vec(vec![6.0, -0.2, 0.4]);
        let a = problem.jacobian(&p).unwrap();
        let n = lm::numerical_jacobian(&problem, &p).unwrap();
        for (x, y) in a.iter().zip(n.iter()) {
            assert!((x - y).abs() <= 1e-5 * x.abs().max(1e-8), "{x} vs {y}");
        }
    }
}
