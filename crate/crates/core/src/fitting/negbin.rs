//! Negative binomial distribution shifted to start at `x = 1`:
//!
//! ```text
//! g(x) = Γ(r + x - 1) / (Γ(x) Γ(r)) · p^r · (1 - p)^(x - 1)
//! ```
//!
//! The gamma-function form of the binomial coefficient allows non-integer `r`.
//! Fits run in the unconstrained coordinates `(logit p, ln r)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};

use super::lm::{self, LocalModel, Objective, Residuals, Settings, SumOfSquares};
use super::FitError;
use crate::aggregate::AggregateTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegBinParams {
    pub p: f64,
    pub r: f64,
}

impl NegBinParams {
    pub fn new(p: f64, r: f64) -> Result<Self, FitError> {
        if !(p > 0.0 && p < 1.0) || !(r > 0.0 && r.is_finite()) {
            return Err(FitError::Domain(format!("need 0 < p < 1 and r > 0, got p={p}, r={r}")));
        }
        Ok(NegBinParams { p, r })
    }

    fn from_unconstrained(theta: &DVector<f64>) -> Self {
        let p = 1.0 / (1.0 + (-theta[0]).exp());
        NegBinParams { p, r: theta[1].exp() }
    }

    fn to_unconstrained(self) -> DVector<f64> {
        DVector::from_vec(vec![(self.p / (1.0 - self.p)).ln(), self.r.ln()])
    }

    fn ln_pmf(&self, x: f64) -> f64 {
        let NegBinParams { p, r } = *self;
        ln_gamma(r + x - 1.0) - ln_gamma(x) - ln_gamma(r) + r * p.ln() + (x - 1.0) * (-p).ln_1p()
    }

    /// Gradient of `ln g(x)` with respect to `(logit p, ln r)`.
    fn ln_pmf_gradient(&self, x: f64) -> [f64; 2] {
        let NegBinParams { p, r } = *self;
        [
            r * (1.0 - p) - (x - 1.0) * p,
            r * (digamma(r + x - 1.0) - digamma(r) + p.ln()),
        ]
    }
}

pub fn negbin_pmf(x: u32, params: &NegBinParams) -> Result<f64, FitError> {
    if x < 1 {
        return Err(FitError::Domain("distribution starts at x = 1".into()));
    }
    Ok(params.ln_pmf(f64::from(x)).exp())
}

/// Expected sentence counts `total · g(x)` for `x = 1..=x_max`.
pub fn predicted_counts(params: &NegBinParams, total: f64, x_max: u32) -> Result<Vec<f64>, FitError> {
    if total.is_nan() || total <= 0.0 {
        return Err(FitError::Domain(format!("total must be positive, got {total}")));
    }
    (1..=x_max)
        .map(|x| negbin_pmf(x, params).map(|g| total * g))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegBinMethod {
    /// Least squares between the relative frequencies and the pmf.
    #[default]
    LeastSquares,
    /// Maximum likelihood on the raw counts.
    MaximumLikelihood,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegBinFit {
    pub params: NegBinParams,
    pub std_errors: NegBinParams,
    /// `Σ (relative frequency - pmf)² / N` over rows with sentences.
    pub chi2_per_n: f64,
    pub points: usize,
    pub method: NegBinMethod,
    pub iterations: usize,
}

struct Counts {
    xs: Vec<f64>,
    counts: Vec<f64>,
    total: f64,
}

impl Counts {
    fn from_table(table: &AggregateTable) -> Self {
        let rows: Vec<_> = table.nonzero_rows().collect();
        Counts {
            xs: rows.iter().map(|r| f64::from(r.x)).collect(),
            counts: rows.iter().map(|r| r.sentences as f64).collect(),
            total: table.total_sentences as f64,
        }
    }

    fn frequencies(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs
            .iter()
            .zip(&self.counts)
            .map(|(&x, &n)| (x, n / self.total))
    }

    fn chi2_per_n(&self, params: &NegBinParams) -> f64 {
        let ssr: f64 = self
            .frequencies()
            .map(|(x, f)| (f - params.ln_pmf(x).exp()).powi(2))
            .sum();
        ssr / self.xs.len() as f64
    }

    /// Method-of-moments start for `x - 1`, falling back to `(0.5, 1)`.
    fn moment_guess(&self) -> NegBinParams {
        let mean: f64 = self.frequencies().map(|(x, f)| f * (x - 1.0)).sum();
        let var: f64 = self.frequencies().map(|(x, f)| f * (x - 1.0 - mean).powi(2)).sum();
        if mean > 0.0 && var > mean {
            let p = (mean / var).clamp(0.01, 0.99);
            let r = (mean * p / (1.0 - p)).clamp(0.05, 100.0);
            NegBinParams { p, r }
        } else {
            NegBinParams { p: 0.5, r: 1.0 }
        }
    }

    fn starts(&self) -> Vec<NegBinParams> {
        let mut starts = vec![self.moment_guess()];
        for p in [0.2, 0.5, 0.8] {
            for r in [0.5, 2.0] {
                starts.push(NegBinParams { p, r });
            }
        }
        starts
    }
}

struct FrequencyResiduals<'a>(&'a Counts);

impl Residuals for FrequencyResiduals<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn residuals(&self, theta: &DVector<f64>) -> Option<DVector<f64>> {
        let params = NegBinParams::from_unconstrained(theta);
        let r = DVector::from_iterator(
            self.0.xs.len(),
            self.0.frequencies().map(|(x, f)| f - params.ln_pmf(x).exp()),
        );
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    fn jacobian(&self, theta: &DVector<f64>) -> Option<DMatrix<f64>> {
        let params = NegBinParams::from_unconstrained(theta);
        let mut j = DMatrix::zeros(self.0.xs.len(), 2);
        for (i, &x) in self.0.xs.iter().enumerate() {
            let g = params.ln_pmf(x).exp();
            let d = params.ln_pmf_gradient(x);
            j[(i, 0)] = -g * d[0];
            j[(i, 1)] = -g * d[1];
        }
        Some(j)
    }
}

/// Negative log-likelihood with the Fisher information as curvature.
struct NegLogLikelihood<'a>(&'a Counts);

/// Support points needed for the Fisher information sum.
const FISHER_TAIL: f64 = 1e-14;
const FISHER_MAX_X: u32 = 200_000;

fn fisher_information(params: &NegBinParams, total: f64) -> DMatrix<f64> {
    let mut info = DMatrix::zeros(2, 2);
    let mut mass = 0.0;
    for x in 1..=FISHER_MAX_X {
        let x = f64::from(x);
        let g = params.ln_pmf(x).exp();
        let d = params.ln_pmf_gradient(x);
        info[(0, 0)] += g * d[0] * d[0];
        info[(0, 1)] += g * d[0] * d[1];
        info[(1, 1)] += g * d[1] * d[1];
        mass += g;
        if 1.0 - mass < FISHER_TAIL {
            break;
        }
    }
    info[(1, 0)] = info[(0, 1)];
    info * total
}

impl Objective for NegLogLikelihood<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, theta: &DVector<f64>) -> Option<f64> {
        let params = NegBinParams::from_unconstrained(theta);
        let v: f64 = -self
            .0
            .xs
            .iter()
            .zip(&self.0.counts)
            .map(|(&x, &n)| n * params.ln_pmf(x))
            .sum::<f64>();
        v.is_finite().then_some(v)
    }

    fn local(&self, theta: &DVector<f64>) -> Option<LocalModel> {
        let params = NegBinParams::from_unconstrained(theta);
        let value = self.value(theta)?;
        let mut gradient = DVector::zeros(2);
        for (&x, &n) in self.0.xs.iter().zip(&self.0.counts) {
            let d = params.ln_pmf_gradient(x);
            gradient[0] -= n * d[0];
            gradient[1] -= n * d[1];
        }
        Some(LocalModel {
            value,
            gradient,
            curvature: fisher_information(&params, self.0.total),
        })
    }
}

/// Standard errors of `(p, r)` from a covariance in `(logit p, ln r)`.
fn std_errors(params: &NegBinParams, cov: Option<DMatrix<f64>>) -> NegBinParams {
    match cov {
        Some(c) => NegBinParams {
            p: params.p * (1.0 - params.p) * c[(0, 0)].sqrt(),
            r: params.r * c[(1, 1)].sqrt(),
        },
        None => NegBinParams {
            p: f64::NAN,
            r: f64::NAN,
        },
    }
}

pub fn fit_negbin(table: &AggregateTable) -> Result<NegBinFit, FitError> {
    fit_negbin_with(table, NegBinMethod::default())
}

pub fn fit_negbin_with(table: &AggregateTable, method: NegBinMethod) -> Result<NegBinFit, FitError> {
    let counts = Counts::from_table(table);
    let rows = counts.xs.len();
    if rows <= 1 {
        return Err(FitError::Degenerate(
            "all sentences fall in a single clause-count bucket".into(),
        ));
    }
    if rows < 3 {
        return Err(FitError::InsufficientData { needed: 3, found: rows });
    }

    let settings = Settings::default();
    let residuals = FrequencyResiduals(&counts);
    let ls = SumOfSquares(&residuals);
    let nll = NegLogLikelihood(&counts);

    let mut best: Option<lm::Outcome> = None;
    let mut best_unconverged: Option<lm::Outcome> = None;
    for start in counts.starts() {
        let theta = start.to_unconstrained();
        let outcome = match method {
            NegBinMethod::LeastSquares => lm::minimize(&ls, theta, &settings),
            NegBinMethod::MaximumLikelihood => lm::minimize(&nll, theta, &settings),
        };
        let Some(outcome) = outcome else { continue };
        let slot = if outcome.converged { &mut best } else { &mut best_unconverged };
        if slot.as_ref().is_none_or(|b| outcome.value < b.value) {
            *slot = Some(outcome);
        }
    }

    let Some(best) = best else {
        return Err(match best_unconverged {
            Some(o) => {
                let p = NegBinParams::from_unconstrained(&o.params);
                FitError::Convergence {
                    params: vec![p.p, p.r],
                    value: o.value,
                    iterations: o.iterations,
                }
            }
            None => FitError::Domain("objective undefined at every start point".into()),
        });
    };

    let params = NegBinParams::from_unconstrained(&best.params);
    if !(params.p > 0.0 && params.p < 1.0 && params.r > 0.0 && params.r.is_finite()) {
        return Err(FitError::Degenerate(format!(
            "fit left the parameter domain: p={}, r={}",
            params.p, params.r
        )));
    }
    let cov = match method {
        NegBinMethod::LeastSquares => residuals
            .jacobian(&best.params)
            .and_then(|j| super::covariance(&j, best.value, rows - 2)),
        NegBinMethod::MaximumLikelihood => fisher_information(&params, counts.total).try_inverse(),
    };

    Ok(NegBinFit {
        params,
        std_errors: std_errors(&params, cov),
        chi2_per_n: counts.chi2_per_n(&params),
        points: rows,
        method,
        iterations: best.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::AggregateRow;

    fn table(counts: &[u64]) -> AggregateTable {
        let rows = counts
            .iter()
            .enumerate()
            .map(|(i, &n)| AggregateRow {
                x: i as u32 + 1,
                mean_words: if n > 0 { 5.0 } else { 0.0 },
                mean_syllables: if n > 0 { 10.0 } else { 0.0 },
                sentences: n,
            })
            .collect();
        AggregateTable::from_rows(rows).unwrap()
    }

    #[test]
    fn pmf_examples() {
        let p = NegBinParams::new(0.515, 1.16).unwrap();
        assert!((negbin_pmf(1, &p).unwrap() - 0.4631).abs() < 0.0005);
        assert!((negbin_pmf(2, &p).unwrap() - 0.26055).abs() < 0.0005);
        assert!(matches!(negbin_pmf(0, &p), Err(FitError::Domain(_))));
    }

    #[test]
    fn geometric_case() {
        // r = 1 is the geometric distribution p (1 - p)^(x - 1)
        let p = NegBinParams::new(0.3, 1.0).unwrap();
        for x in 1..30 {
            let expected = 0.3 * 0.7_f64.powi(x as i32 - 1);
            assert!((negbin_pmf(x, &p).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn param_domain() {
        assert!(NegBinParams::new(0.0, 1.0).is_err());
        assert!(NegBinParams::new(1.0, 1.0).is_err());
        assert!(NegBinParams::new(0.5, 0.0).is_err());
        assert!(NegBinParams::new(0.5, f64::NAN).is_err());
    }

    #[test]
    fn predicted_counts_needs_total() {
        let p = NegBinParams::new(0.515, 1.16).unwrap();
        assert!(predicted_counts(&p, 0.0, 5).is_err());
        let v = predicted_counts(&p, 8455.0, 16).unwrap();
        assert_eq!(v.len(), 16);
        assert!((v[13] - 0.52).abs() < 0.01);
        assert!((v[15] - 0.12).abs() < 0.01);
    }

    #[test]
    fn degenerate_and_insufficient() {
        assert!(matches!(
            fit_negbin(&table(&[0, 0, 100])),
            Err(FitError::Degenerate(_))
        ));
        assert!(matches!(
            fit_negbin(&table(&[50, 0, 100])),
            Err(FitError::InsufficientData { needed: 3, found: 2 })
        ));
    }

    #[test]
    fn both_methods_recover_exact_frequencies() {
        let truth = NegBinParams::new(0.4, 2.5).unwrap();
        let counts: Vec<u64> = predicted_counts(&truth, 1e7, 60)
            .unwrap()
            .into_iter()
            .map(|c| c.round() as u64)
            .collect();
        let t = table(&counts);
        for method in [NegBinMethod::LeastSquares, NegBinMethod::MaximumLikelihood] {
            let fit = fit_negbin_with(&t, method).unwrap();
            assert!((fit.params.p - 0.4).abs() < 1e-4, "{method:?} {:?}", fit.params);
            assert!((fit.params.r - 2.5).abs() < 1e-3, "{method:?} {:?}", fit.params);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let counts = Counts {
            xs: (1..=12).map(f64::from).collect(),
            counts: vec![400.0, 250.0, 120.0, 80.0, 40.0, 30.0, 20.0, 9.0, 5.0, 3.0, 2.0, 1.0],
            total: 960.0,
        };
        let res = FrequencyResiduals(&counts);
        let nll = NegLogLikelihood(&counts);
        for theta in [[0.1, 0.2], [-0.5, 1.1], [1.3, -0.4]] {
            let theta = DVector::from_vec(theta.to_vec());
            let a = res.jacobian(&theta).unwrap();
            let n = lm::numerical_jacobian(&res, &theta).unwrap();
            assert!((a - n).amax() < 1e-8);

            let g = nll.local(&theta).unwrap().gradient;
            for k in 0..2 {
                let h = 1e-6;
                let mut hi = theta.clone();
                hi[k] += h;
                let mut lo = theta.clone();
                lo[k] -= h;
                let fd = (nll.value(&hi).unwrap() - nll.value(&lo).unwrap()) / (2.0 * h);
                assert!((g[k] - fd).abs() <= 1e-5 * g[k].abs().max(1.0), "{} vs {fd}", g[k]);
            }
        }
    }
}
