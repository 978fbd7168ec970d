//! Damped least squares (Levenberg–Marquardt) with analytic Jacobians, plus
//! the model fits used for relaxation, power-dependence and calibration data.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::spectrum::periodogram;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: Vec<f64>,
    /// 1σ from s²·(JᵀJ)⁻¹ with s² = SSR/(m − n).
    pub uncertainties: Vec<f64>,
    /// √SSR.
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("fit did not converge after {} iterations (residual norm {})", best.iterations, best.residual_norm)]
    NotConverged { best: Box<FitResult> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Converged when ‖δ‖ < step_tol·(‖p‖ + step_tol).
    pub step_tol: f64,
    /// Converged when max |Jᵀr| < gradient_tol.
    pub gradient_tol: f64,
    pub initial_lambda: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            step_tol: 1e-10,
            gradient_tol: 1e-12,
            initial_lambda: 1e-3,
        }
    }
}

/// Model evaluated at one abscissa: returns f(x; p) and writes ∂f/∂pⱼ into `grad`.
pub trait Model {
    fn n_params(&self) -> usize;
    fn eval(&self, x: f64, p: &[f64], grad: &mut [f64]) -> f64;
}

impl<F: Fn(f64, &[f64], &mut [f64]) -> f64> Model for (usize, F) {
    fn n_params(&self) -> usize {
        self.0
    }
    fn eval(&self, x: f64, p: &[f64], grad: &mut [f64]) -> f64 {
        (self.1)(x, p, grad)
    }
}

fn check_data(x: &[f64], y: &[f64], n_params: usize) -> Result<(), FitError> {
    if x.len() != y.len() {
        return Err(FitError::Domain(format!(
            "{} abscissae but {} ordinates",
            x.len(),
            y.len()
        )));
    }
    if x.len() < n_params + 2 {
        return Err(FitError::TooFewPoints {
            needed: n_params + 2,
            got: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(FitError::Domain("data contain non-finite values".into()));
    }
    Ok(())
}

/// Residuals r = y − f and Jacobian of f; `None` if the model is non-finite at `p`.
fn evaluate<M: Model>(model: &M, x: &[f64], y: &[f64], p: &[f64]) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let (m, n) = (x.len(), p.len());
    let mut r = DVector::zeros(m);
    let mut jac = DMatrix::zeros(m, n);
    let mut grad = vec![0.0; n];
    for i in 0..m {
        let f = model.eval(x[i], p, &mut grad);
        if !f.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return None;
        }
        r[i] = y[i] - f;
        for j in 0..n {
            jac[(i, j)] = grad[j];
        }
    }
    Some((r, jac))
}

fn uncertainties(jac: &DMatrix<f64>, ssr: f64, dof: usize) -> Vec<f64> {
    let a = jac.transpose() * jac;
    let s2 = ssr / dof.max(1) as f64;
    let cov = a
        .clone()
        .try_inverse()
        .or_else(|| a.pseudo_inverse(1e-300).ok());
    match cov {
        Some(c) => (0..jac.ncols()).map(|j| (s2 * c[(j, j)]).max(0.0).sqrt()).collect(),
        None => vec![f64::INFINITY; jac.ncols()],
    }
}

/// Minimizes Σ(yᵢ − f(xᵢ; p))² from `p0`.
///
/// λ is multiplied by 10 on a rejected step and divided by 10 on an accepted one;
/// the damping term is λ·diag(JᵀJ).
pub fn levenberg_marquardt<M: Model>(
    model: &M,
    x: &[f64],
    y: &[f64],
    p0: &[f64],
    opts: &LmOptions,
) -> Result<FitResult, FitError> {
    let n = model.n_params();
    if p0.len() != n {
        return Err(FitError::Domain(format!(
            "model has {n} parameters, initial guess has {}",
            p0.len()
        )));
    }
    check_data(x, y, n)?;
    let mut p = DVector::from_column_slice(p0);
    let (mut r, mut jac) = evaluate(model, x, y, p.as_slice())
        .ok_or_else(|| FitError::Domain("model is non-finite at the initial guess".into()))?;
    let mut ssr = r.norm_squared();
    let mut lambda = opts.initial_lambda;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let g = jac.transpose() * &r;
        if g.amax() < opts.gradient_tol {
            converged = true;
            break;
        }
        let a = jac.transpose() * &jac;
        let mut damped = a.clone();
        for j in 0..n {
            damped[(j, j)] += lambda * a[(j, j)].max(1e-300);
        }
        let Some(delta) = damped.cholesky().map(|c| c.solve(&g)) else {
            lambda *= 10.0;
            continue;
        };
        let small_step = delta.norm() < opts.step_tol * (p.norm() + opts.step_tol);
        let trial = &p + &delta;
        match evaluate(model, x, y, trial.as_slice()) {
            Some((tr, tj)) if tr.norm_squared() <= ssr => {
                p = trial;
                ssr = tr.norm_squared();
                r = tr;
                jac = tj;
                lambda = (lambda / 10.0).max(1e-15);
            }
            _ => lambda *= 10.0,
        }
        if small_step {
            converged = true;
            break;
        }
    }

    let dof = x.len() - n;
    let result = FitResult {
        uncertainties: uncertainties(&jac, ssr, dof),
        params: p.as_slice().to_vec(),
        residual_norm: ssr.sqrt(),
        converged,
        iterations,
    };
    if converged {
        Ok(result)
    } else {
        Err(FitError::NotConverged {
            best: Box::new(result),
        })
    }
}

/// Ordinary least-squares line through (u, v): returns (slope, intercept).
fn line_fit(u: &[f64], v: &[f64]) -> Option<(f64, f64)> {
    let m = u.len() as f64;
    let (su, sv) = (u.iter().sum::<f64>(), v.iter().sum::<f64>());
    let (mu, mv) = (su / m, sv / m);
    let sxx: f64 = u.iter().map(|a| (a - mu).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = u.iter().zip(v).map(|(a, b)| (a - mu) * (b - mv)).sum();
    let slope = sxy / sxx;
    Some((slope, mv - slope * mu))
}

/// y = A·exp(−(t/T₁)^β); parameters [A, T₁, β].
pub fn stretched_exponential_model() -> impl Model {
    (3, |t: f64, p: &[f64], g: &mut [f64]| {
        let (a, t1, beta) = (p[0], p[1], p[2]);
        if !(t1 > 0.0 && beta > 0.0) {
            return f64::NAN;
        }
        let ratio = t / t1;
        let u = ratio.powf(beta);
        let e = (-u).exp();
        g[0] = e;
        g[1] = a * e * u * beta / t1;
        g[2] = if ratio > 0.0 { -a * e * u * ratio.ln() } else { 0.0 };
        a * e
    })
}

/// Fits [A, T₁, β] seeded with A from the earliest point, T₁ from the 1/e crossing and β = 1.
pub fn fit_stretched_exponential(t: &[f64], y: &[f64]) -> Result<FitResult, FitError> {
    check_data(t, y, 3)?;
    if t.iter().any(|&v| v < 0.0) {
        return Err(FitError::Domain("times must be non-negative".into()));
    }
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&i, &j| t[i].total_cmp(&t[j]));
    let a0 = y[order[0]];
    let target = a0 / std::f64::consts::E;
    let mut t1 = t[order[order.len() - 1]] / 2.0;
    for w in order.windows(2) {
        let (i, j) = (w[0], w[1]);
        if (y[i] - target) * (y[j] - target) <= 0.0 && y[i] != y[j] {
            t1 = t[i] + (target - y[i]) / (y[j] - y[i]) * (t[j] - t[i]);
            break;
        }
    }
    if !(t1 > 0.0) {
        t1 = t[order[order.len() - 1]].max(f64::MIN_POSITIVE);
    }
    levenberg_marquardt(&stretched_exponential_model(), t, y, &[a0, t1, 1.0], &LmOptions::default())
}

/// y = a·x^(−b) + c; parameters [a, b, c].
pub fn power_function_model() -> impl Model {
    (3, |x: f64, p: &[f64], g: &mut [f64]| {
        let xb = x.powf(-p[1]);
        g[0] = xb;
        g[1] = -p[0] * xb * x.ln();
        g[2] = 1.0;
        p[0] * xb + p[2]
    })
}

/// Fits [a, b, c] seeded with c = min(y)/2 and (a, b) from a log-log line through y − c.
pub fn fit_power_function(x: &[f64], y: &[f64]) -> Result<FitResult, FitError> {
    check_data(x, y, 3)?;
    if x.iter().any(|&v| v <= 0.0) {
        return Err(FitError::Domain("abscissae must be positive".into()));
    }
    let c0 = y.iter().copied().fold(f64::INFINITY, f64::min) / 2.0;
    let (lx, ly): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(_, &v)| v - c0 > 0.0)
        .map(|(&u, &v)| (u.ln(), (v - c0).ln()))
        .unzip();
    let (slope, intercept) = line_fit(&lx, &ly)
        .ok_or_else(|| FitError::Domain("cannot seed power function from data".into()))?;
    levenberg_marquardt(
        &power_function_model(),
        x,
        y,
        &[intercept.exp(), -slope, c0],
        &LmOptions::default(),
    )
}

/// y = a·x^p; parameters [a, p].
pub fn power_law_model() -> impl Model {
    (2, |x: f64, p: &[f64], g: &mut [f64]| {
        let xp = x.powf(p[1]);
        g[0] = xp;
        g[1] = p[0] * xp * x.ln();
        p[0] * xp
    })
}

/// Fits [a, p] by least squares on ln y = ln a + p·ln x, so every point is
/// weighted by its relative error. `residual_norm` is in log units.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<FitResult, FitError> {
    check_data(x, y, 2)?;
    if x.iter().chain(y).any(|&v| v <= 0.0) {
        return Err(FitError::Domain("power-law data must be positive".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (slope, intercept) =
        line_fit(&lx, &ly).ok_or_else(|| FitError::Domain("abscissae are all equal".into()))?;
    let line = (2, |u: f64, p: &[f64], g: &mut [f64]| {
        g[0] = 1.0;
        g[1] = u;
        p[0] + p[1] * u
    });
    let mut fit = levenberg_marquardt(&line, &lx, &ly, &[intercept, slope], &LmOptions::default())?;
    let a = fit.params[0].exp();
    fit.params[0] = a;
    fit.uncertainties[0] *= a;
    Ok(fit)
}

/// y = C·sin(2πx/P + φ₀) + offset; parameters [C, P, φ₀, offset].
pub fn sinusoid_model() -> impl Model {
    (4, |x: f64, p: &[f64], g: &mut [f64]| {
        let (c, period, phi) = (p[0], p[1], p[2]);
        if !(period > 0.0) {
            return f64::NAN;
        }
        let arg = 2.0 * PI * x / period + phi;
        let (s, co) = arg.sin_cos();
        g[0] = s;
        g[1] = -c * co * 2.0 * PI * x / (period * period);
        g[2] = c * co;
        g[3] = 1.0;
        c * s + p[3]
    })
}

/// Linear least squares for y ≈ α·sin(ωx) + β·cos(ωx) + γ; returns (SSR, α, β, γ).
fn linear_sinusoid(x: &[f64], y: &[f64], omega: f64) -> Option<(f64, f64, f64, f64)> {
    let design = DMatrix::from_fn(x.len(), 3, |i, j| match j {
        0 => (omega * x[i]).sin(),
        1 => (omega * x[i]).cos(),
        _ => 1.0,
    });
    let rhs = DVector::from_column_slice(y);
    let coef = (design.transpose() * &design).cholesky()?.solve(&(design.transpose() * &rhs));
    let ssr = (rhs - design * &coef).norm_squared();
    Some((ssr, coef[0], coef[1], coef[2]))
}

/// Fits [C, P, φ₀, offset] with C ≥ 0 and φ₀ in (−π, π].
///
/// The period is seeded from the dominant periodogram bin and refined by a
/// linear least-squares scan over neighbouring frequencies.
pub fn fit_sinusoid(x: &[f64], y: &[f64]) -> Result<FitResult, FitError> {
    check_data(x, y, 4)?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let span = xs[xs.len() - 1] - xs[0];
    if !(span > 0.0) {
        return Err(FitError::Domain("abscissae span no range".into()));
    }
    let dx = span / (xs.len() - 1) as f64;
    let spectrum = periodogram(&ys, dx).map_err(|e| FitError::Domain(e.to_string()))?;
    let df = spectrum.resolution();
    let k = spectrum.dominant_bin().unwrap_or(1) as f64;

    let lo = (k - 1.0).max(0.25) * df;
    let hi = (k + 1.0) * df;
    const STEPS: usize = 400;
    let mut best: Option<(f64, f64, f64, f64, f64)> = None;
    for s in 0..=STEPS {
        let f = lo + (hi - lo) * s as f64 / STEPS as f64;
        if let Some((ssr, a, b, c)) = linear_sinusoid(&xs, &ys, 2.0 * PI * f) {
            if best.is_none_or(|bst| ssr < bst.0) {
                best = Some((ssr, f, a, b, c));
            }
        }
    }
    let (_, f, a, b, c) =
        best.ok_or_else(|| FitError::Domain("cannot seed sinusoid from data".into()))?;
    // α·sin + β·cos = C·sin(· + φ) with C = √(α²+β²), φ = atan2(β, α)
    let p0 = [a.hypot(b), 1.0 / f, b.atan2(a), c];
    let normalize = |mut res: FitResult| {
        if res.params[0] < 0.0 {
            res.params[0] = -res.params[0];
            res.params[2] += PI;
        }
        res.params[2] = wrap_phase(res.params[2]);
        res
    };
    match levenberg_marquardt(&sinusoid_model(), &xs, &ys, &p0, &LmOptions::default()) {
        Ok(res) => Ok(normalize(res)),
        Err(FitError::NotConverged { best }) => Err(FitError::NotConverged {
            best: Box::new(normalize(*best)),
        }),
        Err(e) => Err(e),
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}
