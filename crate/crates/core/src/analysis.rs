//! Error metrics, network/oracle equivalence checks and empirical
//! convergence orders.

use rayon::prelude::*;
use serde::Serialize;

use crate::builders::MethodSpec;
use crate::error::{Error, Result};
use crate::grid::{KnotGrid, TargetSamples};
use crate::network::Network;
use crate::oracle::PiecewiseOracle;
use crate::targets::Target;

/// Default evaluation grid size; with power-of-two knot counts most of its
/// points fall strictly between knots.
pub const DEFAULT_GRID_SIZE: usize = 10_001;

/// Relative threshold below which a sweep counts as exact reproduction.
pub const ZERO_ERROR_THRESHOLD: f64 = 1e-12;

/// `m` equally spaced points covering `[0, 1]`, endpoints included.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    let last = (m - 1) as f64;
    (0..m).map(|i| i as f64 / last).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub sup_error: f64,
    /// Root mean square over the grid points.
    pub l2_error: f64,
    pub grid_size: usize,
    /// Where the sup error is attained.
    pub worst_x: f64,
}

pub fn measure_error(
    approx: impl Fn(f64) -> f64,
    target: impl Fn(f64) -> f64,
    grid_size: usize,
) -> Result<ErrorSummary> {
    if grid_size < 2 {
        return Err(Error::usage("error grid needs at least 2 points"));
    }
    let mut sup = 0.0f64;
    let mut worst_x = 0.0;
    let mut sq = 0.0;
    for x in uniform_grid(grid_size) {
        let (a, t) = (approx(x), target(x));
        if !a.is_finite() || !t.is_finite() {
            return Err(Error::numerical(format!("non-finite evaluation at x = {x}")));
        }
        let e = (a - t).abs();
        if e > sup {
            sup = e;
            worst_x = x;
        }
        sq += e * e;
    }
    Ok(ErrorSummary {
        sup_error: sup,
        l2_error: (sq / grid_size as f64).sqrt(),
        grid_size,
        worst_x,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub passed: bool,
    pub max_deviation: f64,
    pub worst_x: f64,
    pub worst_output: usize,
    pub tol: f64,
}

/// Compares a network with an oracle on a uniform grid; passes iff the
/// largest deviation over all outputs is within `tol`.
pub fn verify_equivalence(
    net: &Network,
    model: &PiecewiseOracle,
    grid_size: usize,
    tol: f64,
) -> Result<EquivalenceReport> {
    if net.output_dim() != model.output_dim() {
        return Err(Error::usage(format!(
            "network has {} outputs, oracle has {}",
            net.output_dim(),
            model.output_dim()
        )));
    }
    if grid_size < 2 {
        return Err(Error::usage("equivalence grid needs at least 2 points"));
    }
    let xs = uniform_grid(grid_size);
    let rows = net.forward_grid(&xs)?;
    let mut report = EquivalenceReport {
        passed: false,
        max_deviation: 0.0,
        worst_x: 0.0,
        worst_output: 0,
        tol,
    };
    for (x, row) in xs.iter().zip(&rows) {
        let reference = model.eval(*x)?;
        for (k, (a, b)) in row.iter().zip(&reference).enumerate() {
            let d = (a - b).abs();
            if d > report.max_deviation || d.is_nan() {
                report.max_deviation = d;
                report.worst_x = *x;
                report.worst_output = k;
            }
        }
    }
    report.passed = report.max_deviation <= tol;
    Ok(report)
}

/// Least-squares line through `(ln n, ln e)`; returns the negated slope
/// and the coefficient of determination.
pub fn fit_log_log(n_values: &[usize], errors: &[f64]) -> Result<(f64, f64)> {
    if n_values.len() != errors.len() || n_values.len() < 2 {
        return Err(Error::usage("log-log fit needs at least two matching points"));
    }
    if errors.iter().any(|&e| e.is_nan() || e <= 0.0 || e.is_infinite()) {
        return Err(Error::numerical("log-log fit needs positive finite errors"));
    }
    let xs: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok((-slope, r_squared))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub method: String,
    pub target: String,
    pub n_values: Vec<usize>,
    pub sup_errors: Vec<f64>,
    pub l2_errors: Vec<f64>,
    /// `None` when every error is at rounding level (exact reproduction).
    pub fitted_order: Option<f64>,
    pub r_squared: Option<f64>,
    pub nominal_order: u32,
    pub grid_size: usize,
}

impl ConvergenceReport {
    pub fn order_applicable(&self) -> bool {
        self.fitted_order.is_some()
    }

    /// Rows `n,h,sup_error,l2_error`, shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,h,sup_error,l2_error\n");
        for ((n, sup), l2) in self.n_values.iter().zip(&self.sup_errors).zip(&self.l2_errors) {
            let h = 1.0 / *n as f64;
            out.push_str(&format!("{n},{h},{sup},{l2}\n"));
        }
        out
    }

    pub fn to_json_summary(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value["order_applicable"] = serde_json::Value::Bool(self.order_applicable());
        serde_json::to_string_pretty(&value).expect("report serializes")
    }
}

fn check_sweep(spec: &MethodSpec, n_values: &[usize], grid_size: usize) -> Result<()> {
    if n_values.len() < 3 {
        return Err(Error::usage("convergence sweep needs at least 3 values of N"));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("values of N must be strictly increasing"));
    }
    if let Some(n) = n_values.iter().find(|&&n| n < 4) {
        return Err(Error::usage(format!("N = {n} is below the minimum of 4")));
    }
    if grid_size < 2 {
        return Err(Error::usage("error grid needs at least 2 points"));
    }
    n_values.iter().try_for_each(|&n| spec.check_n(n))
}

fn sweep<F>(
    spec: &MethodSpec,
    target: Target,
    n_values: &[usize],
    grid_size: usize,
    approx_for: F,
) -> Result<ConvergenceReport>
where
    F: Fn(&TargetSamples) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> + Sync,
{
    check_sweep(spec, n_values, grid_size)?;
    let summaries: Vec<ErrorSummary> = n_values
        .par_iter()
        .map(|&n| {
            let samples = TargetSamples::from_fn(KnotGrid::new(n)?, |x| target.eval(x));
            let approx = approx_for(&samples)?;
            measure_error(approx, |x| target.eval(x), grid_size)
        })
        .collect::<Result<_>>()?;

    let sup_errors: Vec<f64> = summaries.iter().map(|s| s.sup_error).collect();
    let l2_errors = summaries.iter().map(|s| s.l2_error).collect();
    let exact_level = ZERO_ERROR_THRESHOLD * target.sup_abs().max(1.0);
    let (fitted_order, r_squared) = if sup_errors.iter().all(|&e| e <= exact_level) {
        (None, None)
    } else {
        let (order, r2) = fit_log_log(n_values, &sup_errors)?;
        (Some(order), Some(r2))
    };
    Ok(ConvergenceReport {
        method: spec.method.name().to_string(),
        target: target.name().to_string(),
        n_values: n_values.to_vec(),
        sup_errors,
        l2_errors,
        fitted_order,
        r_squared,
        nominal_order: spec.method.nominal_order(),
        grid_size,
    })
}

/// Builds the network for each `N`, measures its sup error against the
/// analytic target and fits the order in log-log space.
pub fn estimate_order(
    spec: &MethodSpec,
    target: Target,
    n_values: &[usize],
    grid_size: usize,
) -> Result<ConvergenceReport> {
    sweep(spec, target, n_values, grid_size, |samples| {
        let net = spec.build(samples)?;
        Ok(Box::new(move |x| net.forward(x).map(|y| y[0]).unwrap_or(f64::NAN)))
    })
}

/// Same sweep, evaluating the matching oracle instead of the network.
pub fn estimate_order_oracle(
    spec: &MethodSpec,
    target: Target,
    n_values: &[usize],
    grid_size: usize,
) -> Result<ConvergenceReport> {
    sweep(spec, target, n_values, grid_size, |samples| {
        let oracle = PiecewiseOracle::for_method(spec, samples)?;
        Ok(Box::new(move |x| oracle.eval(x).map(|y| y[0]).unwrap_or(f64::NAN)))
    })
}
