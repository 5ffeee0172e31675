//! Reference approximants written directly as kernel sums
//! `Σ_j c_j K((x - x_j)/h)`, independent of any network.
//!
//! Kernels are evaluated from their closed forms, never through the
//! activation functions, so comparing a constructed network against the
//! matching oracle checks the construction itself.

use nalgebra::{DMatrix, DVector};
use ndarray::ArrayD;

use crate::builders::{Method, MethodSpec};
use crate::error::{Error, Result};
use crate::grid::{KnotGrid, TargetSamples};

/// Largest number of input dimensions the tensor-product oracle accepts.
pub const MAX_TENSOR_DIMS: usize = 3;

/// Ridge added to the diagonal of the kernel normal equations.
pub const FIT_RIDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// Unit box on `[0, 1)`.
    Box,
    /// Unit triangle, support `[-1, 1]`.
    Triangle,
    /// Cubic bump for a given inflection slope, support `[-2, 2]`.
    CubicBump(f64),
}

impl KernelKind {
    pub fn cubic_bump(inflection_slope: f64) -> Result<Self> {
        if !(0.0..=0.75).contains(&inflection_slope) {
            return Err(Error::domain(format!(
                "non-monotone cubic: inflection slope {inflection_slope} outside [0, 0.75]"
            )));
        }
        Ok(KernelKind::CubicBump(inflection_slope))
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Box => "box",
            KernelKind::Triangle => "triangle",
            KernelKind::CubicBump(_) => "bump",
        }
    }

    fn same_shape(&self, other: &KernelKind) -> bool {
        match (self, other) {
            (KernelKind::CubicBump(a), KernelKind::CubicBump(b)) => a == b,
            _ => self.name() == other.name(),
        }
    }
}

/// Kernel value at the normalized coordinate `u = (x - x_j)/h`.
pub fn eval_kernel(kind: KernelKind, u: f64) -> f64 {
    match kind {
        KernelKind::Box => {
            if (0.0..1.0).contains(&u) {
                1.0
            } else {
                0.0
            }
        }
        KernelKind::Triangle => (1.0 - u.abs()).max(0.0),
        KernelKind::CubicBump(slope) => {
            // bump(u) = q(u+1) + q(1-u) - 1 collapses to q(1 - |u|) for
            // |u| ≤ 2, where 1 - |u| spans the cubic part of q.
            let v = u.abs();
            if v >= 2.0 {
                return 0.0;
            }
            let s = 1.0 - v;
            let a3 = 0.5 - slope;
            0.5 + s * (slope + a3 * s * s)
        }
    }
}

/// Which knots carry a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    EveryKnot,
    /// Knots `0, 2, ..., N` (N even).
    EveryOtherKnot,
}

impl Spacing {
    fn stride(&self) -> usize {
        match self {
            Spacing::EveryKnot => 1,
            Spacing::EveryOtherKnot => 2,
        }
    }
}

/// Kernel at knot `j`, with the box conventions of the step network:
/// the last box `[x_{N-1}, 1]` is closed and the box starting at `x_N`
/// never contributes.
fn kernel_at(kind: KernelKind, grid: KnotGrid, j: usize, u: f64) -> f64 {
    match kind {
        KernelKind::Box if j == grid.n() => 0.0,
        KernelKind::Box if j + 1 == grid.n() && u == 1.0 => 1.0,
        _ => eval_kernel(kind, u),
    }
}

/// Knot indices (on the spacing) whose kernel support can contain `x`,
/// with the kernel values there, in increasing order.
fn window(kind: KernelKind, grid: KnotGrid, spacing: Spacing, x: f64) -> impl Iterator<Item = (usize, f64)> {
    let n = grid.n() as i64;
    let base = (grid.n() as f64 * x).floor() as i64;
    let stride = spacing.stride() as i64;
    (base - 2..=base + 2)
        .filter(move |j| (0..=n).contains(j) && j % stride == 0)
        .map(move |j| {
            let u = grid.local(x, j);
            ((j / stride) as usize, kernel_at(kind, grid, j as usize, u))
        })
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("oracle input {x} outside [0, 1]")));
    }
    Ok(())
}

/// `Σ_j c_j K((x - x_j)/h)` over the knots selected by `spacing`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseOracle {
    grid: KnotGrid,
    kernel: KernelKind,
    coefficients: Vec<Vec<f64>>,
    spacing: Spacing,
}

impl PiecewiseOracle {
    pub fn new(grid: KnotGrid, kernel: KernelKind, coefficients: Vec<Vec<f64>>, spacing: Spacing) -> Result<Self> {
        if spacing == Spacing::EveryOtherKnot && !grid.n().is_multiple_of(2) {
            return Err(Error::usage("every-other-knot spacing requires even N"));
        }
        let slots = grid.n() / spacing.stride() + 1;
        if coefficients.len() != slots {
            return Err(Error::usage(format!(
                "expected {slots} coefficient rows, got {}",
                coefficients.len()
            )));
        }
        let q = coefficients[0].len();
        if q == 0 || coefficients.iter().any(|r| r.len() != q) {
            return Err(Error::usage("coefficient rows must share a nonzero width"));
        }
        if coefficients.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::domain("non-finite oracle coefficient"));
        }
        Ok(PiecewiseOracle {
            grid,
            kernel,
            coefficients,
            spacing,
        })
    }

    /// The oracle matching a construction method: boxes with `f(x_j)` for
    /// the step network, triangles with `f(x_j)` for both linear networks,
    /// bumps with `g(x_j)` (dense solve) or `f` at even knots for the cubic
    /// designs.
    pub fn for_method(spec: &MethodSpec, samples: &TargetSamples) -> Result<Self> {
        let grid = samples.grid();
        let rows = samples.rows().to_vec();
        match spec.method {
            Method::Constant => Self::new(grid, KernelKind::Box, rows, Spacing::EveryKnot),
            Method::LinearRelu | Method::LinearRamp => Self::new(grid, KernelKind::Triangle, rows, Spacing::EveryKnot),
            Method::Cubic => {
                let g = dense_solve_coupling(samples)?;
                let rows = (0..grid.knot_count())
                    .map(|j| g.iter().map(|col| col[j]).collect())
                    .collect();
                Self::new(grid, KernelKind::cubic_bump(spec.slope)?, rows, Spacing::EveryKnot)
            }
            Method::CubicSpaced => {
                spec.check_n(grid.n())?;
                let even = rows.into_iter().step_by(2).collect();
                Self::new(grid, KernelKind::cubic_bump(spec.slope)?, even, Spacing::EveryOtherKnot)
            }
        }
    }

    pub fn grid(&self) -> KnotGrid {
        self.grid
    }

    pub fn kernel(&self) -> KernelKind {
        self.kernel
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn output_dim(&self) -> usize {
        self.coefficients[0].len()
    }

    /// Number of kernel slots along the axis.
    pub fn slot_count(&self) -> usize {
        self.coefficients.len()
    }

    /// Evaluates only the kernels whose support can contain `x`.
    pub fn eval(&self, x: f64) -> Result<Vec<f64>> {
        check_unit(x)?;
        let mut acc = vec![0.0; self.output_dim()];
        for (slot, w) in window(self.kernel, self.grid, self.spacing, x) {
            for (a, c) in acc.iter_mut().zip(&self.coefficients[slot]) {
                *a += c * w;
            }
        }
        Ok(acc)
    }

    /// Sums over every kernel slot. Slow; for cross-checking [`Self::eval`].
    pub fn eval_full_sum(&self, x: f64) -> Result<Vec<f64>> {
        check_unit(x)?;
        let stride = self.spacing.stride();
        let mut acc = vec![0.0; self.output_dim()];
        for (slot, row) in self.coefficients.iter().enumerate() {
            let j = slot * stride;
            let w = kernel_at(self.kernel, self.grid, j, self.grid.local(x, j as i64));
            for (a, c) in acc.iter_mut().zip(row) {
                *a += c * w;
            }
        }
        Ok(acc)
    }
}

pub fn eval_oracle(model: &PiecewiseOracle, x: f64) -> Result<Vec<f64>> {
    model.eval(x)
}

/// Tensor product of 1-D kernel sums:
/// `Σ_{j} V[j] Π_d K_d((x_d - x_{j_d})/h_d)`.
///
/// `models` supply the per-axis grids, kernel and spacing (their own
/// coefficients are ignored); `corner_values` has one axis per model with
/// matching slot counts.
pub fn eval_tensor_product(models: &[PiecewiseOracle], corner_values: &ArrayD<f64>, point: &[f64]) -> Result<f64> {
    let p = models.len();
    if p == 0 || p > MAX_TENSOR_DIMS {
        return Err(Error::usage(format!(
            "tensor product needs 1..={MAX_TENSOR_DIMS} axes, got {p}"
        )));
    }
    if point.len() != p || corner_values.ndim() != p {
        return Err(Error::usage(format!(
            "dimension mismatch: {p} axes, point of length {}, values of rank {}",
            point.len(),
            corner_values.ndim()
        )));
    }
    let kernel = models[0].kernel;
    for (d, m) in models.iter().enumerate() {
        if !m.kernel.same_shape(&kernel) {
            return Err(Error::usage("tensor product axes must share a kernel"));
        }
        if corner_values.shape()[d] != m.slot_count() {
            return Err(Error::usage(format!(
                "axis {d}: {} values for {} kernel slots",
                corner_values.shape()[d],
                m.slot_count()
            )));
        }
        check_unit(point[d])?;
    }

    let axes: Vec<Vec<(usize, f64)>> = models
        .iter()
        .zip(point)
        .map(|(m, &x)| window(m.kernel, m.grid, m.spacing, x).collect())
        .collect();

    let mut acc = 0.0;
    let mut index = vec![0usize; p];
    let mut cursor = vec![0usize; p];
    'outer: loop {
        let mut weight = 1.0;
        for d in 0..p {
            let (slot, w) = axes[d][cursor[d]];
            index[d] = slot;
            weight *= w;
        }
        acc += corner_values[index.as_slice()] * weight;

        // odometer over the per-axis windows, last axis fastest
        let mut d = p;
        while d > 0 {
            d -= 1;
            cursor[d] += 1;
            if cursor[d] < axes[d].len() {
                continue 'outer;
            }
            cursor[d] = 0;
        }
        break;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelFit {
    /// `ω_j`, one per knot.
    pub omega: Vec<f64>,
    pub kernel: KernelKind,
    pub grid: KnotGrid,
    pub rms_residual: f64,
}

impl KernelFit {
    /// The fitted kernel sum as an oracle.
    pub fn to_oracle(&self) -> PiecewiseOracle {
        PiecewiseOracle::new(
            self.grid,
            self.kernel,
            self.omega.iter().map(|&w| vec![w]).collect(),
            Spacing::EveryKnot,
        )
        .expect("fit has one weight per knot")
    }
}

/// Least-squares kernel weights `ω` minimizing
/// `Σ_i (y_i - Σ_j ω_j K((x_i - x_j)/h))²`, via ridge-regularized normal
/// equations.
pub fn fit_kernel_weights(samples: &[(f64, f64)], kernel: KernelKind, grid: KnotGrid) -> Result<KernelFit> {
    let m = grid.knot_count();
    if samples.len() < m {
        return Err(Error::usage(format!(
            "{} samples cannot determine {m} kernel weights",
            samples.len()
        )));
    }
    for &(x, y) in samples {
        check_unit(x)?;
        if !y.is_finite() {
            return Err(Error::domain(format!("non-finite sample value at x = {x}")));
        }
    }

    let design = DMatrix::from_fn(samples.len(), m, |i, j| {
        let x = samples[i].0;
        kernel_at(kernel, grid, j, grid.local(x, j as i64))
    });
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));

    let mut normal = design.transpose() * &design;
    for j in 0..m {
        normal[(j, j)] += FIT_RIDGE;
    }
    let rhs = design.transpose() * &y;
    let chol = normal
        .cholesky()
        .ok_or_else(|| Error::numerical("kernel normal equations are not positive definite"))?;
    let omega = chol.solve(&rhs);
    if omega.iter().any(|w| !w.is_finite()) {
        return Err(Error::numerical("kernel fit produced non-finite weights"));
    }
    let residual = &y - &design * &omega;
    let rms_residual = (residual.norm_squared() / samples.len() as f64).sqrt();

    Ok(KernelFit {
        omega: omega.iter().copied().collect(),
        kernel,
        grid,
        rms_residual,
    })
}

/// Dense LU (partial pivoting) solve of the bump coupling system; a
/// brute-force counterpart to the tridiagonal solver.
pub fn dense_solve_coupling_system(rhs: &[f64]) -> Result<Vec<f64>> {
    let m = rhs.len();
    if m == 0 {
        return Err(Error::usage("empty coupling system"));
    }
    let a = DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
        0 => 1.0,
        1 => 0.5,
        _ => 0.0,
    });
    let b = DVector::from_column_slice(rhs);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::numerical("coupling matrix is singular"))?;
    Ok(x.iter().copied().collect())
}

/// `g[k]` for every output dimension `k`.
pub fn dense_solve_coupling(samples: &TargetSamples) -> Result<Vec<Vec<f64>>> {
    (0..samples.output_dim())
        .map(|k| dense_solve_coupling_system(&samples.column(k)))
        .collect()
}
