use crate::error::{Error, Result};

/// Uniform partition of `[0, 1]` into `n` subintervals with knots
/// `x_j = j / n`, `j = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnotGrid {
    n: usize,
}

impl KnotGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("knot grid needs at least one subinterval"));
        }
        Ok(KnotGrid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Knot spacing `h = 1/n`.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Inverse spacing `1/h`, exact.
    pub fn inv_h(&self) -> f64 {
        self.n as f64
    }

    pub fn knot_count(&self) -> usize {
        self.n + 1
    }

    /// `x_j`, correctly rounded from `j / n`. Valid for virtual knots
    /// outside `0..=n` as well.
    pub fn knot(&self, j: i64) -> f64 {
        j as f64 / self.n as f64
    }

    pub fn knots(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n as i64).map(move |j| self.knot(j))
    }

    /// Normalized coordinate `h⁻¹ (x − x_j)`, computed as `n·x − j`.
    ///
    /// The subtraction of an integer is exact, so coordinates relative to
    /// neighbouring knots differ by exactly one.
    #[inline]
    pub fn local(&self, x: f64, j: i64) -> f64 {
        self.n as f64 * x - j as f64
    }
}

/// Target values `f_k(x_j)` at every knot of a grid, one row per knot and
/// one column per output dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSamples {
    grid: KnotGrid,
    values: Vec<Vec<f64>>,
}

impl TargetSamples {
    pub fn new(grid: KnotGrid, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != grid.knot_count() {
            return Err(Error::usage(format!(
                "expected {} knot rows for N = {}, got {}",
                grid.knot_count(),
                grid.n(),
                values.len()
            )));
        }
        let q = values[0].len();
        if q == 0 {
            return Err(Error::usage("target samples need at least one output dimension"));
        }
        for (j, row) in values.iter().enumerate() {
            if row.len() != q {
                return Err(Error::usage(format!("row {j} has {} values, expected {q}", row.len())));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::domain(format!("non-finite sample {v} at knot {j}")));
            }
        }
        Ok(TargetSamples { grid, values })
    }

    /// Samples a scalar function at the knots.
    ///
    /// Panics if `f` returns a non-finite value.
    pub fn from_fn(grid: KnotGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.knots().map(|x| vec![f(x)]).collect();
        Self::new(grid, values).expect("sampled function must be finite")
    }

    /// Samples a vector-valued function at the knots.
    pub fn from_vector_fn(grid: KnotGrid, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        let values = grid.knots().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> KnotGrid {
        self.grid
    }

    pub fn output_dim(&self) -> usize {
        self.values[0].len()
    }

    /// Row `j`: all outputs at knot `x_j`.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// All knot values of output `k`.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[k]).collect()
    }

    /// `max |f|` over all knots and outputs.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knots_hit_endpoints() {
        for n in [1, 3, 7, 10, 49, 1000] {
            let g = KnotGrid::new(n).unwrap();
            let knots: Vec<f64> = g.knots().collect();
            assert_eq!(knots.len(), n + 1);
            assert_eq!(knots[0], 0.0);
            assert!((knots[n] - 1.0).abs() <= 1e-15);
            assert!(knots.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn zero_subintervals_rejected() {
        assert!(matches!(KnotGrid::new(0), Err(Error::Usage(_))));
    }

    #[test]
    fn local_coordinates_step_by_one() {
        let g = KnotGrid::new(7).unwrap();
        for x in [0.0, 0.123, 0.5, 0.999, 1.0] {
            for j in -1..8 {
                assert_eq!(g.local(x, j) - 1.0, g.local(x, j + 1));
            }
        }
        assert_eq!(g.local(g.knot(3), 3), 0.0);
    }

    #[test]
    fn sample_validation() {
        let g = KnotGrid::new(2).unwrap();
        assert!(TargetSamples::new(g, vec![vec![1.0]; 2]).is_err());
        assert!(TargetSamples::new(g, vec![vec![]; 3]).is_err());
        assert!(TargetSamples::new(g, vec![vec![1.0], vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(matches!(
            TargetSamples::new(g, vec![vec![1.0], vec![f64::NAN], vec![1.0]]),
            Err(Error::Domain(_))
        ));
        let s = TargetSamples::from_vector_fn(g, |x| vec![x, -3.0 * x]).unwrap();
        assert_eq!(s.output_dim(), 2);
        assert_eq!(s.column(1), vec![-0.0, -1.5, -3.0]);
        assert_eq!(s.max_abs(), 3.0);
    }
}
