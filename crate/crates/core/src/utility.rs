//! Utility functions on bundles in `ℝⁿ₊`.

use crate::error::{Error, Result};

/// `u(x) = min_k (a_k · x + c_k)` with `a_k ≥ 0`. Each affine piece is a
/// supporting majorant of `u`, so concavity and monotonicity hold by
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralUtility {
    majorants: Vec<(Vec<f64>, f64)>,
}

impl PolyhedralUtility {
    pub fn new(majorants: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let Some(n) = majorants.first().map(|(a, _)| a.len()) else {
            return Err(Error::MalformedUtility("no affine pieces".into()));
        };
        for (k, (a, c)) in majorants.iter().enumerate() {
            if a.len() != n {
                return Err(Error::MalformedUtility(format!("piece {k} has {} coefficients, expected {n}", a.len())));
            }
            if a.iter().chain(std::iter::once(c)).any(|v| !v.is_finite()) {
                return Err(Error::MalformedUtility(format!("piece {k} has a non-finite coefficient")));
            }
            if a.iter().any(|&v| v < 0.0) {
                return Err(Error::MalformedUtility(format!("piece {k} has a negative slope, so u is not increasing")));
            }
            if *c < 0.0 {
                return Err(Error::MalformedUtility(format!("piece {k} is negative at the origin")));
            }
        }
        Ok(PolyhedralUtility { majorants })
    }

    /// `u(x) = c · x`.
    pub fn linear(c: &[f64]) -> Result<Self> {
        Self::new(vec![(c.to_vec(), 0.0)])
    }

    pub fn dim(&self) -> usize {
        self.majorants[0].0.len()
    }

    pub fn majorants(&self) -> &[(Vec<f64>, f64)] {
        &self.majorants
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.majorants
            .iter()
            .map(|(a, c)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + c)
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of a piece attaining the minimum at `x`.
    pub fn active_piece(&self, x: &[f64]) -> usize {
        let vals: Vec<f64> = self
            .majorants
            .iter()
            .map(|(a, c)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + c)
            .collect();
        (0..vals.len()).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap_or(0)
    }

    /// Homogeneous of degree one (all constants zero).
    pub fn is_homogeneous(&self) -> bool {
        self.majorants.iter().all(|(_, c)| *c == 0.0)
    }
}

/// `u(x) = Π x_j^{α_j}` with `α_j ∈ (0, 1)` and `Σ α_j = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CobbDouglas {
    alpha: Vec<f64>,
}

impl CobbDouglas {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::MalformedUtility("Cobb-Douglas needs at least two commodities".into()));
        }
        if alpha.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::MalformedUtility("Cobb-Douglas exponents must lie in (0, 1)".into()));
        }
        let s: f64 = alpha.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::MalformedUtility(format!("Cobb-Douglas exponents sum to {s}, not 1")));
        }
        Ok(CobbDouglas { alpha })
    }

    /// Equal exponents `1/n`.
    pub fn symmetric(n: usize) -> Self {
        Self::new(vec![1.0 / n as f64; n]).expect("equal weights are valid")
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if x.iter().any(|&v| v <= 0.0) {
            return 0.0;
        }
        // equal exponents go through a single root, which keeps values such
        // as √(2·2) exact
        if self.alpha.windows(2).all(|w| w[0] == w[1]) {
            let prod: f64 = x.iter().product();
            return if self.alpha.len() == 2 { prod.sqrt() } else { prod.powf(self.alpha[0]) };
        }
        self.alpha.iter().zip(x).map(|(a, v)| v.powf(*a)).product()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let u = self.eval(x);
        self.alpha.iter().zip(x).map(|(a, v)| a * u / v).collect()
    }
}
