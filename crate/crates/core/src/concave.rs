//! Concave increasing functions on `[0, ∞)`: distortions for product-section
//! capacities and the scalar utilities fed to Jensen checks.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ConcaveFn {
    Sqrt,
    Log1p,
    /// `t^p` with `0 < p ≤ 1`.
    Power(f64),
    /// `c·t` with `c ≥ 0`.
    Linear(f64),
    /// Linear interpolation through `(x, y)` breakpoints; the first breakpoint
    /// sits at `x = 0` and the last slope extends to infinity.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl ConcaveFn {
    pub fn identity() -> Self {
        ConcaveFn::Linear(1.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self {
            ConcaveFn::Sqrt => t.sqrt(),
            ConcaveFn::Log1p => t.ln_1p(),
            ConcaveFn::Power(p) => t.powf(*p),
            ConcaveFn::Linear(c) => c * t,
            ConcaveFn::PiecewiseLinear(pts) => {
                let k = pts.iter().rposition(|(x, _)| *x <= t).unwrap_or(0);
                let (x0, y0) = pts[k];
                let slope = if k + 1 < pts.len() {
                    let (x1, y1) = pts[k + 1];
                    (y1 - y0) / (x1 - x0)
                } else if k > 0 {
                    let (xp, yp) = pts[k - 1];
                    (y0 - yp) / (x0 - xp)
                } else {
                    0.0
                };
                y0 + slope * (t - x0)
            }
        }
    }

    /// Checks monotonicity and concavity. Piecewise-linear input is validated
    /// by chord slopes between consecutive breakpoints.
    pub fn validate(&self) -> Result<()> {
        match self {
            ConcaveFn::Sqrt | ConcaveFn::Log1p => Ok(()),
            ConcaveFn::Power(p) if *p > 0.0 && *p <= 1.0 => Ok(()),
            ConcaveFn::Power(p) => Err(Error::Precondition(format!("power {p} is not in (0, 1]"))),
            ConcaveFn::Linear(c) if *c >= 0.0 && c.is_finite() => Ok(()),
            ConcaveFn::Linear(c) => Err(Error::Precondition(format!("linear slope {c} is negative"))),
            ConcaveFn::PiecewiseLinear(pts) => {
                if pts.is_empty() || pts[0].0 != 0.0 {
                    return Err(Error::Precondition("piecewise-linear function must start at x = 0".into()));
                }
                let mut prev_slope = f64::INFINITY;
                for w in pts.windows(2) {
                    let dx = w[1].0 - w[0].0;
                    if dx <= 0.0 {
                        return Err(Error::Precondition("breakpoints must be strictly increasing".into()));
                    }
                    let slope = (w[1].1 - w[0].1) / dx;
                    if slope < 0.0 {
                        return Err(Error::Precondition(format!("non-monotone segment starting at x = {}", w[0].0)));
                    }
                    if slope > prev_slope + 1e-12 {
                        return Err(Error::Precondition(format!("convex kink at x = {}", w[0].0)));
                    }
                    prev_slope = slope;
                }
                Ok(())
            }
        }
    }

    pub fn vanishes_at_zero(&self) -> bool {
        self.eval(0.0).abs() <= 1e-15
    }

    pub fn name(&self) -> String {
        match self {
            ConcaveFn::Sqrt => "sqrt".into(),
            ConcaveFn::Log1p => "log1p".into(),
            ConcaveFn::Power(p) => format!("power({p})"),
            ConcaveFn::Linear(c) => format!("linear({c})"),
            ConcaveFn::PiecewiseLinear(p) => format!("piecewise({} points)", p.len()),
        }
    }
}
