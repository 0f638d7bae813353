use super::{asymmetric_integral, integral, vector_integral, Allocation, StepFunction};
use crate::capacity::Capacity;
use crate::concave::ConcaveFn;
use crate::error::{Error, Result};
use crate::rational;
use crate::utility::PolyhedralUtility;

const SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct JensenVerdict {
    /// `u` of the normalized integral.
    pub lhs: f64,
    /// Normalized integral of `u ∘ f`.
    pub rhs: f64,
    /// `lhs − rhs`.
    pub slack: f64,
    /// `μ(X)`, divided out on both sides.
    pub normalization: f64,
    pub pass: bool,
}

fn total_mass(mu: &Capacity) -> Result<f64> {
    let m = mu.total_mass();
    if m > 0.0 && m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Precondition(format!("total mass {m} cannot be normalized")))
    }
}

fn verdict(lhs: f64, rhs: f64, normalization: f64) -> JensenVerdict {
    let slack = lhs - rhs;
    JensenVerdict { lhs, rhs, slack, normalization, pass: slack >= -SLACK * lhs.abs().max(1.0) }
}

/// `u(∫f dμ / μ(X)) ≥ ∫u(f) dμ / μ(X)` for concave increasing `u`.
pub fn jensen_scalar(mu: &Capacity, f: &StepFunction, u: &ConcaveFn) -> Result<JensenVerdict> {
    u.validate()?;
    let m = total_mass(mu)?;
    let lhs = u.eval(integral(mu, f)? / m);
    let rhs = asymmetric_integral(mu, &f.map(|v| u.eval(v))?)? / m;
    Ok(verdict(lhs, rhs, m))
}

/// `u(∫f₁, …, ∫fₙ) ≥ ∫u(f₁, …, fₙ)` after normalizing `μ(X)` to one. The
/// argument passes through `∫Σaⱼfⱼ ≤ Σaⱼ∫fⱼ`, so it relies on a submodular
/// capacity.
pub fn jensen_vector(mu: &Capacity, f: &Allocation, u: &PolyhedralUtility) -> Result<JensenVerdict> {
    if u.dim() != f.dim() {
        return Err(Error::MalformedUtility(format!("utility on ℝ^{} applied to ℝ^{} bundles", u.dim(), f.dim())));
    }
    let m = total_mass(mu)?;
    let t: Vec<f64> = vector_integral(mu, f, &mu.universe().full())?.iter().map(|v| v / m).collect();
    let lhs = u.eval(&t);
    let rhs = asymmetric_integral(mu, &f.map_scalar(|x| u.eval(x))?)? / m;
    Ok(verdict(lhs, rhs, m))
}

/// Ladder approximation `f ∧ N` of a step function, used to watch
/// `∫ f ∧ N` increase to `∫ f`.
pub fn truncate(f: &StepFunction, level: f64) -> StepFunction {
    let n = rational::from_f64(level);
    f.map_exact(|v| rational::min(v, &n))
}
