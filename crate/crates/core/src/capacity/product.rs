use crate::concave::ConcaveFn;
use crate::error::Result;
use crate::rational::{self, Q};
use crate::regions::{RectUnion, Section1D};

/// `μ(B) = w · ∫₀¹ γ(λ₁(B_y ∩ S) / |S|) dy` on rectangle unions, where `S` is
/// an x-interval (the whole `[0,1)` by default) and `w` a weight.
///
/// With `S = [0,1)` and `w = 1` this is the distortion of Lebesgue measure
/// along horizontal sections. Restricting to a vertical strip and weighting
/// lets several copies be pasted side by side as the blocks of a
/// partitioned capacity, each with its own total mass.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSectionCapacity {
    gamma: ConcaveFn,
    strip: (Q, Q),
    weight: f64,
}

impl ProductSectionCapacity {
    pub fn new(gamma: ConcaveFn) -> Result<Self> {
        Self::on_strip(gamma, rational::zero(), rational::one(), 1.0)
    }

    pub fn sqrt() -> Self {
        Self::new(ConcaveFn::Sqrt).expect("square root is a valid distortion")
    }

    pub fn on_strip(gamma: ConcaveFn, x0: Q, x1: Q, weight: f64) -> Result<Self> {
        use crate::error::Error;
        gamma.validate()?;
        if !gamma.vanishes_at_zero() {
            return Err(Error::Precondition(format!("distortion {} does not vanish at 0", gamma.name())));
        }
        if !(x0 >= rational::zero() && x0 < x1 && x1 <= rational::one()) {
            return Err(Error::Domain(format!(
                "strip [{}, {}) is not a nonempty subinterval of [0, 1)",
                rational::format(&x0),
                rational::format(&x1)
            )));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::Domain(format!("weight {weight} must be finite and nonnegative")));
        }
        Ok(ProductSectionCapacity { gamma, strip: (x0, x1), weight })
    }

    pub fn gamma(&self) -> &ConcaveFn {
        &self.gamma
    }

    pub fn strip(&self) -> (&Q, &Q) {
        (&self.strip.0, &self.strip.1)
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Relative section length, a rational in `[0, 1]`.
    fn fraction(&self, sec: &Section1D) -> Q {
        let width = &self.strip.1 - &self.strip.0;
        sec.clip(&self.strip.0, &self.strip.1).length() / width
    }

    /// Exact up to the final `γ` evaluations: each band contributes its
    /// rational height times `γ` of a rational section length.
    pub fn value(&self, b: &RectUnion) -> f64 {
        let sum: f64 = b
            .bands()
            .iter()
            .map(|(y0, y1, sec)| rational::to_f64(&(y1 - y0)) * self.gamma.eval(rational::to_f64(&self.fraction(sec))))
            .sum();
        self.weight * sum
    }

    pub fn total_mass(&self) -> f64 {
        self.weight * self.gamma.eval(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn r(x0: Q, x1: Q, y0: Q, y1: Q) -> RectUnion {
        RectUnion::rect(x0, x1, y0, y1)
    }

    #[test]
    fn quarter_strip_has_mass_one_half() {
        let mu = ProductSectionCapacity::sqrt();
        assert!((mu.value(&r(q(0, 1), q(1, 4), q(0, 1), q(1, 1))) - 0.5).abs() < 1e-15);
        assert_eq!(mu.value(&RectUnion::full()), 1.0);
        assert_eq!(mu.value(&RectUnion::empty()), 0.0);
    }

    #[test]
    fn overlapping_strips_instance() {
        let mu = ProductSectionCapacity::sqrt();
        let a = r(q(0, 1), q(1, 2), q(0, 1), q(1, 1));
        let b = r(q(1, 4), q(3, 4), q(0, 1), q(1, 1));
        let lhs = mu.value(&a.combine(&b, crate::regions::SetOp::Union))
            + mu.value(&a.combine(&b, crate::regions::SetOp::Intersect));
        let rhs = mu.value(&a) + mu.value(&b);
        assert!((lhs - (0.75f64.sqrt() + 0.5)).abs() < 1e-15);
        assert!((rhs - 2.0 * 0.5f64.sqrt()).abs() < 1e-15);
        assert!(lhs <= rhs);
    }

    #[test]
    fn strips_are_rescaled() {
        let mu = ProductSectionCapacity::on_strip(ConcaveFn::Sqrt, q(1, 2), q(1, 1), 2.0).unwrap();
        assert_eq!(mu.total_mass(), 2.0);
        assert!((mu.value(&RectUnion::full()) - 2.0).abs() < 1e-15);
        // only the half inside the strip counts: section fraction 1/2
        let b = r(q(0, 1), q(3, 4), q(0, 1), q(1, 2));
        assert!((mu.value(&b) - 2.0 * 0.5 * 0.5f64.sqrt()).abs() < 1e-15);
        assert!(ProductSectionCapacity::on_strip(ConcaveFn::Sqrt, q(1, 2), q(1, 2), 1.0).is_err());
        assert!(ProductSectionCapacity::new(ConcaveFn::PiecewiseLinear(vec![(0.0, 1.0), (1.0, 2.0)])).is_err());
    }
}
