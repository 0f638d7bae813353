//! Exact rational helpers shared by the region algebra and the LP solver.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Q {
    BigRational::from_float(x).unwrap_or_else(Q::zero)
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // ToPrimitive fails on huge numerators/denominators; fall back to a
        // scaled division.
        let n = x.numer().bits() as i64;
        let d = x.denom().bits() as i64;
        let shift = (n.max(d) - 1000).max(0) as usize;
        let num = (x.numer() >> shift).to_f64().unwrap_or(0.0);
        let den = (x.denom() >> shift).to_f64().unwrap_or(1.0);
        num / den
    })
}

/// Parses `"p/q"`, an integer, or a decimal literal such as `"0.25"`.
pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = |m: &str| Error::Input(format!("bad rational {s:?}: {m}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad("numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad("denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad("decimal"));
        }
        let n: BigInt = digits.parse().map_err(|_| bad("decimal"))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = BigRational::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad("integer"))?;
    Ok(BigRational::from_integer(n))
}

pub fn format(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn min(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn abs(a: &Q) -> Q {
    a.abs()
}
