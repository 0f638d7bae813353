use num_traits::{Signed, Zero};

use super::cone::{cone_membership, ConeSum};
use crate::error::{Error, Result};
use crate::lp::{Arith, Cmp, Lp, LpOutcome};
use crate::rational::{self, Q};

/// A nonnegative price normalized to `Σ pⱼ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Price {
    pub p: Vec<f64>,
    /// Exact coordinates when the price came from the rational solver.
    pub exact: Option<Vec<Q>>,
}

impl Price {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain("prices must be finite and nonnegative".into()));
        }
        let s: f64 = p.iter().sum();
        if s <= 0.0 {
            return Err(Error::Domain("the zero vector is not a price".into()));
        }
        Ok(Price { p: p.iter().map(|v| v / s).collect(), exact: None })
    }

    pub fn from_exact(p: Vec<Q>) -> Result<Self> {
        if p.iter().any(Signed::is_negative) {
            return Err(Error::Domain("prices must be nonnegative".into()));
        }
        let s: Q = p.iter().cloned().sum();
        if s.is_zero() {
            return Err(Error::Domain("the zero vector is not a price".into()));
        }
        let exact: Vec<Q> = p.iter().map(|v| v / &s).collect();
        Ok(Price { p: exact.iter().map(rational::to_f64).collect(), exact: Some(exact) })
    }

    /// Unit price on coordinate `k` of `n`.
    pub fn unit(n: usize, k: usize) -> Self {
        let v: Vec<Q> = (0..n).map(|j| if j == k { rational::one() } else { rational::zero() }).collect();
        Self::from_exact(v).expect("unit vectors are prices")
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.p.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn exact_or_lifted(&self) -> Vec<Q> {
        self.exact.clone().unwrap_or_else(|| self.p.iter().map(|&v| rational::from_f64(v)).collect())
    }
}

#[derive(Clone, Debug)]
pub enum Separation {
    /// `p·z ≥ 0` on the whole cone sum; `min_slack` is the smallest
    /// `p·(g − eᵢ)` over generator rows.
    Price { price: Price, min_slack: f64 },
    /// A point of the cone sum with every coordinate negative.
    NoPrice { witness: Vec<f64> },
}

/// Generators come from float arithmetic, so a price supporting the exact
/// upper set can miss a rounded generator by a few ulps. When the strict
/// system `p·(g − e) ≥ 0` is infeasible it is retried with each row allowed
/// this much absolute slack.
pub const ROUNDING_SLACK: f64 = 5e-13;

/// `γᵢ` above `−GAMMA_TOL` counts as zero.
pub const GAMMA_TOL: f64 = 1e-12;

fn row_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

const SCREEN_MARGIN: f64 = 1e-7;

/// `max_p min_r a_r·p / ‖a_r‖∞` over normalized prices, in floats.
fn max_min_slack(n: usize, rows: &[Vec<f64>]) -> Result<f64> {
    // p and t ≥ 0 are variables; the value is t − 1 with a_r·p ≥ t − 1
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = Lp::maximize(objective);
    let mut total = vec![1.0; n];
    total.push(0.0);
    lp.push(total, Cmp::Eq, 1.0);
    for a in rows {
        let norm = row_norm(a);
        if norm > 0.0 {
            let mut c: Vec<f64> = a.iter().map(|v| v / norm).collect();
            c.push(-1.0);
            lp.push(c, Cmp::Ge, -1.0);
        }
    }
    match crate::lp::solve_f64(&lp, Arith::Float)? {
        LpOutcome::Optimal { value, .. } => Ok(value - 1.0),
        LpOutcome::Unbounded => Ok(f64::INFINITY),
        LpOutcome::Infeasible => Err(Error::Internal("the max-min slack problem is always feasible".into())),
    }
}

fn lex_min_price_exact(n: usize, rows: &[Vec<f64>], slack: f64) -> Result<Option<Vec<Q>>> {
    let mut base = Lp::<Q>::feasibility(n);
    base.push(vec![rational::one(); n], Cmp::Eq, rational::one());
    for a in rows {
        let lower = -rational::from_f64(slack);
        base.push(a.iter().map(|&v| rational::from_f64(v)).collect(), Cmp::Ge, lower);
    }
    let mut fixed = base;
    let mut last = None;
    for k in 0..n {
        let mut obj = vec![rational::zero(); n];
        obj[k] = rational::one();
        let mut lp = fixed.clone();
        lp.objective = obj;
        match lp.solve()? {
            LpOutcome::Optimal { x, value } => {
                let mut c = vec![rational::zero(); n];
                c[k] = rational::one();
                fixed.push(c, Cmp::Eq, value);
                last = Some(x);
            }
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => return Err(Error::Internal("bounded price problem reported unbounded".into())),
        }
    }
    Ok(last)
}

fn lex_min_price_float(n: usize, rows: &[Vec<f64>], slack: f64) -> Result<Option<Vec<f64>>> {
    let mut fixed = Lp::<f64>::feasibility(n);
    fixed.push(vec![1.0; n], Cmp::Eq, 1.0);
    // rows from nearby generators are tiny; unit rows keep pivots well scaled
    for a in rows {
        let norm = row_norm(a);
        if norm > 0.0 {
            fixed.push(a.iter().map(|v| v / norm).collect(), Cmp::Ge, -slack / norm);
        }
    }
    let mut last = None;
    for k in 0..n {
        let mut lp = fixed.clone();
        lp.objective = (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect();
        match lp.solve()? {
            LpOutcome::Optimal { x, value } => {
                fixed.push(lp.objective.clone(), Cmp::Le, value + 1e-12);
                last = Some(x);
            }
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => return Err(Error::Internal("bounded price problem reported unbounded".into())),
        }
    }
    Ok(last)
}

/// Either the lexicographically smallest price `p` with `p·(g − eᵢ) ≥ 0` for
/// every generator of every active term, or, when no such price exists, a
/// strictly negative point of the cone sum built from a certificate of
/// infeasibility.
pub fn separation_price(cone: &ConeSum) -> Result<Separation> {
    let n = cone.dim();
    let rows: Vec<Vec<f64>> = cone.rows().into_iter().map(|(_, _, a)| a).collect();
    let arith = Arith::choose(n, rows.len() + 1 + n);
    // A float max-min screen settles clearly infeasible systems without the
    // exact lexicographic passes.
    if max_min_slack(n, &rows)? < -SCREEN_MARGIN {
        return no_price_witness(cone, &rows);
    }
    let solve = |slack: f64| -> Result<Option<Price>> {
        match arith {
            Arith::Exact => lex_min_price_exact(n, &rows, slack)?.map(Price::from_exact).transpose(),
            Arith::Float => lex_min_price_float(n, &rows, slack)?
                .map(|x| Price::new(x.iter().map(|v| v.max(0.0)).collect()))
                .transpose(),
        }
    };
    let price = match solve(0.0)? {
        Some(p) => Some(p),
        None => solve(ROUNDING_SLACK)?,
    };
    if let Some(price) = price {
        let min_slack = rows.iter().map(|a| price.dot(a)).fold(f64::INFINITY, f64::min);
        return Ok(Separation::Price { price, min_slack });
    }
    no_price_witness(cone, &rows)
}

/// Maximizes `t` over `y ≥ 0` with `Σ_r y_r a_r ≤ −t` coordinatewise and
/// each term's weights summing to at most its scale bound, so the witness
/// `Σ_r y_r a_r` lies in the cone sum by construction.
fn no_price_witness(cone: &ConeSum, rows: &[Vec<f64>]) -> Result<Separation> {
    let n = cone.dim();
    let tags = cone.rows();
    let m = rows.len();
    let mut objective = vec![0.0; m + 1];
    objective[m] = 1.0;
    let mut lp = Lp::maximize(objective);
    for j in 0..n {
        let mut c: Vec<f64> = rows.iter().map(|a| a[j]).collect();
        c.push(1.0);
        lp.push(c, Cmp::Le, 0.0);
    }
    for (i, t) in cone.terms().iter().enumerate() {
        let mut c: Vec<f64> = tags.iter().map(|(ti, _, _)| if *ti == i { 1.0 } else { 0.0 }).collect();
        c.push(0.0);
        lp.push(c, Cmp::Le, t.scale);
    }
    let y = match super::cone::solve(&lp, n)? {
        LpOutcome::Optimal { x, value } if value > 0.0 => x,
        _ => return Err(Error::Internal("no price exists but no negative combination was found".into())),
    };
    // Shrinking the weights and lifting the sum by a few ulps keeps the
    // point inside the cone sum despite rounding in the sum itself.
    let y: Vec<f64> = y[..m].iter().map(|w| w * (1.0 - 1e-9)).collect();
    let witness: Vec<f64> = (0..n)
        .map(|j| {
            let v: f64 = rows.iter().zip(&y).map(|(a, w)| a[j] * w).sum();
            v + 1e-12 * (1.0 + v.abs())
        })
        .collect();
    if witness.iter().any(|&v| v >= 0.0) {
        return Err(Error::Internal("negative combination vanished under rounding".into()));
    }
    if !cone_membership(cone, &witness)?.member {
        return Err(Error::Internal("negative witness failed its own membership test".into()));
    }
    Ok(Separation::NoPrice { witness })
}

#[derive(Clone, Debug)]
pub struct GammaReport {
    /// `γᵢ = min(0, min_g p·g − p·eᵢ)` per term.
    pub gammas: Vec<f64>,
    /// The generator achieving a negative `γᵢ`.
    pub violators: Vec<Option<usize>>,
    /// Every `γᵢ` is zero up to [`GAMMA_TOL`] (up to the membership
    /// tolerance for float prices).
    pub all_zero: bool,
}

pub fn gamma_check(cone: &ConeSum, price: &Price) -> GammaReport {
    let p = price.exact_or_lifted();
    let dot = |x: &[f64]| -> Q { p.iter().zip(x).map(|(a, &b)| a * rational::from_f64(b)).sum() };
    let mut gammas = Vec::new();
    let mut violators = Vec::new();
    let mut all_zero = true;
    for t in cone.terms() {
        let pe = dot(&t.base);
        let mut best = rational::zero();
        let mut arg = None;
        for (k, g) in t.upper.generators().iter().enumerate() {
            let d = dot(g) - &pe;
            if d < best {
                best = d;
                arg = Some(k);
            }
        }
        let gv = rational::to_f64(&best);
        let zero = if price.exact.is_some() { gv >= -GAMMA_TOL } else { gv >= -super::cone::MEMBER_TOL };
        all_zero &= zero;
        gammas.push(gv);
        violators.push(arg);
    }
    GammaReport { gammas, violators, all_zero }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexsep::{ConeTerm, UpperSet};
    use crate::rational::q;

    fn term(gens: Vec<Vec<f64>>, e: Vec<f64>, m: f64) -> ConeTerm {
        ConeTerm { scale: m, upper: UpperSet::new(e.len(), gens).unwrap(), base: e }
    }

    #[test]
    fn diamond_price_is_uniform() {
        let cone = ConeSum::new(2, vec![term(vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![1.0, 1.0], 1.0)]).unwrap();
        let Separation::Price { price, min_slack } = separation_price(&cone).unwrap() else { panic!() };
        assert_eq!(price.exact.clone().unwrap(), vec![q(1, 2), q(1, 2)]);
        assert_eq!(min_slack, 0.0);
        assert!(gamma_check(&cone, &price).all_zero);
    }

    #[test]
    fn orthant_terms_accept_everything() {
        let cone = ConeSum::new(
            3,
            vec![term(vec![vec![1.0, 2.0, 3.0]], vec![1.0, 2.0, 3.0], 1.0), term(vec![vec![1.0, 1.0, 1.0]], vec![1.0, 1.0, 1.0], 2.0)],
        )
        .unwrap();
        let Separation::Price { price, .. } = separation_price(&cone).unwrap() else { panic!() };
        assert_eq!(price.exact.unwrap(), vec![q(0, 1), q(0, 1), q(1, 1)]);
    }

    #[test]
    fn interior_endowment_has_no_price() {
        let cone = ConeSum::new(2, vec![term(vec![vec![0.0, 0.0]], vec![1.0, 1.0], 1.0)]).unwrap();
        let Separation::NoPrice { witness } = separation_price(&cone).unwrap() else { panic!() };
        assert!(witness.iter().all(|v| (v + 1.0).abs() < 1e-8), "{witness:?}");
        let g = gamma_check(&cone, &Price::new(vec![0.5, 0.5]).unwrap());
        assert!(!g.all_zero);
        assert_eq!(g.gammas, vec![-1.0]);
        assert_eq!(g.violators, vec![Some(0)]);
    }

    #[test]
    fn witness_respects_scales() {
        // two terms that only jointly go negative
        let cone = ConeSum::new(
            2,
            vec![term(vec![vec![0.0, 3.0]], vec![1.0, 1.0], 0.5), term(vec![vec![3.0, 0.0]], vec![2.0, 3.0], 1.0)],
        )
        .unwrap();
        match separation_price(&cone).unwrap() {
            Separation::NoPrice { witness } => assert!(witness.iter().all(|&v| v < 0.0)),
            Separation::Price { price, min_slack } => panic!("unexpected price {price:?} {min_slack}"),
        }
    }

    #[test]
    fn empty_generators_give_zero_gamma() {
        let cone = ConeSum::new(2, vec![term(vec![], vec![1.0, 1.0], 1.0)]).unwrap();
        let g = gamma_check(&cone, &Price::unit(2, 0));
        assert_eq!(g.gammas, vec![0.0]);
        assert!(g.all_zero);
    }
}
