use super::oracle::{improvement_oracle, CoreVerdict, Mode};
use super::upper::upper_set;
use super::{Economy, Preference};
use crate::choquet::Allocation;
use crate::convexsep::{gamma_check, separation_price, ConeSum, ConeTerm, GammaReport, Price, Separation};
use crate::error::{Error, Result};
use crate::lp::{solve_f64, Arith, Cmp, Lp, LpOutcome};
use crate::utility::PolyhedralUtility;

const WALRAS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum BudgetOutcome {
    Optimal { value: f64, optimizer: Vec<f64> },
    /// Some good is free and still desired, so no maximum exists.
    Unbounded,
}

/// Maximizes block `i`'s utility over `{x ≥ 0 : p·x ≤ p·eᵢ}`.
pub fn budget_max(eco: &Economy, i: usize, p: &Price) -> Result<BudgetOutcome> {
    let e = eco.endowment(i);
    let wealth = p.dot(e);
    match eco.preference(i) {
        Preference::CobbDouglas(u) => {
            if p.p.iter().any(|&v| v <= 0.0) {
                return Ok(BudgetOutcome::Unbounded);
            }
            let optimizer: Vec<f64> = u.alpha().iter().zip(&p.p).map(|(a, pj)| a * wealth / pj).collect();
            Ok(BudgetOutcome::Optimal { value: u.eval(&optimizer), optimizer })
        }
        Preference::Polyhedral(u) => polyhedral_budget_max(u, &p.p, wealth),
        Preference::Linear(c) => polyhedral_budget_max(&PolyhedralUtility::linear(c)?, &p.p, wealth),
        Preference::CoordinateList(_) => Err(Error::UnsupportedPreference(
            "coordinate-list preferences have no utility to maximize".into(),
        )),
    }
}

/// `max t` subject to `t ≤ aₖ·x + cₖ` and `p·x ≤ w`.
fn polyhedral_budget_max(u: &PolyhedralUtility, p: &[f64], wealth: f64) -> Result<BudgetOutcome> {
    let n = p.len();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = Lp::maximize(obj);
    for (a, c) in u.majorants() {
        let mut row: Vec<f64> = a.iter().map(|v| -v).collect();
        row.push(1.0);
        lp.push(row, Cmp::Le, *c);
    }
    let mut budget = p.to_vec();
    budget.push(0.0);
    lp.push(budget, Cmp::Le, wealth);
    let arith = Arith::choose(n, lp.constraints.len() + n + 1);
    match solve_f64(&lp, arith)? {
        LpOutcome::Optimal { x, value } => Ok(BudgetOutcome::Optimal { value, optimizer: x[..n].to_vec() }),
        LpOutcome::Unbounded => Ok(BudgetOutcome::Unbounded),
        LpOutcome::Infeasible => Err(Error::Internal("the zero bundle is always affordable".into())),
    }
}

/// Maximality evidence for one block.
#[derive(Clone, Debug)]
pub struct BlockEvidence {
    /// `p·fᵢ`.
    pub spent: f64,
    /// `p·eᵢ`.
    pub limit: f64,
    /// Best affordable utility (`None` for coordinate lists, infinite when
    /// the budget problem is unbounded).
    pub best: Option<f64>,
    pub current: Option<f64>,
    /// `best − current`, or for a coordinate list `p·eᵢ − Σ_{j∈Jᵢ} pⱼ fᵢⱼ`.
    pub gap: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct WalrasCertificate {
    pub pass: bool,
    pub price: Price,
    pub bundles: Vec<Vec<f64>>,
    /// Largest `|μ_f(X) − μ_e(X)|` over commodities.
    pub feasibility_residual: f64,
    pub blocks: Vec<BlockEvidence>,
    /// The input was a step allocation and was replaced by its average.
    pub averaged: bool,
    pub failure: Option<String>,
}

/// Checks that `(f, p)` is a Walras equilibrium: `f` is feasible and every
/// block's bundle is affordable and best within its budget set.
pub fn walras_check(eco: &Economy, f: &Allocation, p: &Price) -> Result<WalrasCertificate> {
    if p.p.len() != eco.dim() {
        return Err(Error::Domain(format!("price has {} coordinates, expected {}", p.p.len(), eco.dim())));
    }
    let averaged = !eco.is_simple(f)?;
    let f = if averaged { eco.average(f)? } else { f.clone() };
    let bundles = eco.bundles(&f)?;
    let feas = eco.feasibility(&f)?;
    let feasibility_residual = feas.residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = 1.0 + feas.endowment_aggregate.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut failure = None;
    if feasibility_residual > WALRAS_TOL * scale {
        failure = Some(format!("infeasible: residual {feasibility_residual:e}"));
    }
    let mut blocks = Vec::new();
    for (i, w) in bundles.iter().enumerate() {
        let limit = p.dot(eco.endowment(i));
        let spent = p.dot(w);
        let affordable = spent <= limit + WALRAS_TOL * (1.0 + limit.abs());
        let ev = match eco.preference(i) {
            Preference::CoordinateList(j) => {
                let floor: f64 = j.iter().map(|&k| p.p[k] * w[k]).sum();
                let supported = j.iter().any(|&k| p.p[k] > 0.0);
                let gap = limit - floor;
                let pass = affordable && supported && gap <= WALRAS_TOL * (1.0 + limit.abs());
                if !supported && failure.is_none() {
                    failure = Some(format!("block {i}: price vanishes on every listed coordinate"));
                }
                BlockEvidence { spent, limit, best: None, current: None, gap, pass }
            }
            pref => {
                let current = pref.utility(w).expect("utility preference");
                let best = match budget_max(eco, i, p)? {
                    BudgetOutcome::Optimal { value, .. } => value,
                    BudgetOutcome::Unbounded => f64::INFINITY,
                };
                let gap = best - current;
                let pass = affordable && gap <= WALRAS_TOL;
                BlockEvidence { spent, limit, best: Some(best), current: Some(current), gap, pass }
            }
        };
        if !ev.pass && failure.is_none() {
            failure = Some(if affordable {
                format!("block {i}: maximality gap {:e}", ev.gap)
            } else {
                format!("block {i}: spends {} over a budget of {}", ev.spent, ev.limit)
            });
        }
        blocks.push(ev);
    }
    Ok(WalrasCertificate {
        pass: failure.is_none(),
        price: p.clone(),
        bundles,
        feasibility_residual,
        blocks,
        averaged,
        failure,
    })
}

/// Outcome of the large-core to Walras pipeline.
#[derive(Clone, Debug)]
pub struct LcToWalras {
    pub pass: bool,
    pub price: Option<Price>,
    pub min_slack: Option<f64>,
    pub gamma: Option<GammaReport>,
    /// `p·fᵢ − p·eᵢ` per block.
    pub balance_gaps: Vec<f64>,
    pub certificate: Option<WalrasCertificate>,
    /// A strictly negative point of the cone sum when no price exists.
    pub witness: Option<Vec<f64>>,
    /// The improving coalition found for an allocation without a price.
    pub improvement: Option<CoreVerdict>,
    pub failure: Option<String>,
}

/// The cone sum `Σᵢ [0, μ(Eᵢ)]·(Γ_f(Eᵢ) − eᵢ)` of a simple allocation.
pub fn preferred_gap_cone(eco: &Economy, bundles: &[Vec<f64>]) -> Result<ConeSum> {
    let terms = (0..eco.len())
        .map(|i| {
            Ok(ConeTerm {
                scale: eco.masses()[i],
                base: eco.endowment(i).to_vec(),
                upper: upper_set(eco.preference(i), &bundles[i])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ConeSum::new(eco.dim(), terms)
}

/// Builds the upper sets of a simple allocation, separates their cone sum
/// from the negative orthant, checks the support gaps vanish and the
/// budgets balance, then certifies `(f, p)` as a Walras equilibrium.
pub fn lc_to_walras(eco: &Economy, f: &Allocation, grid: usize) -> Result<LcToWalras> {
    let bundles = eco.bundles(f)?;
    let cone = preferred_gap_cone(eco, &bundles)?;
    match separation_price(&cone)? {
        Separation::NoPrice { witness } => {
            let improvement = improvement_oracle(eco, f, Mode::Weak, grid)?;
            Ok(LcToWalras {
                pass: false,
                price: None,
                min_slack: None,
                gamma: None,
                balance_gaps: Vec::new(),
                certificate: None,
                witness: Some(witness),
                failure: Some(if improvement.is_improved() {
                    "no supporting price; the allocation is improvable".into()
                } else {
                    "no supporting price, but the oracle found no coalition at this grid".into()
                }),
                improvement: Some(improvement),
            })
        }
        Separation::Price { price, min_slack } => {
            let gamma = gamma_check(&cone, &price);
            let tol = if price.exact.is_some() { 1e-12 } else { 1e-6 };
            let balance_gaps: Vec<f64> =
                (0..eco.len()).map(|i| price.dot(&bundles[i]) - price.dot(eco.endowment(i))).collect();
            let balanced = balance_gaps
                .iter()
                .enumerate()
                .all(|(i, g)| g.abs() <= tol * (1.0 + price.dot(eco.endowment(i)).abs()));
            let certificate = walras_check(eco, f, &price)?;
            let failure = if !gamma.all_zero {
                Some("support gaps do not vanish".to_string())
            } else if !balanced {
                Some("budgets do not balance blockwise".to_string())
            } else {
                certificate.failure.clone()
            };
            Ok(LcToWalras {
                pass: failure.is_none(),
                price: Some(price),
                min_slack: Some(min_slack),
                gamma: Some(gamma),
                balance_gaps,
                certificate: Some(certificate),
                witness: None,
                improvement: None,
                failure,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::instances::{collinear, coordinate_list_example};
    use super::*;

    fn half() -> Price {
        Price::new(vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn cobb_douglas_demand() {
        let eco = collinear();
        assert_eq!(
            budget_max(&eco, 0, &half()).unwrap(),
            BudgetOutcome::Optimal { value: 1.0, optimizer: vec![1.0, 1.0] }
        );
        assert_eq!(
            budget_max(&eco, 1, &half()).unwrap(),
            BudgetOutcome::Optimal { value: 2.0, optimizer: vec![2.0, 2.0] }
        );
        let free = Price::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(budget_max(&eco, 0, &free).unwrap(), BudgetOutcome::Unbounded);
    }

    #[test]
    fn polyhedral_budget() {
        let u = PolyhedralUtility::new(vec![(vec![1.0, 0.0], 0.0), (vec![0.0, 2.0], 0.0)]).unwrap();
        // max min(x, 2y) with x + y ≤ 3 is reached at x = 2y = 2
        match polyhedral_budget_max(&u, &[0.5, 0.5], 1.5).unwrap() {
            BudgetOutcome::Optimal { value, optimizer } => {
                assert!((value - 2.0).abs() < 1e-12);
                assert!((optimizer[0] - 2.0).abs() < 1e-12 && (optimizer[1] - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn collinear_endowment_is_an_equilibrium() {
        let eco = collinear();
        let cert = walras_check(&eco, &eco.endowment_allocation(), &half()).unwrap();
        assert!(cert.pass, "{:?}", cert.failure);
        assert!(cert.blocks.iter().all(|b| b.gap.abs() < 1e-12));
    }

    #[test]
    fn wrong_price_fails_with_a_gap() {
        let eco = collinear();
        let p = Price::new(vec![0.9, 0.1]).unwrap();
        let cert = walras_check(&eco, &eco.endowment_allocation(), &p).unwrap();
        assert!(!cert.pass);
        assert!(cert.blocks[0].gap > 0.5);
    }

    #[test]
    fn coordinate_list_endowment_with_unit_price() {
        let eco = coordinate_list_example();
        let cert = walras_check(&eco, &eco.endowment_allocation(), &Price::unit(3, 1)).unwrap();
        assert!(cert.pass, "{:?}", cert.failure);
        let off = walras_check(&eco, &eco.endowment_allocation(), &Price::unit(3, 0)).unwrap();
        assert!(!off.pass);
    }

    #[test]
    fn pipeline_on_the_collinear_instance() {
        let eco = collinear();
        let out = lc_to_walras(&eco, &eco.endowment_allocation(), 16).unwrap();
        assert!(out.pass, "{:?}", out.failure);
        let p = out.price.unwrap();
        assert!((p.p[0] - 0.5).abs() < 1e-6 && (p.p[1] - 0.5).abs() < 1e-6, "{:?}", p.p);
        assert!(out.gamma.unwrap().all_zero);
    }

    #[test]
    fn pipeline_on_coordinate_lists() {
        let eco = coordinate_list_example();
        let out = lc_to_walras(&eco, &eco.endowment_allocation(), 16).unwrap();
        assert!(out.pass, "{:?}", out.failure);
        assert_eq!(out.price.unwrap().p, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn improvable_allocation_has_no_price() {
        let eco = collinear();
        let f = eco.simple_allocation(&[vec![0.5, 2.0], vec![2.5, 1.0]]).unwrap();
        let out = lc_to_walras(&eco, &f, 16).unwrap();
        assert!(!out.pass);
        let w = out.witness.expect("negative witness");
        assert!(w.iter().all(|v| *v < 0.0));
        assert!(out.improvement.unwrap().is_improved());
    }
}
