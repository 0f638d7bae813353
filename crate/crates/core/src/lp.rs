//! A dense two-phase simplex method with Bland's anti-cycling rule, generic
//! over exact rationals and `f64`.
//!
//! Every variable is nonnegative. Small problems are solved exactly; larger
//! ones fall back to floating point with a `1e-9` pivot tolerance.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Q};

/// Tolerance used by the floating-point solver.
pub const FLOAT_TOL: f64 = 1e-9;

const MAX_PIVOTS: usize = 100_000;

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_zero(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_TOL
    }
}

impl Scalar for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        rational::one()
    }
    fn from_f64(x: f64) -> Self {
        rational::from_f64(x)
    }
    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub cmp: Cmp,
    pub rhs: T,
}

/// Optimize `c·x` subject to the constraints and `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct Lp<T> {
    pub num_vars: usize,
    pub objective: Vec<T>,
    pub maximize: bool,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

impl<T: Scalar> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }

    pub fn to_f64(&self) -> LpOutcome<f64> {
        match self {
            LpOutcome::Optimal { x, value } => {
                LpOutcome::Optimal { x: x.iter().map(Scalar::to_f64).collect(), value: value.to_f64() }
            }
            LpOutcome::Infeasible => LpOutcome::Infeasible,
            LpOutcome::Unbounded => LpOutcome::Unbounded,
        }
    }
}

impl<T: Scalar> Lp<T> {
    /// A feasibility problem (zero objective) in `num_vars` variables.
    pub fn feasibility(num_vars: usize) -> Self {
        Lp { num_vars, objective: vec![T::zero(); num_vars], maximize: false, constraints: Vec::new() }
    }

    pub fn minimize(objective: Vec<T>) -> Self {
        Lp { num_vars: objective.len(), objective, maximize: false, constraints: Vec::new() }
    }

    pub fn maximize(objective: Vec<T>) -> Self {
        Lp { num_vars: objective.len(), objective, maximize: true, constraints: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<T>, cmp: Cmp, rhs: T) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Lp<U> {
        Lp {
            num_vars: self.num_vars,
            objective: self.objective.iter().map(&f).collect(),
            maximize: self.maximize,
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint { coeffs: c.coeffs.iter().map(&f).collect(), cmp: c.cmp, rhs: f(&c.rhs) })
                .collect(),
        }
    }

    pub fn solve(&self) -> Result<LpOutcome<T>> {
        Tableau::build(self).run(self)
    }
}

/// Exact or floating arithmetic for a given problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arith {
    Exact,
    Float,
}

impl Arith {
    /// Exact for at most 6 commodities and 64 constraints (sign
    /// constraints included); floating otherwise.
    pub fn choose(dimension: usize, constraints: usize) -> Self {
        if dimension <= 6 && constraints <= 64 {
            Arith::Exact
        } else {
            Arith::Float
        }
    }
}

/// Solves a problem stated in `f64` data, converting the data exactly to
/// rationals first when `arith` is `Exact`.
pub fn solve_f64(lp: &Lp<f64>, arith: Arith) -> Result<LpOutcome<f64>> {
    match arith {
        Arith::Float => lp.solve(),
        Arith::Exact => Ok(lp.map(|&v| rational::from_f64(v)).solve()?.to_f64()),
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    obj: Vec<T>,
    basis: Vec<usize>,
    /// Columns excluded from entering (artificials in phase two).
    blocked: Vec<bool>,
    cols: usize,
    first_artificial: usize,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &Lp<T>) -> Self {
        let n = lp.num_vars;
        let slacks = lp.constraints.iter().filter(|c| c.cmp != Cmp::Eq).count();
        let arts = lp
            .constraints
            .iter()
            .filter(|c| {
                let flip = c.rhs.is_neg();
                match c.cmp {
                    Cmp::Le => flip,
                    Cmp::Ge => !flip,
                    Cmp::Eq => true,
                }
            })
            .count();
        let cols = n + slacks + arts;
        let first_artificial = n + slacks;
        let mut rows = Vec::with_capacity(lp.constraints.len());
        let mut basis = Vec::with_capacity(lp.constraints.len());
        let (mut next_slack, mut next_art) = (n, first_artificial);
        for c in &lp.constraints {
            let flip = c.rhs.is_neg();
            let sign = |v: &T| if flip { -v.clone() } else { v.clone() };
            let mut row = vec![T::zero(); cols + 1];
            for (j, v) in c.coeffs.iter().enumerate() {
                row[j] = sign(v);
            }
            row[cols] = sign(&c.rhs);
            let cmp = match (c.cmp, flip) {
                (Cmp::Le, true) => Cmp::Ge,
                (Cmp::Ge, true) => Cmp::Le,
                (k, _) => k,
            };
            match cmp {
                Cmp::Le => {
                    row[next_slack] = T::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Cmp::Ge => {
                    row[next_slack] = -T::one();
                    next_slack += 1;
                    row[next_art] = T::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Cmp::Eq => {
                    row[next_art] = T::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }
        Tableau { rows, obj: vec![T::zero(); cols + 1], basis, blocked: vec![false; cols], cols, first_artificial }
    }

    fn set_objective(&mut self, cost: &[T]) {
        self.obj = cost.to_vec();
        self.obj.resize(self.cols + 1, T::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost.get(b).cloned().unwrap_or_else(T::zero);
            if cb.is_zero() {
                continue;
            }
            for j in 0..=self.cols {
                let v = self.obj[j].clone() - cb.clone() * self.rows[r][j].clone();
                self.obj[j] = v;
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<T>| {
            let f = row[c].clone();
            if f.is_zero() && !matches!(f.partial_cmp(&T::zero()), Some(std::cmp::Ordering::Equal)) {
                // float noise below tolerance: clear it without touching the row
                row[c] = T::zero();
                return;
            }
            if f.is_zero() {
                return;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Runs the simplex loop on the current objective. Returns `false` when
    /// the problem is unbounded.
    fn optimize(&mut self) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..self.cols).find(|&j| !self.blocked[j] && self.obj[j].is_neg()) else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_pos() {
                    continue;
                }
                let ratio = row[self.cols].clone() / row[c].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Ok(false),
            }
        }
        Err(Error::Internal("simplex pivot limit reached".into()))
    }

    fn run(mut self, lp: &Lp<T>) -> Result<LpOutcome<T>> {
        if self.first_artificial < self.cols {
            let mut phase1 = vec![T::zero(); self.cols];
            for v in phase1.iter_mut().skip(self.first_artificial) {
                *v = T::one();
            }
            self.set_objective(&phase1);
            self.optimize()?;
            if (-self.obj[self.cols].clone()).is_pos() {
                return Ok(LpOutcome::Infeasible);
            }
            // Drive remaining artificials out of the basis; drop redundant rows.
            let mut r = 0;
            while r < self.rows.len() {
                if self.basis[r] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                        Some(j) => self.pivot(r, j),
                        None => {
                            self.rows.remove(r);
                            self.basis.remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
            for j in self.first_artificial..self.cols {
                self.blocked[j] = true;
            }
        }
        let cost: Vec<T> = lp
            .objective
            .iter()
            .map(|v| if lp.maximize { -v.clone() } else { v.clone() })
            .collect();
        self.set_objective(&cost);
        if !self.optimize()? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![T::zero(); lp.num_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < lp.num_vars {
                x[b] = self.rows[r][self.cols].clone();
            }
        }
        let value = lp.objective.iter().zip(&x).fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
        Ok(LpOutcome::Optimal { x, value })
    }
}
