//! Reference computations for the integration tests. Capacities are
//! evaluated straight from their definitions (tables, or quadrature over
//! horizontal sections), never through the library's integration code.
#![allow(dead_code)]

use std::collections::HashMap;

use choquet_core::capacity::{Capacity, ExplicitCapacity};
use choquet_core::choquet::{Allocation, StepFunction};
use choquet_core::economy::Economy;
use choquet_core::rational::{self, Q};
use choquet_core::regions::{Rect, RectUnion, Region, Universe};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// `[x0, x1) × [y0, y1)` with float corners.
#[derive(Clone, Copy, Debug)]
pub struct Cell {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Cell {
    pub fn region(&self) -> Region {
        let q = |v: f64| rational::from_f64(v);
        Region::Rects(RectUnion::from_rects(vec![
            Rect::new(q(self.x0), q(self.x1), q(self.y0), q(self.y1)).expect("cell is a rectangle"),
        ]))
    }
}

/// `w · ∫₀¹ γ(|B_y ∩ S| / |S|) dy` by the midpoint rule. With corners on a
/// `1/16` grid and a step count divisible by 16 the rule only errs through
/// `γ` itself.
pub fn section_measure(cells: &[Cell], gamma: &dyn Fn(f64) -> f64, strip: (f64, f64), weight: f64, steps: usize) -> f64 {
    let h = 1.0 / steps as f64;
    let mut total = 0.0;
    for k in 0..steps {
        let y = (k as f64 + 0.5) * h;
        let mut iv: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.y0 <= y && y < c.y1)
            .map(|c| (c.x0.max(strip.0), c.x1.min(strip.1)))
            .filter(|(a, b)| a < b)
            .collect();
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut len = 0.0;
        let mut reach = f64::NEG_INFINITY;
        for (a, b) in iv {
            let start = a.max(reach);
            if b > start {
                len += b - start;
            }
            reach = reach.max(b);
        }
        total += gamma(len / (strip.1 - strip.0)) * h;
    }
    weight * total
}

/// `∫₀^max μ({f > t}) dt` by the midpoint rule with `steps` cells, where
/// `measure` receives the indicator of the pieces above `t`.
pub fn layer_cake(values: &[f64], measure: &dyn Fn(&[bool]) -> f64, steps: usize) -> f64 {
    let top = values.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return 0.0;
    }
    let dt = top / steps as f64;
    let mut cache: HashMap<Vec<bool>, f64> = HashMap::new();
    let mut sum = 0.0;
    for k in 0..steps {
        let t = (k as f64 + 0.5) * dt;
        let mask: Vec<bool> = values.iter().map(|&v| v > t).collect();
        let m = *cache.entry(mask.clone()).or_insert_with(|| measure(&mask));
        sum += m * dt;
    }
    sum
}

/// A random partition of the square into rows of random height, each cut
/// into columns of random width, on the `1/16` grid.
pub fn random_cells<R: Rng>(rng: &mut R) -> Vec<Cell> {
    let mut cells = Vec::new();
    let mut y = 0;
    while y < 16 {
        let y1 = (y + rng.gen_range(1..=8)).min(16);
        let mut x = 0;
        while x < 16 {
            let x1 = (x + rng.gen_range(2..=10)).min(16);
            cells.push(Cell { x0: x as f64 / 16.0, x1: x1 as f64 / 16.0, y0: y as f64 / 16.0, y1: y1 as f64 / 16.0 });
            x = x1;
        }
        y = y1;
    }
    cells
}

pub fn square_step(cells: &[Cell], values: &[f64]) -> StepFunction {
    let pieces = cells.iter().zip(values).map(|(c, &v)| (c.region(), v)).collect();
    StepFunction::new(Universe::Square, pieces).expect("cells are disjoint")
}

/// A capacity table on `n` atoms with its generating family.
#[derive(Clone, Debug)]
pub struct Table {
    pub n: usize,
    pub values: Vec<f64>,
    pub exact: Option<Vec<Q>>,
    pub submodular: bool,
}

impl Table {
    pub fn capacity(&self) -> Capacity {
        let c = match &self.exact {
            Some(q) => ExplicitCapacity::from_rationals(self.n, q.clone()),
            None => ExplicitCapacity::from_values(self.n, self.values.clone()),
        };
        Capacity::Explicit(c.expect("generated tables are capacities"))
    }

    pub fn at(&self, mask: &[bool]) -> f64 {
        self.values[bits(mask) as usize]
    }

    /// `N` is null when adding it never changes the value.
    pub fn is_null(&self, n_bits: u64) -> bool {
        (0..1u64 << self.n).all(|a| self.values[(a | n_bits) as usize] == self.values[a as usize])
    }
}

pub fn bits(mask: &[bool]) -> u64 {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| 1u64 << i).sum()
}

fn weights<R: Rng>(rng: &mut R, n: usize) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(1..=9)).collect()
}

fn exact_table(n: usize, f: impl Fn(u64) -> Q) -> Table {
    let exact: Vec<Q> = (0..1u64 << n).map(f).collect();
    let values = exact.iter().map(rational::to_f64).collect();
    Table { n, values, exact: Some(exact), submodular: false }
}

/// `min(Σ_A w, cap)`: submodular, rational.
pub fn truncated_additive<R: Rng>(rng: &mut R, n: usize) -> Table {
    let w = weights(rng, n);
    let total: i64 = w.iter().sum();
    let cap = rng.gen_range(total / 2..=total).max(1);
    let mut t = exact_table(n, |b| {
        let s: i64 = (0..n).filter(|i| b >> i & 1 == 1).map(|i| w[i]).sum();
        rational::q(s.min(cap), cap)
    });
    t.submodular = true;
    t
}

/// `(Σ_A w / Σ w)²`: supermodular, rational.
pub fn squared_additive<R: Rng>(rng: &mut R, n: usize) -> Table {
    let w = weights(rng, n);
    let total: i64 = w.iter().sum();
    exact_table(n, |b| {
        let s: i64 = (0..n).filter(|i| b >> i & 1 == 1).map(|i| w[i]).sum();
        rational::q(s * s, total * total)
    })
}

/// `√(Σ_A w / Σ w)`: submodular, irrational values.
pub fn sqrt_distortion<R: Rng>(rng: &mut R, n: usize) -> Table {
    let w = weights(rng, n);
    let total: i64 = w.iter().sum();
    let values = (0..1u64 << n)
        .map(|b| {
            let s: i64 = (0..n).filter(|i| b >> i & 1 == 1).map(|i| w[i]).sum();
            (s as f64 / total as f64).sqrt()
        })
        .collect();
    Table { n, values, exact: None, submodular: true }
}

/// Monotone with random increments and no further structure.
pub fn random_monotone<R: Rng>(rng: &mut R, n: usize) -> Table {
    let size = 1usize << n;
    let mut num = vec![0i64; size];
    for b in 1..size {
        let below = (0..n).filter(|i| b >> i & 1 == 1).map(|i| num[b & !(1 << i)]).max().unwrap_or(0);
        let least = if b.count_ones() == 1 { 1 } else { 0 };
        num[b] = below + rng.gen_range(least..=4);
    }
    let top = num[size - 1].max(1);
    exact_table(n, |b| rational::q(num[b as usize], top))
}

pub fn random_table<R: Rng>(rng: &mut R, n: usize) -> Table {
    match rng.gen_range(0..4) {
        0 => truncated_additive(rng, n),
        1 => squared_additive(rng, n),
        2 => sqrt_distortion(rng, n),
        _ => random_monotone(rng, n),
    }
}

/// `ν(A ∖ Z)` for a truncated additive `ν`: subadditive, and its null sets
/// are exactly the subsets of `Z`, so they are closed under unions.
pub fn with_null_atoms<R: Rng>(rng: &mut R, n: usize) -> (Table, u64) {
    let base = truncated_additive(rng, n);
    let z: u64 = (0..n).filter(|_| rng.gen_bool(0.3)).map(|i| 1u64 << i).sum();
    let exact = base.exact.as_ref().expect("truncated additive tables are exact");
    let mut t = exact_table(n, |b| exact[(b & !z) as usize].clone());
    t.submodular = true;
    (t, z)
}

pub fn atom_step(n: usize, values: &[i64]) -> StepFunction {
    let pieces = (0..n)
        .map(|i| (Region::atoms(n, &[i]).expect("atom in range"), rational::qi(values[i])))
        .collect();
    StepFunction::from_rationals(Universe::Atoms(n), pieces).expect("atoms are disjoint")
}

/// Block bundles with the economy's total endowment, drawn by rescaling
/// random positive bundles good by good.
pub fn random_feasible_bundles<R: Rng>(rng: &mut R, eco: &Economy) -> Vec<Vec<f64>> {
    let (r, n) = (eco.len(), eco.dim());
    let total = eco.total_endowment();
    let raw: Vec<Vec<f64>> = (0..r).map(|_| (0..n).map(|_| rng.gen_range(0.05..1.0)).collect()).collect();
    let mut out = raw.clone();
    for k in 0..n {
        let s: f64 = (0..r).map(|i| eco.masses()[i] * raw[i][k]).sum();
        for i in 0..r {
            out[i][k] = raw[i][k] * total[k] / s;
        }
    }
    out
}

pub fn simple(eco: &Economy, bundles: &[Vec<f64>]) -> Allocation {
    eco.simple_allocation(bundles).expect("bundles match the economy")
}
