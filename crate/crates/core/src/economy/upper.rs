use num_traits::Zero;

use super::Preference;
use crate::convexsep::UpperSet;
use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::utility::CobbDouglas;

/// Supporting points used to polyhedralize a smooth upper set.
pub const COBB_DOUGLAS_SAMPLES: usize = 64;

const MAX_VERTEX_SUBSETS: usize = 200_000;

/// `{x : x ⪰ w}` as a generator list. Polyhedral and linear utilities give
/// the exact vertex set; Cobb–Douglas gives an inner approximation through
/// points on the indifference surface; a coordinate list gives a single
/// corner.
pub fn upper_set(pref: &Preference, w: &[f64]) -> Result<UpperSet> {
    let n = w.len();
    match pref {
        Preference::Polyhedral(u) => {
            let level = u.eval(w);
            let rows: Vec<(Vec<f64>, f64)> = u.majorants().iter().map(|(a, c)| (a.clone(), level - c)).collect();
            UpperSet::new(n, polyhedral_vertices(&rows, n)?)
        }
        Preference::Linear(c) => {
            let level: f64 = c.iter().zip(w).map(|(a, b)| a * b).sum();
            UpperSet::new(n, polyhedral_vertices(&[(c.clone(), level)], n)?)
        }
        Preference::CobbDouglas(u) => {
            let level = u.eval(w);
            UpperSet::new(n, cobb_douglas_level_samples(u, level, w, COBB_DOUGLAS_SAMPLES))
        }
        Preference::CoordinateList(j) => {
            let corner = (0..n).map(|k| if j.contains(&k) { w[k] } else { 0.0 }).collect();
            UpperSet::new(n, vec![corner])
        }
    }
}

/// Vertices of `{x ≥ 0 : aₖ·x ≥ bₖ}`, computed exactly. With nonnegative
/// `aₖ` the recession cone is the orthant, so the polyhedron equals the
/// hull of these vertices plus `ℝⁿ₊`.
pub fn polyhedral_vertices(rows: &[(Vec<f64>, f64)], n: usize) -> Result<Vec<Vec<f64>>> {
    let mut cons: Vec<(Vec<Q>, Q)> = rows
        .iter()
        .map(|(a, b)| (a.iter().map(|&v| rational::from_f64(v)).collect(), rational::from_f64(*b)))
        .collect();
    for j in 0..n {
        let mut e = vec![rational::zero(); n];
        e[j] = rational::one();
        cons.push((e, rational::zero()));
    }
    let m = cons.len();
    if binomial(m, n) > MAX_VERTEX_SUBSETS {
        return Err(Error::Precondition(format!("{m} constraints in dimension {n} is too many to enumerate")));
    }
    let mut out: Vec<Vec<Q>> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<Q>> = idx.iter().map(|&k| cons[k].0.clone()).collect();
        let b: Vec<Q> = idx.iter().map(|&k| cons[k].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            let feasible = cons.iter().all(|(a, b)| dot(a, &x) >= *b);
            if feasible && !out.contains(&x) {
                out.push(x);
            }
        }
        if !next_subset(&mut idx, m) {
            break;
        }
    }
    Ok(out.iter().map(|x| x.iter().map(rational::to_f64).collect()).collect())
}

fn dot(a: &[Q], x: &[Q]) -> Q {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

fn binomial(m: usize, k: usize) -> usize {
    if k > m {
        return 0;
    }
    (0..k.min(m - k)).fold(1usize, |acc, i| acc.saturating_mul(m - i) / (i + 1))
}

fn next_subset(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination; `None` when singular.
fn solve_square(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Points of `{u = level}` spread around the ray through `center`. In log
/// coordinates the level set is the hyperplane `α·y = ln level`; samples
/// move along an orthonormal basis of `α⊥` at geometric offsets from 1e-6
/// to 8, and are nudged up by a relative 1e-12 so that rounding keeps them
/// inside the upper set.
pub fn cobb_douglas_level_samples(u: &CobbDouglas, level: f64, center: &[f64], k: usize) -> Vec<Vec<f64>> {
    let n = u.dim();
    if level <= 0.0 {
        return vec![vec![0.0; n]];
    }
    let base: Vec<f64> = if center.iter().all(|&v| v > 0.0) {
        let uc = u.eval(center);
        center.iter().map(|v| v * level / uc).collect()
    } else {
        vec![level; n]
    };
    let y0: Vec<f64> = base.iter().map(|v| v.ln()).collect();
    let dirs = tangent_basis(u.alpha());
    let per_sign = ((k.saturating_sub(1)) / (2 * dirs.len().max(1))).max(1);
    let (lo, hi) = (1e-6f64, 8.0f64);
    let ratio = if per_sign > 1 { (hi / lo).powf(1.0 / (per_sign - 1) as f64) } else { 1.0 };
    let nudge = 1.0 + 1e-12;
    let mut out = vec![base.iter().map(|v| v * nudge).collect::<Vec<_>>()];
    for d in &dirs {
        for s in [1.0, -1.0] {
            let mut t = lo;
            for _ in 0..per_sign {
                out.push(y0.iter().zip(d).map(|(y, dj)| (y + s * t * dj).exp() * nudge).collect());
                t *= ratio;
            }
        }
    }
    out
}

/// Orthonormal basis of the hyperplane orthogonal to `alpha`.
fn tangent_basis(alpha: &[f64]) -> Vec<Vec<f64>> {
    let n = alpha.len();
    let norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = vec![alpha.iter().map(|a| a / norm).collect()];
    for j in 0..n {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-9 {
            basis.push(v.iter().map(|x| x / len).collect());
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}
