use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::walras::{lc_to_walras, LcToWalras};
use super::{Economy, Preference};
use crate::choquet::Allocation;
use crate::error::{Error, Result};

const EQUAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct CoreSimpleVerdict {
    pub pass: bool,
    pub utilities: Vec<f64>,
    pub endowment_utilities: Vec<f64>,
    /// Blocks whose utility equals the endowment utility.
    pub equal: Vec<usize>,
    /// A block left worse off than by its endowment, if any.
    pub worse: Option<usize>,
}

fn utility_of(eco: &Economy, i: usize, x: &[f64]) -> Result<f64> {
    eco.preference(i)
        .utility(x)
        .ok_or_else(|| Error::UnsupportedPreference("the core test needs utility preferences".into()))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQUAL_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Core test for simple feasible allocations: every block is at least as
/// well off as with its endowment, and some block is exactly as well off.
pub fn core_check_simple(eco: &Economy, f: &Allocation) -> Result<CoreSimpleVerdict> {
    if !eco.is_simple(f)? {
        return Err(Error::Precondition("allocation is not simple; average it first".into()));
    }
    let bundles = eco.bundles(f)?;
    let mut utilities = Vec::new();
    let mut endowment_utilities = Vec::new();
    for (i, w) in bundles.iter().enumerate() {
        utilities.push(utility_of(eco, i, w)?);
        endowment_utilities.push(utility_of(eco, i, eco.endowment(i))?);
    }
    let equal: Vec<usize> = (0..eco.len()).filter(|&i| close(utilities[i], endowment_utilities[i])).collect();
    let worse = (0..eco.len()).find(|&i| !equal.contains(&i) && utilities[i] < endowment_utilities[i]);
    Ok(CoreSimpleVerdict { pass: worse.is_none() && !equal.is_empty(), utilities, endowment_utilities, equal, worse })
}

#[derive(Clone, Debug)]
pub struct CoreCharacterization {
    pub description: String,
    /// Sample members, each a list of block bundles.
    pub members: Vec<Vec<Vec<f64>>>,
    /// The solution set was found to be a single allocation.
    pub unique: bool,
    /// The price certificate of each member.
    pub certificates: Vec<LcToWalras>,
    /// Random simple feasible allocations outside the solution set, all of
    /// which failed the core test.
    pub non_members_rejected: usize,
    pub seed: u64,
}

impl CoreCharacterization {
    pub fn pass(&self) -> bool {
        !self.members.is_empty() && self.certificates.iter().all(|c| c.pass)
    }
}

/// Describes the core as the simple feasible allocations with
/// `u(wⁱ) = u(eᵢ)` for every block, which is valid when all blocks share
/// one concave utility that is additive on the cone spanned by the
/// endowments. Samples members, certifies each with a supporting price,
/// and checks that random non-members fail the core test.
pub fn characterize_core(eco: &Economy, seed: u64) -> Result<CoreCharacterization> {
    let pref = eco.preference(0);
    if !pref.has_utility() || eco.preferences().iter().any(|p| p != pref) {
        return Err(Error::Precondition("all blocks must share one utility".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    check_span_linearity(eco, &mut rng)?;
    let levels: Vec<f64> = (0..eco.len()).map(|i| utility_of(eco, i, eco.endowment(i))).collect::<Result<_>>()?;
    let (description, members, unique) = match pref {
        Preference::CobbDouglas(u) if eco.dim() == 2 && eco.len() == 2 && u.alpha() == [0.5, 0.5] => {
            let m = solve_two_by_two(eco, &levels);
            let unique = m.len() == 1;
            ("intersection of two indifference curves under the resource constraint".to_string(), m, unique)
        }
        Preference::CobbDouglas(_) if eco.len() == 1 => {
            (String::from("a single block can only keep its endowment"), vec![eco.endowments().to_vec()], true)
        }
        Preference::Linear(c) => {
            let mut m = vec![eco.endowments().to_vec()];
            m.extend(linear_members(eco, c, &mut rng, 8));
            let unique = m.len() == 1;
            (
                "affine set of feasible allocations keeping each block's value c·w equal to c·e".to_string(),
                m,
                unique,
            )
        }
        _ => {
            let m = newton_members(eco, &levels, &mut rng, 8);
            ("solutions of the utility equalities found by damped Newton with restarts".to_string(), m, false)
        }
    };
    let mut certificates = Vec::new();
    for w in &members {
        let f = eco.simple_allocation(w)?;
        certificates.push(lc_to_walras(eco, &f, 8)?);
    }
    let mut non_members_rejected = 0;
    for _ in 0..32 {
        let w = random_feasible(eco, &mut rng);
        let f = eco.simple_allocation(&w)?;
        let in_set = (0..eco.len()).all(|i| close(utility_of(eco, i, &w[i]).unwrap_or(f64::NAN), levels[i]));
        if in_set {
            continue;
        }
        if super::core_check_simple(eco, &f)?.pass {
            return Err(Error::Internal("an allocation outside the described core passed the core test".into()));
        }
        non_members_rejected += 1;
    }
    Ok(CoreCharacterization { description, members, unique, certificates, non_members_rejected, seed })
}

/// `u(Σ λᵢ eᵢ) = Σ λᵢ u(eᵢ)` for random nonnegative weights.
fn check_span_linearity(eco: &Economy, rng: &mut ChaCha8Rng) -> Result<()> {
    let pref = eco.preference(0);
    let n = eco.dim();
    for _ in 0..64 {
        let lambda: Vec<f64> = (0..eco.len()).map(|_| rng.gen_range(0.0..2.0)).collect();
        let mut x = vec![0.0; n];
        let mut sum = 0.0;
        for (i, l) in lambda.iter().enumerate() {
            let e = eco.endowment(i);
            x.iter_mut().zip(e).for_each(|(a, b)| *a += l * b);
            sum += l * pref.utility(e).expect("utility preference");
        }
        let ux = pref.utility(&x).expect("utility preference");
        if (ux - sum).abs() > 1e-9 * (1.0 + sum.abs()) {
            return Err(Error::Precondition(format!(
                "utility is not linear on the endowment span: weights {lambda:?} give {ux} against {sum}"
            )));
        }
    }
    Ok(())
}

/// Two blocks, two goods and `u = √(x₁x₂)`: writing `w¹ = (a, b)` with
/// `ab = u₁²`, the second block's equality becomes a quadratic in `a`.
fn solve_two_by_two(eco: &Economy, levels: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let (m1, m2) = (eco.masses()[0], eco.masses()[1]);
    let t = eco.total_endowment();
    let (u1, u2) = (levels[0], levels[1]);
    let qa = -m1 * t[1];
    let qb = t[0] * t[1] + m1 * m1 * u1 * u1 - m2 * m2 * u2 * u2;
    let qc = -t[0] * m1 * u1 * u1;
    let mut disc = qb * qb - 4.0 * qa * qc;
    let scale = qb * qb + (4.0 * qa * qc).abs();
    if disc < 0.0 && disc > -1e-12 * scale {
        disc = 0.0;
    }
    if disc < 0.0 {
        return Vec::new();
    }
    let root = disc.sqrt();
    let mut out: Vec<Vec<Vec<f64>>> = Vec::new();
    for a in [(-qb + root) / (2.0 * qa), (-qb - root) / (2.0 * qa)] {
        if !(a > 0.0) {
            continue;
        }
        let b = u1 * u1 / a;
        let w2 = vec![(t[0] - m1 * a) / m2, (t[1] - m1 * b) / m2];
        if w2.iter().all(|&v| v > 0.0) && !out.iter().any(|w| (w[0][0] - a).abs() <= 1e-12 * (1.0 + a)) {
            out.push(vec![vec![a, b], w2]);
        }
    }
    out
}

/// `wᵢ = eᵢ + t dᵢ` with `c·dᵢ = 0` and `Σ mᵢ dᵢ = 0`.
fn linear_members(eco: &Economy, c: &[f64], rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<Vec<f64>>> {
    let n = eco.dim();
    let r = eco.len();
    let m = eco.masses();
    let cc: f64 = c.iter().map(|v| v * v).sum();
    let mut out = Vec::new();
    for _ in 0..count * 4 {
        if out.len() == count || r < 2 {
            break;
        }
        let mut d: Vec<Vec<f64>> = (0..r - 1)
            .map(|_| {
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let k = v.iter().zip(c).map(|(a, b)| a * b).sum::<f64>() / cc;
                v.iter().zip(c).map(|(a, b)| a - k * b).collect()
            })
            .collect();
        let last: Vec<f64> = (0..n).map(|j| -d.iter().zip(m).map(|(di, mi)| mi * di[j]).sum::<f64>() / m[r - 1]).collect();
        d.push(last);
        let mut t = 1.0;
        while t > 1e-3 {
            let w: Vec<Vec<f64>> =
                (0..r).map(|i| eco.endowment(i).iter().zip(&d[i]).map(|(e, x)| e + t * x).collect()).collect();
            if w.iter().flatten().all(|&v| v >= 0.0) {
                if d.iter().flatten().any(|v| v.abs() > 1e-9) {
                    out.push(w);
                }
                break;
            }
            t *= 0.5;
        }
    }
    out
}

/// Newton steps on `u(wᵢ) − levelᵢ`, with the last block absorbing the
/// resource constraint; minimum-norm steps through the normal equations.
fn newton_members(eco: &Economy, levels: &[f64], rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<Vec<f64>>> {
    let n = eco.dim();
    let r = eco.len();
    let m = eco.masses().to_vec();
    let t = eco.total_endowment();
    let pref = eco.preference(0);
    let complete = |free: &[f64]| -> Vec<Vec<f64>> {
        let mut w: Vec<Vec<f64>> = free.chunks(n).map(<[f64]>::to_vec).collect();
        let last = (0..n).map(|j| (t[j] - w.iter().zip(&m).map(|(x, mi)| mi * x[j]).sum::<f64>()) / m[r - 1]).collect();
        w.push(last);
        w
    };
    let residual = |free: &[f64]| -> Vec<f64> {
        let w = complete(free);
        (0..r).map(|i| pref.utility(&w[i]).unwrap_or(0.0) - levels[i]).collect()
    };
    let mut out: Vec<Vec<Vec<f64>>> = vec![eco.endowments().to_vec()];
    let dimf = n * (r - 1);
    if dimf == 0 {
        return out;
    }
    for _ in 0..count * 4 {
        if out.len() >= count {
            break;
        }
        let mut x: Vec<f64> =
            (0..r - 1).flat_map(|i| eco.endowment(i).iter().map(|e| e * rng.gen_range(0.5..1.5)).collect::<Vec<_>>()).collect();
        for _ in 0..60 {
            let f0 = residual(&x);
            let norm = f0.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-12 {
                break;
            }
            let h = 1e-7;
            let jac: Vec<Vec<f64>> = (0..dimf)
                .map(|k| {
                    let mut xp = x.clone();
                    xp[k] += h;
                    residual(&xp).iter().zip(&f0).map(|(a, b)| (a - b) / h).collect()
                })
                .collect();
            // J is r × dimf stored by columns; solve (J Jᵀ) z = f, step = Jᵀ z
            let mut jjt = vec![vec![0.0; r]; r];
            for col in &jac {
                for a in 0..r {
                    for b in 0..r {
                        jjt[a][b] += col[a] * col[b];
                    }
                }
            }
            let Some(z) = solve_dense(jjt, f0.clone()) else { break };
            let step: Vec<f64> = jac.iter().map(|col| col.iter().zip(&z).map(|(a, b)| a * b).sum()).collect();
            let mut alpha = 1.0;
            loop {
                let cand: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a - alpha * b).collect();
                let ok = complete(&cand).iter().flatten().all(|&v| v > 0.0);
                let nn = if ok { residual(&cand).iter().map(|v| v * v).sum::<f64>().sqrt() } else { f64::INFINITY };
                if nn < norm || alpha < 1e-6 {
                    if ok {
                        x = cand;
                    }
                    break;
                }
                alpha *= 0.5;
            }
        }
        let w = complete(&x);
        let ok = residual(&x).iter().all(|v| v.abs() <= EQUAL_TOL) && w.iter().flatten().all(|&v| v >= 0.0);
        let fresh = !out.iter().any(|o| o.iter().flatten().zip(w.iter().flatten()).all(|(a, b)| (a - b).abs() < 1e-6));
        if ok && fresh {
            out.push(w);
        }
    }
    out
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// A random simple feasible allocation: random shares of the aggregate.
pub(crate) fn random_feasible(eco: &Economy, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let t = eco.total_endowment();
    let r = eco.len();
    let mut w = vec![vec![0.0; eco.dim()]; r];
    for (j, tj) in t.iter().enumerate() {
        let shares: Vec<f64> = (0..r).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = shares.iter().sum();
        for i in 0..r {
            w[i][j] = tj * shares[i] / total / eco.masses()[i];
        }
    }
    w
}
