use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::{solve_f64, Arith, Cmp, Lp, LpOutcome};

/// Feasibility tolerance when checking floating certificates.
pub const MEMBER_TOL: f64 = 1e-9;

pub(crate) fn solve(lp: &Lp<f64>, dim: usize) -> Result<LpOutcome<f64>> {
    solve_f64(lp, Arith::choose(dim, lp.constraints.len() + lp.num_vars))
}

/// `conv(generators) + ℝⁿ₊`.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperSet {
    dim: usize,
    generators: Vec<Vec<f64>>,
}

impl UpperSet {
    pub fn new(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        for (k, g) in generators.iter().enumerate() {
            if g.len() != dim {
                return Err(Error::Domain(format!("generator {k} has {} coordinates, expected {dim}", g.len())));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("generator {k} is not finite")));
            }
        }
        Ok(UpperSet { dim, generators })
    }

    /// `x + ℝⁿ₊`.
    pub fn orthant_at(x: &[f64]) -> Self {
        UpperSet { dim: x.len(), generators: vec![x.to_vec()] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Whether some convex combination of the generators lies below `x`.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if self.generators.is_empty() {
            return Ok(false);
        }
        let k = self.generators.len();
        let mut lp = Lp::feasibility(k);
        lp.push(vec![1.0; k], Cmp::Eq, 1.0);
        for j in 0..self.dim {
            lp.push(self.generators.iter().map(|g| g[j]).collect(), Cmp::Le, x[j]);
        }
        Ok(solve(&lp, self.dim)?.is_feasible())
    }
}

/// One summand `[0, m]·(C − e)` of a cone sum.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeTerm {
    pub scale: f64,
    pub base: Vec<f64>,
    pub upper: UpperSet,
}

impl ConeTerm {
    /// Terms with zero scale or no generators contribute only the origin.
    pub fn is_active(&self) -> bool {
        self.scale > 0.0 && !self.upper.is_empty()
    }
}

/// `I = Σᵢ [0, mᵢ]·(Cᵢ − eᵢ)`, taken with its closure: the orthant part of
/// each `Cᵢ` survives even as the scale tends to zero, so whenever some term
/// is active the sum absorbs all of `ℝⁿ₊`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSum {
    dim: usize,
    terms: Vec<ConeTerm>,
}

impl ConeSum {
    pub fn new(dim: usize, terms: Vec<ConeTerm>) -> Result<Self> {
        for (i, t) in terms.iter().enumerate() {
            if t.base.len() != dim || t.upper.dim() != dim {
                return Err(Error::Domain(format!("term {i} does not live in dimension {dim}")));
            }
            if !(t.scale >= 0.0 && t.scale.is_finite()) {
                return Err(Error::Domain(format!("term {i} has scale {}", t.scale)));
            }
        }
        Ok(ConeSum { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[ConeTerm] {
        &self.terms
    }

    /// `(term, generator)` for every row `g − eᵢ` of an active term.
    pub(crate) fn rows(&self) -> Vec<(usize, usize, Vec<f64>)> {
        let mut out = Vec::new();
        for (i, t) in self.terms.iter().enumerate().filter(|(_, t)| t.is_active()) {
            for (k, g) in t.upper.generators().iter().enumerate() {
                out.push((i, k, g.iter().zip(&t.base).map(|(a, b)| a - b).collect()));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Membership {
    pub member: bool,
    /// Weights `α` on the rows (term, generator) and the orthant slack.
    pub weights: Vec<(usize, usize, f64)>,
    pub slack: Vec<f64>,
}

/// Decides `z ∈ I` by linear feasibility: `z = Σ αᵢₖ(gᵢₖ − eᵢ) + s` with
/// `α, s ≥ 0` and `Σₖ αᵢₖ ≤ mᵢ` for each term.
pub fn cone_membership(cone: &ConeSum, z: &[f64]) -> Result<Membership> {
    cone_membership_tol(cone, z, 0.0)
}

/// Membership of `z + tol·(1, …, 1)`, for points computed in floating
/// point that may sit a rounding error outside a boundary face.
pub fn cone_membership_tol(cone: &ConeSum, z: &[f64], tol: f64) -> Result<Membership> {
    if z.len() != cone.dim {
        return Err(Error::Domain(format!("point of dimension {} tested against dimension {}", z.len(), cone.dim)));
    }
    let rows = cone.rows();
    if rows.is_empty() {
        let member = z.iter().all(|v| v.abs() <= MEMBER_TOL.max(tol));
        return Ok(Membership { member, weights: Vec::new(), slack: vec![0.0; cone.dim] });
    }
    let (nr, n) = (rows.len(), cone.dim);
    let mut lp = Lp::feasibility(nr + n);
    for j in 0..n {
        let mut c: Vec<f64> = rows.iter().map(|(_, _, a)| a[j]).collect();
        c.extend((0..n).map(|k| if k == j { 1.0 } else { 0.0 }));
        lp.push(c, Cmp::Eq, z[j] + tol);
    }
    for (i, t) in cone.terms.iter().enumerate().filter(|(_, t)| t.is_active()) {
        let mut c: Vec<f64> = rows.iter().map(|(ti, _, _)| if *ti == i { 1.0 } else { 0.0 }).collect();
        c.extend(std::iter::repeat(0.0).take(n));
        lp.push(c, Cmp::Le, t.scale);
    }
    match solve(&lp, n)? {
        LpOutcome::Optimal { x, .. } => Ok(Membership {
            member: true,
            weights: rows.iter().zip(&x).map(|((i, k, _), a)| (*i, *k, *a)).collect(),
            slack: x[nr..].to_vec(),
        }),
        _ => Ok(Membership { member: false, weights: Vec::new(), slack: Vec::new() }),
    }
}

/// Recomputes `Σ αᵢₖ(gᵢₖ − eᵢ) + s` from a membership certificate.
pub fn certificate_point(cone: &ConeSum, m: &Membership) -> Vec<f64> {
    let mut z = m.slack.clone();
    z.resize(cone.dim, 0.0);
    for &(i, k, a) in &m.weights {
        let t = &cone.terms[i];
        for (j, zj) in z.iter_mut().enumerate() {
            *zj += a * (t.upper.generators()[k][j] - t.base[j]);
        }
    }
    z
}

/// A random point of the cone sum.
pub fn random_member<R: Rng>(cone: &ConeSum, rng: &mut R) -> Vec<f64> {
    let mut z = vec![0.0; cone.dim];
    for t in cone.terms.iter().filter(|t| t.is_active()) {
        let scale = rng.gen_range(0.0..=t.scale);
        let gens = t.upper.generators();
        let w: Vec<f64> = gens.iter().map(|_| rng.gen::<f64>()).collect();
        let total: f64 = w.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        for j in 0..cone.dim {
            let v: f64 = gens.iter().zip(&w).map(|(g, wk)| g[j] * wk / total).sum();
            let bump = if rng.gen_bool(0.3) { rng.gen_range(0.0..1.0) } else { 0.0 };
            z[j] += scale * (v + bump - t.base[j]);
        }
    }
    z
}

#[derive(Clone, Debug)]
pub struct ProbeVerdict {
    pub pass: bool,
    pub trials: usize,
    /// `(z₁, z₂, λ)` whose combination failed membership.
    pub failure: Option<(Vec<f64>, Vec<f64>, f64)>,
    pub seed: u64,
}

/// Convex combinations of random members must stay members.
pub fn convexity_probe(cone: &ConeSum, trials: usize, seed: u64) -> Result<ProbeVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let (z1, z2) = (random_member(cone, &mut rng), random_member(cone, &mut rng));
        let lambda: f64 = match rng.gen_range(0..4) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen(),
        };
        let z: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        if !cone_membership_tol(cone, &z, MEMBER_TOL)?.member {
            return Ok(ProbeVerdict { pass: false, trials, failure: Some((z1, z2, lambda)), seed });
        }
    }
    Ok(ProbeVerdict { pass: true, trials, failure: None, seed })
}
