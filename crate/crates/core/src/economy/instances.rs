//! Ready-made economies: the worked examples and seeded random families
//! used by the tests and the command-line demos.

use rand::Rng;

use super::{Economy, Preference};
use crate::capacity::{Capacity, ExplicitCapacity, PartitionedCapacity, ProductSectionCapacity};
use crate::concave::ConcaveFn;
use crate::convexsep::Price;
use crate::error::Result;
use crate::rational::{self, q};
use crate::regions::{AtomSet, Region};
use crate::utility::{CobbDouglas, PolyhedralUtility};

/// Blocks as equal vertical strips of the square, each carrying the
/// section distortion `γ` scaled to the given mass. Every block can be
/// split, so coalitions of any mass exist.
pub fn strip_capacity(masses: &[f64], gamma: ConcaveFn) -> Result<Capacity> {
    let r = masses.len() as i64;
    let mut blocks = Vec::new();
    let mut parts = Vec::new();
    for (i, &m) in masses.iter().enumerate() {
        let (x0, x1) = (q(i as i64, r), q(i as i64 + 1, r));
        blocks.push(Region::rect(x0.clone(), x1.clone(), rational::zero(), rational::one())?);
        parts.push(Capacity::ProductSection(ProductSectionCapacity::on_strip(gamma.clone(), x0, x1, m)?));
    }
    Ok(Capacity::Partitioned(PartitionedCapacity::new(blocks, parts)?))
}

/// Blocks of `k` atoms each with `μᵢ(A) = mᵢ γ(|A ∩ Eᵢ| / k)`.
pub fn atomic_capacity(masses: &[f64], k: usize, gamma: ConcaveFn) -> Result<Capacity> {
    let n = masses.len() * k;
    let mut blocks = Vec::new();
    let mut parts = Vec::new();
    for (i, &m) in masses.iter().enumerate() {
        let members: Vec<usize> = (i * k..(i + 1) * k).collect();
        let mask = AtomSet::from_members(n, &members).expect("members fit").bits();
        blocks.push(Region::atoms(n, &members)?);
        let g = gamma.clone();
        let table = ExplicitCapacity::from_fn(n, move |s| m * g.eval((s.bits() & mask).count_ones() as f64 / k as f64))?;
        parts.push(Capacity::Explicit(table));
    }
    Ok(Capacity::Partitioned(PartitionedCapacity::new(blocks, parts)?))
}

fn sqrt_cd() -> Preference {
    Preference::CobbDouglas(CobbDouglas::symmetric(2))
}

/// Masses 1 and 1, endowments (1,1) and (2,2), common `√(x₁x₂)`.
pub fn collinear() -> Economy {
    let mu = strip_capacity(&[1.0, 1.0], ConcaveFn::Sqrt).expect("valid strips");
    Economy::new(mu, vec![vec![1.0, 1.0], vec![2.0, 2.0]], vec![sqrt_cd(), sqrt_cd()]).expect("valid economy")
}

/// Endowments (2,1) and (1,2) with common `√(x₁x₂)`; not additive on the
/// endowment span.
pub fn non_collinear() -> Economy {
    let mu = strip_capacity(&[1.0, 1.0], ConcaveFn::Sqrt).expect("valid strips");
    Economy::new(mu, vec![vec![2.0, 1.0], vec![1.0, 2.0]], vec![sqrt_cd(), sqrt_cd()]).expect("valid economy")
}

/// Three goods, lists {0,1} and {1,2}; good 1 is common.
pub fn coordinate_list_example() -> Economy {
    let mu = strip_capacity(&[1.0, 1.0], ConcaveFn::Sqrt).expect("valid strips");
    Economy::new(
        mu,
        vec![vec![1.0, 2.0, 1.0], vec![2.0, 1.0, 3.0]],
        vec![
            Preference::coordinate_list(vec![0, 1]).expect("nonempty"),
            Preference::coordinate_list(vec![1, 2]).expect("nonempty"),
        ],
    )
    .expect("valid economy")
}

/// Common `u = x₁ + 2x₂`, masses 1 and 2.
pub fn common_linear() -> Economy {
    let mu = strip_capacity(&[1.0, 2.0], ConcaveFn::Sqrt).expect("valid strips");
    let u = Preference::linear(vec![1.0, 2.0]).expect("valid weights");
    Economy::new(mu, vec![vec![1.0, 1.0], vec![2.0, 1.0]], vec![u.clone(), u]).expect("valid economy")
}

/// Each block holds mostly the good the other block values.
pub fn linear_swap() -> Economy {
    let mu = strip_capacity(&[1.0, 1.0], ConcaveFn::Sqrt).expect("valid strips");
    Economy::new(
        mu,
        vec![vec![1.0, 3.0], vec![3.0, 1.0]],
        vec![Preference::linear(vec![3.0, 1.0]).unwrap(), Preference::linear(vec![1.0, 3.0]).unwrap()],
    )
    .expect("valid economy")
}

/// Equilibrium of an economy where every block has a Cobb–Douglas
/// utility: `pⱼ Tⱼ = Σᵢ mᵢ αᵢⱼ (p·eᵢ)` solved by power iteration, with
/// each block consuming its demand.
pub fn cobb_douglas_equilibrium(eco: &Economy) -> Option<(Vec<Vec<f64>>, Price)> {
    let alphas: Vec<&[f64]> = eco
        .preferences()
        .iter()
        .map(|p| if let Preference::CobbDouglas(u) = p { Some(u.alpha()) } else { None })
        .collect::<Option<_>>()?;
    let n = eco.dim();
    let t = eco.total_endowment();
    let m = eco.masses();
    let mut p = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let mut next: Vec<f64> = (0..n)
            .map(|j| {
                (0..eco.len())
                    .map(|i| m[i] * alphas[i][j] * eco.endowment(i).iter().zip(&p).map(|(a, b)| a * b).sum::<f64>())
                    .sum::<f64>()
                    / t[j]
            })
            .collect();
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= s);
        let delta = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        p = next;
        if delta < 1e-16 {
            break;
        }
    }
    let bundles = (0..eco.len())
        .map(|i| {
            let wealth: f64 = eco.endowment(i).iter().zip(&p).map(|(a, b)| a * b).sum();
            alphas[i].iter().zip(&p).map(|(a, pj)| a * wealth / pj).collect()
        })
        .collect();
    Some((bundles, Price::new(p).ok()?))
}

/// Which ground set the random families live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    /// Vertical strips of the square; coalitions of every mass exist.
    Strips,
    /// `k` atoms per block.
    Atoms(usize),
}

fn space_capacity(space: Space, masses: &[f64]) -> Result<Capacity> {
    match space {
        Space::Strips => strip_capacity(masses, ConcaveFn::Sqrt),
        Space::Atoms(k) => atomic_capacity(masses, k, ConcaveFn::Sqrt),
    }
}

fn masses<R: Rng>(rng: &mut R, r: usize) -> Vec<f64> {
    (0..r).map(|_| rng.gen_range(1..=8) as f64 / 4.0).collect()
}

fn bundle<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(1..=16) as f64 / 4.0).collect()
}

fn cobb_douglas<R: Rng>(rng: &mut R, n: usize) -> CobbDouglas {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=4) as f64).collect();
    let s: f64 = w.iter().sum();
    CobbDouglas::new(w.iter().map(|v| v / s).collect()).expect("weights lie in (0,1) and sum to 1")
}

/// Independent Cobb–Douglas utilities and endowments.
pub fn random_cobb_douglas<R: Rng>(rng: &mut R, r: usize, n: usize, space: Space) -> Result<Economy> {
    let m = masses(rng, r);
    let e = (0..r).map(|_| bundle(rng, n)).collect();
    let prefs = (0..r).map(|_| Preference::CobbDouglas(cobb_douglas(rng, n))).collect();
    Economy::new(space_capacity(space, &m)?, e, prefs)
}

/// One Cobb–Douglas utility for everyone and endowments on a common ray.
pub fn random_collinear<R: Rng>(rng: &mut R, r: usize, n: usize, space: Space) -> Result<Economy> {
    let m = masses(rng, r);
    let dir = bundle(rng, n);
    let e: Vec<Vec<f64>> = (0..r)
        .map(|_| {
            let c = rng.gen_range(1..=8) as f64 / 4.0;
            dir.iter().map(|v| v * c).collect()
        })
        .collect();
    let u = Preference::CobbDouglas(cobb_douglas(rng, n));
    Economy::new(space_capacity(space, &m)?, e, vec![u; r])
}

/// One linear utility for everyone.
pub fn random_common_linear<R: Rng>(rng: &mut R, r: usize, n: usize, space: Space) -> Result<Economy> {
    let m = masses(rng, r);
    let e = (0..r).map(|_| bundle(rng, n)).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=4) as f64).collect();
    Economy::new(space_capacity(space, &m)?, e, vec![Preference::linear(c)?; r])
}

/// Minima of two or three affine maps with nonnegative slopes.
pub fn random_polyhedral_utility<R: Rng>(rng: &mut R, n: usize) -> PolyhedralUtility {
    let k = rng.gen_range(2..=3);
    let pieces = (0..k)
        .map(|_| {
            let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=8) as f64 / 4.0).collect();
            if a.iter().all(|v| *v == 0.0) {
                a[rng.gen_range(0..n)] = 1.0;
            }
            (a, rng.gen_range(0..=4) as f64 / 4.0)
        })
        .collect();
    PolyhedralUtility::new(pieces).expect("slopes and constants are nonnegative")
}

pub fn random_polyhedral<R: Rng>(rng: &mut R, r: usize, n: usize, space: Space) -> Result<Economy> {
    let m = masses(rng, r);
    let e = (0..r).map(|_| bundle(rng, n)).collect();
    let prefs = (0..r).map(|_| Preference::Polyhedral(random_polyhedral_utility(rng, n))).collect();
    Economy::new(space_capacity(space, &m)?, e, prefs)
}

/// Coordinate lists that all contain one randomly chosen good.
pub fn random_coordinate_list<R: Rng>(rng: &mut R, r: usize, n: usize, space: Space) -> Result<Economy> {
    let m = masses(rng, r);
    let e = (0..r).map(|_| bundle(rng, n)).collect();
    let common = rng.gen_range(0..n);
    let prefs = (0..r)
        .map(|_| {
            let mut j: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            j.push(common);
            Preference::coordinate_list(j)
        })
        .collect::<Result<Vec<_>>>()?;
    Economy::new(space_capacity(space, &m)?, e, prefs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::walras_check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn strip_masses() {
        let mu = strip_capacity(&[1.0, 2.5], ConcaveFn::Sqrt).unwrap();
        assert_eq!(mu.as_partitioned().unwrap().block_masses(), vec![1.0, 2.5]);
        assert!(mu.is_constructive());
    }

    #[test]
    fn atomic_masses() {
        let mu = atomic_capacity(&[1.0, 2.0], 3, ConcaveFn::Sqrt).unwrap();
        assert_eq!(mu.as_partitioned().unwrap().block_masses(), vec![1.0, 2.0]);
        let one = Region::atoms(6, &[0]).unwrap();
        assert!((mu.evaluate(&one).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cobb_douglas_equilibria_certify() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let eco = random_cobb_douglas(&mut rng, 3, 3, Space::Strips).unwrap();
            let (w, p) = cobb_douglas_equilibrium(&eco).unwrap();
            let cert = walras_check(&eco, &eco.simple_allocation(&w).unwrap(), &p).unwrap();
            assert!(cert.pass, "{:?}", cert.failure);
        }
    }
}
