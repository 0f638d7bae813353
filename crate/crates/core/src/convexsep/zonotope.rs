use super::cone::solve;
use crate::capacity::{split, Capacity};
use crate::choquet::{is_block_constant, Allocation};
use crate::error::{Error, Result};
use crate::lp::{Cmp, Lp, LpOutcome};
use crate::regions::Region;

const MEMBER_BAND: f64 = 1e-11;

/// The range `{(μ(A), μ_e(A))}` for a block-constant endowment `e` over a
/// partitioned capacity whose blocks attain every intermediate value: the
/// sum of segments from the origin to `(μ(Eᵢ), μ(Eᵢ)·eᵢ)`.
#[derive(Clone, Debug)]
pub struct Zonotope {
    pub masses: Vec<f64>,
    pub bundles: Vec<Vec<f64>>,
}

impl Zonotope {
    pub fn dim(&self) -> usize {
        self.bundles.first().map_or(0, Vec::len)
    }

    /// Segment endpoint for block `i`, in `ℝ^{1+n}`.
    pub fn generator(&self, i: usize) -> Vec<f64> {
        let m = self.masses[i];
        std::iter::once(m).chain(self.bundles[i].iter().map(|v| m * v)).collect()
    }

    pub fn point(&self, s: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 1 + self.dim()];
        for (i, si) in s.iter().enumerate() {
            for (o, g) in out.iter_mut().zip(self.generator(i)) {
                *o += si * g;
            }
        }
        out
    }

    /// Block fractions `s ∈ [0,1]^r` reaching `target`, if any.
    pub fn coefficients(&self, target: &[f64]) -> Result<Option<Vec<f64>>> {
        let r = self.masses.len();
        if target.len() != 1 + self.dim() {
            return Err(Error::Domain(format!("target must have {} coordinates", 1 + self.dim())));
        }
        let gens: Vec<Vec<f64>> = (0..r).map(|i| self.generator(i)).collect();
        // Targets are usually float images of block fractions; with more
        // coordinates than blocks an exact equality can reject them over
        // rounding, so a failed exact attempt is retried with a small
        // relative band on each coordinate.
        for band in [0.0, MEMBER_BAND] {
            let mut lp = Lp::feasibility(r);
            for (j, t) in target.iter().enumerate() {
                let row: Vec<f64> = gens.iter().map(|g| g[j]).collect();
                if band == 0.0 {
                    lp.push(row, Cmp::Eq, *t);
                } else {
                    let w = band * (1.0 + t.abs());
                    lp.push(row.clone(), Cmp::Le, t + w);
                    lp.push(row, Cmp::Ge, t - w);
                }
            }
            for i in 0..r {
                lp.push((0..r).map(|k| if k == i { 1.0 } else { 0.0 }).collect(), Cmp::Le, 1.0);
            }
            if let LpOutcome::Optimal { x, .. } = solve(&lp, target.len())? {
                return Ok(Some(x.into_iter().map(|v| v.clamp(0.0, 1.0)).collect()));
            }
        }
        Ok(None)
    }

    pub fn contains(&self, target: &[f64]) -> Result<bool> {
        Ok(self.coefficients(target)?.is_some())
    }
}

pub fn range_zonotope(mu: &Capacity, e: &Allocation) -> Result<Zonotope> {
    let part = mu
        .as_partitioned()
        .ok_or_else(|| Error::UnsupportedCapacity("the range description needs a partitioned capacity".into()))?;
    if !is_block_constant(part, e)? {
        return Err(Error::Precondition("endowment must be constant on each block".into()));
    }
    let mut bundles = Vec::new();
    for b in part.blocks() {
        bundles.push(
            e.value_on(b)
                .ok_or_else(|| Error::Internal("block-constant allocation has no value on a block".into()))?,
        );
    }
    Ok(Zonotope { masses: part.block_masses(), bundles })
}

/// A set `A` with `(μ(A), μ_e(A))` equal to `target`, built by splitting
/// each block at the fraction the coefficients ask for. Returns the region
/// and its actual coordinates.
pub fn realize(mu: &Capacity, z: &Zonotope, target: &[f64]) -> Result<Option<(Region, Vec<f64>)>> {
    let part = mu
        .as_partitioned()
        .ok_or_else(|| Error::UnsupportedCapacity("realization needs a partitioned capacity".into()))?;
    if !mu.is_constructive() {
        return Err(Error::UnsupportedCapacity("realization needs product-section blocks".into()));
    }
    let Some(s) = z.coefficients(target)? else { return Ok(None) };
    let mut a = mu.universe().empty();
    for (b, si) in part.blocks().iter().zip(&s) {
        a = a.union(&split(mu, b, *si)?)?;
    }
    let mut achieved = vec![mu.evaluate(&a)?];
    for k in 0..z.dim() {
        let mut v = 0.0;
        for (i, b) in part.blocks().iter().enumerate() {
            v += z.bundles[i][k] * mu.evaluate(&a.intersect(b)?)?;
        }
        achieved.push(v);
    }
    Ok(Some((a, achieved)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{PartitionedCapacity, ProductSectionCapacity};
    use crate::choquet::vector_integral;
    use crate::concave::ConcaveFn;
    use crate::rational::{q, qi};

    fn strips() -> Capacity {
        let e1 = Region::rect(qi(0), q(1, 3), qi(0), qi(1)).unwrap();
        let e2 = e1.complement();
        let p1 = ProductSectionCapacity::on_strip(ConcaveFn::Sqrt, qi(0), q(1, 3), 1.0).unwrap();
        let p2 = ProductSectionCapacity::on_strip(ConcaveFn::Sqrt, q(1, 3), qi(1), 2.0).unwrap();
        Capacity::Partitioned(
            PartitionedCapacity::new(vec![e1, e2], vec![Capacity::ProductSection(p1), Capacity::ProductSection(p2)])
                .unwrap(),
        )
    }

    #[test]
    fn realizes_block_fractions() {
        let mu = strips();
        let blocks = mu.as_partitioned().unwrap().blocks().to_vec();
        let e = Allocation::block_constant(&blocks, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let z = range_zonotope(&mu, &e).unwrap();
        assert_eq!(z.masses, vec![1.0, 2.0]);
        let target = [2.0, 1.0, 1.0];
        assert_eq!(z.coefficients(&target).unwrap().unwrap(), vec![1.0, 0.5]);
        let (a, achieved) = realize(&mu, &z, &target).unwrap().unwrap();
        for (x, y) in achieved.iter().zip(&target) {
            assert!((x - y).abs() < 1e-8);
        }
        // cross-check against an integral computed from scratch
        let direct = vector_integral(&mu, &e, &a).unwrap();
        assert!((direct[0] - 1.0).abs() < 1e-8 && (direct[1] - 1.0).abs() < 1e-8);
        assert!(a.intersect(&blocks[0]).unwrap() == blocks[0]);
        let (empty, _) = realize(&mu, &z, &[0.0, 0.0, 0.0]).unwrap().unwrap();
        assert!(empty.is_empty());
        assert!(!z.contains(&[4.0, 1.0, 1.0]).unwrap());
    }
}
