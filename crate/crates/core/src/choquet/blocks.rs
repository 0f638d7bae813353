//! Integrals against partitioned capacities, where everything splits
//! block by block.

use super::{choquet_integral, integral, vector_integral, Allocation};
use crate::capacity::{Capacity, PartitionedCapacity};
use crate::error::{Error, Result};
use crate::rational;
use crate::regions::Region;

fn partition(mu: &Capacity) -> Result<&PartitionedCapacity> {
    mu.as_partitioned()
        .ok_or_else(|| Error::UnsupportedCapacity("a partitioned capacity is required".into()))
}

#[derive(Clone, Debug)]
pub struct BlockAdditivityReport {
    /// Largest componentwise `|μ_g(A) − Σᵢ μ_g(A ∩ Eᵢ)|`.
    pub vector_gap: f64,
    /// `|μ_{p·g}(X) − Σᵢ μ_{p·g}(Eᵢ)|`.
    pub scalar_gap: f64,
    /// `|μ_{p·g}(X) − p·μ_g(X)|`, only for block-constant `g`.
    pub price_gap: Option<f64>,
    pub pass: bool,
}

pub fn block_additivity_check(mu: &Capacity, g: &Allocation, a: &Region, p: &[f64]) -> Result<BlockAdditivityReport> {
    let part = partition(mu)?;
    let whole = vector_integral(mu, g, a)?;
    let mut sum = vec![0.0; g.dim()];
    for b in part.blocks() {
        for (s, v) in sum.iter_mut().zip(vector_integral(mu, g, &a.intersect(b)?)?) {
            *s += v;
        }
    }
    let vector_gap = whole.iter().zip(&sum).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let pq: Vec<_> = p.iter().map(|&v| rational::from_f64(v)).collect();
    let pg = g.dot(&pq);
    let scalar_whole = integral(mu, &pg)?;
    let mut scalar_sum = 0.0;
    for b in part.blocks() {
        scalar_sum += choquet_integral(mu, &pg, b)?;
    }
    let scalar_gap = (scalar_whole - scalar_sum).abs();
    let price_gap = if is_block_constant(part, g)? {
        let full = vector_integral(mu, g, &mu.universe().full())?;
        Some((scalar_whole - p.iter().zip(&full).map(|(x, y)| x * y).sum::<f64>()).abs())
    } else {
        None
    };
    let scale = 1.0 + whole.iter().chain([&scalar_whole]).fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;
    let pass = vector_gap <= tol && scalar_gap <= tol && price_gap.is_none_or(|d| d <= tol);
    Ok(BlockAdditivityReport { vector_gap, scalar_gap, price_gap, pass })
}

/// True if `g` takes a single bundle on each block.
pub fn is_block_constant(part: &PartitionedCapacity, g: &Allocation) -> Result<bool> {
    for b in part.blocks() {
        let vals = g.values_on(b)?;
        if vals.windows(2).any(|w| w[0].1 != w[1].1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `w⁽ⁱ⁾ = ∫_{A∩Eᵢ} s dμ / μ(A∩Eᵢ)`.
pub fn mean_value(mu: &Capacity, s: &Allocation, a: &Region, i: usize) -> Result<Vec<f64>> {
    let part = partition(mu)?;
    let block = part.blocks().get(i).ok_or_else(|| Error::Domain(format!("no block {i}")))?;
    let sub = a.intersect(block)?;
    let m = mu.evaluate(&sub)?;
    if m <= 0.0 {
        return Err(Error::ZeroMeasureBlock(i));
    }
    Ok(vector_integral(mu, s, &sub)?.into_iter().map(|v| v / m).collect())
}

/// Replaces `s` on every block meeting `A` in positive capacity by its mean
/// value there; the integral over `A` is unchanged.
pub fn simplify_selection(mu: &Capacity, s: &Allocation, a: &Region) -> Result<Allocation> {
    let part = partition(mu)?;
    let mut g = s.clone();
    for (i, block) in part.blocks().iter().enumerate() {
        if mu.evaluate(&a.intersect(block)?)? > 0.0 {
            let w = mean_value(mu, s, a, i)?;
            g = g.overwrite(block, &w)?;
        }
    }
    Ok(g)
}

/// The average function `f̄ = Σᵢ (∫_{Eᵢ} f dμ / μ(Eᵢ)) 1_{Eᵢ}`.
pub fn average_allocation(mu: &Capacity, f: &Allocation) -> Result<Allocation> {
    let part = partition(mu)?;
    let full = mu.universe().full();
    let values = (0..part.len()).map(|i| mean_value(mu, f, &full, i)).collect::<Result<Vec<_>>>()?;
    Allocation::block_constant(part.blocks(), &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::ExplicitCapacity;
    use crate::regions::Universe;

    fn blocks() -> Capacity {
        // block 0 = {0,1} with the symmetric 0.7 table, block 1 = {2} with mass 2
        let inner = ExplicitCapacity::from_fn(3, |s| {
            let k = s.bits() & 0b011;
            [0.0, 0.7, 0.7, 1.0][k as usize]
        })
        .unwrap();
        let outer = ExplicitCapacity::from_fn(3, |s| if s.contains(2) { 2.0 } else { 0.0 }).unwrap();
        Capacity::Partitioned(
            PartitionedCapacity::new(
                vec![Region::atoms(3, &[0, 1]).unwrap(), Region::atoms(3, &[2]).unwrap()],
                vec![Capacity::Explicit(inner), Capacity::Explicit(outer)],
            )
            .unwrap(),
        )
    }

    fn at(m: &[usize]) -> Region {
        Region::atoms(3, m).unwrap()
    }

    #[test]
    fn mean_of_two_one() {
        let s = Allocation::new(Universe::Atoms(3), vec![(at(&[0]), vec![2.0]), (at(&[1]), vec![1.0]), (at(&[2]), vec![4.0])])
            .unwrap();
        let w = mean_value(&blocks(), &s, &Universe::Atoms(3).full(), 0).unwrap();
        assert!((w[0] - 1.7).abs() < 1e-15);
        let avg = average_allocation(&blocks(), &s).unwrap();
        assert_eq!(avg.value_on(&at(&[0, 1])).map(|v| (v[0] * 1e12).round()), Some(1.7e12));
        assert_eq!(avg.value_on(&at(&[2])), Some(vec![4.0]));
        assert!(matches!(mean_value(&blocks(), &s, &at(&[2]), 0), Err(Error::ZeroMeasureBlock(0))));
    }

    #[test]
    fn simplified_selection_keeps_integral() {
        let s = Allocation::new(
            Universe::Atoms(3),
            vec![(at(&[0]), vec![2.0, 0.0]), (at(&[1]), vec![1.0, 3.0]), (at(&[2]), vec![4.0, 1.0])],
        )
        .unwrap();
        for a in [at(&[0, 1, 2]), at(&[0, 2]), at(&[1])] {
            let g = simplify_selection(&blocks(), &s, &a).unwrap();
            let lhs = vector_integral(&blocks(), &g, &a).unwrap();
            let rhs = vector_integral(&blocks(), &s, &a).unwrap();
            for (x, y) in lhs.iter().zip(&rhs) {
                assert!((x - y).abs() < 1e-12, "{a:?}");
            }
        }
    }

    #[test]
    fn additivity_across_blocks() {
        let g = Allocation::block_constant(&[at(&[0, 1]), at(&[2])], &[vec![1.0, 2.0], vec![3.0, 0.5]]).unwrap();
        let r = block_additivity_check(&blocks(), &g, &Universe::Atoms(3).full(), &[1.0, 1.0]).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.price_gap.unwrap() < 1e-12);
        let r = block_additivity_check(&blocks(), &g, &at(&[]), &[1.0, 1.0]).unwrap();
        assert!(r.pass);
    }
}
