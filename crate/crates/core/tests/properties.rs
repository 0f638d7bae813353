//! Randomized invariants. Regions live on a 1/16 grid so that every
//! quantity with a closed form can be compared exactly.

mod common;

use choquet_core::capacity::{split, Capacity, ProductSectionCapacity};
use choquet_core::choquet::{asymmetric_integral_exact, choquet_integral_exact, integral};
use choquet_core::concave::ConcaveFn;
use choquet_core::convexsep::{
    certificate_point, cone_membership, separation_price, ConeSum, ConeTerm, Separation, UpperSet,
};
use choquet_core::economy::instances;
use choquet_core::rational::{self, q, Q};
use choquet_core::regions::{AtomSet, Rect, RectUnion, Region, SetOp, Universe};
use common::*;
use proptest::prelude::*;

fn rect_union(raw: &[(i64, i64, i64, i64)]) -> RectUnion {
    let rects = raw
        .iter()
        .filter_map(|&(a, b, c, d)| {
            let (x0, x1) = (a.min(b), a.max(b));
            let (y0, y1) = (c.min(d), c.max(d));
            (x0 < x1 && y0 < y1).then(|| Rect::new(q(x0, 16), q(x1, 16), q(y0, 16), q(y1, 16)).unwrap())
        })
        .collect();
    RectUnion::from_rects(rects)
}

fn raw_rects() -> impl Strategy<Value = Vec<(i64, i64, i64, i64)>> {
    prop::collection::vec((0..=16i64, 0..=16i64, 0..=16i64, 0..=16i64), 0..5)
}

fn ops() -> impl Strategy<Value = SetOp> {
    prop_oneof![Just(SetOp::Union), Just(SetOp::Intersect), Just(SetOp::Diff), Just(SetOp::SymDiff)]
}

fn sqrt_mu() -> Capacity {
    Capacity::ProductSection(ProductSectionCapacity::sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_idempotent(raw in raw_rects()) {
        let u = rect_union(&raw);
        prop_assert_eq!(u.canonical().canonical(), u.canonical());
        prop_assert_eq!(RectUnion::from_rects(u.rects()), u);
    }

    #[test]
    fn combined_membership_is_the_boolean_combination(a in raw_rects(), b in raw_rects(), op in ops(), pts in prop::collection::vec((0..64i64, 0..64i64), 200)) {
        let (a, b) = (rect_union(&a), rect_union(&b));
        let c = a.combine(&b, op);
        for (i, j) in pts {
            // cell centers of a 1/64 grid, plus the grid points themselves
            for (x, y) in [(q(2 * i + 1, 128), q(2 * j + 1, 128)), (q(i, 64), q(j, 64))] {
                prop_assert_eq!(c.contains(&x, &y), op.apply(a.contains(&x, &y), b.contains(&x, &y)));
            }
        }
    }

    #[test]
    fn area_is_modular(a in raw_rects(), b in raw_rects()) {
        let (a, b) = (rect_union(&a), rect_union(&b));
        let lhs = a.combine(&b, SetOp::Union).area() + a.combine(&b, SetOp::Intersect).area();
        prop_assert_eq!(lhs, a.area() + b.area());
    }

    #[test]
    fn sections_integrate_to_the_area(raw in raw_rects()) {
        let u = rect_union(&raw);
        // a multiple of 16, so no cell straddles a corner
        let steps = 1024;
        let total: f64 = (0..steps)
            .map(|k| rational::to_f64(&u.section_at(&q(2 * k + 1, 2 * steps)).unwrap().length()) / steps as f64)
            .sum();
        prop_assert!((total - rational::to_f64(&u.area())).abs() <= 1e-6);
    }

    #[test]
    fn section_capacity_grows_along_chains(a in raw_rects(), b in raw_rects(), c in raw_rects()) {
        let mu = sqrt_mu();
        let a1 = Region::Rects(rect_union(&a));
        let a2 = a1.union(&Region::Rects(rect_union(&b))).unwrap();
        let a3 = a2.union(&Region::Rects(rect_union(&c))).unwrap();
        let v: Vec<f64> = [&a1, &a2, &a3].iter().map(|r| mu.evaluate(r).unwrap()).collect();
        prop_assert_eq!(mu.evaluate(&Universe::Square.empty()).unwrap(), 0.0);
        prop_assert!(v[0] <= v[1] + 1e-12 && v[1] <= v[2] + 1e-12, "{:?}", v);
    }

    #[test]
    fn splits_are_nested_with_proportional_increments(raw in raw_rects(), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let mu = sqrt_mu();
        let a = Region::Rects(rect_union(&raw));
        prop_assume!(!a.is_empty());
        let (lo, hi) = (s.min(t), s.max(t));
        let a_lo = split(&mu, &a, lo).unwrap();
        let a_hi = split(&mu, &a, hi).unwrap();
        let whole = mu.evaluate(&a).unwrap();
        prop_assert!(a_lo.is_subset_of(&a_hi).unwrap());
        prop_assert!(a_hi.is_subset_of(&a).unwrap());
        let gap = mu.evaluate(&a_hi.diff(&a_lo).unwrap()).unwrap();
        prop_assert!((gap - (hi - lo) * whole).abs() <= 1e-9, "{} vs {}", gap, (hi - lo) * whole);
    }

    #[test]
    fn strip_blocks_add_up(raw in raw_rects(), m1 in 1..8i64, m2 in 1..8i64, m3 in 1..8i64) {
        let mu = instances::strip_capacity(&[m1 as f64, m2 as f64, m3 as f64], ConcaveFn::Sqrt).unwrap();
        let part = mu.as_partitioned().unwrap();
        let a = Region::Rects(rect_union(&raw));
        let mut prefix = Universe::Square.empty();
        let mut sum = 0.0;
        for block in part.blocks() {
            prefix = prefix.union(block).unwrap();
            sum += mu.evaluate(&a.intersect(block).unwrap()).unwrap();
            let joint = mu.evaluate(&a.intersect(&prefix).unwrap()).unwrap();
            prop_assert!((joint - sum).abs() <= 1e-12 * (1.0 + sum));
        }
    }

    #[test]
    fn conjugation_is_an_involution(seed in any::<u64>(), n in 1..=6usize) {
        let t = random_table(&mut rng(seed), n);
        let mu = t.capacity();
        let back = mu.conjugate().conjugate();
        for b in 0..1u64 << n {
            let a = AtomSet::new(n, b);
            match (&t.exact, back.exact(&a)) {
                (Some(ex), Some(v)) => prop_assert_eq!(&v, &ex[b as usize]),
                _ => prop_assert!((back.evaluate(&Region::Atoms(a)).unwrap() - t.values[b as usize]).abs() <= 1e-15),
            }
        }
    }

    #[test]
    fn integrals_are_positively_homogeneous(seed in any::<u64>(), n in 1..=6usize, vals in prop::collection::vec(0..10i64, 6), num in 0..20i64, den in 1..7i64) {
        let t = truncated_additive(&mut rng(seed), n);
        let mu = t.capacity();
        let f = atom_step(n, &vals[..n]);
        let c: Q = q(num, den);
        let full = Universe::Atoms(n).full();
        let base = choquet_integral_exact(&mu, &f, &full).unwrap().unwrap();
        let scaled = choquet_integral_exact(&mu, &f.scale(&c), &full).unwrap().unwrap();
        prop_assert_eq!(scaled, c * base);
    }

    #[test]
    fn integrals_are_monotone(seed in any::<u64>(), n in 1..=6usize, vals in prop::collection::vec(0..10i64, 6), bumps in prop::collection::vec(0..4i64, 6)) {
        let t = random_table(&mut rng(seed), n);
        let mu = t.capacity();
        let g: Vec<i64> = vals.iter().zip(&bumps).map(|(v, b)| v + b).collect();
        let lo = integral(&mu, &atom_step(n, &vals[..n])).unwrap();
        let hi = integral(&mu, &atom_step(n, &g[..n])).unwrap();
        prop_assert!(lo <= hi + 1e-12);
    }

    #[test]
    fn asymmetric_integrals_translate(seed in any::<u64>(), n in 1..=6usize, vals in prop::collection::vec(-9..10i64, 6), num in -20..20i64, den in 1..7i64) {
        let t = truncated_additive(&mut rng(seed), n);
        let mu = t.capacity();
        let f = atom_step(n, &vals[..n]);
        let c: Q = q(num, den);
        let total = t.exact.as_ref().unwrap()[(1usize << n) - 1].clone();
        let base = asymmetric_integral_exact(&mu, &f).unwrap().unwrap();
        let moved = asymmetric_integral_exact(&mu, &f.shift(&c)).unwrap().unwrap();
        prop_assert_eq!(moved, base + c * total);
    }
}

/// A cone sum with at most two terms of at most three generators each.
fn small_cone() -> impl Strategy<Value = ConeSum> {
    let term = (
        prop::collection::vec(prop::collection::vec(0..=8i64, 2), 1..=3),
        prop::collection::vec(1..=6i64, 2),
        1..=3i64,
    );
    prop::collection::vec(term, 1..=2).prop_map(|terms| {
        let terms = terms
            .into_iter()
            .map(|(gens, base, m)| ConeTerm {
                scale: m as f64 / 2.0,
                base: base.iter().map(|&v| v as f64 / 2.0).collect(),
                upper: UpperSet::new(2, gens.iter().map(|g| g.iter().map(|&v| v as f64 / 2.0).collect()).collect()).unwrap(),
            })
            .collect();
        ConeSum::new(2, terms).unwrap()
    })
}

/// Points `Σ tᵢ(cᵢ − eᵢ)` over a grid of scales and convex weights.
fn grid_points(cone: &ConeSum) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0; cone.dim()]];
    for t in cone.terms() {
        let gens = t.upper.generators();
        let mut own = Vec::new();
        for ts in 0..=10 {
            let s = t.scale * ts as f64 / 10.0;
            for w in simplex(gens.len(), 10) {
                own.push(
                    (0..cone.dim())
                        .map(|j| s * (gens.iter().zip(&w).map(|(g, wk)| g[j] * wk).sum::<f64>() - t.base[j]))
                        .collect::<Vec<f64>>(),
                );
            }
        }
        pts = pts.iter().flat_map(|p| own.iter().map(move |o| p.iter().zip(o).map(|(a, b)| a + b).collect())).collect();
    }
    pts
}

fn simplex(k: usize, steps: usize) -> Vec<Vec<f64>> {
    if k == 1 {
        return vec![vec![1.0]];
    }
    let mut out = Vec::new();
    for i in 0..=steps {
        for mut rest in simplex(k - 1, steps - i) {
            let scale = (steps - i) as f64 / steps as f64;
            rest.iter_mut().for_each(|v| *v *= scale);
            rest.insert(0, i as f64 / steps as f64);
            out.push(rest);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn membership_agrees_with_a_grid_search(cone in small_cone(), zx in -24..24i64, zy in -24..24i64) {
        let z = [zx as f64 / 4.0, zy as f64 / 4.0];
        let grid = grid_points(&cone);
        let m = cone_membership(&cone, &z).unwrap();
        if grid.iter().any(|p| p.iter().zip(&z).all(|(a, b)| *a <= b - 1e-9)) {
            prop_assert!(m.member, "grid point below {:?} but rejected", z);
        }
        if m.member {
            let back = certificate_point(&cone, &m);
            prop_assert!(back.iter().zip(&z).all(|(a, b)| (a - b).abs() <= 1e-9));
            // every member lies within one grid step of a grid point below it
            let reach: f64 = cone.terms().iter().map(|t| {
                let top = t.upper.generators().iter().flatten().chain(&t.base).fold(0.0f64, |m, v| m.max(v.abs()));
                2.0 * t.scale * top / 10.0
            }).sum();
            prop_assert!(grid.iter().any(|p| p.iter().zip(&z).all(|(a, b)| *a <= b + reach + 1e-9)), "{:?} has no grid point nearby", z);
        }
    }

    #[test]
    fn separation_returns_a_price_or_a_negative_member(cone in small_cone()) {
        match separation_price(&cone).unwrap() {
            Separation::Price { price, min_slack } => {
                prop_assert!(min_slack >= -1e-12);
                if let Some(ex) = &price.exact {
                    prop_assert_eq!(ex.iter().cloned().sum::<Q>(), rational::one());
                }
            }
            Separation::NoPrice { witness } => {
                prop_assert!(witness.iter().all(|&v| v < 0.0));
                prop_assert!(cone_membership(&cone, &witness).unwrap().member);
            }
        }
    }
}
