//! Library results against values computed independently in this file:
//! worked instances with hand-derived answers, section quadrature for the
//! square-root capacity, and a layer-cake Riemann sum for integrals.

mod common;

use choquet_core::capacity::{Capacity, ExplicitCapacity, ProductSectionCapacity};
use choquet_core::choquet::{
    abs_continuity_modulus, asymmetric_integral, choquet_integral, compare_pointwise_from_integrals, indefinite, integral,
    jensen_scalar, mean_value, StepFunction,
};
use choquet_core::capacity::CheckOptions;
use choquet_core::concave::ConcaveFn;
use choquet_core::economy::instances;
use choquet_core::rational::{q, Q};
use choquet_core::regions::{random as rand_regions, section_at, Region, Universe};
use common::*;
use rand::Rng;

fn pair_table() -> Capacity {
    Capacity::Explicit(ExplicitCapacity::from_rationals(2, vec![q(0, 1), q(7, 10), q(7, 10), q(1, 1)]).unwrap())
}

fn atom(n: usize, i: usize) -> Region {
    Region::atoms(n, &[i]).unwrap()
}

#[test]
fn two_atom_integral_is_one_point_seven() {
    let mu = pair_table();
    let f = atom_step(2, &[2, 1]);
    let table = [0.0, 0.7, 0.7, 1.0];
    let oracle = layer_cake(&[2.0, 1.0], &|m| table[bits(m) as usize], 10_000);
    assert!((oracle - 1.7).abs() < 1e-3);
    assert!((integral(&mu, &f).unwrap() - 1.7).abs() < 1e-12);
}

#[test]
fn additive_halves_give_the_weighted_sum() {
    let mu = Capacity::Explicit(ExplicitCapacity::additive_rational(&[q(1, 2), q(1, 2)]).unwrap());
    assert!((integral(&mu, &atom_step(2, &[2, 1])).unwrap() - 1.5).abs() < 1e-15);
}

#[test]
fn negative_step_has_asymmetric_integral_minus_one_point_three() {
    let f = atom_step(2, &[-2, -1]);
    assert!((asymmetric_integral(&pair_table(), &f).unwrap() + 1.3).abs() < 1e-12);
}

#[test]
fn conjugate_of_a_singleton() {
    let bar = pair_table().conjugate();
    assert!((bar.evaluate(&atom(2, 0)).unwrap() - 0.3).abs() < 1e-15);
}

#[test]
fn indefinite_integral_values() {
    let ind = indefinite(&pair_table(), &atom_step(2, &[2, 1])).unwrap();
    let v = |r: &Region| ind.value(r).unwrap();
    assert!((v(&atom(2, 0)) - 1.4).abs() < 1e-12);
    assert!((v(&atom(2, 1)) - 0.7).abs() < 1e-12);
    assert!((v(&Universe::Atoms(2).full()) - 1.7).abs() < 1e-12);
    assert_eq!(v(&Universe::Atoms(2).empty()), 0.0);
    assert!(v(&atom(2, 0)) + v(&atom(2, 1)) >= v(&Universe::Atoms(2).full()));
}

#[test]
fn larger_integrand_is_detected_on_its_atom() {
    let mu = pair_table();
    let v = compare_pointwise_from_integrals(&mu, &atom_step(2, &[2, 1]), &atom_step(2, &[1, 1]), &CheckOptions::default())
        .unwrap();
    assert!(!v.integrals_le && !v.pointwise_le_ae && v.agree);
    assert_eq!(v.integral_witness, Some(atom(2, 0)));
}

#[test]
fn jensen_worked_instance() {
    let v = jensen_scalar(&pair_table(), &atom_step(2, &[2, 1]), &ConcaveFn::Sqrt).unwrap();
    assert!((v.lhs - 1.7f64.sqrt()).abs() < 1e-12);
    assert!((v.rhs - ((2f64.sqrt() - 1.0) * 0.7 + 1.0)).abs() < 1e-12);
    assert!(v.pass);
}

#[test]
fn continuity_modulus_for_max_two() {
    assert_eq!(abs_continuity_modulus(&atom_step(2, &[2, 1]), 0.1), 0.025);
    assert_eq!(abs_continuity_modulus(&atom_step(2, &[0, 0]), 0.1), f64::INFINITY);
}

#[test]
fn mean_value_of_a_two_valued_block() {
    let blocks = vec![Universe::Atoms(2).full()];
    let mu = Capacity::Partitioned(
        choquet_core::capacity::PartitionedCapacity::new(blocks, vec![pair_table()]).unwrap(),
    );
    let s = choquet_core::choquet::Allocation::new(
        Universe::Atoms(2),
        vec![(atom(2, 0), vec![2.0]), (atom(2, 1), vec![1.0])],
    )
    .unwrap();
    let w = mean_value(&mu, &s, &Universe::Atoms(2).full(), 0).unwrap();
    assert!((w[0] - 1.7).abs() < 1e-12);
}

#[test]
fn section_of_a_checkerboard() {
    let a = Region::rect(q(0, 1), q(1, 2), q(0, 1), q(1, 2)).unwrap();
    let b = Region::rect(q(1, 2), q(1, 1), q(1, 2), q(1, 1)).unwrap();
    let u = a.union(&b).unwrap();
    let sec = section_at(u.as_rects().unwrap(), &q(7, 10)).unwrap();
    assert_eq!(sec.intervals(), &[(q(1, 2), q(1, 1))]);
}

/// Float corners of a random union, for the quadrature oracle.
fn cells_of(r: &Region) -> Vec<Cell> {
    let f = |v: &Q| choquet_core::rational::to_f64(v);
    r.as_rects()
        .unwrap()
        .rects()
        .iter()
        .map(|c| Cell { x0: f(&c.x0), x1: f(&c.x1), y0: f(&c.y0), y1: f(&c.y1) })
        .collect()
}

#[test]
fn square_root_capacity_matches_section_quadrature() {
    let mu = Capacity::ProductSection(ProductSectionCapacity::sqrt());
    let mut rng = rng(21);
    for _ in 0..300 {
        let a = Region::Rects(rand_regions::rect_union(&mut rng, 4, 16));
        let oracle = section_measure(&cells_of(&a), &f64::sqrt, (0.0, 1.0), 1.0, 64);
        let got = mu.evaluate(&a).unwrap();
        assert!((got - oracle).abs() < 1e-12, "{got} vs {oracle}");
    }
}

#[test]
fn strip_blocks_match_section_quadrature() {
    let mu = instances::strip_capacity(&[0.5, 1.5], ConcaveFn::Power(0.5)).unwrap();
    let mut rng = rng(22);
    for _ in 0..100 {
        let a = Region::Rects(rand_regions::rect_union(&mut rng, 3, 16));
        let cells = cells_of(&a);
        let oracle = section_measure(&cells, &f64::sqrt, (0.0, 0.5), 0.5, 64)
            + section_measure(&cells, &f64::sqrt, (0.5, 1.0), 1.5, 64);
        assert!((mu.evaluate(&a).unwrap() - oracle).abs() < 1e-12);
    }
}

#[test]
fn square_integrals_match_the_layer_cake_sum() {
    let mu = Capacity::ProductSection(ProductSectionCapacity::sqrt());
    let mut rng = rng(23);
    for _ in 0..50 {
        let cells = random_cells(&mut rng);
        let fv: Vec<f64> = cells.iter().map(|_| rng.gen_range(0..=24) as f64 / 4.0).collect();
        let f = square_step(&cells, &fv);
        let measure = |m: &[bool]| {
            let sel: Vec<Cell> = cells.iter().zip(m).filter(|(_, &b)| b).map(|(c, _)| *c).collect();
            section_measure(&sel, &f64::sqrt, (0.0, 1.0), 1.0, 64)
        };
        let range = fv.iter().copied().fold(0.0, f64::max);
        let oracle = layer_cake(&fv, &measure, 10_000);
        let got = integral(&mu, &f).unwrap();
        assert!((got - oracle).abs() <= 1e-3 * range.max(1.0), "{got} vs {oracle}");
    }
}

#[test]
fn table_integrals_match_the_layer_cake_sum_over_subsets() {
    let mut rng = rng(24);
    for _ in 0..300 {
        let n = rng.gen_range(1..=6);
        let t = random_table(&mut rng, n);
        let vals: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=9)).collect();
        let fv: Vec<f64> = vals.iter().map(|&v| v as f64).collect();
        let e_members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.7)).collect();
        let e = Region::atoms(n, &e_members).unwrap();
        let e_bits: u64 = e_members.iter().map(|i| 1u64 << i).sum();
        let oracle = layer_cake(&fv, &|m| t.values[(bits(m) & e_bits) as usize], 10_000);
        let got = choquet_integral(&t.capacity(), &atom_step(n, &vals), &e).unwrap();
        assert!((got - oracle).abs() <= 1e-3 * 9.0, "{got} vs {oracle}");
    }
}

#[test]
fn constant_integrand_scales_total_mass() {
    let mu = Capacity::ProductSection(ProductSectionCapacity::new(ConcaveFn::Log1p).unwrap());
    let f = StepFunction::constant(Universe::Square, q(5, 2));
    assert!((integral(&mu, &f).unwrap() - 2.5 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn collinear_equilibrium_price_and_bundles() {
    let eco = instances::collinear();
    let (bundles, p) = instances::cobb_douglas_equilibrium(&eco).unwrap();
    assert!((p.p[0] - 0.5).abs() < 1e-9);
    for (b, e) in bundles.iter().zip(eco.endowments()) {
        assert!(b.iter().zip(e).all(|(x, y)| (x - y).abs() < 1e-9));
    }
}
