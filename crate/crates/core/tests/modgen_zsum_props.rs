use std::collections::BTreeSet;

use fgdef::curves::{Curve, Point};
use fgdef::galois::FieldDesc;
use fgdef::modgen;
use fgdef::selftest::{fixture_curves, prime_power};
use fgdef::zsum;
use proptest::prelude::*;

#[test]
fn fast_count_matches_closure_oracle() {
    for c in fixture_curves() {
        let q = c.field().order();
        for ell in 1..=5u32 {
            if q.pow(ell) > 150 {
                continue;
            }
            let fast = modgen::generation_fraction(&c, ell).unwrap();
            let (slow, total) = modgen::generating_count_by_closure(&c, ell).unwrap();
            assert_eq!((fast.generating, fast.total), (slow, total), "{c:?} l={ell}");
        }
    }
}

#[test]
fn submodules_are_frobenius_stable_subgroups() {
    for c in fixture_curves().into_iter().take(3) {
        let ext = FieldDesc::extension(c.field(), 2, None).unwrap();
        let big = c.base_change(&ext).unwrap();
        let pts = big.enumerate_points().unwrap();
        for p in pts.iter().step_by(5) {
            let h = modgen::frobenius_submodule(&c, &ext, p).unwrap();
            assert!(h.contains(p));
            assert_eq!(pts.len() % h.len(), 0);
            for g in h.points() {
                assert!(h.contains(&big.frobenius_endo(g, c.field()).unwrap()));
                assert!(h.contains(&big.neg(g)));
                assert!(h.contains(&big.add(g, p)));
            }
        }
    }
}

#[test]
fn generation_reports_respect_the_bound_or_carry_the_caveat() {
    for c in fixture_curves() {
        let q = c.field().order();
        for ell in [2u32, 3] {
            if q.pow(ell) > 3000 {
                continue;
            }
            let r = modgen::generation_fraction(&c, ell).unwrap();
            assert!(!r.falsified(), "{r:?}");
        }
    }
}

fn short_curves(q: u64) -> Vec<Curve> {
    let (p, k) = prime_power(q).unwrap();
    zsum::curve_sample(&FieldDesc::galois(p, k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn sum_sets_of_short_curves_are_symmetric(
        q in prop::sample::select(vec![5u64, 7, 11, 13, 25]), i in any::<usize>(), m in 1u64..6
    ) {
        let cs = short_curves(q);
        let c = &cs[i % cs.len()];
        let f = c.field();
        let g = zsum::subgroup_by_multiplier(c, m).unwrap();
        let n = c.count_points().unwrap();
        prop_assert_eq!(n % g.len() as u64, 0);
        let image: BTreeSet<Point> = g.iter().map(|p| c.scalar_mul(m as i64, p)).collect();
        prop_assert!(image.iter().all(|p| g.contains(p)));
        if let Ok(set) = zsum::z_sum_set(c, &g) {
            // z(-P) = -z(P) on y^2 = x^3 + a x + b
            prop_assert!(set.contains(&f.zero()));
            prop_assert!(set.iter().all(|&s| set.contains(&f.neg(s))));
        }
    }
}

#[test]
fn covering_instance_above_sixteen() {
    let f17 = FieldDesc::prime(17).unwrap();
    let r = zsum::z_sum_report(&Curve::from_ints(&f17, [0, 0, 0, 0, 1]).unwrap(), 1).unwrap();
    assert!(r.covered);
    assert_eq!(r.sum_set_size, 17);
}
