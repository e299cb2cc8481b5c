use std::collections::BTreeSet;

use fgdef::galois::{FieldDesc, FieldElem, GaloisError};
use proptest::prelude::*;

fn fields() -> Vec<FieldDesc> {
    let f4 = FieldDesc::galois(2, 2).unwrap();
    let f16 = FieldDesc::extension(&f4, 2, None).unwrap();
    let f9 = FieldDesc::galois(3, 2).unwrap();
    let f729 = FieldDesc::extension(&f9, 3, None).unwrap();
    vec![
        FieldDesc::prime(2).unwrap(),
        FieldDesc::prime(3).unwrap(),
        FieldDesc::prime(13).unwrap(),
        f4,
        f16,
        FieldDesc::galois(2, 3).unwrap(),
        f9,
        f729,
        FieldDesc::galois(5, 2).unwrap(),
        FieldDesc::galois(5, 3).unwrap(),
    ]
}

fn elem(f: &FieldDesc, raw: u32) -> FieldElem {
    f.from_code(raw % f.order() as u32).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms(i in 0usize..10, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = &fields()[i];
        let (a, b, c) = (elem(f, a), elem(f, b), elem(f, c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if f.is_zero(a) {
            prop_assert_eq!(f.inv(a), Err(GaloisError::DivisionByZero));
        } else {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        }
    }

    #[test]
    fn frobenius_is_additive_and_multiplicative(i in 0usize..10, a in any::<u32>(), b in any::<u32>()) {
        let f = &fields()[i];
        let (a, b) = (elem(f, a), elem(f, b));
        let p = f.characteristic();
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.pow(a, f.order()), a);
    }

    #[test]
    fn embedding_is_a_homomorphism(a in any::<u32>(), b in any::<u32>()) {
        let f9 = FieldDesc::galois(3, 2).unwrap();
        let big = FieldDesc::extension(&f9, 3, None).unwrap();
        let (a, b) = (elem(&f9, a), elem(&f9, b));
        let (ea, eb) = (big.embed(a).unwrap(), big.embed(b).unwrap());
        prop_assert_eq!(big.embed(f9.mul(a, b)).unwrap(), big.mul(ea, eb));
        prop_assert_eq!(big.embed(f9.add(a, b)).unwrap(), big.add(ea, eb));
        prop_assert_eq!(big.restrict(&f9, ea).unwrap(), Some(a));
        prop_assert_eq!(big.frobenius_over(&f9, ea).unwrap(), ea);
    }

    #[test]
    fn literals_round_trip(i in 0usize..10, a in any::<u32>()) {
        let f = &fields()[i];
        let a = elem(f, a);
        prop_assert_eq!(f.parse_elem(&f.format(a)).unwrap(), a);
    }
}

#[test]
fn dth_powers_match_tables() {
    for f in fields() {
        for d in [2u64, 3, 4, 5] {
            let table: BTreeSet<FieldElem> = f.elements().map(|y| f.pow(y, d)).collect();
            for x in f.elements() {
                assert_eq!(f.is_dth_power(x, d), table.contains(&x), "{} d={d} x={}", f.spec(), f.format(x));
            }
        }
    }
}

#[test]
fn square_roots_square_back() {
    for f in fields() {
        for x in f.elements() {
            if let Some(r) = f.sqrt(x) {
                assert_eq!(f.mul(r, r), x);
            } else {
                assert!(!f.is_dth_power(x, 2));
            }
        }
    }
}

#[test]
fn cross_field_operands_are_rejected() {
    let f5 = FieldDesc::prime(5).unwrap();
    let f7 = FieldDesc::prime(7).unwrap();
    assert_eq!(f5.try_add(f5.one(), f7.one()), Err(GaloisError::FieldMismatch));
    assert!(FieldDesc::prime(6).is_err());
}
