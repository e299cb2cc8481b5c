use fgdef::forms::{self, DiagonalForm, SearchMode};
use fgdef::galois::{FieldDesc, FieldElem};
use fgdef::logic::{self, Bindings, Env, Formula, Lambda, L_PREDICATE};
use fgdef::selftest;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>(), depth in 0u32..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let free = vec!["x".to_string(), "y".to_string()];
        let phi = logic::random_formula(&mut rng, &free, depth, 3);
        let printed = phi.to_string();
        prop_assert_eq!(logic::parse_formula(&printed).unwrap(), phi.clone());
        prop_assert_eq!(logic::parse_formula(&printed).unwrap().to_string(), printed);
    }
}

#[test]
fn duality_on_a_thousand_formulas() {
    assert_eq!(selftest::duality_failures(11, 1200), Vec::<String>::new());
}

fn nonzero_form_isotropic(f: &FieldDesc, coeffs: &[FieldElem]) -> bool {
    if coeffs.iter().any(|&c| f.is_zero(c)) {
        return true;
    }
    let form = DiagonalForm::new(f, 2, coeffs.to_vec()).unwrap();
    forms::find_zero(&form, SearchMode::exhaustive()).unwrap().is_isotropic()
}

fn pfister2(f: &FieldDesc, slots: &[FieldElem]) -> Vec<FieldElem> {
    let mut acc = vec![f.one()];
    for &a in slots {
        acc = acc.iter().flat_map(|&x| [x, f.mul(x, a)]).collect();
    }
    acc
}

/// Zero representation over `f[i]/(i^2 + 1)` with base coefficients: the
/// quadratic extension when `-1` is a nonsquare, and `f x f` otherwise, where a
/// nontrivial zero exists iff one exists over `f`.
fn pair_ring_isotropic(f: &FieldDesc, coeffs: &[FieldElem]) -> bool {
    if f.is_dth_power(f.from_int(-1), 2) {
        return nonzero_form_isotropic(f, coeffs);
    }
    let ext = FieldDesc::extension(f, 2, None).unwrap();
    let lifted: Vec<FieldElem> = coeffs.iter().map(|&c| ext.embed(c).unwrap()).collect();
    nonzero_form_isotropic(&ext, &lifted)
}

#[test]
fn a_s_agrees_with_zero_search_over_the_pair_ring() {
    let squares_of_one = logic::parse_formula("(= (* s s) 1)").unwrap();
    let s_family = logic::emit_s_family();
    for q in [3u64, 7, 9] {
        let (p, k) = selftest::prime_power(q).unwrap();
        let f = FieldDesc::galois(p, k).unwrap();
        let params = [("a", f.one()), ("b", f.one())];
        for s_formula in [&squares_of_one, &s_family] {
            let a_s = logic::emit_a_s(s_formula, "s");
            let s_set: Vec<FieldElem> = f
                .elements()
                .filter(|&v| {
                    let mut env = Env::from_pairs(&params);
                    env.set("s", v);
                    logic::eval(s_formula, &f, &env, &Bindings::new()).unwrap()
                })
                .collect();
            for t in f.elements() {
                let mut env = Env::from_pairs(&params);
                env.set("t", t);
                let got = logic::eval_with_budget(&a_s, &f, &env, &Bindings::new(), u64::MAX).unwrap();
                let want = s_set.iter().all(|&s1| {
                    s_set.iter().all(|&s2| {
                        s_set.iter().all(|&s3| pair_ring_isotropic(&f, &pfister2(&f, &[s1, s2, f.sub(t, s3)])))
                    })
                });
                assert_eq!(got, want, "q={q} t={} S={s_formula}", f.format(t));
            }
        }
    }
}

#[test]
fn membership_template_agrees_with_direct_computation() {
    let phi = logic::emit_anisotropy_membership(2).unwrap();
    let f = FieldDesc::prime(5).unwrap();
    let (a, b, u, c) = (f.one(), f.one(), f.from_int(2), f.from_int(2));
    let cubic = |x: FieldElem| f.add(f.add(f.pow(x, 3), f.mul(a, x)), b);
    let fu = cubic(u);
    let fr = &f;
    let twist: Vec<(FieldElem, FieldElem)> = f
        .elements()
        .flat_map(|x| fr.elements().map(move |y| (x, y)))
        .filter(|&(x, y)| f.mul(fu, f.mul(y, y)) == cubic(x))
        .collect();
    let u1s: Vec<FieldElem> = f.units().filter(|&x| twist.iter().any(|&(tx, _)| tx == x)).collect();
    let zs: Vec<FieldElem> =
        twist.iter().filter(|(x, _)| !f.is_zero(*x)).map(|&(x, y)| f.div(y, x).unwrap()).collect();
    let mut u2s: Vec<FieldElem> = zs.iter().flat_map(|&z1| zs.iter().map(move |&z2| fr.add(z1, z2))).collect();
    u2s.sort();
    u2s.dedup();
    for t in f.elements() {
        let env = Env::from_pairs(&[("t", t), ("a", a), ("b", b), ("u", u), ("c", c)]);
        let got = logic::eval_with_budget(&phi, &f, &env, &Bindings::new(), u64::MAX).unwrap();
        let want = u1s.iter().all(|&u1| {
            u2s.iter().all(|&u2| {
                let w = f.inv(u1).unwrap();
                let p = pfister2(&f, &[f.sub(t, u2), w]);
                let coeffs: Vec<FieldElem> = p.iter().flat_map(|&x| [x, f.neg(f.mul(x, c))]).collect();
                nonzero_form_isotropic(&f, &coeffs)
            })
        });
        assert_eq!(got, want);
    }
}

#[test]
fn algdep_template_is_total_and_matches_forms() {
    let phi = logic::emit_algdep_template(1, 2).unwrap();
    let f = FieldDesc::prime(3).unwrap();
    let mut b = Bindings::new();
    b.insert(L_PREDICATE.into(), Lambda::parse("(= x x)").unwrap());
    for t in f.elements() {
        let env = Env::from_pairs(&[("t1", t)]);
        let got = logic::eval_with_budget(&phi, &f, &env, &b, u64::MAX).unwrap();
        let want = f.elements().all(|a| {
            f.elements().all(|bb| {
                f.elements().all(|c1| {
                    let p = pfister2(&f, &[f.sub(t, c1), a]);
                    let coeffs: Vec<FieldElem> = p.iter().flat_map(|&x| [x, f.neg(f.mul(x, bb))]).collect();
                    nonzero_form_isotropic(&f, &coeffs)
                })
            })
        });
        assert_eq!(got, want);
    }
    let cubic = logic::emit_algdep_template(1, 3).unwrap();
    assert_eq!(cubic.quantifier_counts(), (3, 18));
}

#[test]
fn t_family_is_ratios_of_s_family() {
    let f = FieldDesc::prime(7).unwrap();
    let s = logic::emit_s_family();
    let t = logic::emit_t_family();
    for (a, b) in [(1, 1), (0, 3), (2, 5)] {
        let (a, b) = (f.from_int(a), f.from_int(b));
        let in_s = |v: FieldElem| {
            logic::eval(&s, &f, &Env::from_pairs(&[("s", v), ("a", a), ("b", b)]), &Bindings::new()).unwrap()
        };
        let s_nonzero: Vec<FieldElem> = f.units().filter(|&v| in_s(v)).collect();
        for v in f.elements() {
            let got = logic::eval(&t, &f, &Env::from_pairs(&[("t", v), ("a", a), ("b", b)]), &Bindings::new()).unwrap();
            let want = s_nonzero.iter().any(|&s1| s_nonzero.iter().any(|&s2| f.mul(v, s2) == s1));
            assert_eq!(got, want);
        }
    }
}

#[test]
fn bindings_accept_both_spellings() {
    let phi = Formula::hole("P", &["a", "b"]);
    let f = FieldDesc::prime(5).unwrap();
    let env = Env::from_pairs(&[("a", f.from_int(2)), ("b", f.from_int(3))]);
    for src in ["(lambda (x y) (= (+ x 1) y))", "(= (+ x 1) y)"] {
        let mut b = Bindings::new();
        b.insert("P".into(), Lambda::parse(src).unwrap());
        assert!(logic::eval(&phi, &f, &env, &b).unwrap());
    }
}
