//! Invariant suite with a deterministic JSON report. The check functions are
//! public so integration tests can run them at full size.

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::curves::Curve;
use crate::forms::{self, DiagonalForm, FalsifyConfig, SearchMode};
use crate::galois::FieldDesc;
use crate::logic::{self, Bindings, Env, Formula, Lambda, Z_PREDICATE};
use crate::mersenne;
use crate::modgen;
use crate::zsum;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 0x5eed_0001;

/// Field orders up to 49.
pub const SMALL_ORDERS: [u64; 23] =
    [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32, 37, 41, 43, 47, 49];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestConfig {
    pub seed: u64,
    pub trials: u64,
    pub precision: usize,
    pub random_formulas: usize,
    pub char0_max_order: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { seed: DEFAULT_SEED, trials: 10_000, precision: 8, random_formulas: 1000, char0_max_order: 49 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub schema_version: u32,
    pub config: SelftestConfig,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl SelftestReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn field(q: u64) -> FieldDesc {
    let (p, k) = prime_power(q).expect("prime power");
    FieldDesc::galois(p, k).expect("valid field")
}

/// `q = p^k` with `p` prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut k = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// Ordinary fixture curves as `(q, codes a1..a6)`. The last one has trace 2,
/// the rest trace 1.
pub const ORDINARY_FIXTURES: [(u64, [u32; 5]); 7] = [
    (2, [1, 0, 1, 0, 1]),
    (3, [0, 1, 0, 0, 2]),
    (4, [1, 0, 0, 0, 2]),
    (5, [0, 0, 0, 3, 2]),
    (7, [0, 0, 0, 0, 5]),
    (9, [0, 1, 0, 0, 3]),
    (5, [0, 0, 0, 1, 0]),
];

pub fn fixture_curves() -> Vec<Curve> {
    ORDINARY_FIXTURES.iter().map(|&(q, codes)| Curve::from_codes(&field(q), codes).expect("nonsingular fixture")).collect()
}

/// `(l, recurrence count, enumerated count)` for each `l`.
pub fn extension_counts(curve: &Curve, ells: &[u32]) -> Vec<(u32, BigInt, BigInt)> {
    let fd = curve.frobenius_trace().expect("countable");
    ells.iter()
        .map(|&l| {
            let ext = if l == 1 { curve.field().clone() } else { FieldDesc::extension(curve.field(), l, None).unwrap() };
            let n = curve.base_change(&ext).unwrap().count_points().unwrap();
            (l, fd.count_over_extension(l), BigInt::from(n))
        })
        .collect()
}

/// Agreement of the emitted represents-zero formula with exhaustive
/// `find_zero` over every form `<c_1..c_n>_d` with unit coefficients.
/// Returns `(forms checked, disagreeing literals)`.
pub fn represents_zero_agreement(f: &FieldDesc, d: u32, n: usize) -> (u64, Vec<String>) {
    let phi = logic::emit_represents_zero(n, d);
    let units: Vec<_> = f.units().collect();
    let names: Vec<String> = (1..=n).map(|i| format!("c{i}")).collect();
    let mut checked = 0;
    let mut bad = Vec::new();
    let total = units.len().pow(n as u32);
    for idx in 0..total {
        let mut c = idx;
        let mut coeffs = Vec::with_capacity(n);
        for _ in 0..n {
            coeffs.push(units[c % units.len()]);
            c /= units.len();
        }
        let env = Env::from_pairs(&names.iter().map(|s| s.as_str()).zip(coeffs.iter().copied()).collect::<Vec<_>>());
        let by_eval = logic::eval(&phi, f, &env, &Bindings::new()).expect("within budget");
        let form = DiagonalForm::new(f, d, coeffs).expect("unit coefficients");
        let by_search = forms::find_zero(&form, SearchMode::exhaustive()).expect("within budget").is_isotropic();
        checked += 1;
        if by_eval != by_search {
            bad.push(form.literal());
        }
    }
    (checked, bad)
}

/// Fixed catalogue plus `random` seeded unary formulas in `x`.
pub fn char0_bindings(seed: u64, random: usize) -> Vec<(String, Lambda)> {
    let mut out: Vec<(String, Lambda)> = logic::unary_catalogue()
        .into_iter()
        .map(|(name, phi)| (name.to_string(), Lambda::new(&["x"], phi)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free = vec!["x".to_string()];
    for i in 0..random {
        let phi = logic::random_formula(&mut rng, &free, 3, 1);
        out.push((format!("random_{i}"), Lambda::new(&["x"], phi)));
    }
    out
}

/// Bindings under which the characteristic-0 sentence holds over `f`.
pub fn char0_exceptions(f: &FieldDesc, bindings: &[(String, Lambda)]) -> Vec<String> {
    let phi = logic::emit_char0_sentence(Z_PREDICATE);
    let mut bad = Vec::new();
    for (name, lam) in bindings {
        let mut b = Bindings::new();
        b.insert(Z_PREDICATE.to_string(), lam.clone());
        match logic::eval_with_budget(&phi, f, &Env::new(), &b, u64::MAX) {
            Ok(false) => {}
            Ok(true) => bad.push(name.clone()),
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    bad
}

/// Double negation and quantifier duality on seeded random formulas over
/// `F_2, F_3, F_5`, plus print/parse round trips. Returns the failures.
pub fn duality_failures(seed: u64, count: usize) -> Vec<String> {
    let fields = [field(2), field(3), field(5)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let free = vec!["a".to_string()];
    for i in 0..count {
        let f = &fields[i % 3];
        let body = logic::random_formula(&mut rng, &["a".to_string(), "x".to_string()], 4, 2);
        let printed = body.to_string();
        if logic::parse_formula(&printed).as_ref() != Ok(&body) {
            bad.push(format!("round trip: {printed}"));
        }
        let lhs = Formula::exists("x", body.clone()).not();
        let rhs = Formula::forall("x", body.clone().not());
        let dbl = body.clone().not().not();
        for a in f.elements() {
            let env = Env::from_pairs(&[(free[0].as_str(), a)]);
            let none = Bindings::new();
            let l = logic::eval(&lhs, f, &env, &none);
            let r = logic::eval(&rhs, f, &env, &none);
            if l != r {
                bad.push(format!("duality over F_{}: {printed}", f.order()));
            }
            let mut env_x = env.clone();
            env_x.set("x", a);
            if logic::eval(&dbl, f, &env_x, &none) != logic::eval(&body, f, &env_x, &none) {
                bad.push(format!("double negation over F_{}: {printed}", f.order()));
            }
        }
    }
    bad
}

/// Residue-anisotropic fixtures for the valuation certificate, as
/// `(q, d, coefficients)`: `<1,-2>/F_5`, `<1,-3>_3/F_7`, `<1,-3>/F_7`.
pub const DVR_FIXTURES: [(u64, u32, [i64; 2]); 3] = [(5, 2, [1, -2]), (7, 3, [1, -3]), (7, 2, [1, -3])];

pub fn residue_form(q: u64, d: u32, coeffs: &[i64]) -> DiagonalForm<FieldDesc> {
    let f = field(q);
    DiagonalForm::new(&f, d, coeffs.iter().map(|&c| f.from_int(c)).collect()).expect("unit coefficients")
}

fn check(name: &str, pass: bool, detail: Value) -> Check {
    Check { name: name.to_string(), pass, detail }
}

pub fn run(cfg: &SelftestConfig) -> SelftestReport {
    let mut checks = Vec::new();

    // extension counts
    let mut rows = Vec::new();
    let mut ok = true;
    for c in fixture_curves() {
        for (l, rec, en) in extension_counts(&c, &[1, 2, 3]) {
            ok &= rec == en;
            rows.push(json!({"curve": c.literal(), "q": c.field().order(), "ell": l, "recurrence": rec.to_string(), "enumerated": en.to_string()}));
        }
    }
    checks.push(check("extension_counts", ok, Value::Array(rows)));

    // mersenne scan
    let mut rows = Vec::new();
    let mut ok = true;
    for c in fixture_curves() {
        let fd = c.frobenius_trace().unwrap();
        let entry = match mersenne::mersenne_scan(&fd, 13) {
            Ok(scan) => {
                let two = mersenne::at_most_two_check(&scan);
                let bound = mersenne::psi_sum_bound_report(&scan, 13);
                let pass = matches!(&two, Ok(r) if r.pass) && matches!(&bound, Ok(r) if r.holds);
                ok &= pass;
                let min = mersenne::min_psi(&scan).map(|(l, v)| json!({"ell": l, "psi": v.to_string()}));
                json!({"curve": c.literal(), "q": fd.q, "t": fd.t, "pass": pass, "min_psi": min,
                       "psi_sum": bound.map(|b| b.to_json()).unwrap_or(Value::Null)})
            }
            Err(e) => {
                ok = false;
                json!({"curve": c.literal(), "error": e.to_string()})
            }
        };
        rows.push(entry);
    }
    checks.push(check("mersenne", ok, Value::Array(rows)));

    // generation fraction, small instances
    let mut rows = Vec::new();
    let mut ok = true;
    for c in fixture_curves() {
        let q = c.field().order();
        for ell in 1..=3u32 {
            if q.pow(ell) > 2000 {
                continue;
            }
            match modgen::generation_fraction(&c, ell) {
                Ok(r) => {
                    ok &= !r.falsified();
                    rows.push(serde_json::to_value(&r).unwrap());
                }
                Err(e) => {
                    ok = false;
                    rows.push(json!({"curve": c.literal(), "ell": ell, "error": e.to_string()}));
                }
            }
        }
    }
    checks.push(check("generation", ok, Value::Array(rows)));

    // springer
    let mut rows = Vec::new();
    let mut ok = true;
    for (d, q, k) in [(2u32, 3u64, 3u32), (3, 2, 2)] {
        let r = forms::springer_experiment(d, &field(q), k, 2, forms_budget()).unwrap();
        ok &= r.pass();
        rows.push(serde_json::to_value(&r).unwrap());
    }
    checks.push(check("springer", ok, Value::Array(rows)));

    // chevalley-warning
    let mut rows = Vec::new();
    let mut ok = true;
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let r = forms::chevalley_warning_check(&field(q), forms_budget()).unwrap();
        ok &= r.pass();
        rows.push(serde_json::to_value(&r).unwrap());
    }
    checks.push(check("chevalley_warning", ok, Value::Array(rows)));

    // valuation certificates
    let mut rows = Vec::new();
    let mut ok = true;
    let fcfg = FalsifyConfig::new(cfg.trials, cfg.precision, cfg.seed);
    for (q, d, coeffs) in DVR_FIXTURES {
        let cert = forms::dvr_anisotropy_check(&residue_form(q, d, &coeffs), fcfg).unwrap();
        ok &= cert.conclusion == forms::Conclusion::Anisotropic
            && cert.falsification.as_ref().is_some_and(|f| f.witnesses_found == 0);
        rows.push(serde_json::to_value(&cert).unwrap());
    }
    let control = forms::dvr_anisotropy_check(&residue_form(5, 2, &[1, 1]), fcfg).unwrap();
    ok &= control.conclusion == forms::Conclusion::IsotropicWithWitness;
    rows.push(serde_json::to_value(&control).unwrap());
    checks.push(check("dvr", ok, Value::Array(rows)));

    // evaluator vs zero search
    let mut rows = Vec::new();
    let mut ok = true;
    for q in [3, 5] {
        for d in [2, 3] {
            for n in 1..=3 {
                let (checked, bad) = represents_zero_agreement(&field(q), d, n);
                ok &= bad.is_empty();
                rows.push(json!({"q": q, "d": d, "n": n, "forms": checked, "disagreements": bad}));
            }
        }
    }
    checks.push(check("represents_zero", ok, Value::Array(rows)));

    // characteristic sentence
    let bindings = char0_bindings(cfg.seed, 100);
    let mut rows = Vec::new();
    let mut ok = true;
    for q in SMALL_ORDERS.iter().copied().filter(|&q| q <= cfg.char0_max_order) {
        let bad = char0_exceptions(&field(q), &bindings);
        ok &= bad.is_empty();
        rows.push(json!({"q": q, "bindings": bindings.len(), "exceptions": bad}));
    }
    checks.push(check("char0_sentence", ok, Value::Array(rows)));

    // z-sums
    let f5 = zsum::z_sum_report(&Curve::from_ints(&field(5), [0, 0, 0, 1, 0]).unwrap(), 1).unwrap();
    let f17 = zsum::z_sum_report(&Curve::from_ints(&field(17), [0, 0, 0, 0, 1]).unwrap(), 1).unwrap();
    let ok = f5.missing == ["1", "2", "3", "4"] && f17.covered;
    checks.push(check("zsum", ok, json!([f5, f17])));

    // logic invariants
    let bad = duality_failures(cfg.seed, cfg.random_formulas);
    checks.push(check("logic_duality", bad.is_empty(), json!({"formulas": cfg.random_formulas, "failures": bad})));

    let pass = checks.iter().all(|c| c.pass);
    SelftestReport { schema_version: SCHEMA_VERSION, config: cfg.clone(), seed: cfg.seed, checks, pass }
}

fn forms_budget() -> u64 {
    1 << 24
}
