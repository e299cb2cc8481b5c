//! Near-primality statistic and generalized Mersenne scans.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::FrobeniusData;

/// Trial division covers primes below this bound.
pub const TRIAL_BOUND: u64 = 10_000;
/// Total Pollard-rho iterations allowed per call to [`factorize`].
pub const DEFAULT_RHO_BUDGET: u64 = 1 << 21;
pub const DEFAULT_LMAX: u32 = 60;
const MR_SEED: u64 = 0x6d65_7273_656e_6e65;
const MR_EXTRA_ROUNDS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MersenneError {
    #[error("composite cofactor {cofactor} resisted {budget} rho iterations")]
    FactorBudgetExceeded { partial: Vec<Factor>, cofactor: BigUint, budget: u64 },
    #[error("curve is not ordinary (t = {t}, p = {p})")]
    NotOrdinary { t: i64, p: u64 },
    #[error("row for ell = {0} has an incomplete factorization")]
    IncompleteFactorization(u32),
    #[error("rows do not cover every prime up to {0}")]
    MissingRows(u32),
    #[error("factorize needs n >= 1")]
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Factor {
    pub prime: BigUint,
    pub exp: u32,
    /// Set when primality rests on random Miller-Rabin bases (inputs above 2^64).
    pub probable: bool,
}

pub fn factorize(n: &BigUint) -> Result<Vec<Factor>, MersenneError> {
    factorize_with_budget(n, DEFAULT_RHO_BUDGET)
}

/// Sorted prime factorization: trial division, then Brent's rho with fixed
/// constants, with Miller-Rabin deciding when to stop splitting.
pub fn factorize_with_budget(n: &BigUint, budget: u64) -> Result<Vec<Factor>, MersenneError> {
    if n.is_zero() {
        return Err(MersenneError::Zero);
    }
    let mut found: BTreeMap<BigUint, (u32, bool)> = BTreeMap::new();
    let mut m = n.clone();
    for p in small_primes() {
        if m.is_one() {
            break;
        }
        let bp = BigUint::from(p);
        if &bp * &bp > m {
            break;
        }
        while (&m % &bp).is_zero() {
            m /= &bp;
            found.entry(bp.clone()).or_insert((0, false)).0 += 1;
        }
    }
    let mut stack = vec![m];
    let mut spent = 0u64;
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        match primality(&m) {
            Primality::Prime => {
                found.entry(m).or_insert((0, false)).0 += 1;
                continue;
            }
            Primality::Probable => {
                let e = found.entry(m).or_insert((0, true));
                e.0 += 1;
                e.1 = true;
                continue;
            }
            Primality::Composite => {}
        }
        if let Some(r) = perfect_square_root(&m) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        match rho(&m, budget.saturating_sub(spent), &mut spent) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => {
                let partial = collect(found);
                return Err(MersenneError::FactorBudgetExceeded { partial, cofactor: m, budget });
            }
        }
    }
    Ok(collect(found))
}

fn collect(found: BTreeMap<BigUint, (u32, bool)>) -> Vec<Factor> {
    found.into_iter().map(|(prime, (exp, probable))| Factor { prime, exp, probable }).collect()
}

fn small_primes() -> impl Iterator<Item = u64> {
    let n = TRIAL_BOUND as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.into_iter().enumerate().filter(|&(_, s)| s).map(|(i, _)| i as u64)
}

fn perfect_square_root(m: &BigUint) -> Option<BigUint> {
    let r = m.sqrt();
    (&r * &r == *m).then_some(r)
}

#[derive(Debug, PartialEq, Eq)]
enum Primality {
    Prime,
    Probable,
    Composite,
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn primality(n: &BigUint) -> Primality {
    if let Some(small) = n.to_u64() {
        return if crate::galois::is_prime_u64(small) { Primality::Prime } else { Primality::Composite };
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == nm1 {
            return false;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == nm1 {
                return false;
            }
        }
        true
    };
    for b in MR_BASES {
        if witness(&BigUint::from(b)) {
            return Primality::Composite;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(MR_SEED);
    let bits = n.bits();
    for _ in 0..MR_EXTRA_ROUNDS {
        let a = loop {
            let words: Vec<u64> = (0..bits.div_ceil(64)).map(|_| rng.gen()).collect();
            let cand = BigUint::from_slice(
                &words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect::<Vec<_>>(),
            ) % n;
            if cand > one && cand < nm1 {
                break cand;
            }
        };
        if witness(&a) {
            return Primality::Composite;
        }
    }
    Primality::Probable
}

/// Brent's variant of Pollard rho; tries `c = 1, 2, ...` until a proper
/// divisor appears or the iteration allowance runs out.
fn rho(n: &BigUint, allowance: u64, spent: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    if let Some(small) = n.to_u64() {
        return rho_u64(small, allowance, spent).map(BigUint::from);
    }
    let mut used = 0u64;
    let one = BigUint::one();
    for c in 1u64.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut g = one.clone();
        let mut r = 1u64;
        let m = 128u64;
        let mut q = one.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = m.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += steps;
                used += steps;
            }
            r *= 2;
            if used >= allowance {
                *spent += used;
                return None;
            }
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                used += 1;
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            *spent += used;
            return Some(g);
        }
        if used >= allowance {
            break;
        }
    }
    *spent += used;
    None
}

fn rho_u64(n: u64, allowance: u64, spent: &mut u64) -> Option<u64> {
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let mut used = 0u64;
    for c in 1u64..n {
        let f = |x: u64| ((mulmod(x, x) as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut ys) = (0u64, 2u64, 2u64);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let m = 128u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = m.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y));
                }
                g = q.gcd(&n);
                k += steps;
                used += steps;
            }
            r *= 2;
            if used >= allowance {
                *spent += used;
                return None;
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                used += 1;
                if g != 1 {
                    break;
                }
            }
        }
        if g != n {
            *spent += used;
            return Some(g);
        }
        if used >= allowance {
            break;
        }
    }
    *spent += used;
    None
}

/// `sum 1/p` over the distinct primes of a factorization.
pub fn psi_of_factors(factors: &[Factor]) -> BigRational {
    factors.iter().fold(BigRational::zero(), |acc, f| {
        acc + BigRational::new(1.into(), f.prime.clone().into())
    })
}

pub fn psi(n: &BigUint) -> Result<BigRational, MersenneError> {
    Ok(psi_of_factors(&factorize(n)?))
}

pub fn psi_u64(n: u64) -> Result<BigRational, MersenneError> {
    psi(&BigUint::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiValue {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for PsiValue {
    fn from(r: &BigRational) -> Self {
        PsiValue { num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MersenneRow {
    pub ell: u32,
    pub e_ell: BigUint,
    /// Complete factorization, or the primes found before the budget ran out.
    pub factors: Vec<Factor>,
    /// Unsplit composite left over when the budget ran out.
    pub cofactor: Option<BigUint>,
    pub psi: Option<BigRational>,
}

impl MersenneRow {
    pub fn complete(&self) -> bool {
        self.cofactor.is_none()
    }

    pub fn from_factors(ell: u32, e_ell: BigUint, factors: Vec<Factor>) -> MersenneRow {
        let psi = Some(psi_of_factors(&factors));
        MersenneRow { ell, e_ell, factors, cofactor: None, psi }
    }

    pub fn to_json(&self) -> RowJson {
        RowJson {
            ell: self.ell,
            e_ell: self.e_ell.to_string(),
            factors: self.factors.iter().map(|f| (f.prime.to_string(), f.exp)).collect(),
            probable_primes: self.factors.iter().filter(|f| f.probable).map(|f| f.prime.to_string()).collect(),
            cofactor: self.cofactor.as_ref().map(|c| c.to_string()),
            psi: self.psi.as_ref().map(PsiValue::from),
            complete: self.complete(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowJson {
    pub ell: u32,
    pub e_ell: String,
    pub factors: Vec<(String, u32)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probable_primes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cofactor: Option<String>,
    pub psi: Option<PsiValue>,
    pub complete: bool,
}

pub fn primes_up_to(n: u32) -> Vec<u32> {
    (2..=n).filter(|&l| crate::galois::is_prime_u64(l as u64)).collect()
}

/// `e_l = #E(F_{q^l}) / #E(F_q)`.
pub fn e_ell(fd: &FrobeniusData, ell: u32) -> BigUint {
    let big = fd.count_over_extension(ell);
    let n1 = fd.count_over_extension(1);
    let (quo, rem) = big.div_rem(&n1);
    assert!(rem.is_zero(), "#E(F_q) must divide #E(F_q^l)");
    quo.to_biguint().expect("point counts are positive")
}

/// One row per prime `l <= lmax`. Rows whose factorization exceeds the budget
/// are kept with `complete = false`.
pub fn mersenne_scan(fd: &FrobeniusData, lmax: u32) -> Result<Vec<MersenneRow>, MersenneError> {
    mersenne_scan_with_budget(fd, lmax, DEFAULT_RHO_BUDGET)
}

pub fn mersenne_scan_with_budget(
    fd: &FrobeniusData,
    lmax: u32,
    budget: u64,
) -> Result<Vec<MersenneRow>, MersenneError> {
    if !fd.ordinary {
        return Err(MersenneError::NotOrdinary { t: fd.t, p: fd.p });
    }
    let mut rows = Vec::new();
    for ell in primes_up_to(lmax) {
        let e = e_ell(fd, ell);
        let row = match factorize_with_budget(&e, budget) {
            Ok(factors) => MersenneRow::from_factors(ell, e, factors),
            Err(MersenneError::FactorBudgetExceeded { partial, cofactor, .. }) => {
                MersenneRow { ell, e_ell: e, factors: partial, cofactor: Some(cofactor), psi: None }
            }
            Err(other) => return Err(other),
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Smallest Psi over the complete rows, with its `l`.
pub fn min_psi(rows: &[MersenneRow]) -> Option<(u32, BigRational)> {
    rows.iter()
        .filter_map(|r| r.psi.as_ref().map(|p| (r.ell, p.clone())))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtMostTwoReport {
    pub pass: bool,
    /// Primes dividing three or more of the `e_l`, with the `l` values.
    pub offenders: Vec<(String, Vec<u32>)>,
    pub primes_checked: usize,
}

pub fn at_most_two_check(rows: &[MersenneRow]) -> Result<AtMostTwoReport, MersenneError> {
    let mut seen: BTreeMap<BigUint, Vec<u32>> = BTreeMap::new();
    for r in rows {
        if !r.complete() {
            return Err(MersenneError::IncompleteFactorization(r.ell));
        }
        for f in &r.factors {
            let ells = seen.entry(f.prime.clone()).or_default();
            if !ells.contains(&r.ell) {
                ells.push(r.ell);
            }
        }
    }
    let offenders: Vec<(String, Vec<u32>)> = seen
        .iter()
        .filter(|(_, ells)| ells.len() > 2)
        .map(|(p, ells)| (p.to_string(), ells.clone()))
        .collect();
    Ok(AtMostTwoReport { pass: offenders.is_empty(), offenders, primes_checked: seen.len() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiSumReport {
    pub bound: u32,
    pub sum: BigRational,
    pub twice_psi_product: BigRational,
    pub holds: bool,
}

impl PsiSumReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "B": self.bound,
            "sum_psi": PsiValue::from(&self.sum),
            "twice_psi_product": PsiValue::from(&self.twice_psi_product),
            "sum_psi_approx": ratio_f64(&self.sum),
            "twice_psi_product_approx": ratio_f64(&self.twice_psi_product),
            "holds": self.holds,
        })
    }
}

/// Display-only float conversion.
pub fn ratio_f64(r: &BigRational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `sum_{l <= B} Psi(e_l)` against `2 Psi(prod_{l <= B} e_l)`, both exact.
/// The product's prime set is the union of the rows' prime sets.
pub fn psi_sum_bound_report(rows: &[MersenneRow], bound: u32) -> Result<PsiSumReport, MersenneError> {
    let mut sum = BigRational::zero();
    let mut primes: BTreeMap<BigUint, ()> = BTreeMap::new();
    for ell in primes_up_to(bound) {
        let row = rows.iter().find(|r| r.ell == ell).ok_or(MersenneError::MissingRows(bound))?;
        let psi = row.psi.as_ref().ok_or(MersenneError::IncompleteFactorization(ell))?;
        sum += psi;
        for f in &row.factors {
            primes.insert(f.prime.clone(), ());
        }
    }
    let psi_prod = primes
        .keys()
        .fold(BigRational::zero(), |acc, p| acc + BigRational::new(1.into(), p.clone().into()));
    let twice = psi_prod * BigRational::from_integer(2.into());
    let holds = sum <= twice;
    Ok(PsiSumReport { bound, sum, twice_psi_product: twice, holds })
}
