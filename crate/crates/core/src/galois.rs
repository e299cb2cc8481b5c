//! Finite fields `F_{p^k}` built as towers of simple extensions.
//!
//! A [`FieldDesc`] is an immutable, cheaply clonable descriptor. Elements are
//! small `Copy` values ([`FieldElem`]) holding a canonical integer code and the
//! structural tag of the field that produced them. Codes are base-`Q` numbers
//! whose digits are the coefficient codes over the base field (`Q` = order of the
//! base), so the code of an element is also its position in enumeration order
//! and embedding a subfield of the tower is the identity on codes.
//!
//! Multiplication goes through discrete log / exp tables built once per field.
//! Addition is digit-wise modulo `p` on the flattened code.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::sexp::{self, Sexp};

/// Default cap on the number of elements of any constructed field.
pub const DEFAULT_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible over the base field")]
    ReducibleModulus,
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("field of order {needed} exceeds the enumeration budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("bad element literal: {0}")]
    Literal(String),
}

/// An element of some [`FieldDesc`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    tag: u64,
    code: u32,
}

impl FieldElem {
    /// Canonical code: the element's index in [`FieldDesc::elements`] order.
    pub fn code(self) -> u32 {
        self.code
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.code)
    }
}

#[derive(Clone)]
pub struct FieldDesc(Arc<Inner>);

struct Inner {
    p: u32,
    /// Degree over the base field.
    degree: u32,
    /// Degree over the prime field.
    abs_degree: u32,
    order: u32,
    base: Option<FieldDesc>,
    /// Monic modulus over the base, low degree first, length `degree + 1`.
    modulus: Vec<u32>,
    tag: u64,
    /// `exp[i] = g^i` for `i < 2(q-1)`, so sums of two logs need no reduction.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.0.tag == other.0.tag
    }
}
impl Eq for FieldDesc {}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldDesc({})", self.spec())
    }
}

fn fnv(mut h: u64, x: u64) -> u64 {
    for b in x.to_le_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Trial-division primality test.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // these bases are deterministic for every n < 2^64
    'bases: for a in BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl FieldDesc {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<FieldDesc, GaloisError> {
        Self::prime_with_budget(p, DEFAULT_BUDGET)
    }

    pub fn prime_with_budget(p: u64, budget: u64) -> Result<FieldDesc, GaloisError> {
        if !is_prime_u64(p) {
            return Err(GaloisError::NotPrime(p));
        }
        if p > budget || p > u32::MAX as u64 / 2 {
            return Err(GaloisError::BudgetExceeded { needed: p as u128, budget });
        }
        let p32 = p as u32;
        let tag = fnv(fnv(0xcbf2_9ce4_8422_2325, p), 1);
        let mul = |a: u32, b: u32| ((a as u64 * b as u64) % p) as u32;
        let (exp, log) = build_tables(p32, mul);
        Ok(FieldDesc(Arc::new(Inner {
            p: p32,
            degree: 1,
            abs_degree: 1,
            order: p32,
            base: None,
            modulus: vec![0, 1],
            tag,
            exp,
            log,
        })))
    }

    /// Degree-`k` extension of `base`. With `modulus = None` the first monic
    /// irreducible polynomial in lexicographic order (highest non-leading
    /// coefficient most significant) is used.
    pub fn extension(
        base: &FieldDesc,
        k: u32,
        modulus: Option<&[FieldElem]>,
    ) -> Result<FieldDesc, GaloisError> {
        Self::extension_with_budget(base, k, modulus, DEFAULT_BUDGET)
    }

    pub fn extension_with_budget(
        base: &FieldDesc,
        k: u32,
        modulus: Option<&[FieldElem]>,
        budget: u64,
    ) -> Result<FieldDesc, GaloisError> {
        if k == 0 {
            return Err(GaloisError::InvalidModulus("degree must be positive".into()));
        }
        let bq = base.order() as u128;
        let needed = bq.pow(k);
        if needed > budget as u128 || needed > (u32::MAX / 2) as u128 {
            return Err(GaloisError::BudgetExceeded { needed, budget });
        }
        let modulus: Vec<u32> = match modulus {
            Some(m) => {
                if m.len() != k as usize + 1 {
                    return Err(GaloisError::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        k + 1,
                        m.len()
                    )));
                }
                for c in m {
                    base.check(*c).map_err(|_| {
                        GaloisError::InvalidModulus("coefficient outside the base field".into())
                    })?;
                }
                if m[k as usize] != base.one() {
                    return Err(GaloisError::InvalidModulus("modulus must be monic".into()));
                }
                let codes: Vec<u32> = m.iter().map(|c| c.code).collect();
                if !poly::is_irreducible(base, &codes) {
                    return Err(GaloisError::ReducibleModulus);
                }
                codes
            }
            None => first_irreducible(base, k),
        };
        let order = needed as u32;
        let mut tag = fnv(base.0.tag, k as u64);
        for c in &modulus {
            tag = fnv(tag, *c as u64);
        }
        let (exp, log) = {
            let b = base.clone();
            let m = modulus.clone();
            build_tables(order, move |x, y| poly::mul_mod_codes(&b, &m, x, y))
        };
        Ok(FieldDesc(Arc::new(Inner {
            p: base.0.p,
            degree: k,
            abs_degree: base.0.abs_degree * k,
            order,
            base: Some(base.clone()),
            modulus,
            tag,
            exp,
            log,
        })))
    }

    /// `F_{p^k}` as a single extension of `F_p`.
    pub fn galois(p: u64, k: u32) -> Result<FieldDesc, GaloisError> {
        let fp = Self::prime(p)?;
        if k == 1 {
            Ok(fp)
        } else {
            Self::extension(&fp, k, None)
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p as u64
    }
    pub fn order(&self) -> u64 {
        self.0.order as u64
    }
    pub fn degree(&self) -> u32 {
        self.0.degree
    }
    pub fn absolute_degree(&self) -> u32 {
        self.0.abs_degree
    }
    pub fn base(&self) -> Option<&FieldDesc> {
        self.0.base.as_ref()
    }
    pub fn is_prime_field(&self) -> bool {
        self.0.base.is_none()
    }
    pub fn tag(&self) -> u64 {
        self.0.tag
    }

    /// Modulus coefficients as base-field elements, low degree first.
    pub fn modulus(&self) -> Vec<FieldElem> {
        match &self.0.base {
            None => vec![self.zero(), self.one()],
            Some(b) => self.0.modulus.iter().map(|&c| b.elem_unchecked(c)).collect(),
        }
    }

    /// Chain of fields from the prime field up to `self`.
    pub fn tower(&self) -> Vec<FieldDesc> {
        let mut out = vec![self.clone()];
        while let Some(b) = out.last().unwrap().base() {
            let b = b.clone();
            out.push(b);
        }
        out.reverse();
        out
    }

    /// Tower degrees, e.g. `[2, 2]` for `F_16` built over `F_4`.
    pub fn tower_degrees(&self) -> Vec<u32> {
        self.tower().iter().skip(1).map(|f| f.degree()).collect()
    }

    /// Compact description such as `5`, `5^2` or `2^2^2`.
    pub fn spec(&self) -> String {
        let mut s = self.0.p.to_string();
        for d in self.tower_degrees() {
            s.push('^');
            s.push_str(&d.to_string());
        }
        s
    }

    /// Whether `sub` is a field of this tower (including `self`).
    pub fn has_subfield(&self, sub: &FieldDesc) -> bool {
        self.tower().iter().any(|f| f == sub)
    }

    fn elem_unchecked(&self, code: u32) -> FieldElem {
        FieldElem { tag: self.0.tag, code }
    }

    pub fn zero(&self) -> FieldElem {
        self.elem_unchecked(0)
    }
    pub fn one(&self) -> FieldElem {
        self.elem_unchecked(1)
    }

    pub fn from_code(&self, code: u32) -> Result<FieldElem, GaloisError> {
        if code < self.0.order {
            Ok(self.elem_unchecked(code))
        } else {
            Err(GaloisError::Literal(format!("code {code} out of range for field of order {}", self.0.order)))
        }
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElem {
        self.elem_unchecked(n.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn contains(&self, x: FieldElem) -> bool {
        x.tag == self.0.tag
    }

    pub fn check(&self, x: FieldElem) -> Result<FieldElem, GaloisError> {
        if self.contains(x) {
            Ok(x)
        } else {
            Err(GaloisError::FieldMismatch)
        }
    }

    #[inline]
    fn assert_owns(&self, x: FieldElem) {
        assert!(x.tag == self.0.tag, "field element used with a foreign field");
    }

    /// Build an element from its coefficients over the base field.
    pub fn from_coeffs(&self, coeffs: &[FieldElem]) -> Result<FieldElem, GaloisError> {
        let base = match &self.0.base {
            None => {
                return match coeffs {
                    [c] => self.check(*c),
                    _ => Err(GaloisError::Literal("prime field element takes one coefficient".into())),
                }
            }
            Some(b) => b,
        };
        if coeffs.len() != self.0.degree as usize {
            return Err(GaloisError::Literal(format!(
                "expected {} coefficients, got {}",
                self.0.degree,
                coeffs.len()
            )));
        }
        let q = base.0.order;
        let mut code = 0u32;
        for c in coeffs.iter().rev() {
            base.check(*c)?;
            code = code * q + c.code;
        }
        Ok(self.elem_unchecked(code))
    }

    /// Coefficients over the base field, low degree first.
    pub fn coeffs(&self, x: FieldElem) -> Vec<FieldElem> {
        self.assert_owns(x);
        match &self.0.base {
            None => vec![x],
            Some(b) => {
                let q = b.0.order;
                let mut c = x.code;
                (0..self.0.degree)
                    .map(|_| {
                        let e = b.elem_unchecked(c % q);
                        c /= q;
                        e
                    })
                    .collect()
            }
        }
    }

    /// Include an element of a subfield of the tower.
    pub fn embed(&self, x: FieldElem) -> Result<FieldElem, GaloisError> {
        if self.tower().iter().any(|f| f.contains(x)) {
            Ok(self.elem_unchecked(x.code))
        } else {
            Err(GaloisError::FieldMismatch)
        }
    }

    /// Inverse of [`embed`](Self::embed): `Some` iff `x` lies in `sub`.
    pub fn restrict(&self, sub: &FieldDesc, x: FieldElem) -> Result<Option<FieldElem>, GaloisError> {
        self.check(x)?;
        if !self.has_subfield(sub) {
            return Err(GaloisError::FieldMismatch);
        }
        Ok((x.code < sub.0.order).then(|| sub.elem_unchecked(x.code)))
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.0.order).map(move |c| self.elem_unchecked(c))
    }

    /// Nonzero elements in code order.
    pub fn units(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (1..self.0.order).map(move |c| self.elem_unchecked(c))
    }

    pub fn is_zero(&self, x: FieldElem) -> bool {
        self.assert_owns(x);
        x.code == 0
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.assert_owns(a);
        self.assert_owns(b);
        let p = self.0.p;
        let code = if p == 2 {
            a.code ^ b.code
        } else if self.0.abs_degree == 1 {
            (a.code + b.code) % p
        } else {
            let (mut x, mut y, mut place, mut r) = (a.code, b.code, 1u32, 0u32);
            while x > 0 || y > 0 {
                r += ((x % p + y % p) % p) * place;
                x /= p;
                y /= p;
                place = place.wrapping_mul(p);
            }
            r
        };
        self.elem_unchecked(code)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        self.assert_owns(a);
        let p = self.0.p;
        let code = if p == 2 {
            a.code
        } else if self.0.abs_degree == 1 {
            (p - a.code) % p
        } else {
            let (mut x, mut place, mut r) = (a.code, 1u32, 0u32);
            while x > 0 {
                r += ((p - x % p) % p) * place;
                x /= p;
                place = place.wrapping_mul(p);
            }
            r
        };
        self.elem_unchecked(code)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.assert_owns(a);
        self.assert_owns(b);
        if a.code == 0 || b.code == 0 {
            return self.zero();
        }
        let i = self.0.log[a.code as usize] + self.0.log[b.code as usize];
        self.elem_unchecked(self.0.exp[i as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, GaloisError> {
        self.check(a)?;
        if a.code == 0 {
            return Err(GaloisError::DivisionByZero);
        }
        let n = self.0.order - 1;
        let l = self.0.log[a.code as usize];
        Ok(self.elem_unchecked(self.0.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, GaloisError> {
        self.check(a)?;
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        self.assert_owns(a);
        if e == 0 {
            return self.one();
        }
        if a.code == 0 {
            return self.zero();
        }
        let n = (self.0.order - 1) as u64;
        let l = (self.0.log[a.code as usize] as u64 * (e % n)) % n;
        self.elem_unchecked(self.0.exp[l as usize])
    }

    pub fn try_add(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, GaloisError> {
        Ok(self.add(self.check(a)?, self.check(b)?))
    }
    pub fn try_sub(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, GaloisError> {
        Ok(self.sub(self.check(a)?, self.check(b)?))
    }
    pub fn try_mul(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, GaloisError> {
        Ok(self.mul(self.check(a)?, self.check(b)?))
    }

    /// `x ↦ x^Q` where `Q` is the order of the base field (the identity on a prime field).
    pub fn frobenius(&self, x: FieldElem) -> FieldElem {
        match &self.0.base {
            None => {
                self.assert_owns(x);
                x
            }
            Some(b) => self.pow(x, b.order()),
        }
    }

    /// `x ↦ x^|sub|` for a subfield `sub` of the tower.
    pub fn frobenius_over(&self, sub: &FieldDesc, x: FieldElem) -> Result<FieldElem, GaloisError> {
        self.check(x)?;
        if !self.has_subfield(sub) {
            return Err(GaloisError::FieldMismatch);
        }
        Ok(self.pow(x, sub.order()))
    }

    /// Whether `x = y^d` for some `y` in this field.
    pub fn is_dth_power(&self, x: FieldElem, d: u64) -> bool {
        self.assert_owns(x);
        if x.code == 0 {
            return true;
        }
        let n = self.order() - 1;
        let g = gcd_u64(d, n);
        self.pow(x, n / g) == self.one()
    }

    /// A square root of `x`, if one exists (the one with smaller log).
    pub fn sqrt(&self, x: FieldElem) -> Option<FieldElem> {
        self.assert_owns(x);
        if x.code == 0 {
            return Some(x);
        }
        if self.0.p == 2 {
            // squaring is bijective; x^(q/2) squares to x
            return Some(self.pow(x, self.order() / 2));
        }
        let l = self.0.log[x.code as usize];
        (l % 2 == 0).then(|| self.elem_unchecked(self.0.exp[(l / 2) as usize]))
    }

    /// The multiplicative generator used for the log tables.
    pub fn primitive_element(&self) -> FieldElem {
        self.elem_unchecked(self.0.exp[1.min(self.0.exp.len() - 1)])
    }

    /// Render in the literal syntax: an integer on a prime field,
    /// `(elt c0 c1 ...)` otherwise.
    pub fn format(&self, x: FieldElem) -> String {
        self.assert_owns(x);
        match &self.0.base {
            None => x.code.to_string(),
            Some(b) => {
                let parts: Vec<String> = self.coeffs(x).into_iter().map(|c| b.format(c)).collect();
                format!("(elt {})", parts.join(" "))
            }
        }
    }

    /// Parse the literal syntax. Integers are reduced mod `p`.
    pub fn parse_elem(&self, src: &str) -> Result<FieldElem, GaloisError> {
        let s = sexp::parse(src).map_err(|e| GaloisError::Literal(e.to_string()))?;
        self.elem_from_sexp(&s)
    }

    pub fn elem_from_sexp(&self, s: &Sexp) -> Result<FieldElem, GaloisError> {
        match s {
            Sexp::Atom { text, .. } => {
                let n: i64 = text
                    .parse()
                    .map_err(|_| GaloisError::Literal(format!("not an integer: {text}")))?;
                Ok(self.from_int(n))
            }
            Sexp::List { items, .. } => {
                if s.head() != Some("elt") {
                    return Err(GaloisError::Literal(format!("expected (elt ...), got {s}")));
                }
                let base = self
                    .base()
                    .ok_or_else(|| GaloisError::Literal("(elt ...) on a prime field".into()))?;
                let coeffs = items[1..]
                    .iter()
                    .map(|c| base.elem_from_sexp(c))
                    .collect::<Result<Vec<_>, _>>()?;
                self.from_coeffs(&coeffs)
            }
        }
    }
}

/// Parse a field spec: `p`, `p^k`, or a tower `p^k1^k2...`.
pub fn parse_field_spec(spec: &str) -> Result<FieldDesc, GaloisError> {
    let mut parts = spec.trim().split('^');
    let p: u64 = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| GaloisError::Literal(format!("bad field spec {spec:?}")))?;
    let mut f = FieldDesc::prime(p)?;
    for d in parts {
        let k: u32 = d
            .trim()
            .parse()
            .map_err(|_| GaloisError::Literal(format!("bad field spec {spec:?}")))?;
        if k > 1 {
            f = FieldDesc::extension(&f, k, None)?;
        }
    }
    Ok(f)
}

fn first_irreducible(base: &FieldDesc, k: u32) -> Vec<u32> {
    let q = base.order();
    let count = q.pow(k);
    for m in 0..count {
        let mut c = m;
        let mut codes: Vec<u32> = (0..k)
            .map(|_| {
                let d = (c % q) as u32;
                c /= q;
                d
            })
            .collect();
        codes.push(1);
        if poly::is_irreducible(base, &codes) {
            return codes;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over a finite field")
}

fn build_tables(order: u32, mul: impl Fn(u32, u32) -> u32) -> (Vec<u32>, Vec<u32>) {
    let n = order - 1;
    if n == 1 {
        return (vec![1, 1], vec![0, 0]);
    }
    let factors = distinct_prime_factors(n as u64);
    let pow = |mut b: u32, mut e: u64| {
        let mut r = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let g = (2..order)
        .find(|&g| factors.iter().all(|&r| pow(g, n as u64 / r) != 1))
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; 2 * n as usize];
    let mut log = vec![0u32; order as usize];
    let mut x = 1u32;
    for i in 0..n {
        exp[i as usize] = x;
        exp[(i + n) as usize] = x;
        log[x as usize] = i;
        x = mul(x, g);
    }
    (exp, log)
}

/// Dense polynomials over a field, coefficients as codes, low degree first.
/// Only what the irreducibility test and table construction need.
mod poly {
    use super::FieldDesc;

    fn e(f: &FieldDesc, c: u32) -> super::FieldElem {
        f.elem_unchecked(c)
    }

    fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub(super) fn rem(f: &FieldDesc, a: &[u32], m: &[u32]) -> Vec<u32> {
        let mut a = a.to_vec();
        trim(&mut a);
        let mut m = m.to_vec();
        trim(&mut m);
        let dm = m.len() - 1;
        let lead_inv = f.inv(e(f, m[dm])).expect("nonzero leading coefficient");
        while a.len() > dm {
            let top = a.len() - 1;
            let c = f.mul(e(f, a[top]), lead_inv);
            let shift = top - dm;
            for (i, &mc) in m.iter().enumerate() {
                let t = f.mul(c, e(f, mc));
                a[shift + i] = f.sub(e(f, a[shift + i]), t).code();
            }
            trim(&mut a);
        }
        a
    }

    pub(super) fn mul(f: &FieldDesc, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let t = f.mul(e(f, x), e(f, y));
                r[i + j] = f.add(e(f, r[i + j]), t).code();
            }
        }
        trim(&mut r);
        r
    }

    fn gcd(f: &FieldDesc, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(f, &a, &b);
            a = b;
            b = r;
        }
        a
    }

    fn pow_mod(f: &FieldDesc, base: &[u32], mut e: u64, m: &[u32]) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut b = rem(f, base, m);
        while e > 0 {
            if e & 1 == 1 {
                result = rem(f, &mul(f, &result, &b), m);
            }
            b = rem(f, &mul(f, &b, &b), m);
            e >>= 1;
        }
        result
    }

    /// Ben-Or: a monic `m` of degree `k` is irreducible iff
    /// `gcd(x^(Q^i) - x, m) = 1` for `1 <= i <= k/2`.
    pub(super) fn is_irreducible(f: &FieldDesc, m: &[u32]) -> bool {
        let k = m.len() - 1;
        if k == 1 {
            return true;
        }
        if m[0] == 0 {
            return false;
        }
        let x = vec![0u32, 1];
        let mut h = x.clone();
        for _ in 0..k / 2 {
            h = pow_mod(f, &h, f.order(), m);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = f.sub(e(f, diff[1]), f.one()).code();
            trim(&mut diff);
            let g = gcd(f, &diff, m);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

    /// Multiply two extension elements given as codes, reducing by `modulus`.
    pub(super) fn mul_mod_codes(base: &FieldDesc, modulus: &[u32], x: u32, y: u32) -> u32 {
        let q = base.order() as u32;
        let k = modulus.len() - 1;
        let digits = |mut c: u32| {
            (0..k)
                .map(|_| {
                    let d = c % q;
                    c /= q;
                    d
                })
                .collect::<Vec<_>>()
        };
        let r = rem(base, &mul(base, &digits(x), &digits(y)), modulus);
        r.iter().rev().fold(0u32, |acc, &d| acc * q + d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldDesc {
        FieldDesc::prime(p).unwrap()
    }

    #[test]
    fn prime_fields() {
        assert_eq!(f(5).order(), 5);
        assert_eq!(f(5).elements().count(), 5);
        let f2 = f(2);
        assert_eq!(f2.elements().map(|e| e.code()).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(FieldDesc::prime(6).unwrap_err(), GaloisError::NotPrime(6));
        assert_eq!(FieldDesc::prime(1).unwrap_err(), GaloisError::NotPrime(1));
    }

    #[test]
    fn f4_from_explicit_modulus() {
        let f2 = f(2);
        let m = [f2.one(), f2.one(), f2.one()];
        let f4 = FieldDesc::extension(&f2, 2, Some(&m)).unwrap();
        assert_eq!(f4.order(), 4);
        let x = f4.from_code(2).unwrap();
        // x^2 = x + 1
        assert_eq!(f4.mul(x, x).code(), 3);
    }

    #[test]
    fn reducible_modulus_rejected() {
        let f2 = f(2);
        let m = [f2.one(), f2.zero(), f2.one()];
        assert_eq!(
            FieldDesc::extension(&f2, 2, Some(&m)).unwrap_err(),
            GaloisError::ReducibleModulus
        );
    }

    #[test]
    fn non_monic_or_wrong_length_modulus_rejected() {
        let f3 = f(3);
        let m = [f3.one(), f3.zero(), f3.from_int(2)];
        assert!(matches!(
            FieldDesc::extension(&f3, 2, Some(&m)),
            Err(GaloisError::InvalidModulus(_))
        ));
        assert!(matches!(
            FieldDesc::extension(&f3, 2, Some(&m[..2])),
            Err(GaloisError::InvalidModulus(_))
        ));
    }

    #[test]
    fn searched_modulus_is_first_lexicographic() {
        // x^2 + 2 over F_5: x^2 and x^2 + 1 = (x-2)(x+2) come first and factor
        let f25 = FieldDesc::galois(5, 2).unwrap();
        let m: Vec<u32> = f25.modulus().iter().map(|c| c.code()).collect();
        assert_eq!(m, vec![2, 0, 1]);
        let f8 = FieldDesc::galois(2, 3).unwrap();
        let m: Vec<u32> = f8.modulus().iter().map(|c| c.code()).collect();
        assert_eq!(m, vec![1, 1, 0, 1]);
    }

    #[test]
    fn inverse_and_division_by_zero() {
        let f5 = f(5);
        assert_eq!(f5.inv(f5.from_int(2)).unwrap(), f5.from_int(3));
        assert_eq!(f5.inv(f5.zero()).unwrap_err(), GaloisError::DivisionByZero);
    }

    #[test]
    fn cross_field_operands_are_rejected() {
        let f5 = f(5);
        let f7 = f(7);
        assert_eq!(f5.try_add(f5.one(), f7.one()).unwrap_err(), GaloisError::FieldMismatch);
        assert_eq!(f5.inv(f7.one()).unwrap_err(), GaloisError::FieldMismatch);
        // structurally identical descriptors interoperate
        let again = f(5);
        assert_eq!(f5.try_mul(f5.one(), again.one()).unwrap(), f5.one());
    }

    #[test]
    fn dth_powers_in_f7() {
        let f7 = f(7);
        assert!(!f7.is_dth_power(f7.from_int(2), 3));
        let cubes: Vec<u32> = f7.elements().filter(|&x| f7.is_dth_power(x, 3)).map(|x| x.code()).collect();
        assert_eq!(cubes, vec![0, 1, 6]);
        for d in 1..6 {
            assert!(f7.is_dth_power(f7.one(), d));
        }
    }

    #[test]
    fn tower_embedding_and_frobenius() {
        let f4 = FieldDesc::galois(2, 2).unwrap();
        let f16 = FieldDesc::extension(&f4, 2, None).unwrap();
        assert_eq!(f16.order(), 16);
        assert_eq!(f16.tower_degrees(), vec![2, 2]);
        assert_eq!(f16.spec(), "2^2^2");
        let w = f4.from_code(2).unwrap();
        let we = f16.embed(w).unwrap();
        assert_eq!(we.code(), 2);
        assert_eq!(f16.frobenius(we), we);
        assert_eq!(f16.restrict(&f4, we).unwrap(), Some(w));
        let y = f16.from_code(7).unwrap();
        assert_eq!(f16.restrict(&f4, y).unwrap(), None);
        assert_ne!(f16.frobenius(y), y);
        assert_eq!(f16.frobenius(f16.frobenius(y)), y);
        // embedding commutes with products
        let v = f4.from_code(3).unwrap();
        assert_eq!(f16.embed(f4.mul(w, v)).unwrap(), f16.mul(we, f16.embed(v).unwrap()));
    }

    #[test]
    fn literals_round_trip() {
        let f4 = FieldDesc::galois(2, 2).unwrap();
        let f16 = FieldDesc::extension(&f4, 2, None).unwrap();
        for x in f16.elements() {
            let s = f16.format(x);
            assert_eq!(f16.parse_elem(&s).unwrap(), x, "{s}");
        }
        let f5 = f(5);
        assert_eq!(f5.parse_elem("-1").unwrap(), f5.from_int(4));
        assert_eq!(f5.parse_elem("7").unwrap(), f5.from_int(2));
        assert!(f5.parse_elem("(elt 1 2)").is_err());
        let f25 = FieldDesc::galois(5, 2).unwrap();
        assert_eq!(f25.format(f25.from_code(7).unwrap()), "(elt 2 1)");
        assert!(f25.parse_elem("(elt 1 2 3)").is_err());
    }

    #[test]
    fn field_spec_parsing() {
        assert_eq!(parse_field_spec("7").unwrap().order(), 7);
        assert_eq!(parse_field_spec("3^3").unwrap().order(), 27);
        assert_eq!(parse_field_spec("2^2^2").unwrap().tower_degrees(), vec![2, 2]);
        assert!(parse_field_spec("x").is_err());
        assert!(parse_field_spec("6").is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let f2 = f(2);
        assert!(matches!(
            FieldDesc::extension_with_budget(&f2, 11, None, 1 << 10),
            Err(GaloisError::BudgetExceeded { .. })
        ));
        assert!(FieldDesc::extension_with_budget(&f2, 10, None, 1 << 10).is_ok());
    }

    #[test]
    fn sqrt_agrees_with_squaring() {
        for field in [f(7), FieldDesc::galois(3, 2).unwrap(), FieldDesc::galois(2, 3).unwrap()] {
            for x in field.elements() {
                let is_square = field.elements().any(|y| field.mul(y, y) == x);
                match field.sqrt(x) {
                    Some(r) => assert_eq!(field.mul(r, r), x),
                    None => assert!(!is_square),
                }
            }
        }
    }
}
