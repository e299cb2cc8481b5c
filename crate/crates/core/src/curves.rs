//! Long-form Weierstrass curves over finite fields.
//!
//! `y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6`, with the general
//! chord-tangent law so characteristics 2 and 3 need no special casing.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{FieldDesc, FieldElem, GaloisError, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("singular curve (discriminant is zero)")]
    SingularCurve,
    #[error("point does not lie on this curve")]
    CurveMismatch,
    #[error("point enumeration would visit {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("no ordinary curve found")]
    SearchExhausted,
    #[error("quadratic twists in characteristic 2 are not supported")]
    CharTwo,
    #[error("twisting needs a short model y^2 = x^3 + a x + b")]
    NotShortForm,
    #[error("f(u) = 0, twist is degenerate")]
    TwistDegenerate,
    #[error("z = y/x has a pole at this point")]
    PoleOfZ,
    #[error("bad curve literal: {0}")]
    Literal(String),
    #[error(transparent)]
    Field(#[from] GaloisError),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Point {
    Infinity,
    Affine { x: FieldElem, y: FieldElem },
}

impl Point {
    pub fn affine(x: FieldElem, y: FieldElem) -> Point {
        Point::Affine { x, y }
    }
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
    pub fn x(&self) -> Option<FieldElem> {
        match self {
            Point::Affine { x, .. } => Some(*x),
            Point::Infinity => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Curve {
    field: FieldDesc,
    a: [FieldElem; 5],
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Curve(F_{}: {})", self.field.spec(), self.literal())
    }
}

/// Trace data of a curve over its field of definition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusData {
    pub q: u64,
    pub p: u64,
    /// `#E(F_q)`
    pub n1: u64,
    /// `q + 1 - n1`
    pub t: i64,
    pub ordinary: bool,
}

impl FrobeniusData {
    pub fn new(q: u64, p: u64, n1: u64) -> FrobeniusData {
        let t = q as i64 + 1 - n1 as i64;
        FrobeniusData { q, p, n1, t, ordinary: t.rem_euclid(p as i64) != 0 }
    }

    /// Build from `(q, t)` directly; `p` is the characteristic.
    pub fn from_trace(q: u64, p: u64, t: i64) -> FrobeniusData {
        let n1 = (q as i64 + 1 - t) as u64;
        FrobeniusData { q, p, n1, t, ordinary: t.rem_euclid(p as i64) != 0 }
    }

    pub fn satisfies_hasse(&self) -> bool {
        (self.t as i128).pow(2) <= 4 * self.q as i128
    }

    /// `t_l = alpha^l + beta^l`, from `t_{j+1} = t t_j - q t_{j-1}`, `t_0 = 2`.
    pub fn trace_over_extension(&self, l: u32) -> BigInt {
        let t = BigInt::from(self.t);
        let q = BigInt::from(self.q);
        let mut prev = BigInt::from(2);
        let mut cur = t.clone();
        if l == 0 {
            return prev;
        }
        for _ in 1..l {
            let next = &t * &cur - &q * &prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `#E(F_{q^l}) = q^l + 1 - t_l`.
    pub fn count_over_extension(&self, l: u32) -> BigInt {
        assert!(l >= 1, "extension degree must be positive");
        BigInt::from(self.q).pow(l) + 1 - self.trace_over_extension(l)
    }
}

impl Curve {
    /// Curve from `[a1, a2, a3, a4, a6]`.
    pub fn new(field: &FieldDesc, a: [FieldElem; 5]) -> Result<Curve, CurveError> {
        for c in a {
            field.check(c)?;
        }
        let curve = Curve { field: field.clone(), a };
        if field.is_zero(curve.discriminant()) {
            return Err(CurveError::SingularCurve);
        }
        Ok(curve)
    }

    /// `y^2 = x^3 + a x + b`.
    pub fn short(field: &FieldDesc, a: FieldElem, b: FieldElem) -> Result<Curve, CurveError> {
        let z = field.zero();
        Curve::new(field, [z, z, z, a, b])
    }

    /// Curve from small integers (reduced into the prime subfield).
    pub fn from_ints(field: &FieldDesc, a: [i64; 5]) -> Result<Curve, CurveError> {
        Curve::new(field, a.map(|c| field.from_int(c)))
    }

    /// Curve from element codes, e.g. as produced by a coefficient search.
    pub fn from_codes(field: &FieldDesc, codes: [u32; 5]) -> Result<Curve, CurveError> {
        let mut a = [field.zero(); 5];
        for (slot, c) in a.iter_mut().zip(codes) {
            *slot = field.from_code(c)?;
        }
        Curve::new(field, a)
    }

    /// Parse `a1,a2,a3,a4,a6` with element literals.
    pub fn parse(field: &FieldDesc, src: &str) -> Result<Curve, CurveError> {
        let parts: Vec<&str> = src.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(CurveError::Literal(format!("expected 5 coefficients, got {}", parts.len())));
        }
        let mut a = [field.zero(); 5];
        for (slot, s) in a.iter_mut().zip(&parts) {
            *slot = field.parse_elem(s)?;
        }
        Curve::new(field, a)
    }

    pub fn literal(&self) -> String {
        self.a.iter().map(|&c| self.field.format(c)).collect::<Vec<_>>().join(",")
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn coefficients(&self) -> [FieldElem; 5] {
        self.a
    }

    pub fn is_short(&self) -> bool {
        let f = &self.field;
        f.is_zero(self.a[0]) && f.is_zero(self.a[1]) && f.is_zero(self.a[2])
    }

    pub fn discriminant(&self) -> FieldElem {
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let c = |n: i64| f.from_int(n);
        let m = |x, y| f.mul(x, y);
        let b2 = f.add(m(a1, a1), m(c(4), a2));
        let b4 = f.add(m(c(2), a4), m(a1, a3));
        let b6 = f.add(m(a3, a3), m(c(4), a6));
        let b8 = f.sub(
            f.add(f.add(m(m(a1, a1), a6), m(c(4), m(a2, a6))), m(a2, m(a3, a3))),
            f.add(m(m(a1, a3), a4), m(a4, a4)),
        );
        let t1 = f.neg(m(m(b2, b2), b8));
        let t2 = m(c(8), m(b4, m(b4, b4)));
        let t3 = m(c(27), m(b6, b6));
        let t4 = m(c(9), m(b2, m(b4, b6)));
        f.add(f.sub(f.sub(t1, t2), t3), t4)
    }

    fn lhs_rhs(&self, x: FieldElem, y: FieldElem) -> (FieldElem, FieldElem) {
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let lhs = f.add(f.mul(y, f.add(y, f.mul(a1, x))), f.mul(a3, y));
        let rhs = f.add(f.mul(f.add(f.mul(f.add(x, a2), x), a4), x), a6);
        (lhs, rhs)
    }

    pub fn contains(&self, p: &Point) -> bool {
        match *p {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                if !self.field.contains(x) || !self.field.contains(y) {
                    return false;
                }
                let (l, r) = self.lhs_rhs(x, y);
                l == r
            }
        }
    }

    pub fn point(&self, x: FieldElem, y: FieldElem) -> Result<Point, CurveError> {
        let p = Point::affine(self.field.check(x)?, self.field.check(y)?);
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(CurveError::CurveMismatch)
        }
    }

    pub fn neg(&self, p: &Point) -> Point {
        match *p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => {
                let f = &self.field;
                let [a1, _, a3, _, _] = self.a;
                let ny = f.sub(f.neg(y), f.add(f.mul(a1, x), a3));
                Point::affine(x, ny)
            }
        }
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (*p, *q) {
            (Point::Infinity, _) => return *q,
            (_, Point::Infinity) => return *p,
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let (lambda, nu) = if x1 != x2 {
            let dx = f.inv(f.sub(x2, x1)).expect("distinct x");
            let lambda = f.mul(f.sub(y2, y1), dx);
            let nu = f.mul(f.sub(f.mul(y1, x2), f.mul(y2, x1)), dx);
            (lambda, nu)
        } else {
            // same x: either Q = -P or Q = P
            let s = f.add(f.add(y1, y2), f.add(f.mul(a1, x2), a3));
            if f.is_zero(s) {
                return Point::Infinity;
            }
            let denom = f.inv(f.add(f.add(f.add(y1, y1), f.mul(a1, x1)), a3)).expect("nonzero");
            let x1sq = f.mul(x1, x1);
            let num_l = f.sub(
                f.add(f.add(f.mul(f.from_int(3), x1sq), f.mul(f.from_int(2), f.mul(a2, x1))), a4),
                f.mul(a1, y1),
            );
            let num_n = f.sub(
                f.add(f.add(f.neg(f.mul(x1sq, x1)), f.mul(a4, x1)), f.mul(f.from_int(2), a6)),
                f.mul(a3, y1),
            );
            (f.mul(num_l, denom), f.mul(num_n, denom))
        };
        let x3 = f.sub(f.sub(f.sub(f.add(f.mul(lambda, lambda), f.mul(a1, lambda)), a2), x1), x2);
        let y3 = f.sub(f.neg(f.mul(f.add(lambda, a1), x3)), f.add(nu, a3));
        Point::affine(x3, y3)
    }

    /// Addition that first checks both points lie on this curve.
    pub fn try_add(&self, p: &Point, q: &Point) -> Result<Point, CurveError> {
        if !self.contains(p) || !self.contains(q) {
            return Err(CurveError::CurveMismatch);
        }
        Ok(self.add(p, q))
    }

    pub fn sub(&self, p: &Point, q: &Point) -> Point {
        self.add(p, &self.neg(q))
    }

    pub fn scalar_mul(&self, n: i64, p: &Point) -> Point {
        let mut base = if n < 0 { self.neg(p) } else { *p };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Same curve with coefficients included in an extension field of the tower.
    pub fn base_change(&self, ext: &FieldDesc) -> Result<Curve, CurveError> {
        if !ext.has_subfield(&self.field) {
            return Err(GaloisError::FieldMismatch.into());
        }
        let mut a = self.a;
        for c in a.iter_mut() {
            *c = ext.embed(*c)?;
        }
        Ok(Curve { field: ext.clone(), a })
    }

    /// Coordinates raised to `|relative_to|`. The curve coefficients must lie in
    /// `relative_to`, a subfield of the curve's field.
    pub fn frobenius_endo(&self, p: &Point, relative_to: &FieldDesc) -> Result<Point, CurveError> {
        let f = &self.field;
        if !f.has_subfield(relative_to) {
            return Err(GaloisError::FieldMismatch.into());
        }
        for c in self.a {
            if f.restrict(relative_to, c)?.is_none() {
                return Err(GaloisError::FieldMismatch.into());
            }
        }
        if !self.contains(p) {
            return Err(CurveError::CurveMismatch);
        }
        Ok(self.frobenius_unchecked(p, relative_to.order()))
    }

    pub(crate) fn frobenius_unchecked(&self, p: &Point, q: u64) -> Point {
        match *p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::affine(self.field.pow(x, q), self.field.pow(y, q)),
        }
    }

    fn enumeration_cost(&self) -> u128 {
        self.field.order() as u128
    }

    /// All rational points: `Infinity` first, then affine points by `(x, y)` code.
    pub fn enumerate_points(&self) -> Result<Vec<Point>, CurveError> {
        self.enumerate_points_with_budget(DEFAULT_BUDGET)
    }

    pub fn enumerate_points_with_budget(&self, budget: u64) -> Result<Vec<Point>, CurveError> {
        let needed = self.enumeration_cost();
        if needed > budget as u128 {
            return Err(CurveError::BudgetExceeded { needed, budget });
        }
        let f = &self.field;
        let mut pts = vec![Point::Infinity];
        if f.characteristic() == 2 {
            // y^2 + h y = r. With h = 0 the root is sqrt(r); otherwise y = h w
            // and w^2 + w = r / h^2, solved through a preimage table of w^2 + w.
            let [a1, _, a3, _, _] = self.a;
            let mut artin: Vec<Option<FieldElem>> = vec![None; f.order() as usize];
            for w in f.elements() {
                let v = f.add(f.mul(w, w), w);
                let slot = &mut artin[v.code() as usize];
                if slot.is_none() {
                    *slot = Some(w);
                }
            }
            for x in f.elements() {
                let h = f.add(f.mul(a1, x), a3);
                let (_, r) = self.lhs_rhs(x, f.zero());
                if f.is_zero(h) {
                    let y = f.sqrt(r).expect("every element is a square in characteristic 2");
                    pts.push(Point::affine(x, y));
                    continue;
                }
                let c = f.div(r, f.mul(h, h)).expect("h nonzero");
                if let Some(w0) = artin[c.code() as usize] {
                    let y1 = f.mul(h, w0);
                    let y2 = f.add(y1, h);
                    let (lo, hi) = if y1 < y2 { (y1, y2) } else { (y2, y1) };
                    pts.push(Point::affine(x, lo));
                    pts.push(Point::affine(x, hi));
                }
            }
            return Ok(pts);
        }
        // odd characteristic: y^2 + h y - r = 0 with h = a1 x + a3
        let [a1, _, a3, _, _] = self.a;
        let two_inv = f.inv(f.from_int(2)).expect("odd characteristic");
        for x in f.elements() {
            let h = f.add(f.mul(a1, x), a3);
            let (_, r) = self.lhs_rhs(x, f.zero());
            let disc = f.add(f.mul(h, h), f.mul(f.from_int(4), r));
            if let Some(s) = f.sqrt(disc) {
                let y1 = f.mul(f.sub(s, h), two_inv);
                let y2 = f.mul(f.sub(f.neg(s), h), two_inv);
                let mut ys = vec![y1];
                if y2 != y1 {
                    ys.push(y2);
                }
                ys.sort();
                pts.extend(ys.into_iter().map(|y| Point::affine(x, y)));
            }
        }
        Ok(pts)
    }

    pub fn count_points(&self) -> Result<u64, CurveError> {
        Ok(self.enumerate_points()?.len() as u64)
    }

    pub fn frobenius_trace(&self) -> Result<FrobeniusData, CurveError> {
        let n1 = self.count_points()?;
        Ok(FrobeniusData::new(self.field.order(), self.field.characteristic(), n1))
    }

    pub fn is_ordinary(&self) -> Result<bool, CurveError> {
        Ok(self.frobenius_trace()?.ordinary)
    }

    /// For `y^2 = f(x)`, the twist `f(u) y^2 = f(x)` written as
    /// `y^2 = x^3 + a f(u)^2 x + b f(u)^3`.
    pub fn quadratic_twist(&self, u: FieldElem) -> Result<Curve, CurveError> {
        let f = &self.field;
        if f.characteristic() == 2 {
            return Err(CurveError::CharTwo);
        }
        if !self.is_short() {
            return Err(CurveError::NotShortForm);
        }
        f.check(u)?;
        let [_, _, _, a, b] = self.a;
        let fu = f.add(f.mul(f.add(f.mul(u, u), a), u), b);
        if f.is_zero(fu) {
            return Err(CurveError::TwistDegenerate);
        }
        let fu2 = f.mul(fu, fu);
        Curve::short(f, f.mul(a, fu2), f.mul(b, f.mul(fu2, fu)))
    }

    /// The function `z = y/x`.
    pub fn z_coord(&self, p: &Point) -> Result<FieldElem, CurveError> {
        match *p {
            Point::Infinity => Err(CurveError::PoleOfZ),
            Point::Affine { x, y } => {
                if self.field.is_zero(x) {
                    Err(CurveError::PoleOfZ)
                } else {
                    Ok(self.field.div(y, x)?)
                }
            }
        }
    }

    pub fn summary(&self) -> Result<CurveSummary, CurveError> {
        let fd = self.frobenius_trace()?;
        let lit = |i: usize| self.field.format(self.a[i]);
        Ok(CurveSummary {
            p: self.field.characteristic(),
            tower: self.field.tower_degrees(),
            a1: lit(0),
            a2: lit(1),
            a3: lit(2),
            a4: lit(3),
            a6: lit(4),
            n1: fd.n1,
            t: fd.t,
            ordinary: fd.ordinary,
        })
    }
}

/// Canonical JSON echo of a curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub p: u64,
    pub tower: Vec<u32>,
    pub a1: String,
    pub a2: String,
    pub a3: String,
    pub a4: String,
    pub a6: String,
    #[serde(rename = "N1")]
    pub n1: u64,
    pub t: i64,
    pub ordinary: bool,
}

/// Number of curves examined while looking for trace 1 before settling for
/// the first ordinary curve seen.
pub const ORDINARY_SEARCH_BUDGET: u64 = 1 << 16;

/// First curve in lexicographic `(a1, a2, a3, a4, a6)` code order with trace 1,
/// or, if none turns up within [`ORDINARY_SEARCH_BUDGET`] nonsingular curves,
/// the first ordinary one.
pub fn find_ordinary_curve(field: &FieldDesc) -> Result<Curve, CurveError> {
    find_ordinary_curve_with_budget(field, ORDINARY_SEARCH_BUDGET)
}

pub fn find_ordinary_curve_with_budget(field: &FieldDesc, budget: u64) -> Result<Curve, CurveError> {
    let q = field.order();
    let total = (q as u128).pow(5);
    let mut first_ordinary: Option<Curve> = None;
    let mut examined = 0u64;
    let mut idx: u128 = 0;
    while idx < total {
        let mut codes = [0u32; 5];
        let mut c = idx;
        for slot in codes.iter_mut().rev() {
            *slot = (c % q as u128) as u32;
            c /= q as u128;
        }
        idx += 1;
        let curve = match Curve::from_codes(field, codes) {
            Ok(c) => c,
            Err(CurveError::SingularCurve) => continue,
            Err(e) => return Err(e),
        };
        examined += 1;
        let fd = curve.frobenius_trace()?;
        if fd.ordinary {
            if fd.t == 1 {
                return Ok(curve);
            }
            if first_ordinary.is_none() {
                first_ordinary = Some(curve);
            }
        }
        if examined >= budget {
            if let Some(c) = first_ordinary {
                return Ok(c);
            }
        }
    }
    first_ordinary.ok_or(CurveError::SearchExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldDesc {
        FieldDesc::prime(p).unwrap()
    }

    #[test]
    fn nonsingular_examples() {
        let f5 = f(5);
        let e = Curve::from_ints(&f5, [0, 0, 0, 1, 0]).unwrap();
        assert_eq!(e.discriminant(), f5.from_int(-64));
        assert_eq!(e.discriminant(), f5.one());
        let f2 = f(2);
        assert!(Curve::from_ints(&f2, [1, 0, 0, 0, 1]).is_ok());
        assert_eq!(Curve::from_ints(&f5, [0; 5]).unwrap_err(), CurveError::SingularCurve);
    }

    #[test]
    fn foreign_coefficients_rejected() {
        let f5 = f(5);
        let f7 = f(7);
        let z = f5.zero();
        assert!(matches!(
            Curve::new(&f5, [z, z, z, f7.one(), z]),
            Err(CurveError::Field(GaloisError::FieldMismatch))
        ));
    }

    #[test]
    fn two_torsion_and_group_order() {
        let f5 = f(5);
        let e = Curve::from_ints(&f5, [0, 0, 0, 1, 0]).unwrap();
        let origin = e.point(f5.zero(), f5.zero()).unwrap();
        assert_eq!(e.add(&origin, &origin), Point::Infinity);
        assert_eq!(e.add(&origin, &Point::Infinity), origin);
        let pts = e.enumerate_points().unwrap();
        assert_eq!(pts.len(), 4);
        for p in &pts {
            assert_eq!(e.scalar_mul(4, p), Point::Infinity);
            assert_eq!(e.scalar_mul(-1, p), e.neg(p));
        }
    }

    #[test]
    fn traces_of_small_examples() {
        let e = Curve::from_ints(&f(5), [0, 0, 0, 1, 0]).unwrap();
        assert_eq!(e.frobenius_trace().unwrap(), FrobeniusData { q: 5, p: 5, n1: 4, t: 2, ordinary: true });
        let e = Curve::from_ints(&f(2), [1, 0, 0, 0, 1]).unwrap();
        assert_eq!(e.frobenius_trace().unwrap(), FrobeniusData { q: 2, p: 2, n1: 4, t: -1, ordinary: true });
    }

    #[test]
    fn recurrence_values() {
        let fd = FrobeniusData::from_trace(5, 5, 2);
        assert_eq!(fd.count_over_extension(1), BigInt::from(4));
        assert_eq!(fd.trace_over_extension(2), BigInt::from(-6));
        assert_eq!(fd.count_over_extension(2), BigInt::from(32));
        assert_eq!(fd.trace_over_extension(3), BigInt::from(-22));
        assert_eq!(fd.count_over_extension(3), BigInt::from(148));
        // big exponents must not overflow
        let big = fd.count_over_extension(200);
        assert!(big > BigInt::from(5).pow(199));
    }

    #[test]
    fn try_add_rejects_off_curve_points() {
        let f5 = f(5);
        let e = Curve::from_ints(&f5, [0, 0, 0, 1, 0]).unwrap();
        let bogus = Point::affine(f5.one(), f5.one());
        assert_eq!(e.try_add(&bogus, &Point::Infinity).unwrap_err(), CurveError::CurveMismatch);
        assert!(e.point(f5.one(), f5.one()).is_err());
    }

    fn brute_force_points(e: &Curve) -> Vec<Point> {
        let f = e.field();
        let mut pts = vec![Point::Infinity];
        for x in f.elements() {
            for y in f.elements() {
                let p = Point::affine(x, y);
                if e.contains(&p) {
                    pts.push(p);
                }
            }
        }
        pts
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for (p, k) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1)] {
            let f = FieldDesc::galois(p, k).unwrap();
            let q = f.order() as u32;
            // a spread of long-form curves, including a1 = 0 in characteristic 2
            for seed in 0..40u32 {
                let codes = [seed % q, (seed / 2) % q, (seed * 3 + 1) % q, (seed * 7) % q, (seed * 5 + 2) % q];
                if let Ok(e) = Curve::from_codes(&f, codes) {
                    assert_eq!(e.enumerate_points().unwrap(), brute_force_points(&e), "F_{p}^{k} {codes:?}");
                }
            }
        }
    }

    #[test]
    fn z_coordinate() {
        let f5 = f(5);
        let e = Curve::from_ints(&f5, [0, 0, 0, 1, 0]).unwrap();
        let p = e.point(f5.from_int(2), f5.zero()).unwrap();
        assert_eq!(e.z_coord(&p).unwrap(), f5.zero());
        let o = e.point(f5.zero(), f5.zero()).unwrap();
        assert_eq!(e.z_coord(&o).unwrap_err(), CurveError::PoleOfZ);
        assert_eq!(e.z_coord(&Point::Infinity).unwrap_err(), CurveError::PoleOfZ);
    }

    #[test]
    fn twist_errors() {
        let f5 = f(5);
        let e = Curve::from_ints(&f5, [0, 0, 0, 1, 0]).unwrap();
        assert_eq!(e.quadratic_twist(f5.zero()).unwrap_err(), CurveError::TwistDegenerate);
        let f2 = f(2);
        let e2 = Curve::from_ints(&f2, [1, 0, 0, 0, 1]).unwrap();
        assert_eq!(e2.quadratic_twist(f2.one()).unwrap_err(), CurveError::CharTwo);
        let long = Curve::from_ints(&f5, [1, 0, 0, 1, 1]).unwrap();
        assert_eq!(long.quadratic_twist(f5.one()).unwrap_err(), CurveError::NotShortForm);
    }

    #[test]
    fn ordinary_search_prefers_trace_one() {
        let expected: [(u64, u32, [u32; 5]); 6] = [
            (2, 1, [1, 0, 1, 0, 1]),
            (3, 1, [0, 1, 0, 0, 2]),
            (5, 1, [0, 0, 0, 3, 2]),
            (7, 1, [0, 0, 0, 0, 5]),
            (2, 2, [1, 0, 0, 0, 2]),
            (3, 2, [0, 1, 0, 0, 3]),
        ];
        for (p, k, codes) in expected {
            let field = FieldDesc::galois(p, k).unwrap();
            let e = find_ordinary_curve(&field).unwrap();
            let got = e.coefficients().map(|c| c.code());
            assert_eq!(got, codes, "F_{p}^{k}");
            assert_eq!(e.frobenius_trace().unwrap().t, 1);
        }
    }

    #[test]
    fn ordinary_search_falls_back_when_budget_is_tiny() {
        let f5 = f(5);
        let e = find_ordinary_curve_with_budget(&f5, 1).unwrap();
        assert!(e.is_ordinary().unwrap());
    }

    #[test]
    fn parse_and_summary() {
        let f25 = FieldDesc::galois(5, 2).unwrap();
        let e = Curve::parse(&f25, "0,0,0,1,(elt 1 1)").unwrap();
        assert_eq!(Curve::parse(&f25, &e.literal()).unwrap(), e);
        let s = e.summary().unwrap();
        assert_eq!(s.tower, vec![2]);
        assert_eq!(s.a6, "(elt 1 1)");
        assert!(Curve::parse(&f25, "0,0,1").is_err());
        let json = serde_json::to_value(&s).unwrap();
        assert!(json.get("N1").is_some());
    }
}
