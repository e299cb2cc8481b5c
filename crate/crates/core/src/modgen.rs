//! How often a single point generates `E(F_{q^l}) / E(F_q)` as a module over
//! the Frobenius ring `Z[F]`, and over `Z[F, zeta]` when the curve has an
//! extra automorphism `zeta` defined over `F_q`.
//!
//! Since `F^2 = tF - q`, the `Z[F]`-span of `P` is `Z P + Z F(P)`, so `P`
//! generates iff `E(F_q) + <P, F(P)> = E(F_{q^l})`. With `zeta` the span also
//! gets `zeta(P)` and `zeta(F(P))`. The fast path checks this prime by prime
//! in `G / rG` using coordinates in a basis of the group; the literal closure
//! in [`frobenius_submodule`] and [`ring_submodule`] is the slow reference.

use std::collections::{HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{Curve, CurveError, Point};
use crate::galois::{FieldDesc, FieldElem, GaloisError, DEFAULT_BUDGET};
use crate::mersenne::{factorize, psi_of_factors, MersenneError, PsiValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModgenError {
    #[error("curve is not ordinary (t = {t})")]
    NotOrdinary { t: i64 },
    #[error("E(F_q^l) would need {needed} field elements, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Field(#[from] GaloisError),
    #[error(transparent)]
    Factor(#[from] MersenneError),
}

/// A finite set of points closed under addition, built by joining generators.
#[derive(Debug, Clone)]
pub struct Subgroup {
    set: HashSet<Point>,
    elems: Vec<Point>,
}

impl Subgroup {
    pub fn trivial() -> Subgroup {
        Subgroup { set: HashSet::from([Point::Infinity]), elems: vec![Point::Infinity] }
    }

    /// `H + <g>`, as the union of the cosets `k g + H`.
    pub fn join(&mut self, curve: &Curve, g: &Point) {
        if self.set.contains(g) {
            return;
        }
        let base = self.elems.clone();
        let mut cur = *g;
        while !self.set.contains(&cur) {
            for h in &base {
                let p = curve.add(&cur, h);
                if self.set.insert(p) {
                    self.elems.push(p);
                }
            }
            cur = curve.add(&cur, g);
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.set.contains(p)
    }
    pub fn len(&self) -> usize {
        self.elems.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
    pub fn points(&self) -> &[Point] {
        &self.elems
    }
    pub fn sorted(&self) -> Vec<Point> {
        let mut v = self.elems.clone();
        v.sort();
        v
    }
}

fn check_budget(ext: &FieldDesc, budget: u64) -> Result<(), ModgenError> {
    let needed = ext.order() as u128;
    if needed > budget as u128 {
        return Err(ModgenError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Smallest subgroup of `E(ext)` containing `E(F_q)`, `P`, and closed under
/// Frobenius relative to the curve's field: the closure of
/// `{F^i P : 0 <= i < l} U E(F_q)` under addition.
pub fn frobenius_submodule(curve: &Curve, ext: &FieldDesc, p: &Point) -> Result<Subgroup, ModgenError> {
    check_budget(ext, DEFAULT_BUDGET)?;
    let big = curve.base_change(ext)?;
    if !big.contains(p) {
        return Err(CurveError::CurveMismatch.into());
    }
    let mut h = Subgroup::trivial();
    for g in curve.enumerate_points()? {
        let g = embed_point(ext, &g)?;
        h.join(&big, &g);
    }
    let l = ext.absolute_degree() / curve.field().absolute_degree();
    let mut cur = *p;
    for _ in 0..l {
        h.join(&big, &cur);
        cur = big.frobenius_endo(&cur, curve.field())?;
    }
    Ok(h)
}

/// Automorphism of order 3 or 4 on a `j = 0` or `j = 1728` short model,
/// defined over `F_q`. `Z[zeta]` is then the maximal order of `Q(zeta)`, so
/// it is the whole endomorphism ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Automorphism {
    /// `(x, y) -> (w x, y)`, `w` a primitive cube root of unity.
    Zeta3(FieldElem),
    /// `(x, y) -> (-x, i y)`, `i^2 = -1`.
    Zeta4(FieldElem),
}

impl Automorphism {
    pub fn find(curve: &Curve) -> Option<Automorphism> {
        let f = curve.field();
        let p = f.characteristic();
        if p == 2 || p == 3 || !curve.is_short() {
            return None;
        }
        let [_, _, _, a4, a6] = curve.coefficients();
        let q = f.order();
        if f.is_zero(a4) && q % 3 == 1 {
            let w = f.units().find(|&w| w != f.one() && f.pow(w, 3) == f.one())?;
            return Some(Automorphism::Zeta3(w));
        }
        if f.is_zero(a6) && q % 4 == 1 {
            let i = f.units().find(|&i| f.mul(i, i) == f.from_int(-1))?;
            return Some(Automorphism::Zeta4(i));
        }
        None
    }

    pub fn name(&self) -> &'static str {
        match self {
            Automorphism::Zeta3(_) => "Z[F, zeta_3]",
            Automorphism::Zeta4(_) => "Z[F, zeta_4]",
        }
    }

    /// Action on a point of the base change to `ext`.
    pub fn apply(&self, ext: &FieldDesc, p: &Point) -> Result<Point, GaloisError> {
        Ok(match (*self, *p) {
            (_, Point::Infinity) => Point::Infinity,
            (Automorphism::Zeta3(w), Point::Affine { x, y }) => Point::affine(ext.mul(ext.embed(w)?, x), y),
            (Automorphism::Zeta4(i), Point::Affine { x, y }) => Point::affine(ext.neg(x), ext.mul(ext.embed(i)?, y)),
        })
    }
}

/// [`frobenius_submodule`] enlarged by the automorphism from
/// [`Automorphism::find`], when there is one.
pub fn ring_submodule(curve: &Curve, ext: &FieldDesc, p: &Point) -> Result<Subgroup, ModgenError> {
    let mut h = frobenius_submodule(curve, ext, p)?;
    if let Some(z) = Automorphism::find(curve) {
        let big = curve.base_change(ext)?;
        let l = ext.absolute_degree() / curve.field().absolute_degree();
        let mut cur = *p;
        for _ in 0..l {
            h.join(&big, &z.apply(ext, &cur)?);
            cur = big.frobenius_endo(&cur, curve.field())?;
        }
    }
    Ok(h)
}

pub fn embed_point(ext: &FieldDesc, p: &Point) -> Result<Point, GaloisError> {
    Ok(match *p {
        Point::Infinity => Point::Infinity,
        Point::Affine { x, y } => Point::affine(ext.embed(x)?, ext.embed(y)?),
    })
}

/// Point set of `E(ext)` with each point's coordinates in a basis
/// `E = <b1> (+) <b2>`, `n1 | n2`.
struct GroupCoords {
    n1: u64,
    n2: u64,
    coords: HashMap<Point, (u64, u64)>,
}

fn point_order(curve: &Curve, p: &Point, n: u64, primes: &[u64]) -> u64 {
    let mut ord = n;
    for &r in primes {
        while ord % r == 0 && curve.scalar_mul((ord / r) as i64, p).is_infinity() {
            ord /= r;
        }
    }
    ord
}

fn group_coords(curve: &Curve, points: &[Point]) -> GroupCoords {
    let n = points.len() as u64;
    let primes = prime_divisors(n);
    // an element of maximal order spans a direct summand
    let (b2, n2) = points
        .iter()
        .map(|p| (*p, point_order(curve, p, n, &primes)))
        .max_by_key(|&(p, o)| (o, std::cmp::Reverse(p)))
        .expect("group is nonempty");
    let n1 = n / n2;
    let mut cyc: HashMap<Point, u64> = HashMap::new();
    let mut cur = Point::Infinity;
    for k in 0..n2 {
        cyc.insert(cur, k);
        cur = curve.add(&cur, &b2);
    }
    let mut b1 = Point::Infinity;
    if n1 > 1 {
        'search: for x in points {
            let mut kx = *x;
            for k in 1..=n1 {
                if let Some(&m) = cyc.get(&kx) {
                    if k == n1 {
                        // n1 x = m b2 forces n1 | m
                        b1 = curve.sub(x, &curve.scalar_mul((m / n1) as i64, &b2));
                        break 'search;
                    }
                    break;
                }
                kx = curve.add(&kx, x);
            }
        }
        assert!(!b1.is_infinity(), "no complement found");
    }
    let mut coords = HashMap::with_capacity(points.len());
    let mut row = Point::Infinity;
    for a in 0..n1 {
        let mut p = row;
        for b in 0..n2 {
            coords.insert(p, (a, b));
            p = curve.add(&p, &b2);
        }
        row = curve.add(&row, &b1);
    }
    assert_eq!(coords.len() as u64, n, "basis does not span");
    GroupCoords { n1, n2, coords }
}

fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(&BigUint::from(n))
        .expect("small integers factor")
        .into_iter()
        .map(|f| f.prime.to_u64().expect("fits"))
        .collect()
}

/// Span over `F_r` of coordinate vectors in `G / rG`, which is `(Z/r)^2`
/// when `r | n1` and `Z/r` (second coordinate only) otherwise.
#[derive(Clone)]
struct Span {
    r: u64,
    rows: Vec<[u64; 2]>,
    dim: usize,
}

impl Span {
    fn new(r: u64, dim: usize) -> Span {
        Span { r, rows: Vec::new(), dim }
    }
    fn full(&self) -> bool {
        self.rows.len() == self.dim
    }
    fn insert(&mut self, v: [u64; 2]) {
        let r = self.r;
        let v = [v[0] % r, v[1] % r];
        if self.full() {
            return;
        }
        let independent = match (self.dim, self.rows.first()) {
            (1, _) => v[1] != 0,
            (_, None) => v != [0, 0],
            (_, Some(w)) => (v[0] * w[1] % r) != (v[1] * w[0] % r),
        };
        if independent {
            self.rows.push(v);
        }
    }
}

/// True when `Z[F]` is the maximal order of `Q(F)`, i.e. `t^2 - 4q` is a
/// fundamental discriminant. Then `End(E) = Z[F]` and the Frobenius-ring
/// fraction is exactly the endomorphism-ring fraction.
pub fn frobenius_order_is_maximal(q: u64, t: i64) -> bool {
    let d = t as i128 * t as i128 - 4 * q as i128;
    let m = d.unsigned_abs() as u64;
    let squarefree = |x: u64| {
        factorize(&BigUint::from(x)).expect("small").iter().all(|f| f.exp == 1)
    };
    match d.rem_euclid(4) {
        1 => squarefree(m),
        0 => {
            let e = d / 4;
            matches!(e.rem_euclid(4), 2 | 3) && squarefree(m / 4)
        }
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub q: u64,
    pub ell: u32,
    pub n: String,
    pub psi: PsiValue,
    /// Ring the counts below are taken over: `Z[F]`, or `Z[F, zeta]` when an
    /// extra automorphism is defined over `F_q`.
    pub ring: String,
    pub generating: u64,
    pub total: u64,
    pub fraction: PsiValue,
    pub bound: PsiValue,
    pub pass: bool,
    /// Generators over `Z[F]` alone; equals `generating` when `ring` is `Z[F]`.
    pub generating_frobenius: u64,
    /// `Z[F]` is the full endomorphism ring, so a failure cannot be blamed on it.
    pub frobenius_order_maximal: bool,
    /// `ring` is known to be the full endomorphism ring.
    pub ring_is_end: bool,
    /// Below the bound, but `End(E)` may be larger than `ring`.
    pub end_caveat: bool,
}

impl GenerationReport {
    /// A sub-bound fraction that the endomorphism-ring gap cannot explain.
    pub fn falsified(&self) -> bool {
        !self.pass && !self.end_caveat
    }
}

pub fn generation_fraction(curve: &Curve, ell: u32) -> Result<GenerationReport, ModgenError> {
    generation_fraction_with(curve, ell, DEFAULT_BUDGET, 1)
}

/// Exhaustive count over every `P` in `E(F_{q^l})`. Points are split across
/// `threads` workers; the count is a plain sum, so the result does not depend
/// on the split.
pub fn generation_fraction_with(
    curve: &Curve,
    ell: u32,
    budget: u64,
    threads: usize,
) -> Result<GenerationReport, ModgenError> {
    let fd = curve.frobenius_trace()?;
    if !fd.ordinary {
        return Err(ModgenError::NotOrdinary { t: fd.t });
    }
    let q = fd.q;
    let needed = (q as u128).pow(ell);
    if needed > budget as u128 {
        return Err(ModgenError::BudgetExceeded { needed, budget });
    }
    let ext = if ell == 1 { curve.field().clone() } else { FieldDesc::extension(curve.field(), ell, None)? };
    let big = curve.base_change(&ext)?;
    let points = big.enumerate_points_with_budget(budget)?;
    let total = points.len() as u64;
    debug_assert_eq!(BigInt::from(total), fd.count_over_extension(ell));
    let n = total / fd.n1;
    let psi = psi_of_factors(&factorize(&BigUint::from(n))?);

    let gc = group_coords(&big, &points);
    let primes = prime_divisors(gc.n2.max(1));
    let mut base_spans = Vec::new();
    for &r in &primes {
        let dim = if gc.n1 % r == 0 { 2 } else { 1 };
        let mut span = Span::new(r, dim);
        for g in curve.enumerate_points()? {
            let g = embed_point(&ext, &g)?;
            let (a, b) = gc.coords[&g];
            span.insert([a, b]);
        }
        base_spans.push(span);
    }
    let zeta = Automorphism::find(curve);
    // (generates over Z[F], generates over the ring with zeta)
    let generates = |p: &Point| -> Result<(bool, bool), GaloisError> {
        let fp = big.frobenius_unchecked(p, q);
        let mut gens = vec![gc.coords[p], gc.coords[&fp]];
        if let Some(z) = zeta {
            gens.push(gc.coords[&z.apply(&ext, p)?]);
            gens.push(gc.coords[&z.apply(&ext, &fp)?]);
        }
        let spans_with = |k: usize| {
            base_spans.iter().all(|s| {
                if s.full() {
                    return true;
                }
                let mut s = s.clone();
                for &(a, b) in &gens[..k] {
                    s.insert([a, b]);
                }
                s.full()
            })
        };
        let by_frobenius = spans_with(2);
        Ok((by_frobenius, by_frobenius || spans_with(gens.len())))
    };
    let threads = threads.max(1);
    let chunk = points.len().div_ceil(threads).max(1);
    let (generating_frobenius, generating) = std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                scope.spawn(|| {
                    part.iter().try_fold((0u64, 0u64), |(a, b), p| {
                        let (x, y) = generates(p)?;
                        Ok::<_, GaloisError>((a + x as u64, b + y as u64))
                    })
                })
            })
            .collect();
        handles.into_iter().try_fold((0, 0), |(a, b), h| {
            let (x, y) = h.join().expect("worker panicked")?;
            Ok::<_, GaloisError>((a + x, b + y))
        })
    })?;

    let fraction = BigRational::new(generating.into(), total.into());
    let bound = BigRational::one() - psi.clone() * BigRational::from_integer(2.into());
    let pass = fraction >= bound;
    let maximal = frobenius_order_is_maximal(q, fd.t);
    let ring_is_end = maximal || zeta.is_some();
    Ok(GenerationReport {
        q,
        ell,
        n: n.to_string(),
        psi: PsiValue::from(&psi),
        ring: zeta.map_or("Z[F]", |z| z.name()).to_string(),
        generating,
        total,
        fraction: PsiValue::from(&fraction),
        bound: PsiValue::from(&bound),
        pass,
        generating_frobenius,
        frobenius_order_maximal: maximal,
        ring_is_end,
        end_caveat: !pass && !ring_is_end,
    })
}

/// Generating count by literal closure for every point, over the same ring
/// as [`GenerationReport::generating`]. Quadratic in the group size; only for
/// small cross-checks.
pub fn generating_count_by_closure(curve: &Curve, ell: u32) -> Result<(u64, u64), ModgenError> {
    let ext = if ell == 1 { curve.field().clone() } else { FieldDesc::extension(curve.field(), ell, None)? };
    let big = curve.base_change(&ext)?;
    let points = big.enumerate_points()?;
    let mut count = 0;
    for p in &points {
        if ring_submodule(curve, &ext, p)?.len() == points.len() {
            count += 1;
        }
    }
    Ok((count, points.len() as u64))
}
