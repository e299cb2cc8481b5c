//! Diagonal forms `<a_1, ..., a_n>_d = a_1 x_1^d + ... + a_n x_n^d`, the
//! multiplicative forms `<<a_1, ..., a_n>>_d`, zero search over finite fields,
//! and valuation certificates over iterated Laurent series fields.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{FieldDesc, FieldElem, GaloisError, DEFAULT_BUDGET};
use crate::sexp::{self, Sexp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormsError {
    #[error("form coefficients must be nonzero (slot {0})")]
    ZeroCoefficient(usize),
    #[error("vector has length {got}, form has {want} variables")]
    LengthMismatch { got: usize, want: usize },
    #[error("degrees differ: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("degree must be at least 2, got {0}")]
    BadDegree(u32),
    #[error("search needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("leading term of a series cannot be certified at this precision")]
    PrecisionExhausted,
    #[error("operands live in different Laurent domains")]
    DomainMismatch,
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("residue form is isotropic; no anisotropy certificate")]
    ResidueIsotropic,
    #[error("bad literal: {0}")]
    Literal(String),
    #[error(transparent)]
    Field(#[from] GaloisError),
}

/// A commutative ring in which form coefficients and variables live.
pub trait Domain: Clone {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// True for zero, and for inexact elements not known to be nonzero.
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &Sexp) -> Result<Self::Elem, FormsError>;
    fn describe(&self) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn pow(&self, a: &Self::Elem, e: u32) -> Self::Elem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }
}

impl Domain for FieldDesc {
    type Elem = FieldElem;

    fn zero(&self) -> FieldElem {
        FieldDesc::zero(self)
    }
    fn one(&self) -> FieldElem {
        FieldDesc::one(self)
    }
    fn from_int(&self, n: i64) -> FieldElem {
        FieldDesc::from_int(self, n)
    }
    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldDesc::add(self, *a, *b)
    }
    fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldDesc::neg(self, *a)
    }
    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldDesc::mul(self, *a, *b)
    }
    fn is_zero(&self, a: &FieldElem) -> bool {
        FieldDesc::is_zero(self, *a)
    }
    fn format(&self, a: &FieldElem) -> String {
        FieldDesc::format(self, *a)
    }
    fn parse(&self, s: &Sexp) -> Result<FieldElem, FormsError> {
        Ok(self.elem_from_sexp(s)?)
    }
    fn describe(&self) -> String {
        format!("F_{}", self.order())
    }
    fn pow(&self, a: &FieldElem, e: u32) -> FieldElem {
        FieldDesc::pow(self, *a, e as u64)
    }
}

#[derive(Clone, PartialEq)]
pub struct DiagonalForm<D: Domain> {
    domain: D,
    d: u32,
    coeffs: Vec<D::Elem>,
}

impl<D: Domain> fmt::Debug for DiagonalForm<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal())
    }
}

impl<D: Domain> DiagonalForm<D> {
    pub fn new(domain: &D, d: u32, coeffs: Vec<D::Elem>) -> Result<Self, FormsError> {
        if d < 2 {
            return Err(FormsError::BadDegree(d));
        }
        if let Some(i) = coeffs.iter().position(|c| domain.is_zero(c)) {
            return Err(FormsError::ZeroCoefficient(i));
        }
        Ok(DiagonalForm { domain: domain.clone(), d, coeffs })
    }

    pub fn domain(&self) -> &D {
        &self.domain
    }
    pub fn degree(&self) -> u32 {
        self.d
    }
    pub fn coeffs(&self) -> &[D::Elem] {
        &self.coeffs
    }
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &[D::Elem]) -> Result<D::Elem, FormsError> {
        if x.len() != self.coeffs.len() {
            return Err(FormsError::LengthMismatch { got: x.len(), want: self.coeffs.len() });
        }
        let dom = &self.domain;
        Ok(self
            .coeffs
            .iter()
            .zip(x)
            .fold(dom.zero(), |acc, (a, xi)| dom.add(&acc, &dom.mul(a, &dom.pow(xi, self.d)))))
    }

    /// Coefficients `a_i b_j`, `i` outer and `j` inner.
    pub fn tensor(&self, other: &Self) -> Result<Self, FormsError> {
        if self.d != other.d {
            return Err(FormsError::DegreeMismatch(self.d, other.d));
        }
        let dom = &self.domain;
        let coeffs = self
            .coeffs
            .iter()
            .flat_map(|a| other.coeffs.iter().map(move |b| dom.mul(a, b)))
            .collect();
        DiagonalForm::new(dom, self.d, coeffs)
    }

    /// `(form :d 2 :coeffs (1 4 2))`
    pub fn literal(&self) -> String {
        let cs: Vec<String> = self.coeffs.iter().map(|c| self.domain.format(c)).collect();
        format!("(form :d {} :coeffs ({}))", self.d, cs.join(" "))
    }

    pub fn parse(domain: &D, src: &str) -> Result<Self, FormsError> {
        let s = sexp::parse(src).map_err(|e| FormsError::Literal(e.to_string()))?;
        let items = match (s.head(), s.as_list()) {
            (Some("form"), Some(items)) => items,
            _ => return Err(FormsError::Literal("expected (form :d D :coeffs (...))".into())),
        };
        let (d, coeffs) = keyword_pair(items, ":d", ":coeffs")?;
        let d: u32 = d.as_atom().and_then(|a| a.parse().ok()).ok_or_else(|| FormsError::Literal("bad :d".into()))?;
        let list = coeffs.as_list().ok_or_else(|| FormsError::Literal(":coeffs must be a list".into()))?;
        let cs = list.iter().map(|c| domain.parse(c)).collect::<Result<Vec<_>, _>>()?;
        DiagonalForm::new(domain, d, cs)
    }
}

fn keyword_pair<'a>(items: &'a [Sexp], k1: &str, k2: &str) -> Result<(&'a Sexp, &'a Sexp), FormsError> {
    let find = |key: &str| {
        items
            .windows(2)
            .find(|w| w[0].as_atom() == Some(key))
            .map(|w| &w[1])
            .ok_or_else(|| FormsError::Literal(format!("missing {key}")))
    };
    Ok((find(k1)?, find(k2)?))
}

/// `<1, a, ..., a^{d-1}>_d`
pub fn pfister1<D: Domain>(domain: &D, d: u32, a: &D::Elem) -> Result<DiagonalForm<D>, FormsError> {
    let coeffs = (0..d).map(|i| domain.pow(a, i)).collect();
    DiagonalForm::new(domain, d, coeffs)
}

/// `<<a_1, ..., a_n>>_d`, a tensor product of `d^n` coefficients; `<1>` for `n = 0`.
pub fn pfister<D: Domain>(domain: &D, d: u32, a: &[D::Elem]) -> Result<DiagonalForm<D>, FormsError> {
    let mut acc = DiagonalForm::new(domain, d, vec![domain.one()])?;
    for ai in a {
        acc = acc.tensor(&pfister1(domain, d, ai)?)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// zero search over finite fields

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive { budget: u64 },
    Random { trials: u64, seed: u64 },
}

impl SearchMode {
    pub fn exhaustive() -> SearchMode {
        SearchMode::Exhaustive { budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroSearch {
    /// Nonzero vector on which the form vanishes.
    Witness(Vec<FieldElem>),
    /// Exhaustive search found nothing: the form is anisotropic.
    Anisotropic,
    /// Random search found nothing; proves nothing.
    TrialsExhausted,
}

impl ZeroSearch {
    pub fn witness(&self) -> Option<&[FieldElem]> {
        match self {
            ZeroSearch::Witness(w) => Some(w),
            _ => None,
        }
    }
    pub fn is_isotropic(&self) -> bool {
        matches!(self, ZeroSearch::Witness(_))
    }
}

pub fn find_zero(form: &DiagonalForm<FieldDesc>, mode: SearchMode) -> Result<ZeroSearch, FormsError> {
    match mode {
        SearchMode::Exhaustive { budget } => find_zero_exhaustive(form, budget),
        SearchMode::Random { trials, seed } => Ok(find_zero_random(form, trials, seed)),
    }
}

/// Lexicographically first witness (by element code, `x_1` most significant).
///
/// Works backwards over suffix sums: `reach[i]` holds every pair
/// (value of `sum_{j >= i} a_j x_j^d`, whether some `x_j != 0`) attainable by
/// the suffix. The witness is then read off greedily from the front. This
/// visits `O(n q^2)` states where plain enumeration would visit `q^n`.
fn find_zero_exhaustive(form: &DiagonalForm<FieldDesc>, budget: u64) -> Result<ZeroSearch, FormsError> {
    let f = form.domain();
    let q = f.order() as usize;
    let n = form.len();
    let needed = n as u128 * 2 * (q as u128) * (q as u128);
    if needed > budget as u128 {
        return Err(FormsError::BudgetExceeded { needed, budget });
    }
    let values: Vec<Vec<FieldElem>> = form
        .coeffs()
        .iter()
        .map(|&a| f.elements().map(|x| f.mul(a, f.pow(x, form.degree() as u64))).collect())
        .collect();
    let idx = |s: FieldElem, nz: bool| 2 * s.code() as usize + nz as usize;
    let mut reach = vec![vec![false; 2 * q]; n + 1];
    reach[n][idx(f.zero(), false)] = true;
    for i in (0..n).rev() {
        let (head, tail) = reach.split_at_mut(i + 1);
        let (cur, next) = (&mut head[i], &tail[0]);
        for code in 0..q {
            for nz in [false, true] {
                if !next[2 * code + nz as usize] {
                    continue;
                }
                let s = f.from_code(code as u32).expect("in range");
                for (xc, v) in values[i].iter().enumerate() {
                    cur[idx(f.add(s, *v), nz || xc != 0)] = true;
                }
            }
        }
    }
    if !reach[0][idx(f.zero(), true)] {
        return Ok(ZeroSearch::Anisotropic);
    }
    let mut target = f.zero();
    let mut need_nonzero = true;
    let mut witness = Vec::with_capacity(n);
    for i in 0..n {
        let pick = (0..q).find(|&xc| {
            let rest = f.sub(target, values[i][xc]);
            let need = need_nonzero && xc == 0;
            reach[i + 1][idx(rest, true)] || (!need && reach[i + 1][idx(rest, false)])
        });
        let xc = pick.expect("reachability guarantees a choice");
        target = f.sub(target, values[i][xc]);
        need_nonzero = need_nonzero && xc == 0;
        witness.push(f.from_code(xc as u32).expect("in range"));
    }
    debug_assert!(f.is_zero(form.eval(&witness).expect("length")));
    Ok(ZeroSearch::Witness(witness))
}

fn find_zero_random(form: &DiagonalForm<FieldDesc>, trials: u64, seed: u64) -> ZeroSearch {
    let f = form.domain();
    let q = f.order() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let x: Vec<FieldElem> =
            (0..form.len()).map(|_| f.from_code(rng.gen_range(0..q)).expect("in range")).collect();
        if x.iter().all(|v| f.is_zero(*v)) {
            continue;
        }
        if f.is_zero(form.eval(&x).expect("length")) {
            return ZeroSearch::Witness(x);
        }
    }
    ZeroSearch::TrialsExhausted
}

/// Reference enumeration of all `q^n` vectors, for cross-checking the search.
pub fn find_zero_brute_force(form: &DiagonalForm<FieldDesc>) -> Option<Vec<FieldElem>> {
    let f = form.domain();
    let q = f.order();
    let n = form.len() as u32;
    for idx in 1..q.pow(n) {
        let mut x = vec![f.zero(); n as usize];
        let mut c = idx;
        for slot in x.iter_mut().rev() {
            *slot = f.from_code((c % q) as u32).expect("in range");
            c /= q;
        }
        if f.is_zero(form.eval(&x).expect("length")) {
            return Some(x);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// descent under finite extensions

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpringerReport {
    pub d: u32,
    pub base: String,
    pub extension: String,
    pub variables: usize,
    pub forms_checked: u64,
    pub isotropic_over_base: u64,
    pub isotropic_over_extension: u64,
    /// Forms isotropic over the extension but anisotropic over the base.
    pub counterexamples: Vec<String>,
}

impl SpringerReport {
    pub fn pass(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Every `n`-variable form with coefficients in `base^x`, tested over `base`
/// and over the degree-`ext_degree` extension. Allowed pairs are quadratic
/// forms with odd degree and cubic forms with degree 2.
pub fn springer_experiment(
    d: u32,
    base: &FieldDesc,
    ext_degree: u32,
    variables: usize,
    budget: u64,
) -> Result<SpringerReport, FormsError> {
    let allowed = (d == 2 && ext_degree % 2 == 1) || (d == 3 && ext_degree == 2);
    if !allowed {
        return Err(FormsError::Unsupported(format!("degree {d} with extension degree {ext_degree}")));
    }
    let ext = FieldDesc::extension(base, ext_degree, None)?;
    let units: Vec<FieldElem> = base.units().collect();
    let total = (units.len() as u64).pow(variables as u32);
    let mut report = SpringerReport {
        d,
        base: format!("F_{}", base.spec()),
        extension: format!("F_{}", ext.spec()),
        variables,
        forms_checked: 0,
        isotropic_over_base: 0,
        isotropic_over_extension: 0,
        counterexamples: Vec::new(),
    };
    for idx in 0..total {
        let mut c = idx;
        let mut coeffs = vec![base.zero(); variables];
        for slot in coeffs.iter_mut().rev() {
            *slot = units[(c % units.len() as u64) as usize];
            c /= units.len() as u64;
        }
        let small = DiagonalForm::new(base, d, coeffs.clone())?;
        let lifted: Vec<FieldElem> = coeffs.iter().map(|&a| ext.embed(a)).collect::<Result<_, _>>()?;
        let big = DiagonalForm::new(&ext, d, lifted)?;
        let iso_base = find_zero(&small, SearchMode::Exhaustive { budget })?.is_isotropic();
        let iso_ext = find_zero(&big, SearchMode::Exhaustive { budget })?.is_isotropic();
        report.forms_checked += 1;
        report.isotropic_over_base += iso_base as u64;
        report.isotropic_over_extension += iso_ext as u64;
        if iso_ext && !iso_base {
            report.counterexamples.push(small.literal());
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChevalleyWarningReport {
    pub field: String,
    pub d: u32,
    pub variables: usize,
    pub tuples_checked: u64,
    pub isotropic: u64,
    /// `(a, b, c)` for which no nontrivial zero was found.
    pub failures: Vec<String>,
}

impl ChevalleyWarningReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `d = 3` in characteristic 2, else `d = 2`.
pub fn cw_degree(field: &FieldDesc) -> u32 {
    if field.characteristic() == 2 {
        3
    } else {
        2
    }
}

/// `pfister(d, [a]) (x) <b, c>` for every `(a, b, c)` in `(F_q^x)^3`, searched exhaustively.
pub fn chevalley_warning_check(field: &FieldDesc, budget: u64) -> Result<ChevalleyWarningReport, FormsError> {
    let d = cw_degree(field);
    let mut report = ChevalleyWarningReport {
        field: format!("F_{}", field.spec()),
        d,
        variables: 2 * d as usize,
        tuples_checked: 0,
        isotropic: 0,
        failures: Vec::new(),
    };
    for a in field.units() {
        let p = pfister1(field, d, &a)?;
        for b in field.units() {
            for c in field.units() {
                let form = p.tensor(&DiagonalForm::new(field, d, vec![b, c])?)?;
                report.tuples_checked += 1;
                match find_zero(&form, SearchMode::Exhaustive { budget })? {
                    ZeroSearch::Witness(_) => report.isotropic += 1,
                    _ => report.failures.push(format!("({} {} {})", field.format(a), field.format(b), field.format(c))),
                }
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Laurent series

/// `t^v (c_0 + c_1 t + ...)`, known up to `O(t^abs)` when `abs` is set and
/// exact otherwise. `coeffs[0]` is nonzero unless the series is zero.
#[derive(Clone, PartialEq, Debug)]
pub struct Series<E> {
    pub v: i64,
    pub coeffs: Vec<E>,
    pub abs: Option<i64>,
}

impl<E> Series<E> {
    pub fn is_exact(&self) -> bool {
        self.abs.is_none()
    }
    /// `Ok(None)` for the exact zero; an error for a zero known only to `O(t^k)`.
    pub fn valuation(&self) -> Result<Option<i64>, FormsError> {
        match (self.coeffs.is_empty(), self.abs) {
            (false, _) => Ok(Some(self.v)),
            (true, None) => Ok(None),
            (true, Some(_)) => Err(FormsError::PrecisionExhausted),
        }
    }
    /// Number of known coefficients from the leading term on; `None` if exact.
    pub fn relative_precision(&self) -> Option<i64> {
        self.abs.map(|a| a - self.v)
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Series arithmetic over an inner coefficient domain.
pub mod series_ops {
    use super::*;

    pub fn normalize<D: Domain>(inner: &D, v: i64, mut coeffs: Vec<D::Elem>, abs: Option<i64>) -> Series<D::Elem> {
        if let Some(a) = abs {
            let keep = (a - v).max(0) as usize;
            coeffs.truncate(keep);
        }
        let lead = coeffs.iter().position(|c| !inner.is_zero(c));
        match lead {
            None => Series { v: abs.unwrap_or(0), coeffs: Vec::new(), abs },
            Some(k) => {
                coeffs.drain(..k);
                if abs.is_none() {
                    while coeffs.last().is_some_and(|c| inner.is_zero(c)) {
                        coeffs.pop();
                    }
                }
                Series { v: v + k as i64, coeffs, abs }
            }
        }
    }

    pub fn constant<D: Domain>(inner: &D, c: D::Elem) -> Series<D::Elem> {
        normalize(inner, 0, vec![c], None)
    }

    pub fn monomial<D: Domain>(inner: &D, c: D::Elem, v: i64) -> Series<D::Elem> {
        normalize(inner, v, vec![c], None)
    }

    pub fn add<D: Domain>(inner: &D, a: &Series<D::Elem>, b: &Series<D::Elem>) -> Series<D::Elem> {
        let abs = min_opt(a.abs, b.abs);
        if a.coeffs.is_empty() && b.coeffs.is_empty() {
            return Series { v: abs.unwrap_or(0), coeffs: Vec::new(), abs };
        }
        let start = match (a.coeffs.is_empty(), b.coeffs.is_empty()) {
            (true, _) => b.v,
            (_, true) => a.v,
            _ => a.v.min(b.v),
        };
        let end_of = |s: &Series<D::Elem>| s.v + s.coeffs.len() as i64;
        let mut end = end_of(a).max(end_of(b));
        if let Some(x) = abs {
            end = end.min(x);
        }
        let len = (end - start).max(0) as usize;
        let mut out = vec![inner.zero(); len];
        for s in [a, b] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let pos = s.v + i as i64 - start;
                if pos >= 0 && (pos as usize) < len {
                    out[pos as usize] = inner.add(&out[pos as usize], c);
                }
            }
        }
        normalize(inner, start, out, abs)
    }

    pub fn neg<D: Domain>(inner: &D, a: &Series<D::Elem>) -> Series<D::Elem> {
        Series { v: a.v, coeffs: a.coeffs.iter().map(|c| inner.neg(c)).collect(), abs: a.abs }
    }

    pub fn mul<D: Domain>(inner: &D, a: &Series<D::Elem>, b: &Series<D::Elem>) -> Series<D::Elem> {
        let a_zero = a.coeffs.is_empty();
        let b_zero = b.coeffs.is_empty();
        if (a_zero && a.abs.is_none()) || (b_zero && b.abs.is_none()) {
            return Series { v: 0, coeffs: Vec::new(), abs: None };
        }
        // zero-to-precision operands: O(t^k) * b = O(t^{k + v(b)})
        if a_zero || b_zero {
            let k = if a_zero { a.abs.unwrap() + if b_zero { b.abs.unwrap() } else { b.v } } else { b.abs.unwrap() + a.v };
            return Series { v: k, coeffs: Vec::new(), abs: Some(k) };
        }
        let v = a.v + b.v;
        let rel = min_opt(a.relative_precision(), b.relative_precision());
        let abs = rel.map(|r| v + r);
        let mut len = a.coeffs.len() + b.coeffs.len() - 1;
        if let Some(r) = rel {
            len = len.min(r.max(0) as usize);
        }
        let mut out = vec![inner.zero(); len];
        for (i, x) in a.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] = inner.add(&out[i + j], &inner.mul(x, y));
            }
        }
        normalize(inner, v, out, abs)
    }

    pub fn format<D: Domain>(inner: &D, a: &Series<D::Elem>) -> String {
        let cs: Vec<String> = a.coeffs.iter().map(|c| inner.format(c)).collect();
        match a.abs {
            None => format!("(series :v {} :coeffs ({}))", a.v, cs.join(" ")),
            Some(p) => format!("(series :v {} :coeffs ({}) :abs {})", a.v, cs.join(" "), p),
        }
    }

    pub fn parse<D: Domain>(inner: &D, s: &Sexp) -> Result<Series<D::Elem>, FormsError> {
        if s.head() != Some("series") {
            // a bare coefficient is a constant series
            return Ok(constant(inner, inner.parse(s)?));
        }
        let items = s.as_list().expect("head implies list");
        let (v, coeffs) = keyword_pair(items, ":v", ":coeffs")?;
        let v: i64 = v.as_atom().and_then(|a| a.parse().ok()).ok_or_else(|| FormsError::Literal("bad :v".into()))?;
        let list = coeffs.as_list().ok_or_else(|| FormsError::Literal(":coeffs must be a list".into()))?;
        let cs = list.iter().map(|c| inner.parse(c)).collect::<Result<Vec<_>, _>>()?;
        let abs = match items.windows(2).find(|w| w[0].as_atom() == Some(":abs")) {
            Some(w) => Some(w[1].as_atom().and_then(|a| a.parse().ok()).ok_or_else(|| FormsError::Literal("bad :abs".into()))?),
            None => None,
        };
        Ok(normalize(inner, v, cs, abs))
    }
}

/// `inner((var))`
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentDomain<D: Domain> {
    pub inner: D,
    pub var: String,
}

impl<D: Domain> LaurentDomain<D> {
    pub fn new(inner: D, var: &str) -> Self {
        LaurentDomain { inner, var: var.to_string() }
    }
    pub fn t(&self) -> Series<D::Elem> {
        series_ops::monomial(&self.inner, self.inner.one(), 1)
    }
    pub fn constant(&self, c: D::Elem) -> Series<D::Elem> {
        series_ops::constant(&self.inner, c)
    }
    pub fn series(&self, v: i64, coeffs: Vec<D::Elem>, precision: Option<usize>) -> Series<D::Elem> {
        series_ops::normalize(&self.inner, v, coeffs, precision.map(|p| v + p as i64))
    }
}

impl<D: Domain> Domain for LaurentDomain<D> {
    type Elem = Series<D::Elem>;

    fn zero(&self) -> Self::Elem {
        Series { v: 0, coeffs: Vec::new(), abs: None }
    }
    fn one(&self) -> Self::Elem {
        self.constant(self.inner.one())
    }
    fn from_int(&self, n: i64) -> Self::Elem {
        self.constant(self.inner.from_int(n))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        series_ops::add(&self.inner, a, b)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        series_ops::neg(&self.inner, a)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        series_ops::mul(&self.inner, a, b)
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.is_empty()
    }
    fn format(&self, a: &Self::Elem) -> String {
        series_ops::format(&self.inner, a)
    }
    fn parse(&self, s: &Sexp) -> Result<Self::Elem, FormsError> {
        series_ops::parse(&self.inner, s)
    }
    fn describe(&self) -> String {
        format!("{}(({}))", self.inner.describe(), self.var)
    }
}

/// Element of `F_q((t_1))...((t_m))`: a field element at depth 0, a series
/// with depth-`(k-1)` coefficients at depth `k`.
#[derive(Clone, PartialEq, Debug)]
pub enum IterElem {
    Base(FieldElem),
    Series(Series<IterElem>),
}

/// `F_q((t_1))...((t_depth))`, with `t_depth` outermost.
#[derive(Clone, Debug, PartialEq)]
pub struct IteratedDomain {
    base: FieldDesc,
    vars: Arc<Vec<String>>,
    depth: usize,
}

impl IteratedDomain {
    pub fn new(base: &FieldDesc, m: usize) -> IteratedDomain {
        let vars = (1..=m).map(|i| if m == 1 { "t".to_string() } else { format!("t{i}") }).collect();
        IteratedDomain { base: base.clone(), vars: Arc::new(vars), depth: m }
    }
    pub fn base(&self) -> &FieldDesc {
        &self.base
    }
    pub fn depth(&self) -> usize {
        self.depth
    }
    pub fn inner(&self) -> IteratedDomain {
        assert!(self.depth > 0, "field level has no inner domain");
        IteratedDomain { base: self.base.clone(), vars: self.vars.clone(), depth: self.depth - 1 }
    }
    pub fn outer_var(&self) -> &str {
        &self.vars[self.depth - 1]
    }

    pub fn constant(&self, c: FieldElem) -> IterElem {
        if self.depth == 0 {
            IterElem::Base(c)
        } else {
            let inner = self.inner();
            IterElem::Series(series_ops::constant(&inner, inner.constant(c)))
        }
    }

    /// `t_j` for `1 <= j <= depth`.
    pub fn var(&self, j: usize) -> IterElem {
        assert!((1..=self.depth).contains(&j), "no variable t{j} at depth {}", self.depth);
        let inner = self.inner();
        if j == self.depth {
            IterElem::Series(series_ops::monomial(&inner, inner.one(), 1))
        } else {
            IterElem::Series(series_ops::constant(&inner, inner.var(j)))
        }
    }

    /// Series in the outermost variable with the given inner coefficients.
    pub fn series(&self, v: i64, coeffs: Vec<IterElem>, precision: Option<usize>) -> IterElem {
        let inner = self.inner();
        IterElem::Series(series_ops::normalize(&inner, v, coeffs, precision.map(|p| v + p as i64)))
    }

    fn as_series<'a>(&self, a: &'a IterElem) -> &'a Series<IterElem> {
        match a {
            IterElem::Series(s) => s,
            IterElem::Base(_) => panic!("depth mismatch: field element at series level"),
        }
    }
    fn as_base(&self, a: &IterElem) -> FieldElem {
        match a {
            IterElem::Base(x) => *x,
            IterElem::Series(_) => panic!("depth mismatch: series at field level"),
        }
    }

    /// Valuation in the outermost variable.
    pub fn valuation(&self, a: &IterElem) -> Result<Option<i64>, FormsError> {
        self.as_series(a).valuation()
    }

    /// Leading coefficient in the outermost variable (one level down).
    pub fn leading(&self, a: &IterElem) -> Option<IterElem> {
        self.as_series(a).coeffs.first().cloned()
    }

    /// Every coefficient known exactly at every level.
    pub fn is_exact(&self, a: &IterElem) -> bool {
        match a {
            IterElem::Base(_) => true,
            IterElem::Series(s) => {
                let inner = self.inner();
                s.is_exact() && s.coeffs.iter().all(|c| inner.is_exact(c))
            }
        }
    }

    /// Uniform random element: each level gets a valuation in `[-1, 1]` and
    /// `precision` coefficients; exact, so evaluation needs no precision bookkeeping.
    pub fn random(&self, rng: &mut impl Rng, precision: usize) -> IterElem {
        if self.depth == 0 {
            return IterElem::Base(self.base.from_code(rng.gen_range(0..self.base.order() as u32)).expect("in range"));
        }
        let inner = self.inner();
        let v = rng.gen_range(-1..=1);
        let coeffs = (0..precision).map(|_| inner.random(rng, precision)).collect();
        self.series(v, coeffs, None)
    }
}

impl Domain for IteratedDomain {
    type Elem = IterElem;

    fn zero(&self) -> IterElem {
        if self.depth == 0 {
            IterElem::Base(self.base.zero())
        } else {
            IterElem::Series(Series { v: 0, coeffs: Vec::new(), abs: None })
        }
    }
    fn one(&self) -> IterElem {
        self.constant(self.base.one())
    }
    fn from_int(&self, n: i64) -> IterElem {
        self.constant(self.base.from_int(n))
    }
    fn add(&self, a: &IterElem, b: &IterElem) -> IterElem {
        if self.depth == 0 {
            IterElem::Base(self.base.add(self.as_base(a), self.as_base(b)))
        } else {
            IterElem::Series(series_ops::add(&self.inner(), self.as_series(a), self.as_series(b)))
        }
    }
    fn neg(&self, a: &IterElem) -> IterElem {
        if self.depth == 0 {
            IterElem::Base(self.base.neg(self.as_base(a)))
        } else {
            IterElem::Series(series_ops::neg(&self.inner(), self.as_series(a)))
        }
    }
    fn mul(&self, a: &IterElem, b: &IterElem) -> IterElem {
        if self.depth == 0 {
            IterElem::Base(self.base.mul(self.as_base(a), self.as_base(b)))
        } else {
            IterElem::Series(series_ops::mul(&self.inner(), self.as_series(a), self.as_series(b)))
        }
    }
    fn is_zero(&self, a: &IterElem) -> bool {
        match a {
            IterElem::Base(x) => self.base.is_zero(*x),
            IterElem::Series(s) => s.coeffs.is_empty(),
        }
    }
    fn format(&self, a: &IterElem) -> String {
        if self.depth == 0 {
            self.base.format(self.as_base(a))
        } else {
            series_ops::format(&self.inner(), self.as_series(a))
        }
    }
    fn parse(&self, s: &Sexp) -> Result<IterElem, FormsError> {
        if self.depth == 0 {
            Ok(IterElem::Base(self.base.elem_from_sexp(s)?))
        } else {
            Ok(IterElem::Series(series_ops::parse(&self.inner(), s)?))
        }
    }
    fn describe(&self) -> String {
        let mut s = format!("F_{}", self.base.spec());
        for v in &self.vars[..self.depth] {
            s.push_str(&format!("(({v}))"));
        }
        s
    }
}

// ---------------------------------------------------------------------------
// anisotropy certificates

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    Anisotropic,
    IsotropicWithWitness,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Falsification {
    pub trials: u64,
    pub precision: usize,
    pub seed: u64,
    pub witnesses_found: u64,
    /// Trials where the value's valuation matched the block minimum predicted
    /// by the valuation argument.
    pub valuation_checks_passed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnisotropyCertificate {
    pub conclusion: Conclusion,
    pub domain: String,
    pub residue_form: String,
    pub form: String,
    pub variables: usize,
    pub witness: Option<Vec<String>>,
    pub trace: Vec<String>,
    pub falsification: Option<Falsification>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FalsifyConfig {
    pub trials: u64,
    pub precision: usize,
    pub seed: u64,
}

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_PRECISION: usize = 8;

impl FalsifyConfig {
    pub fn new(trials: u64, precision: usize, seed: u64) -> Self {
        FalsifyConfig { trials, precision, seed }
    }
}

impl Default for FalsifyConfig {
    fn default() -> Self {
        FalsifyConfig { trials: DEFAULT_TRIALS, precision: DEFAULT_PRECISION, seed: 0 }
    }
}

/// `q_res (x) <<t_1, ..., t_m>>_d` over `F_q((t_1))...((t_m))`, laid out in
/// blocks by powers of `t_m` (outermost first), so the first `n` slots are
/// `q_res` itself. This is `<<t_m>> (x) (... (<<t_1>> (x) q_res))`, isometric
/// to the other tensor order.
pub fn lifted_form(q_res: &DiagonalForm<FieldDesc>, m: usize) -> Result<DiagonalForm<IteratedDomain>, FormsError> {
    let dom = IteratedDomain::new(q_res.domain(), m);
    let d = q_res.degree();
    let mut coeffs: Vec<IterElem> = q_res.coeffs().iter().map(|&a| dom.constant(a)).collect();
    for j in 1..=m {
        let t = dom.var(j);
        let mut next = Vec::with_capacity(coeffs.len() * d as usize);
        for i in 0..d {
            let ti = dom.pow(&t, i);
            next.extend(coeffs.iter().map(|c| dom.mul(&ti, c)));
        }
        coeffs = next;
    }
    DiagonalForm::new(&dom, d, coeffs)
}

/// Single uniformizer: `local_params_anisotropy(q_res, 1, ...)`.
pub fn dvr_anisotropy_check(
    q_res: &DiagonalForm<FieldDesc>,
    cfg: FalsifyConfig,
) -> Result<AnisotropyCertificate, FormsError> {
    local_params_anisotropy(q_res, 1, cfg)
}

/// Certificate for `q_res (x) <<t_1, ..., t_m>>_d`. Step 0 is an exhaustive
/// zero search over the residue field; each later step adjoins one
/// uniformizer and records the valuation argument. A seeded search over
/// random series vectors then tries to break the conclusion.
pub fn local_params_anisotropy(
    q_res: &DiagonalForm<FieldDesc>,
    m: usize,
    cfg: FalsifyConfig,
) -> Result<AnisotropyCertificate, FormsError> {
    let f = q_res.domain();
    let d = q_res.degree();
    let n = q_res.len();
    let big = lifted_form(q_res, m)?;
    let dom = big.domain().clone();
    let mut trace = Vec::new();
    let residue = find_zero(q_res, SearchMode::exhaustive())?;
    if let ZeroSearch::Witness(w) = residue {
        let mut lifted: Vec<IterElem> = w.iter().map(|&x| dom.constant(x)).collect();
        lifted.resize(big.len(), dom.zero());
        let value = big.eval(&lifted)?;
        assert!(dom.is_zero(&value), "lifted residue witness must stay a zero");
        trace.push(format!(
            "residue form {} has the zero ({}) over F_{}",
            q_res.literal(),
            w.iter().map(|x| f.format(*x)).collect::<Vec<_>>().join(", "),
            f.spec()
        ));
        trace.push("constant lift into the first block, zeros elsewhere".into());
        return Ok(AnisotropyCertificate {
            conclusion: Conclusion::IsotropicWithWitness,
            domain: dom.describe(),
            residue_form: q_res.literal(),
            form: big.literal(),
            variables: big.len(),
            witness: Some(lifted.iter().map(|x| dom.format(x)).collect()),
            trace,
            falsification: None,
        });
    }
    trace.push(format!(
        "step 0: {} has no nontrivial zero over F_{} (exhaustive over {}^{} vectors)",
        q_res.literal(),
        f.spec(),
        f.order(),
        n
    ));
    for j in 1..=m {
        trace.push(format!(
            "step {j}: over the valuation ring of t{j}, a form whose reduction is anisotropic takes values of valuation d*min v(x_i); \
             for x != 0 split into blocks x_0..x_{}, v(t{j}^i q_{}(x_i)) = i (mod {d}), the block valuations are pairwise distinct, \
             so v(q_{j}(x)) is their minimum and finite",
            d - 1,
            j - 1
        ));
    }
    if m == 0 {
        return Ok(AnisotropyCertificate {
            conclusion: Conclusion::Anisotropic,
            domain: dom.describe(),
            residue_form: q_res.literal(),
            form: big.literal(),
            variables: big.len(),
            witness: None,
            trace,
            falsification: None,
        });
    }
    let falsification = falsify(&big, q_res.len(), cfg);
    let conclusion = if falsification.witnesses_found == 0 && falsification.valuation_checks_passed == falsification.trials {
        Conclusion::Anisotropic
    } else {
        Conclusion::Inconclusive
    };
    Ok(AnisotropyCertificate {
        conclusion,
        domain: dom.describe(),
        residue_form: q_res.literal(),
        form: big.literal(),
        variables: big.len(),
        witness: None,
        trace,
        falsification: Some(falsification),
    })
}

/// Random nonzero vectors; each value must be nonzero with outer valuation
/// equal to the minimum over the `d` outer blocks.
fn falsify(big: &DiagonalForm<IteratedDomain>, residue_len: usize, cfg: FalsifyConfig) -> Falsification {
    let dom = big.domain();
    let d = big.degree() as usize;
    let block = big.len() / d;
    debug_assert!(block >= residue_len);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Falsification {
        trials: cfg.trials,
        precision: cfg.precision,
        seed: cfg.seed,
        witnesses_found: 0,
        valuation_checks_passed: 0,
    };
    for _ in 0..cfg.trials {
        let x: Vec<IterElem> = loop {
            let x: Vec<IterElem> = (0..big.len())
                .map(|_| if rng.gen_bool(0.25) { dom.zero() } else { dom.random(&mut rng, cfg.precision) })
                .collect();
            if x.iter().any(|e| !dom.is_zero(e)) {
                break x;
            }
        };
        let value = big.eval(&x).expect("length");
        if dom.is_zero(&value) {
            out.witnesses_found += 1;
            continue;
        }
        let block_vals: Vec<Option<i64>> = (0..d)
            .map(|i| {
                let part = DiagonalForm { domain: dom.clone(), d: big.d, coeffs: big.coeffs[i * block..(i + 1) * block].to_vec() };
                dom.valuation(&part.eval(&x[i * block..(i + 1) * block]).expect("length")).expect("exact")
            })
            .collect();
        let residues_distinct = block_vals
            .iter()
            .enumerate()
            .all(|(i, v)| v.is_none_or(|v| v.rem_euclid(d as i64) == i as i64));
        let min = block_vals.iter().flatten().min().copied();
        if residues_distinct && min.is_some() && dom.valuation(&value).expect("exact") == min {
            out.valuation_checks_passed += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> FieldDesc {
        FieldDesc::prime(p).unwrap()
    }

    fn form(f: &FieldDesc, d: u32, cs: &[i64]) -> DiagonalForm<FieldDesc> {
        DiagonalForm::new(f, d, cs.iter().map(|&c| f.from_int(c)).collect()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f3 = fp(3);
        let q = form(&f3, 2, &[1, 1]);
        assert_eq!(q.eval(&[f3.one(), f3.one()]).unwrap(), f3.from_int(2));
        assert_eq!(q.eval(&[f3.zero(), f3.zero()]).unwrap(), f3.zero());
        assert!(matches!(q.eval(&[f3.one()]), Err(FormsError::LengthMismatch { got: 1, want: 2 })));
        let f2 = fp(2);
        let c = form(&f2, 3, &[1, 1]);
        assert_eq!(c.eval(&[f2.one(), f2.one()]).unwrap(), f2.zero());
        assert_eq!(DiagonalForm::new(&f3, 2, vec![f3.one(), f3.zero()]).unwrap_err(), FormsError::ZeroCoefficient(1));
    }

    #[test]
    fn tensor_and_pfister_order() {
        let f7 = fp(7);
        let (a, b) = (f7.from_int(2), f7.from_int(3));
        let p = pfister(&f7, 2, &[a, b]).unwrap();
        assert_eq!(p.coeffs(), &[f7.one(), b, a, f7.mul(a, b)]);
        let p3 = pfister(&f7, 3, &[a]).unwrap();
        assert_eq!(p3.coeffs(), &[f7.one(), a, f7.mul(a, a)]);
        assert_eq!(pfister(&f7, 2, &[]).unwrap().coeffs(), &[f7.one()]);
        let g = form(&f7, 2, &[3, 5]);
        let one = form(&f7, 2, &[1]);
        assert_eq!(one.tensor(&g).unwrap(), g);
        assert_eq!(form(&f7, 3, &[1]).tensor(&g).unwrap_err(), FormsError::DegreeMismatch(3, 2));
        assert_eq!(DiagonalForm::parse(&f7, &g.literal()).unwrap(), g);
    }

    #[test]
    fn zero_search_examples() {
        let f3 = fp(3);
        assert_eq!(find_zero(&form(&f3, 2, &[1, 1]), SearchMode::exhaustive()).unwrap(), ZeroSearch::Anisotropic);
        let f5 = fp(5);
        let w = find_zero(&form(&f5, 2, &[1, 1]), SearchMode::exhaustive()).unwrap();
        assert_eq!(w, ZeroSearch::Witness(vec![f5.one(), f5.from_int(2)]));
        let r = find_zero(&form(&f5, 2, &[1, 1]), SearchMode::Random { trials: 1000, seed: 1 }).unwrap();
        assert!(r.is_isotropic());
        let r = find_zero(&form(&f3, 2, &[1, 1]), SearchMode::Random { trials: 100, seed: 1 }).unwrap();
        assert_eq!(r, ZeroSearch::TrialsExhausted);
        assert!(matches!(
            find_zero(&form(&f5, 2, &[1, 1]), SearchMode::Exhaustive { budget: 10 }),
            Err(FormsError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn dp_matches_brute_force() {
        for (p, k) in [(2, 2), (3, 1), (3, 2), (5, 1), (7, 1)] {
            let f = FieldDesc::galois(p, k).unwrap();
            let units: Vec<FieldElem> = f.units().collect();
            for d in [2, 3] {
                for i in 0..units.len() {
                    for j in 0..units.len() {
                        let cs = vec![units[i], units[j], units[(i * j + 1) % units.len()]];
                        for n in 1..=3 {
                            let q = DiagonalForm::new(&f, d, cs[..n].to_vec()).unwrap();
                            let got = find_zero(&q, SearchMode::exhaustive()).unwrap();
                            assert_eq!(got.witness().map(<[_]>::to_vec), find_zero_brute_force(&q));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn springer_small() {
        let rep = springer_experiment(2, &fp(3), 3, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(rep.forms_checked, 4);
        assert!(rep.pass());
        assert!(springer_experiment(2, &fp(3), 2, 2, DEFAULT_BUDGET).is_err());
        let rep = springer_experiment(3, &fp(2), 2, 2, DEFAULT_BUDGET).unwrap();
        assert!(rep.pass());
    }

    #[test]
    fn series_valuations() {
        let f2 = fp(2);
        let dom = LaurentDomain::new(f2.clone(), "t");
        let t = dom.t();
        assert_eq!(dom.mul(&t, &t).valuation().unwrap(), Some(2));
        assert_eq!(dom.add(&t, &t).valuation().unwrap(), None);
        let f5 = fp(5);
        let dom = LaurentDomain::new(f5.clone(), "t");
        let t = dom.t();
        let one = dom.one();
        let prod = dom.mul(&dom.add(&one, &t), &dom.sub(&one, &t));
        assert_eq!(prod.valuation().unwrap(), Some(0));
        assert_eq!(prod.coeffs, vec![f5.one(), f5.zero(), f5.from_int(-1)]);
    }

    #[test]
    fn series_precision_is_pessimistic() {
        let f5 = fp(5);
        let dom = LaurentDomain::new(f5.clone(), "t");
        // 1 + 2t + O(t^3) and t^-1 (3 + O(t^2))
        let a = dom.series(0, vec![f5.one(), f5.from_int(2), f5.zero()], Some(3));
        let b = dom.series(-1, vec![f5.from_int(3), f5.zero()], Some(2));
        let ab = dom.mul(&a, &b);
        assert_eq!((ab.v, ab.abs), (-1, Some(1)));
        let s = dom.add(&a, &b);
        assert_eq!(s.abs, Some(1));
        // cancellation down to the noise floor
        let c = dom.series(0, vec![f5.one()], Some(2));
        let z = dom.sub(&c, &dom.one());
        assert_eq!(z.valuation().unwrap_err(), FormsError::PrecisionExhausted);
        let lit = dom.format(&ab);
        assert_eq!(dom.parse(&sexp::parse(&lit).unwrap()).unwrap(), ab);
        let parsed = dom.parse(&sexp::parse("(series :v -1 :coeffs (1 0 2))").unwrap()).unwrap();
        assert_eq!(parsed.v, -1);
        assert_eq!(parsed.coeffs.len(), 3);
    }

    #[test]
    fn iterated_domain_arithmetic() {
        let f5 = fp(5);
        let dom = IteratedDomain::new(&f5, 2);
        let t1 = dom.var(1);
        let t2 = dom.var(2);
        // t1 is a unit for the outer valuation, t2 is not
        assert_eq!(dom.valuation(&t1).unwrap(), Some(0));
        assert_eq!(dom.valuation(&t2).unwrap(), Some(1));
        let x = dom.mul(&t1, &t2);
        assert_eq!(dom.valuation(&x).unwrap(), Some(1));
        let lead = dom.leading(&x).unwrap();
        assert_eq!(dom.inner().valuation(&lead).unwrap(), Some(1));
        assert_eq!(dom.describe(), "F_5((t1))((t2))");
        assert!(dom.is_zero(&dom.sub(&x, &x)));
    }

    #[test]
    fn dvr_fixtures() {
        let f5 = fp(5);
        let cfg = FalsifyConfig::new(300, 8, 7);
        let cert = dvr_anisotropy_check(&form(&f5, 2, &[1, -2]), cfg).unwrap();
        assert_eq!(cert.conclusion, Conclusion::Anisotropic);
        assert_eq!(cert.variables, 4);
        assert_eq!(cert.domain, "F_5((t))");
        let iso = dvr_anisotropy_check(&form(&f5, 2, &[1, 1]), cfg).unwrap();
        assert_eq!(iso.conclusion, Conclusion::IsotropicWithWitness);
        let w = iso.witness.unwrap();
        assert_eq!(w, vec!["(series :v 0 :coeffs (1))", "(series :v 0 :coeffs (2))", "(series :v 0 :coeffs ())", "(series :v 0 :coeffs ())"]);
        let f7 = fp(7);
        let cube = dvr_anisotropy_check(&form(&f7, 3, &[1, -2]), cfg).unwrap();
        assert_eq!(cube.conclusion, Conclusion::Anisotropic);
        assert_eq!(cube.variables, 6);
    }

    #[test]
    fn lifted_form_layout() {
        let f5 = fp(5);
        let big = lifted_form(&form(&f5, 2, &[1, -2]), 1).unwrap();
        let dom = big.domain();
        let lits: Vec<String> = big.coeffs().iter().map(|c| dom.format(c)).collect();
        assert_eq!(lits, vec![
            "(series :v 0 :coeffs (1))",
            "(series :v 0 :coeffs (3))",
            "(series :v 1 :coeffs (1))",
            "(series :v 1 :coeffs (3))",
        ]);
    }

    #[test]
    fn local_params_two_steps() {
        let f5 = fp(5);
        let cert = local_params_anisotropy(&form(&f5, 2, &[1, -2]), 2, FalsifyConfig::new(100, 6, 3)).unwrap();
        assert_eq!(cert.conclusion, Conclusion::Anisotropic);
        assert_eq!(cert.variables, 8);
        assert_eq!(cert.trace.len(), 3);
        let base = local_params_anisotropy(&form(&f5, 2, &[1, -2]), 0, FalsifyConfig::new(10, 1, 3)).unwrap();
        assert_eq!(base.variables, 2);
        assert_eq!(base.trace.len(), 1);
    }
}
