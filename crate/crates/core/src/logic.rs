//! First-order formulas in the language of rings, a brute-force evaluator
//! over finite fields, and emitters for the formulas used in the definability
//! arguments. Subformulas that are only cited, never constructed, appear as
//! named holes and are filled by bindings at evaluation time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::galois::{FieldDesc, FieldElem};
use crate::sexp::{self, ParseError, Sexp};

pub const DEFAULT_EVAL_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("hole {0} has no binding")]
    UnboundPlaceholder(String),
    #[error("variable {0} is free and unassigned")]
    UnassignedVariable(String),
    #[error("hole {name} used with {got} arguments, expected {want}")]
    ArityMismatch { name: String, got: usize, want: usize },
    #[error("evaluation exceeded {0} assignment visits")]
    BudgetExceeded(u64),
    #[error("unsupported degree {0}")]
    UnsupportedDegree(u32),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("binding for {0} refers to itself")]
    RecursiveBinding(String),
    #[error("bad assignment: {0}")]
    Assignment(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Zero,
    One,
    Var(String),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    Hole(String, Vec<String>),
}

// -- constructors -------------------------------------------------------------

pub fn var(name: &str) -> Term {
    Term::Var(name.to_string())
}

impl Term {
    pub fn add(self, o: Term) -> Term {
        Term::Add(Box::new(self), Box::new(o))
    }
    pub fn sub(self, o: Term) -> Term {
        Term::Sub(Box::new(self), Box::new(o))
    }
    pub fn mul(self, o: Term) -> Term {
        Term::Mul(Box::new(self), Box::new(o))
    }
    /// `x * x * ... * x`, `e >= 1`; `1` for `e = 0`.
    pub fn pow(&self, e: u32) -> Term {
        if e == 0 {
            return Term::One;
        }
        let mut t = self.clone();
        for _ in 1..e {
            t = t.mul(self.clone());
        }
        t
    }
    pub fn eq(self, o: Term) -> Formula {
        Formula::Eq(self, o)
    }
    /// `1 + 1 + ... + 1`; `0` for `n = 0`.
    pub fn numeral(n: u32) -> Term {
        if n == 0 {
            return Term::Zero;
        }
        (1..n).fold(Term::One, |acc, _| acc.add(Term::One))
    }

    fn vars_into(&self, out: &mut Vec<String>) {
        match self {
            Term::Zero | Term::One => {}
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.vars_into(out);
                b.vars_into(out);
            }
        }
    }

    fn rename(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(v) if v == from => Term::Var(to.to_string()),
            Term::Zero | Term::One | Term::Var(_) => self.clone(),
            Term::Add(a, b) => a.rename(from, to).add(b.rename(from, to)),
            Term::Sub(a, b) => a.rename(from, to).sub(b.rename(from, to)),
            Term::Mul(a, b) => a.rename(from, to).mul(b.rename(from, to)),
        }
    }

    pub fn eval(&self, f: &FieldDesc, env: &Env) -> Result<FieldElem, LogicError> {
        Ok(match self {
            Term::Zero => f.zero(),
            Term::One => f.one(),
            Term::Var(v) => env.get(v).ok_or_else(|| LogicError::UnassignedVariable(v.clone()))?,
            Term::Add(a, b) => f.add(a.eval(f, env)?, b.eval(f, env)?),
            Term::Sub(a, b) => f.sub(a.eval(f, env)?, b.eval(f, env)?),
            Term::Mul(a, b) => f.mul(a.eval(f, env)?, b.eval(f, env)?),
        })
    }
}

impl Formula {
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
    pub fn and(self, o: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(o))
    }
    pub fn or(self, o: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(o))
    }
    pub fn implies(self, o: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(o))
    }
    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }
    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(body))
    }
    pub fn exists_all(vars: &[String], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
    }
    pub fn forall_all(vars: &[String], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v, acc))
    }
    pub fn hole(name: &str, args: &[&str]) -> Formula {
        Formula::Hole(name.to_string(), args.iter().map(|s| s.to_string()).collect())
    }
    /// Right-nested conjunction; `0 = 0` when empty.
    pub fn conj(parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => Term::Zero.eq(Term::Zero),
            Some(last) => it.fold(last, |acc, f| f.and(acc)),
        }
    }
    pub fn truth() -> Formula {
        Term::Zero.eq(Term::Zero)
    }
    pub fn falsity() -> Formula {
        Term::Zero.eq(Term::One)
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.free_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_into(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let mut push = |vs: Vec<String>, bound: &Vec<String>| {
            for v in vs {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::Eq(a, b) => {
                let mut vs = Vec::new();
                a.vars_into(&mut vs);
                b.vars_into(&mut vs);
                push(vs, bound);
            }
            Formula::Hole(_, args) => push(args.clone(), bound),
            Formula::Not(a) => a.free_into(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.free_into(bound, out);
                b.free_into(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.free_into(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Eq(a, b) => {
                let mut vs = Vec::new();
                a.vars_into(&mut vs);
                b.vars_into(&mut vs);
                out.extend(vs);
            }
            Formula::Hole(_, args) => out.extend(args.iter().cloned()),
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.walk(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            Formula::Eq(..) | Formula::Hole(..) => {}
        }
    }

    /// `(forall, exists)` quantifier counts.
    pub fn quantifier_counts(&self) -> (usize, usize) {
        let (mut fa, mut ex) = (0, 0);
        self.walk(&mut |f| match f {
            Formula::Forall(..) => fa += 1,
            Formula::Exists(..) => ex += 1,
            _ => {}
        });
        (fa, ex)
    }

    /// Hole names with their arities. Conflicting arities are an error.
    pub fn holes(&self) -> Result<BTreeMap<String, usize>, LogicError> {
        let mut out: BTreeMap<String, usize> = BTreeMap::new();
        let mut err = None;
        self.walk(&mut |f| {
            if let Formula::Hole(name, args) = f {
                match out.get(name) {
                    Some(&n) if n != args.len() && err.is_none() => {
                        err = Some(LogicError::ArityMismatch { name: name.clone(), got: args.len(), want: n });
                    }
                    Some(_) => {}
                    None => {
                        out.insert(name.clone(), args.len());
                    }
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// Rename free occurrences of `from` to `to`. `to` must not be bound
    /// anywhere inside, which holds for the emitters' fresh names.
    pub fn rename_free(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.rename(from, to), b.rename(from, to)),
            Formula::Hole(n, args) => {
                Formula::Hole(n.clone(), args.iter().map(|a| if a == from { to.to_string() } else { a.clone() }).collect())
            }
            Formula::Not(a) => a.rename_free(from, to).not(),
            Formula::And(a, b) => a.rename_free(from, to).and(b.rename_free(from, to)),
            Formula::Or(a, b) => a.rename_free(from, to).or(b.rename_free(from, to)),
            Formula::Implies(a, b) => a.rename_free(from, to).implies(b.rename_free(from, to)),
            Formula::Exists(v, body) if v != from => Formula::exists(v, body.rename_free(from, to)),
            Formula::Forall(v, body) if v != from => Formula::forall(v, body.rename_free(from, to)),
            Formula::Exists(..) | Formula::Forall(..) => self.clone(),
        }
    }
}

// -- printing and parsing ----------------------------------------------------

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => f.write_str("0"),
            Term::One => f.write_str("1"),
            Term::Var(v) => f.write_str(v),
            Term::Add(a, b) => write!(f, "(+ {a} {b})"),
            Term::Sub(a, b) => write!(f, "(- {a} {b})"),
            Term::Mul(a, b) => write!(f, "(* {a} {b})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Or(a, b) => write!(f, "(or {a} {b})"),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Exists(v, a) => write!(f, "(exists {v} {a})"),
            Formula::Forall(v, a) => write!(f, "(forall {v} {a})"),
            Formula::Hole(n, args) => {
                write!(f, "(hole {n}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

const KEYWORDS: [&str; 13] =
    ["+", "-", "*", "=", "not", "and", "or", "implies", "exists", "forall", "hole", "lambda", "elt"];

fn var_name(s: &Sexp) -> Result<String, ParseError> {
    match s.as_atom() {
        Some(a) if is_var_name(a) => Ok(a.to_string()),
        _ => Err(ParseError::new(s.pos(), format!("expected a variable name, got {s}"))),
    }
}

fn is_var_name(a: &str) -> bool {
    let mut chars = a.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&a)
}

pub fn parse_term(s: &Sexp) -> Result<Term, ParseError> {
    if let Some(a) = s.as_atom() {
        return match a {
            "0" => Ok(Term::Zero),
            "1" => Ok(Term::One),
            _ => Ok(Term::Var(var_name(s)?)),
        };
    }
    let items = s.as_list().expect("not an atom");
    let op = s.head().ok_or_else(|| ParseError::new(s.pos(), "empty term"))?;
    if !matches!(op, "+" | "-" | "*") {
        return Err(ParseError::new(s.pos(), format!("unknown term operator {op}")));
    }
    if items.len() != 3 {
        return Err(ParseError::new(s.pos(), format!("{op} takes 2 arguments, got {}", items.len() - 1)));
    }
    let (a, b) = (parse_term(&items[1])?, parse_term(&items[2])?);
    Ok(match op {
        "+" => a.add(b),
        "-" => a.sub(b),
        _ => a.mul(b),
    })
}

pub fn parse_formula_sexp(s: &Sexp) -> Result<Formula, ParseError> {
    let items = s.as_list().ok_or_else(|| ParseError::new(s.pos(), "expected a formula"))?;
    let op = s.head().ok_or_else(|| ParseError::new(s.pos(), "empty formula"))?;
    let arity = |n: usize| {
        if items.len() == n + 1 {
            Ok(())
        } else {
            Err(ParseError::new(s.pos(), format!("{op} takes {n} arguments, got {}", items.len() - 1)))
        }
    };
    match op {
        "=" => {
            arity(2)?;
            Ok(Formula::Eq(parse_term(&items[1])?, parse_term(&items[2])?))
        }
        "not" => {
            arity(1)?;
            Ok(parse_formula_sexp(&items[1])?.not())
        }
        "and" | "or" | "implies" => {
            arity(2)?;
            let (a, b) = (parse_formula_sexp(&items[1])?, parse_formula_sexp(&items[2])?);
            Ok(match op {
                "and" => a.and(b),
                "or" => a.or(b),
                _ => a.implies(b),
            })
        }
        "exists" | "forall" => {
            arity(2)?;
            let v = var_name(&items[1])?;
            let body = parse_formula_sexp(&items[2])?;
            Ok(if op == "exists" { Formula::exists(&v, body) } else { Formula::forall(&v, body) })
        }
        "hole" => {
            if items.len() < 2 {
                return Err(ParseError::new(s.pos(), "hole needs a name"));
            }
            let name = items[1].as_atom().ok_or_else(|| ParseError::new(items[1].pos(), "hole name must be an atom"))?;
            let args = items[2..].iter().map(var_name).collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::Hole(name.to_string(), args))
        }
        _ => Err(ParseError::new(s.pos(), format!("unknown connective {op}"))),
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    parse_formula_sexp(&sexp::parse(src)?)
}

// -- bindings and evaluation -------------------------------------------------

/// Body for a hole: `(lambda (x ...) body)` or a plain formula whose
/// parameters are its free variables in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lambda {
    pub params: Vec<String>,
    pub body: Formula,
}

impl Lambda {
    pub fn new(params: &[&str], body: Formula) -> Lambda {
        Lambda { params: params.iter().map(|s| s.to_string()).collect(), body }
    }

    pub fn from_formula(body: Formula) -> Lambda {
        Lambda { params: body.free_vars(), body }
    }

    pub fn parse(src: &str) -> Result<Lambda, ParseError> {
        let s = sexp::parse(src)?;
        if s.head() == Some("lambda") {
            let items = s.as_list().expect("head implies list");
            if items.len() != 3 {
                return Err(ParseError::new(s.pos(), "lambda takes a parameter list and a body"));
            }
            let params = items[1]
                .as_list()
                .ok_or_else(|| ParseError::new(items[1].pos(), "expected parameter list"))?
                .iter()
                .map(var_name)
                .collect::<Result<Vec<_>, _>>()?;
            let body = parse_formula_sexp(&items[2])?;
            Ok(Lambda { params, body })
        } else {
            Ok(Lambda::from_formula(parse_formula_sexp(&s)?))
        }
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(lambda ({}) {})", self.params.join(" "), self.body)
    }
}

pub type Bindings = BTreeMap<String, Lambda>;

/// Variable assignment as a stack; later entries shadow earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Env {
    stack: Vec<(String, FieldElem)>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }
    pub fn from_pairs(pairs: &[(&str, FieldElem)]) -> Env {
        Env { stack: pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect() }
    }
    pub fn set(&mut self, name: &str, v: FieldElem) {
        self.stack.push((name.to_string(), v));
    }
    pub fn get(&self, name: &str) -> Option<FieldElem> {
        self.stack.iter().rev().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

/// Formula with variables resolved to frame slots and holes resolved to
/// compiled binding bodies.
#[derive(Debug, Clone)]
enum CTerm {
    Const(FieldElem),
    Slot(usize),
    Add(Box<CTerm>, Box<CTerm>),
    Sub(Box<CTerm>, Box<CTerm>),
    Mul(Box<CTerm>, Box<CTerm>),
}

#[derive(Debug, Clone)]
enum CFormula {
    Eq(CTerm, CTerm),
    Not(Box<CFormula>),
    And(Box<CFormula>, Box<CFormula>),
    Or(Box<CFormula>, Box<CFormula>),
    Implies(Box<CFormula>, Box<CFormula>),
    Quant { exists: bool, slot: usize, body: Box<CFormula> },
    Hole { lambda: usize, args: Vec<usize> },
}

struct CLambda {
    slots: usize,
    body: CFormula,
}

struct Compiler<'a> {
    field: &'a FieldDesc,
    bindings: &'a Bindings,
    lambdas: Vec<Option<CLambda>>,
    index: BTreeMap<String, usize>,
}

/// Lexical scope of one frame: visible names and the next free slot.
struct Scope {
    names: Vec<(String, usize)>,
    next: usize,
    max: usize,
}

impl Scope {
    fn lookup(&self, v: &str) -> Option<usize> {
        self.names.iter().rev().find(|(n, _)| n == v).map(|&(_, s)| s)
    }
    fn push(&mut self, v: &str) -> usize {
        let s = self.next;
        self.names.push((v.to_string(), s));
        self.next += 1;
        self.max = self.max.max(self.next);
        s
    }
    fn pop(&mut self) {
        self.names.pop();
        self.next -= 1;
    }
}

impl<'a> Compiler<'a> {
    fn term(&self, t: &Term, scope: &Scope) -> Result<CTerm, LogicError> {
        Ok(match t {
            Term::Zero => CTerm::Const(self.field.zero()),
            Term::One => CTerm::Const(self.field.one()),
            Term::Var(v) => CTerm::Slot(scope.lookup(v).ok_or_else(|| LogicError::UnassignedVariable(v.clone()))?),
            Term::Add(a, b) => CTerm::Add(Box::new(self.term(a, scope)?), Box::new(self.term(b, scope)?)),
            Term::Sub(a, b) => CTerm::Sub(Box::new(self.term(a, scope)?), Box::new(self.term(b, scope)?)),
            Term::Mul(a, b) => CTerm::Mul(Box::new(self.term(a, scope)?), Box::new(self.term(b, scope)?)),
        })
    }

    fn formula(&mut self, phi: &Formula, scope: &mut Scope) -> Result<CFormula, LogicError> {
        let sub = |c: &mut Self, x: &Formula, s: &mut Scope| c.formula(x, s).map(Box::new);
        Ok(match phi {
            Formula::Eq(a, b) => CFormula::Eq(self.term(a, scope)?, self.term(b, scope)?),
            Formula::Not(a) => CFormula::Not(sub(self, a, scope)?),
            Formula::And(a, b) => CFormula::And(sub(self, a, scope)?, sub(self, b, scope)?),
            Formula::Or(a, b) => CFormula::Or(sub(self, a, scope)?, sub(self, b, scope)?),
            Formula::Implies(a, b) => CFormula::Implies(sub(self, a, scope)?, sub(self, b, scope)?),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let slot = scope.push(v);
                let body = sub(self, body, scope);
                scope.pop();
                CFormula::Quant { exists: matches!(phi, Formula::Exists(..)), slot, body: body? }
            }
            Formula::Hole(name, args) => {
                let lambda = self.lambda(name, args.len())?;
                let args = args
                    .iter()
                    .map(|a| scope.lookup(a).ok_or_else(|| LogicError::UnassignedVariable(a.clone())))
                    .collect::<Result<_, _>>()?;
                CFormula::Hole { lambda, args }
            }
        })
    }

    fn lambda(&mut self, name: &str, arity: usize) -> Result<usize, LogicError> {
        let lam = self.bindings.get(name).ok_or_else(|| LogicError::UnboundPlaceholder(name.to_string()))?;
        if lam.params.len() != arity {
            return Err(LogicError::ArityMismatch { name: name.to_string(), got: arity, want: lam.params.len() });
        }
        if let Some(&i) = self.index.get(name) {
            return match self.lambdas[i] {
                Some(_) => Ok(i),
                None => Err(LogicError::RecursiveBinding(name.to_string())),
            };
        }
        let i = self.lambdas.len();
        self.lambdas.push(None);
        self.index.insert(name.to_string(), i);
        let mut scope = Scope { names: Vec::new(), next: 0, max: 0 };
        for p in &lam.params {
            scope.push(p);
        }
        let body = self.formula(&lam.body, &mut scope)?;
        self.lambdas[i] = Some(CLambda { slots: scope.max, body });
        Ok(i)
    }
}

/// Evaluation with a visit budget. Every value tried by a quantifier is one
/// visit, and quantifiers stop at the first decisive value, in field
/// enumeration order.
pub struct Evaluator<'a> {
    field: &'a FieldDesc,
    lambdas: &'a [CLambda],
    budget: u64,
    visits: u64,
}

impl<'a> Evaluator<'a> {
    pub fn visits(&self) -> u64 {
        self.visits
    }

    fn term(&self, t: &CTerm, frame: &[FieldElem]) -> FieldElem {
        let f = self.field;
        match t {
            CTerm::Const(c) => *c,
            CTerm::Slot(s) => frame[*s],
            CTerm::Add(a, b) => f.add(self.term(a, frame), self.term(b, frame)),
            CTerm::Sub(a, b) => f.sub(self.term(a, frame), self.term(b, frame)),
            CTerm::Mul(a, b) => f.mul(self.term(a, frame), self.term(b, frame)),
        }
    }

    fn eval(&mut self, phi: &CFormula, frame: &mut [FieldElem]) -> Result<bool, LogicError> {
        match phi {
            CFormula::Eq(a, b) => Ok(self.term(a, frame) == self.term(b, frame)),
            CFormula::Not(a) => Ok(!self.eval(a, frame)?),
            CFormula::And(a, b) => Ok(self.eval(a, frame)? && self.eval(b, frame)?),
            CFormula::Or(a, b) => Ok(self.eval(a, frame)? || self.eval(b, frame)?),
            CFormula::Implies(a, b) => Ok(!self.eval(a, frame)? || self.eval(b, frame)?),
            CFormula::Quant { exists, slot, body } => {
                for x in self.field.elements() {
                    self.visits += 1;
                    if self.visits > self.budget {
                        return Err(LogicError::BudgetExceeded(self.budget));
                    }
                    frame[*slot] = x;
                    if self.eval(body, frame)? == *exists {
                        return Ok(*exists);
                    }
                }
                Ok(!exists)
            }
            CFormula::Hole { lambda, args } => {
                let lam = &self.lambdas[*lambda];
                let mut inner = vec![self.field.zero(); lam.slots];
                for (i, &a) in args.iter().enumerate() {
                    inner[i] = frame[a];
                }
                self.eval(&lam.body, &mut inner)
            }
        }
    }
}

/// Truth of `phi` over `field` under `env` and `bindings`.
pub fn eval(phi: &Formula, field: &FieldDesc, env: &Env, bindings: &Bindings) -> Result<bool, LogicError> {
    eval_with_budget(phi, field, env, bindings, DEFAULT_EVAL_BUDGET)
}

/// Free variables, holes and arities are resolved before any quantifier
/// runs, so these errors do not depend on short-circuiting.
pub fn eval_with_budget(
    phi: &Formula,
    field: &FieldDesc,
    env: &Env,
    bindings: &Bindings,
    budget: u64,
) -> Result<bool, LogicError> {
    phi.holes()?;
    let mut compiler = Compiler { field, bindings, lambdas: Vec::new(), index: BTreeMap::new() };
    let mut scope = Scope { names: Vec::new(), next: 0, max: 0 };
    let mut frame = Vec::new();
    for v in phi.free_vars() {
        let x = env.get(&v).ok_or_else(|| LogicError::UnassignedVariable(v.clone()))?;
        field.check(x).map_err(|_| LogicError::Assignment(format!("{v} is not an element of F_{}", field.spec())))?;
        scope.push(&v);
        frame.push(x);
    }
    let body = compiler.formula(phi, &mut scope)?;
    frame.resize(scope.max, field.zero());
    let lambdas: Vec<CLambda> = compiler.lambdas.into_iter().map(|l| l.expect("compiled")).collect();
    let mut ev = Evaluator { field, lambdas: &lambdas, budget, visits: 0 };
    ev.eval(&body, &mut frame)
}

/// `name=value` pairs with values as field literals.
pub fn parse_assignment(field: &FieldDesc, pairs: &[String]) -> Result<Env, LogicError> {
    let mut env = Env::new();
    for p in pairs {
        let (k, v) = p.split_once('=').ok_or_else(|| LogicError::Assignment(format!("expected name=value, got {p}")))?;
        let x = field.parse_elem(v).map_err(|e| LogicError::Assignment(e.to_string()))?;
        env.set(k.trim(), x);
    }
    Ok(env)
}

// -- emitters ----------------------------------------------------------------

/// Fresh variable names that avoid a reserved set.
struct Fresh {
    avoid: BTreeSet<String>,
}

impl Fresh {
    fn new(avoid: impl IntoIterator<Item = String>) -> Fresh {
        Fresh { avoid: avoid.into_iter().collect() }
    }
    fn name(&mut self, base: &str) -> String {
        let mut cand = base.to_string();
        let mut k = 0;
        while self.avoid.contains(&cand) {
            k += 1;
            cand = format!("{base}_{k}");
        }
        self.avoid.insert(cand.clone());
        cand
    }
    fn names(&mut self, prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| self.name(&format!("{prefix}{i}"))).collect()
    }
}

fn sum(terms: Vec<Term>) -> Term {
    terms.into_iter().reduce(|a, b| a.add(b)).unwrap_or(Term::Zero)
}

fn all_zero(vars: &[String]) -> Formula {
    Formula::conj(vars.iter().map(|v| var(v).eq(Term::Zero)).collect())
}

/// `exists x_1 ... x_n (sum c_i x_i^d = 0 and not (x_1 = 0 and ... and x_n = 0))`.
/// A zero coefficient makes the formula true (a unit vector is a witness), so
/// degenerate instantiations are total.
fn rep_zero(coeffs: &[Term], d: u32, fresh: &mut Fresh, prefix: &str) -> Formula {
    let xs = fresh.names(prefix, coeffs.len());
    let lhs = sum(coeffs.iter().zip(&xs).map(|(c, x)| c.clone().mul(var(x).pow(d))).collect());
    Formula::exists_all(&xs, lhs.eq(Term::Zero).and(all_zero(&xs).not()))
}

/// `(u + w i)^d` with `i^2 = -1`, as a pair of terms.
fn pair_pow(u: &Term, w: &Term, d: u32) -> (Term, Term) {
    if d == 0 {
        return (Term::One, Term::Zero);
    }
    let mut acc = (u.clone(), w.clone());
    for _ in 1..d {
        let (a, b) = acc;
        acc = (a.clone().mul(u.clone()).sub(b.clone().mul(w.clone())), a.mul(w.clone()).add(b.mul(u.clone())));
    }
    acc
}

/// Zero representation over the pair ring `k[i]/(i^2 + 1)`: each variable is
/// `u_j + w_j i`, and both components of `sum c_j x_j^d` must vanish.
fn rep_zero_pair(coeffs: &[Term], d: u32, fresh: &mut Fresh) -> Formula {
    let n = coeffs.len();
    let mut vars = Vec::with_capacity(2 * n);
    let mut re = Vec::new();
    let mut im = Vec::new();
    for (j, c) in coeffs.iter().enumerate() {
        let u = fresh.name(&format!("u{}", j + 1));
        let w = fresh.name(&format!("w{}", j + 1));
        let (pr, pi) = pair_pow(&var(&u), &var(&w), d);
        re.push(c.clone().mul(pr));
        im.push(c.clone().mul(pi));
        vars.push(u);
        vars.push(w);
    }
    let body = sum(re).eq(Term::Zero).and(sum(im).eq(Term::Zero)).and(all_zero(&vars).not());
    Formula::exists_all(&vars, body)
}

/// Coefficients of `<<a_1, ..., a_n>>_d` as terms, `a_1` outermost.
fn pfister_terms(slots: &[Term], d: u32) -> Vec<Term> {
    let mut acc = vec![Term::One];
    for a in slots {
        let powers: Vec<Term> = (0..d).map(|i| a.pow(i)).collect();
        acc = acc.iter().flat_map(|x| powers.iter().map(move |p| mul_simplify(x, p))).collect();
    }
    acc
}

fn tensor_terms(f: &[Term], g: &[Term]) -> Vec<Term> {
    f.iter().flat_map(|a| g.iter().map(move |b| mul_simplify(a, b))).collect()
}

fn mul_simplify(a: &Term, b: &Term) -> Term {
    match (a, b) {
        (Term::One, x) | (x, Term::One) => x.clone(),
        _ => a.clone().mul(b.clone()),
    }
}

/// Free variables `c1..cn`: the form `<c1, ..., cn>_d` has a nontrivial zero.
pub fn emit_represents_zero(n: usize, d: u32) -> Formula {
    let cs: Vec<String> = (1..=n).map(|i| format!("c{i}")).collect();
    let mut fresh = Fresh::new(cs.iter().cloned());
    rep_zero(&cs.iter().map(|c| var(c)).collect::<Vec<_>>(), d, &mut fresh, "x")
}

/// Free `s, a, b`: `s = x/y` for a point of `y^2 = x^3 + a x + b` with `y != 0`.
pub fn emit_s_family() -> Formula {
    let (x, y) = (var("x"), var("y"));
    let curve = y.pow(2).eq(x.pow(3).add(var("a").mul(x.clone())).add(var("b")));
    Formula::exists("x", Formula::exists("y", Formula::conj(vec![curve, y.clone().eq(Term::Zero).not(), var("s").mul(y).eq(x)])))
}

/// Free `t, a, b`: `t = s1/s2` for nonzero `s1, s2` in the S-set.
pub fn emit_t_family() -> Formula {
    let s = emit_s_family();
    Formula::exists(
        "s1",
        Formula::exists(
            "s2",
            Formula::conj(vec![
                s.rename_free("s", "s1"),
                s.rename_free("s", "s2"),
                var("s1").eq(Term::Zero).not(),
                var("s2").eq(Term::Zero).not(),
                var("t").mul(var("s2")).eq(var("s1")),
            ]),
        ),
    )
}

/// Free `t` plus the parameters of `s_formula`:
/// `forall s1 s2 s3 (S(s1) and S(s2) and S(s3) -> <<s1, s2, t - s3>>_2 represents 0 over k(i))`,
/// where `S(v)` is `s_formula` with `var` renamed to `v` and `k(i)` is the
/// pair ring with `i^2 = -1`. If `-1` is already a square the pair ring splits
/// and the predicate speaks about the split algebra.
pub fn emit_a_s(s_formula: &Formula, var_name: &str) -> Formula {
    let mut fresh = Fresh::new(s_formula.all_vars());
    let t = fresh.name("t");
    let ss = fresh.names("s", 3);
    let slots = [var(&ss[0]), var(&ss[1]), var(&t).sub(var(&ss[2]))];
    let core = rep_zero_pair(&pfister_terms(&slots, 2), 2, &mut fresh);
    let hyp = Formula::conj(ss.iter().map(|s| s_formula.rename_free(var_name, s)).collect());
    Formula::forall_all(&ss, hyp.implies(core))
}

pub const Z_PREDICATE: &str = "Z_PREDICATE";

/// Sentence with the unary hole `pred`: the set is closed under addition, is
/// not equal to its double, and `2 != 0`. Holes take variables only, so
/// `S(x + y)` appears as `exists z (z = x + y and S(z))`.
pub fn emit_char0_sentence(pred: &str) -> Formula {
    let s = |v: &str| Formula::hole(pred, &[v]);
    let closed = Formula::forall(
        "x",
        Formula::forall(
            "y",
            s("x").and(s("y")).implies(Formula::exists("z", var("z").eq(var("x").add(var("y"))).and(s("z")))),
        ),
    );
    let not_doubled = Formula::exists(
        "x",
        s("x").and(Formula::forall("y", s("y").implies(var("x").eq(var("y").add(var("y"))).not()))),
    );
    let two = Term::One.add(Term::One).eq(Term::Zero).not();
    Formula::conj(vec![closed, not_doubled, two])
}

/// Free `t, a, b, u, c`, degree 2 only. With `f(X) = X^3 + a X + b` and the
/// twist `f(u) y^2 = f(x)`:
/// `U1(v)`: `v != 0` and `f(u) y^2 = f(v)` for some `y`;
/// `U2(v)`: `v = y1/x1 + y2/x2` for points `(x_i, y_i)` of the twist with `x_i != 0`;
/// result: `forall u1 u2 (U1(u1) and U2(u2) -> exists w (u1 w = 1 and
/// <<t - u2, w>>_2 (x) <1, -c>_2 represents 0))`.
pub fn emit_anisotropy_membership(d: u32) -> Result<Formula, LogicError> {
    if d != 2 {
        return Err(LogicError::UnsupportedDegree(d));
    }
    let mut fresh = Fresh::new(["t", "a", "b", "u", "c"].map(String::from));
    let f = |x: Term| x.pow(3).add(var("a").mul(x)).add(var("b"));
    let fu = f(var("u"));
    let on_twist = |x: &str, y: &str| fu.clone().mul(var(y).pow(2)).eq(f(var(x)));

    let (u1, u2) = (fresh.name("u1"), fresh.name("u2"));
    let y0 = fresh.name("y");
    let in_u1 = var(&u1).eq(Term::Zero).not().and(Formula::exists(&y0, on_twist(&u1, &y0)));

    let (x1, y1, x2, y2) = (fresh.name("x1"), fresh.name("y1"), fresh.name("x2"), fresh.name("y2"));
    let zsum = var(&u2).mul(var(&x1)).mul(var(&x2)).eq(var(&y1).mul(var(&x2)).add(var(&y2).mul(var(&x1))));
    let in_u2 = Formula::exists_all(
        &[x1.clone(), y1.clone(), x2.clone(), y2.clone()],
        Formula::conj(vec![
            on_twist(&x1, &y1),
            on_twist(&x2, &y2),
            var(&x1).eq(Term::Zero).not(),
            var(&x2).eq(Term::Zero).not(),
            zsum,
        ]),
    );

    let w = fresh.name("w");
    let slots = [var("t").sub(var(&u2)), var(&w)];
    let coeffs = tensor_terms(&pfister_terms(&slots, 2), &[Term::One, Term::Zero.sub(var("c"))]);
    let core = rep_zero(&coeffs, 2, &mut fresh, "x");
    let inv = Formula::exists(&w, var(&u1).mul(var(&w)).eq(Term::One).and(core));
    Ok(Formula::forall_all(&[u1, u2], in_u1.and(in_u2).implies(inv)))
}

pub const L_PREDICATE: &str = "L";

/// Free `t1..tn`, unary hole `L`:
/// `forall a b c1..cn (L(a) and L(b) and L(c_i)... -> <<t1 - c1, ..., tn - cn, a>>_d (x) <1, -b>_d represents 0)`.
pub fn emit_algdep_template(n: usize, d: u32) -> Result<Formula, LogicError> {
    if !(2..=3).contains(&d) {
        return Err(LogicError::UnsupportedDegree(d));
    }
    let ts: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
    let mut fresh = Fresh::new(ts.iter().cloned());
    let a = fresh.name("a");
    let b = fresh.name("b");
    let cs = fresh.names("c", n);
    let mut slots: Vec<Term> = ts.iter().zip(&cs).map(|(t, c)| var(t).sub(var(c))).collect();
    slots.push(var(&a));
    let coeffs = tensor_terms(&pfister_terms(&slots, d), &[Term::One, Term::Zero.sub(var(&b))]);
    let core = rep_zero(&coeffs, d, &mut fresh, "x");
    let mut hyps = vec![Formula::hole(L_PREDICATE, &[&a]), Formula::hole(L_PREDICATE, &[&b])];
    hyps.extend(cs.iter().map(|c| Formula::hole(L_PREDICATE, &[c])));
    let mut vars = vec![a, b];
    vars.extend(cs);
    Ok(Formula::forall_all(&vars, Formula::conj(hyps).implies(core)))
}

/// Fixed catalogue of unary formulas in `x`.
pub fn unary_catalogue() -> Vec<(&'static str, Formula)> {
    let x = || var("x");
    vec![
        ("all", x().eq(x())),
        ("none", x().eq(x()).not()),
        ("zero", x().eq(Term::Zero)),
        ("nonzero", x().eq(Term::Zero).not()),
        ("idempotent", x().mul(x()).eq(x())),
        ("square", Formula::exists("y", var("y").mul(var("y")).eq(x()))),
        ("nonsquare", Formula::exists("y", var("y").mul(var("y")).eq(x())).not()),
        ("one", x().eq(Term::One)),
        ("prime_field_fixed", x().pow(2).eq(x()).or(Formula::exists("y", var("y").add(Term::One).eq(x()).and(var("y").pow(2).eq(var("y")))))),
        ("cube", Formula::exists("y", var("y").pow(3).eq(x()))),
    ]
}

/// Random term over the given variables.
pub fn random_term(rng: &mut impl Rng, vars: &[String], depth: u32) -> Term {
    if depth == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..4) {
            0 => Term::Zero,
            1 => Term::One,
            _ if !vars.is_empty() => Term::Var(vars[rng.gen_range(0..vars.len())].clone()),
            _ => Term::One,
        };
    }
    let a = random_term(rng, vars, depth - 1);
    let b = random_term(rng, vars, depth - 1);
    match rng.gen_range(0..3) {
        0 => a.add(b),
        1 => a.sub(b),
        _ => a.mul(b),
    }
}

/// Random formula whose free variables are among `free`, with at most
/// `quantifiers` nested quantifiers.
pub fn random_formula(rng: &mut impl Rng, free: &[String], depth: u32, quantifiers: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return random_term(rng, free, 2).eq(random_term(rng, free, 2));
    }
    let choice = rng.gen_range(0..if quantifiers > 0 { 6 } else { 4 });
    match choice {
        0 => random_formula(rng, free, depth - 1, quantifiers).not(),
        1 => random_formula(rng, free, depth - 1, quantifiers).and(random_formula(rng, free, depth - 1, quantifiers)),
        2 => random_formula(rng, free, depth - 1, quantifiers).or(random_formula(rng, free, depth - 1, quantifiers)),
        3 => random_formula(rng, free, depth - 1, quantifiers).implies(random_formula(rng, free, depth - 1, quantifiers)),
        _ => {
            let v = format!("v{}", free.len());
            let mut inner = free.to_vec();
            inner.push(v.clone());
            let body = random_formula(rng, &inner, depth - 1, quantifiers - 1);
            if choice == 4 {
                Formula::exists(&v, body)
            } else {
                Formula::forall(&v, body)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> FieldDesc {
        FieldDesc::prime(p).unwrap()
    }

    fn no_bindings() -> Bindings {
        Bindings::new()
    }

    #[test]
    fn square_root_of_two() {
        let phi = parse_formula("(exists x (= (* x x) (+ 1 1)))").unwrap();
        assert!(eval(&phi, &fp(7), &Env::new(), &no_bindings()).unwrap());
        assert!(!eval(&phi, &fp(5), &Env::new(), &no_bindings()).unwrap());
        let taut = parse_formula("(forall x (= x x))").unwrap();
        assert!(eval(&taut, &fp(3), &Env::new(), &no_bindings()).unwrap());
    }

    #[test]
    fn round_trip_and_errors() {
        for src in ["(forall x (= (* x x) x))", "(exists y (= (+ y 1) 0))", "(and (hole P x y) (not (= x 1)))"] {
            let phi = parse_formula(src).unwrap();
            assert_eq!(phi.to_string(), src);
        }
        assert!(parse_formula("(= x)").is_err());
        assert!(parse_formula("(exists 1 (= 1 1))").is_err());
        assert!(parse_formula("(= 2 x)").is_err());
    }

    #[test]
    fn evaluation_errors() {
        let f5 = fp(5);
        let free = parse_formula("(= x 1)").unwrap();
        assert_eq!(eval(&free, &f5, &Env::new(), &no_bindings()).unwrap_err(), LogicError::UnassignedVariable("x".into()));
        let hole = parse_formula("(exists x (hole P x))").unwrap();
        assert_eq!(eval(&hole, &f5, &Env::new(), &no_bindings()).unwrap_err(), LogicError::UnboundPlaceholder("P".into()));
        let mut b = Bindings::new();
        b.insert("P".into(), Lambda::parse("(lambda (a b) (= a b))").unwrap());
        assert!(matches!(eval(&hole, &f5, &Env::new(), &b), Err(LogicError::ArityMismatch { .. })));
        let mixed = parse_formula("(and (hole P x) (hole P x y))").unwrap();
        assert!(matches!(mixed.holes(), Err(LogicError::ArityMismatch { .. })));
        let deep = parse_formula("(forall a (forall b (forall c (= a a))))").unwrap();
        assert_eq!(
            eval_with_budget(&deep, &f5, &Env::new(), &no_bindings(), 100).unwrap_err(),
            LogicError::BudgetExceeded(100)
        );
    }

    #[test]
    fn represents_zero_shape() {
        let phi = emit_represents_zero(2, 2);
        assert_eq!(phi.free_vars(), vec!["c1", "c2"]);
        assert_eq!(phi.quantifier_counts(), (0, 2));
        let f5 = fp(5);
        let env = Env::from_pairs(&[("c1", f5.one()), ("c2", f5.one())]);
        assert!(eval(&phi, &f5, &env, &no_bindings()).unwrap());
        let one = emit_represents_zero(1, 3);
        for c in f5.units() {
            assert!(!eval(&one, &f5, &Env::from_pairs(&[("c1", c)]), &no_bindings()).unwrap());
        }
    }

    #[test]
    fn s_family_matches_curve() {
        let f5 = fp(5);
        let s = emit_s_family();
        assert_eq!(s.free_vars(), vec!["a", "b", "s"]);
        let mut want = BTreeSet::new();
        for x in f5.elements() {
            for y in f5.units() {
                if f5.mul(y, y) == f5.add(f5.add(f5.pow(x, 3), x), f5.one()) {
                    want.insert(f5.div(x, y).unwrap());
                }
            }
        }
        let got: BTreeSet<FieldElem> = f5
            .elements()
            .filter(|&v| {
                let env = Env::from_pairs(&[("s", v), ("a", f5.one()), ("b", f5.one())]);
                eval(&s, &f5, &env, &no_bindings()).unwrap()
            })
            .collect();
        assert_eq!(got, want);
        let t = emit_t_family();
        let env = Env::from_pairs(&[("t", f5.one()), ("a", f5.one()), ("b", f5.one())]);
        assert_eq!(eval(&t, &f5, &env, &no_bindings()).unwrap(), want.iter().any(|v| !f5.is_zero(*v)));
    }

    #[test]
    fn a_s_structure() {
        let phi = emit_a_s(&Formula::hole("S", &["s"]), "s");
        assert_eq!(phi.quantifier_counts(), (3, 16));
        assert_eq!(phi.free_vars(), vec!["t"]);
        let f3 = fp(3);
        let empty = emit_a_s(&Formula::falsity(), "s");
        for t in f3.elements() {
            assert!(eval(&empty, &f3, &Env::from_pairs(&[("t", t)]), &no_bindings()).unwrap());
        }
    }

    #[test]
    fn char0_sentence_examples() {
        let phi = emit_char0_sentence(Z_PREDICATE);
        assert!(phi.free_vars().is_empty());
        let bind = |src: &str| {
            let mut b = Bindings::new();
            b.insert(Z_PREDICATE.to_string(), Lambda::parse(src).unwrap());
            b
        };
        assert!(!eval(&phi, &fp(7), &Env::new(), &bind("(= x x)")).unwrap());
        assert!(!eval(&phi, &fp(2), &Env::new(), &bind("(= x 0)")).unwrap());
        assert!(!eval(&phi, &fp(5), &Env::new(), &bind("(= (* x x) x)")).unwrap());
    }

    #[test]
    fn membership_template_shape() {
        let phi = emit_anisotropy_membership(2).unwrap();
        let free: BTreeSet<String> = phi.free_vars().into_iter().collect();
        assert_eq!(free, ["a", "b", "c", "t", "u"].iter().map(|s| s.to_string()).collect());
        assert!(phi.holes().unwrap().is_empty());
        assert_eq!(emit_anisotropy_membership(3).unwrap_err(), LogicError::UnsupportedDegree(3));
    }

    #[test]
    fn algdep_shape() {
        let phi = emit_algdep_template(1, 2).unwrap();
        assert_eq!(phi.free_vars(), vec!["t1"]);
        assert_eq!(phi.quantifier_counts(), (3, 8));
        let mut b = Bindings::new();
        b.insert(L_PREDICATE.into(), Lambda::parse("(= x x)").unwrap());
        let f3 = fp(3);
        // total even when t1 - c1 = 0 for some instantiation
        for t in f3.elements() {
            eval(&phi, &f3, &Env::from_pairs(&[("t1", t)]), &b).unwrap();
        }
    }
}
