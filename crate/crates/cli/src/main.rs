mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fgdef::curves::{find_ordinary_curve, Curve};
use fgdef::forms::{self, Conclusion, DiagonalForm, FalsifyConfig};
use fgdef::galois::{self, parse_field_spec, FieldDesc};
use fgdef::logic::{self, Bindings, Formula, Lambda};
use fgdef::mersenne::{self, PsiValue};
use fgdef::{modgen, selftest, zsum};

use output::{Format, Table};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "fgdef", version, about = "Finite-field experiments: Frobenius counts, Mersenne-type factorizations, diagonal forms, formula evaluation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Global {
    /// Seed for every randomized step
    #[arg(long, global = true, default_value_t = selftest::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (genprob only); results do not depend on it
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Work budget. Defaults: mersenne 2097152 rho steps per number;
    /// genprob, springer, cw 1048576 elements; eval-formula 10000000 visits
    #[arg(long, global = true, env = "FGDEF_BUDGET")]
    budget: Option<u64>,
    /// Output path, or the bare word `json` / `csv` for stdout [default: stdout, json]
    #[arg(long, global = true)]
    out: Option<String>,
    /// Output format; overrides the one implied by --out
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Cmd {
    /// Factor e_l = #E(F_{q^l}) / #E(F_q) for prime l and check the Psi bounds
    Mersenne(MersenneArgs),
    /// Fraction of points generating E(F_{q^l}) as a module over Frobenius
    Genprob(GenprobArgs),
    /// Coverage of F_q by sums of z-coordinates over finite-index subgroups
    Zsum(ZsumArgs),
    /// Isotropy over F_q against isotropy over a finite extension
    Springer(SpringerArgs),
    /// Anisotropy certificate for a lifted form over F_q((t_1))...((t_m))
    Dvr(DvrArgs),
    /// pfister(d, [a]) (x) <b, c> has a nontrivial zero for every unit triple
    Cw(CwArgs),
    /// Evaluate an s-expression formula over a finite field
    EvalFormula(EvalArgs),
    /// Write an emitted formula as an s-expression
    Emit(EmitArgs),
    /// Run the full invariant suite
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct MersenneArgs {
    /// Field spec: p, p^k or p^k1^k2
    #[arg(long)]
    field: String,
    /// a1,a2,a3,a4,a6 as field literals, or `auto` for the first ordinary curve
    #[arg(long, default_value = "auto")]
    curve: String,
    /// Largest l scanned
    #[arg(long, default_value_t = mersenne::DEFAULT_LMAX)]
    lmax: u32,
    /// B in sum_{l <= B} Psi(e_l) <= 2 Psi(prod e_l)
    #[arg(long, default_value_t = 13)]
    bound: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GenprobArgs {
    #[arg(long)]
    field: String,
    #[arg(long, default_value = "auto")]
    curve: String,
    /// Extension degree l
    #[arg(long)]
    ell: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ZsumArgs {
    /// Field order (a prime power)
    #[arg(long)]
    q: u64,
    /// Largest subgroup index
    #[arg(long, default_value_t = 3)]
    index_bound: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SpringerArgs {
    /// Form degree (2 with odd extension degree, or 3 with extension degree 2)
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Base field spec
    #[arg(long, default_value = "3")]
    base: String,
    #[arg(long, default_value_t = 3)]
    ext_degree: u32,
    #[arg(long, default_value_t = 2)]
    variables: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
struct DvrArgs {
    /// Residue field spec
    #[arg(long, default_value = "5")]
    field: String,
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Residue form coefficients as field literals
    #[arg(long, default_value = "1,-2")]
    coeffs: String,
    /// Number of uniformizers
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = forms::DEFAULT_TRIALS)]
    trials: u64,
    /// Series precision for falsification trials
    #[arg(long, default_value_t = forms::DEFAULT_PRECISION)]
    precision: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
struct CwArgs {
    /// Field orders [default: 2,3,4,5,7,8,9]
    #[arg(long, value_delimiter = ',')]
    q: Vec<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct EvalArgs {
    #[arg(long)]
    field: String,
    /// File holding the formula
    #[arg(long)]
    formula: PathBuf,
    /// NAME=file: bind a hole to a `(lambda (x ...) body)` or a bare formula
    #[arg(long)]
    bind: Vec<String>,
    /// name=value for a free variable
    #[arg(long)]
    assign: Vec<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum EmitKind {
    /// <c1, ..., cn>_d has a nontrivial zero
    RepresentsZero,
    /// s = x/y on y^2 = x^3 + a x + b
    SFamily,
    /// Ratios of the s-family
    TFamily,
    /// Pfister predicate over the pair ring, parametrized by an S formula
    #[value(name = "a-s")]
    #[serde(rename = "a-s")]
    AS,
    /// Characteristic-zero sentence with a unary hole
    Char0,
    /// Membership in the anisotropy set (d = 2)
    AnisotropyMembership,
    /// Algebraic-dependence template with hole L
    Algdep,
}

#[derive(Args, Debug, Clone, Serialize)]
struct EmitArgs {
    #[arg(value_enum)]
    kind: EmitKind,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Hole name for char0
    #[arg(long, default_value = logic::Z_PREDICATE)]
    pred: String,
    /// S formula for a-s [default: the s-family]
    #[arg(long)]
    s_formula: Option<PathBuf>,
    /// Variable of the S formula that is substituted
    #[arg(long, default_value = "s")]
    s_var: String,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SelftestArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 8)]
    precision: usize,
    /// Random bindings and formulas used by the logic checks
    #[arg(long, default_value_t = 1000)]
    random_formulas: usize,
    #[arg(long, default_value_t = 49)]
    char0_max_order: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    MathFailed,
    Incomplete,
}

struct Outcome {
    result: Value,
    table: Option<Table>,
    status: Status,
    /// Printed instead of the report when no --out is given.
    text: Option<String>,
}

impl Outcome {
    fn new(result: Value, status: Status) -> Outcome {
        Outcome { result, table: None, status, text: None }
    }
}

fn default_budget(cmd: &Cmd) -> Option<u64> {
    match cmd {
        Cmd::Mersenne(_) => Some(mersenne::DEFAULT_RHO_BUDGET),
        Cmd::Genprob(_) | Cmd::Springer(_) | Cmd::Cw(_) => Some(galois::DEFAULT_BUDGET),
        Cmd::EvalFormula(_) => Some(logic::DEFAULT_EVAL_BUDGET),
        _ => None,
    }
}

fn field(spec: &str) -> Result<FieldDesc> {
    parse_field_spec(spec).with_context(|| format!("field {spec:?}"))
}

fn field_of_order(q: u64) -> Result<FieldDesc> {
    let (p, k) = selftest::prime_power(q).ok_or_else(|| anyhow!("{q} is not a prime power"))?;
    Ok(FieldDesc::galois(p, k)?)
}

fn curve(f: &FieldDesc, spec: &str) -> Result<Curve> {
    if spec == "auto" {
        Ok(find_ordinary_curve(f)?)
    } else {
        Curve::parse(f, spec).with_context(|| format!("curve {spec:?}"))
    }
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::MathFailed
    }
}

fn run_mersenne(a: &MersenneArgs, budget: u64) -> Result<Outcome> {
    if a.bound > a.lmax {
        bail!("--bound {} exceeds --lmax {}", a.bound, a.lmax);
    }
    let f = field(&a.field)?;
    let e = curve(&f, &a.curve)?;
    let fd = e.frobenius_trace()?;
    let rows = mersenne::mersenne_scan_with_budget(&fd, a.lmax, budget)?;
    let complete = rows.iter().all(|r| r.complete());
    let mut table = Table::new(vec!["ell", "e_ell", "factors", "psi_num", "psi_den", "complete"]);
    for r in &rows {
        let j = r.to_json();
        let factors: Vec<String> = j.factors.iter().map(|(p, e)| format!("{p}^{e}")).collect();
        let (num, den) = j.psi.map(|p| (p.num, p.den)).unwrap_or_default();
        table.push(vec![j.ell.to_string(), j.e_ell, factors.join(" "), num, den, j.complete.to_string()]);
    }
    let min = mersenne::min_psi(&rows).map(|(ell, p)| json!({ "ell": ell, "psi": PsiValue::from(&p) }));
    let (at_most_two, psi_sum, status) = if complete {
        let two = mersenne::at_most_two_check(&rows)?;
        let sum = mersenne::psi_sum_bound_report(&rows, a.bound)?;
        let status = pass_if(two.pass && sum.holds);
        (serde_json::to_value(&two)?, sum.to_json(), status)
    } else {
        (Value::Null, Value::Null, Status::Incomplete)
    };
    let result = json!({
        "curve": e.summary()?,
        "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "at_most_two": at_most_two,
        "psi_sum": psi_sum,
        "min_psi": min,
        "complete": complete,
    });
    Ok(Outcome { table: Some(table), ..Outcome::new(result, status) })
}

fn run_genprob(a: &GenprobArgs, budget: u64, threads: usize) -> Result<Outcome> {
    let f = field(&a.field)?;
    let e = curve(&f, &a.curve)?;
    let rep = modgen::generation_fraction_with(&e, a.ell, budget, threads.max(1))?;
    let status = pass_if(!rep.falsified());
    Ok(Outcome::new(json!({ "curve": e.summary()?, "report": rep }), status))
}

fn run_zsum(a: &ZsumArgs) -> Result<Outcome> {
    let f = field_of_order(a.q)?;
    let reports = zsum::zsum_scan(&f, a.index_bound)?;
    let summary = zsum::summarize(a.q, &reports);
    let mut table = Table::new(vec![
        "q",
        "curve",
        "group_order",
        "multiplier",
        "index",
        "subgroup_order",
        "sum_set_size",
        "covered",
        "empty_after_poles",
    ]);
    for r in &reports {
        table.push(vec![
            r.q.to_string(),
            r.curve.clone(),
            r.group_order.to_string(),
            r.multiplier.to_string(),
            r.index.to_string(),
            r.subgroup_order.to_string(),
            r.sum_set_size.to_string(),
            r.covered.to_string(),
            r.empty_after_poles.to_string(),
        ]);
    }
    let result = json!({ "summary": summary, "reports": reports });
    Ok(Outcome { table: Some(table), ..Outcome::new(result, Status::Pass) })
}

fn run_springer(a: &SpringerArgs, budget: u64) -> Result<Outcome> {
    let base = field(&a.base)?;
    let rep = forms::springer_experiment(a.d, &base, a.ext_degree, a.variables, budget)?;
    if !rep.pass() {
        eprintln!("springer: {} counterexample(s) to descent", rep.counterexamples.len());
    }
    Ok(Outcome::new(serde_json::to_value(&rep)?, pass_if(rep.pass())))
}

fn run_dvr(a: &DvrArgs, seed: u64) -> Result<Outcome> {
    let f = field(&a.field)?;
    let coeffs = a
        .coeffs
        .split(',')
        .map(|c| f.parse_elem(c.trim()))
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("coefficients {:?}", a.coeffs))?;
    let q_res = DiagonalForm::new(&f, a.d, coeffs)?;
    let cert = forms::local_params_anisotropy(&q_res, a.m, FalsifyConfig::new(a.trials, a.precision, seed))?;
    let status = pass_if(cert.conclusion != Conclusion::Inconclusive);
    Ok(Outcome::new(serde_json::to_value(&cert)?, status))
}

fn run_cw(a: &CwArgs, budget: u64) -> Result<Outcome> {
    let orders = if a.q.is_empty() { vec![2, 3, 4, 5, 7, 8, 9] } else { a.q.clone() };
    let mut table = Table::new(vec!["field", "d", "variables", "tuples_checked", "isotropic", "failures"]);
    let mut reports = Vec::new();
    for q in orders {
        let rep = forms::chevalley_warning_check(&field_of_order(q)?, budget)?;
        table.push(vec![
            rep.field.clone(),
            rep.d.to_string(),
            rep.variables.to_string(),
            rep.tuples_checked.to_string(),
            rep.isotropic.to_string(),
            rep.failures.len().to_string(),
        ]);
        reports.push(rep);
    }
    let pass = reports.iter().all(|r| r.pass());
    Ok(Outcome { table: Some(table), ..Outcome::new(json!({ "reports": reports, "pass": pass }), pass_if(pass)) })
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run_eval(a: &EvalArgs, budget: u64) -> Result<Outcome> {
    let f = field(&a.field)?;
    let phi = logic::parse_formula(&read(&a.formula)?).with_context(|| format!("parsing {}", a.formula.display()))?;
    let mut bindings = Bindings::new();
    for b in &a.bind {
        let (name, path) = b.split_once('=').ok_or_else(|| anyhow!("--bind expects NAME=file, got {b:?}"))?;
        let path = PathBuf::from(path);
        let lam = Lambda::parse(&read(&path)?).with_context(|| format!("parsing {}", path.display()))?;
        bindings.insert(name.to_string(), lam);
    }
    let env = logic::parse_assignment(&f, &a.assign)?;
    let value = logic::eval_with_budget(&phi, &f, &env, &bindings, budget)?;
    let result = json!({ "formula": phi.to_string(), "value": value });
    Ok(Outcome { text: Some(format!("{value}\n")), ..Outcome::new(result, Status::Pass) })
}

fn emitted(a: &EmitArgs) -> Result<Formula> {
    Ok(match a.kind {
        EmitKind::RepresentsZero => logic::emit_represents_zero(a.n, a.d),
        EmitKind::SFamily => logic::emit_s_family(),
        EmitKind::TFamily => logic::emit_t_family(),
        EmitKind::AS => {
            let s = match &a.s_formula {
                Some(p) => logic::parse_formula(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
                None => logic::emit_s_family(),
            };
            logic::emit_a_s(&s, &a.s_var)
        }
        EmitKind::Char0 => logic::emit_char0_sentence(&a.pred),
        EmitKind::AnisotropyMembership => logic::emit_anisotropy_membership(a.d)?,
        EmitKind::Algdep => logic::emit_algdep_template(a.n, a.d)?,
    })
}

fn run(cli: &Cli) -> Result<Status> {
    let g = &cli.global;
    let budget = g.budget.or_else(|| default_budget(&cli.cmd));
    let b = budget.unwrap_or(galois::DEFAULT_BUDGET);
    let target = output::resolve(g.out.as_deref(), g.format);

    if let Cmd::Emit(a) = &cli.cmd {
        let text = format!("{}\n", emitted(a)?);
        output::emit(&target, text.as_bytes())?;
        return Ok(Status::Pass);
    }

    let outcome = match &cli.cmd {
        Cmd::Mersenne(a) => run_mersenne(a, b)?,
        Cmd::Genprob(a) => run_genprob(a, b, g.threads)?,
        Cmd::Zsum(a) => run_zsum(a)?,
        Cmd::Springer(a) => run_springer(a, b)?,
        Cmd::Dvr(a) => run_dvr(a, g.seed)?,
        Cmd::Cw(a) => run_cw(a, b)?,
        Cmd::EvalFormula(a) => run_eval(a, b)?,
        Cmd::Selftest(a) => {
            let cfg = selftest::SelftestConfig {
                seed: g.seed,
                trials: a.trials,
                precision: a.precision,
                random_formulas: a.random_formulas,
                char0_max_order: a.char0_max_order,
            };
            let rep = selftest::run(&cfg);
            for c in rep.checks.iter().filter(|c| !c.pass) {
                eprintln!("selftest: check {} failed", c.name);
            }
            Outcome::new(serde_json::to_value(&rep)?, pass_if(rep.pass))
        }
        Cmd::Emit(_) => unreachable!(),
    };

    let mut config = serde_json::to_value(&cli.cmd)?;
    if let Value::Object(m) = &mut config {
        m.insert("seed".into(), json!(g.seed));
        m.insert("threads".into(), json!(g.threads));
        m.insert("budget".into(), json!(budget));
    }
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "seed": g.seed,
        "complete": outcome.status != Status::Incomplete,
        "result": outcome.result,
    });
    match (&outcome.text, g.out.is_none()) {
        (Some(text), true) => output::emit(&target, text.as_bytes())?,
        _ => output::emit(&target, &output::render(&report, outcome.table.as_ref(), target.format)?)?,
    }
    if outcome.status == Status::MathFailed {
        eprintln!("error: a mathematical check failed; see the report");
    }
    if outcome.status == Status::Incomplete {
        eprintln!("error: budget exhausted; partial report written with complete = false");
    }
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::MathFailed) => ExitCode::from(2),
        Ok(Status::Incomplete) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
