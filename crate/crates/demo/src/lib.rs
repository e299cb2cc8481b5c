//! wasm-bindgen exports for the static page in `www/`. Every export takes
//! plain strings and returns a JSON string; failures come back as
//! `{"error": "..."}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use fgdef::curves::{find_ordinary_curve, Curve, Point};
use fgdef::galois::parse_field_spec;
use fgdef::logic::{self, Bindings, Lambda};
use fgdef::mersenne::{self, PsiValue};

/// Largest field the point plot will enumerate.
pub const MAX_PLOT_ORDER: u64 = 1 << 12;
/// Largest `l` the chart will factor.
pub const MAX_CHART_LMAX: u32 = 40;
/// Visit budget for formulas typed into the page.
pub const EVAL_BUDGET: u64 = 2_000_000;

fn wrap(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn curve_for(field: &str, curve: &str) -> Result<Curve, String> {
    let f = parse_field_spec(field).map_err(|e| e.to_string())?;
    let c = curve.trim();
    if c.is_empty() || c == "auto" {
        find_ordinary_curve(&f).map_err(|e| e.to_string())
    } else {
        Curve::parse(&f, c).map_err(|e| e.to_string())
    }
}

/// Affine points as element codes, plus the curve summary.
pub fn curve_points_value(field: &str, curve: &str) -> Result<Value, String> {
    let e = curve_for(field, curve)?;
    let f = e.field();
    if f.order() > MAX_PLOT_ORDER {
        return Err(format!("field too large to plot (q > {MAX_PLOT_ORDER})"));
    }
    let pts = e.enumerate_points().map_err(|e| e.to_string())?;
    let affine: Vec<[u32; 2]> = pts
        .iter()
        .filter_map(|p| match p {
            Point::Affine { x, y } => Some([x.code(), y.code()]),
            Point::Infinity => None,
        })
        .collect();
    let labels: Vec<String> = f.elements().map(|x| f.format(x)).collect();
    Ok(json!({
        "summary": e.summary().map_err(|e| e.to_string())?,
        "q": f.order(),
        "labels": labels,
        "points": affine,
    }))
}

/// `Psi(e_l)` for prime `l <= lmax`, exact and as a float for drawing.
pub fn mersenne_chart_value(field: &str, curve: &str, lmax: u32) -> Result<Value, String> {
    if lmax > MAX_CHART_LMAX {
        return Err(format!("lmax above {MAX_CHART_LMAX}"));
    }
    let e = curve_for(field, curve)?;
    let fd = e.frobenius_trace().map_err(|e| e.to_string())?;
    let rows = mersenne::mersenne_scan(&fd, lmax).map_err(|e| e.to_string())?;
    let bars: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "ell": r.ell,
                "e_ell": r.e_ell.to_string(),
                "factors": r.factors.iter().map(|f| format!("{}^{}", f.prime, f.exp)).collect::<Vec<_>>(),
                "psi": r.psi.as_ref().map(PsiValue::from),
                "psi_approx": r.psi.as_ref().map(mersenne::ratio_f64),
                "complete": r.complete(),
            })
        })
        .collect();
    let two = if rows.iter().all(|r| r.complete()) {
        Some(mersenne::at_most_two_check(&rows).map_err(|e| e.to_string())?.pass)
    } else {
        None
    };
    Ok(json!({ "summary": e.summary().map_err(|e| e.to_string())?, "rows": bars, "at_most_two": two }))
}

/// `bindings` is one `NAME = (lambda (x) ...)` per line; `assign` is
/// `x=3, y=1`.
pub fn eval_formula_value(field: &str, formula: &str, bindings: &str, assign: &str) -> Result<Value, String> {
    let f = parse_field_spec(field).map_err(|e| e.to_string())?;
    let phi = logic::parse_formula(formula).map_err(|e| e.to_string())?;
    let mut b = Bindings::new();
    for line in bindings.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (name, body) = line.split_once('=').ok_or_else(|| format!("expected NAME = lambda, got {line:?}"))?;
        b.insert(name.trim().to_string(), Lambda::parse(body.trim()).map_err(|e| e.to_string())?);
    }
    let pairs: Vec<String> =
        assign.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
    let env = logic::parse_assignment(&f, &pairs).map_err(|e| e.to_string())?;
    let value = logic::eval_with_budget(&phi, &f, &env, &b, EVAL_BUDGET).map_err(|e| e.to_string())?;
    Ok(json!({ "value": value, "formula": phi.to_string() }))
}

#[wasm_bindgen]
pub fn curve_points(field: &str, curve: &str) -> String {
    wrap(curve_points_value(field, curve))
}

#[wasm_bindgen]
pub fn mersenne_chart(field: &str, curve: &str, lmax: u32) -> String {
    wrap(mersenne_chart_value(field, curve, lmax))
}

#[wasm_bindgen]
pub fn eval_formula(field: &str, formula: &str, bindings: &str, assign: &str) -> String {
    wrap(eval_formula_value(field, formula, bindings, assign))
}

/// The characteristic-zero sentence, as a starting point for the formula box.
#[wasm_bindgen]
pub fn char0_sentence() -> String {
    logic::emit_char0_sentence(logic::Z_PREDICATE).to_string()
}
