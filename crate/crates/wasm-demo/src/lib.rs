//! wasm-bindgen exports for the static demo page in `www/`.
//!
//! Every export returns a JSON string. Errors come back as `{"error": "..."}`
//! so the page only has one shape to handle.

use quotient_coho::catalog::{builtin_catalog, find_scenario, verify_scenario};
use quotient_coho::normality::betti_quotient;
use quotient_coho::toric::{hj_expand, weight_dim2};
use quotient_coho::{parse_lattice_expr, GramLattice};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn wrap(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn summary(l: &GramLattice) -> Value {
    let s = l.invariant_summary();
    json!({
        "gram": l.gram().to_string(),
        "rank": s.rank,
        "determinant": s.determinant.to_string(),
        "signature": [s.signature.0, s.signature.1],
        "discriminant_group": s.discriminant_group.to_string(),
        "even": l.is_even(),
    })
}

pub fn weight2d_value(p: i64, q: i64) -> Result<Value, String> {
    let hj = hj_expand(p, q).map_err(|e| e.to_string())?;
    let (w, c) = weight_dim2(p, q).map_err(|e| e.to_string())?;
    Ok(json!({
        "p": p,
        "q": q,
        "hj": hj,
        "weight": w,
        "case": c.case.to_string(),
        "rays": c.fan.rays,
    }))
}

pub fn lattice_value(expr: &str, p: u32) -> Result<Value, String> {
    let l = parse_lattice_expr(expr).map_err(|e| e.to_string())?;
    let mut v = summary(&l);
    if p > 1 {
        let d = l.dual_rescaled(p as u64).map_err(|e| e.to_string())?;
        v["dual_rescaled"] = summary(&d);
    }
    Ok(v)
}

pub fn betti_value(r: u32, p: u32) -> Result<Value, String> {
    let b = betti_quotient(r as u64, p as u64).map_err(|e| e.to_string())?;
    Ok(json!({ "r": r, "p": p, "b2": b.b2, "b3": b.b3, "b4": b.b4, "euler": b.euler }))
}

pub fn catalog_value(name: &str) -> Result<Value, String> {
    let catalog = builtin_catalog().map_err(|e| e.to_string())?;
    let s = find_scenario(&catalog, name).ok_or(format!("no catalog entry {name}"))?;
    serde_json::to_value(verify_scenario(s)).map_err(|e| e.to_string())
}

pub fn catalog_names() -> Vec<String> {
    builtin_catalog().map(|c| c.into_iter().map(|s| s.name).collect()).unwrap_or_default()
}

/// Resolution of 1/p(1,q): HJ continued fraction, fan and weight.
#[wasm_bindgen]
pub fn weight2d(p: i32, q: i32) -> String {
    wrap(weight2d_value(p as i64, q as i64))
}

/// Invariants of a lattice expression; `p > 1` also reports L^∨(p).
#[wasm_bindgen]
pub fn lattice_invariants(expr: &str, p: u32) -> String {
    wrap(lattice_value(expr, p))
}

/// Betti numbers of the quotient of a K3^[2]-type fourfold.
#[wasm_bindgen]
pub fn betti(r: u32, p: u32) -> String {
    wrap(betti_value(r, p))
}

/// Recompute one catalog entry and compare with its expected block.
#[wasm_bindgen]
pub fn verify_entry(name: &str) -> String {
    wrap(catalog_value(name))
}

#[wasm_bindgen]
pub fn catalog_list() -> String {
    json!(catalog_names()).to_string()
}
