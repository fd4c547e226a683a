//! Browser bindings for the static demo page in `www/`.
//!
//! Each export takes an algebra selection as JSON, e.g.
//! `{"variant": "torus-root", "t": 3}`, and returns a JSON string.

use halfder_core::algebra::{AlgebraSelection, AlgebraSpec, BasisElem, Tag, Window};
use halfder_core::halfderiv::{self, ClosedFormMap};
use halfder_core::scalars::Scalar;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_WINDOW: u32 = 5;

fn spec_of(algebra: &str) -> Result<AlgebraSpec, String> {
    let sel: AlgebraSelection = serde_json::from_str(algebra).map_err(|e| format!("algebra: {e}"))?;
    AlgebraSpec::from_selection(&sel).map_err(|e| e.to_string())
}

fn basis_elem(s: &str) -> Result<BasisElem, String> {
    let s = s.trim();
    let (tag, rest) = match s.chars().next() {
        Some('L') => (Tag::L, &s[1..]),
        Some('X') | Some('x') => (Tag::X, &s[1..]),
        Some('D') => (Tag::D, &s[1..]),
        _ => return Err(format!("basis vector `{s}` must start with L, X or D")),
    };
    let degree = rest.parse().map_err(|e: halfder_core::Error| e.to_string())?;
    Ok(BasisElem::new(tag, degree))
}

fn check_window(n: u32) -> Result<Window, String> {
    if n == 0 || n > MAX_WINDOW {
        return Err(format!("window must be between 1 and {MAX_WINDOW}"));
    }
    Ok(Window::new(n))
}

/// `[a, b]` for two basis vectors written like `X(1,0)` or `L(2,-1)`.
pub fn bracket_json(algebra: &str, a: &str, b: &str) -> Result<String, String> {
    let spec = spec_of(algebra)?;
    let (a, b) = (basis_elem(a)?, basis_elem(b)?);
    let e = spec.bracket(a, b).map_err(|e| e.to_string())?;
    let terms: Vec<Value> = e
        .terms()
        .map(|(bb, c)| json!({"basis": bb.to_string(), "coeff": spec.field().format(c)}))
        .collect();
    Ok(json!({"a": a.to_string(), "b": b.to_string(), "terms": terms}).to_string())
}

/// Full and interior kernel dimensions for every shift `|i1|, |i2| <= bound`.
pub fn sweep_json(algebra: &str, window: u32, bound: u32, interior: u32) -> Result<String, String> {
    let spec = spec_of(algebra)?;
    let w = check_window(window)?;
    if bound > 3 {
        return Err("shift bound must be at most 3".into());
    }
    let dims = halfderiv::shift_sweep(&spec, &w, bound, interior).map_err(|e| e.to_string())?;
    let cells: Vec<Value> = dims
        .iter()
        .map(|(i, d)| json!({"i1": i.m1, "i2": i.m2, "full": d.full, "interior": d.interior}))
        .collect();
    Ok(json!({"bound": bound, "cells": cells}).to_string())
}

fn candidate(spec: &AlgebraSpec, name: &str, p: &str, r: &str) -> Result<ClosedFormMap, String> {
    let field = spec.field();
    let scalar = |s: &str| -> Result<Scalar, String> { field.parse(s).map_err(|e| e.to_string()) };
    match name {
        "identity" => Ok(halfderiv::identity()),
        "thmH" => {
            let t = spec.t().filter(|_| spec.variant().is_torus()).ok_or("thmH needs torus-root")?;
            Ok(halfderiv::thm_h_family(t, scalar(p)?, scalar(r)?))
        }
        "torus-generic" => {
            if spec.variant() != halfder_core::algebra::Variant::TorusGeneric {
                return Err("torus-generic needs torus-generic".into());
            }
            Ok(halfderiv::torus_generic_family(scalar(p)?, scalar(r)?))
        }
        _ => Err(format!("unknown candidate `{name}`")),
    }
}

/// Checks a shift-zero candidate: `identity`, `thmH` with `(a, c)` or
/// `torus-generic` with `(c, d)`.
pub fn verify_json(algebra: &str, window: u32, name: &str, p: &str, r: &str) -> Result<String, String> {
    let spec = spec_of(algebra)?;
    let w = check_window(window)?;
    let phi = candidate(&spec, name, p, r)?;
    let rep = halfderiv::verify_candidate(&spec, &w, &phi).map_err(|e| e.to_string())?;
    let shown: Vec<&halfderiv::CandidateViolation> = rep.violations.iter().take(20).collect();
    Ok(json!({
        "constraintsChecked": rep.constraints_checked,
        "violations": rep.violations.len(),
        "examples": shown,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn bracket(algebra: &str, a: &str, b: &str) -> Result<String, JsError> {
    bracket_json(algebra, a, b).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep(algebra: &str, window: u32, bound: u32, interior: u32) -> Result<String, JsError> {
    sweep_json(algebra, window, bound, interior).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn verify(algebra: &str, window: u32, name: &str, p: &str, r: &str) -> Result<String, JsError> {
    verify_json(algebra, window, name, p, r).map_err(|e| JsError::new(&e))
}
