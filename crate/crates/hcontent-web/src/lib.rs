//! Browser bindings: each export takes a voxel space as JSON and returns a JSON report.

use hcontent::content::{exact_content, volume_lower_bound, BallFamily};
use hcontent::io::parse_voxel;
use hcontent::lw::loomis_whitney_check;
use hcontent::num::Exponent;
use hcontent::width::{verify_width, width_bound, NerveMode};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Keeps the page responsive on large drawings.
const BUDGET: u64 = 200_000;

fn report(v: serde_json::Value) -> Result<String, String> {
    serde_json::to_string(&v).map_err(|e| e.to_string())
}

pub fn content_json(space: &str, m: &str) -> Result<String, String> {
    let s = parse_voxel(space).map_err(|e| e.to_string())?;
    let m = Exponent::parse(m)?;
    let r = exact_content(&s, &m, &BallFamily::AllGrid, BUDGET).map_err(|e| e.to_string())?;
    report(json!({
        "lower": r.value_lower,
        "upper": r.value_upper,
        "optimal": r.optimal,
        "volume_bound": volume_lower_bound(&s, &m),
        "balls": r.witness,
    }))
}

pub fn lw_json(space: &str) -> Result<String, String> {
    let s = parse_voxel(space).map_err(|e| e.to_string())?;
    let r = loomis_whitney_check(&s, BUDGET).map_err(|e| e.to_string())?;
    report(json!({
        "boundary_cells": r.boundary_cells,
        "projections": r.projections,
        "lhs": r.lw_lhs,
        "rhs": r.lw_rhs,
        "holds": r.lw_holds,
        "isoperimetric": r.isoperimetric,
    }))
}

pub fn width_json(space: &str, m: u32, budget: u32, seed: u32) -> Result<String, String> {
    let s = parse_voxel(space).map_err(|e| e.to_string())?;
    let w = width_bound(&s, m, budget as u64, NerveMode::ClosedCells, seed as u64).map_err(|e| e.to_string())?;
    let rc = verify_width(&s, &w);
    report(json!({
        "bound": w.bound.to_string(),
        "diameter": w.diameter.to_string(),
        "multiplicity": w.nerve.multiplicity,
        "verified": rc.all_hold(),
        "balls": w.cover,
    }))
}

/// Hausdorff content `HC_m` with its optimal cover.
#[wasm_bindgen]
pub fn content(space: &str, m: &str) -> Result<String, JsValue> {
    content_json(space, m).map_err(|e| JsValue::from_str(&e))
}

/// Loomis–Whitney projection counts and the isoperimetric link.
#[wasm_bindgen]
pub fn lw_check(space: &str) -> Result<String, JsValue> {
    lw_json(space).map_err(|e| JsValue::from_str(&e))
}

/// Width bound of index `m − 1` from a low-multiplicity cover.
#[wasm_bindgen]
pub fn width(space: &str, m: u32, budget: u32, seed: u32) -> Result<String, JsValue> {
    width_json(space, m, budget, seed).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const SQUARE: &str = r#"{"kind":"voxel","n":2,"delta":"1/4","blocks":[{"lo":[0,0],"hi":[4,4]}]}"#;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn unit_square_content() {
        let v = parse(content_json(SQUARE, "2").unwrap());
        assert_eq!(v["upper"], "1/4");
        assert_eq!(v["optimal"], true);
        // one big ball and sixteen small ones tie at m = 2
        let cost: f64 = v["balls"]
            .as_array()
            .unwrap()
            .iter()
            .map(|b| hcontent::num::q_f64(&hcontent::num::parse_q(b["radius"].as_str().unwrap()).unwrap()).powi(2))
            .sum();
        assert!((cost - 0.25).abs() < 1e-12);
    }

    #[test]
    fn square_projections() {
        let v = parse(lw_json(SQUARE).unwrap());
        assert_eq!(v["projections"], json!([4, 4]));
        assert_eq!(v["holds"], true);
    }

    #[test]
    fn width_is_verified() {
        let v = parse(width_json(SQUARE, 1, 100, 0).unwrap());
        assert_eq!(v["verified"], true);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(content_json("{", "2").is_err());
        assert!(content_json(SQUARE, "0").is_err());
    }
}
