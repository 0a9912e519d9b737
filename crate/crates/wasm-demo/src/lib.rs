//! Browser bindings for the constrained benchmarks.
//!
//! The page offers three operations: an acquisition heatmap over a short
//! campaign, the feasibility projection of a clicked offspring, and a full
//! campaign with its incumbent curve. All coordinates crossing the boundary
//! are in the unit square; discrete surfaces are rescaled from grid indices.
//!
//! The pure functions live in [`demo`] so they can be tested natively. The
//! exported wrappers only translate to and from JSON strings.

use wasm_bindgen::prelude::*;

pub mod demo;

fn to_js<T: serde::Serialize>(result: Result<T, demo::DemoError>) -> Result<String, JsValue> {
    let value = result.map_err(|e| JsValue::from_str(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsValue::from_str(&e.to_string()))
}

/// JSON list of the two-dimensional surfaces.
#[wasm_bindgen]
pub fn surfaces() -> Result<String, JsValue> {
    to_js(Ok(demo::surfaces()))
}

/// Objective values and feasibility mask on a `res` x `res` grid.
#[wasm_bindgen(js_name = surfaceMap)]
pub fn surface_map(surface: &str, res: usize) -> Result<String, JsValue> {
    to_js(demo::surface_map(surface, res))
}

#[wasm_bindgen(js_name = acquisitionMap)]
pub fn acquisition_map(
    surface: &str,
    strategy: &str,
    observations: usize,
    seed: u64,
    lambda: f64,
    res: usize,
) -> Result<String, JsValue> {
    to_js(demo::acquisition_map(
        surface,
        strategy,
        observations,
        seed,
        lambda,
        res,
    ))
}

#[wasm_bindgen]
pub fn project(surface: &str, px: f64, py: f64, ox: f64, oy: f64) -> Result<String, JsValue> {
    to_js(demo::project(surface, [px, py], [ox, oy]))
}

#[wasm_bindgen]
pub fn campaign(
    surface: &str,
    strategy: &str,
    budget: usize,
    seed: u64,
) -> Result<String, JsValue> {
    to_js(demo::campaign(surface, strategy, budget, seed))
}
