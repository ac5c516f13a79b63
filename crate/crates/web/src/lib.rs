//! Browser bindings. Every export returns a JSON string; errors surface as
//! thrown JS strings.

use gaussform::engineering::{engineer, random_recipe};
use gaussform::entanglement::{full_report, log_negativity_pair};
use gaussform::gmps::parity_table;
use gaussform::io::{to_json, CmDocument, ROUND_TRIP_DIGITS};
use gaussform::standard_form::{harmonic_ground_state, reduce, ring_potential};
use gaussform::Tolerances;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest state the demo will build; keeps the page responsive.
pub const MAX_DEMO_MODES: usize = 24;

fn encode(value: &Value) -> Result<String, String> {
    to_json(value, ROUND_TRIP_DIGITS).map_err(|e| e.to_string())
}

fn value<T: serde::Serialize>(v: &T) -> Result<Value, String> {
    serde_json::to_value(v).map_err(|e| e.to_string())
}

/// Engineer a random pure state and return its covariance matrix, standard
/// form and entanglement report.
pub fn random_state_json(n_modes: usize, seed: u64, s_max: f64) -> Result<String, String> {
    if n_modes > MAX_DEMO_MODES {
        return Err(format!("demo is limited to {MAX_DEMO_MODES} modes"));
    }
    let recipe = random_recipe(n_modes, seed, s_max).map_err(|e| e.to_string())?;
    let built = engineer(&recipe).map_err(|e| e.to_string())?;
    let report = full_report(&built.cm).map_err(|e| e.to_string())?;
    let form = reduce(&built.cm, &Tolerances::default()).map_err(|e| e.to_string())?.form;
    let purity = built.cm.purity();
    encode(&json!({
        "recipe": value(&recipe)?,
        "free_parameters": built.free_parameters(),
        "purity_residual": purity.residual,
        "cm": value(&CmDocument::from_cm(&built.cm))?,
        "vq": value(&form.vq().row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())?,
        "report": value(&report)?,
    }))
}

/// Nearest-neighbour log-negativity and single-mode entropy of the harmonic
/// ring ground state for every size in `n_min..=n_max`.
pub fn ring_profile_json(n_min: usize, n_max: usize, coupling: f64) -> Result<String, String> {
    if n_min < 3 || n_min > n_max || n_max > 4 * MAX_DEMO_MODES {
        return Err(format!("ring sizes must satisfy 3 <= n_min <= n_max <= {}", 4 * MAX_DEMO_MODES));
    }
    let mut rows = Vec::with_capacity(n_max - n_min + 1);
    for n in n_min..=n_max {
        let cm = ring_potential(n, coupling).and_then(|v| harmonic_ground_state(&v)).map_err(|e| e.to_string())?;
        let logneg = log_negativity_pair(&cm, 1, 2).map_err(|e| e.to_string())?;
        let entropy = gaussform::entanglement::entropy_one_vs_rest(&cm, 1).map_err(|e| e.to_string())?;
        rows.push(json!({ "n_modes": n, "logneg": logneg, "entropy": entropy }));
    }
    encode(&Value::Array(rows))
}

/// Minimal bond numbers for `n_min..=n_max`.
pub fn gmps_table_json(n_min: u64, n_max: u64) -> Result<String, String> {
    let table = parity_table(n_min, n_max).map_err(|e| e.to_string())?;
    encode(&value(&table)?)
}

#[wasm_bindgen(js_name = randomState)]
pub fn random_state(n_modes: usize, seed: u32, s_max: f64) -> Result<String, JsValue> {
    random_state_json(n_modes, seed as u64, s_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = ringProfile)]
pub fn ring_profile(n_min: usize, n_max: usize, coupling: f64) -> Result<String, JsValue> {
    ring_profile_json(n_min, n_max, coupling).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = gmpsTable)]
pub fn gmps_table(n_min: u32, n_max: u32) -> Result<String, JsValue> {
    gmps_table_json(n_min as u64, n_max as u64).map_err(|e| JsValue::from_str(&e))
}
