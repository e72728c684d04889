//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string; errors become JS exceptions carrying
//! the library's message.

use rigidpq::cover::{Power, TriangleCoverData};
use rigidpq::product::product_of;
use rigidpq::quotient::{InvariantsReport, ProductQuotientInput};
use rigidpq::rigidity::verify_rigidity;
use rigidpq::GroupModulus;
use wasm_bindgen::prelude::*;

/// Tables above this size are refused; the page renders one cell per character.
pub const MAX_TABLE_N: u32 = 200;

pub fn degree_table(n: u32, power: u32) -> Result<String, String> {
    if n > MAX_TABLE_N {
        return Err(format!("n is capped at {MAX_TABLE_N} in the browser"));
    }
    let power = Power::from_int(power).map_err(|e| e.to_string())?;
    let modulus = GroupModulus::new(n).map_err(|e| e.to_string())?;
    let table = TriangleCoverData::standard(modulus)
        .eigendegree_table(power)
        .map_err(|e| e.to_string())?;
    Ok(table.to_json())
}

pub fn certificate(n: u32) -> Result<String, String> {
    let cert = verify_rigidity(n).map_err(|e| e.to_string())?;
    let inv = InvariantsReport::compute(&ProductQuotientInput::standard(n).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    Ok(format!(r#"{{"certificate":{},"invariants":{}}}"#, cert.to_json(), inv.to_json()))
}

pub fn product(factors: &str) -> Result<String, String> {
    product_of(factors).map(|s| s.to_json()).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = degreeTable)]
pub fn degree_table_js(n: u32, power: u32) -> Result<String, JsError> {
    js(degree_table(n, power))
}

#[wasm_bindgen(js_name = certificate)]
pub fn certificate_js(n: u32) -> Result<String, JsError> {
    js(certificate(n))
}

#[wasm_bindgen(js_name = product)]
pub fn product_js(factors: &str) -> Result<String, JsError> {
    js(product(factors))
}
