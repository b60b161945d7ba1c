//! Browser bindings: code layouts, animated move scripts and ball growth.
//!
//! Every export returns a JSON string; the page in `www/` draws it on a
//! canvas. The `*_json` functions hold the logic so they can be tested
//! natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use zsz_core::code::{fixtures, load_fixture, CheckType};
use zsz_core::graph::{ball_growth, cayley_graph, Side};
use zsz_core::routing::{route_se_round, MoveScript, RouteOptions};
use zsz_core::GroupSpec;

fn text(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn fixture_names_json() -> String {
    let names: Vec<String> = fixtures().into_iter().map(|f| f.name).collect();
    json!(names).to_string()
}

/// Block sizes and check supports of a fixture.
pub fn code_layout_json(name: &str) -> Result<String, String> {
    let code = load_fixture(name).map_err(text)?;
    let tb = code.two_block.as_ref().ok_or("not a two-block code")?;
    let out = json!({
        "summary": code.summary(),
        "group": tb.spec.to_string(),
        "a": tb.a.to_string(),
        "b": tb.b.to_string(),
        "ell": tb.spec.ell(),
        "m": tb.spec.m(),
        "x_checks": code.check_supports(CheckType::X),
        "z_checks": code.check_supports(CheckType::Z),
    });
    Ok(out.to_string())
}

/// Atom positions `[x, y]` after each prefix of the script.
fn positions(script: &MoveScript) -> Result<Vec<Vec<[usize; 2]>>, String> {
    let atoms = script.width * script.height;
    let mut frames = Vec::with_capacity(script.len() + 1);
    for t in 0..=script.len() {
        let mut prefix = MoveScript::new(script.width, script.height);
        prefix.transfers = script.transfers[..t].to_vec();
        let mut lattice = script.fresh_lattice();
        prefix.execute(&mut lattice).map_err(text)?;
        let mut at = vec![[0, 0]; atoms];
        for y in 0..lattice.total_height() {
            for x in 0..lattice.total_width() {
                if let Some(a) = lattice.get(x, y) {
                    at[a as usize] = [x, y];
                }
            }
        }
        frames.push(at);
    }
    Ok(frames)
}

/// Forward script of one coupling step of a syndrome extraction round.
pub fn route_step_json(name: &str, side: &str, step: usize) -> Result<String, String> {
    let code = load_fixture(name).map_err(text)?;
    let side: CheckType = side.parse().map_err(text)?;
    let route = route_se_round(&code, side, RouteOptions::default()).map_err(text)?;
    let s = route
        .steps
        .get(step)
        .ok_or_else(|| format!("step {step} out of {}", route.steps.len()))?;
    let lattice = s.forward.fresh_lattice();
    let out = json!({
        "steps": route.steps.len(),
        "element": s.element.to_string(),
        "sector": s.sector,
        "action": s.action,
        "width": s.forward.width,
        "height": s.forward.height,
        "total_width": lattice.total_width(),
        "total_height": lattice.total_height(),
        "lines": s.forward.to_text().lines().collect::<Vec<_>>(),
        "frames": positions(&s.forward)?,
        "summary": s.forward.summary().map_err(text)?,
    });
    Ok(out.to_string())
}

/// `|B_r|` of the left Cayley graph on `{x, y}`, next to the abelian group
/// of the same size.
pub fn ball_growth_json(ell: u32, m: u32, q: u32, radius: usize) -> Result<String, String> {
    let curve = |spec: GroupSpec| -> Result<Value, String> {
        let g = cayley_graph(&spec, &[spec.x(), spec.y()], Side::Left).map_err(text)?;
        Ok(json!({ "group": spec.to_string(), "sizes": ball_growth(&g, 0, radius).map_err(text)? }))
    };
    let twisted = curve(GroupSpec::new(ell, m, q).map_err(text)?)?;
    let abelian = curve(GroupSpec::new(ell, m, 1).map_err(text)?)?;
    Ok(json!({ "twisted": twisted, "abelian": abelian }).to_string())
}

#[wasm_bindgen]
pub fn fixture_names() -> String {
    fixture_names_json()
}

#[wasm_bindgen]
pub fn code_layout(name: &str) -> Result<String, JsError> {
    code_layout_json(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn route_step(name: &str, side: &str, step: usize) -> Result<String, JsError> {
    route_step_json(name, side, step).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn ball_sizes(ell: u32, m: u32, q: u32, radius: usize) -> Result<String, JsError> {
    ball_growth_json(ell, m, q, radius).map_err(|e| JsError::new(&e))
}
