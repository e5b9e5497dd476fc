//! Bindings for the browser playground in `www/`.
//!
//! Every export takes ontology text in the statement syntax and returns a
//! JSON string. The `*_json` functions are the same operations without the
//! JavaScript boundary.

use ontorepair::evaluation::inferred_hierarchy;
use ontorepair::refinement::{Direction, RefinementContext, DEFAULT_SIZE_CAP};
use ontorepair::repair::{repair as run_repair, Method, RepairConfig};
use ontorepair::syntax::{parse_concept, parse_ontology, serialize_ontology};
use ontorepair::{is_consistent, Ontology};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Refinement results beyond this many members are truncated.
pub const MAX_LISTED: usize = 500;

fn parse(text: &str) -> Result<Ontology, String> {
    parse_ontology(text).map_err(|e| format!("parse error at {e}"))
}

/// `{"consistent": bool, "subsumptions": ["SubClassOf(A B)", ...]}`.
pub fn check_json(text: &str) -> Result<String, String> {
    let o = parse(text)?;
    let consistent = is_consistent(&o).map_err(|e| e.to_string())?;
    let mut subs = Vec::new();
    if consistent {
        for (a, b) in inferred_hierarchy(&o, &o.concept_names()).map_err(|e| e.to_string())? {
            if a != b {
                subs.push(format!("SubClassOf({a} {b})"));
            }
        }
    }
    Ok(json!({ "consistent": consistent, "subsumptions": subs }).to_string())
}

/// `{"concepts": [...], "truncated": bool}` for `depth` rounds of
/// generalisation (`up`) or specialisation.
pub fn refine_json(text: &str, concept: &str, up: bool, depth: u32) -> Result<String, String> {
    let o = parse(text)?;
    let c = parse_concept(concept).map_err(|e| format!("concept: {e}"))?;
    let dir = if up { Direction::Up } else { Direction::Down };
    let mut ctx = RefinementContext::new(o).map_err(|e| e.to_string())?;
    let all = ctx.refine_iter(dir, &c, depth.min(4) as usize, DEFAULT_SIZE_CAP).map_err(|e| e.to_string())?;
    let mut concepts: Vec<String> = all.iter().map(ToString::to_string).collect();
    concepts.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let truncated = concepts.len() > MAX_LISTED;
    concepts.truncate(MAX_LISTED);
    Ok(json!({ "concepts": concepts, "truncated": truncated }).to_string())
}

/// `{"ontology": text, "trace": {...}}`. `method` is `weaken` or `remove`.
pub fn repair_json(text: &str, method: &str, seed: u32) -> Result<String, String> {
    let o = parse(text)?;
    let method = match method {
        "weaken" => Method::Weaken,
        "remove" => Method::Remove,
        other => return Err(format!("unknown method `{other}`")),
    };
    let cfg = RepairConfig { method, seed: u64::from(seed), ..RepairConfig::default() };
    let (fixed, trace) = run_repair(&o, &cfg).map_err(|e| e.to_string())?;
    let trace: serde_json::Value = serde_json::from_str(&trace.to_json()).map_err(|e| e.to_string())?;
    Ok(json!({ "ontology": serialize_ontology(&fixed), "trace": trace }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn check(text: &str) -> Result<String, JsValue> {
    js(check_json(text))
}

#[wasm_bindgen]
pub fn refine(text: &str, concept: &str, up: bool, depth: u32) -> Result<String, JsValue> {
    js(refine_json(text, concept, up, depth))
}

#[wasm_bindgen]
pub fn repair(text: &str, method: &str, seed: u32) -> Result<String, JsValue> {
    js(repair_json(text, method, seed))
}
