//! JSON renderings. Objects are `serde_json::Map`, which keeps keys sorted, so
//! equal inputs give byte-identical output.

use serde_json::{json, Value};

use crate::chow::{chow, CurveClass};
use crate::gw_engine::{Derivation, Engine, EngineError, InvariantKey, InvariantValue};
use crate::hyperelliptic::HyperellipticTable;
use crate::quantum::{QCohVector, QuantumError, SmallQuantum};
use crate::relation::standard_relations;

pub fn value_json(v: &InvariantValue) -> Value {
    match v {
        InvariantValue::Known(x) => json!({ "status": "known", "value": x.to_string() }),
        InvariantValue::Unknown(r) => json!({ "status": "unknown", "reason": r }),
    }
}

pub fn beta_json(b: &CurveClass) -> Value {
    json!([b.a, b.b, b.c])
}

pub fn derivation_json(beta: &CurveClass, ins: &[usize], d: &Derivation) -> Value {
    json!({
        "beta": beta_json(beta),
        "insertions": ins,
        "result": value_json(&d.value),
        "provenance": d.provenance(),
        "wdvv_steps": d.steps,
    })
}

pub fn key_json(key: &InvariantKey, d: &Derivation) -> Value {
    let ins: Vec<usize> = key.insertions.iter().map(|&i| i as usize).collect();
    derivation_json(&key.beta, &ins, d)
}

/// `[{ "q": [e1, e2, e3], "basis": i, "coeff": "p/q" }, ...]` in rendering order.
pub fn qvector_json(v: &QCohVector) -> Value {
    Value::Array(
        v.entries()
            .into_iter()
            .map(|(m, i, c)| json!({ "q": [m.e1, m.e2, m.e3], "basis": i, "coeff": c.to_string() }))
            .collect(),
    )
}

pub fn hyper_json(t: &HyperellipticTable) -> Value {
    let rows: Vec<Value> = t
        .counts
        .iter()
        .map(|(h, v)| {
            json!({
                "h": h,
                "count": value_json(v),
                "provenance": t.provenance.get(h).cloned().unwrap_or_default(),
            })
        })
        .collect();
    json!({ "d1": t.d1, "d2": t.d2, "l": t.l, "rows": rows })
}

/// Everything the engine produces at its truncation: cup table, seeds, the
/// solved two-point table, basis quantum products and relation residuals.
pub fn full_export(engine: &Engine) -> Result<Value, QuantumError> {
    let qh = SmallQuantum::new(engine);
    let mut products = Vec::new();
    for i in 0..crate::chow::NUM_BASIS {
        for j in i..crate::chow::NUM_BASIS {
            let p = qh.basis_product(i, j)?;
            products.push(json!({ "i": i, "j": j, "product": p.to_string(), "terms": qvector_json(&p) }));
        }
    }
    let mut residuals = Vec::new();
    for r in standard_relations() {
        let res = qh.verify_relation(&r)?;
        residuals.push(json!({ "id": r.id, "zero": res.is_zero(), "residual": res.to_string() }));
    }
    let table: Vec<Value> = engine
        .derive_two_point_table()
        .map_err(QuantumError::from)?
        .iter()
        .map(|e| key_json(&e.key, &e.derivation))
        .collect();
    Ok(json!({
        "c_max": engine.config().c_max,
        "cup_table": chow().cup_table_lines(),
        "seeds": engine.seeds().to_lines(),
        "two_point_table": table,
        "products": products,
        "residuals": residuals,
    }))
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn engine_error_json(e: &EngineError) -> Value {
    json!({ "error": e.to_string() })
}
