//! JSON rendering of jets and tensors. Objects have sorted keys, so equal
//! inputs give byte-identical reports; scalars are `"p/q"` strings in exact
//! mode and decimal strings in float mode.

use ambient_core::riemann::JetTensor;
use ambient_core::{MultiJet, Scalar};
use serde_json::{json, Value};

/// `{"order": k, "terms": [{"x": [e₁, …, eₙ], "c": "p/q"}, …]}` in the
/// coordinates `x - x₀`, with an `"rho"` exponent on terms that carry one.
pub fn jet<S: Scalar>(j: &MultiJet<S>) -> Value {
    let sp = j.space();
    let n = sp.dim();
    let rho = sp.rho_var();
    let terms: Vec<Value> = j
        .terms()
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(idx, c)| {
            let e = sp.exponents(*idx);
            let x: Vec<u8> = (0..n).map(|i| sp.coord_var(i).map_or(0, |v| e[v])).collect();
            let mut t = json!({ "x": x, "c": c.to_report_string() });
            if let Some(r) = rho.filter(|&r| e[r] > 0) {
                t["rho"] = json!(e[r]);
            }
            t
        })
        .collect();
    json!({ "order": j.order(), "terms": terms })
}

/// Components of a tensor, with 1-based indices; `symmetric` keeps `i ≤ j`.
pub fn tensor<S: Scalar>(t: &JetTensor<S>, symmetric: bool) -> Value {
    let comps: Vec<Value> = t
        .indices()
        .filter(|ix| !symmetric || ix.windows(2).all(|w| w[0] <= w[1]))
        .map(|ix| {
            let one_based: Vec<usize> = ix.iter().map(|i| i + 1).collect();
            json!({ "index": one_based, "jet": jet(t.get(&ix)) })
        })
        .collect();
    Value::Array(comps)
}

/// Whether every coefficient is zero (exactly, or below `1e-9 · scale`).
pub fn negligible<S: Scalar>(xs: &[MultiJet<S>], scale: f64) -> bool {
    xs.iter().all(|x| if S::EXACT { x.is_zero() } else { x.max_abs_f64() <= 1e-9 * scale.max(1.0) })
}
