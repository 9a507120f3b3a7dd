//! Browser bindings for the triple checker, the equivalence test and the
//! family scan. Every function returns a JSON string; errors come back as
//! `{"error": "..."}`.

use cs_core::cstriple::{dual, make_standard_matrix};
use cs_core::cubicorder::{ideal_from_triple, is_invertible, is_invertible_fast, ClassData, ClassVerdict};
use cs_core::families::{scan_families, SolvedTraceSet};
use cs_core::CsTriple;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest prime bound the page accepts, to keep the tab responsive.
pub const MAX_PMAX: u32 = 2_000_000;

fn error(msg: impl ToString) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn parse(s: &str) -> Result<CsTriple, String> {
    s.parse::<CsTriple>().map_err(|e| e.to_string())
}

/// Matrix, ideal, norm, invertibility and dual of a triple such as `"2,7,27"`.
#[wasm_bindgen]
pub fn check_triple(triple: &str) -> String {
    let t = match parse(triple) {
        Ok(t) => t,
        Err(e) => return error(e),
    };
    let ideal = ideal_from_triple(&t);
    let matrix = make_standard_matrix(&t).map(|m| m.matrix().to_string()).unwrap_or_default();
    let (num, den) = ideal.norm();
    json!({
        "triple": t.to_string(),
        "matrix": matrix,
        "ideal": ideal.to_string(),
        "norm": if den == 1.into() { num.to_string() } else { format!("{num}/{den}") },
        "invertible": is_invertible(&ideal),
        "invertible_local": is_invertible_fast(&t),
        "dual": dual(&t).map(|d| d.to_string()).unwrap_or_default(),
    })
    .to_string()
}

/// Whether two triples at the same trace give equivalent ideal classes.
#[wasm_bindgen]
pub fn equivalent(a: &str, b: &str, bound_cap: u32) -> String {
    let (a, b) = match (parse(a), parse(b)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return error(e),
    };
    if a.n() != b.n() {
        return error("triples must share the trace n");
    }
    let v = ClassData::new(ideal_from_triple(&a))
        .compare_escalating(&ClassData::new(ideal_from_triple(&b)), bound_cap.into());
    let v: Value = match v {
        Ok(ClassVerdict::Equivalent { num, den }) => json!({
            "verdict": "equivalent",
            "witness": format!("({}, {}, {})/{}", num[0], num[1], num[2], den),
        }),
        Ok(ClassVerdict::NotEquivalent(sep)) => json!({ "verdict": "not equivalent", "reason": format!("{sep:?}") }),
        Ok(ClassVerdict::Inconclusive { bound }) => json!({ "verdict": "inconclusive", "bound": bound }),
        Err(e) => return error(e),
    };
    v.to_string()
}

/// Family solutions `(c, p, n₀)` for `p ≤ pmax` with a solved residue.
#[wasm_bindgen]
pub fn families(pmax: u32) -> String {
    if !(2..=MAX_PMAX).contains(&pmax) {
        return error(format!("pmax must lie in 2..={MAX_PMAX}"));
    }
    let sols = scan_families(pmax.into(), &SolvedTraceSet::default());
    serde_json::to_string(&sols).unwrap_or_else(error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check() {
        let v: Value = serde_json::from_str(&check_triple("2,7,27")).unwrap();
        assert_eq!(v["invertible"], false);
        assert_eq!(v["norm"], "7");
        assert_eq!(v["dual"], "(2,7,-22)");
        assert!(check_triple("3,7,27").contains("error"));
    }

    #[test]
    fn equivalence() {
        let v: Value = serde_json::from_str(&equivalent("47,151,70", "149,177,70", 4096)).unwrap();
        assert_eq!(v["verdict"], "equivalent");
        assert!(equivalent("1,1,70", "1,1,71", 32).contains("error"));
    }

    #[test]
    fn family_scan() {
        let v: Value = serde_json::from_str(&families(17)).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 3);
        assert!(families(1).contains("error"));
    }
}
