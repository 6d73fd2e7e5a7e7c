//! JSON Schema documents for every file the harness reads or writes.

use serde_json::{json, Value};

const DRAFT: &str = "https://json-schema.org/draft/2020-12/schema";

fn number() -> Value {
    json!({ "type": "number" })
}

fn count() -> Value {
    json!({ "type": "integer", "minimum": 0 })
}

fn group() -> Value {
    json!({
        "type": "object",
        "description": "Finite abelian group Z_n1 x ... x Z_nk; every factor at least 1.",
        "required": ["factors"],
        "properties": { "factors": { "type": "array", "items": { "type": "integer", "minimum": 1 }, "minItems": 1 } },
        "additionalProperties": false
    })
}

fn set_file() -> Value {
    json!({
        "type": "object",
        "description": "Subset of one side (bits for every element) or of the plane (row-major, cell (x, y) at x*side + y). Bit i is bit i % 8 of byte i / 8, base64 encoded.",
        "required": ["mode", "shape", "bits"],
        "properties": {
            "mode": { "enum": ["group", "grid"] },
            "shape": { "type": "array", "items": { "type": "integer", "minimum": 1 }, "minItems": 1,
                       "description": "Group factors, or [n] for the n x n grid." },
            "bits": { "type": "string", "contentEncoding": "base64" }
        }
    })
}

fn monomial() -> Value {
    json!({
        "type": "object",
        "description": "coeff * 2^log2_coeff * delta^delta_pow * beta^beta_pow, clamped to (0, 1].",
        "properties": {
            "coeff": { "type": "number", "default": 1.0 },
            "log2_coeff": { "type": "number", "default": 0.0 },
            "delta_pow": { "type": "number", "default": 0.0 },
            "beta_pow": { "type": "number", "default": 0.0 }
        },
        "additionalProperties": false
    })
}

fn constants() -> Value {
    json!({
        "type": "object",
        "required": ["preset", "alpha", "alpha0", "alpha1", "eps_rule", "max_steps", "min_density_gain",
                     "density_ceiling", "kappa", "max_translates"],
        "properties": {
            "preset": { "enum": ["desk", "asymptotic", "custom"] },
            "alpha": monomial(),
            "alpha0": monomial(),
            "alpha1": number(),
            "eps_rule": {
                "type": "object",
                "required": ["alpha0_pow"],
                "properties": { "log2_coeff": number(), "alpha0_pow": number() }
            },
            "max_steps": count(),
            "min_density_gain": {
                "oneOf": [
                    { "type": "object", "required": ["kind"], "properties": { "kind": { "const": "increment-bound" } } },
                    { "allOf": [ { "type": "object", "required": ["kind"], "properties": { "kind": { "const": "monomial" } } }, monomial() ] }
                ]
            },
            "density_ceiling": number(),
            "kappa": number(),
            "max_translates": count(),
            "notes": { "type": "array", "items": { "type": "string" } }
        },
        "additionalProperties": false
    })
}

fn verdict() -> Value {
    let kind = |k: &str, req: &[&str]| {
        let mut r = vec!["kind"];
        r.extend_from_slice(req);
        json!({ "type": "object", "required": r, "properties": { "kind": { "const": k } } })
    };
    json!({
        "oneOf": [
            kind("corner-count", &["corners", "heuristic"]),
            kind("marginal-increment", &["axis", "p"]),
            kind("box-norm-increment", &["x0", "y0"]),
            kind("fourier-increment", &["xi0", "factor"]),
            kind("terminated", &["reason"])
        ],
        "description": "terminated.reason.kind is one of sizing, density-ceiling, max-steps, no-increment."
    })
}

fn trace() -> Value {
    json!({
        "type": "object",
        "required": ["schema_version", "seed", "shape", "input_size", "config", "steps"],
        "properties": {
            "schema_version": { "const": 1 },
            "seed": count(),
            "shape": { "type": "object", "required": ["mode", "shape"] },
            "input_size": count(),
            "config": constants(),
            "steps": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["step", "a_size", "e1_size", "e2_size", "delta", "beta1", "beta2", "bohr_dim",
                                 "bohr_eps", "translate", "alpha", "rect_ratio", "verdict"],
                    "properties": {
                        "step": count(), "a_size": count(), "e1_size": count(), "e2_size": count(),
                        "delta": number(), "beta1": number(), "beta2": number(),
                        "bohr_dim": count(), "bohr_eps": number(),
                        "translate": { "type": "array", "items": count(), "minItems": 2, "maxItems": 2 },
                        "alpha": number(),
                        "rect_ratio": { "type": ["number", "null"] },
                        "verdict": verdict(),
                        "f1": set_file(), "f2": set_file(),
                        "count": count(), "new_density": number(), "required_gain": number(),
                        "notes": { "type": "array", "items": { "type": "string" } }
                    }
                }
            }
        }
    })
}

fn object(req: &[&str]) -> Value {
    json!({ "type": "object", "required": req })
}

/// Every schema, keyed by name.
pub fn all() -> Value {
    json!({
        "$schema": DRAFT,
        "schemas": {
            "group": group(),
            "set-file": set_file(),
            "constants": constants(),
            "increment-trace": trace(),
            "corner-count": object(&["mode", "side", "size", "corners"]),
            "uniformity-report": object(&["a_size", "e1_size", "e2_size", "density", "alpha", "alpha_bias", "box_norm4",
                                          "rect_ratio", "indicator_ratio", "verdicts"]),
            "bohr-report": object(&["group", "dim", "eps", "kappa", "size", "lower_bound", "lower_bound_holds", "regular",
                                    "window", "plus_size", "minus_size"]),
            "extremal-result": object(&["n", "mode", "max_size", "witness", "nodes_explored", "optimal"]),
            "behrend": object(&["n", "size", "set", "chosen"]),
            "oracle-suite": json!({
                "type": "object",
                "required": ["tolerance", "seed", "samples", "results"],
                "properties": {
                    "results": { "type": "array", "items": object(&["group", "invariant", "measure", "measured", "threshold", "pass"]) }
                }
            })
        }
    })
}
