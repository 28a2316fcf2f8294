//! Reports as `key=value` lines or JSON.
//!
//! Nested fields are flattened with dots (`verification.swap_free=true`),
//! lists are comma-joined, and absent values print as `none`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::geometry::SquareId;
use crate::gmmgsc::InstanceKind;
use crate::oracle::VerificationReport;

pub trait Report: Serialize {
    fn to_text(&self) -> String {
        let value = serde_json::to_value(self).expect("reports serialize");
        let mut out = String::new();
        flatten("", &value, &mut out);
        out
    }

    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        other => {
            out.push_str(prefix);
            out.push('=');
            out.push_str(&scalar(other));
            out.push('\n');
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: InstanceKind,
    pub m: usize,
    pub n: usize,
    pub n_prime: usize,
    pub solution: Vec<SquareId>,
    pub size: usize,
    pub membership: usize,
    /// Most swaps applied on any single line instance.
    pub max_swaps: usize,
    pub verification: Option<VerificationReport>,
}

impl Report for SolveReport {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub opt: usize,
    pub solution: Vec<SquareId>,
}

impl Report for OracleReport {}

impl Report for VerificationReport {}
