//! Byte-stable JSON: sorted keys, floats at 12 significant digits, and a
//! two-decimal `display` companion for normalized complexities.

use serde::Serialize;
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::encoding::SchemeRegistry;
use crate::lz::ComplexityReport;

pub const TOOL: &str = "tcclab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SIG_DIGITS: usize = 12;

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let s = format!("{:.*e}", SIG_DIGITS - 1, x);
    let r: f64 = s.parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// The two-decimal form used when reporting values.
pub fn display2(x: f64) -> String {
    format!("{:.2}", x)
}

/// Recursively rounds floats; integers are left alone. Object keys come out
/// sorted because `serde_json::Map` is ordered.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap());
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    canonicalize(serde_json::to_value(x).expect("report types serialize"))
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonicalize(v.clone())).expect("value serializes");
    s.push('\n');
    s
}

/// A complexity report with its display field.
pub fn complexity_value(r: &ComplexityReport) -> Value {
    let mut v = to_value(r);
    if let Value::Object(o) = &mut v {
        o.insert("display".into(), Value::String(display2(r.normalized)));
    }
    v
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the registry as serialized, identifying the scheme manifest a
/// report was produced with.
pub fn manifest_hash(registry: &SchemeRegistry) -> String {
    sha256_hex(registry.to_json().as_bytes())
}

/// Envelope shared by every command's output.
pub fn run_report(command: &[String], inputs: Value, registry: &SchemeRegistry, result: Value) -> Value {
    let mut o = Map::new();
    o.insert("tool".into(), Value::String(TOOL.into()));
    o.insert("version".into(), Value::String(VERSION.into()));
    o.insert("command".into(), Value::Array(command.iter().cloned().map(Value::String).collect()));
    o.insert("inputs".into(), inputs);
    o.insert("scheme_manifest_sha256".into(), Value::String(manifest_hash(registry)));
    o.insert("result".into(), result);
    canonicalize(Value::Object(o))
}
