//! Locale-independent float formatting with 17 significant digits.

use em_manifold_core::C64;
use serde_json::value::RawValue;

/// `d.dddddddddddddddde±x`; `NaN`, `inf` and `-inf` pass through.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number with 17 significant digits, `null` when not finite.
pub fn json_num(x: f64) -> Box<RawValue> {
    let s = if x.is_finite() { float(x) } else { "null".to_string() };
    RawValue::from_string(s).expect("formatted float is valid JSON")
}

pub fn json_complex(z: C64) -> [Box<RawValue>; 2] {
    [json_num(z.re), json_num(z.im)]
}

pub fn json_vec3(v: [f64; 3]) -> [Box<RawValue>; 3] {
    v.map(json_num)
}

/// Joins formatted floats into one CSV line (no trailing newline).
pub fn csv_row(values: &[f64]) -> String {
    let mut s = String::with_capacity(values.len() * 24);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&float(*v));
    }
    s
}
