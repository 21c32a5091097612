//! Canonical deterministic text formatting for machine-readable output.
//!
//! All JSON and CSV emitted by this crate (and by the companion CLI) uses one
//! fixed float format — `{:.16e}`, 17 significant digits, exponent form — and
//! hand-assembled documents with a fixed field order. A value therefore
//! always serializes to the same bytes, and every emitted float re-parses to
//! exactly the same double. That rules out shortest-representation printers
//! and map-ordered serializers, which is why no serialization crate is used.

use num_complex::Complex64;

/// Fixed-format float: 17 significant digits, exponent form. Non-finite
/// values become quoted strings (`"nan"`, `"inf"`, `"-inf"`), since JSON has
/// no literals for them.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "\"nan\"".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "\"inf\"".to_string() } else { "\"-inf\"".to_string() };
    }
    format!("{x:.16e}")
}

/// Complex number as a two-element array `[re, im]`.
pub fn fmt_complex(z: Complex64) -> String {
    format!("[{},{}]", fmt_f64(z.re), fmt_f64(z.im))
}

/// Array of complex numbers.
pub fn fmt_complex_slice(zs: &[Complex64]) -> String {
    let parts: Vec<String> = zs.iter().map(|&z| fmt_complex(z)).collect();
    format!("[{}]", parts.join(","))
}

/// Array of floats.
pub fn fmt_f64_slice(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| fmt_f64(x)).collect();
    format!("[{}]", parts.join(","))
}

/// JSON string escape.
pub fn fmt_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
