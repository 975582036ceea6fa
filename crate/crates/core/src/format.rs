//! Number and rule formatting shared by the command-line front end.

use std::fmt::Write as _;

use crate::rules::QuadratureRule;

/// `%.17g`: 17 significant digits, trailing zeros dropped, scientific
/// notation outside `1e-5 <= |x| < 1e17`. Round-trips every finite f64.
pub fn sig17(x: f64) -> String {
    general(x, 17)
}

/// `%.{digits}g` formatting.
pub fn general(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Fixed-point with 14 decimals, the width used for printed tables.
pub fn fixed14(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14}")
    } else {
        sig17(x)
    }
}

/// A JSON number, or `null` when `x` is not finite.
pub fn json_number(x: f64) -> String {
    if x.is_finite() {
        sig17(x)
    } else {
        "null".into()
    }
}

/// A JSON string literal.
pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| json_number(*v)).collect();
    format!("[{}]", items.join(","))
}

/// `{"family":…,"alpha":…,"nodes":[…],"weights":[…],"degree":…}`.
pub fn rule_json(rule: &QuadratureRule) -> String {
    format!(
        "{{\"family\":{},\"alpha\":{},\"nodes\":{},\"weights\":{},\"degree\":{}}}",
        json_string(rule.family().name()),
        json_number(rule.alpha().value()),
        json_array(rule.nodes()),
        json_array(rule.weights()),
        rule.degree()
    )
}
