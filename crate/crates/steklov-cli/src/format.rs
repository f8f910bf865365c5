//! Significant-digit number formatting for CSV and reports.
//!
//! `sig(x, d)` behaves like C's `%.*g`: round to `d` significant digits,
//! fixed notation for moderate exponents, scientific otherwise, trailing
//! zeros trimmed. Output is a pure function of the bits of `x`, which keeps
//! repeated runs byte-identical.

/// Format `x` with `digits` significant digits.
pub fn sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("float in scientific notation");
    let exponent: i32 = exponent.parse().expect("numeric exponent");
    if -4 <= exponent && exponent < digits as i32 {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim(mantissa), exponent)
    }
}

/// 12 significant digits: the CSV column format.
pub fn sig12(x: f64) -> String {
    sig(x, 12)
}

/// 15 significant digits: the report format.
pub fn sig15(x: f64) -> String {
    sig(x, 15)
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
