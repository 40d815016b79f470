//! Decimal formatting for serialized output.
//!
//! All floating-point values written to JSON, CSV, or DOT go through
//! [`fmt_sig15`]: 15 significant digits, trailing zeros stripped, positional
//! notation for moderate exponents and scientific otherwise. 15 digits
//! round-trips every double the crate produces (values are separated by more
//! than their 15-digit rounding error), and a single formatter makes byte
//! comparisons of serialized artifacts meaningful.

/// Format `x` with 15 significant digits.
///
/// The output parses back (via `str::parse::<f64>`) to a value that formats
/// to the same string, so serialization is idempotent.
pub fn fmt_sig15(x: f64) -> String {
    assert!(x.is_finite(), "non-finite value in serialized output");
    if x == 0.0 {
        return "0".to_string();
    }
    let neg = x < 0.0;
    // {:.14e} renders exactly one digit before the point and 14 after,
    // with a bare exponent ("2.99999999999999e-5").
    let s = format!("{:.14e}", x.abs());
    let (mant, exp) = s.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent parses");
    let mut digits: Vec<u8> = mant.bytes().filter(|b| b.is_ascii_digit()).collect();
    while digits.len() > 1 && *digits.last().unwrap() == b'0' {
        digits.pop();
    }
    let digits = String::from_utf8(digits).unwrap();
    let n = digits.len() as i32;

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp >= 0 && exp <= 15 {
        // Positional, point inside or right of the digits.
        let int_len = exp + 1;
        if n <= int_len {
            out.push_str(&digits);
            for _ in 0..(int_len - n) {
                out.push('0');
            }
        } else {
            out.push_str(&digits[..int_len as usize]);
            out.push('.');
            out.push_str(&digits[int_len as usize..]);
        }
    } else if exp < 0 && exp >= -5 {
        // Positional, leading zeros.
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        // Scientific.
        out.push_str(&digits[..1]);
        if n > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    }
    out
}
