//! Bit-exact textual form for `f64` values, used by the table file format.
//!
//! The notation is C99 hexadecimal floating point with a fixed 13-digit
//! mantissa (`0x1.23456789abcdep+4`), so formatting and parsing round-trip
//! every finite value without rounding.

const FRAC_BITS: u64 = 52;
const FRAC_MASK: u64 = (1 << FRAC_BITS) - 1;
const EXP_BIAS: i64 = 1023;

/// Format a finite `f64` exactly.
pub(crate) fn format_hex(x: f64) -> String {
    assert!(x.is_finite(), "cannot format {x}");
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_raw = (bits >> FRAC_BITS & 0x7ff) as i64;
    let frac = bits & FRAC_MASK;
    if exp_raw == 0 {
        // Zero and subnormals share the leading digit 0 and the minimum
        // exponent.
        if frac == 0 {
            format!("{sign}0x0.0000000000000p+0")
        } else {
            format!("{sign}0x0.{frac:013x}p-1022")
        }
    } else {
        format!("{sign}0x1.{frac:013x}p{:+}", exp_raw - EXP_BIAS)
    }
}

/// Parse the output of [`format_hex`]. Returns `None` on any deviation from
/// that exact shape.
pub(crate) fn parse_hex(s: &str) -> Option<f64> {
    let (negative, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let s = s.strip_prefix("0x")?;
    let (lead, s) = s.split_at_checked(1)?;
    let s = s.strip_prefix('.')?;
    let (digits, exp_part) = s.split_once('p')?;
    if digits.len() != 13 || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    let frac = u64::from_str_radix(digits, 16).ok()?;
    if !exp_part.starts_with(['+', '-']) {
        return None;
    }
    let exp: i64 = exp_part.parse().ok()?;
    let bits = match lead {
        "0" => {
            if frac == 0 {
                if exp != 0 {
                    return None;
                }
                0
            } else {
                if exp != -1022 {
                    return None;
                }
                frac
            }
        }
        "1" => {
            let exp_raw = exp + EXP_BIAS;
            if !(1..=0x7fe).contains(&exp_raw) {
                return None;
            }
            (exp_raw as u64) << FRAC_BITS | frac
        }
        _ => return None,
    };
    let v = f64::from_bits(bits);
    Some(if negative { -v } else { v })
}
