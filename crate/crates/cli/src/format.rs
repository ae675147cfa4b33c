//! Stable number formatting for rendered tables.
//!
//! All rounding goes through `{:e}`/`{:.N}`, which round the exact binary value
//! half-to-even, so output is identical across platforms.

/// `value` rounded to `digits` significant digits, in plain decimal notation when the
/// decimal exponent is in `-4..=9`, scientific (`1.2345e-7`) otherwise.
pub fn sig(value: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if !value.is_finite() {
        return "n/a".to_string();
    }
    if value == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    if !(-4..=9).contains(&exp) {
        return format!("{sign}{mantissa}e{exp}");
    }
    let d: String = mantissa.chars().filter(|c| *c != '.').collect();
    let body = if exp < 0 {
        format!("0.{}{d}", "0".repeat((-exp - 1) as usize))
    } else {
        let int_len = exp as usize + 1;
        if int_len >= d.len() {
            format!("{d}{}", "0".repeat(int_len - d.len()))
        } else {
            format!("{}.{}", &d[..int_len], &d[int_len..])
        }
    };
    format!("{sign}{body}")
}

/// Fixed number of decimals.
pub fn fixed(value: f64, decimals: usize) -> String {
    format!("{value:.decimals$}")
}

/// `decimals` fixed decimals, unless that would print fewer than one significant
/// digit, in which case `decimals - 1` significant digits.
pub fn compact(value: f64, decimals: usize) -> String {
    if value == 0.0 || value.abs() >= 0.5 * 10f64.powi(-(decimals as i32)) {
        fixed(value, decimals)
    } else {
        sig(value, decimals.saturating_sub(1).max(1))
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn full(value: f64) -> String {
    value.to_string()
}

pub fn opt_sig(value: Option<f64>, digits: usize) -> String {
    value.map_or_else(|| "n/a".to_string(), |v| sig(v, digits))
}

pub fn opt_full(value: Option<f64>) -> String {
    value.map(full).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_keeps_small_values_visible() {
        assert_eq!(compact(0.16383, 4), "0.1638");
        assert_eq!(compact(-0.0194874, 4), "-0.0195");
        assert_eq!(compact(0.000383, 4), "0.0004");
        assert_eq!(compact(0.0000383, 4), "3.83e-5");
        assert_eq!(compact(-3.2e-9, 4), "-3.20e-9");
        assert_eq!(compact(0.0, 4), "0.0000");
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig(-0.146841, 5), "-0.14684");
        assert_eq!(sig(0.018713, 5), "0.018713");
        assert_eq!(sig(3.0546e-3, 5), "0.0030546");
        assert_eq!(sig(2746123.4, 5), "2746100");
        assert_eq!(sig(41931.0, 5), "41931");
        assert_eq!(sig(11.948, 5), "11.948");
        assert_eq!(sig(1.0, 5), "1.0000");
        assert_eq!(sig(9.99996, 5), "10.000");
        assert_eq!(sig(1.5e-7, 3), "1.50e-7");
        assert_eq!(sig(1.5e12, 2), "1.5e12");
        assert_eq!(sig(0.0, 5), "0");
        assert_eq!(sig(f64::NAN, 5), "n/a");
    }

    #[test]
    fn ties_round_to_even() {
        // 0.125 and 0.375 are exact in binary
        assert_eq!(sig(0.125, 2), "0.12");
        assert_eq!(sig(0.375, 2), "0.38");
        assert_eq!(fixed(0.125, 2), "0.12");
    }

    #[test]
    fn full_precision_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 123456.789] {
            assert_eq!(full(v).parse::<f64>().unwrap(), v);
        }
    }
}
