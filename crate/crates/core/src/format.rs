//! Number formatting shared by the CLI outputs and the verify report.

/// Significant digits in every emitted number.
pub const SIG_DIGITS: usize = 12;

/// `x` with [`SIG_DIGITS`] significant digits, in the style of C's `%.12g`:
/// fixed notation for moderate exponents, scientific otherwise, trailing
/// zeros removed.
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIG_DIGITS as i32;
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= p {
        format!(
            "{}e{}{:02}",
            trim(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        trim(&format!("{:.*}", (p - 1 - exp) as usize, x)).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig(0.5), "0.5");
        assert_eq!(sig(-1.0 / 3.0), "-0.333333333333");
        assert_eq!(sig(5.244115108584238), "5.24411510858");
        assert_eq!(sig(1e-7), "1e-07");
        assert_eq!(sig(123456789012345.0), "1.23456789012e+14");
        assert_eq!(sig(100.0), "100");
        assert_eq!(sig(0.0001234), "0.0001234");
        assert_eq!(sig(f64::NAN), "NaN");
        assert_eq!(sig(999999999999.9), "1e+12");
    }
}
