//! Locale-independent number formatting for CSV output.

/// Formats like C's `%.9g`: nine significant digits, trailing zeros dropped,
/// exponent form outside `1e-5 ..= 1e9`.
pub fn g9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let mantissa = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::g9;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.017, "0.017"),
            (1e-6, "1e-06"),
            (10.0 / 17.0, "0.588235294"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (9.9999999996, "10"),
            (0.000123456789123, "0.000123456789"),
            (2.839656249902154e-26, "2.83965625e-26"),
            (11.0 / 15.0, "0.733333333"),
        ];
        for (x, s) in cases {
            assert_eq!(g9(x), s, "{x:e}");
        }
    }
}
