//! Number formatting shared by every output table.

/// Formats `v` with 12 significant digits, trailing zeros trimmed.
/// Fixed notation keeps at least one fractional digit (`1.0`, `0.81`);
/// very small or very large magnitudes switch to `1.5e-7` style.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0.0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let fixed = format!("{v:.decimals$}");
    if fixed.contains('.') {
        trim_zeros(&fixed)
    } else {
        format!("{fixed}.0")
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}

/// `v` rounded to the value [`sig12`] prints.
pub fn round12(v: f64) -> f64 {
    sig12(v).parse().unwrap_or(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(sig12(1.0), "1.0");
        assert_eq!(sig12(0.0), "0.0");
        assert_eq!(sig12(0.81), "0.81");
        assert_eq!(sig12(-0.5), "-0.5");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(123456.789), "123456.789");
        assert_eq!(sig12(0.9999999999999998), "1.0");
        assert_eq!(sig12(1.25e-7), "1.25e-7");
        assert_eq!(sig12(3.0e15), "3.0e15");
        assert_eq!(sig12(42.0), "42.0");
    }

    #[test]
    fn twelve_significant_digits() {
        for v in [std::f64::consts::PI, 0.000123456789012345, 98765.4321098765] {
            let s = sig12(v);
            let digits: String = s
                .split('e')
                .next()
                .unwrap()
                .chars()
                .filter(|c| c.is_ascii_digit())
                .collect();
            assert_eq!(digits.trim_start_matches('0').len(), 12, "{s}");
            assert!(((round12(v) - v) / v).abs() < 1e-11);
        }
    }
}
