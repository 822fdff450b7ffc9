//! Number rendering shared by the TSV and JSON writers.

/// Significant digits used unless the user asks otherwise.
pub const DEFAULT_DIGITS: usize = 12;

/// Render `v` with `digits` significant digits, `%g`-style: fixed notation
/// for moderate magnitudes, scientific otherwise, trailing zeros removed.
/// Always uses `.` as the decimal separator.
pub fn sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // Round first so that the exponent reflects the rounded value (9.99.. -> 10).
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Fixed number of decimals, as printed in the comparison table.
pub fn decimals(v: f64, places: usize) -> String {
    format!("{v:.places$}")
}

/// Three significant figures at or above 1, three decimals below.
pub fn paper_strassen(v: f64) -> String {
    if v >= 1.0 {
        let sci = format!("{v:.2e}");
        let (m, e) = sci.split_once('e').unwrap();
        let e: i32 = e.parse().unwrap();
        let places = (2 - e).max(0) as usize;
        format!("{:.places$}", m.parse::<f64>().unwrap() * 10f64.powi(e))
    } else {
        decimals(v, 3)
    }
}

/// The nearest power of ten, written `10^k`.
pub fn power_of_ten(v: f64) -> String {
    if !(v > 0.0) || !v.is_finite() {
        return "NA".into();
    }
    format!("10^{}", v.log10().round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(sig(0.0983073247852651, 12), "0.0983073247853");
        assert_eq!(sig(84.16982677, 3), "84.2");
        assert_eq!(sig(1.1315876e-6, 5), "1.1316e-6");
        assert_eq!(sig(-2.5, 12), "-2.5");
        assert_eq!(sig(9.9999999, 3), "10");
        assert_eq!(sig(123456.0, 3), "1.23e5");
        assert_eq!(sig(3262.0, 12), "3262");
        assert_eq!(sig(f64::NEG_INFINITY, 12), "-inf");
    }

    #[test]
    fn paper_forms() {
        assert_eq!(paper_strassen(84.169827), "84.2");
        assert_eq!(paper_strassen(18.786557), "18.8");
        assert_eq!(paper_strassen(4.2251524), "4.23");
        assert_eq!(paper_strassen(0.049594585), "0.050");
        assert_eq!(paper_strassen(123.4), "123");
        assert_eq!(power_of_ten(1.1315876e-6), "10^-6");
        assert_eq!(decimals(0.0010161783, 3), "0.001");
    }
}
