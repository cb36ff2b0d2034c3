//! Text and JSON rendering of scalars.
//!
//! Floats are always printed with 17 significant digits so that every value
//! read back parses to the identical binary64.

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::Value;

use crate::poly::Poly;

/// `x` in scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number for `x`, carrying the 17-digit text.
pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        // parse of the 17-digit form gives back x exactly
        serde_json::from_str(&fmt_f64(x)).unwrap_or(Value::Null)
    } else {
        Value::String(x.to_string())
    }
}

pub trait ScalarText {
    fn to_json(&self) -> Value;
    fn csv_header() -> &'static [&'static str];
    fn csv_fields(&self) -> Vec<String>;
}

impl ScalarText for f64 {
    fn to_json(&self) -> Value {
        json_f64(*self)
    }
    fn csv_header() -> &'static [&'static str] {
        &["coefficient"]
    }
    fn csv_fields(&self) -> Vec<String> {
        vec![fmt_f64(*self)]
    }
}

impl ScalarText for Complex64 {
    fn to_json(&self) -> Value {
        serde_json::json!({ "re": json_f64(self.re), "im": json_f64(self.im) })
    }
    fn csv_header() -> &'static [&'static str] {
        &["re", "im"]
    }
    fn csv_fields(&self) -> Vec<String> {
        vec![fmt_f64(self.re), fmt_f64(self.im)]
    }
}

impl ScalarText for BigRational {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
    fn csv_header() -> &'static [&'static str] {
        &["coefficient"]
    }
    fn csv_fields(&self) -> Vec<String> {
        vec![self.to_string()]
    }
}

impl ScalarText for Poly {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
    fn csv_header() -> &'static [&'static str] {
        &["coefficient"]
    }
    fn csv_fields(&self) -> Vec<String> {
        vec![format!("\"{self}\"")]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 7.255197456936871, -2.5e-300, 6.02214076e23] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let v = json_f64(x);
            assert_eq!(v.as_f64().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }
}
