//! Numbers in scene files and on the command line: plain decimals, or short
//! expressions such as `10/28`, `2pi`, `pi/2`, `3*pi/2`.

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserialize, Deserializer, Visitor};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scalar(pub f64);

pub fn parse_scalar(text: &str) -> Result<f64, String> {
    let bad = || format!("'{text}' is not a number, fraction or multiple of pi");
    let mut parts = text.split('/');
    let numerator = parse_term(parts.next().unwrap_or("")).ok_or_else(bad)?;
    let value = match parts.next() {
        None => numerator,
        Some(den) => {
            let den = parse_term(den).ok_or_else(bad)?;
            if den == 0.0 || parts.next().is_some() {
                return Err(bad());
            }
            numerator / den
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn parse_term(term: &str) -> Option<f64> {
    let term = term.trim();
    let (sign, rest) = match term.strip_prefix('-') {
        Some(r) => (-1.0, r.trim_start()),
        None => (1.0, term.strip_prefix('+').unwrap_or(term).trim_start()),
    };
    let coefficient = |c: &str| {
        let c = c.trim().trim_end_matches('*').trim_end();
        if c.is_empty() {
            Some(1.0)
        } else {
            c.parse::<f64>().ok()
        }
    };
    if let Some(c) = rest.strip_suffix("pi").or_else(|| rest.strip_suffix('π')) {
        return Some(sign * coefficient(c)? * PI);
    }
    if rest.is_empty() || rest.starts_with(['+', '-']) {
        return None;
    }
    rest.parse::<f64>().ok().map(|v| sign * v)
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string such as \"10/28\" or \"2pi\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
                Ok(Scalar(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                parse_scalar(v).map(Scalar).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        assert_eq!(parse_scalar("10/28").unwrap(), 10.0 / 28.0);
        assert_eq!(parse_scalar("0.05").unwrap(), 0.05);
        assert_eq!(parse_scalar("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_scalar("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_scalar("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_scalar("-pi").unwrap(), -PI);
        assert_eq!(parse_scalar("3π/2").unwrap(), 3.0 * PI / 2.0);
        for bad in ["", "1/0", "x", "1/2/3", "--1", "pi pi"] {
            assert!(parse_scalar(bad).is_err(), "{bad}");
        }
    }
}
