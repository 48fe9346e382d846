//! Text forms of [`Rational`]: the canonical `"p/q"` wire format, exact
//! parsing of user input, and a rounded decimal preview for humans.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Canonical wire form. Always `p/q`, including integers (`"4/1"`).
pub fn to_pq(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `"p/q"`, an integer, or a terminating decimal such as `"-0.125"`.
///
/// Input is never rounded: anything that is not an exact finite rational is
/// rejected.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let numer = parse_int(p)?;
        let denom = parse_int(q)?;
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(numer, denom));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() && digits.is_empty() {
            return Err(Error::Parse(format!("not a number: {text:?}")));
        }
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!(
                "not a terminating decimal: {text:?}"
            )));
        }
        let whole_part = if digits.is_empty() {
            BigInt::zero()
        } else {
            parse_int(digits)?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = if frac.is_empty() {
            BigInt::zero()
        } else {
            parse_int(frac)?
        };
        let magnitude = Rational::new(whole_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    Ok(Rational::from_integer(parse_int(s)?))
}

fn parse_int(text: &str) -> Result<BigInt> {
    let t = text.trim();
    let body = t.strip_prefix(['-', '+']).unwrap_or(t);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not an integer: {text:?}")));
    }
    t.parse::<BigInt>()
        .map_err(|e| Error::Parse(format!("{text:?}: {e}")))
}

/// Renders `value` in scientific-free decimal notation rounded to nearest
/// (ties away from zero) with `digits` significant digits.
pub fn decimal_preview(value: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let mag = value.abs();

    // Find e with 10^e <= mag < 10^(e+1).
    let ten = BigInt::from(10u32);
    let mut exp10: i64 = (mag.numer().bits() as i64 - mag.denom().bits() as i64) * 3 / 10;
    let pow10 = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(ten.pow(e as u32))
        } else {
            Rational::new(BigInt::one(), ten.pow((-e) as u32))
        }
    };
    while pow10(exp10) > mag {
        exp10 -= 1;
    }
    while pow10(exp10 + 1) <= mag {
        exp10 += 1;
    }

    // Integer with `digits` digits: round(mag * 10^(digits-1-exp10)).
    let shift = digits as i64 - 1 - exp10;
    let scaled = &mag * pow10(shift);
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut int = q;
    if r * 2 >= *scaled.denom() {
        int += 1;
    }
    let mut text = int.to_str_radix(10);
    let mut shift = shift;
    if text.len() > digits {
        // Rounding carried into a new leading digit (e.g. 9.99 -> 10.0).
        text.pop();
        shift -= 1;
    }

    let body = if shift <= 0 {
        let mut t = text;
        t.extend(std::iter::repeat('0').take((-shift) as usize));
        t
    } else if (shift as usize) >= text.len() {
        let zeros = shift as usize - text.len();
        format!("0.{}{}", "0".repeat(zeros), text)
    } else {
        let split = text.len() - shift as usize;
        format!("{}.{}", &text[..split], &text[split..])
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Serde adapters for the `"p/q"` string form.
pub mod serde_pq {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_rational, to_pq};
    use crate::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_pq(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        use super::super::{parse_rational, to_pq};
        use crate::Rational;

        pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&to_pq(v))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
