//! JSON building blocks. Keys come out sorted (serde_json's default map is
//! ordered) and every float is rounded to 12 significant digits, so reports
//! are byte-for-byte reproducible.

use std::io::Write;
use std::path::Path;

use flagricci_core::dynamics::Eigenvalue;
use flagricci_core::einstein::EinsteinMetric;
use flagricci_core::poly::Rational;
use flagricci_core::{FlagSpace, StructureConstants};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Number, Value};

use crate::error::{CliError, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every float in `value`; non-finite floats become `null`.
pub fn canonicalize(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|f| Number::from_f64(round_sig(f)))
            .map_or(Value::Null, Value::Number),
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, canonicalize(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

/// Pretty JSON with a trailing newline.
pub fn render(value: Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&canonicalize(value))?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// An integer when it fits in `i64`, else its decimal string.
pub fn big_integer(s: String) -> Value {
    s.parse::<i64>().map_or(Value::String(s), Value::from)
}

/// `[numerator, denominator]`.
pub fn rational(q: &Rational) -> Value {
    json!([integer(q.numer()), integer(q.denom())])
}

fn integer<T: ToPrimitive + std::fmt::Display>(n: &T) -> Value {
    n.to_i64().map_or_else(|| Value::String(n.to_string()), Value::from)
}

/// Catalog entry: id, group, s, n, dims, constants and the classical
/// parameters when there are any.
pub fn space(space: &FlagSpace) -> Value {
    let constants: Map<String, Value> = space
        .constants()
        .named()
        .into_iter()
        .map(|(name, q)| (name.to_string(), rational(q)))
        .collect();
    let family = space.family_params().map_or(Value::Null, |(f, l, p)| {
        json!({ "family": f.letter().to_string(), "l": l, "p": p, "template": f.template() })
    });
    json!({
        "id": space.id(),
        "group": space.group(),
        "s": space.s(),
        "n": space.n(),
        "dims": space.dims(),
        "type_one": matches!(space.constants(), StructureConstants::Three { .. }),
        "constants": constants,
        "classical": family,
    })
}

pub fn eigenvalues(values: &[Eigenvalue]) -> Value {
    Value::Array(values.iter().map(|e| json!({ "re": e.re, "im": e.im })).collect())
}

/// An Einstein metric; `fixed_point` is the id of the matching equilibrium.
pub fn metric(m: &EinsteinMetric, fixed_point: Option<&str>) -> Value {
    json!({
        "x": m.x(),
        "residual": m.residual,
        "is_kahler": m.is_kahler,
        "exact": m.exact.as_ref().map(|v| v.iter().map(rational).collect::<Vec<_>>()),
        "fixed_point": fixed_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use flagricci_core::catalog::find_space;
    use flagricci_core::poly::ratio;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(2.0 / 3.0), 0.666666666667);
        assert_eq!(round_sig(-1_234_567.891_011_12), -1234567.89101);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn canonical_output_is_sorted_and_rounded() {
        let text = render(json!({ "b": 1.0 / 3.0, "a": [f64::NAN, 2] })).unwrap();
        assert_eq!(text, "{\n  \"a\": [\n    null,\n    2\n  ],\n  \"b\": 0.333333333333\n}\n");
    }

    #[test]
    fn space_entry() {
        let v = space(&find_space("E8/SO(14)xU(1)").unwrap());
        assert_eq!(v["dims"], json!([128, 28]));
        assert_eq!(v["constants"]["triple211"], json!([224, 15]));
        assert_eq!(rational(&ratio(-3, 6)), json!([-1, 2]));
        assert_eq!(big_integer("123456789012345678901234".into()), json!("123456789012345678901234"));
    }
}
