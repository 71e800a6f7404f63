//! JSON helpers. Integers are emitted as exact JSON numbers at any magnitude.

use std::str::FromStr;

use serde_json::{Number, Value};

use crate::arith::Int;

pub fn int_value(v: &Int) -> Value {
    Value::Number(Number::from_str(&v.to_string()).expect("decimal integer is a JSON number"))
}

pub fn int_array<'a>(values: impl IntoIterator<Item = &'a Int>) -> Value {
    Value::Array(values.into_iter().map(int_value).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_integers_stay_exact() {
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(int_value(&big).to_string(), "123456789012345678901234567890");
        assert_eq!(int_value(&Int::from(-5)).to_string(), "-5");
    }
}
