//! Serde adapters for values JSON cannot carry: undefined ratios become the
//! string `"undefined"`, infinite ones `"infinite"` / `"-infinite"`.

use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;
use std::fmt;

pub const UNDEFINED: &str = "undefined";
pub const INFINITE: &str = "infinite";

struct Extended;

impl Visitor<'_> for Extended {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number, \"infinite\", \"-infinite\" or \"undefined\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        match v {
            INFINITE => Ok(f64::INFINITY),
            "-infinite" => Ok(f64::NEG_INFINITY),
            UNDEFINED => Ok(f64::NAN),
            _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
        }
    }
}

/// `f64` fields that may be infinite (or NaN, written as undefined).
pub mod extended {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_str(UNDEFINED)
        } else if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { INFINITE } else { "-infinite" })
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(Extended)
    }
}

/// `Option<f64>` fields where `None` means undefined.
pub mod undefined {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) if x.is_finite() => s.serialize_f64(*x),
            Some(x) => extended::serialize(x, s),
            None => s.serialize_str(UNDEFINED),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let v = d.deserialize_any(Extended)?;
        Ok(if v.is_nan() { None } else { Some(v) })
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        #[serde(with = "super::undefined")]
        sms: Option<f64>,
        #[serde(with = "super::extended")]
        ratio: f64,
    }

    #[test]
    fn sentinels_round_trip() {
        for row in [
            Row { sms: None, ratio: f64::INFINITY },
            Row { sms: Some(0.1 + 0.2), ratio: -3.5e-300 },
            Row { sms: Some(0.0), ratio: f64::NEG_INFINITY },
        ] {
            let text = serde_json::to_string(&row).unwrap();
            assert_eq!(serde_json::from_str::<Row>(&text).unwrap(), row, "{text}");
        }
        let text = serde_json::to_string(&Row { sms: None, ratio: f64::INFINITY }).unwrap();
        assert_eq!(text, r#"{"sms":"undefined","ratio":"infinite"}"#);
    }
}
