use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite-dimensional norm: Euclidean or a p-norm with 1 <= p <= inf
/// (p = inf is the sup-norm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormSpec {
    Euclidean,
    PNorm {
        #[serde(with = "p_exponent")]
        p: f64,
    },
}

impl NormSpec {
    pub fn p_norm(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidInput(format!("p-norm exponent {p} < 1")));
        }
        Ok(NormSpec::PNorm { p })
    }

    pub fn sup() -> Self {
        NormSpec::PNorm { p: f64::INFINITY }
    }

    pub fn is_euclidean(&self) -> bool {
        match self {
            NormSpec::Euclidean => true,
            NormSpec::PNorm { p } => *p == 2.0,
        }
    }

    /// ||v|| under this norm.
    pub fn value(&self, v: &[f64]) -> Result<f64> {
        if v.is_empty() {
            return Err(Error::InvalidInput("empty vector".into()));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        let p = match self {
            NormSpec::Euclidean => 2.0,
            NormSpec::PNorm { p } => *p,
        };
        Ok(if p == 1.0 {
            v.iter().map(|c| c.abs()).sum()
        } else if p == 2.0 {
            v.iter().map(|c| c * c).sum::<f64>().sqrt()
        } else if p.is_infinite() {
            v.iter().map(|c| c.abs()).fold(0.0, f64::max)
        } else {
            // scale out the largest entry so the power sum cannot overflow
            let m = v.iter().map(|c| c.abs()).fold(0.0, f64::max);
            if m == 0.0 {
                0.0
            } else {
                m * v
                    .iter()
                    .map(|c| (c.abs() / m).powf(p))
                    .sum::<f64>()
                    .powf(1.0 / p)
            }
        })
    }

    pub fn distance(&self, a: &crate::Point, b: &crate::Point) -> Result<f64> {
        self.value(&a.sub(b))
    }
}

mod p_exponent {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            ser.serialize_str("inf")
        } else {
            ser.serialize_f64(*p)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(p) if p >= 1.0 => Ok(p),
            Raw::Num(p) => Err(de::Error::custom(format!("p-norm exponent {p} < 1"))),
            Raw::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Str(s) => Err(de::Error::custom(format!("bad exponent {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let e = NormSpec::Euclidean;
        assert_eq!(e.value(&[3.0, 4.0]).unwrap(), 5.0);
        let l1 = NormSpec::p_norm(1.0).unwrap();
        assert_eq!(l1.value(&[1.0, -2.0]).unwrap(), 3.0);
        let sup = NormSpec::sup();
        assert_eq!(sup.value(&[1.0, -2.0]).unwrap(), 2.0);
    }

    #[test]
    fn general_p_matches_direct_formula() {
        let n = NormSpec::p_norm(3.0).unwrap();
        let got = n.value(&[1.0, 2.0]).unwrap();
        assert!((got - 9.0_f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(NormSpec::p_norm(0.5).is_err());
        assert!(NormSpec::Euclidean.value(&[f64::NAN, 0.0]).is_err());
        assert!(NormSpec::Euclidean.value(&[]).is_err());
    }

    #[test]
    fn json_round_trip_with_sup_norm() {
        for n in [
            NormSpec::Euclidean,
            NormSpec::p_norm(1.5).unwrap(),
            NormSpec::sup(),
        ] {
            let s = serde_json::to_string(&n).unwrap();
            let back: NormSpec = serde_json::from_str(&s).unwrap();
            assert_eq!(n, back);
        }
        assert_eq!(
            serde_json::to_string(&NormSpec::sup()).unwrap(),
            r#"{"kind":"p_norm","p":"inf"}"#
        );
    }
}
