use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Algebra, BladeIndex, Multivector};

#[derive(Serialize, Deserialize)]
struct Term {
    blade: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct Repr {
    n: usize,
    witt: bool,
    terms: Vec<Term>,
}

impl Serialize for Multivector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let alg = self.algebra();
        let terms = self
            .terms()
            .map(|(b, c)| Term { blade: b.to_string(), re: c.re, im: c.im })
            .collect();
        Repr { n: alg.n(), witt: alg.witt_enabled(), terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Multivector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = Repr::deserialize(d)?;
        let alg = Algebra::new(r.n, r.witt).map_err(D::Error::custom)?;
        let terms = r
            .terms
            .iter()
            .map(|t| Ok((t.blade.parse::<BladeIndex>()?, Complex64::new(t.re, t.im))))
            .collect::<crate::Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Multivector::from_terms(alg, &terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let alg = Algebra::witt(3).unwrap();
        let m = Multivector::from_terms(
            alg,
            &[
                ("e1e3".parse().unwrap(), Complex64::new(1.5, -2.0)),
                ("f+".parse().unwrap(), Complex64::new(0.0, 1.0)),
                ("e0".parse().unwrap(), Complex64::new(3.0, 0.0)),
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            r#"{"n":3,"witt":true,"terms":[{"blade":"e0","re":3.0,"im":0.0},{"blade":"e1e3","re":1.5,"im":-2.0},{"blade":"f+","re":0.0,"im":1.0}]}"#
        );
        let back: Multivector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_witt_blade_in_plain_algebra() {
        let s = r#"{"n":2,"witt":false,"terms":[{"blade":"f","re":1.0,"im":0.0}]}"#;
        assert!(serde_json::from_str::<Multivector>(s).is_err());
        let s = r#"{"n":2,"witt":false,"terms":[{"blade":"e3","re":1.0,"im":0.0}]}"#;
        assert!(serde_json::from_str::<Multivector>(s).is_err());
    }
}
