//! JSON files for characters and triples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kohler::{Certificate, Triple};
use crate::quadfield::{QuadField, QuadIdeal};
use crate::rayclass::{ray_class_group, HeckeChar, Modulus};

pub const SCHEMA: u32 = 1;

/// A character given by its index in the canonical enumeration or by the
/// exponents k_i of its values ζ_{d_i}^{k_i} on the generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharFile {
    pub disc: i64,
    pub modulus: QuadIdeal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub char_index: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<u64>>,
}

impl CharFile {
    pub fn of(xi: &HeckeChar) -> Self {
        CharFile {
            disc: xi.field().disc(),
            modulus: xi.modulus().finite(),
            char_index: Some(xi.index()),
            values: Some(xi.exponents().to_vec()),
        }
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::input(format!("malformed character file: {e}")))
    }

    pub fn resolve(&self) -> Result<HeckeChar> {
        let field = QuadField::from_disc(self.disc)?;
        if !field.is_ideal(&self.modulus) {
            return Err(Error::input(format!("{} is not an ideal of disc {}", self.modulus, self.disc)));
        }
        let g = ray_class_group(&Modulus::new(field, self.modulus)?)?;
        let by_index = self.char_index.map(|i| g.character(i)).transpose()?;
        let by_values = self.values.as_deref().map(|v| g.make_char(v)).transpose()?;
        match (by_index, by_values) {
            (Some(a), Some(b)) if a.exponents() != b.exponents() => {
                Err(Error::input("char_index and values describe different characters"))
            }
            (Some(a), _) => Ok(a),
            (None, Some(b)) => Ok(b),
            (None, None) => Err(Error::input("character file needs char_index or values")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleFile {
    pub schema: u32,
    pub level: u64,
    pub members: Vec<CharFile>,
    pub certificate: Certificate,
}

impl TripleFile {
    pub fn of(t: &Triple) -> Self {
        TripleFile {
            schema: SCHEMA,
            level: t.level,
            members: t.members.iter().map(CharFile::of).collect(),
            certificate: t.certificate.clone(),
        }
    }

    pub fn parse(json: &str) -> Result<Self> {
        let f: TripleFile =
            serde_json::from_str(json).map_err(|e| Error::input(format!("malformed triple file: {e}")))?;
        if f.schema != SCHEMA {
            return Err(Error::input(format!("unsupported schema {}", f.schema)));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("triple serializes")
    }

    /// Rebuilds and recertifies the triple; the stored certificate must match.
    pub fn resolve(&self) -> Result<Triple> {
        let members: Vec<HeckeChar> = self.members.iter().map(CharFile::resolve).collect::<Result<_>>()?;
        let members: [HeckeChar; 3] =
            members.try_into().map_err(|_| Error::input("a triple has exactly three members"))?;
        let t = Triple::new(members)?;
        if t.level != self.level || t.certificate != self.certificate {
            return Err(Error::input("stored certificate does not match the recomputed one"));
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_file_round_trip() {
        let f = CharFile::parse(r#"{"disc": -23, "modulus": [1, 0, 1], "char_index": 2}"#).unwrap();
        let xi = f.resolve().unwrap();
        assert_eq!(xi.order(), 3);
        assert_eq!(CharFile::of(&xi).resolve().unwrap().exponents(), xi.exponents());
        let v = CharFile::parse(r#"{"disc": -23, "modulus": [1, 0, 1], "values": [2]}"#).unwrap();
        assert_eq!(v.resolve().unwrap().index(), 2);
    }

    #[test]
    fn bad_char_files() {
        assert!(CharFile::parse(r#"{"disc": "x"}"#).is_err());
        let f = CharFile::parse(r#"{"disc": -23, "modulus": [1, 0, 1]}"#).unwrap();
        assert_eq!(f.resolve().unwrap_err().exit_code(), 2);
        let f = CharFile::parse(r#"{"disc": -23, "modulus": [1, 0, 1], "char_index": 1, "values": [2]}"#).unwrap();
        assert!(f.resolve().is_err());
        assert!(CharFile::parse(r#"{"disc": -4, "modulus": [2, 1, 2], "char_index": 0}"#).is_err());
    }
}
