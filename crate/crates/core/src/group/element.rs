use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Value};
use smallvec::SmallVec;

/// Coordinates of an abelian group element.
pub type Coords = SmallVec<[i64; 4]>;

/// An element of one of the built-in groups, always in normal form.
///
/// Equality of values coincides with equality in the group, so elements
/// can serve directly as keys of ordered and hashed collections.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    /// Coordinates in `Z^D`, reduced into `[0, m)` wherever a modulus applies.
    Vector(Coords),
    /// An element of BS(1,q).
    Affine(AffineElement),
    /// A lamp configuration together with a base element.
    Wreath(Box<WreathElement>),
}

/// `(shift, numerator / q^depth)` in `Z[1/q] ⋊ Z`; the numerator is not
/// divisible by `q` unless the depth is zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineElement {
    pub shift: i64,
    pub numerator: BigInt,
    pub depth: u32,
}

/// Finitely supported lamps (identity values are never stored) and a base element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WreathElement {
    pub lamps: BTreeMap<Element, Element>,
    pub base: Element,
}

impl Element {
    pub fn vector<I: IntoIterator<Item = i64>>(coords: I) -> Self {
        Element::Vector(coords.into_iter().collect())
    }

    pub fn wreath(lamps: BTreeMap<Element, Element>, base: Element) -> Self {
        Element::Wreath(Box::new(WreathElement { lamps, base }))
    }

    pub fn as_vector(&self) -> Option<&[i64]> {
        match self {
            Element::Vector(coords) => Some(coords),
            _ => None,
        }
    }

    pub fn as_affine(&self) -> Option<&AffineElement> {
        match self {
            Element::Affine(affine) => Some(affine),
            _ => None,
        }
    }

    pub fn as_wreath(&self) -> Option<&WreathElement> {
        match self {
            Element::Wreath(wreath) => Some(wreath),
            _ => None,
        }
    }

    /// Deterministic byte serialization; two elements are equal exactly when
    /// their keys are.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_key(&mut out);
        out
    }

    fn write_key(&self, out: &mut Vec<u8>) {
        match self {
            Element::Vector(coords) => {
                out.push(1);
                out.extend_from_slice(&(coords.len() as u32).to_be_bytes());
                for &c in coords {
                    out.extend_from_slice(&((c as u64) ^ (1 << 63)).to_be_bytes());
                }
            }
            Element::Affine(affine) => {
                out.push(2);
                out.extend_from_slice(&((affine.shift as u64) ^ (1 << 63)).to_be_bytes());
                let (sign, magnitude) = affine.numerator.to_bytes_be();
                out.push(sign as u8);
                out.extend_from_slice(&(magnitude.len() as u32).to_be_bytes());
                out.extend_from_slice(&magnitude);
                out.extend_from_slice(&affine.depth.to_be_bytes());
            }
            Element::Wreath(wreath) => {
                out.push(3);
                out.extend_from_slice(&(wreath.lamps.len() as u32).to_be_bytes());
                for (position, value) in &wreath.lamps {
                    position.write_key(out);
                    value.write_key(out);
                }
                wreath.base.write_key(out);
            }
        }
    }

    /// JSON form: vectors as integer arrays, BS(1,q) elements as
    /// `{shift, numerator, depth}` with the numerator as a decimal string,
    /// wreath elements as `{lamps: [[position, value], ...], base}` with
    /// lamps sorted by position.
    pub fn to_json(&self) -> Value {
        match self {
            Element::Vector(coords) => json!(coords.as_slice()),
            Element::Affine(affine) => json!({
                "shift": affine.shift,
                "numerator": affine.numerator.to_string(),
                "depth": affine.depth,
            }),
            Element::Wreath(wreath) => json!({
                "lamps": wreath
                    .lamps
                    .iter()
                    .map(|(position, value)| json!([position.to_json(), value.to_json()]))
                    .collect::<Vec<_>>(),
                "base": wreath.base.to_json(),
            }),
        }
    }

    /// Inverse of [`Element::to_json`]; the caller validates the result
    /// against a group.
    pub fn from_json(value: &Value) -> Option<Element> {
        match value {
            Value::Array(items) => items
                .iter()
                .map(Value::as_i64)
                .collect::<Option<Coords>>()
                .map(Element::Vector),
            Value::Object(map) if map.contains_key("shift") => {
                Some(Element::Affine(AffineElement {
                    shift: map.get("shift")?.as_i64()?,
                    numerator: map.get("numerator")?.as_str()?.parse().ok()?,
                    depth: u32::try_from(map.get("depth")?.as_u64()?).ok()?,
                }))
            }
            Value::Object(map) => {
                let mut lamps = BTreeMap::new();
                for pair in map.get("lamps")?.as_array()? {
                    let pair = pair.as_array()?;
                    if pair.len() != 2 {
                        return None;
                    }
                    lamps.insert(Element::from_json(&pair[0])?, Element::from_json(&pair[1])?);
                }
                Some(Element::wreath(
                    lamps,
                    Element::from_json(map.get("base")?)?,
                ))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_distinguish_variants_and_values() {
        let a = Element::vector([0, 1]);
        let b = Element::vector([1, 0]);
        let c = Element::vector([0, 1, 0]);
        assert_ne!(a.canonical_key(), b.canonical_key());
        assert_ne!(a.canonical_key(), c.canonical_key());
        assert_eq!(a.canonical_key(), Element::vector([0, 1]).canonical_key());
        let negative = Element::vector([-1]);
        let positive = Element::vector([1]);
        assert!(negative.canonical_key() < positive.canonical_key());
    }

    #[test]
    fn json_round_trip() {
        let mut lamps = BTreeMap::new();
        lamps.insert(Element::vector([2]), Element::vector([1]));
        let samples = [
            Element::vector([3, -4]),
            Element::Affine(AffineElement {
                shift: -2,
                numerator: BigInt::from(-7),
                depth: 3,
            }),
            Element::wreath(lamps, Element::vector([5])),
        ];
        for sample in samples {
            assert_eq!(Element::from_json(&sample.to_json()), Some(sample));
        }
        assert_eq!(Element::from_json(&json!("bad")), None);
    }
}
