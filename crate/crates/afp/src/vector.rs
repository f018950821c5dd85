//! Finitely supported rational coordinate vectors.
//!
//! A [`SparseVector`] maps coordinate indices to nonzero rationals; missing
//! indices read as zero. Indices are `u128` because the measure-model
//! forward indices reach 2^64 and beyond. Index 0 is ordinarily unused by
//! sequence vectors; the measure module reserves it for the diffuse mass
//! slot so measures embed into the same type.
//!
//! JSON form is a map from decimal index strings to rational strings:
//! `{"1": "1/2", "3": "-2/7"}`.

use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::{Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

pub type Index = u128;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SparseVector {
    entries: BTreeMap<Index, Rational>,
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit basis vector `e_n`.
    pub fn basis(n: Index) -> Self {
        Self::single(n, Rational::from_integer(1.into()))
    }

    pub fn single(index: Index, value: Rational) -> Self {
        let mut entries = BTreeMap::new();
        if !value.is_zero() {
            entries.insert(index, value);
        }
        Self { entries }
    }

    /// Builds a vector from `(index, value)` pairs; zero values are dropped,
    /// repeated indices are summed.
    pub fn from_entries<I: IntoIterator<Item = (Index, Rational)>>(iter: I) -> Self {
        let mut v = Self::zero();
        for (idx, val) in iter {
            v.add_to(idx, &val);
        }
        v
    }

    /// 1-based dense view: `from_dense([a, b, c])` has `a` at index 1.
    pub fn from_dense(coords: &[Rational]) -> Self {
        Self::from_entries(
            coords
                .iter()
                .enumerate()
                .map(|(i, v)| (i as Index + 1, v.clone())),
        )
    }

    pub fn get(&self, index: Index) -> Rational {
        self.entries
            .get(&index)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, index: Index) -> Option<&Rational> {
        self.entries.get(&index)
    }

    pub fn set(&mut self, index: Index, value: Rational) {
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn add_to(&mut self, index: Index, delta: &Rational) {
        if delta.is_zero() {
            return;
        }
        let updated = self.get(index) + delta;
        self.set(index, updated);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Index, &Rational)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn support(&self) -> impl Iterator<Item = Index> + '_ {
        self.entries.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn max_index(&self) -> Option<Index> {
        self.entries.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l1_norm(&self) -> Rational {
        self.entries.values().map(|v| v.abs()).sum()
    }

    pub fn linf_norm(&self) -> Rational {
        self.entries
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Sum of all entries (not absolute values).
    pub fn total(&self) -> Rational {
        self.entries.values().cloned().sum()
    }

    pub fn dot(&self, other: &SparseVector) -> Rational {
        // Walk the smaller support.
        let (small, large) = if self.support_len() <= other.support_len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Rational::zero();
        for (idx, val) in small.iter() {
            if let Some(w) = large.coeff(idx) {
                acc += val * w;
            }
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> SparseVector {
        if c.is_zero() {
            return SparseVector::zero();
        }
        SparseVector {
            entries: self
                .entries
                .iter()
                .map(|(i, v)| (*i, v * c))
                .collect(),
        }
    }

    /// `self + c * other` without an intermediate allocation per entry.
    pub fn add_scaled(&self, other: &SparseVector, c: &Rational) -> SparseVector {
        let mut out = self.clone();
        for (idx, val) in other.iter() {
            out.add_to(idx, &(val * c));
        }
        out
    }

    pub fn add_assign(&mut self, other: &SparseVector) {
        for (idx, val) in other.iter() {
            self.add_to(idx, val);
        }
    }

    /// Re-indexes every entry through `f`. Panics if `f` collides indices.
    pub fn map_indices(&self, f: impl Fn(Index) -> Index) -> SparseVector {
        let mut entries = BTreeMap::new();
        for (idx, val) in self.iter() {
            let moved = f(idx);
            let clash = entries.insert(moved, val.clone());
            assert!(clash.is_none(), "index map collides at {moved}");
        }
        SparseVector { entries }
    }

    /// Entrywise clamp to the positive cone: negative entries become zero.
    pub fn positive_part(&self) -> SparseVector {
        SparseVector {
            entries: self
                .entries
                .iter()
                .filter(|(_, v)| v.is_positive())
                .map(|(i, v)| (*i, v.clone()))
                .collect(),
        }
    }
}

impl Add for &SparseVector {
    type Output = SparseVector;
    fn add(self, rhs: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &SparseVector {
    type Output = SparseVector;
    fn sub(self, rhs: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        for (idx, val) in rhs.iter() {
            out.add_to(idx, &-val.clone());
        }
        out
    }
}

impl Neg for &SparseVector {
    type Output = SparseVector;
    fn neg(self) -> SparseVector {
        SparseVector {
            entries: self.entries.iter().map(|(i, v)| (*i, -v.clone())).collect(),
        }
    }
}

impl fmt::Display for SparseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, val) in self.iter() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}*e{}", format_rational(val), idx)?;
            first = false;
        }
        Ok(())
    }
}

impl Serialize for SparseVector {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        // BTreeMap<String, String> would sort "10" before "2"; emit in
        // numeric order explicitly via a map serializer.
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.entries.len()))?;
        for (idx, val) in self.iter() {
            map.serialize_entry(&idx.to_string(), &format_rational(val))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SparseVector {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(de)?;
        let mut v = SparseVector::zero();
        for (key, val) in raw {
            let idx: Index = key
                .parse()
                .map_err(|_| D::Error::custom(format!("invalid coordinate index {key:?}")))?;
            let r = parse_rational(&val).map_err(D::Error::custom)?;
            if !v.get(idx).is_zero() {
                return Err(D::Error::custom(format!("duplicate coordinate index {idx}")));
            }
            v.set(idx, r);
        }
        Ok(v)
    }
}

/// Parses the compact literal used on the command line:
/// `"1:1/2,3:-2/7"`, or `""` for the zero vector.
pub fn parse_vector_literal(s: &str) -> Result<SparseVector, String> {
    let mut v = SparseVector::zero();
    let trimmed = s.trim();
    if trimmed.is_empty() {
        return Ok(v);
    }
    for part in trimmed.split(',') {
        let (idx_str, val_str) = part
            .split_once(':')
            .ok_or_else(|| format!("expected index:value, got {part:?}"))?;
        let idx: Index = idx_str
            .trim()
            .parse()
            .map_err(|_| format!("invalid coordinate index {idx_str:?}"))?;
        let val = parse_rational(val_str).map_err(|e| e.to_string())?;
        if !v.get(idx).is_zero() {
            return Err(format!("duplicate coordinate index {idx}"));
        }
        v.set(idx, val);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn zeros_are_never_stored() {
        let mut v = SparseVector::from_entries([(1, rat(1, 2)), (2, rat_int(0))]);
        assert_eq!(v.support_len(), 1);
        v.add_to(1, &rat(-1, 2));
        assert!(v.is_zero());
        v.set(5, rat_int(0));
        assert_eq!(v.support_len(), 0);
    }

    #[test]
    fn arithmetic_matches_coordinatewise() {
        let a = SparseVector::from_entries([(1, rat(1, 2)), (2, rat_int(3))]);
        let b = SparseVector::from_entries([(2, rat_int(-3)), (4, rat(2, 7))]);
        let sum = &a + &b;
        assert_eq!(sum.get(1), rat(1, 2));
        assert_eq!(sum.get(2), rat_int(0));
        assert_eq!(sum.get(4), rat(2, 7));
        let diff = &a - &a;
        assert!(diff.is_zero());
        assert_eq!((-&a).get(2), rat_int(-3));
    }

    #[test]
    fn norms() {
        let v = SparseVector::from_entries([(1, rat(-1, 2)), (9, rat(3, 4))]);
        assert_eq!(v.l1_norm(), rat(5, 4));
        assert_eq!(v.linf_norm(), rat(3, 4));
        assert_eq!(SparseVector::zero().linf_norm(), rat_int(0));
        assert_eq!(v.total(), rat(1, 4));
    }

    #[test]
    fn dot_product() {
        let a = SparseVector::from_entries([(1, rat_int(2)), (2, rat_int(3))]);
        let b = SparseVector::from_entries([(2, rat(1, 3)), (7, rat_int(100))]);
        assert_eq!(a.dot(&b), rat_int(1));
        assert_eq!(b.dot(&a), rat_int(1));
    }

    #[test]
    fn huge_indices_survive_round_trip() {
        let big: Index = 1 << 80;
        let v = SparseVector::single(big, rat(1, 3));
        let json = serde_json::to_string(&v).unwrap();
        let back: SparseVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn json_round_trip_and_ordering() {
        let v = SparseVector::from_entries([(10, rat_int(1)), (2, rat(1, 2))]);
        let json = serde_json::to_string(&v).unwrap();
        // Numeric index order, not lexicographic string order.
        assert_eq!(json, r#"{"2":"1/2","10":"1"}"#);
        let back: SparseVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn json_rejects_bad_entries() {
        assert!(serde_json::from_str::<SparseVector>(r#"{"x": "1"}"#).is_err());
        assert!(serde_json::from_str::<SparseVector>(r#"{"1": "1/0"}"#).is_err());
    }

    #[test]
    fn literal_parsing() {
        let v = parse_vector_literal("1:1/2, 3:-2").unwrap();
        assert_eq!(v.get(1), rat(1, 2));
        assert_eq!(v.get(3), rat_int(-2));
        assert!(parse_vector_literal("").unwrap().is_zero());
        assert!(parse_vector_literal("1:1,1:2").is_err());
        assert!(parse_vector_literal("1").is_err());
    }

    #[test]
    fn positive_part_clamps() {
        let v = SparseVector::from_entries([(1, rat_int(-1)), (2, rat(1, 2))]);
        let p = v.positive_part();
        assert_eq!(p.get(1), rat_int(0));
        assert_eq!(p.get(2), rat(1, 2));
    }
}
