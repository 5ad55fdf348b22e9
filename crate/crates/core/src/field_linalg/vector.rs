use std::fmt;

use super::field::{Elem, Field};
use crate::error::{Error, Result};

/// A vector over a finite field. Coordinates are 0-based internally.
#[derive(Clone, PartialEq, Eq)]
pub struct FVector {
    field: Field,
    entries: Vec<Elem>,
}

impl fmt::Debug for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}]", self.field, self)
    }
}

impl fmt::Display for FVector {
    /// Digits run together for q ≤ 10 (`0101`), space separated otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.field.q() <= 10 { "" } else { " " };
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

impl FVector {
    pub fn zeros(field: &Field, len: usize) -> Self {
        FVector {
            field: field.clone(),
            entries: vec![0; len],
        }
    }

    /// The unit vector with a one at 0-based position `i`.
    pub fn unit(field: &Field, len: usize, i: usize) -> Self {
        let mut v = Self::zeros(field, len);
        v.entries[i] = 1;
        v
    }

    pub fn new(field: &Field, entries: Vec<Elem>) -> Result<Self> {
        for &e in &entries {
            field.check_element(e as u32)?;
        }
        Ok(FVector {
            field: field.clone(),
            entries,
        })
    }

    pub fn from_u32s(field: &Field, values: &[u32]) -> Result<Self> {
        let entries = values
            .iter()
            .map(|&v| field.check_element(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(FVector {
            field: field.clone(),
            entries,
        })
    }

    /// Parses a digit string such as `"0101"` (q ≤ 10) or space-separated integers.
    pub fn parse(field: &Field, text: &str) -> Result<Self> {
        let text = text.trim();
        let values: Vec<u32> = if text.contains(|c: char| c.is_whitespace() || c == ',') {
            text.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<u32>()
                        .map_err(|_| Error::MalformedDocument(format!("bad field element {s:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::MalformedDocument(format!("bad digit {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        Self::from_u32s(field, &values)
    }

    pub(crate) fn from_raw(field: &Field, entries: Vec<Elem>) -> Self {
        debug_assert!(entries.iter().all(|&e| (e as u32) < field.q()));
        FVector {
            field: field.clone(),
            entries,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Elem> {
        self.entries
    }

    pub fn get(&self, i: usize) -> Elem {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: Elem) {
        debug_assert!((value as u32) < self.field.q());
        self.entries[i] = value;
    }

    /// 0-based indices of the nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        support(&self.entries)
    }

    pub fn weight(&self) -> usize {
        weight(&self.entries)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// True when the support lies inside `set` (0-based indices).
    pub fn is_supported_on(&self, set: &[usize]) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, &e)| e == 0 || set.contains(&i))
    }

    /// The subvector on the given coordinates, in the order given.
    pub fn select(&self, indices: &[usize]) -> FVector {
        FVector::from_raw(&self.field, indices.iter().map(|&i| self.entries[i]).collect())
    }

    fn check_compatible(&self, other: &FVector) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.q(),
                right: other.field.q(),
            });
        }
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(())
    }

    pub fn distance(&self, other: &FVector) -> Result<usize> {
        self.check_compatible(other)?;
        Ok(self.entries.iter().zip(&other.entries).filter(|(a, b)| a != b).count())
    }

    pub fn add(&self, other: &FVector) -> Result<FVector> {
        self.check_compatible(other)?;
        let mut out = self.entries.clone();
        self.field.axpy(&mut out, 1, &other.entries);
        Ok(FVector::from_raw(&self.field, out))
    }

    pub fn sub(&self, other: &FVector) -> Result<FVector> {
        self.check_compatible(other)?;
        let mut out = self.entries.clone();
        self.field.axpy(&mut out, self.field.neg(1), &other.entries);
        Ok(FVector::from_raw(&self.field, out))
    }

    pub fn scale(&self, a: Elem) -> FVector {
        let mut out = self.entries.clone();
        self.field.scale_in_place(&mut out, a);
        FVector::from_raw(&self.field, out)
    }

    pub fn dot(&self, other: &FVector) -> Result<Elem> {
        self.check_compatible(other)?;
        Ok(self.field.dot(&self.entries, &other.entries))
    }
}

/// Hamming weight of a vector.
pub fn hamming_weight(u: &FVector) -> usize {
    u.weight()
}

pub(crate) fn weight(entries: &[Elem]) -> usize {
    entries.iter().filter(|&&e| e != 0).count()
}

pub(crate) fn support(entries: &[Elem]) -> Vec<usize> {
    entries
        .iter()
        .enumerate()
        .filter_map(|(i, &e)| (e != 0).then_some(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        let f2 = Field::new(2).unwrap();
        let f7 = Field::new(7).unwrap();
        assert_eq!(hamming_weight(&FVector::parse(&f2, "0000").unwrap()), 0);
        assert_eq!(hamming_weight(&FVector::parse(&f2, "1110").unwrap()), 3);
        assert_eq!(hamming_weight(&FVector::parse(&f7, "03056").unwrap()), 3);
        assert_eq!(FVector::parse(&f7, "0 3 0 5 6").unwrap().support(), vec![1, 3, 4]);
    }

    #[test]
    fn distance_is_weight_of_difference() {
        let f3 = Field::new(3).unwrap();
        let all: Vec<FVector> = (0..27u32)
            .map(|mut k| {
                let mut vals = Vec::new();
                for _ in 0..3 {
                    vals.push(k % 3);
                    k /= 3;
                }
                FVector::from_u32s(&f3, &vals).unwrap()
            })
            .collect();
        for u in &all {
            for v in &all {
                let d = u.distance(v).unwrap();
                assert_eq!(d, u.sub(v).unwrap().weight());
                for w in &all {
                    assert!(u.distance(w).unwrap() <= d + v.distance(w).unwrap());
                }
            }
        }
    }

    #[test]
    fn supported_on_and_select() {
        let f2 = Field::new(2).unwrap();
        let u = FVector::parse(&f2, "01001").unwrap();
        assert!(u.is_supported_on(&[1, 4]));
        assert!(!u.is_supported_on(&[1]));
        assert_eq!(u.select(&[1, 2, 4]).to_string(), "101");
    }

    #[test]
    fn rejects_out_of_range_entries() {
        let f3 = Field::new(3).unwrap();
        assert!(FVector::from_u32s(&f3, &[0, 3]).is_err());
        let f2 = Field::new(2).unwrap();
        assert!(FVector::parse(&f2, "01x").is_err());
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = FVector::zeros(&Field::new(2).unwrap(), 2);
        let b = FVector::zeros(&Field::new(3).unwrap(), 2);
        assert!(matches!(a.add(&b), Err(Error::FieldMismatch { .. })));
    }
}
