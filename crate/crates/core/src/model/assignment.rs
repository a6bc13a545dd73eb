use std::collections::BTreeMap;
use std::fmt;

use super::Identifier;

/// Valuation of a set of variables, ordered by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<Identifier, bool>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Identifier, bool)>) -> Self {
        Assignment(pairs.into_iter().collect())
    }

    /// All-false valuation over `names`.
    pub fn all_false<'a>(names: impl IntoIterator<Item = &'a Identifier>) -> Self {
        Assignment(names.into_iter().map(|n| (n.clone(), false)).collect())
    }

    /// Valuation over `names` taken from the bits of `pattern`
    /// (bit `i` is the value of `names[i]`).
    pub fn from_bits(names: &[Identifier], pattern: u64) -> Self {
        Assignment(
            names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), pattern >> i & 1 == 1))
                .collect(),
        )
    }

    /// Inverse of [`Assignment::from_bits`]; missing names read as false.
    pub fn to_bits(&self, names: &[Identifier]) -> u64 {
        names
            .iter()
            .enumerate()
            .filter(|(_, n)| self.get(n) == Some(true))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn get(&self, name: &Identifier) -> Option<bool> {
        self.0.get(name).copied()
    }

    pub fn insert(&mut self, name: Identifier, value: bool) -> Option<bool> {
        self.0.insert(name, value)
    }

    pub fn contains(&self, name: &Identifier) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Identifier, bool)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    pub fn names(&self) -> impl Iterator<Item = &Identifier> {
        self.0.keys()
    }

    /// Restriction to `names`; names not present are skipped.
    pub fn project<'a>(&self, names: impl IntoIterator<Item = &'a Identifier>) -> Assignment {
        Assignment(
            names
                .into_iter()
                .filter_map(|n| self.get(n).map(|v| (n.clone(), v)))
                .collect(),
        )
    }
}

impl fmt::Display for Assignment {
    /// `a=1 b=0`, sorted by name.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, value) in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}={}", name, u8::from(value))?;
        }
        Ok(())
    }
}

impl FromIterator<(Identifier, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (Identifier, bool)>>(iter: T) -> Self {
        Assignment::from_pairs(iter)
    }
}
