//! Sets of goods as growable bitsets.
//!
//! The word vector never carries trailing zero words, so two subsets with the
//! same members compare (and hash) equal regardless of how they were built.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

const BITS: usize = 64;

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    words: Vec<u64>,
}

impl Subset {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{0, 1, ..., m - 1}`
    pub fn full(m: usize) -> Self {
        let mut words = vec![u64::MAX; m / BITS];
        if !m.is_multiple_of(BITS) {
            words.push((1u64 << (m % BITS)) - 1);
        }
        Self { words }
    }

    pub fn singleton(g: usize) -> Self {
        let mut s = Self::new();
        s.insert(g);
        s
    }

    /// Members are the set bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = Self { words: vec![mask] };
        s.trim();
        s
    }

    /// Low word of the bitset. Only meaningful when every member is below 64.
    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.words.len() <= 1);
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, g: usize) -> bool {
        let (w, b) = (g / BITS, g % BITS);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, g: usize) -> bool {
        let (w, b) = (g / BITS, g % BITS);
        match self.words.get_mut(w) {
            Some(word) if *word & (1 << b) != 0 => {
                *word &= !(1 << b);
                self.trim();
                true
            }
            _ => false,
        }
    }

    pub fn contains(&self, g: usize) -> bool {
        self.words
            .get(g / BITS)
            .is_some_and(|w| w & (1 << (g % BITS)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// `X + g`
    pub fn with(&self, g: usize) -> Self {
        let mut s = self.clone();
        s.insert(g);
        s
    }

    /// `X - g`
    pub fn without(&self, g: usize) -> Self {
        let mut s = self.clone();
        s.remove(g);
        s
    }

    pub fn last(&self) -> Option<usize> {
        let last = self.words.len().checked_sub(1)?;
        Some(last * BITS + (BITS - 1 - self.words[last].leading_zeros() as usize))
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        let n = self.words.len().max(other.words.len());
        let word = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        let mut s = Self {
            words: (0..n)
                .map(|i| f(word(&self.words, i), word(&other.words, i)))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let b = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * BITS + b);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a Subset {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Self::new();
        for g in iter {
            s.insert(g);
        }
        s
    }
}

impl<const N: usize> From<[usize; N]> for Subset {
    fn from(goods: [usize; N]) -> Self {
        goods.into_iter().collect()
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, g) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(Vec::<usize>::deserialize(deserializer)?
            .into_iter()
            .collect())
    }
}
