//! The semiring of finite languages over link labels.
//!
//! Elements are finite sets of finite words. Addition is set union,
//! multiplication is pairwise concatenation, `∅` is the zero and `{ε}` the
//! unit. Every wiring matrix in this crate takes its entries here.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::IdentError;

/// Separator between labels in the textual form of a [`Word`].
pub const WORD_SEPARATOR: char = '.';

/// Checks that `s` is usable as an identifier token: nonempty, no
/// whitespace, none of the reserved characters.
pub(crate) fn check_token(s: &str, reserved: &[char]) -> Result<(), IdentError> {
    if s.is_empty() {
        return Err(IdentError::Empty);
    }
    if let Some(c) = s
        .chars()
        .find(|c| c.is_whitespace() || c.is_control() || reserved.contains(c))
    {
        return Err(IdentError::ReservedChar {
            token: s.to_string(),
            ch: c,
        });
    }
    Ok(())
}

/// An atomic wire name such as `l1` or `w5`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkLabel(String);

impl LinkLabel {
    pub fn new(symbol: impl Into<String>) -> Result<Self, IdentError> {
        let symbol = symbol.into();
        check_token(&symbol, &[WORD_SEPARATOR])?;
        Ok(LinkLabel(symbol))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LinkLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for LinkLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A finite sequence of labels. The empty word is `ε`.
///
/// Textual form joins labels with `.`; `ε` is the empty string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<LinkLabel>);

impl Word {
    pub fn epsilon() -> Self {
        Word(Vec::new())
    }

    pub fn from_labels(labels: impl IntoIterator<Item = LinkLabel>) -> Self {
        Word(labels.into_iter().collect())
    }

    /// Single-letter word.
    pub fn atom(label: LinkLabel) -> Self {
        Word(vec![label])
    }

    pub fn labels(&self) -> &[LinkLabel] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_epsilon(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut labels = Vec::with_capacity(self.0.len() + other.0.len());
        labels.extend_from_slice(&self.0);
        labels.extend_from_slice(&other.0);
        Word(labels)
    }

    pub fn contains(&self, label: &LinkLabel) -> bool {
        self.0.contains(label)
    }
}

impl FromStr for Word {
    type Err = IdentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Ok(Word::epsilon());
        }
        s.split(WORD_SEPARATOR)
            .map(LinkLabel::new)
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, label) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "{WORD_SEPARATOR}")?;
            }
            f.write_str(label.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_epsilon() {
            f.write_str("ε")
        } else {
            write!(f, "{self}")
        }
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite language: an element of the semiring.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Lang(BTreeSet<Word>);

impl Lang {
    pub fn zero() -> Self {
        Lang(BTreeSet::new())
    }

    pub fn one() -> Self {
        Lang(BTreeSet::from([Word::epsilon()]))
    }

    pub fn from_words(words: impl IntoIterator<Item = Word>) -> Self {
        Lang(words.into_iter().collect())
    }

    /// Language of single-letter words, one per label.
    pub fn atoms(labels: impl IntoIterator<Item = LinkLabel>) -> Self {
        Lang(labels.into_iter().map(Word::atom).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.0.contains(w)
    }

    pub fn add(&self, other: &Lang) -> Lang {
        Lang(self.0.union(&other.0).cloned().collect())
    }

    pub fn mul(&self, other: &Lang) -> Lang {
        let mut out = BTreeSet::new();
        for u in &self.0 {
            for v in &other.0 {
                out.insert(u.concat(v));
            }
        }
        Lang(out)
    }

    /// In-place union, used by the matrix kernels.
    pub(crate) fn absorb(&mut self, other: Lang) {
        self.0.extend(other.0);
    }
}

impl FromIterator<Word> for Lang {
    fn from_iter<T: IntoIterator<Item = Word>>(iter: T) -> Self {
        Lang(iter.into_iter().collect())
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("{")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w:?}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn lang_zero() -> Lang {
    Lang::zero()
}

pub fn lang_one() -> Lang {
    Lang::one()
}

pub fn lang_add(a: &Lang, b: &Lang) -> Lang {
    a.add(b)
}

pub fn lang_mul(a: &Lang, b: &Lang) -> Lang {
    a.mul(b)
}

/// Parses the brace-free textual form used in tests and fixtures:
/// comma-separated words, e.g. `"w2.w5,w3.w5"`. The empty string is `∅`;
/// `ε` must be written as `"ε"`.
pub fn parse_lang(s: &str) -> Result<Lang, IdentError> {
    let s = s.trim();
    if s.is_empty() || s == "∅" {
        return Ok(Lang::zero());
    }
    s.split(',')
        .map(|w| {
            let w = w.trim();
            if w == "ε" {
                Ok(Word::epsilon())
            } else {
                w.parse()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(s: &str) -> Lang {
        parse_lang(s).unwrap()
    }

    #[test]
    fn zero_examples() {
        assert!(lang_zero().is_zero());
        assert_eq!(lang_add(&lang_zero(), &l("w1")), l("w1"));
        assert_eq!(lang_mul(&lang_zero(), &l("w1,w2")), lang_zero());
    }

    #[test]
    fn one_examples() {
        assert_eq!(lang_mul(&lang_one(), &l("w5")), l("w5"));
        assert_eq!(lang_mul(&l("w2,w3"), &lang_one()), l("w2,w3"));
        assert_eq!(lang_add(&lang_one(), &lang_one()), lang_one());
        assert_ne!(lang_one(), lang_zero());
    }

    #[test]
    fn add_examples() {
        assert_eq!(lang_add(&l("w1"), &l("w2,w3")), l("w1,w2,w3"));
        assert_eq!(lang_add(&l("w1"), &l("w1")), l("w1"));
        assert_eq!(lang_add(&lang_zero(), &lang_zero()), lang_zero());
    }

    #[test]
    fn mul_examples() {
        assert_eq!(lang_mul(&l("w1"), &l("w5")), l("w1.w5"));
        assert_eq!(lang_mul(&l("w2,w3"), &l("w5")), l("w2.w5,w3.w5"));
        assert_eq!(lang_mul(&l("w1"), &lang_zero()), lang_zero());
    }

    #[test]
    fn word_text_form() {
        let w: Word = "l6.l7".parse().unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.to_string(), "l6.l7");
        assert_eq!("".parse::<Word>().unwrap(), Word::epsilon());
        assert!("l6..l7".parse::<Word>().is_err());
        assert!(LinkLabel::new("a.b").is_err());
        assert!(LinkLabel::new("").is_err());
        assert!(LinkLabel::new("a b").is_err());
    }

    #[test]
    fn display() {
        assert_eq!(lang_zero().to_string(), "∅");
        assert_eq!(lang_one().to_string(), "{ε}");
        assert_eq!(l("w3.w5,w2.w5").to_string(), "{w2.w5,w3.w5}");
    }

    fn arb_lang() -> impl Strategy<Value = Lang> {
        let label = prop::sample::select(vec!["a", "b", "c", "d"]);
        let word = prop::collection::vec(label, 0..=4)
            .prop_map(|ls| Word::from_labels(ls.into_iter().map(|s| LinkLabel::new(s).unwrap())));
        prop::collection::vec(word, 0..=5).prop_map(Lang::from_words)
    }

    proptest! {
        #[test]
        fn additive_monoid(a in arb_lang(), b in arb_lang(), c in arb_lang()) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&Lang::zero()), a.clone());
            prop_assert_eq!(a.add(&a), a);
        }

        #[test]
        fn multiplicative_monoid(a in arb_lang(), b in arb_lang(), c in arb_lang()) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&Lang::one()), a.clone());
            prop_assert_eq!(Lang::one().mul(&a), a.clone());
            prop_assert_eq!(a.mul(&Lang::zero()), Lang::zero());
            prop_assert_eq!(Lang::zero().mul(&a), Lang::zero());
        }

        #[test]
        fn distributive(a in arb_lang(), b in arb_lang(), c in arb_lang()) {
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(b.add(&c).mul(&a), b.mul(&a).add(&c.mul(&a)));
        }
    }
}
