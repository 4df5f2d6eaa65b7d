//! Freely reduced words over the generators of a free group.
//!
//! A [`Letter`] is packed as `2 * generator + inverse`, so the derived order
//! on letters is `a < A < b < B < ...` (lowercase is the generator, uppercase
//! its inverse). [`ReducedWord`] orders by shortlex on top of that.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest rank that still has an ASCII spelling.
pub const MAX_RANK: usize = 26;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u16);

impl Letter {
    /// `sign` is +1 for the generator and -1 for its inverse.
    pub fn new(generator: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Letter((generator as u16) << 1 | u16::from(sign < 0))
    }

    pub fn gen(generator: usize) -> Self {
        Letter::new(generator, 1)
    }

    pub fn generator(self) -> usize {
        usize::from(self.0 >> 1)
    }

    pub fn sign(self) -> i8 {
        if self.0 & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Dense index in `0..2k`, following the letter order.
    pub fn code(self) -> usize {
        usize::from(self.0)
    }

    pub fn from_code(code: usize) -> Self {
        Letter(code as u16)
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        char::from(base + self.generator() as u8)
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Letter::new(c as usize - 'a' as usize, 1)),
            'A'..='Z' => Some(Letter::new(c as usize - 'A' as usize, -1)),
            _ => None,
        }
    }

    /// All `2k` letters of rank `k` in shortlex letter order.
    pub fn alphabet(rank: usize) -> impl Iterator<Item = Letter> {
        (0..2 * rank).map(Letter::from_code)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord::default()
    }

    pub fn letter(l: Letter) -> Self {
        ReducedWord { letters: vec![l] }
    }

    /// Wraps an already reduced letter sequence, rejecting anything with an
    /// adjacent inverse pair.
    pub fn from_letters(letters: Vec<Letter>) -> Result<Self> {
        if letters.windows(2).any(|p| p[0] == p[1].inverse()) {
            let s: String = letters.iter().map(|l| l.to_char()).collect();
            return Err(Error::InvalidWord(s, "not freely reduced"));
        }
        Ok(ReducedWord { letters })
    }

    pub(crate) fn from_letters_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        ReducedWord { letters }
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            push_reducing(&mut out, l);
        }
        ReducedWord { letters: out }
    }

    /// Parses the ASCII form and freely reduces it (so `"aA"` is accepted
    /// and yields the identity). `"1"` is the identity.
    pub fn parse_reducing(s: &str) -> Result<Self> {
        Ok(ReducedWord::reduce(parse_letters(s)?))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// One more than the largest generator index used (0 for the identity).
    pub fn min_rank(&self) -> usize {
        self.letters.iter().map(|l| l.generator() + 1).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: usize) -> Result<()> {
        match self.letters.iter().find(|l| l.generator() >= rank) {
            Some(l) => Err(Error::GeneratorOutOfRange {
                generator: l.generator(),
                rank,
            }),
            None => Ok(()),
        }
    }

    /// The freely reduced product `self * other`.
    pub fn concat(&self, other: &ReducedWord) -> ReducedWord {
        let mut cancel = 0;
        let (n, m) = (self.len(), other.len());
        while cancel < n.min(m) && self.letters[n - 1 - cancel] == other.letters[cancel].inverse() {
            cancel += 1;
        }
        let mut letters = Vec::with_capacity(n + m - 2 * cancel);
        letters.extend_from_slice(&self.letters[..n - cancel]);
        letters.extend_from_slice(&other.letters[cancel..]);
        ReducedWord { letters }
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> ReducedWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = ReducedWord::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.concat(&base);
        }
        acc
    }

    /// `self^-1 * h * self`.
    pub fn conjugate_of(&self, h: &ReducedWord) -> ReducedWord {
        self.inverse().concat(h).concat(self)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Splits `self = conjugator * core * conjugator^-1` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> (ReducedWord, ReducedWord) {
        let n = self.len();
        let mut peel = 0;
        while 2 * peel + 1 < n && self.letters[peel] == self.letters[n - 1 - peel].inverse() {
            peel += 1;
        }
        let core = ReducedWord::from_letters_unchecked(self.letters[peel..n - peel].to_vec());
        let conj = ReducedWord::from_letters_unchecked(self.letters[..peel].to_vec());
        (core, conj)
    }

    /// Returns `(root, exponent)` with `self = root^exponent`, `exponent`
    /// maximal.
    pub fn primitive_root(&self) -> Result<(ReducedWord, u32)> {
        if self.is_identity() {
            return Err(Error::IdentityRoot);
        }
        let (core, conj) = self.cyclic_reduce();
        let c = core.letters();
        let n = c.len();
        let period = (1..=n)
            .filter(|d| n % d == 0)
            .find(|&d| (d..n).all(|i| c[i] == c[i - d]))
            .expect("n divides n");
        let inner = ReducedWord::from_letters_unchecked(c[..period].to_vec());
        let root = conj.concat(&inner).concat(&conj.inverse());
        Ok((root, (n / period) as u32))
    }
}

pub(crate) fn push_reducing(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    if s == "1" {
        return Ok(Vec::new());
    }
    if s.is_empty() {
        return Err(Error::InvalidWord(s.to_string(), "empty string (use \"1\" for the identity)"));
    }
    s.chars()
        .map(|c| Letter::from_char(c).ok_or_else(|| Error::InvalidWord(s.to_string(), "letters must be a-z or A-Z")))
        .collect()
}

impl Ord for ReducedWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReducedWord({self})")
    }
}

/// Strict parse: the string must already be freely reduced.
impl FromStr for ReducedWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReducedWord::from_letters(parse_letters(s)?)
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReducedWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand used throughout the tests: parses a reduced ASCII word.
pub fn w(s: &str) -> ReducedWord {
    s.parse().unwrap_or_else(|e| panic!("bad word {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_order_matches_shortlex_alphabet() {
        let abc: Vec<char> = Letter::alphabet(3).map(Letter::to_char).collect();
        assert_eq!(abc, vec!['a', 'A', 'b', 'B', 'c', 'C']);
        assert_eq!(Letter::gen(1).inverse(), Letter::new(1, -1));
        assert_eq!(Letter::new(2, -1).sign(), -1);
    }

    #[test]
    fn concat_examples() {
        assert_eq!(w("a").concat(&w("A")), ReducedWord::identity());
        assert_eq!(ReducedWord::identity().concat(&w("abAB")), w("abAB"));
        assert_eq!(w("ab").concat(&w("Ba")), w("aa"));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("ab").inverse(), w("BA"));
        assert_eq!(ReducedWord::identity().inverse(), ReducedWord::identity());
        assert_eq!(w("aaa").inverse(), w("AAA"));
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w("abA").cyclic_reduce(), (w("b"), w("a")));
        assert_eq!(w("ab").cyclic_reduce(), (w("ab"), ReducedWord::identity()));
        assert_eq!(w("abaBA").cyclic_reduce(), (w("a"), w("ab")));
        assert_eq!(w("a").cyclic_reduce(), (w("a"), ReducedWord::identity()));
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(w("ab").primitive_root().unwrap(), (w("ab"), 1));
        assert_eq!(w("ababab").primitive_root().unwrap(), (w("ab"), 3));
        assert_eq!(w("abA").primitive_root().unwrap(), (w("abA"), 1));
        assert_eq!(w("abbA").primitive_root().unwrap(), (w("abA"), 2));
        assert_eq!(
            ReducedWord::identity().primitive_root(),
            Err(Error::IdentityRoot)
        );
    }

    #[test]
    fn ascii_format() {
        assert_eq!(w("abAB").to_string(), "abAB");
        assert_eq!(ReducedWord::identity().to_string(), "1");
        assert_eq!("1".parse::<ReducedWord>().unwrap(), ReducedWord::identity());
        assert!("aA".parse::<ReducedWord>().is_err());
        assert!("".parse::<ReducedWord>().is_err());
        assert!("a1".parse::<ReducedWord>().is_err());
        assert_eq!(ReducedWord::parse_reducing("abBA").unwrap(), ReducedWord::identity());
    }

    #[test]
    fn shortlex_order() {
        let mut v = [w("b"), w("aa"), w("A"), w("1"), w("a")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, vec!["1", "a", "A", "b", "aa"]);
    }

    #[test]
    fn pow_and_rank() {
        assert_eq!(w("ab").pow(-2), w("BABA"));
        assert_eq!(w("ab").pow(0), ReducedWord::identity());
        assert_eq!(w("aBc").min_rank(), 3);
        assert!(w("c").check_rank(2).is_err());
    }
}
