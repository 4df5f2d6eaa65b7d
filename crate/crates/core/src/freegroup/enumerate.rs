//! Shortlex enumeration of reduced words.

use super::word::{Letter, ReducedWord};

/// Number of reduced words of length exactly `len` in a free group of rank `k`.
pub fn sphere_size(rank: usize, len: usize) -> u64 {
    if len == 0 {
        1
    } else {
        2 * rank as u64 * (2 * rank as u64 - 1).pow(len as u32 - 1)
    }
}

/// Number of reduced words of length at most `len`.
pub fn ball_size(rank: usize, len: usize) -> u64 {
    (0..=len).map(|l| sphere_size(rank, l)).sum()
}

/// Streams every reduced word of length `<= max_len` exactly once, in
/// shortlex order. Holds one layer in memory at a time.
pub struct WordStream {
    rank: usize,
    max_len: usize,
    layer: Vec<ReducedWord>,
    pos: usize,
}

pub fn enumerate_words(rank: usize, max_len: usize) -> WordStream {
    WordStream {
        rank,
        max_len,
        layer: vec![ReducedWord::identity()],
        pos: 0,
    }
}

impl Iterator for WordStream {
    type Item = ReducedWord;

    fn next(&mut self) -> Option<ReducedWord> {
        if self.pos == self.layer.len() {
            let len = self.layer.first().map_or(usize::MAX, ReducedWord::len);
            if len >= self.max_len || self.layer.is_empty() {
                self.layer.clear();
                return None;
            }
            // appending in letter order to a lex-sorted layer keeps it sorted
            let mut next = Vec::with_capacity(self.layer.len() * (2 * self.rank - 1).max(1));
            for word in &self.layer {
                for l in Letter::alphabet(self.rank) {
                    if word.last() != Some(l.inverse()) {
                        let mut letters = word.letters().to_vec();
                        letters.push(l);
                        next.push(ReducedWord::from_letters_unchecked(letters));
                    }
                }
            }
            self.layer = next;
            self.pos = 0;
            if self.layer.is_empty() {
                return None;
            }
        }
        let item = self.layer[self.pos].clone();
        self.pos += 1;
        Some(item)
    }
}

/// Depth-first walk of the subtree of reduced words that extend `prefix`,
/// up to total length `max_len`. The visitor sees the prefix itself first,
/// then children in letter order (so siblings appear in lex order).
pub fn for_each_in_subtree<F: FnMut(&[Letter])>(rank: usize, prefix: &ReducedWord, max_len: usize, mut visit: F) {
    let mut buf = prefix.letters().to_vec();
    if buf.len() > max_len {
        return;
    }
    fn go<F: FnMut(&[Letter])>(rank: usize, buf: &mut Vec<Letter>, max_len: usize, visit: &mut F) {
        visit(buf);
        if buf.len() == max_len {
            return;
        }
        let last = buf.last().copied();
        for l in Letter::alphabet(rank) {
            if last != Some(l.inverse()) {
                buf.push(l);
                go(rank, buf, max_len, visit);
                buf.pop();
            }
        }
    }
    go(rank, &mut buf, max_len, &mut visit);
}

/// The reduced words of length exactly `depth` (or `max_len`, if smaller) in
/// shortlex order, together with the shorter words that sit above them. Each
/// partition root owns its whole subtree; the shorter words are visited once
/// by the caller.
pub fn partition_roots(rank: usize, depth: usize, max_len: usize) -> (Vec<ReducedWord>, Vec<ReducedWord>) {
    let depth = depth.min(max_len);
    let mut above = Vec::new();
    let mut roots = Vec::new();
    for word in enumerate_words(rank, depth) {
        if word.len() < depth {
            above.push(word);
        } else {
            roots.push(word);
        }
    }
    (above, roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_examples() {
        assert_eq!(enumerate_words(2, 1).count(), 5);
        assert_eq!(enumerate_words(2, 2).count(), 1 + 4 + 12);
        assert_eq!(enumerate_words(3, 2).count(), 1 + 6 + 30);
        assert_eq!(enumerate_words(2, 0).count(), 1);
    }

    #[test]
    fn sphere_counts_match_formula() {
        for k in [2usize, 3] {
            let max = if k == 2 { 8 } else { 6 };
            let mut counts = vec![0u64; max + 1];
            for word in enumerate_words(k, max) {
                counts[word.len()] += 1;
            }
            for (l, c) in counts.iter().enumerate() {
                assert_eq!(*c, sphere_size(k, l), "k={k} l={l}");
            }
        }
    }

    #[test]
    fn stream_is_strictly_shortlex_increasing() {
        let words: Vec<_> = enumerate_words(2, 5).collect();
        assert!(words.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn partitions_cover_ball_once() {
        let (above, roots) = partition_roots(2, 2, 5);
        let mut all: Vec<ReducedWord> = above.clone();
        for r in &roots {
            for_each_in_subtree(2, r, 5, |ls| all.push(ReducedWord::from_letters_unchecked(ls.to_vec())));
        }
        all.sort();
        let expect: Vec<_> = enumerate_words(2, 5).collect();
        assert_eq!(all, expect);
        assert_eq!(above.len(), 5);
        assert_eq!(roots.len(), 12);
    }
}
