//! Right cosets `<h> g` of a cyclic subgroup, with shortlex-least
//! representatives.

use super::word::ReducedWord;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CyclicCosets {
    h: ReducedWord,
    h_inv: ReducedWord,
    core_len: usize,
}

impl CyclicCosets {
    pub fn new(h: &ReducedWord) -> Result<Self> {
        if h.is_identity() {
            return Err(Error::InvalidArgument("h must be nontrivial".into()));
        }
        Ok(CyclicCosets {
            h: h.clone(),
            h_inv: h.inverse(),
            core_len: h.cyclic_reduce().0.len(),
        })
    }

    pub fn h(&self) -> &ReducedWord {
        &self.h
    }

    /// Powers `n` with `|n|` beyond this cannot give a word as short as `g`,
    /// since `|h^n g| >= |n| |core(h)| - |g|`.
    pub fn window(&self, g: &ReducedWord) -> i64 {
        (2 * g.len() / self.core_len) as i64
    }

    /// Whether `g` is the shortlex-least element of `<h> g`.
    pub fn is_canonical(&self, g: &ReducedWord) -> bool {
        let mut up = g.clone();
        let mut down = g.clone();
        for _ in 0..self.window(g) {
            up = self.h.concat(&up);
            down = self.h_inv.concat(&down);
            if up < *g || down < *g {
                return false;
            }
        }
        true
    }

    /// The shortlex-least element of `<h> g`.
    pub fn canonical_rep(&self, g: &ReducedWord) -> ReducedWord {
        let mut best = g.clone();
        let mut up = g.clone();
        let mut down = g.clone();
        for _ in 0..self.window(g) {
            up = self.h.concat(&up);
            down = self.h_inv.concat(&down);
            best = best.min(up.clone()).min(down.clone());
        }
        best
    }
}
