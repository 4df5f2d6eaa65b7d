//! Shared fixtures for the benchmarks.

use explab::MarkedGroup;

/// The rank-2 symmetric group with translation length 3.
pub fn reference_group() -> MarkedGroup {
    MarkedGroup::schottky_symmetric(2, 3.0).expect("reference group is certified")
}
