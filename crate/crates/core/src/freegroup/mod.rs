//! Exact combinatorics of the free group `F_k`.

mod cosets;
mod enumerate;
mod hom;
mod stallings;
mod word;

pub use cosets::CyclicCosets;
pub use enumerate::{ball_size, enumerate_words, for_each_in_subtree, partition_roots, sphere_size, WordStream};
pub use hom::{HomSpec, QuotientHom, Target, TargetElement};
pub use stallings::{malnormal_violations, stallings_build, SubgroupGraph};
pub use word::{w, Letter, ReducedWord, MAX_RANK};
