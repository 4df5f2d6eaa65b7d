//! Maps from the group into a normal subgroup: conjugation of a fixed
//! element over cosets of its cyclic subgroup, and injective conjugation
//! maps `g -> g tau(g) g^-1`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{enumerate_words, malnormal_violations, CyclicCosets, Letter, QuotientHom, ReducedWord, SubgroupGraph};
use crate::kleinian::MarkedGroup;

/// `g^-1 h g`.
pub fn conj_map(h: &ReducedWord, g: &ReducedWord) -> ReducedWord {
    g.conjugate_of(h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberReport {
    pub h: ReducedWord,
    pub cutoff: usize,
    pub cosets_scanned: usize,
    pub distinct_images: usize,
    /// Fiber size -> number of images with that many preimages.
    pub histogram: BTreeMap<usize, usize>,
    pub max_fiber: usize,
    pub declared_bound: usize,
    /// Largest fiber together with its coset representatives.
    pub witness: Vec<ReducedWord>,
    /// Images outside the kernel (expected empty).
    pub kernel_failures: Vec<ReducedWord>,
}

impl FiberReport {
    pub fn passes(&self) -> bool {
        self.max_fiber <= self.declared_bound && self.kernel_failures.is_empty()
    }
}

/// Fibers of `g -> g^-1 h g` over the canonical representatives of the
/// cosets `<h> g` of length `<= len`. The declared bound is the exponent of
/// `h` over its primitive root, plus one.
pub fn fiber_statistics(group: &MarkedGroup, h: &ReducedWord, hom: &QuotientHom, len: usize) -> Result<FiberReport> {
    h.check_rank(group.rank())?;
    if !hom.is_kernel_member(h) {
        return Err(Error::NotInKernel(h.to_string()));
    }
    let cosets = CyclicCosets::new(h)?;
    let (_, exponent) = h.primitive_root()?;
    let mut fibers: HashMap<ReducedWord, Vec<ReducedWord>> = HashMap::new();
    let mut scanned = 0;
    for g in enumerate_words(group.rank(), len).filter(|g| cosets.is_canonical(g)) {
        scanned += 1;
        fibers.entry(conj_map(h, &g)).or_default().push(g);
    }
    let mut histogram = BTreeMap::new();
    let mut witness: Vec<ReducedWord> = Vec::new();
    let mut kernel_failures = Vec::new();
    for (image, reps) in &fibers {
        *histogram.entry(reps.len()).or_insert(0) += 1;
        if reps.len() > witness.len() || (reps.len() == witness.len() && reps[0] < witness[0]) {
            witness = reps.clone();
        }
        if !hom.is_kernel_member(image) {
            kernel_failures.push(image.clone());
        }
    }
    kernel_failures.sort();
    Ok(FiberReport {
        h: h.clone(),
        cutoff: len,
        cosets_scanned: scanned,
        distinct_images: fibers.len(),
        max_fiber: witness.len(),
        histogram,
        declared_bound: exponent as usize + 1,
        witness,
        kernel_failures,
    })
}

/// The injection for a free group: `g -> g alpha h0 alpha^-1 g^-1`, where
/// `alpha` is the first of `a, A, b, B` that cancels neither against `g` nor
/// against `h0`.
pub fn prop3_free(rank: usize, g: &ReducedWord, h0: &ReducedWord) -> Result<(Letter, ReducedWord)> {
    if rank < 2 {
        return Err(Error::InvalidArgument("the free case needs rank at least 2".into()));
    }
    if h0.is_identity() {
        return Err(Error::InvalidArgument("h0 must be nontrivial".into()));
    }
    g.check_rank(rank)?;
    h0.check_rank(rank)?;
    let excluded = [
        g.last().map(Letter::inverse),
        h0.first().map(Letter::inverse),
        h0.last(),
    ];
    let alpha = Letter::alphabet(2)
        .find(|l| !excluded.contains(&Some(*l)))
        .expect("three exclusions leave one of four letters");
    let a = ReducedWord::letter(alpha);
    let tau = a.concat(h0).concat(&a.inverse());
    Ok((alpha, g.concat(&tau).concat(&g.inverse())))
}

/// Which generator of `H = <h1, h2>` the malnormal injection conjugates by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tau {
    H1,
    H2,
}

/// The injection for a malnormal free subgroup `H = <h1, h2>`: write
/// `g = g_j h` with `g_j` the canonical representative of `gH` and `h` a
/// reduced word in `h1, h2`; conjugate by `h2` when `h` ends in `h1^{+-1}`
/// and by `h1` otherwise (including `h = 1`).
pub fn prop3_malnormal(graph: &SubgroupGraph, g: &ReducedWord) -> Result<(Tau, ReducedWord)> {
    if graph.generators().len() != 2 || !graph.is_free_basis() {
        return Err(Error::InvalidArgument("H must be given by a free basis of two elements".into()));
    }
    let g_j = graph.coset_canonical_rep(g);
    let h = g_j.inverse().concat(g);
    let h_word = graph.rewrite(&h)?;
    if graph.expand(&h_word) != h {
        return Err(Error::Rewriting(format!("rewriting of {h} does not expand back")));
    }
    let tau = match h_word.last() {
        Some(l) if l.generator() == 0 => Tau::H2,
        _ => Tau::H1,
    };
    let t = &graph.generators()[match tau {
        Tau::H1 => 0,
        Tau::H2 => 1,
    }];
    Ok((tau, g.concat(t).concat(&g.inverse())))
}

/// A map scanned by [`injectivity_scan`].
#[derive(Clone, Debug)]
pub enum InjectionCase {
    Free { h0: ReducedWord },
    Malnormal { graph: SubgroupGraph },
}

impl InjectionCase {
    pub fn name(&self) -> &'static str {
        match self {
            InjectionCase::Free { .. } => "free",
            InjectionCase::Malnormal { .. } => "malnormal",
        }
    }
}

/// Bound used to refute malnormality before a malnormal scan.
pub const MALNORMAL_GATE: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectionReport {
    pub case: String,
    pub cutoff: usize,
    pub scanned: usize,
    /// Pairs of distinct inputs with the same image.
    pub collisions: Vec<(ReducedWord, ReducedWord)>,
    pub max_image_length: usize,
    /// Inputs whose image is outside the kernel.
    pub kernel_failures: Vec<ReducedWord>,
    /// Free case only: inputs whose image length is not `2|g| + |h0| + 2`.
    pub length_failures: Vec<ReducedWord>,
}

impl InjectionReport {
    pub fn passes(&self) -> bool {
        self.collisions.is_empty() && self.kernel_failures.is_empty() && self.length_failures.is_empty()
    }
}

/// Applies the map to every reduced word of length `<= len` and records
/// collisions and images outside the kernel of `hom`.
pub fn injectivity_scan(case: &InjectionCase, rank: usize, len: usize, hom: &QuotientHom) -> Result<InjectionReport> {
    if hom.rank() != rank {
        return Err(Error::InvalidHom(format!("rank {} does not match {rank}", hom.rank())));
    }
    if let InjectionCase::Malnormal { graph } = case {
        let violations = malnormal_violations(graph, rank, MALNORMAL_GATE);
        if let Some((g, h)) = violations.first() {
            return Err(Error::NotMalnormal {
                count: violations.len(),
                g: g.to_string(),
                h: h.to_string(),
            });
        }
    }
    let mut seen: HashMap<ReducedWord, ReducedWord> = HashMap::new();
    let mut report = InjectionReport {
        case: case.name().to_string(),
        cutoff: len,
        scanned: 0,
        collisions: Vec::new(),
        max_image_length: 0,
        kernel_failures: Vec::new(),
        length_failures: Vec::new(),
    };
    for g in enumerate_words(rank, len) {
        let image = match case {
            InjectionCase::Free { h0 } => {
                let image = prop3_free(rank, &g, h0)?.1;
                if image.len() != 2 * g.len() + h0.len() + 2 {
                    report.length_failures.push(g.clone());
                }
                image
            }
            InjectionCase::Malnormal { graph } => prop3_malnormal(graph, &g)?.1,
        };
        report.scanned += 1;
        report.max_image_length = report.max_image_length.max(image.len());
        if !hom.is_kernel_member(&image) {
            report.kernel_failures.push(g.clone());
        }
        if let Some(first) = seen.get(&image) {
            report.collisions.push((first.clone(), g.clone()));
        } else {
            seen.insert(image, g);
        }
    }
    Ok(report)
}
