//! Marked Schottky groups: free-group words bound to disc isometries, a
//! ping-pong certificate, and orbit enumeration partitioned by subtree.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{enumerate_words, for_each_in_subtree, partition_roots, CyclicCosets, Letter, ReducedWord, MAX_RANK};
use crate::hypgeom::{Isometry, IsometryKind};

/// Subtree depth used to split orbit enumeration into work units. Fixed, so
/// the merge order (and every floating-point aggregate) is independent of
/// the worker count.
pub const PARTITION_DEPTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

/// Isometric circles of all `2k` letters, in letter order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchottkyCertificate {
    pub circles: Vec<Circle>,
    /// Smallest `|c_i - c_j| - r_i - r_j` over all pairs.
    pub min_gap: f64,
}

/// The isometric circle `|conj(b) z + conj(a)| = 1` of `m`.
pub fn isometric_circle(m: &Isometry) -> Option<Circle> {
    let bn = m.b.norm();
    (bn > 0.0).then(|| Circle {
        center: -m.a.conj() / m.b.conj(),
        radius: 1.0 / bn,
    })
}

/// Checks that the `2k` isometric circles are pairwise disjoint.
pub fn certify(generators: &[Isometry]) -> Result<SchottkyCertificate> {
    let mut circles = Vec::with_capacity(2 * generators.len());
    for (j, g) in generators.iter().enumerate() {
        for m in [*g, g.inverse()] {
            circles.push(isometric_circle(&m).ok_or_else(|| Error::InvalidGroup(format!("generator {j} fixes the origin")))?);
        }
    }
    let mut min_gap = f64::INFINITY;
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let gap = (circles[i].center - circles[j].center).norm();
            let radii = circles[i].radius + circles[j].radius;
            if gap <= radii {
                return Err(Error::CertificateFailed { i, j, gap, radii });
            }
            min_gap = min_gap.min(gap - radii);
        }
    }
    Ok(SchottkyCertificate { circles, min_gap })
}

#[derive(Clone, Debug)]
pub struct MarkedGroup {
    rank: usize,
    translation: Option<f64>,
    generators: Vec<Isometry>,
    /// Matrix of each letter, indexed by [`Letter::code`]. Equal to the
    /// generators conjugated by `frame`.
    letter_mats: Vec<Isometry>,
    frame: Isometry,
    certificate: SchottkyCertificate,
}

impl MarkedGroup {
    /// `k` generators with axes through the origin at angles `pi j / k`, all
    /// of translation length `t`.
    pub fn schottky_symmetric(k: usize, t: f64) -> Result<Self> {
        if !(2..=MAX_RANK).contains(&k) {
            return Err(Error::InvalidGroup(format!("rank must be in 2..={MAX_RANK}, got {k}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidGroup(format!("translation length must be positive, got {t}")));
        }
        let gens = (0..k).map(|j| Isometry::boost_along(t, PI * j as f64 / k as f64)).collect();
        let mut group = MarkedGroup::from_generators(gens)?;
        group.translation = Some(t);
        Ok(group)
    }

    /// Any certified Schottky generating set.
    pub fn from_generators(generators: Vec<Isometry>) -> Result<Self> {
        let k = generators.len();
        if !(2..=MAX_RANK).contains(&k) {
            return Err(Error::InvalidGroup(format!("rank must be in 2..={MAX_RANK}, got {k}")));
        }
        for (j, g) in generators.iter().enumerate() {
            if g.det_residual() > 1e-9 {
                return Err(Error::InvalidGroup(format!("generator {j} is not in SU(1,1)")));
            }
            if g.classify().kind != IsometryKind::Hyperbolic {
                return Err(Error::InvalidGroup(format!("generator {j} is not hyperbolic")));
            }
        }
        let certificate = certify(&generators)?;
        let letter_mats = Letter::alphabet(k)
            .map(|l| {
                let g = generators[l.generator()];
                if l.is_inverse() {
                    g.inverse()
                } else {
                    g
                }
            })
            .collect();
        Ok(MarkedGroup {
            rank: k,
            translation: None,
            generators,
            letter_mats,
            frame: Isometry::IDENTITY,
            certificate,
        })
    }

    /// The same marked group seen from the base point `frame^-1(0)`: every
    /// matrix is replaced by `frame * m * frame^-1`.
    pub fn in_frame(&self, frame: Isometry) -> MarkedGroup {
        let frame = frame.compose(&self.frame);
        let letter_mats = Letter::alphabet(self.rank)
            .map(|l| {
                let g = self.generators[l.generator()];
                frame.conjugate(&if l.is_inverse() { g.inverse() } else { g })
            })
            .collect();
        MarkedGroup {
            letter_mats,
            frame,
            ..self.clone()
        }
    }

    /// Re-centers so that the origin lies on the axis of `h`.
    pub fn with_origin_on_axis(&self, h: &ReducedWord) -> Result<MarkedGroup> {
        let m = self.evaluate(h)?;
        Ok(self.in_frame(m.conjugate_to_standard()?))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn translation(&self) -> Option<f64> {
        self.translation
    }

    pub fn generators(&self) -> &[Isometry] {
        &self.generators
    }

    pub fn frame(&self) -> &Isometry {
        &self.frame
    }

    pub fn certificate(&self) -> &SchottkyCertificate {
        &self.certificate
    }

    pub fn letter_matrix(&self, l: Letter) -> &Isometry {
        &self.letter_mats[l.code()]
    }

    /// Largest displacement of a single letter.
    pub fn max_letter_displacement(&self) -> f64 {
        self.letter_mats.iter().map(Isometry::displacement).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, w: &ReducedWord) -> Result<Isometry> {
        w.check_rank(self.rank)?;
        Ok(self.evaluate_letters(w.letters()))
    }

    pub fn evaluate_letters(&self, letters: &[Letter]) -> Isometry {
        letters
            .iter()
            .fold(Isometry::IDENTITY, |acc, &l| acc.compose(&self.letter_mats[l.code()]))
    }

    pub fn displacement(&self, w: &ReducedWord) -> Result<f64> {
        Ok(self.evaluate(w)?.displacement())
    }

    /// Depth-first walk of all words extending `prefix` up to `max_len`,
    /// one matrix product per word.
    pub fn walk_subtree<F: FnMut(&[Letter], &Isometry)>(&self, prefix: &ReducedWord, max_len: usize, mut visit: F) {
        if prefix.len() > max_len {
            return;
        }
        let mut letters = prefix.letters().to_vec();
        let mut mats = vec![self.evaluate_letters(&letters)];
        fn go<F: FnMut(&[Letter], &Isometry)>(
            group: &MarkedGroup,
            letters: &mut Vec<Letter>,
            mats: &mut Vec<Isometry>,
            max_len: usize,
            visit: &mut F,
        ) {
            let m = *mats.last().unwrap();
            visit(letters, &m);
            if letters.len() == max_len {
                return;
            }
            let last = letters.last().copied();
            for l in Letter::alphabet(group.rank) {
                if last == Some(l.inverse()) {
                    continue;
                }
                letters.push(l);
                mats.push(m.compose(&group.letter_mats[l.code()]));
                go(group, letters, mats, max_len, visit);
                mats.pop();
                letters.pop();
            }
        }
        go(self, &mut letters, &mut mats, max_len, &mut visit);
    }

    /// Folds over every orbit entry of word length `<= max_len`.
    ///
    /// Work is split into the subtrees below the words of length
    /// [`PARTITION_DEPTH`]; each partition folds into its own accumulator
    /// and partial results are merged left to right in shortlex order of
    /// the partition roots, after the words above the partition depth.
    pub fn orbit_fold<A, I, F, M>(&self, max_len: usize, workers: usize, init: I, visit: F, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &[Letter], &Isometry) + Sync,
        M: Fn(A, A) -> A,
    {
        let (above, roots) = partition_roots(self.rank, PARTITION_DEPTH, max_len);
        let mut acc = init();
        for word in &above {
            visit(&mut acc, word.letters(), &self.evaluate_letters(word.letters()));
        }
        let run = |root: &ReducedWord| {
            let mut part = init();
            self.walk_subtree(root, max_len, |ls, m| visit(&mut part, ls, m));
            part
        };
        let parts: Vec<A> = if workers <= 1 {
            roots.iter().map(run).collect()
        } else {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .expect("thread pool");
            pool.install(|| roots.par_iter().map(run).collect())
        };
        parts.into_iter().fold(acc, merge)
    }

    /// Every orbit entry of word length `<= max_len`, in shortlex order,
    /// optionally keeping only displacements `<= radius`.
    pub fn orbit_enumerate(&self, max_len: usize, radius: Option<f64>) -> Vec<OrbitEntry> {
        let mut out = Vec::new();
        self.walk_subtree(&ReducedWord::identity(), max_len, |ls, m| {
            let d = m.displacement();
            if radius.is_none_or(|r| d <= r) {
                out.push(OrbitEntry {
                    word: ReducedWord::from_letters(ls.to_vec()).expect("walk yields reduced words"),
                    matrix: *m,
                    displacement: d,
                });
            }
        });
        out.sort_by(|x, y| x.word.cmp(&y.word));
        out
    }

    /// `(word length, displacement)` for every word of length `<= max_len`,
    /// in the deterministic partition order of [`MarkedGroup::orbit_fold`].
    pub fn orbit_displacements(&self, max_len: usize, workers: usize) -> Vec<(usize, f64)> {
        self.orbit_fold(
            max_len,
            workers,
            Vec::new,
            |acc: &mut Vec<(usize, f64)>, ls, m| acc.push((ls.len(), m.displacement())),
            |mut a, b| {
                a.extend(b);
                a
            },
        )
    }

    /// Displacements of the words of length exactly `len`.
    pub fn sphere_displacements(&self, len: usize, workers: usize) -> Vec<f64> {
        self.orbit_fold(
            len,
            workers,
            Vec::new,
            |acc: &mut Vec<f64>, ls, m| {
                if ls.len() == len {
                    acc.push(m.displacement())
                }
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        )
    }

    /// Smallest displacement among words of length exactly `len`.
    pub fn min_sphere_displacement(&self, len: usize, workers: usize) -> f64 {
        self.orbit_fold(
            len,
            workers,
            || f64::INFINITY,
            |acc: &mut f64, ls, m| {
                if ls.len() == len {
                    *acc = acc.min(m.displacement())
                }
            },
            f64::min,
        )
    }

    /// One canonical representative per right coset `<h> g` meeting the ball
    /// of word length `max_len`, with the coset's minimal displacement.
    pub fn coset_enumerate(&self, h: &ReducedWord, max_len: usize) -> Result<Vec<CosetEntry>> {
        CosetWindow::new(self, h)?.enumerate(max_len)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitEntry {
    pub word: ReducedWord,
    pub matrix: Isometry,
    pub displacement: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CosetEntry {
    /// Shortlex-least element of the coset.
    pub rep: ReducedWord,
    /// `min |n| <= window` of the displacement of `h^n rep`.
    pub displacement: f64,
    /// Power of `h` attaining the minimum.
    pub argmin: i64,
    pub window: i64,
}

/// Machinery for walking a right coset `<h> g` around a given member.
pub struct CosetWindow<'a> {
    group: &'a MarkedGroup,
    cosets: CyclicCosets,
    h_mat: Isometry,
    translation: f64,
    max_step: f64,
}

impl<'a> CosetWindow<'a> {
    pub fn new(group: &'a MarkedGroup, h: &ReducedWord) -> Result<Self> {
        let cosets = CyclicCosets::new(h)?;
        let h_mat = group.evaluate(h)?;
        let translation = h_mat.translation_length()?;
        Ok(CosetWindow {
            group,
            cosets,
            h_mat,
            translation,
            max_step: group.max_letter_displacement(),
        })
    }

    pub fn translation_length(&self) -> f64 {
        self.translation
    }

    pub fn h_matrix(&self) -> &Isometry {
        &self.h_mat
    }

    pub fn cosets(&self) -> &CyclicCosets {
        &self.cosets
    }

    /// Powers beyond this cannot lower the displacement below that of `g`:
    /// `d(h^n g) >= |n| t_h - d(g)` and `d(g) <= |g| max_step`.
    pub fn displacement_window(&self, g: &ReducedWord) -> i64 {
        (2.0 * g.len() as f64 * self.max_step / self.translation).ceil() as i64 + 2
    }

    pub fn is_canonical(&self, g: &ReducedWord) -> bool {
        self.cosets.is_canonical(g)
    }

    pub fn canonical_rep(&self, g: &ReducedWord) -> ReducedWord {
        self.cosets.canonical_rep(g)
    }

    /// Minimal displacement of `h^n g` over `|n| <= window`, with the
    /// minimizing `n`. Ties go to the smaller `|n|`, then to positive `n`.
    pub fn min_displacement(&self, g: &ReducedWord, window: i64) -> Result<(f64, i64)> {
        let g_mat = self.group.evaluate(g)?;
        let h_inv = self.h_mat.inverse();
        let mut best = (g_mat.displacement(), 0);
        let (mut up, mut down) = (g_mat, g_mat);
        for n in 1..=window {
            up = self.h_mat.compose(&up);
            down = h_inv.compose(&down);
            for (m, k) in [(up, n), (down, -n)] {
                let d = m.displacement();
                if d < best.0 {
                    best = (d, k);
                }
            }
        }
        Ok(best)
    }

    pub fn entry(&self, rep: &ReducedWord) -> Result<CosetEntry> {
        let window = self.displacement_window(rep);
        let (displacement, argmin) = self.min_displacement(rep, window)?;
        Ok(CosetEntry {
            rep: rep.clone(),
            displacement,
            argmin,
            window,
        })
    }

    pub fn enumerate(&self, max_len: usize) -> Result<Vec<CosetEntry>> {
        enumerate_words(self.group.rank, max_len)
            .filter(|g| self.is_canonical(g))
            .map(|g| self.entry(&g))
            .collect()
    }
}

/// Visits every reduced word of length `<= max_len` (no matrices).
pub fn for_each_word(rank: usize, max_len: usize, visit: impl FnMut(&[Letter])) {
    for_each_in_subtree(rank, &ReducedWord::identity(), max_len, visit);
}
