//! Stallings graphs of finitely generated subgroups `H = <h_1, ..., h_n>`.
//!
//! Besides its letter, every edge carries a *voltage*: a word over abstract
//! symbols `x_1..x_n` standing for the subgroup generators. Reading a member
//! of `H` from the base vertex and multiplying voltages rewrites it as a word
//! in the `h_i`. Folding keeps voltages consistent by re-gauging a vertex
//! before merging; if two edges still disagree the generators satisfy a
//! relation and are not a free basis (membership still works).

use std::collections::VecDeque;

use super::enumerate::enumerate_words;
use super::word::{Letter, ReducedWord};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct Edge {
    from: usize,
    to: usize,
    letter: Letter,
    voltage: ReducedWord,
}

impl Edge {
    /// The edge as seen leaving `u` with label `l`: (other end, voltage).
    fn view(&self, u: usize, l: Letter) -> Option<(usize, ReducedWord)> {
        if self.from == u && self.letter == l {
            Some((self.to, self.voltage.clone()))
        } else if self.to == u && self.letter.inverse() == l {
            Some((self.from, self.voltage.inverse()))
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct HalfEdge {
    letter: Letter,
    target: usize,
    edge: usize,
}

/// A folded Stallings graph with base vertex 0.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    generators: Vec<ReducedWord>,
    edges: Vec<Edge>,
    /// Outgoing half-edges per vertex, sorted by letter.
    out: Vec<Vec<HalfEdge>>,
    /// Graph distance from each vertex to the base.
    dist: Vec<usize>,
    free_basis: bool,
}

const BASE: usize = 0;

/// Builds and folds the Stallings graph of `<generators>`.
pub fn stallings_build(generators: &[ReducedWord]) -> Result<SubgroupGraph> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("subgroup needs at least one generator".into()));
    }
    let mut n_vertices = 1;
    let mut edges = Vec::new();
    let mut free_basis = true;
    for (i, h) in generators.iter().enumerate() {
        if h.is_identity() {
            free_basis = false;
            continue;
        }
        let mut cur = BASE;
        for (j, &l) in h.letters().iter().enumerate() {
            let last = j + 1 == h.len();
            let next = if last {
                BASE
            } else {
                n_vertices += 1;
                n_vertices - 1
            };
            let voltage = if last { ReducedWord::letter(Letter::gen(i)) } else { ReducedWord::identity() };
            edges.push(Edge { from: cur, to: next, letter: l, voltage });
            cur = next;
        }
    }

    let mut edges: Vec<Option<Edge>> = edges.into_iter().map(Some).collect();
    while let Some((u, l, e1, e2)) = find_fold(&edges) {
        let (v1, w1) = edges[e1].as_ref().unwrap().view(u, l).unwrap();
        let (v2, w2) = edges[e2].as_ref().unwrap().view(u, l).unwrap();
        if free_basis && w1 != w2 {
            let gauge = if v1 == v2 {
                None
            } else if v2 != BASE && v2 != u {
                Some((v2, w2.inverse().concat(&w1)))
            } else if v1 != BASE && v1 != u {
                Some((v1, w1.inverse().concat(&w2)))
            } else if v2 == u {
                // v1 is the base: re-gauge u, which also conjugates the loop e2
                Some((u, w2.inverse().concat(&w1)))
            } else {
                Some((u, w1.inverse().concat(&w2)))
            };
            match gauge {
                Some((vertex, c)) => regauge(&mut edges, vertex, &c),
                None => free_basis = false,
            }
            debug_assert!(
                !free_basis || edges[e1].as_ref().unwrap().view(u, l).unwrap().1 == edges[e2].as_ref().unwrap().view(u, l).unwrap().1
            );
        }
        if v1 != v2 {
            let (keep, drop) = if v2 == BASE { (v2, v1) } else { (v1, v2) };
            for e in edges.iter_mut().flatten() {
                if e.from == drop {
                    e.from = keep;
                }
                if e.to == drop {
                    e.to = keep;
                }
            }
        }
        edges[e2] = None;
    }

    // compact vertex ids, keeping the base at 0
    let edges: Vec<Edge> = edges.into_iter().flatten().collect();
    let mut remap = vec![usize::MAX; n_vertices];
    remap[BASE] = 0;
    let mut next_id = 1;
    for e in &edges {
        for v in [e.from, e.to] {
            if remap[v] == usize::MAX {
                remap[v] = next_id;
                next_id += 1;
            }
        }
    }
    let edges: Vec<Edge> = edges
        .into_iter()
        .map(|e| Edge { from: remap[e.from], to: remap[e.to], ..e })
        .collect();
    let mut out = vec![Vec::new(); next_id];
    for (id, e) in edges.iter().enumerate() {
        out[e.from].push(HalfEdge { letter: e.letter, target: e.to, edge: id });
        out[e.to].push(HalfEdge { letter: e.letter.inverse(), target: e.from, edge: id });
    }
    for list in &mut out {
        list.sort_by_key(|h| h.letter);
    }
    let dist = bfs_distances(&out);
    Ok(SubgroupGraph {
        generators: generators.to_vec(),
        edges,
        out,
        dist,
        free_basis,
    })
}

fn find_fold(edges: &[Option<Edge>]) -> Option<(usize, Letter, usize, usize)> {
    let mut seen: std::collections::HashMap<(usize, Letter), usize> = std::collections::HashMap::new();
    for (id, e) in edges.iter().enumerate() {
        let Some(e) = e else { continue };
        for (u, l) in [(e.from, e.letter), (e.to, e.letter.inverse())] {
            match seen.get(&(u, l)) {
                Some(&other) if other != id => return Some((u, l, other, id)),
                _ => {
                    seen.insert((u, l), id);
                }
            }
        }
    }
    None
}

/// Multiplies voltages at `vertex` by `c`: outgoing `c^-1 w`, incoming `w c`.
fn regauge(edges: &mut [Option<Edge>], vertex: usize, c: &ReducedWord) {
    let c_inv = c.inverse();
    for e in edges.iter_mut().flatten() {
        if e.from == vertex {
            e.voltage = c_inv.concat(&e.voltage);
        }
        if e.to == vertex {
            e.voltage = e.voltage.concat(c);
        }
    }
}

fn bfs_distances(out: &[Vec<HalfEdge>]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; out.len()];
    let mut queue = VecDeque::new();
    dist[BASE] = 0;
    queue.push_back(BASE);
    while let Some(u) = queue.pop_front() {
        for h in &out[u] {
            if dist[h.target] == usize::MAX {
                dist[h.target] = dist[u] + 1;
                queue.push_back(h.target);
            }
        }
    }
    dist
}

impl SubgroupGraph {
    pub fn generators(&self) -> &[ReducedWord] {
        &self.generators
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Whether the generators are a free basis of the subgroup they span,
    /// i.e. whether [`SubgroupGraph::rewrite`] is available.
    pub fn is_free_basis(&self) -> bool {
        self.free_basis
    }

    fn step(&self, v: usize, l: Letter) -> Option<&HalfEdge> {
        self.out[v].iter().find(|h| h.letter == l)
    }

    /// Follows `letters` from the base; returns the number of letters read
    /// and the vertex reached.
    fn read(&self, letters: impl IntoIterator<Item = Letter>) -> (usize, usize) {
        let mut v = BASE;
        let mut n = 0;
        for l in letters {
            match self.step(v, l) {
                Some(h) => v = h.target,
                None => break,
            }
            n += 1;
        }
        (n, v)
    }

    pub fn contains(&self, g: &ReducedWord) -> bool {
        let (n, v) = self.read(g.letters().iter().copied());
        n == g.len() && v == BASE
    }

    /// Rewrites a member of `H` as a reduced word in the generators, encoded
    /// with letter `i` standing for generator `h_{i+1}`.
    pub fn rewrite(&self, g: &ReducedWord) -> Result<ReducedWord> {
        if !self.free_basis {
            return Err(Error::Rewriting("generators are not a free basis".into()));
        }
        let mut v = BASE;
        let mut acc = ReducedWord::identity();
        for &l in g.letters() {
            let h = self
                .step(v, l)
                .ok_or_else(|| Error::Rewriting(format!("{g} is not in the subgroup")))?;
            let volt = self.edges[h.edge].view(v, l).expect("half-edge belongs to its edge").1;
            acc = acc.concat(&volt);
            v = h.target;
        }
        if v != BASE {
            return Err(Error::Rewriting(format!("{g} is not in the subgroup")));
        }
        Ok(acc)
    }

    /// Evaluates a word in the abstract generators back to the free group.
    pub fn expand(&self, h_word: &ReducedWord) -> ReducedWord {
        h_word.letters().iter().fold(ReducedWord::identity(), |acc, l| {
            let h = &self.generators[l.generator()];
            acc.concat(&if l.is_inverse() { h.inverse() } else { h.clone() })
        })
    }

    /// The shortlex-least `r` with `r^-1 g` in `H`: canonical representative
    /// of the left coset `gH`.
    pub fn coset_canonical_rep(&self, g: &ReducedWord) -> ReducedWord {
        // read g^-1 into the graph; the unread tail leaves the core
        let inv = g.inverse();
        let (read, v) = self.read(inv.letters().iter().copied());
        let mut letters = g.letters()[..g.len() - read].to_vec();
        // shortlex-least geodesic from v back to the base
        let mut cur = v;
        while cur != BASE {
            let h = self.out[cur]
                .iter()
                .find(|h| self.dist[h.target] + 1 == self.dist[cur])
                .expect("graph is connected");
            letters.push(h.letter);
            cur = h.target;
        }
        ReducedWord::from_letters_unchecked(letters)
    }
}

/// All pairs `(g, h)` with `g` outside `H`, `h` a nontrivial member of `H`,
/// and `g h g^-1` in `H`, for `|g|, |h| <= bound`. An empty result only says
/// no violation is that short.
pub fn malnormal_violations(graph: &SubgroupGraph, rank: usize, bound: usize) -> Vec<(ReducedWord, ReducedWord)> {
    let (members, outsiders): (Vec<ReducedWord>, Vec<ReducedWord>) = enumerate_words(rank, bound).partition(|x| graph.contains(x));
    let members: Vec<_> = members.into_iter().filter(|h| !h.is_identity()).collect();
    let mut found = Vec::new();
    for g in &outsiders {
        let g_inv = g.inverse();
        for h in &members {
            if graph.contains(&g.concat(h).concat(&g_inv)) {
                found.push((g.clone(), h.clone()));
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::word::w;
    use std::collections::HashSet;

    /// Every element of `<gens>` reachable as a product of at most `n` factors
    /// whose reduced length is at most `max_len`.
    fn brute_members(gens: &[ReducedWord], n: usize, max_len: usize) -> HashSet<ReducedWord> {
        let mut letters: Vec<ReducedWord> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
        letters.dedup();
        let mut frontier: HashSet<ReducedWord> = HashSet::from([ReducedWord::identity()]);
        let mut all = frontier.clone();
        for _ in 0..n {
            let mut next = HashSet::new();
            for x in &frontier {
                for l in &letters {
                    let y = x.concat(l);
                    if all.insert(y.clone()) {
                        next.insert(y);
                    }
                }
            }
            frontier = next;
        }
        all.into_iter().filter(|x| x.len() <= max_len).collect()
    }

    #[test]
    fn membership_examples() {
        let g = stallings_build(&[w("a")]).unwrap();
        assert!(g.contains(&w("aaaaa")));
        assert!(!g.contains(&w("b")));
        let g = stallings_build(&[w("aa"), w("b")]).unwrap();
        assert!(g.contains(&w("aab")));
        assert!(!g.contains(&w("a")));
        let g = stallings_build(&[w("ab"), w("ba")]).unwrap();
        assert!(g.contains(&w("abab")));
    }

    #[test]
    fn membership_matches_brute_force_products() {
        for gens in [vec![w("aa"), w("b")], vec![w("ab"), w("ba")], vec![w("abA"), w("bb")], vec![w("aab"), w("abb")]] {
            let graph = stallings_build(&gens).unwrap();
            // 12 factors is ample for members of length <= 6 here
            let members = brute_members(&gens, 12, 6);
            for x in enumerate_words(2, 6) {
                assert_eq!(graph.contains(&x), members.contains(&x), "H={gens:?} x={x}");
            }
        }
    }

    #[test]
    fn folding_detects_relations() {
        assert!(stallings_build(&[w("ab"), w("ba")]).unwrap().is_free_basis());
        assert!(!stallings_build(&[w("a"), w("aa")]).unwrap().is_free_basis());
        assert!(!stallings_build(&[w("a"), w("a")]).unwrap().is_free_basis());
    }

    #[test]
    fn rewriting_round_trips() {
        for gens in [vec![w("ab"), w("ba")], vec![w("abAB"), w("aabb")], vec![w("aa"), w("bab")], vec![w("abA"), w("b")]] {
            let graph = stallings_build(&gens).unwrap();
            assert!(graph.is_free_basis(), "{gens:?}");
            for x in enumerate_words(2, 8).filter(|x| graph.contains(x)) {
                let hw = graph.rewrite(&x).unwrap();
                assert_eq!(graph.expand(&hw), x);
            }
        }
    }

    #[test]
    fn rewriting_rejects_outsiders() {
        let graph = stallings_build(&[w("ab"), w("ba")]).unwrap();
        assert!(graph.rewrite(&w("a")).is_err());
        assert_eq!(graph.rewrite(&w("abba")).unwrap(), w("ab"));
        assert_eq!(graph.rewrite(&w("BA")).unwrap(), w("A"));
    }

    fn brute_canonical_rep(graph: &SubgroupGraph, g: &ReducedWord) -> ReducedWord {
        enumerate_words(2, g.len())
            .find(|r| graph.contains(&r.inverse().concat(g)))
            .expect("g is in its own coset")
    }

    #[test]
    fn coset_rep_matches_bounded_scan() {
        for gens in [vec![w("a")], vec![w("ab"), w("ba")], vec![w("aa"), w("b")], vec![w("abA"), w("bb")], vec![w("abAB"), w("aabb")]] {
            let graph = stallings_build(&gens).unwrap();
            for g in enumerate_words(2, 6) {
                assert_eq!(graph.coset_canonical_rep(&g), brute_canonical_rep(&graph, &g), "H={gens:?} g={g}");
            }
        }
    }

    #[test]
    fn coset_rep_examples() {
        let graph = stallings_build(&[w("a")]).unwrap();
        assert_eq!(graph.coset_canonical_rep(&w("aaa")), ReducedWord::identity());
        assert_eq!(graph.coset_canonical_rep(&w("ab")), w("ab"));
        assert_eq!(graph.coset_canonical_rep(&w("abA")), w("ab"));
        let graph = stallings_build(&[w("ab"), w("ba")]).unwrap();
        assert_eq!(graph.coset_canonical_rep(&w("ab")), ReducedWord::identity());
    }

    #[test]
    fn malnormal_examples() {
        let cyclic = stallings_build(&[w("a")]).unwrap();
        assert!(malnormal_violations(&cyclic, 2, 6).is_empty());
        let squares = stallings_build(&[w("aa")]).unwrap();
        let v = malnormal_violations(&squares, 2, 4);
        assert!(v.contains(&(w("a"), w("aa"))));
        let whole = stallings_build(&[w("a"), w("b")]).unwrap();
        assert!(malnormal_violations(&whole, 2, 6).is_empty());
    }
}
