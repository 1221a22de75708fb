//! Canonical labelling and isomorphism search for small digraphs.
//!
//! The canonical form uses colour refinement followed by individualisation
//! of the first non-singleton cell, keeping the lexicographically least arc
//! list over all leaves of the search tree. There is no automorphism
//! pruning, so the leaf count is capped; callers treat `None` as "no key".

use std::collections::BTreeMap;

use crate::digraph::{Arc, Digraph};

/// An isomorphism-invariant key: `n` and the relabelled sorted arc list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub n: usize,
    pub arcs: Vec<Arc>,
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    /// old id -> canonical id
    pub perm: Vec<usize>,
}

pub const DEFAULT_LEAF_CAP: usize = 200_000;

pub fn canonical_form(d: &Digraph) -> Option<CanonicalForm> {
    canonical_form_capped(d, DEFAULT_LEAF_CAP)
}

pub fn canonical_form_capped(d: &Digraph, leaf_cap: usize) -> Option<CanonicalForm> {
    let initial: Vec<u64> = d
        .vertices()
        .map(|v| {
            let digons = d.digon_partners(v).len() as u64;
            ((d.out_degree(v) as u64) << 40) | ((d.in_degree(v) as u64) << 20) | digons
        })
        .collect();
    let colours = normalise(&initial);
    let mut search = Canon { d, best: None, leaves: 0, cap: leaf_cap };
    search.explore(refine(d, colours))?;
    search.best.map(|(key, perm)| CanonicalForm { key, perm })
}

struct Canon<'a> {
    d: &'a Digraph,
    best: Option<(CanonicalKey, Vec<usize>)>,
    leaves: usize,
    cap: usize,
}

impl Canon<'_> {
    fn explore(&mut self, colours: Vec<usize>) -> Option<()> {
        let n = self.d.n();
        let cells = cell_sizes(&colours);
        let target = (0..cells.len()).find(|&c| cells[c] > 1);
        let Some(cell) = target else {
            self.leaves += 1;
            if self.leaves > self.cap {
                return None;
            }
            let mut arcs: Vec<Arc> = self.d.arcs().iter().map(|&(u, v)| (colours[u], colours[v])).collect();
            arcs.sort_unstable();
            let key = CanonicalKey { n, arcs };
            if self.best.as_ref().is_none_or(|(best, _)| key < *best) {
                self.best = Some((key, colours));
            }
            return Some(());
        };
        for v in (0..n).filter(|&v| colours[v] == cell) {
            // v moves ahead of the rest of its cell
            let split: Vec<u64> =
                (0..n).map(|u| 2 * colours[u] as u64 + u64::from(colours[u] == cell && u != v)).collect();
            self.explore(refine(self.d, normalise(&split)))?;
        }
        Some(())
    }
}

fn cell_sizes(colours: &[usize]) -> Vec<usize> {
    let mut sizes = vec![0; colours.len()];
    for &c in colours {
        sizes[c] += 1;
    }
    sizes
}

/// Renames values to `0..` preserving their order.
fn normalise<T: Ord + Clone>(values: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = values.to_vec();
    sorted.sort();
    sorted.dedup();
    values.iter().map(|x| sorted.binary_search(x).unwrap()).collect()
}

/// Iterated colour refinement by out- and in-neighbour colour multisets.
fn refine(d: &Digraph, mut colours: Vec<usize>) -> Vec<usize> {
    loop {
        let signatures: Vec<(usize, Vec<usize>, Vec<usize>)> = d
            .vertices()
            .map(|v| {
                let mut outs: Vec<usize> = d.out_neighbours(v).iter().map(|&u| colours[u]).collect();
                let mut ins: Vec<usize> = d.in_neighbours(v).iter().map(|&u| colours[u]).collect();
                outs.sort_unstable();
                ins.sort_unstable();
                (colours[v], outs, ins)
            })
            .collect();
        let next = normalise(&signatures);
        let before = cell_sizes(&colours).iter().filter(|&&s| s > 0).count();
        let after = cell_sizes(&next).iter().filter(|&&s| s > 0).count();
        colours = next;
        if after == before {
            return colours;
        }
    }
}

/// Searches for `f` with `(u, v)` an arc of `a` iff `(f(u), f(v))` is an arc
/// of `b`. Candidates are restricted to matching (in, out) degrees.
pub fn find_isomorphism(a: &Digraph, b: &Digraph) -> Option<Vec<usize>> {
    if a.n() != b.n() || a.m() != b.m() {
        return None;
    }
    let profile = |d: &Digraph, v: usize| (d.out_degree(v), d.in_degree(v), d.digon_partners(v).len());
    let mut count: BTreeMap<(usize, usize, usize), i64> = BTreeMap::new();
    for v in a.vertices() {
        *count.entry(profile(a, v)).or_default() += 1;
        *count.entry(profile(b, v)).or_default() -= 1;
    }
    if count.values().any(|&c| c != 0) {
        return None;
    }
    let mut order: Vec<usize> = a.vertices().collect();
    // connected-first order tightens the adjacency checks
    order.sort_by_key(|&v| std::cmp::Reverse(a.degree(v)));
    let mut mapping = vec![usize::MAX; a.n()];
    let mut used = vec![false; b.n()];
    if extend(a, b, &order, 0, &mut mapping, &mut used, &profile) {
        Some(mapping)
    } else {
        None
    }
}

fn extend(
    a: &Digraph,
    b: &Digraph,
    order: &[usize],
    depth: usize,
    mapping: &mut Vec<usize>,
    used: &mut Vec<bool>,
    profile: &dyn Fn(&Digraph, usize) -> (usize, usize, usize),
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    let want = profile(a, v);
    for w in b.vertices() {
        if used[w] || profile(b, w) != want {
            continue;
        }
        let consistent = order[..depth].iter().all(|&u| {
            let x = mapping[u];
            a.has_arc(u, v) == b.has_arc(x, w) && a.has_arc(v, u) == b.has_arc(w, x)
        });
        if !consistent {
            continue;
        }
        mapping[v] = w;
        used[w] = true;
        if extend(a, b, order, depth + 1, mapping, used, profile) {
            return true;
        }
        mapping[v] = usize::MAX;
        used[w] = false;
    }
    false
}

pub fn are_isomorphic(a: &Digraph, b: &Digraph) -> bool {
    find_isomorphism(a, b).is_some()
}
