//! Immutable digraphs on dense vertex ids `0..n`.
//!
//! A [`Digraph`] never changes after construction. Edits (arc deletion,
//! union, reversal, induced subdigraphs, identifications) build new values,
//! and operations that renumber vertices hand back the relabelling map.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};

pub type Arc = (usize, usize);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    /// Sorted lexicographically, no duplicates, no loops.
    arcs: Vec<Arc>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexProfile {
    pub vertex: usize,
    pub in_degree: usize,
    pub out_degree: usize,
    pub degree: usize,
    /// `|N⁺(v) ∪ N⁻(v)|`
    pub neighbours: usize,
    /// Neighbours `u` such that `[u, v]` is not a digon.
    pub simple_neighbours: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connectivity {
    pub k: usize,
    pub connected: bool,
    /// A separating set of fewer than `k` vertices when `connected` is false.
    pub cutset: Option<Vec<usize>>,
}

impl Digraph {
    /// Builds a digraph, rejecting loops, duplicates and out-of-range ids.
    pub fn new(n: usize, arcs: impl IntoIterator<Item = Arc>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut set = BTreeSet::new();
        for (u, v) in arcs {
            check_vertex(u, n)?;
            check_vertex(v, n)?;
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !set.insert((u, v)) {
                return Err(Error::DuplicateArc(u, v));
            }
        }
        Ok(Self::from_sorted(n, set.into_iter().collect()))
    }

    /// Like [`Digraph::new`] but silently merges duplicates and drops loops.
    pub(crate) fn from_arc_set(n: usize, arcs: impl IntoIterator<Item = Arc>) -> Self {
        assert!(n > 0, "empty digraph");
        let set: BTreeSet<Arc> = arcs.into_iter().filter(|&(u, v)| u != v).collect();
        debug_assert!(set.iter().all(|&(u, v)| u < n && v < n));
        Self::from_sorted(n, set.into_iter().collect())
    }

    fn from_sorted(n: usize, arcs: Vec<Arc>) -> Self {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &arcs {
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        for list in &mut in_adj {
            list.sort_unstable();
        }
        Digraph { n, arcs, out_adj, in_adj }
    }

    /// The bidirected graph on `n` vertices with a digon for every edge.
    pub fn bidirected(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut arcs = Vec::new();
        for (u, v) in edges {
            arcs.push((u, v));
            arcs.push((v, u));
        }
        Self::new(n, arcs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n && self.out_adj[u].binary_search(&v).is_ok()
    }

    pub fn has_digon(&self, u: usize, v: usize) -> bool {
        self.has_arc(u, v) && self.has_arc(v, u)
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_arc(u, v) || self.has_arc(v, u)
    }

    pub fn out_neighbours(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbours(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    /// `N(v) = N⁺(v) ∪ N⁻(v)`, sorted.
    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut all: Vec<usize> = self.out_adj[v].iter().chain(&self.in_adj[v]).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.out_degree(v) + self.in_degree(v)
    }

    pub fn digon_partners(&self, v: usize) -> Vec<usize> {
        self.out_adj[v].iter().copied().filter(|&u| self.has_arc(u, v)).collect()
    }

    /// All digons `[u, v]` with `u < v`, in lexicographic order.
    pub fn digons(&self) -> Vec<(usize, usize)> {
        self.arcs.iter().copied().filter(|&(u, v)| u < v && self.has_arc(v, u)).collect()
    }

    pub fn is_bidirected(&self) -> bool {
        self.arcs.iter().all(|&(u, v)| self.has_arc(v, u))
    }

    pub fn is_oriented(&self) -> bool {
        self.arcs.iter().all(|&(u, v)| !self.has_arc(v, u))
    }

    pub fn profiles(&self) -> Vec<VertexProfile> {
        self.vertices()
            .map(|v| {
                let neighbours = self.neighbours(v);
                let simple_neighbours = neighbours.iter().copied().filter(|&u| !self.has_digon(u, v)).collect();
                VertexProfile {
                    vertex: v,
                    in_degree: self.in_degree(v),
                    out_degree: self.out_degree(v),
                    degree: self.degree(v),
                    neighbours: neighbours.len(),
                    simple_neighbours,
                }
            })
            .collect()
    }

    pub fn without_arcs(&self, removed: &[Arc]) -> Digraph {
        let removed: BTreeSet<Arc> = removed.iter().copied().collect();
        Self::from_sorted(self.n, self.arcs.iter().copied().filter(|a| !removed.contains(a)).collect())
    }

    pub fn without_arc(&self, arc: Arc) -> Digraph {
        self.without_arcs(&[arc])
    }

    pub fn without_digon(&self, u: usize, v: usize) -> Digraph {
        self.without_arcs(&[(u, v), (v, u)])
    }

    /// `D ∪ F`; arcs already present are kept once.
    pub fn with_arcs(&self, added: &[Arc]) -> Result<Digraph> {
        for &(u, v) in added {
            check_vertex(u, self.n)?;
            check_vertex(v, self.n)?;
            if u == v {
                return Err(Error::SelfLoop(u));
            }
        }
        Ok(Self::from_arc_set(self.n, self.arcs.iter().chain(added).copied()))
    }

    pub fn reversed(&self) -> Digraph {
        Self::from_arc_set(self.n, self.arcs.iter().map(|&(u, v)| (v, u)))
    }

    /// Applies `perm` (old id -> new id), which must be a permutation of `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Digraph {
        assert_eq!(perm.len(), self.n);
        Self::from_arc_set(self.n, self.arcs.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Induced subdigraph on `subset`, relabelled `0..|S|` in increasing
    /// order of the original ids. Returns the new-to-old map.
    pub fn induced(&self, subset: &[usize]) -> Result<(Digraph, Vec<usize>)> {
        let mut keep: Vec<usize> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::Empty);
        }
        for &v in &keep {
            check_vertex(v, self.n)?;
        }
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i;
        }
        let arcs = self
            .arcs
            .iter()
            .filter(|&&(u, v)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
            .map(|&(u, v)| (new_id[u], new_id[v]));
        Ok((Self::from_arc_set(keep.len(), arcs), keep))
    }

    /// `D - X`.
    pub fn remove_vertices(&self, removed: &[usize]) -> Result<(Digraph, Vec<usize>)> {
        let removed: BTreeSet<usize> = removed.iter().copied().collect();
        let keep: Vec<usize> = self.vertices().filter(|v| !removed.contains(v)).collect();
        self.induced(&keep)
    }

    /// Vertices of `R` with an in- or out-neighbour outside `R`.
    pub fn boundary(&self, region: &[usize]) -> Result<Vec<usize>> {
        let inside = self.membership(region)?;
        if region.is_empty() || inside.iter().all(|&b| b) {
            return precondition("boundary needs a nonempty proper vertex subset");
        }
        Ok(self
            .vertices()
            .filter(|&v| inside[v])
            .filter(|&v| self.out_adj[v].iter().chain(&self.in_adj[v]).any(|&u| !inside[u]))
            .collect())
    }

    pub(crate) fn membership(&self, subset: &[usize]) -> Result<Vec<bool>> {
        let mut inside = vec![false; self.n];
        for &v in subset {
            check_vertex(v, self.n)?;
            inside[v] = true;
        }
        Ok(inside)
    }

    /// Contracts each block to a single vertex. Arcs inside a block vanish,
    /// parallel arcs merge. Vertices are renumbered by the smallest original
    /// id of their block; the returned map sends old ids to new ids.
    pub fn identify(&self, blocks: &[Vec<usize>]) -> Result<(Digraph, Vec<usize>)> {
        let mut rep: Vec<usize> = self.vertices().collect();
        let mut seen = vec![false; self.n];
        for block in blocks {
            if block.is_empty() {
                return precondition("identification blocks must be nonempty");
            }
            let leader = *block.iter().min().unwrap();
            for &v in block {
                check_vertex(v, self.n)?;
                if seen[v] {
                    return precondition(format!("vertex {v} appears in two blocks"));
                }
                seen[v] = true;
                rep[v] = leader;
            }
        }
        let mut leaders: Vec<usize> = rep.clone();
        leaders.sort_unstable();
        leaders.dedup();
        let mut index = vec![0; self.n];
        for (i, &l) in leaders.iter().enumerate() {
            index[l] = i;
        }
        let map: Vec<usize> = self.vertices().map(|v| index[rep[v]]).collect();
        let arcs = self.arcs.iter().map(|&(u, v)| (map[u], map[v]));
        Ok((Self::from_arc_set(leaders.len(), arcs), map))
    }

    /// Weak connectivity of the subdigraph induced by `alive`.
    pub(crate) fn weakly_connected_within(&self, alive: &[bool]) -> bool {
        self.components_within(alive).len() <= 1
    }

    /// Weak components of the subdigraph induced by `alive`, each sorted,
    /// ordered by smallest vertex.
    pub fn components_within(&self, alive: &[bool]) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in self.vertices().filter(|&v| alive[v]) {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut head = 0;
            while head < members.len() {
                let v = members[head];
                head += 1;
                for &u in self.out_adj[v].iter().chain(&self.in_adj[v]) {
                    if alive[u] && comp[u] == usize::MAX {
                        comp[u] = id;
                        members.push(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.weakly_connected_within(&vec![true; self.n])
    }

    /// Underlying-graph `k`-connectivity for `k ∈ {2, 3}` by removing every
    /// vertex set of size below `k` and testing reachability.
    pub fn is_k_connected(&self, k: usize) -> Result<Connectivity> {
        if !(2..=3).contains(&k) {
            return precondition("connectivity is only evaluated for k = 2 or 3");
        }
        if self.n <= k {
            return precondition(format!("k-connectivity needs more than {k} vertices"));
        }
        let mut alive = vec![true; self.n];
        if !self.weakly_connected_within(&alive) {
            return Ok(Connectivity { k, connected: false, cutset: Some(Vec::new()) });
        }
        for v in self.vertices() {
            alive[v] = false;
            if !self.weakly_connected_within(&alive) {
                return Ok(Connectivity { k, connected: false, cutset: Some(vec![v]) });
            }
            alive[v] = true;
        }
        if k == 3 {
            for u in self.vertices() {
                for v in u + 1..self.n {
                    alive[u] = false;
                    alive[v] = false;
                    let ok = self.weakly_connected_within(&alive);
                    alive[u] = true;
                    alive[v] = true;
                    if !ok {
                        return Ok(Connectivity { k, connected: false, cutset: Some(vec![u, v]) });
                    }
                }
            }
        }
        Ok(Connectivity { k, connected: true, cutset: None })
    }

    /// Canonical DG-v1 text: header line, then one `u v` line per arc in
    /// lexicographic order, each line newline-terminated.
    pub fn to_dg(&self) -> String {
        let mut text = format!("n {} m {}\n", self.n, self.m());
        for &(u, v) in &self.arcs {
            text.push_str(&format!("{u} {v}\n"));
        }
        text
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_dg(text)
    }
}

fn check_vertex(v: usize, n: usize) -> Result<()> {
    if v >= n {
        Err(Error::VertexOutOfRange { vertex: v, n })
    } else {
        Ok(())
    }
}

fn parse_dg(text: &str) -> Result<Digraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let bad_header = || Error::Parse { line: hline, msg: format!("expected `n <N> m <M>`, got {header:?}") };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "n" || fields[2] != "m" {
        return Err(bad_header());
    }
    let n: usize = fields[1].parse().map_err(|_| bad_header())?;
    let m: usize = fields[3].parse().map_err(|_| bad_header())?;
    if n == 0 {
        return Err(Error::Parse { line: hline, msg: "digraph must have at least one vertex".into() });
    }

    let mut seen = BTreeSet::new();
    let mut last_line = hline;
    for (line, body) in lines {
        last_line = line;
        let err = |msg: String| Error::Parse { line, msg };
        let parts: Vec<&str> = body.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(err(format!("expected `<u> <v>`, got {body:?}")));
        }
        let u: usize = parts[0].parse().map_err(|_| err(format!("bad vertex id {:?}", parts[0])))?;
        let v: usize = parts[1].parse().map_err(|_| err(format!("bad vertex id {:?}", parts[1])))?;
        if u >= n || v >= n {
            return Err(err(format!("vertex index out of range in arc {u} {v} (n = {n})")));
        }
        if u == v {
            return Err(err(format!("self-loop at vertex {u}")));
        }
        if !seen.insert((u, v)) {
            return Err(err(format!("duplicate arc {u} {v}")));
        }
    }
    if seen.len() != m {
        return Err(Error::Parse { line: last_line, msg: format!("header declares {m} arcs but {} were given", seen.len()) });
    }
    Ok(Digraph::from_sorted(n, seen.into_iter().collect()))
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, arcs={:?})", self.n, self.arcs)
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dg())
    }
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_dg())
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_dg(&text).map_err(serde::de::Error::custom)
    }
}

/// Small named digraphs used throughout tests and the CLI.
pub mod families {
    use super::Digraph;

    /// `K_n↔`
    pub fn bidirected_complete(n: usize) -> Digraph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Digraph::bidirected(n, edges).expect("valid complete graph")
    }

    /// Directed cycle `0 → 1 → … → n-1 → 0`, `n ≥ 2`.
    pub fn directed_cycle(n: usize) -> Digraph {
        Digraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid directed cycle")
    }

    /// `C_n↔`, `n ≥ 3`.
    pub fn bidirected_cycle(n: usize) -> Digraph {
        Digraph::bidirected(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid bidirected cycle")
    }

    pub fn bidirected_path(n: usize) -> Digraph {
        Digraph::bidirected(n, (1..n).map(|i| (i - 1, i))).expect("valid bidirected path")
    }
}
