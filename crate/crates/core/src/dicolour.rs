//! Exact k-dicolourability, dichromatic number and k-dicriticality.
//!
//! The search assigns colours along a static vertex order (decreasing total
//! degree, ties by id). Each colour class is kept as a bitset and a colour is
//! refused for `v` when it would close a directed cycle inside its class,
//! which is a reachability test from `N⁺(v)` back to `N⁻(v)` within the
//! class. Colour `j + 1` is never tried before colour `j` has been used, so
//! the first vertex in the order is pinned to colour 1.
//!
//! Every search counts decision nodes against a budget. Running out is
//! reported as [`Error::BudgetExceeded`], never as a negative answer.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digraph::{Arc, Digraph};
use crate::error::{precondition, Error, Result};

pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// A colour assignment with colours `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Colouring {
    pub k: usize,
    pub colours: Vec<usize>,
}

impl Colouring {
    pub fn new(k: usize, colours: Vec<usize>) -> Self {
        Colouring { k, colours }
    }

    pub fn colour(&self, v: usize) -> usize {
        self.colours[v]
    }

    /// Vertices of each colour class, index `c - 1` for colour `c`.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.k];
        for (v, &c) in self.colours.iter().enumerate() {
            classes[c - 1].push(v);
        }
        classes
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("colouring serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DicolouringCheck {
    pub valid: bool,
    /// A monochromatic directed cycle, listed in order, when `valid` is false.
    pub cycle: Option<Vec<usize>>,
}

/// Checks that every colour class induces an acyclic subdigraph.
pub fn check_dicolouring(d: &Digraph, c: &Colouring) -> Result<DicolouringCheck> {
    if c.colours.len() != d.n() {
        return precondition(format!("colouring covers {} vertices, digraph has {}", c.colours.len(), d.n()));
    }
    if let Some(&bad) = c.colours.iter().find(|&&col| col == 0 || col > c.k) {
        return precondition(format!("colour {bad} outside 1..={}", c.k));
    }
    let cycle = monochromatic_cycle(d, &c.colours);
    Ok(DicolouringCheck { valid: cycle.is_none(), cycle })
}

/// Finds a directed cycle whose vertices all share a colour, by iterative
/// DFS restricted to monochromatic arcs.
fn monochromatic_cycle(d: &Digraph, colours: &[usize]) -> Option<Vec<usize>> {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let n = d.n();
    let mut state = vec![WHITE; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != WHITE {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        state[root] = GREY;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let outs = d.out_neighbours(v);
            if *next < outs.len() {
                let u = outs[*next];
                *next += 1;
                if colours[u] != colours[v] {
                    continue;
                }
                match state[u] {
                    WHITE => {
                        state[u] = GREY;
                        parent[u] = v;
                        stack.push((u, 0));
                    }
                    GREY => {
                        let mut cycle = vec![v];
                        let mut w = v;
                        while w != u {
                            w = parent[w];
                            cycle.push(w);
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[v] = BLACK;
                stack.pop();
            }
        }
    }
    None
}

pub fn is_acyclic(d: &Digraph) -> bool {
    monochromatic_cycle(d, &vec![1; d.n()]).is_none()
}

/// Returns a `k`-dicolouring if one exists.
pub fn is_k_dicolourable(d: &Digraph, k: usize, budget: u64) -> Result<Option<Colouring>> {
    is_k_dicolourable_with(d, k, &[], budget)
}

/// As [`is_k_dicolourable`] with some vertices forced to given colours.
/// Colour symmetry is only exploited when nothing is forced.
pub fn is_k_dicolourable_with(d: &Digraph, k: usize, fixed: &[(usize, usize)], budget: u64) -> Result<Option<Colouring>> {
    let mut search = Search::new(d, k, fixed, budget, None)?;
    search.run()?;
    Ok(search.found.pop())
}

/// Every `k`-dicolouring up to renaming of colours, capped at `limit`.
pub fn all_dicolourings(d: &Digraph, k: usize, budget: u64, limit: usize) -> Result<Vec<Colouring>> {
    let mut search = Search::new(d, k, &[], budget, Some(limit))?;
    search.run()?;
    Ok(search.found)
}

pub fn dichromatic_number(d: &Digraph, budget: u64) -> Result<usize> {
    for k in 1..=d.n() {
        if is_k_dicolourable(d, k, budget)?.is_some() {
            return Ok(k);
        }
    }
    unreachable!("n colours always suffice")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcWitness {
    pub arc: Arc,
    /// A `(k-1)`-dicolouring of `D` minus `arc`.
    pub colouring: Colouring,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CriticalityFailure {
    /// `D` itself has a `(k-1)`-dicolouring.
    Colourable { colouring: Colouring },
    /// Deleting this arc leaves a digraph that still needs `k` colours.
    ArcNotCritical { arc: Arc },
    /// An isolated vertex can be deleted without lowering the dichromatic number.
    IsolatedVertex { vertex: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub digraph: Digraph,
    pub k: usize,
    pub verdict: bool,
    pub witnesses: Vec<ArcWitness>,
    pub failure: Option<CriticalityFailure>,
}

/// Decides whether `D` is `k`-dicritical. Proper subdigraphs are covered
/// by single-arc deletions plus the absence of isolated vertices.
pub fn is_k_dicritical(d: &Digraph, k: usize, budget: u64) -> Result<CriticalityReport> {
    if k < 2 {
        return precondition("dicriticality is defined for k >= 2");
    }
    let report = |verdict, witnesses, failure| CriticalityReport { digraph: d.clone(), k, verdict, witnesses, failure };
    if let Some(colouring) = is_k_dicolourable(d, k - 1, budget)? {
        return Ok(report(false, Vec::new(), Some(CriticalityFailure::Colourable { colouring })));
    }
    if let Some(vertex) = d.vertices().find(|&v| d.degree(v) == 0) {
        return Ok(report(false, Vec::new(), Some(CriticalityFailure::IsolatedVertex { vertex })));
    }
    let outcomes: Vec<Result<Option<Colouring>>> =
        d.arcs().par_iter().map(|&arc| is_k_dicolourable(&d.without_arc(arc), k - 1, budget)).collect();
    let mut witnesses = Vec::with_capacity(d.m());
    for (&arc, outcome) in d.arcs().iter().zip(outcomes) {
        match outcome? {
            Some(colouring) => witnesses.push(ArcWitness { arc, colouring }),
            None => return Ok(report(false, witnesses, Some(CriticalityFailure::ArcNotCritical { arc }))),
        }
    }
    Ok(report(true, witnesses, None))
}

/// Vertex order used by the search: decreasing degree, ties by id.
pub fn search_order(d: &Digraph) -> Vec<usize> {
    let mut order: Vec<usize> = d.vertices().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(d.degree(v)), v));
    order
}

struct Search {
    n: usize,
    k: usize,
    words: usize,
    order: Vec<usize>,
    out_bits: Vec<u64>,
    in_bits: Vec<u64>,
    class_bits: Vec<u64>,
    colour: Vec<usize>,
    fixed: Vec<usize>,
    symmetric: bool,
    nodes: u64,
    budget: u64,
    collect: Option<usize>,
    found: Vec<Colouring>,
    visited: Vec<u64>,
    frontier: Vec<u64>,
    next: Vec<u64>,
}

impl Search {
    fn new(d: &Digraph, k: usize, fixed: &[(usize, usize)], budget: u64, collect: Option<usize>) -> Result<Self> {
        if k == 0 {
            return precondition("k must be at least 1");
        }
        let n = d.n();
        let words = n.div_ceil(64);
        let mut out_bits = vec![0u64; n * words];
        let mut in_bits = vec![0u64; n * words];
        for &(u, v) in d.arcs() {
            out_bits[u * words + v / 64] |= 1 << (v % 64);
            in_bits[v * words + u / 64] |= 1 << (u % 64);
        }
        let mut fixed_colour = vec![0; n];
        for &(v, c) in fixed {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if c == 0 || c > k {
                return precondition(format!("forced colour {c} outside 1..={k}"));
            }
            fixed_colour[v] = c;
        }
        Ok(Search {
            n,
            k,
            words,
            order: search_order(d),
            out_bits,
            in_bits,
            class_bits: vec![0; k * words],
            colour: vec![0; n],
            fixed: fixed_colour,
            symmetric: fixed.is_empty(),
            nodes: 0,
            budget,
            collect,
            found: Vec::new(),
            visited: vec![0; words],
            frontier: vec![0; words],
            next: vec![0; words],
        })
    }

    fn run(&mut self) -> Result<()> {
        self.descend(0, 0)?;
        Ok(())
    }

    /// Returns `true` once the search should stop.
    fn descend(&mut self, depth: usize, used: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        if depth == self.n {
            self.found.push(Colouring::new(self.k, self.colour.clone()));
            return Ok(match self.collect {
                None => true,
                Some(limit) => self.found.len() >= limit,
            });
        }
        let v = self.order[depth];
        let (lo, hi) = match self.fixed[v] {
            0 if self.symmetric => (1, self.k.min(used + 1)),
            0 => (1, self.k),
            c => (c, c),
        };
        for c in lo..=hi {
            if self.closes_cycle(v, c) {
                continue;
            }
            self.set(v, c, true);
            let stop = self.descend(depth + 1, used.max(c))?;
            self.set(v, c, false);
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn set(&mut self, v: usize, c: usize, on: bool) {
        let word = &mut self.class_bits[(c - 1) * self.words + v / 64];
        if on {
            *word |= 1 << (v % 64);
            self.colour[v] = c;
        } else {
            *word &= !(1 << (v % 64));
            self.colour[v] = 0;
        }
    }

    /// Would putting `v` into class `c` create a directed cycle there?
    fn closes_cycle(&mut self, v: usize, c: usize) -> bool {
        let w = self.words;
        let class = &self.class_bits[(c - 1) * w..c * w];
        let outs = &self.out_bits[v * w..(v + 1) * w];
        let ins = &self.in_bits[v * w..(v + 1) * w];
        let mut any = false;
        for i in 0..w {
            self.visited[i] = outs[i] & class[i];
            self.frontier[i] = self.visited[i];
            any |= self.visited[i] != 0;
        }
        while any {
            if (0..w).any(|i| self.visited[i] & ins[i] != 0) {
                return true;
            }
            self.next.iter_mut().for_each(|x| *x = 0);
            for i in 0..w {
                let mut bits = self.frontier[i];
                while bits != 0 {
                    let u = i * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let row = &self.out_bits[u * w..(u + 1) * w];
                    for j in 0..w {
                        self.next[j] |= row[j];
                    }
                }
            }
            any = false;
            for i in 0..w {
                let fresh = self.next[i] & class[i] & !self.visited[i];
                self.frontier[i] = fresh;
                self.visited[i] |= fresh;
                any |= fresh != 0;
            }
        }
        false
    }
}
