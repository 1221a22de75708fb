//! 4-Ore digraphs: Ore-composition, composition traces, seeded generation,
//! recognition by decomposition, and the small structures found inside them
//! (diamonds, emeralds, Ore-collapsible subdigraphs, vertex splits).
//!
//! Labelling of a composition: the digon side keeps its ids `0..n₁`, the
//! split side minus `z` follows in increasing order of its old ids.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{families, Arc, Digraph};
use crate::error::{precondition, Error, Result};
use crate::iso::{canonical_form, CanonicalKey};

/// A composition tree. A leaf is `K₄↔` on `0..4`. A node composes the
/// replays of its two children and then renames vertices by `relabel`
/// (composition id -> final id) when present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OreTrace {
    Leaf,
    Node {
        digon_side: Box<OreTrace>,
        split_side: Box<OreTrace>,
        /// The replaced digon, in digon-side ids.
        digon: (usize, usize),
        /// The split vertex, in split-side ids.
        split: usize,
        z1: Vec<usize>,
        z2: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        relabel: Option<Vec<usize>>,
        /// Set when the base `K₄` of the digon side is kept on the digon side
        /// throughout its history.
        j_preserving: bool,
    },
}

impl OreTrace {
    pub fn node(
        digon_side: OreTrace,
        split_side: OreTrace,
        digon: (usize, usize),
        split: usize,
        z1: Vec<usize>,
        z2: Vec<usize>,
        j_preserving: bool,
    ) -> Self {
        OreTrace::Node {
            digon_side: Box::new(digon_side),
            split_side: Box::new(split_side),
            digon,
            split,
            z1,
            z2,
            relabel: None,
            j_preserving,
        }
    }

    pub fn n(&self) -> usize {
        3 * self.leaves() + 1
    }

    pub fn leaves(&self) -> usize {
        match self {
            OreTrace::Leaf => 1,
            OreTrace::Node { digon_side, split_side, .. } => digon_side.leaves() + split_side.leaves(),
        }
    }

    /// Rebuilds the digraph this trace describes.
    pub fn replay(&self) -> Result<Digraph> {
        match self {
            OreTrace::Leaf => Ok(families::bidirected_complete(4)),
            OreTrace::Node { digon_side, split_side, digon, split, z1, z2, relabel, .. } => {
                let d1 = digon_side.replay()?;
                let d2 = split_side.replay()?;
                let d = ore_compose(&d1, *digon, &d2, *split, z1, z2)?;
                match relabel {
                    None => Ok(d),
                    Some(map) => {
                        check_permutation(map, d.n())?;
                        Ok(d.permuted(map))
                    }
                }
            }
        }
    }

    /// Renames the vertices of the described digraph by `map` (old -> new).
    pub fn relabelled(self, map: &[usize]) -> OreTrace {
        match self {
            OreTrace::Leaf => OreTrace::Leaf,
            OreTrace::Node { digon_side, split_side, digon, split, z1, z2, relabel, j_preserving } => {
                let composed = match relabel {
                    None => map.to_vec(),
                    Some(inner) => inner.iter().map(|&v| map[v]).collect(),
                };
                let identity = composed.iter().enumerate().all(|(i, &v)| i == v);
                OreTrace::Node {
                    digon_side,
                    split_side,
                    digon,
                    split,
                    z1,
                    z2,
                    relabel: (!identity).then_some(composed),
                    j_preserving,
                }
            }
        }
    }

    /// Image of the leftmost leaf's `K₄` in the described digraph.
    pub fn base_clique(&self) -> [usize; 4] {
        match self {
            OreTrace::Leaf => [0, 1, 2, 3],
            OreTrace::Node { digon_side, relabel, .. } => {
                let mut j = digon_side.base_clique();
                if let Some(map) = relabel {
                    j = j.map(|v| map[v]);
                }
                j.sort_unstable();
                j
            }
        }
    }

    /// True when every node on the leftmost path carries the flag.
    pub fn is_j_preserving(&self) -> bool {
        match self {
            OreTrace::Leaf => true,
            OreTrace::Node { digon_side, j_preserving, .. } => *j_preserving && digon_side.is_j_preserving(),
        }
    }
}

fn check_permutation(map: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if map.len() != n || map.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return precondition("relabel is not a permutation");
    }
    Ok(())
}

/// Ore-composition of `D1` and `D2`: delete the digon `[x, y]` of `D1` and
/// the vertex `z` of `D2`, then join `x` by digons to `Z1` and `y` to `Z2`.
pub fn ore_compose(d1: &Digraph, xy: (usize, usize), d2: &Digraph, z: usize, z1: &[usize], z2: &[usize]) -> Result<Digraph> {
    if !d1.is_bidirected() || !d2.is_bidirected() {
        return precondition("Ore-composition needs bidirected inputs");
    }
    let (x, y) = xy;
    if x >= d1.n() || y >= d1.n() || !d1.has_digon(x, y) {
        return precondition(format!("[{x},{y}] is not a digon of the digon side"));
    }
    if z >= d2.n() {
        return Err(Error::VertexOutOfRange { vertex: z, n: d2.n() });
    }
    let mut parts: Vec<usize> = z1.iter().chain(z2).copied().collect();
    parts.sort_unstable();
    let disjoint = parts.windows(2).all(|w| w[0] != w[1]);
    if z1.is_empty() || z2.is_empty() || !disjoint || parts != d2.neighbours(z) {
        return precondition(format!("(Z1, Z2) is not a partition of N({z}) into nonempty sets"));
    }
    let n1 = d1.n();
    let lift = |w: usize| n1 + w - usize::from(w > z);
    let mut arcs: Vec<Arc> = d1.arcs().iter().copied().filter(|&a| a != (x, y) && a != (y, x)).collect();
    arcs.extend(d2.arcs().iter().filter(|&&(u, v)| u != z && v != z).map(|&(u, v)| (lift(u), lift(v))));
    for (end, part) in [(x, z1), (y, z2)] {
        for &w in part {
            arcs.push((end, lift(w)));
            arcs.push((lift(w), end));
        }
    }
    Ok(Digraph::from_arc_set(n1 + d2.n() - 1, arcs))
}

fn check_order(n: usize) -> Result<()> {
    if n < 4 || n % 3 != 1 {
        return precondition(format!("no 4-Ore digraph has {n} vertices (need n = 4, 7, 10, ...)"));
    }
    Ok(())
}

/// A seeded random 4-Ore digraph on exactly `n_target` vertices with its
/// trace. With `j_preserving`, the current digraph is always the digon side
/// and keeps the base `K₄` on `0..4`; otherwise the shape is split at random
/// and the result is randomly relabelled.
pub fn generate_4ore(n_target: usize, seed: u64, j_preserving: bool) -> Result<(Digraph, OreTrace)> {
    check_order(n_target)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if !j_preserving {
        let (d, trace) = random_ore(n_target, &mut rng);
        let mut perm: Vec<usize> = (0..n_target).collect();
        perm.shuffle(&mut rng);
        return Ok((d.permuted(&perm), trace.relabelled(&perm)));
    }
    let mut d = families::bidirected_complete(4);
    let mut trace = OreTrace::Leaf;
    while d.n() < n_target {
        let n2 = 4 + 3 * rng.gen_range(0..=(n_target - d.n()) / 3 - 1);
        let (d2, t2) = random_ore(n2, &mut rng);
        let (next, node) = random_composition(&d, trace, &d2, t2, true, &mut rng);
        d = next;
        trace = node;
    }
    Ok((d, trace))
}

fn random_ore(n: usize, rng: &mut ChaCha8Rng) -> (Digraph, OreTrace) {
    if n == 4 {
        return (families::bidirected_complete(4), OreTrace::Leaf);
    }
    let n1 = 4 + 3 * rng.gen_range(0..(n - 4) / 3);
    let (d1, t1) = random_ore(n1, rng);
    let (d2, t2) = random_ore(n + 1 - n1, rng);
    random_composition(&d1, t1, &d2, t2, false, rng)
}

fn random_composition(
    d1: &Digraph,
    t1: OreTrace,
    d2: &Digraph,
    t2: OreTrace,
    j_preserving: bool,
    rng: &mut ChaCha8Rng,
) -> (Digraph, OreTrace) {
    let digons = d1.digons();
    let xy = digons[rng.gen_range(0..digons.len())];
    let z = rng.gen_range(0..d2.n());
    let neighbours = d2.neighbours(z);
    let (z1, z2) = loop {
        let (a, b): (Vec<usize>, Vec<usize>) = neighbours.iter().partition(|_| rng.gen_bool(0.5));
        if !a.is_empty() && !b.is_empty() {
            break (a, b);
        }
    };
    let d = ore_compose(d1, xy, d2, z, &z1, &z2).expect("valid random composition");
    (d, OreTrace::node(t1, t2, xy, z, z1, z2, j_preserving))
}

/// Decides 4-Ore membership, returning a trace whose replay equals `D`.
/// Candidate decompositions are tried in lexicographic order of the
/// nonadjacent pair `{x, y}`; `budget` caps the number tried.
pub fn is_4ore(d: &Digraph, budget: u64) -> Result<Option<OreTrace>> {
    let mut search = Recognizer { memo: HashMap::new(), tried: 0, budget };
    search.recognise(d)
}

struct Recognizer {
    memo: HashMap<CanonicalKey, Option<OreTrace>>,
    tried: u64,
    budget: u64,
}

impl Recognizer {
    fn recognise(&mut self, d: &Digraph) -> Result<Option<OreTrace>> {
        let n = d.n();
        if !d.is_bidirected() || n < 4 || n % 3 != 1 || 3 * d.m() + 4 != 10 * n {
            return Ok(None);
        }
        if n == 4 {
            return Ok(Some(OreTrace::Leaf));
        }
        let Some(form) = canonical_form(d) else {
            return self.decompose(d);
        };
        let found = match self.memo.get(&form.key) {
            Some(hit) => hit.clone(),
            None => {
                let canon = d.permuted(&form.perm);
                let found = self.decompose(&canon)?;
                self.memo.insert(form.key, found.clone());
                found
            }
        };
        let mut back = vec![0; n];
        for (old, &new) in form.perm.iter().enumerate() {
            back[new] = old;
        }
        Ok(found.map(|t| t.relabelled(&back)))
    }

    fn decompose(&mut self, d: &Digraph) -> Result<Option<OreTrace>> {
        let n = d.n();
        for x in 0..n {
            for y in x + 1..n {
                if d.adjacent(x, y) {
                    continue;
                }
                let mut alive = vec![true; n];
                alive[x] = false;
                alive[y] = false;
                let components = d.components_within(&alive);
                if components.len() < 2 {
                    continue;
                }
                for c in &components {
                    self.tried += 1;
                    if self.tried > self.budget {
                        return Err(Error::BudgetExceeded(self.budget));
                    }
                    if let Some(trace) = self.try_split(d, x, y, c)? {
                        return Ok(Some(trace));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Treats component `c` of `D - {x, y}` as the split side minus `z`.
    fn try_split(&mut self, d: &Digraph, x: usize, y: usize, c: &[usize]) -> Result<Option<OreTrace>> {
        let n = d.n();
        let mut inside = vec![false; n];
        for &v in c {
            inside[v] = true;
        }
        let z1: Vec<usize> = d.neighbours(x).into_iter().filter(|&w| inside[w]).collect();
        let z2: Vec<usize> = d.neighbours(y).into_iter().filter(|&w| inside[w]).collect();
        if z1.is_empty() || z2.is_empty() || z1.iter().any(|w| z2.contains(w)) {
            return Ok(None);
        }
        let rest: Vec<usize> = (0..n).filter(|&v| !inside[v]).collect();
        let n1 = rest.len();
        let n2 = c.len() + 1;
        if n1 % 3 != 1 || n2 % 3 != 1 {
            return Ok(None);
        }
        let (core1, _) = d.induced(&rest)?;
        let xi = rest.binary_search(&x).unwrap();
        let yi = rest.binary_search(&y).unwrap();
        let d1 = core1.with_arcs(&[(xi, yi), (yi, xi)])?;
        let (core2, _) = d.induced(c)?;
        let z = c.len();
        let local = |w: &usize| c.binary_search(w).unwrap();
        let z1l: Vec<usize> = z1.iter().map(local).collect();
        let z2l: Vec<usize> = z2.iter().map(local).collect();
        let mut arcs: Vec<Arc> = core2.arcs().to_vec();
        for &w in z1l.iter().chain(&z2l) {
            arcs.push((z, w));
            arcs.push((w, z));
        }
        let d2 = Digraph::from_arc_set(n2, arcs);
        if 3 * d1.m() + 4 != 10 * n1 || 3 * d2.m() + 4 != 10 * n2 {
            return Ok(None);
        }
        let Some(t1) = self.recognise(&d1)? else { return Ok(None) };
        let Some(t2) = self.recognise(&d2)? else { return Ok(None) };
        let mut z1s = z1l;
        let mut z2s = z2l;
        z1s.sort_unstable();
        z2s.sort_unstable();
        let map: Vec<usize> = rest.iter().chain(c).copied().collect();
        Ok(Some(OreTrace::node(t1, t2, (xi, yi), z, z1s, z2s, false).relabelled(&map)))
    }
}

/// Vertex sets `S` with `D⟨S⟩ = K₄↔` minus one digon `[u, v]` whose two
/// other vertices have degree 6 in `D`. Each set is sorted.
pub fn find_diamonds(d: &Digraph) -> Vec<[usize; 4]> {
    let mut found = Vec::new();
    for a in d.vertices() {
        if d.degree(a) != 6 {
            continue;
        }
        for b in d.digon_partners(a).into_iter().filter(|&b| b > a && d.degree(b) == 6) {
            // u, v are common digon partners of a and b that are not adjacent
            let common: Vec<usize> = d.digon_partners(a).into_iter().filter(|&w| w != b && d.has_digon(b, w)).collect();
            for (i, &u) in common.iter().enumerate() {
                for &v in &common[i + 1..] {
                    if !d.adjacent(u, v) {
                        let mut s = [a, b, u, v];
                        s.sort_unstable();
                        found.push(s);
                    }
                }
            }
        }
    }
    found.sort_unstable();
    found.dedup();
    found
}

/// Bidirected triangles whose vertices all have degree 6 in `D`.
pub fn find_emeralds(d: &Digraph) -> Vec<[usize; 3]> {
    let mut found = Vec::new();
    for a in d.vertices().filter(|&v| d.degree(v) == 6) {
        let partners: Vec<usize> = d.digon_partners(a).into_iter().filter(|&w| w > a && d.degree(w) == 6).collect();
        for (i, &b) in partners.iter().enumerate() {
            for &c in &partners[i + 1..] {
                if d.has_digon(b, c) {
                    found.push([a, b, c]);
                }
            }
        }
    }
    found
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OreCollapsible {
    pub region: Vec<usize>,
    pub u: usize,
    pub v: usize,
}

/// Every `R` with `n(R) <= size_cap`, boundary exactly `{u, v}` and
/// `D⟨R⟩ ∪ [u, v]` 4-Ore.
pub fn find_ore_collapsible(d: &Digraph, size_cap: usize, budget: u64) -> Result<Vec<OreCollapsible>> {
    let mut found = Vec::new();
    if !d.digons().is_empty() {
        let top = size_cap.min(d.n() - 1);
        for size in (4..=top).filter(|s| s % 3 == 1) {
            let mut subset: Vec<usize> = (0..size).collect();
            loop {
                if let Some(hit) = collapsible_at(d, &subset, budget)? {
                    found.push(hit);
                }
                if !next_combination(&mut subset, d.n()) {
                    break;
                }
            }
        }
    }
    Ok(found)
}

fn collapsible_at(d: &Digraph, region: &[usize], budget: u64) -> Result<Option<OreCollapsible>> {
    let boundary = d.boundary(region)?;
    let [u, v] = boundary[..] else { return Ok(None) };
    let (r, _) = d.induced(region)?;
    let ui = region.binary_search(&u).unwrap();
    let vi = region.binary_search(&v).unwrap();
    let completed = r.with_arcs(&[(ui, vi), (vi, ui)])?;
    Ok(is_4ore(&completed, budget)?.map(|_| OreCollapsible { region: region.to_vec(), u, v }))
}

/// Advances a sorted `k`-subset of `0..n` to the next one in lexicographic order.
pub(crate) fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for i in (0..k).rev() {
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Replaces `v` by `v₁` (keeping id `v`) and a new last vertex `v₂`, with
/// `N⁺(vᵢ) = N⁺ᵢ` and `N⁻(vᵢ) = N⁻ᵢ`.
pub fn split_vertex(
    d: &Digraph,
    v: usize,
    out_parts: (&[usize], &[usize]),
    in_parts: (&[usize], &[usize]),
) -> Result<Digraph> {
    if v >= d.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: d.n() });
    }
    let partitions = |a: &[usize], b: &[usize], whole: &[usize]| {
        let mut joined: Vec<usize> = a.iter().chain(b).copied().collect();
        joined.sort_unstable();
        joined == whole
    };
    if !partitions(out_parts.0, out_parts.1, d.out_neighbours(v)) {
        return precondition(format!("out-parts do not partition N+({v})"));
    }
    if !partitions(in_parts.0, in_parts.1, d.in_neighbours(v)) {
        return precondition(format!("in-parts do not partition N-({v})"));
    }
    let v2 = d.n();
    let mut arcs: Vec<Arc> = d.arcs().iter().copied().filter(|&(a, b)| a != v && b != v).collect();
    arcs.extend(out_parts.0.iter().map(|&w| (v, w)));
    arcs.extend(out_parts.1.iter().map(|&w| (v2, w)));
    arcs.extend(in_parts.0.iter().map(|&w| (w, v)));
    arcs.extend(in_parts.1.iter().map(|&w| (w, v2)));
    Ok(Digraph::from_arc_set(d.n() + 1, arcs))
}
