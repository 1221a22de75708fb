//! Exhaustive census of `k`-dicritical digraphs on at most five vertices.
//!
//! Every arc set on `n` vertices is enumerated as a bitmask. Colourability
//! uses a subset dynamic programme over acyclic vertex sets, independent of
//! the backtracking solver, and isomorphic copies are merged by minimising
//! the mask over all `n!` relabellings. Records persist as a canonical DG-v1
//! file plus a JSON sidecar and are re-verified by the solver when loaded.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dicolour::is_k_dicritical;
use crate::digraph::{Arc, Digraph};
use crate::error::{precondition, Error, Result};

pub const MAX_CENSUS_N: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub n: usize,
    pub k: usize,
    pub digraph: Digraph,
    pub m: usize,
    pub oriented: bool,
    /// Set once the backtracking solver has confirmed dicriticality.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub n: usize,
    /// Isomorphism classes of `k`-dicritical digraphs of order `n`.
    pub classes: usize,
    /// `d_k(n)`
    pub min_arcs: Option<usize>,
    /// `o_k(n)`
    pub min_arcs_oriented: Option<usize>,
    pub witness: Option<Digraph>,
    pub oriented_witness: Option<Digraph>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusTable {
    pub k: usize,
    pub rows: Vec<CensusRow>,
    pub records: Vec<CensusRecord>,
}

/// All `k`-dicritical digraphs with `n <= n_max`, up to isomorphism.
/// `budget` bounds the number of arc sets enumerated per order.
pub fn census(k: usize, n_max: usize, budget: u64) -> Result<CensusTable> {
    if k < 2 {
        return precondition("dicriticality is defined for k >= 2");
    }
    if n_max > MAX_CENSUS_N {
        return precondition(format!("census is limited to n <= {MAX_CENSUS_N}"));
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for n in 1..=n_max {
        if 1u64 << (n * (n - 1)) > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        let found = dicritical_masks(n, k);
        let digraphs: Vec<Digraph> = found.iter().map(|&mask| mask_to_digraph(n, mask)).collect();
        let min_by = |oriented_only: bool| {
            digraphs.iter().filter(|d| !oriented_only || d.is_oriented()).min_by_key(|d| d.m()).cloned()
        };
        let witness = min_by(false);
        let oriented_witness = min_by(true);
        rows.push(CensusRow {
            n,
            classes: digraphs.len(),
            min_arcs: witness.as_ref().map(Digraph::m),
            min_arcs_oriented: oriented_witness.as_ref().map(Digraph::m),
            witness,
            oriented_witness,
        });
        records.extend(digraphs.into_iter().map(|d| CensusRecord { n, k, m: d.m(), oriented: d.is_oriented(), digraph: d, verified: false }));
    }
    Ok(CensusTable { k, rows, records })
}

fn arc_list(n: usize) -> Vec<Arc> {
    (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect()
}

fn mask_to_digraph(n: usize, mask: u32) -> Digraph {
    let arcs = arc_list(n).into_iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, a)| a);
    Digraph::new(n, arcs).expect("census arcs are valid")
}

/// Canonical masks of the `k`-dicritical digraphs on `n` vertices.
fn dicritical_masks(n: usize, k: usize) -> Vec<u32> {
    let arcs = arc_list(n);
    let perms = permutations(n);
    let total: u32 = 1 << arcs.len();
    let found: BTreeSet<u32> = (0..total)
        .into_par_iter()
        .filter(|&mask| is_dicritical_mask(n, k, &arcs, mask))
        .map(|mask| canonical_mask(n, &arcs, &perms, mask))
        .collect();
    found.into_iter().collect()
}

fn out_sets(n: usize, arcs: &[Arc], mask: u32) -> Vec<u32> {
    let mut out = vec![0u32; n];
    for (i, &(u, v)) in arcs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            out[u] |= 1 << v;
        }
    }
    out
}

fn is_dicritical_mask(n: usize, k: usize, arcs: &[Arc], mask: u32) -> bool {
    let out = out_sets(n, arcs, mask);
    let mut inn = vec![0u32; n];
    for u in 0..n {
        for v in 0..n {
            if out[u] >> v & 1 == 1 {
                inn[v] |= 1 << u;
            }
        }
    }
    // k-dicritical digraphs have minimum in- and out-degree at least k-1
    let min_ok = (0..n).all(|v| out[v].count_ones() as usize >= k - 1 && inn[v].count_ones() as usize >= k - 1);
    if n == 1 || !min_ok || colourable(n, &out, k - 1) {
        return false;
    }
    (0..arcs.len()).filter(|&i| mask >> i & 1 == 1).all(|i| {
        let (u, v) = arcs[i];
        let mut reduced = out.clone();
        reduced[u] &= !(1 << v);
        colourable(n, &reduced, k - 1)
    })
}

/// Whether the vertex set splits into `colours` acyclic sets.
fn colourable(n: usize, out: &[u32], colours: usize) -> bool {
    let mut inn = vec![0u32; n];
    for (u, &targets) in out.iter().enumerate() {
        for v in (0..n).filter(|&v| targets >> v & 1 == 1) {
            inn[v] |= 1 << u;
        }
    }
    let full = (1usize << n) - 1;
    if colours == 1 {
        return is_acyclic_set(&inn, full as u32);
    }
    let acyclic: Vec<bool> = (0..=full).map(|s| is_acyclic_set(&inn, s as u32)).collect();
    // fewest acyclic sets covering each subset
    let mut parts = vec![usize::MAX; full + 1];
    parts[0] = 0;
    for s in 1..=full {
        let low = s & s.wrapping_neg();
        let mut t = s;
        while t > 0 {
            if t & low != 0 && acyclic[t] && parts[s ^ t] != usize::MAX {
                parts[s] = parts[s].min(parts[s ^ t] + 1);
            }
            t = (t - 1) & s;
        }
    }
    parts[full] <= colours
}

/// Peels vertices without in-neighbours inside `s` until nothing is left
/// or nothing can be peeled.
fn is_acyclic_set(inn: &[u32], mut s: u32) -> bool {
    loop {
        let sources = (0..inn.len()).filter(|&v| s >> v & 1 == 1 && inn[v] & s == 0).fold(0u32, |acc, v| acc | 1 << v);
        if sources == 0 {
            return s == 0;
        }
        s &= !sources;
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                extend(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn canonical_mask(n: usize, arcs: &[Arc], perms: &[Vec<usize>], mask: u32) -> u32 {
    let index = |u: usize, v: usize| u * (n - 1) + v - usize::from(v > u);
    perms
        .iter()
        .map(|p| {
            arcs.iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .fold(0u32, |acc, (_, &(u, v))| acc | 1 << index(p[u], p[v]))
        })
        .min()
        .expect("at least one permutation")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Sidecar {
    n: usize,
    k: usize,
    m: usize,
    oriented: bool,
    verified: bool,
    file: String,
}

/// Writes `k{k}-n{n}-{i}.dg` and a `.json` sidecar for each record.
pub fn save_records(dir: &Path, records: &[CensusRecord]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let stem = format!("k{}-n{}-{:04}", r.k, r.n, i);
        let dg = dir.join(format!("{stem}.dg"));
        fs::write(&dg, r.digraph.to_dg())?;
        let sidecar = Sidecar {
            n: r.n,
            k: r.k,
            m: r.m,
            oriented: r.oriented,
            verified: r.verified,
            file: format!("{stem}.dg"),
        };
        fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&sidecar)?)?;
        written.push(dg);
    }
    Ok(written)
}

/// Loads every sidecar in `dir`, re-verifying each digraph as
/// `k`-dicritical. A record that fails is an error, not a skip.
pub fn load_records(dir: &Path, budget: u64) -> Result<Vec<CensusRecord>> {
    let mut sidecars: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    sidecars.retain(|p| p.extension().is_some_and(|e| e == "json"));
    sidecars.sort();
    let mut records = Vec::new();
    for path in sidecars {
        let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(&path)?)?;
        let digraph = Digraph::parse(&fs::read_to_string(dir.join(&sidecar.file))?)?;
        if digraph.n() != sidecar.n || digraph.m() != sidecar.m || digraph.is_oriented() != sidecar.oriented {
            return precondition(format!("{} disagrees with its digraph", path.display()));
        }
        if !is_k_dicritical(&digraph, sidecar.k, budget)?.verdict {
            return precondition(format!("{} is not {}-dicritical", sidecar.file, sidecar.k));
        }
        records.push(CensusRecord { n: sidecar.n, k: sidecar.k, m: sidecar.m, oriented: sidecar.oriented, digraph, verified: true });
    }
    Ok(records)
}
