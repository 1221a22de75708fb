//! Brute-force oracles, written without the library's algorithms.

#![allow(dead_code)]

use dicrit_core::Digraph;
use rand::Rng;

/// Kahn's algorithm on the subdigraph induced by `keep`.
pub fn acyclic_on(d: &Digraph, keep: &[bool]) -> bool {
    let n = d.n();
    let mut indeg = vec![0usize; n];
    for &(u, v) in d.arcs() {
        if keep[u] && keep[v] {
            indeg[v] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| keep[v] && indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = stack.pop() {
        removed += 1;
        for &(a, b) in d.arcs() {
            if a == u && keep[b] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    stack.push(b);
                }
            }
        }
    }
    removed == keep.iter().filter(|&&k| k).count()
}

/// Whether `colours` (values `1..=k`) is a dicolouring.
pub fn valid_dicolouring(d: &Digraph, colours: &[usize], k: usize) -> bool {
    colours.len() == d.n()
        && colours.iter().all(|&c| (1..=k).contains(&c))
        && (1..=k).all(|c| acyclic_on(d, &colours.iter().map(|&x| x == c).collect::<Vec<_>>()))
}

/// Dichromatic number by trying every assignment.
pub fn brute_chi(d: &Digraph) -> usize {
    let n = d.n();
    for k in 1..=n {
        let total = k.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let colours: Vec<usize> = (0..n)
                .map(|_| {
                    let x = c % k + 1;
                    c /= k;
                    x
                })
                .collect();
            if valid_dicolouring(d, &colours, k) {
                return k;
            }
        }
    }
    n
}

/// Chromatic number of the simple graph on `n` vertices with `edges`.
pub fn brute_chromatic(n: usize, edges: &[(usize, usize)]) -> usize {
    for k in 1..=n.max(1) {
        let total = k.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let colours: Vec<usize> = (0..n)
                .map(|_| {
                    let x = c % k;
                    c /= k;
                    x
                })
                .collect();
            if edges.iter().all(|&(u, v)| colours[u] != colours[v]) {
                return k;
            }
        }
    }
    n
}

/// Largest `#digons + 2 #triangles` over all disjoint families.
pub fn brute_packing(d: &Digraph) -> usize {
    let n = d.n();
    let mut items: Vec<(Vec<usize>, usize)> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if d.has_arc(u, v) && d.has_arc(v, u) {
                items.push((vec![u, v], 1));
                for w in v + 1..n {
                    let dig = |a: usize, b: usize| d.has_arc(a, b) && d.has_arc(b, a);
                    if dig(u, w) && dig(v, w) {
                        items.push((vec![u, v, w], 2));
                    }
                }
            }
        }
    }
    fn best(items: &[(Vec<usize>, usize)], from: usize, used: &mut Vec<bool>) -> usize {
        let mut top = 0;
        for i in from..items.len() {
            let (vs, w) = &items[i];
            if vs.iter().all(|&v| !used[v]) {
                vs.iter().for_each(|&v| used[v] = true);
                top = top.max(w + best(items, i + 1, used));
                vs.iter().for_each(|&v| used[v] = false);
            }
        }
        top
    }
    best(&items, 0, &mut vec![false; n])
}

/// Searches all bijections `f` (pruned only by arcs among assigned vertices).
pub fn perm_isomorphic(a: &Digraph, b: &Digraph) -> bool {
    fn extend(a: &Digraph, b: &Digraph, f: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let v = f.len();
        if v == a.n() {
            return true;
        }
        for w in 0..b.n() {
            if used[w] {
                continue;
            }
            let ok = (0..v).all(|u| a.has_arc(u, v) == b.has_arc(f[u], w) && a.has_arc(v, u) == b.has_arc(w, f[u]))
                && a.has_arc(v, v) == b.has_arc(w, w);
            if ok {
                f.push(w);
                used[w] = true;
                if extend(a, b, f, used) {
                    return true;
                }
                f.pop();
                used[w] = false;
            }
        }
        false
    }
    a.n() == b.n() && a.m() == b.m() && extend(a, b, &mut Vec::new(), &mut vec![false; b.n()])
}

/// Each ordered pair becomes an arc with probability `p`.
pub fn random_digraph(rng: &mut impl Rng, n: usize, p: f64) -> Digraph {
    let arcs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v).filter(|_| rng.gen_bool(p)).collect();
    Digraph::new(n, arcs).unwrap()
}
