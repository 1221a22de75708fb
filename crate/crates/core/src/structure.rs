//! Structural tools for 4-dicritical digraphs: chelou arcs, the digraph
//! `D₆` of degree-6 digon vertices, `8⁺`-valencies, the discharging rules
//! R1 to R3, `φ`-identification, dicritical extensions and collapsibility.

use serde::{Deserialize, Serialize};

use crate::dicolour::{all_dicolourings, check_dicolouring, is_k_dicolourable, Colouring};
use crate::digraph::{Arc, Digraph};
use crate::error::{precondition, Result};
use crate::potential::PotentialParams;
use crate::rational::{self, int, rat, Rational};

/// Arcs `xy` with `yx ∉ A`, `d⁺(x) = 3`, `d⁻(y) = 3` and some
/// `z ∈ N⁻(y) \ N⁺(y)` other than `x`.
pub fn out_chelou_arcs(d: &Digraph) -> Vec<Arc> {
    d.arcs()
        .iter()
        .copied()
        .filter(|&(x, y)| {
            !d.has_arc(y, x)
                && d.out_degree(x) == 3
                && d.in_degree(y) == 3
                && d.in_neighbours(y).iter().any(|&z| z != x && !d.has_arc(y, z))
        })
        .collect()
}

/// `xy` is in-chelou when `yx` is out-chelou in the reverse of `D`.
pub fn in_chelou_arcs(d: &Digraph) -> Vec<Arc> {
    let mut arcs: Vec<Arc> = out_chelou_arcs(&d.reversed()).into_iter().map(|(y, x)| (x, y)).collect();
    arcs.sort_unstable();
    arcs
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChelouArcs {
    pub out_chelou: Vec<Arc>,
    pub in_chelou: Vec<Arc>,
}

pub fn find_chelou_arcs(d: &Digraph) -> ChelouArcs {
    ChelouArcs { out_chelou: out_chelou_arcs(d), in_chelou: in_chelou_arcs(d) }
}

/// Vertices of degree 6 incident to at least one digon.
pub fn d6_vertices(d: &Digraph) -> Vec<usize> {
    d.vertices().filter(|&v| d.degree(v) == 6 && !d.digon_partners(v).is_empty()).collect()
}

/// Number of arcs between `v` and vertices of degree at least 8.
pub fn valency8(d: &Digraph, v: usize) -> usize {
    let heavy = |u: &&usize| d.degree(**u) >= 8;
    d.out_neighbours(v).iter().filter(heavy).count() + d.in_neighbours(v).iter().filter(heavy).count()
}

/// Sum of `ν(u)` over the neighbours `u` of `v` with degree at least 8.
pub fn neighbourhood_valency(d: &Digraph, v: usize) -> Result<usize> {
    if v >= d.n() || d.degree(v) != 6 || d.digon_partners(v).is_empty() {
        return precondition(format!("vertex {v} is not in D6"));
    }
    Ok(d.neighbours(v).into_iter().filter(|&u| d.degree(u) >= 8).map(|u| valency8(d, u)).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum D6Class {
    Singleton,
    /// A single digon.
    Path2,
    /// A bidirected path on three vertices.
    Path3,
    /// A bidirected star with three leaves.
    Star4,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct D6Component {
    pub vertices: Vec<usize>,
    pub class: D6Class,
    /// For `path3` and `star4`: whether every non-central vertex has
    /// neighbourhood valency at least 4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valency_condition: Option<bool>,
}

/// Weak components of `D₆` with their shape.
pub fn d6_components(d: &Digraph) -> Vec<D6Component> {
    let mut alive = vec![false; d.n()];
    for v in d6_vertices(d) {
        alive[v] = true;
    }
    d.components_within(&alive)
        .into_iter()
        .map(|vertices| {
            let (class, centre) = classify(d, &vertices);
            let valency_condition = matches!(class, D6Class::Path3 | D6Class::Star4).then(|| {
                vertices
                    .iter()
                    .filter(|&&v| Some(v) != centre)
                    .all(|&v| neighbourhood_valency(d, v).is_ok_and(|nu| nu >= 4))
            });
            D6Component { vertices, class, valency_condition }
        })
        .collect()
}

fn classify(d: &Digraph, c: &[usize]) -> (D6Class, Option<usize>) {
    let size = c.len();
    let mut pairs = 0;
    let mut arcs = 0;
    for (i, &u) in c.iter().enumerate() {
        for &v in &c[i + 1..] {
            let count = usize::from(d.has_arc(u, v)) + usize::from(d.has_arc(v, u));
            arcs += count;
            pairs += usize::from(count > 0);
        }
    }
    let all_digons = arcs == 2 * pairs;
    let degree_in = |v: usize| c.iter().filter(|&&u| d.adjacent(u, v)).count();
    let centre = c.iter().copied().find(|&v| degree_in(v) == size - 1);
    match (size, pairs, all_digons) {
        (1, _, _) => (D6Class::Singleton, None),
        (2, 1, true) => (D6Class::Path2, None),
        (3, 2, true) => (D6Class::Path3, centre),
        (4, 3, true) if centre.is_some() => (D6Class::Star4, centre),
        _ => (D6Class::Other, None),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub rule: Rule,
    pub source: usize,
    pub target: usize,
    #[serde(serialize_with = "rational::serialize", deserialize_with = "rational::deserialize")]
    pub amount: Rational,
    /// R2 along an arc that is not part of a digon.
    #[serde(default)]
    pub simple_arc: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCharge {
    pub vertex: usize,
    #[serde(serialize_with = "rational::serialize", deserialize_with = "rational::deserialize")]
    pub sigma: Rational,
    #[serde(serialize_with = "rational::serialize", deserialize_with = "rational::deserialize")]
    pub initial: Rational,
    #[serde(rename = "final", serialize_with = "rational::serialize", deserialize_with = "rational::deserialize")]
    pub final_charge: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeLedger {
    pub params: PotentialParams,
    pub vertices: Vec<VertexCharge>,
    pub transfers: Vec<Transfer>,
    /// R2 transfers skipped because `d(u) = ν(u)` at the recipient `u`.
    pub inapplicable: Vec<Arc>,
}

impl ChargeLedger {
    pub fn total_initial(&self) -> Rational {
        self.vertices.iter().map(|c| &c.initial).sum()
    }

    pub fn total_final(&self) -> Rational {
        self.vertices.iter().map(|c| &c.final_charge).sum()
    }

    pub fn total_sigma(&self) -> Rational {
        self.vertices.iter().map(|c| &c.sigma).sum()
    }
}

/// Initial charges and the transfers of rules R1 to R3.
pub fn discharge(d: &Digraph, p: &PotentialParams) -> ChargeLedger {
    let n = d.n();
    let mut sigma = vec![int(0); n];
    for comp in d6_components(d).into_iter().filter(|c| c.vertices.len() >= 2) {
        let share = &p.delta / int(comp.vertices.len() as i64);
        for &v in &comp.vertices {
            sigma[v] = share.clone();
        }
    }
    let base = rat(10, 3) + &p.eps;
    let initial: Vec<Rational> =
        d.vertices().map(|v| &base - rat(d.degree(v) as i64, 2) - &sigma[v]).collect();

    let small = rat(1, 12) - &p.eps / int(8);
    let mut transfers = Vec::new();
    let mut inapplicable = Vec::new();
    for v in d.vertices() {
        let degree = d.degree(v);
        let digon_vertex = !d.digon_partners(v).is_empty();
        if degree == 6 && !digon_vertex {
            for u in d.neighbours(v) {
                transfers.push(Transfer { rule: Rule::R1, source: v, target: u, amount: small.clone(), simple_arc: false });
            }
        }
        if degree == 6 && digon_vertex {
            for u in d.neighbours(v).into_iter().filter(|&u| d.degree(u) >= 8) {
                let du = d.degree(u);
                let light = du - valency8(d, u);
                if light == 0 {
                    inapplicable.push((v, u));
                    continue;
                }
                let per_arc = (rat(du as i64, 2) - rat(10, 3) - &p.eps) / int(light as i64);
                let simple_arc = !d.has_digon(u, v);
                let arcs = usize::from(d.has_arc(u, v)) + usize::from(d.has_arc(v, u));
                for _ in 0..arcs {
                    transfers.push(Transfer { rule: Rule::R2, source: v, target: u, amount: per_arc.clone(), simple_arc });
                }
            }
        }
        if degree == 7 {
            if d.in_degree(v) == 3 {
                for &u in d.in_neighbours(v) {
                    transfers.push(Transfer { rule: Rule::R3, source: v, target: u, amount: small.clone(), simple_arc: false });
                }
            }
            if d.out_degree(v) == 3 {
                for &u in d.out_neighbours(v) {
                    transfers.push(Transfer { rule: Rule::R3, source: v, target: u, amount: small.clone(), simple_arc: false });
                }
            }
        }
    }

    let mut finals = initial.clone();
    for t in &transfers {
        finals[t.source] -= &t.amount;
        finals[t.target] += &t.amount;
    }
    let vertices = d
        .vertices()
        .map(|v| VertexCharge {
            vertex: v,
            sigma: sigma[v].clone(),
            initial: initial[v].clone(),
            final_charge: finals[v].clone(),
        })
        .collect();
    ChargeLedger { params: p.clone(), vertices, transfers, inapplicable }
}

/// `D_φ(R)` with its labelling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub digraph: Digraph,
    /// Old id -> new id. Vertices outside `R` keep their relative order.
    pub map: Vec<usize>,
    /// New ids of `x₁, x₂, x₃`, always the last three vertices.
    pub x: [usize; 3],
}

/// Contracts each colour class of `φ` on `R` to `xᵢ` and adds the digons
/// `[xᵢ, xⱼ]`. `φ` is indexed by the position of a vertex in sorted `R`.
/// With `strict`, every colour must be used.
pub fn phi_identify(d: &Digraph, region: &[usize], phi: &Colouring, strict: bool) -> Result<Identification> {
    let (sub, region) = d.induced(region)?;
    if region.len() < 4 || region.len() >= d.n() {
        return precondition("φ-identification needs 4 <= |R| < n(D)");
    }
    if phi.k != 3 || !check_dicolouring(&sub, phi)?.valid {
        return precondition("φ is not a 3-dicolouring of D⟨R⟩");
    }
    if strict && phi.classes().iter().any(|c| c.is_empty()) {
        return precondition("φ does not use all three colours");
    }
    let inside = d.membership(&region)?;
    let rest = d.n() - region.len();
    let mut map = vec![0; d.n()];
    let mut next = 0;
    for v in d.vertices() {
        if !inside[v] {
            map[v] = next;
            next += 1;
        }
    }
    for (i, &v) in region.iter().enumerate() {
        map[v] = rest + phi.colour(i) - 1;
    }
    let x = [rest, rest + 1, rest + 2];
    let mut arcs: Vec<Arc> = d.arcs().iter().map(|&(u, v)| (map[u], map[v])).collect();
    for &a in &x {
        for &b in &x {
            arcs.push((a, b));
        }
    }
    Ok(Identification { digraph: Digraph::from_arc_set(rest + 3, arcs), map, x })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionResult {
    pub identification: Identification,
    /// A 4-dicritical subdigraph `W` of `D_φ(R)`, on `extender_vertices`.
    pub extender: Digraph,
    pub extender_vertices: Vec<usize>,
    /// `X_W`, as ids of `D_φ(R)`.
    pub core: Vec<usize>,
    /// `V(R′)` in ids of `D`.
    pub extension: Vec<usize>,
}

/// Finds `W` by deleting, in lexicographic order, every arc whose removal
/// keeps `D_φ(R)` non-3-dicolourable, then dropping isolated vertices.
pub fn dicritical_extension(d: &Digraph, region: &[usize], phi: &Colouring, budget: u64) -> Result<ExtensionResult> {
    let identification = phi_identify(d, region, phi, false)?;
    let dphi = &identification.digraph;
    if is_k_dicolourable(dphi, 3, budget)?.is_some() {
        return precondition("D_φ(R) is 3-dicolourable, so D is not 4-dicritical");
    }
    let mut current = dphi.clone();
    for &arc in dphi.arcs() {
        let candidate = current.without_arc(arc);
        if is_k_dicolourable(&candidate, 3, budget)?.is_none() {
            current = candidate;
        }
    }
    let extender_vertices: Vec<usize> = current.vertices().filter(|&v| current.degree(v) > 0).collect();
    let (extender, _) = current.induced(&extender_vertices)?;
    let core: Vec<usize> = extender_vertices.iter().copied().filter(|v| identification.x.contains(v)).collect();
    if core.is_empty() || core.len() > 3 {
        return precondition(format!("|X_W| = {} is outside 1..=3", core.len()));
    }
    let mut back = vec![usize::MAX; dphi.n()];
    for v in d.vertices() {
        if identification.map[v] < identification.x[0] {
            back[identification.map[v]] = v;
        }
    }
    let mut extension: Vec<usize> = region.to_vec();
    extension.extend(extender_vertices.iter().filter(|&&w| w < identification.x[0]).map(|&w| back[w]));
    extension.sort_unstable();
    extension.dedup();
    Ok(ExtensionResult { identification, extender, extender_vertices, core, extension })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collapsibility {
    pub collapsible: bool,
    /// A 3-dicolouring of `D⟨R⟩` for which one of the conditions fails.
    pub witness: Option<Colouring>,
}

/// `R` is collapsible when for every 3-dicolouring `φ` of `D⟨R⟩` the
/// extension is all of `D`, `|X_W| = 1` and `∂(R)` is monochromatic.
/// Colourings are enumerated up to renaming, which preserves all three.
pub fn is_collapsible(d: &Digraph, region: &[usize], budget: u64) -> Result<Collapsibility> {
    let (sub, sorted) = d.induced(region)?;
    let boundary = d.boundary(&sorted)?;
    let position = |v: &usize| sorted.binary_search(v).unwrap();
    for phi in all_dicolourings(&sub, 3, budget, usize::MAX)? {
        let mut colours = boundary.iter().map(|v| phi.colour(position(v)));
        let first = colours.next();
        let monochromatic = colours.all(|c| Some(c) == first);
        let ok = monochromatic && {
            let ext = dicritical_extension(d, &sorted, &phi, budget)?;
            ext.core.len() == 1 && ext.extension.len() == d.n()
        };
        if !ok {
            return Ok(Collapsibility { collapsible: false, witness: Some(phi) });
        }
    }
    Ok(Collapsibility { collapsible: true, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicolour::DEFAULT_BUDGET as B;
    use crate::digraph::families::*;
    use crate::ore::ore_compose;
    use crate::potential::potential;

    fn k4k4() -> Digraph {
        ore_compose(&bidirected_complete(4), (0, 1), &bidirected_complete(4), 0, &[1], &[2, 3]).unwrap()
    }

    #[test]
    fn chelou_pattern() {
        // x = 0 with out-neighbours y, a, b; y = 1 with in-neighbours x, z, c
        let d = Digraph::new(6, [(0, 1), (0, 4), (0, 5), (2, 1), (3, 1), (1, 3)]).unwrap();
        assert!(out_chelou_arcs(&d).contains(&(0, 1)));
        assert!(find_chelou_arcs(&bidirected_complete(4)).out_chelou.is_empty());
        assert!(find_chelou_arcs(&bidirected_complete(4)).in_chelou.is_empty());
        let c3 = find_chelou_arcs(&directed_cycle(3));
        assert!(c3.out_chelou.is_empty() && c3.in_chelou.is_empty());
    }

    #[test]
    fn d6_examples() {
        let k4 = d6_components(&bidirected_complete(4));
        assert_eq!(k4.len(), 1);
        assert_eq!((k4[0].vertices.len(), k4[0].class), (4, D6Class::Other));
        assert!(d6_components(&directed_cycle(6)).is_empty());
        // digon [0,1], each endpoint with four extra simple arcs
        let mut arcs = vec![(0, 1), (1, 0)];
        arcs.extend([(0, 2), (3, 0), (0, 4), (5, 0), (1, 6), (7, 1), (1, 8), (9, 1)]);
        let d = Digraph::new(10, arcs).unwrap();
        let comps = d6_components(&d);
        assert_eq!(comps.len(), 1);
        assert_eq!((comps[0].vertices.clone(), comps[0].class), (vec![0, 1], D6Class::Path2));
    }

    #[test]
    fn valency_examples() {
        assert!(bidirected_complete(4).vertices().all(|v| valency8(&bidirected_complete(4), v) == 0));
        // v = 0 of degree 6 with a digon to u = 1 of degree 8
        let mut arcs = vec![(0, 1), (1, 0), (0, 2), (3, 0), (0, 4), (5, 0)];
        arcs.extend([(1, 6), (7, 1), (1, 8), (9, 1), (1, 10), (11, 1)]);
        let d = Digraph::new(12, arcs).unwrap();
        assert_eq!(d.degree(1), 8);
        assert_eq!(valency8(&d, 0), 2);
        assert_eq!(neighbourhood_valency(&d, 0).unwrap(), 0);
        assert!(neighbourhood_valency(&d, 1).is_err());
    }

    #[test]
    fn k4_ledger() {
        let k4 = bidirected_complete(4);
        let ledger = discharge(&k4, &PotentialParams::oriented());
        assert!(ledger.transfers.is_empty());
        for c in &ledger.vertices {
            assert_eq!(c.sigma, rat(1, 34));
            assert_eq!(c.initial, rat(11, 34));
        }
        assert_eq!(ledger.total_initial(), rat(22, 17));
        assert_eq!(ledger.total_final(), rat(22, 17));
        assert_eq!(potential(&k4, &PotentialParams::oriented(), B).unwrap(), rat(20, 17));
    }

    #[test]
    fn r1_fires_from_digon_free_degree_six() {
        let d = Digraph::new(7, [(0, 1), (0, 2), (0, 3), (4, 0), (5, 0), (6, 0)]).unwrap();
        let p = PotentialParams::oriented();
        let ledger = discharge(&d, &p);
        let sent: Rational = ledger.transfers.iter().filter(|t| t.source == 0).map(|t| &t.amount).sum();
        assert_eq!(sent, int(6) * (rat(1, 12) - &p.eps / int(8)));
        assert!(ledger.transfers.iter().all(|t| t.rule == Rule::R1));
        assert_eq!(ledger.total_initial(), ledger.total_final());
    }

    #[test]
    fn low_degree_has_no_transfers() {
        let ledger = discharge(&bidirected_cycle(5), &PotentialParams::oriented());
        assert!(ledger.transfers.is_empty());
        assert!(ledger.vertices.iter().all(|c| c.initial == rat(10, 3) + rat(1, 51) - int(2)));
    }

    #[test]
    fn identification_counts() {
        let d = k4k4();
        let region = [0, 2, 3, 4];
        let (sub, _) = d.induced(&region).unwrap();
        let phi = is_k_dicolourable(&sub, 3, B).unwrap().unwrap();
        let id = phi_identify(&d, &region, &phi, false).unwrap();
        assert_eq!(id.digraph.n(), d.n() - 4 + 3);
        assert!(id.x.iter().all(|&a| id.x.iter().all(|&b| a == b || id.digraph.has_digon(a, b))));
        assert!(is_k_dicolourable(&id.digraph, 3, B).unwrap().is_none());

        let two_two = Colouring::new(3, vec![1, 2, 1, 2]);
        let path = bidirected_path(4);
        let host = Digraph::from_arc_set(6, path.arcs().iter().copied().chain([(3, 4), (4, 5)]));
        let id = phi_identify(&host, &[0, 1, 2, 3], &two_two, false).unwrap();
        assert_eq!(id.digraph.degree(id.x[2]), 4);
        assert!(phi_identify(&host, &[0, 1, 2, 3], &two_two, true).is_err());
        assert!(phi_identify(&host, &[0, 1, 2], &two_two, false).is_err());
    }

    #[test]
    fn extension_on_composed_k4s() {
        let d = k4k4();
        let side = [0, 1, 2, 3];
        let (sub, _) = d.induced(&side).unwrap();
        for phi in all_dicolourings(&sub, 3, B, usize::MAX).unwrap() {
            let ext = dicritical_extension(&d, &side, &phi, B).unwrap();
            assert!((1..=3).contains(&ext.core.len()));
            let (r_prime, _) = d.induced(&ext.extension).unwrap();
            let zero = PotentialParams::zero();
            let rho_r = potential(&r_prime, &zero, B).unwrap();
            assert!(rho_r >= potential(&d, &zero, B).unwrap());
        }
    }

    #[test]
    fn path_region_is_not_collapsible() {
        let d = k4k4();
        // a bidirected path on four vertices inside the host
        let region = [4, 5, 1, 2];
        let (sub, _) = d.induced(&region).unwrap();
        assert_eq!(sub.m(), 6);
        let verdict = is_collapsible(&d, &region, B).unwrap();
        assert!(!verdict.collapsible);
        assert!(verdict.witness.is_some());
    }
}
