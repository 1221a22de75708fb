//! The packing parameter `T(D)`, the potential `ρ(D)` and the exact checks
//! built on them. Everything here is exact rational arithmetic.

use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{precondition, Error, Result};
use crate::rational::{self, floor_to_i64, int, rat, Rational};

/// Vertex-disjoint digons and bidirected triangles.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub digons: Vec<(usize, usize)>,
    pub triangles: Vec<[usize; 3]>,
    /// False when the search budget ran out; `value()` is then only a lower bound.
    pub optimal: bool,
}

impl Packing {
    /// `d + 2t`
    pub fn value(&self) -> usize {
        self.digons.len() + 2 * self.triangles.len()
    }

    /// Items pairwise disjoint, digons real, triangles bidirected.
    pub fn is_valid_for(&self, d: &Digraph) -> bool {
        let mut used = vec![false; d.n()];
        let mut claim = |v: usize| v < d.n() && !std::mem::replace(&mut used[v], true);
        let digons_ok = self.digons.iter().all(|&(u, v)| claim(u) && claim(v) && d.has_digon(u, v));
        let triangles_ok = self.triangles.iter().all(|&[a, b, c]| {
            claim(a) && claim(b) && claim(c) && d.has_digon(a, b) && d.has_digon(b, c) && d.has_digon(a, c)
        });
        digons_ok && triangles_ok
    }
}

/// Branch and bound for a maximum packing. Branches on the smallest free
/// vertex that still has a free digon partner: first every triangle through
/// it, then every digon, then leaving it uncovered. A triangle is worth 2
/// for 3 vertices and a digon 1 for 2, so `⌊2c/3⌋` over the `c` coverable
/// free vertices bounds what is left.
pub fn max_packing(d: &Digraph, budget: u64) -> Packing {
    let n = d.n();
    let partners: Vec<Vec<usize>> = d.vertices().map(|v| d.digon_partners(v)).collect();
    let triangles: Vec<Vec<[usize; 2]>> = d
        .vertices()
        .map(|v| {
            let mut out = Vec::new();
            for (i, &a) in partners[v].iter().enumerate() {
                for &b in &partners[v][i + 1..] {
                    if d.has_digon(a, b) {
                        out.push([a, b]);
                    }
                }
            }
            out
        })
        .collect();
    let mut search = PackSearch {
        partners,
        triangles,
        free: vec![true; n],
        digons: Vec::new(),
        tris: Vec::new(),
        best: Packing::default(),
        nodes: 0,
        budget,
        exhausted: false,
    };
    search.descend();
    let mut best = search.best;
    best.optimal = !search.exhausted;
    best
}

struct PackSearch {
    partners: Vec<Vec<usize>>,
    triangles: Vec<Vec<[usize; 2]>>,
    free: Vec<bool>,
    digons: Vec<(usize, usize)>,
    tris: Vec<[usize; 3]>,
    best: Packing,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl PackSearch {
    fn value(&self) -> usize {
        self.digons.len() + 2 * self.tris.len()
    }

    fn coverable(&self, v: usize) -> bool {
        self.free[v] && self.partners[v].iter().any(|&u| self.free[u])
    }

    fn descend(&mut self) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let value = self.value();
        if value > self.best.value() || (value == 0 && self.best.value() == 0) {
            self.best = Packing { digons: self.digons.clone(), triangles: self.tris.clone(), optimal: false };
        }
        let coverable: Vec<usize> = (0..self.free.len()).filter(|&v| self.coverable(v)).collect();
        if value + 2 * coverable.len() / 3 <= self.best.value() {
            return;
        }
        let Some(&v) = coverable.first() else { return };

        self.free[v] = false;
        for i in 0..self.triangles[v].len() {
            let [a, b] = self.triangles[v][i];
            if self.free[a] && self.free[b] {
                self.free[a] = false;
                self.free[b] = false;
                self.tris.push([v, a, b]);
                self.descend();
                self.tris.pop();
                self.free[a] = true;
                self.free[b] = true;
            }
        }
        for i in 0..self.partners[v].len() {
            let u = self.partners[v][i];
            if self.free[u] {
                self.free[u] = false;
                self.digons.push((v.min(u), v.max(u)));
                self.descend();
                self.digons.pop();
                self.free[u] = true;
            }
        }
        self.descend();
        self.free[v] = true;
    }
}

/// `T(D)`, failing if the packing search could not prove optimality.
pub fn packing_number(d: &Digraph, budget: u64) -> Result<usize> {
    let p = max_packing(d, budget);
    if p.optimal {
        Ok(p.value())
    } else {
        Err(Error::BudgetExceeded(budget))
    }
}

/// The pair `(ε, δ)` of the potential.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialParams {
    #[serde(serialize_with = "rational::serialize", deserialize_with = "rational::deserialize")]
    pub eps: Rational,
    #[serde(serialize_with = "rational::serialize", deserialize_with = "rational::deserialize")]
    pub delta: Rational,
}

impl PotentialParams {
    pub fn new(eps: Rational, delta: Rational) -> Result<Self> {
        if !rational::is_nonnegative(&eps) || !rational::is_nonnegative(&delta) {
            return precondition("ε and δ must be non-negative");
        }
        Ok(PotentialParams { eps, delta })
    }

    pub fn zero() -> Self {
        PotentialParams { eps: int(0), delta: int(0) }
    }

    /// `ε = 1/51`, `δ = 6ε = 2/17`.
    pub fn oriented() -> Self {
        PotentialParams { eps: rat(1, 51), delta: rat(2, 17) }
    }

    /// The two headline constraints `δ ≥ 6ε` and `3δ − ε ≤ 1/3`.
    pub fn is_feasible(&self) -> bool {
        audit_params(self).iter().take(2).all(|row| row.satisfied)
    }

    /// `(10/3 + ε)n − m − δT` for known counts.
    pub fn potential_of(&self, n: usize, m: usize, t: usize) -> Rational {
        (rat(10, 3) + &self.eps) * int(n as i64) - int(m as i64) - &self.delta * int(t as i64)
    }

    /// `4/3 + εn − δ·2(n−1)/3`, the bound for 4-Ore digraphs.
    pub fn four_ore_bound(&self, n: usize) -> Rational {
        rat(4, 3) + &self.eps * int(n as i64) - &self.delta * rat(2 * (n as i64 - 1), 3)
    }
}

pub fn potential(d: &Digraph, p: &PotentialParams, budget: u64) -> Result<Rational> {
    let t = packing_number(d, budget)?;
    Ok(p.potential_of(d.n(), d.m(), t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRow {
    pub label: String,
    #[serde(serialize_with = "rational::serialize", deserialize_with = "rational::deserialize")]
    pub lhs: Rational,
    pub relation: Relation,
    #[serde(serialize_with = "rational::serialize", deserialize_with = "rational::deserialize")]
    pub bound: Rational,
    pub satisfied: bool,
}

/// Linear rows `a·ε + b·δ (≤|≥) c`, written as
/// `(label, (a_num, a_den), (b_num, b_den), relation, (c_num, c_den))`.
type Row = (&'static str, (i64, i64), (i64, i64), Relation, (i64, i64));

const CATALOGUE: &[Row] = &[
    ("δ ≥ 6ε", (-6, 1), (1, 1), Relation::AtLeast, (0, 1)),
    ("3δ − ε ≤ 1/3", (-1, 1), (3, 1), Relation::AtMost, (1, 3)),
    ("δ ≥ 3ε/2", (-3, 2), (1, 1), Relation::AtLeast, (0, 1)),
    ("4ε − 2δ ≥ −1/3", (4, 1), (-2, 1), Relation::AtLeast, (-1, 3)),
    ("10ε − 3δ ≤ 5/3", (10, 1), (-3, 1), Relation::AtMost, (5, 3)),
    ("2δ − 7ε ≤ 2/3", (-7, 1), (2, 1), Relation::AtMost, (2, 3)),
    ("2δ − ε ≤ 1/3", (-1, 1), (2, 1), Relation::AtMost, (1, 3)),
    ("δ ≥ 3ε", (-3, 1), (1, 1), Relation::AtLeast, (0, 1)),
    ("5ε ≤ 1/3", (5, 1), (0, 1), Relation::AtMost, (1, 3)),
    ("ε − 2δ ≥ −1/3", (1, 1), (-2, 1), Relation::AtLeast, (-1, 3)),
    ("9ε − 5δ ≤ 1", (9, 1), (-5, 1), Relation::AtMost, (1, 1)),
    ("5ε − 3δ ≤ 1/3", (5, 1), (-3, 1), Relation::AtMost, (1, 3)),
    ("5ε + δ ≤ 1/3", (5, 1), (1, 1), Relation::AtMost, (1, 3)),
    ("6ε − 4δ ≤ 0", (6, 1), (-4, 1), Relation::AtMost, (0, 1)),
    ("6ε − δ ≤ 1", (6, 1), (-1, 1), Relation::AtMost, (1, 1)),
    ("5ε − δ ≤ 1/3", (5, 1), (-1, 1), Relation::AtMost, (1, 3)),
    ("2ε + 2δ ≤ 1/3", (2, 1), (2, 1), Relation::AtMost, (1, 3)),
    ("9ε − 2δ ≤ 0", (9, 1), (-2, 1), Relation::AtMost, (0, 1)),
    ("6ε − δ ≤ 0", (6, 1), (-1, 1), Relation::AtMost, (0, 1)),
    ("ε ≤ 2/21", (1, 1), (0, 1), Relation::AtMost, (2, 21)),
    ("ε ≤ 1/6", (1, 1), (0, 1), Relation::AtMost, (1, 6)),
    ("ε ≤ 2/3", (1, 1), (0, 1), Relation::AtMost, (2, 3)),
    ("4ε − 2δ ≤ 2/3", (4, 1), (-2, 1), Relation::AtMost, (2, 3)),
    ("ε − 3δ ≥ −1/3", (1, 1), (-3, 1), Relation::AtLeast, (-1, 3)),
];

/// Evaluates every parameter inequality the potential argument relies on.
/// The first two rows are the headline constraints; the rest are checked
/// independently rather than derived from them.
pub fn audit_params(p: &PotentialParams) -> Vec<AuditRow> {
    CATALOGUE
        .iter()
        .map(|&(label, (an, ad), (bn, bd), relation, (cn, cd))| {
            let lhs = rat(an, ad) * &p.eps + rat(bn, bd) * &p.delta;
            let bound = rat(cn, cd);
            let satisfied = match relation {
                Relation::AtMost => lhs <= bound,
                Relation::AtLeast => lhs >= bound,
            };
            AuditRow { label: label.to_string(), lhs, relation, bound, satisfied }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub holds: bool,
    #[serde(serialize_with = "rational::serialize", deserialize_with = "rational::deserialize")]
    pub slack: Rational,
}

/// `m − (10/3 + 1/51)n + 1`, the slack of the oriented 4-dicritical bound.
pub fn oriented_bound_slack(n: usize, m: usize) -> Rational {
    int(m as i64) - rat(57, 17) * int(n as i64) + int(1)
}

pub fn check_oriented_bound(d: &Digraph) -> Result<BoundCheck> {
    if let Some((u, v)) = d.digons().first() {
        return precondition(format!("oriented bound needs a digon-free digraph, found [{u},{v}]"));
    }
    let slack = oriented_bound_slack(d.n(), d.m());
    Ok(BoundCheck { holds: rational::is_nonnegative(&slack), slack })
}

/// `3m = 10n − 4`
pub fn check_4ore_arc_identity(d: &Digraph) -> bool {
    3 * d.m() + 4 == 10 * d.n()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceBound {
    pub euler_characteristic: i64,
    /// `⌊17(1 − 3c)/6⌋`
    pub bound: i64,
    /// Negative bounds exclude every 4-dicritical oriented graph on the surface.
    pub vacuous: bool,
}

pub fn surface_vertex_bound(c: i64) -> Result<SurfaceBound> {
    if c > 2 {
        return precondition("Euler characteristic is at most 2");
    }
    let bound = floor_to_i64(&rat(17 * (1 - 3 * c), 6));
    Ok(SurfaceBound { euler_characteristic: c, bound, vacuous: bound < 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::families::*;
    use crate::dicolour::DEFAULT_BUDGET as B;

    #[test]
    fn packing_examples() {
        assert_eq!(max_packing(&directed_cycle(5), B).value(), 0);
        let k4 = max_packing(&bidirected_complete(4), B);
        assert_eq!(k4.value(), 2);
        assert!(k4.optimal && k4.is_valid_for(&bidirected_complete(4)));
        assert_eq!(max_packing(&bidirected_cycle(5), B).value(), 2);
        assert_eq!(max_packing(&bidirected_complete(3), B).triangles.len(), 1);
        assert_eq!(max_packing(&bidirected_complete(6), B).value(), 4);
    }

    #[test]
    fn packing_budget_flags_non_optimal() {
        let p = max_packing(&bidirected_complete(9), 3);
        assert!(!p.optimal);
        assert!(p.is_valid_for(&bidirected_complete(9)));
        assert!(matches!(packing_number(&bidirected_complete(9), 3), Err(Error::BudgetExceeded(3))));
    }

    #[test]
    fn potential_of_k4() {
        let k4 = bidirected_complete(4);
        assert_eq!(potential(&k4, &PotentialParams::zero(), B).unwrap(), rat(4, 3));
        assert_eq!(potential(&k4, &PotentialParams::oriented(), B).unwrap(), rat(20, 17));
        // 4/3 + 4ε − 2δ at a few other points
        for (e, dl) in [((1, 100), (1, 10)), ((0, 1), (1, 9)), ((1, 30), (1, 5))] {
            let p = PotentialParams::new(rat(e.0, e.1), rat(dl.0, dl.1)).unwrap();
            let expected = rat(4, 3) + int(4) * &p.eps - int(2) * &p.delta;
            assert_eq!(potential(&k4, &p, B).unwrap(), expected);
        }
    }

    #[test]
    fn audit_rows() {
        let rows = audit_params(&PotentialParams::oriented());
        assert_eq!(rows.len(), CATALOGUE.len());
        assert!(rows.iter().all(|r| r.satisfied), "{rows:?}");
        assert!(audit_params(&PotentialParams::zero()).iter().all(|r| r.satisfied));
        let bad = audit_params(&PotentialParams::new(rat(1, 10), int(0)).unwrap());
        assert_eq!(bad[0].label, "δ ≥ 6ε");
        assert!(!bad[0].satisfied);
        assert!(PotentialParams::oriented().is_feasible());
        assert!(PotentialParams::new(rat(-1, 2), int(0)).is_err());
    }

    #[test]
    fn oriented_bound_arithmetic() {
        assert_eq!(oriented_bound_slack(76, 330), rat(1295, 17));
        let c3 = check_oriented_bound(&directed_cycle(3)).unwrap();
        assert!(!c3.holds);
        assert_eq!(c3.slack, int(4) - rat(171, 17));
        assert_eq!(oriented_bound_slack(17, 56), int(0));
        assert!(check_oriented_bound(&bidirected_complete(3)).is_err());
    }

    #[test]
    fn arc_identity() {
        assert!(check_4ore_arc_identity(&bidirected_complete(4)));
        assert!(!check_4ore_arc_identity(&bidirected_complete(3)));
    }

    #[test]
    fn surface_bounds() {
        let sphere = surface_vertex_bound(2).unwrap();
        assert_eq!((sphere.bound, sphere.vacuous), (-15, true));
        assert_eq!(surface_vertex_bound(0).unwrap().bound, 2);
        assert_eq!(surface_vertex_bound(-1).unwrap().bound, 11);
        assert!(surface_vertex_bound(3).is_err());
    }
}
