//! Sparse oriented `k`-dicritical digraphs: `G₃` from an oriented odd cycle
//! with `C⃗₃` gadgets, and `G_k` from a `k`-tournament with one copy of
//! `G_{k-1}` per tournament arc. Certification is by solver for `k = 3` and
//! compositional above, with every constructed colouring checked.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dicolour::{check_dicolouring, is_k_dicolourable_with, is_k_dicritical, ArcWitness, Colouring};
use crate::digraph::{Arc, Digraph};
use crate::error::{precondition, Result};

/// Parameters of `G_k`. `tournaments[i]` is the tournament used at level
/// `i + 4`; `cycle_forward[i]` orients the cycle edge `{i, i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub k: usize,
    pub n0: usize,
    pub cycle_forward: Vec<bool>,
    pub tournaments: Vec<Vec<Arc>>,
}

impl ConstructionSpec {
    /// All-forward cycle and transitive tournaments `i -> j` for `i < j`.
    pub fn new(k: usize, n0: usize) -> Result<Self> {
        let tournaments = (4..=k).map(transitive_tournament).collect();
        let spec = ConstructionSpec { k, n0, cycle_forward: vec![true; 2 * n0 + 1], tournaments };
        spec.validate()?;
        Ok(spec)
    }

    /// Random cycle orientation and random tournaments.
    pub fn seeded(k: usize, n0: usize, seed: u64) -> Result<Self> {
        let mut spec = Self::new(k, n0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        spec.cycle_forward = (0..2 * n0 + 1).map(|_| rng.gen_bool(0.5)).collect();
        for t in &mut spec.tournaments {
            for arc in t.iter_mut() {
                if rng.gen_bool(0.5) {
                    *arc = (arc.1, arc.0);
                }
            }
            t.sort_unstable();
        }
        Ok(spec)
    }

    /// Replaces the top-level tournament.
    pub fn with_tournament(mut self, arcs: Vec<Arc>) -> Result<Self> {
        if self.k < 4 {
            return precondition("G3 has no tournament");
        }
        let top = self.k - 4;
        self.tournaments[top] = arcs;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 3 || self.n0 < 1 {
            return precondition("constructions need k >= 3 and n0 >= 1");
        }
        if self.cycle_forward.len() != 2 * self.n0 + 1 {
            return precondition("cycle orientation must have 2n0+1 entries");
        }
        if self.tournaments.len() != self.k - 3 {
            return precondition(format!("expected {} tournaments", self.k - 3));
        }
        for (i, t) in self.tournaments.iter().enumerate() {
            check_tournament(i + 4, t)?;
        }
        Ok(())
    }

    /// Spec for `G_{k-1}` with the same lower levels.
    fn lower(&self) -> ConstructionSpec {
        let mut spec = self.clone();
        spec.k -= 1;
        spec.tournaments.pop();
        spec
    }
}

pub fn transitive_tournament(k: usize) -> Vec<Arc> {
    (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect()
}

fn check_tournament(k: usize, arcs: &[Arc]) -> Result<()> {
    let d = Digraph::new(k, arcs.iter().copied())?;
    let complete = (0..k).all(|i| (i + 1..k).all(|j| d.has_arc(i, j) != d.has_arc(j, i)));
    if !complete {
        return precondition(format!("not a tournament on {k} vertices"));
    }
    Ok(())
}

/// `(n_k, m_k)` from the recurrences, starting at `(4L, 10L)` with `L = 2n0+1`.
pub fn predicted_counts(k: usize, n0: usize) -> (u64, u64) {
    let l = 2 * n0 as u64 + 1;
    let (mut n, mut m) = (4 * l, 10 * l);
    for j in 4..=k as u64 {
        let pairs = j * (j - 1) / 2;
        let next_n = j + pairs * n;
        m = pairs + pairs * 2 * n + pairs * m;
        n = next_n;
    }
    (n, m)
}

/// An arc `x -> y` of the skeleton with a vertex set receiving every arc
/// from `y` and sending every arc to `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub x: usize,
    pub y: usize,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub k: usize,
    pub digraph: Digraph,
    /// The odd cycle for `k = 3`, the tournament above.
    pub skeleton: Vec<usize>,
    /// `C⃗₃` gadgets for `k = 3`, copies of `G_{k-1}` above.
    pub attachments: Vec<Attachment>,
    /// `G_{k-1}`; copy `i` is it shifted by `attachments[i].vertices[0]`.
    pub base: Option<Box<Construction>>,
}

/// `G₃` on `4(2n0+1)` vertices: cycle `0..L`, gadget of cycle arc `i` on
/// `L+3i..L+3i+3`. With a seed, the cycle orientation is random.
pub fn build_g3(n0: usize, seed: Option<u64>) -> Result<Construction> {
    let spec = match seed {
        Some(s) => ConstructionSpec::seeded(3, n0, s)?,
        None => ConstructionSpec::new(3, n0)?,
    };
    build(&spec)
}

pub fn build_gk(spec: &ConstructionSpec) -> Result<Construction> {
    spec.validate()?;
    build(spec)
}

fn build(spec: &ConstructionSpec) -> Result<Construction> {
    if spec.k == 3 {
        let l = 2 * spec.n0 + 1;
        let mut arcs = Vec::with_capacity(10 * l);
        let mut attachments = Vec::with_capacity(l);
        for i in 0..l {
            let j = (i + 1) % l;
            let (x, y) = if spec.cycle_forward[i] { (i, j) } else { (j, i) };
            let g = [l + 3 * i, l + 3 * i + 1, l + 3 * i + 2];
            arcs.extend([(x, y), (g[0], g[1]), (g[1], g[2]), (g[2], g[0])]);
            for &w in &g {
                arcs.push((y, w));
                arcs.push((w, x));
            }
            attachments.push(Attachment { x, y, vertices: g.to_vec() });
        }
        let digraph = Digraph::new(4 * l, arcs)?;
        return Ok(Construction { k: 3, digraph, skeleton: (0..l).collect(), attachments, base: None });
    }
    let k = spec.k;
    let base = build(&spec.lower())?;
    let size = base.digraph.n();
    let mut tournament = spec.tournaments[k - 4].clone();
    tournament.sort_unstable();
    let mut arcs = tournament.clone();
    let mut attachments = Vec::with_capacity(tournament.len());
    for (i, &(x, y)) in tournament.iter().enumerate() {
        let offset = k + i * size;
        arcs.extend(base.digraph.arcs().iter().map(|&(a, b)| (a + offset, b + offset)));
        for w in offset..offset + size {
            arcs.push((y, w));
            arcs.push((w, x));
        }
        attachments.push(Attachment { x, y, vertices: (offset..offset + size).collect() });
    }
    let digraph = Digraph::new(k + tournament.len() * size, arcs)?;
    Ok(Construction { k, digraph, skeleton: (0..k).collect(), attachments, base: Some(Box::new(base)) })
}

/// An attachment of some level, in ids of the outer digraph, with the
/// number of colours it must defeat.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedGadget {
    pub x: usize,
    pub y: usize,
    pub vertices: Vec<usize>,
    pub colours: usize,
}

impl Construction {
    /// Every attachment at every level, shifted into this digraph.
    pub fn embedded_gadgets(&self) -> Vec<EmbeddedGadget> {
        let mut out: Vec<EmbeddedGadget> = self
            .attachments
            .iter()
            .map(|a| EmbeddedGadget { x: a.x, y: a.y, vertices: a.vertices.clone(), colours: self.k - 1 })
            .collect();
        if let Some(base) = &self.base {
            let inner = base.embedded_gadgets();
            for a in &self.attachments {
                let offset = a.vertices[0];
                out.extend(inner.iter().map(|g| EmbeddedGadget {
                    x: g.x + offset,
                    y: g.y + offset,
                    vertices: g.vertices.iter().map(|v| v + offset).collect(),
                    colours: g.colours,
                }));
            }
        }
        out
    }
}

/// Assignment count up to which gadget checks enumerate colourings directly.
const EXHAUSTIVE_LIMIT: u64 = 1 << 16;

/// True iff no `colours`-dicolouring of `D⟨{x, y} ∪ gadget⟩` gives `x` and
/// `y` the same colour.
pub fn gadget_forces_distinct(d: &Digraph, x: usize, y: usize, gadget: &[usize], colours: usize, budget: u64) -> Result<bool> {
    if x == y || gadget.is_empty() || gadget.contains(&x) || gadget.contains(&y) || colours == 0 {
        return precondition("gadget needs distinct x, y outside a nonempty vertex set");
    }
    if x >= d.n() || y >= d.n() || gadget.iter().any(|&g| g >= d.n()) {
        return precondition("gadget vertex out of range");
    }
    let mut vertices = vec![x, y];
    vertices.extend_from_slice(gadget);
    let (sub, order) = d.induced(&vertices)?;
    let xi = order.binary_search(&x).unwrap();
    let yi = order.binary_search(&y).unwrap();
    let free = sub.n() - 2;
    let assignments = (colours as u64).checked_pow(free as u32);
    if assignments.is_some_and(|a| a <= EXHAUSTIVE_LIMIT) {
        let others: Vec<usize> = (0..sub.n()).filter(|&v| v != xi && v != yi).collect();
        let mut colouring = Colouring::new(colours, vec![1; sub.n()]);
        // x = y = colour 1 covers every case up to renaming
        let mut digits = vec![1; free];
        loop {
            for (&v, &c) in others.iter().zip(&digits) {
                colouring.colours[v] = c;
            }
            if check_dicolouring(&sub, &colouring)?.valid {
                return Ok(false);
            }
            let Some(pos) = digits.iter().position(|&c| c < colours) else { break };
            for c in &mut digits[..pos] {
                *c = 1;
            }
            digits[pos] += 1;
        }
        return Ok(true);
    }
    Ok(is_k_dicolourable_with(&sub, colours, &[(xi, 1), (yi, 1)], budget)?.is_none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Established by exhaustive search.
    Solver,
    /// Derived from a certified `G_{k-1}` through the composition argument.
    Compositional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcClass {
    /// Cycle arc (`k = 3`) or tournament arc.
    Skeleton,
    /// Inside a gadget or a copy of `G_{k-1}`.
    Internal,
    /// Between the skeleton and an attachment.
    Connection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBound {
    pub method: Method,
    /// `χ⃗(G_k) >= k` established.
    pub holds: bool,
    /// Attachments checked with [`gadget_forces_distinct`].
    pub gadgets_checked: usize,
    /// Attachments too large to check directly.
    pub gadgets_skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTally {
    pub class: ArcClass,
    pub arcs: usize,
    pub validated: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub k: usize,
    pub n0: usize,
    pub n: usize,
    pub m: usize,
    pub counts_match: bool,
    pub lower_bound: LowerBound,
    /// How the arc-deletion witnesses were obtained.
    pub witness_method: Method,
    pub classes: Vec<ClassTally>,
    /// Fewer than all arcs were validated.
    pub sampled: bool,
    pub invalid_witnesses: Vec<Arc>,
    pub base: Option<Box<Certificate>>,
    pub verdict: bool,
    /// One `(k-1)`-dicolouring of `G_k ∖ a` per arc, in arc order.
    #[serde(skip)]
    pub witnesses: Vec<ArcWitness>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Validate only this many witnesses at the top level, chosen by `seed`.
    pub sample: Option<usize>,
    pub seed: u64,
}

/// Certifies that `G_k` is `k`-dicritical.
pub fn certify_dicritical_composition(spec: &ConstructionSpec, options: CertifyOptions, budget: u64) -> Result<Certificate> {
    spec.validate()?;
    let construction = build(spec)?;
    certify(&construction, spec.n0, options, budget)
}

fn classify_arc(c: &Construction, (u, v): Arc) -> ArcClass {
    let on_skeleton = |w: usize| w < c.skeleton.len();
    match (on_skeleton(u), on_skeleton(v)) {
        (true, true) => ArcClass::Skeleton,
        (false, false) => ArcClass::Internal,
        _ => ArcClass::Connection,
    }
}

fn certify(c: &Construction, n0: usize, options: CertifyOptions, budget: u64) -> Result<Certificate> {
    let d = &c.digraph;
    let (pn, pm) = predicted_counts(c.k, n0);
    let counts_match = (d.n() as u64, d.m() as u64) == (pn, pm);

    let (lower_bound, witness_method, witnesses, base) = match &c.base {
        None => {
            let report = is_k_dicritical(d, 3, budget)?;
            let lower = LowerBound {
                method: Method::Solver,
                holds: !matches!(report.failure, Some(crate::dicolour::CriticalityFailure::Colourable { .. })),
                gadgets_checked: 0,
                gadgets_skipped: 0,
            };
            (lower, Method::Solver, report.witnesses, None)
        }
        Some(inner) => {
            let base = certify(inner, n0, CertifyOptions::default(), budget)?;
            let mut checked = 0;
            let mut skipped = 0;
            let mut forced = true;
            for a in &c.attachments {
                let feasible = a.vertices.len() <= 32;
                if feasible {
                    forced &= gadget_forces_distinct(d, a.x, a.y, &a.vertices, c.k - 1, budget)?;
                    checked += 1;
                } else {
                    forced &= a.vertices.iter().all(|&w| d.has_arc(a.y, w) && d.has_arc(w, a.x));
                    skipped += 1;
                }
            }
            let lower = LowerBound {
                method: Method::Compositional,
                holds: base.lower_bound.holds && forced,
                gadgets_checked: checked,
                gadgets_skipped: skipped,
            };
            let witnesses = compose_witnesses(c, inner, &base.witnesses)?;
            (lower, Method::Compositional, witnesses, Some(Box::new(base)))
        }
    };

    let chosen: Vec<usize> = match options.sample {
        Some(s) if s < witnesses.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            let mut idx = sample(&mut rng, witnesses.len(), s).into_vec();
            idx.sort_unstable();
            idx
        }
        _ => (0..witnesses.len()).collect(),
    };
    let sampled = chosen.len() < d.m();
    let outcomes: Vec<Result<bool>> = chosen
        .par_iter()
        .map(|&i| {
            let w = &witnesses[i];
            Ok(w.colouring.k == c.k - 1 && check_dicolouring(&d.without_arc(w.arc), &w.colouring)?.valid)
        })
        .collect();
    let mut classes: Vec<ClassTally> = [ArcClass::Skeleton, ArcClass::Internal, ArcClass::Connection]
        .into_iter()
        .map(|class| ClassTally { class, arcs: d.arcs().iter().filter(|&&a| classify_arc(c, a) == class).count(), validated: 0 })
        .collect();
    let mut invalid_witnesses = Vec::new();
    for (&i, outcome) in chosen.iter().zip(outcomes) {
        let arc = witnesses[i].arc;
        if outcome? {
            let class = classify_arc(c, arc);
            classes.iter_mut().find(|t| t.class == class).unwrap().validated += 1;
        } else {
            invalid_witnesses.push(arc);
        }
    }
    let complete = witnesses.len() == d.m() && witnesses.iter().zip(d.arcs()).all(|(w, &a)| w.arc == a);
    let base_ok = base.as_ref().is_none_or(|b| b.verdict);
    let verdict = counts_match && lower_bound.holds && complete && invalid_witnesses.is_empty() && base_ok;
    Ok(Certificate {
        k: c.k,
        n0,
        n: d.n(),
        m: d.m(),
        counts_match,
        lower_bound,
        witness_method,
        classes,
        sampled,
        invalid_witnesses,
        base,
        verdict,
        witnesses,
    })
}

/// Builds a `(k-1)`-dicolouring of `G_k ∖ a` for every arc `a` from the
/// `(k-2)`-dicolourings `ξ_b` of `G_{k-1} ∖ b`.
///
/// Moving an endpoint `v` of `b` to colour `k-1` in `ξ_b` gives a
/// `(k-1)`-dicolouring `γ_v` of `G_{k-1}` in which `v` is alone in colour
/// `k-1`; any `γ_v` serves as the plain copy colouring.
fn compose_witnesses(c: &Construction, base: &Construction, base_witnesses: &[ArcWitness]) -> Result<Vec<ArcWitness>> {
    let k = c.k;
    let g = &base.digraph;
    if base_witnesses.len() != g.m() {
        return precondition("base certificate lacks arc-deletion witnesses");
    }
    let mut gamma: Vec<Option<Vec<usize>>> = vec![None; g.n()];
    for w in base_witnesses {
        for v in [w.arc.0, w.arc.1] {
            if gamma[v].is_none() {
                let mut colours = w.colouring.colours.clone();
                colours[v] = k - 1;
                gamma[v] = Some(colours);
            }
        }
    }
    let Some(gamma) = gamma.into_iter().collect::<Option<Vec<_>>>() else {
        return precondition("G_{k-1} has an isolated vertex");
    };
    let plain = &gamma[0];
    let size = g.n();
    let copy_of = |w: usize| (w - k) / size;

    // T coloured distinctly except that `a` and `b` share `shared`
    let skeleton_colours = |a: usize, b: usize, shared: usize| -> Vec<usize> {
        let mut colours = vec![0; k];
        colours[a] = shared;
        colours[b] = shared;
        let mut next = (1..k).filter(|&col| col != shared);
        for (t, col) in colours.iter_mut().enumerate() {
            if t != a && t != b {
                *col = next.next().expect("k-1 colours suffice");
            }
        }
        colours
    };

    let witnesses = c
        .digraph
        .arcs()
        .par_iter()
        .map(|&(u, v)| {
            let mut colours = Vec::with_capacity(c.digraph.n());
            let special: Option<(usize, &[usize])>;
            match classify_arc(c, (u, v)) {
                ArcClass::Skeleton => {
                    colours.extend(skeleton_colours(u, v, 1));
                    special = None;
                }
                ArcClass::Internal => {
                    let i = copy_of(u);
                    let a = &c.attachments[i];
                    let offset = a.vertices[0];
                    colours.extend(skeleton_colours(a.x, a.y, k - 1));
                    let local = (u - offset, v - offset);
                    let idx = g.arcs().binary_search(&local).expect("copy arc exists in G_{k-1}");
                    special = Some((i, &base_witnesses[idx].colouring.colours));
                }
                ArcClass::Connection => {
                    let inner = if u < k { v } else { u };
                    let i = copy_of(inner);
                    let a = &c.attachments[i];
                    colours.extend(skeleton_colours(a.x, a.y, k - 1));
                    special = Some((i, &gamma[inner - a.vertices[0]]));
                }
            }
            for i in 0..c.attachments.len() {
                match special {
                    Some((s, col)) if s == i => colours.extend_from_slice(col),
                    _ => colours.extend_from_slice(plain),
                }
            }
            ArcWitness { arc: (u, v), colouring: Colouring::new(k - 1, colours) }
        })
        .collect();
    Ok(witnesses)
}
