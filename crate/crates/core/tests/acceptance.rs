//! One pass/fail line per acceptance criterion. Exits nonzero on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use dicrit_core::census::census;
use dicrit_core::constructions::{
    build_g3, build_gk, certify_dicritical_composition, gadget_forces_distinct, predicted_counts, ConstructionSpec,
    CertifyOptions, Method,
};
use dicrit_core::dicolour::{all_dicolourings, check_dicolouring, is_k_dicritical};
use dicrit_core::ore::{generate_4ore, is_4ore, ore_compose};
use dicrit_core::potential::{audit_params, check_oriented_bound, max_packing, potential};
use dicrit_core::rational::{int, rat};
use dicrit_core::structure::discharge;
use dicrit_core::{families, Digraph, OreTrace, PotentialParams, DEFAULT_BUDGET};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ore_corpus(max_n: usize, seeds: u64) -> Vec<(Digraph, OreTrace)> {
    let mut out = Vec::new();
    for n in (4..=max_n).step_by(3) {
        for seed in 0..seeds {
            for j in [false, true] {
                out.push(generate_4ore(n, seed, j).expect("valid order"));
            }
        }
    }
    out
}

fn packing(d: &Digraph) -> usize {
    let p = max_packing(d, DEFAULT_BUDGET);
    assert!(p.optimal, "packing search ran out of budget");
    p.value()
}

fn ac1() -> Outcome {
    let k4 = families::bidirected_complete(4);
    let r = is_k_dicritical(&k4, 4, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure!(r.verdict && r.witnesses.len() == 12, "K4: verdict {} with {} witnesses", r.verdict, r.witnesses.len());
    for w in &r.witnesses {
        let minus = k4.without_arc(w.arc);
        ensure!(w.colouring.k == 3, "witness uses {} colours", w.colouring.k);
        ensure!(common::valid_dicolouring(&minus, &w.colouring.colours, 3), "bad witness for {:?}", w.arc);
    }
    let k3 = families::bidirected_complete(3);
    ensure!(is_k_dicritical(&k3, 3, DEFAULT_BUDGET).unwrap().verdict, "K3 not 3-dicritical");
    for n in 2..=7 {
        ensure!(is_k_dicritical(&families::directed_cycle(n), 2, DEFAULT_BUDGET).unwrap().verdict, "C{n} not 2-dicritical");
    }
    Ok("K4 (12 witnesses), K3, C2..C7".into())
}

fn ac2() -> Outcome {
    let p = PotentialParams::oriented();
    let orders: Vec<usize> = (4..=25).step_by(3).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut identity, mut low_t, mut high_rho) = (0, Vec::new(), 0);
    for i in 0..200u64 {
        let n = *orders.choose(&mut rng).unwrap();
        let (d, _) = generate_4ore(n, 1000 + i, i % 2 == 1).unwrap();
        identity += usize::from(3 * d.m() != 10 * d.n() - 4);
        let t = packing(&d);
        if 3 * t < 2 * (n - 1) {
            low_t.push(format!("n={n} T={t}"));
        }
        let rho = potential(&d, &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let bound = rat(4, 3) + &p.eps * int(n as i64) - &p.delta * rat(2 * (n as i64 - 1), 3);
        high_rho += usize::from(rho > bound);
    }
    ensure!(
        identity == 0 && low_t.is_empty() && high_rho == 0,
        "3m = 10n - 4 fails on {identity}/200; 3T >= 2(n-1) fails on {}/200 (first: {}); rho bound fails on {high_rho}/200",
        low_t.len(),
        low_t.first().map_or("-", String::as_str)
    );
    Ok("200 instances, n in 4..=25".into())
}

fn ac3() -> Outcome {
    let corpus = ore_corpus(11, 6);
    for (d, _) in &corpus {
        let r = is_k_dicritical(d, 4, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        ensure!(r.verdict, "n={} not 4-dicritical: {:?}", d.n(), r.failure);
    }
    Ok(format!("{} instances, n in {{4, 7, 10}}", corpus.len()))
}

fn random_partition(rng: &mut ChaCha8Rng, items: &[usize]) -> (Vec<usize>, Vec<usize>) {
    loop {
        let (a, b): (Vec<usize>, Vec<usize>) = items.iter().partition(|_| rng.gen_bool(0.5));
        if !a.is_empty() && !b.is_empty() {
            return (a, b);
        }
    }
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..500 {
        let n = rng.gen_range(1..=9);
        let p = [0.2, 0.4, 0.6, 0.85][i % 4];
        let d = common::random_digraph(&mut rng, n, p);
        let t = packing(&d);
        let oracle = common::brute_packing(&d);
        ensure!(t == oracle, "digraph {i}: packing {t} vs oracle {oracle}");
        if n >= 2 {
            for v in d.vertices() {
                let (dv, _) = d.remove_vertices(&[v]).unwrap();
                ensure!(packing(&dv) + 1 >= t, "digraph {i}: T(D-{v}) too small");
            }
        }
    }
    let pool = ore_corpus(10, 3);
    let k4 = families::bidirected_complete(4);
    let mut with_k4 = 0;
    for i in 0..100 {
        let (d1, _) = pool.choose(&mut rng).unwrap();
        let d2 = if i % 3 == 0 { &k4 } else { &pool.choose(&mut rng).unwrap().0 };
        let (d1, d2) = if i % 2 == 0 { (d1, d2) } else { (d2, d1) };
        let digons = d1.digons();
        let xy = *digons.choose(&mut rng).unwrap();
        let z = rng.gen_range(0..d2.n());
        let (z1, z2) = random_partition(&mut rng, &d2.neighbours(z));
        let d = ore_compose(d1, xy, d2, z, &z1, &z2).map_err(|e| e.to_string())?;
        let (t, t1, t2) = (packing(&d), packing(d1), packing(d2));
        let k4_side = common::perm_isomorphic(d1, &k4) || common::perm_isomorphic(d2, &k4);
        with_k4 += usize::from(k4_side);
        let loss = if k4_side { 1 } else { 2 };
        ensure!(t + loss >= t1 + t2, "composition {i}: T={t}, T1={t1}, T2={t2}, K4 side {k4_side}");
    }
    Ok(format!("500 random digraphs, 100 compositions ({with_k4} with a K4 side)"))
}

fn ac5() -> Outcome {
    let mut corpus = ore_corpus(9, 8);
    corpus.push((families::bidirected_complete(4), OreTrace::Leaf));
    let mut subsets = 0u64;
    for (d, _) in &corpus {
        let n = d.n();
        // deleting arcs only raises 10n - 3m, so induced subsets are the worst case
        for mask in 1u32..(1 << n) - 1 {
            let inside = |v: usize| mask >> v & 1 == 1;
            let nr = mask.count_ones() as i64;
            let mr = d.arcs().iter().filter(|&&(u, v)| inside(u) && inside(v)).count() as i64;
            ensure!(rat(10, 3) * int(nr) - int(mr) >= rat(10, 3), "n={n}: subset {mask:b} has n(R)={nr}, m(R)={mr}");
            subsets += 1;
        }
    }
    Ok(format!("{} digraphs, {subsets} induced subsets", corpus.len()))
}

fn ac6() -> Outcome {
    let g3 = build_g3(1, None).map_err(|e| e.to_string())?;
    ensure!(g3.digraph.n() == 12 && g3.digraph.m() == 30, "G3: {} / {}", g3.digraph.n(), g3.digraph.m());
    let c3 = certify_dicritical_composition(&ConstructionSpec::new(3, 1).unwrap(), CertifyOptions::default(), DEFAULT_BUDGET)
        .map_err(|e| e.to_string())?;
    ensure!(c3.verdict && c3.witness_method == Method::Solver && !c3.sampled, "G3 certificate {c3:?}");
    ensure!(c3.witnesses.len() == 30, "G3 has {} witnesses", c3.witnesses.len());

    let spec = ConstructionSpec::new(4, 1).unwrap();
    let g4 = build_gk(&spec).map_err(|e| e.to_string())?;
    let d = &g4.digraph;
    ensure!(d.n() == 76 && d.m() == 330, "G4: {} / {}", d.n(), d.m());
    ensure!(predicted_counts(4, 1) == (76, 330), "predicted counts {:?}", predicted_counts(4, 1));
    ensure!(d.is_oriented(), "G4 has a digon");
    let bound = check_oriented_bound(d).map_err(|e| e.to_string())?;
    ensure!(bound.holds && bound.slack == rat(1295, 17), "slack {}", bound.slack);
    ensure!(2 * d.m() <= 9 * d.n(), "330 > 9/2 * 76");
    let gadgets = g4.embedded_gadgets();
    for g in &gadgets {
        let ok = gadget_forces_distinct(d, g.x, g.y, &g.vertices, g.colours, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        ensure!(ok, "gadget on {:?} fails", g.vertices);
    }

    let full = certify_dicritical_composition(&spec, CertifyOptions::default(), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure!(full.verdict && full.lower_bound.holds, "G4 certificate {full:?}");
    ensure!(full.lower_bound.method == Method::Compositional, "lower bound method {:?}", full.lower_bound.method);
    ensure!(full.invalid_witnesses.is_empty(), "invalid witnesses {:?}", full.invalid_witnesses);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sampled: Vec<_> = full.witnesses.choose_multiple(&mut rng, 30).collect();
    for w in &sampled {
        let minus = d.without_arc(w.arc);
        ensure!(w.colouring.k == 3, "witness for {:?} has {} colours", w.arc, w.colouring.k);
        ensure!(common::valid_dicolouring(&minus, &w.colouring.colours, 3), "witness for {:?} invalid", w.arc);
    }
    let partial = certify_dicritical_composition(&spec, CertifyOptions { sample: Some(30), seed: 6 }, DEFAULT_BUDGET)
        .map_err(|e| e.to_string())?;
    ensure!(partial.verdict && partial.sampled, "sampled certificate {partial:?}");
    Ok(format!(
        "G3 12/30 solver-certified; G4 76/330, slack 1295/17, {} gadgets, compositional, {} + 30 witnesses",
        gadgets.len(),
        full.witnesses.len()
    ))
}

fn ac7() -> Outcome {
    let p = PotentialParams::oriented();
    ensure!(p.eps == rat(1, 51) && p.delta == rat(2, 17), "oriented parameters {p:?}");
    let rows = audit_params(&p);
    ensure!(rows.len() >= 22, "only {} rows", rows.len());
    for r in &rows {
        ensure!(r.satisfied, "row {} fails: {} vs {}", r.label, r.lhs, r.bound);
    }
    // the two headline rows, recomputed by hand
    ensure!(p.delta >= int(6) * &p.eps, "δ < 6ε");
    ensure!(int(3) * &p.delta - &p.eps <= rat(1, 3), "3δ - ε > 1/3");
    Ok(format!("{} rows", rows.len()))
}

fn ac8() -> Outcome {
    let p = PotentialParams::oriented();
    let k4 = families::bidirected_complete(4);
    let ledger = discharge(&k4, &p);
    ensure!(ledger.vertices.iter().all(|c| c.sigma == rat(1, 34) && c.initial == rat(11, 34)), "K4 ledger {ledger:?}");
    ensure!(ledger.total_initial() == rat(22, 17), "K4 total {}", ledger.total_initial());
    ensure!(potential(&k4, &p, DEFAULT_BUDGET).unwrap() == rat(20, 17), "K4 potential");

    let mut corpus: Vec<Digraph> = vec![k4];
    for k in 2..=4 {
        corpus.extend(census(k, 5, DEFAULT_BUDGET).map_err(|e| e.to_string())?.records.into_iter().map(|r| r.digraph));
    }
    corpus.extend(ore_corpus(13, 4).into_iter().map(|(d, _)| d));
    for d in &corpus {
        let ledger = discharge(d, &p);
        ensure!(ledger.total_final() == ledger.total_initial(), "charge not conserved on {}", d.to_dg());
        let rho = potential(d, &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        ensure!(ledger.total_initial() >= rho, "Σw = {} < ρ = {rho} on {}", ledger.total_initial(), d.to_dg());
    }
    Ok(format!("K4 ledger 1/34, 11/34, 22/17 >= 20/17; {} digraphs", corpus.len()))
}

fn ac9() -> Outcome {
    let mut found = 0;
    for k in 2..=4 {
        let table = census(k, 5, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        for row in &table.rows {
            if k == 2 && row.n >= 2 {
                ensure!(row.min_arcs == Some(row.n), "d_2({}) = {:?}", row.n, row.min_arcs);
                ensure!(row.classes == 1, "{} classes of 2-dicritical digraphs on {}", row.classes, row.n);
                let w = row.witness.as_ref().unwrap();
                ensure!(common::perm_isomorphic(w, &families::directed_cycle(row.n)), "d_2({}) witness not a cycle", row.n);
            }
        }
        let row = |n: usize| table.rows.iter().find(|r| r.n == n).unwrap();
        if k == 3 {
            ensure!(row(3).min_arcs == Some(6), "d_3(3) = {:?}", row(3).min_arcs);
            ensure!(common::perm_isomorphic(row(3).witness.as_ref().unwrap(), &families::bidirected_complete(3)), "d_3 witness");
        }
        if k == 4 {
            ensure!(row(4).min_arcs == Some(12), "d_4(4) = {:?}", row(4).min_arcs);
            ensure!(common::perm_isomorphic(row(4).witness.as_ref().unwrap(), &families::bidirected_complete(4)), "d_4 witness");
            for r in &table.records {
                ensure!(3 * r.m + 4 >= 10 * r.n, "4-dicritical with n={} m={}", r.n, r.m);
            }
        }
        for r in &table.records {
            ensure!(common::brute_chi(&r.digraph) == k, "record with χ != {k}");
        }
        found += table.records.len();
    }
    Ok(format!("k = 2..4, n <= 5, {found} classes"))
}

fn ac10() -> Outcome {
    let corpus = ore_corpus(13, 6);
    for (d, _) in &corpus {
        let trace = is_4ore(d, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let Some(trace) = trace else { return Err(format!("n={} not recognised", d.n())) };
        let replay = trace.replay().map_err(|e| e.to_string())?;
        ensure!(common::perm_isomorphic(&replay, d), "replay not isomorphic for n={}", d.n());
    }
    Ok(format!("{} instances, n in {{4, 7, 10, 13}}", corpus.len()))
}

fn distinct_except(colours: &[usize], j: &[usize], skip: &[usize]) -> bool {
    for (i, &a) in j.iter().enumerate() {
        for &b in &j[i + 1..] {
            if !(skip.contains(&a) && skip.contains(&b)) && colours[a] == colours[b] {
                return false;
            }
        }
    }
    true
}

fn ac11() -> Outcome {
    let mut checked = 0usize;
    for n in [4, 7, 10] {
        for seed in 0..8 {
            let (d, trace) = generate_4ore(n, seed, true).unwrap();
            ensure!(trace.is_j_preserving(), "trace not J-preserving");
            let j = trace.base_clique();
            for (a, &u) in j.iter().enumerate() {
                for &v in &j[a + 1..] {
                    if !d.has_digon(u, v) {
                        continue;
                    }
                    let minus = d.without_digon(u, v);
                    let all = all_dicolourings(&minus, 3, DEFAULT_BUDGET, usize::MAX).map_err(|e| e.to_string())?;
                    ensure!(!all.is_empty(), "D minus [{u},{v}] not 3-dicolourable");
                    for c in &all {
                        ensure!(check_dicolouring(&minus, c).unwrap().valid, "solver output invalid");
                        ensure!(distinct_except(&c.colours, &j, &[u, v]), "n={n} seed {seed} digon [{u},{v}]: {:?}", c.colours);
                    }
                    checked += all.len();
                }
            }
            for &v in &j {
                let (minus, kept) = d.remove_vertices(&[v]).unwrap();
                let jv: Vec<usize> = j.iter().filter(|&&w| w != v).map(|w| kept.binary_search(w).unwrap()).collect();
                let all = all_dicolourings(&minus, 3, DEFAULT_BUDGET, usize::MAX).map_err(|e| e.to_string())?;
                ensure!(!all.is_empty(), "D - {v} not 3-dicolourable");
                for c in &all {
                    ensure!(distinct_except(&c.colours, &jv, &[]), "n={n} seed {seed} vertex {v}: {:?}", c.colours);
                }
                checked += all.len();
            }
        }
    }
    Ok(format!("24 instances, {checked} colourings"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("AC-1 small dicritical digraphs", ac1),
        ("AC-2 4-Ore arc identity, packing and potential", ac2),
        ("AC-3 4-Ore instances are 4-dicritical", ac3),
        ("AC-4 packing bounds", ac4),
        ("AC-5 subdigraph potential", ac5),
        ("AC-6 constructions G3 and G4", ac6),
        ("AC-7 parameter audit", ac7),
        ("AC-8 discharging", ac8),
        ("AC-9 census", ac9),
        ("AC-10 recognition round-trip", ac10),
        ("AC-11 old 4-clique", ac11),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why} ({secs:.2}s)");
            }
        }
    }
    println!("{} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
