//! Fixed inputs shared by the benchmarks.

use dicrit_core::constructions::{build_g3, build_gk, ConstructionSpec};
use dicrit_core::ore::generate_4ore;
use dicrit_core::Digraph;

/// Seeded 4-Ore digraphs of the given orders.
pub fn ore_instances(orders: &[usize], seed: u64) -> Vec<Digraph> {
    orders
        .iter()
        .map(|&n| generate_4ore(n, seed, false).expect("valid order").0)
        .collect()
}

pub fn g3(n0: usize) -> Digraph {
    build_g3(n0, None).expect("n0 >= 1").digraph
}

pub fn g4(n0: usize) -> Digraph {
    build_gk(&ConstructionSpec::new(4, n0).expect("valid spec")).expect("valid spec").digraph
}
