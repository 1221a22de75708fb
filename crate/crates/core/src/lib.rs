//! Exact machinery for dicritical digraphs: dicolouring and dicriticality,
//! 4-Ore composition and recognition, the digon/triangle packing parameter
//! `T(D)`, the potential `ρ(D) = (10/3 + ε)n − m − δT(D)` over exact
//! rationals, the discharging engine, and the oriented 4-dicritical
//! constructions with their certificates.

pub mod census;
pub mod constructions;
pub mod dicolour;
pub mod digraph;
pub mod error;
pub mod iso;
pub mod ore;
pub mod potential;
pub mod rational;
pub mod structure;

pub use dicolour::{Colouring, CriticalityReport, DEFAULT_BUDGET};
pub use digraph::{families, Arc, Digraph, VertexProfile};
pub use error::{Error, Result};
pub use ore::OreTrace;
pub use potential::{Packing, PotentialParams};
pub use rational::Rational;
pub use structure::ChargeLedger;
