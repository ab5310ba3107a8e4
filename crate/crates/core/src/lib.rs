//! Welfare-maximizing maximin share (MMS) and pairwise maximin share (PMMS)
//! allocations of indivisible goods among agents with matroid rank
//! valuations, plus brute-force oracles that certify results on small
//! instances.
//!
//! Goods and agents are 0-based indices throughout.

pub mod algorithms;
pub mod cli;
pub mod error;
pub mod fairness;
pub mod generate;
pub mod instance;
pub mod io;
pub mod matroid;
pub mod oracles;
pub mod shares;
pub mod subset;
pub mod union;
pub mod valuation;

pub use algorithms::{alg_mms, alg_pmms, solve, welfare, Fairness, SolveReport, Step};
pub use error::{Error, Result};
pub use fairness::{
    certify_no_mms_allocation, fixture, fixtures, is_ef1, is_envy_free, is_mms, is_pmms,
    is_pmms_with, Alpha, FairnessVerdict, Fixture, Property, ShareMethod, Witness,
};
pub use generate::{generate, Family, GeneratorConfig};
pub use instance::Instance;
pub use io::{allocation_to_string, instance_to_string, parse_allocation, parse_instance};
pub use matroid::{
    Axiom, AxiomViolation, ExplicitMatroid, GraphicMatroid, LinearMatroidGf2, Matroid,
    PartitionMatroid, TransversalMatroid, UniformMatroid,
};
pub use oracles::{
    convolution_rank, exhaustive_allocation_scan, exhaustive_max_welfare, exhaustive_mms, BruteCaps,
};
pub use shares::{
    brute_shares_for_instance, mms_brute, mms_fast, shares_for_instance, ShareEntry, SharesTable,
};
pub use subset::Subset;
pub use union::{
    augment, augment_growth, augment_transfer, k_fold_union_rank, max_welfare_allocation,
    max_welfare_allocation_within, shortest_path, union_rank, AugmentingPath, ExchangeGraph,
    PartialAllocation, PathKind,
};
pub use valuation::{BinaryXos, Valuation, ValuationKind, WeightedRank};
