//! Construct, search, and analyze Sidon sets (Golomb rulers) with exact
//! arithmetic.
//!
//! A Sidon set is a set of integers whose pairwise differences are all
//! distinct. This crate builds them (greedy, Singer, Bose, Ruzsa), proves
//! minimal diameters for small sizes by branch and bound, scans dilations
//! of modular constructions for record rulers at every size, and analyzes
//! window profiles: an exact rational identity ties a set's diameter to
//! the variance of its window-count profile plus a measure of its missing
//! small differences, and a parameter optimization over that identity
//! certifies the constant in the leading-order diameter lower bound.

pub mod bounds;
pub mod constructions;
pub mod gf;
pub mod optimize;
pub mod rational;
pub mod search;
pub mod set;
pub mod windows;

pub use bounds::{
    coarse_bound, combined_bound, delta_formula, diameter_lower_bound,
    fragment_difference_counts, r2_upper_bound, smalls_bound, variance_bound,
    variance_certificate, w_form, BoundParams, BoundReport, BoundsError, CoarseBound,
    DiameterBound, FragmentCounts, SmallsBound, VarianceCertificate, Vertex, WForm,
};
pub use constructions::{
    bose, construct, ruzsa, singer, Construction, ConstructError, ModularSidonSet, Provenance,
};
pub use optimize::{
    anneal, ideal_tau2, objective, AnnealOutcome, OptimizeError, OptimizerConfig, REFERENCE_POINT,
};
pub use rational::{
    decimal_over_sqrt, decimal_string, floor_div_sqrt, isqrt, isqrt_u128, parse_rational,
    ParseRationalError,
};
pub use search::{
    best_k_window, dilate, ingest_external, parse_ruler_line, run_search, SearchConfig,
    SearchError, SearchRecord, SearchTable, Source,
};
pub use set::{
    exhaustive_optimal, greedy_sidon, is_modular_sidon, is_sidon, minimal_diameter_by_enumeration,
    BudgetExceeded, DiffMask, ModularError, SearchBudget, SidonError, SidonSet,
};
pub use windows::{
    bound_window, default_window, edge_variance_fraction, et_best_window, et_identity_check,
    et_lower_bound, s_statistic, scaled_window, trim, u_partition, v_statistic, EtLowerBound,
    LevelPartition, TrimmedSet, WindowError, WindowProfile,
};
