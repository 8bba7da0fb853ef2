//! Kirkman triple and quadruple systems with the largest possible min-sum,
//! exact verification, and storage placement built on them.
//!
//! - [`kts`] triples a KTS(n) into a KTS(3n), giving KTS(3^k) with min-sum `3^k`.
//! - [`kqs`] doubles a KQS(n) into a KQS(2n) using a 1-factorization from
//!   [`factorization`], giving KQS(4·2^k) with min-sum `n + 2`.
//! - [`verify`] checks any design exactly; [`oracle`] is a naive second
//!   opinion.
//! - [`placement`] maps chunks to servers and servers to locations.

pub mod cli;
pub mod design;
pub mod error;
pub mod factorization;
pub mod kqs;
pub mod kts;
pub mod oracle;
pub mod placement;
pub mod verify;

pub use design::{
    block_sum, canonical_block, design_stats, min_sum, min_sum_upper_bound, Block, DesignFile,
    Oriented, OrientedQuads, OrientedTriples, ParallelClass, ResolvableDesign, StatsReport,
    SystemKind,
};
pub use error::{Error, Result};
pub use factorization::{
    double_factorization, factorize_2mod4, factorize_even, verify_factorization, OneFactorization,
    Pair,
};
pub use kqs::{base_kqs4, build_kqs, double_kqs};
pub use kts::{base_kts3, build_kts, triple_kts};
pub use verify::{
    verify_admissible, verify_coverage, verify_design, verify_max_min_sum, verify_resolution,
    VerificationReport,
};
