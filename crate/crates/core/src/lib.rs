//! Executable checkers for concave singular value inequalities.
//!
//! The crate evaluates the generalized Mirsky inequality
//! `sum_k |f(sigma_{i_k}(X)) - f(sigma_{i_k}(Y))| <= sum_{k<=m} f(sigma_k(X - Y))`
//! for admissible concave `f`, the Thompson-Freede inequalities and their
//! concave versions, and the exchange inequality, and replays the proofs of
//! these statements step by step on concrete matrices.

pub mod bounds;
pub mod campaign;
pub mod concave;
pub mod ensemble;
pub mod error;
pub mod index;
pub mod ineq;
pub mod matrix;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod search;
pub mod spectrum;
pub mod trace;

pub use bounds::{truncate_rank, BoundResult, SchattenDeviation};
pub use campaign::{run_campaign, CampaignConfig, CampaignSummary, CheckKind, Witness, WitnessKind};
pub use concave::{hook_decompose, pwl_approximate, ConcaveFn, HookMeasure};
pub use ensemble::{Ensemble, EnsembleKind};
pub use error::{Error, Result};
pub use index::{classify_pairs, enumerate_tf_pairs, tfw_index_build, IndexPartition, IndexSeq, Side, TfPair};
pub use ineq::{threshold_indices, Checker};
pub use matrix::ComplexMatrix;
pub use oracle::{exhaustive_oracle, OracleReport};
pub use report::{GapReport, TraceReport};
pub use search::{FVersionWitness, NegativeConvention, SearchConfig, SearchSource};
pub use spectrum::{hermitian_eigenvalues, singular_values, wielandt_embed, Spectrum, SpectrumKind};
