//! Communication complexity of one-dimensional cellular automata.
//!
//! The crate builds the truth tables of iterated local rules, views them as
//! two-party communication matrices for every way of splitting the input
//! window, and measures them: distinct rows and columns (which give the exact
//! one-round complexity), modular rank bounds, exact partition numbers of
//! tiny matrices and fooling sets. On top of that it verifies explicit
//! one-round protocols exhaustively, implements the rescaling and
//! sub-automaton relations between automata, and classifies the 88
//! elementary rule classes by the growth of their one-round complexity.

pub mod classify;
pub mod config;
pub mod error;
pub mod fooling;
pub mod iterated;
pub mod matrix;
pub mod partition;
pub mod pnm;
pub mod profile;
pub mod protocol;
pub mod rank;
pub mod rescale;
pub mod rule;
pub mod word;

pub use classify::{
    classify_all, classify_growth, sweep, ClassReport, GrowthClass, GrowthLabel, Sweep,
};
pub use config::{Budget, Config, GrowthThresholds, OutputFormat};
pub use error::{Error, Result};
pub use fooling::{verify_fooling_set, FoolingSet, FoolingVerdict};
pub use iterated::IterTable;
pub use matrix::{build_matrix, distinct_counts, DistinctCounts, IterationMatrix, SplitSpec};
pub use partition::partition_number_exact;
pub use pnm::export_matrix_image;
pub use profile::{cc1_profile, CCProfile, SplitRecord};
pub use protocol::{verify_one_round, Direction, Message, OneRoundProtocol, Verification};
pub use rank::{rank_lower_bound, rank_mod_p};
pub use rescale::{
    check_simulation, find_subautomaton, rescale, InjectionWitness, RescalingParams,
};
pub use rule::{canonical_code, LinearityCertificate, LinearityKind, RuleTable, Symmetry};
pub use word::Word;
