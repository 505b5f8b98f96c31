//! Circulant block diagonal 0/1 matrices: exact real rank, rectangle
//! partitions, binary-rank lower-bound certificates and an exact binary-rank
//! search.

pub mod canonical;
pub mod certificates;
pub mod construction;
pub mod error;
pub mod matrix;
pub mod rank;
pub mod solver;

pub use canonical::{canonicalize_2regular, CanonicalForm};
pub use certificates::{
    best_bounds, certify, divides_condition, is_balanced, lin_independence_bound, partition_weight,
    partition_weight_target, row_sequence, theorem_bounds, Axis, BlockSequence, BoundClaim,
    BoundKind, RankReport, Side, TheoremId,
};
pub use construction::{
    complement_partition, dinm_witness, gap_family, merge_construct, trivial_witness, verify_mtr,
    verify_partition, MtrWitness, Partition, PartitionFault, Rectangle,
};
pub use error::{Error, Result};
pub use matrix::{
    build_block_diagonal, build_d, complement, gcd, permute, Block, BlockSpec, GlobalIndex,
    Matrix01,
};
pub use rank::{formula_rank_d, formula_rank_spec, real_rank, Rational};
pub use solver::{
    binary_rank_exact, brute_force_oracle, isolation_lower_bound, isolation_set, BinaryRankOutcome,
    CellOrder, IsolationSet, SearchConfig,
};
