//! Combinatorics of tame periodicity shadows: exact integer and rational
//! linear algebra, extreme-ray computation for the nonnegative kernel,
//! exhaustive enumeration of shades and shadows up to relabelling and
//! global sign, block-decomposed quiver reconstruction, and independent
//! verification of everything the pipeline emits.
//!
//! All computation is exact; no floating point appears anywhere. Every
//! enumeration and reconstruction is deterministic, so equal inputs give
//! byte-identical serialized output regardless of worker count.

pub mod cone;
pub mod enumerate;
pub mod error;
pub mod matrix;
pub mod quiver;
pub mod reconstruct;
pub mod verify;

pub use cone::{
    nonneg_kernel_rays, ps3_decide, ps3_oracle, ConeRay, OracleOutcome, Ps3Certificate,
    Ps3Outcome, Ps3Witness,
};
pub use enumerate::{
    enumerate_shades, enumerate_shades_with, enumerate_shadows, enumerate_shadows_with,
    ps2_holds, tame_row_ok, RecordKind, ShadowRecord, TameFilter,
};
pub use error::Error;
pub use matrix::{
    canonical_form, configured_size_limit, is_singular, permute, rank, rational_kernel_basis,
    skew_rank, Fraction, IntMatrix, Permutation, SkewIntMatrix, DEFAULT_SIZE_LIMIT,
};
pub use quiver::{
    block_classify, block_property_holds, reduced_quiver, signed_adjacency, strip, to_dot,
    BlockKind, BlockMatch, Matching, Quiver,
};
pub use reconstruct::{
    legal_matchings, reconstruct, validate_shadow, CandidateQuiver, ReconstructionOptions,
};
pub use verify::{audit_record, cartan_identity_check, CartanCandidate, Check, Report};
