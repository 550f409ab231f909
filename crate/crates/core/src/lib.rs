//! Exact algebra of symmetric Clifford groups and numerical certification of
//! symmetric unitary designs.
//!
//! The crate is organized around a single pipeline:
//!
//! * [`pauli`] — bit-packed signed Pauli operators and GF(2) subgroup algebra.
//! * [`clifford`] — stabilizer tableaux: conjugation, composition, uniform
//!   sampling and exhaustive enumeration of the Clifford group mod phase.
//! * [`canonical`] — Clifford conjugation of any Pauli subgroup into the
//!   standard form `{I,X,Y,Z}^⊗n1 ⊗ {I,Z}^⊗n2 ⊗ {I}^⊗n3`.
//! * [`linalg`] — self-contained dense complex linear algebra (Jacobi
//!   eigensolver, Haar sampling) at desk scale.
//! * [`commutant`] — numerical block decomposition of symmetric unitary
//!   groups, block-Haar sampling, and an exact frame-potential oracle.
//! * [`samplers`] — exact uniform sampling, enumeration, counting and
//!   decomposition of symmetric Clifford groups from their circuit
//!   parameterizations.
//! * [`framepot`] — frame-potential estimators, twirling channels, the
//!   derandomizing D-channel, and design certification.

pub mod canonical;
pub mod clifford;
pub mod commutant;
pub mod framepot;
pub mod linalg;
pub mod pauli;
pub mod samplers;

use thiserror::Error;

/// Crate-wide error type for fallible, data-dependent operations.
///
/// Structural misuse (dimension mismatches, out-of-range qubit indices) is a
/// programming error and panics via debug-friendly assertions instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operator is proportional to the identity")]
    IdentityPauli,
    #[error("operators commute; an anticommuting pair is required")]
    CommutingPair,
    #[error("operator is not symmetric under the given subgroup")]
    NotSymmetric,
    #[error("dense cap exceeded: {0}")]
    CapExceeded(String),
    #[error("enumeration size {size} exceeds cap {cap}")]
    EnumerationCap { size: num_bigint::BigUint, cap: u128 },
    #[error("block decomposition failed verification after {0} retries")]
    DecompositionFailed(usize),
    #[error("unsupported symmetry for this operation: {0}")]
    Unsupported(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Splitmix64 step, used to derive independent per-shard RNG seeds.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic RNG for shard `index` of a run keyed by `seed`.
pub fn shard_rng(seed: u64, index: u64) -> rand_chacha::ChaCha12Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha12Rng::seed_from_u64(mix64(seed ^ mix64(index)))
}
