//! Exact enumeration of independent sets on m×n king graphs.
//!
//! Independent sets of the king graph are non-attacking king placements on an
//! m×n board. They biject with packings of non-overlapping 2×2 blocks in the
//! (m+1)×(n+1) boundary grid, which turns the count into a Wang-tiling
//! enumeration. This crate ships two independent engines, a Wang-tile
//! frontier contraction ([`wang`]) and a bitmask row-profile transfer
//! ([`profile_dp`]), plus brute-force oracles ([`kinggraph`]), a constants
//! pipeline for the hard-core-model limits ([`estimate`]), and result
//! persistence with reference fixtures ([`catalog`]).
//!
//! All enumeration results are exact arbitrary-precision integers.

pub mod catalog;
pub mod estimate;
pub mod kinggraph;
pub mod profile_dp;
pub mod wang;

pub use kinggraph::{CountTable, GridShape};

/// Arbitrary-precision nonnegative integer; the type of every enumeration result.
pub type BigCount = num_bigint::BigUint;

/// Errors shared across the enumeration and estimation modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid dimensions must be at least 1x1, got {m}x{n}")]
    InvalidShape { m: u32, n: u32 },
    #[error("shape {m}x{n} exceeds the brute-force limit ({limit})")]
    ShapeTooLarge { m: u32, n: u32, limit: &'static str },
    #[error("merge width {l} outside the supported range 1..=8")]
    MergeWidthOutOfRange { l: usize },
    #[error("profile width {width} outside the supported range 1..={max}")]
    WidthOutOfRange { width: usize, max: usize },
    #[error("predicted state count {predicted} exceeds the budget of {budget} live states")]
    BudgetExceeded { predicted: u128, budget: usize },
    #[error("logarithmic density requires a positive count")]
    NonPositiveValue,
    #[error("quadratic peak interpolation requires strict concavity at the maximum")]
    NotConcave,
    #[error("affine fit requires at least two records with distinct abscissae")]
    DegenerateFit,
    #[error("not enough records after filtering: got {got}, need {need}")]
    InsufficientData { got: usize, need: usize },
    #[error("conflicting payload for {key}: journal holds a different value")]
    IntegrityError { key: String },
    #[error("b-file indices must be strictly increasing: {prev} then {next}")]
    NonMonotoneIndex { prev: u64, next: u64 },
    #[error("malformed journal line {line}: {detail}")]
    CorruptJournal { line: usize, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fibonacci numbers with F(1) = F(2) = 1.
///
/// Valid through F(93), the largest Fibonacci number that fits in a `u64`.
pub fn fibonacci(k: u32) -> u64 {
    assert!(k <= 93, "fibonacci({k}) overflows u64");
    if k == 0 {
        return 0;
    }
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 1..k {
        let next = a + b;
        a = b;
        b = next;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::fibonacci;

    #[test]
    fn fibonacci_base_cases() {
        assert_eq!(fibonacci(0), 0);
        assert_eq!(fibonacci(1), 1);
        assert_eq!(fibonacci(2), 1);
        assert_eq!(fibonacci(10), 55);
        assert_eq!(fibonacci(41), 165_580_141);
        assert_eq!(fibonacci(93), 12_200_160_415_121_876_738);
    }
}
