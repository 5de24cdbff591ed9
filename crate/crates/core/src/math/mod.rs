//! Exact rationals, multi-indices, dense symmetric linear algebra and seeded randomness.

pub mod combinat;
pub mod dense;
pub mod multi_index;
pub mod rng;
pub mod scalar;
pub mod sym;

pub use combinat::{big_ln, binomial, binomial_f64, factorial, odd_double_factorial};
pub use multi_index::MultiIndex;
pub use rng::{par_blocks, MeanVar, RngSeed, SeededRng};
pub use scalar::{format_rat, parse_rat, rat, rat_int, rat_to_f64, Rat, Scalar};
pub use sym::{exact_rank, sym_eig, ExactEchelon, SymEigen, SymMatrix};
