//! Finite-field arithmetic and the linear-algebra kernels built on it:
//! rank, dual spaces, coset leaders and minimum distance.

mod coding;
mod field;
mod gf2;
mod matrix;
mod vector;

pub(crate) use coding::{checked_power, ensure_power_within};
pub use coding::{
    code_min_distance, code_min_distance_generic, coset_leader, for_each_subset, min_encoded_weight,
    parity_check_matrix, DEFAULT_ENUMERATION_BUDGET,
};
pub use field::{prime_power, Elem, Field, DEFAULT_FIELD_CAP};
pub use gf2::PackedRows;
pub use matrix::{for_each_combination, mat_rank, solve_left, Echelon, FMatrix};
pub(crate) use vector::weight;
pub use vector::{hamming_weight, FVector};
