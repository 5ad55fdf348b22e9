//! Linear error-correcting index codes over finite fields.

pub mod bounds;
pub mod budget;
pub mod cli;
pub mod construct_search;
pub mod decoder;
pub mod error;
pub mod field_linalg;
pub mod index_codes;
pub mod instance;

pub use budget::Budgets;
pub use error::{Error, Result};
