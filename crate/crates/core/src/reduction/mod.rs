//! From two-counter machines to MSO+U formulas over `{1,2,3,4}`, with the
//! intended models generated and checked directly.

pub mod blocks;
pub mod builder;
mod compile;
mod witness;

use thiserror::Error;

pub use blocks::{BlockPredicates, TreeIndex};
pub use compile::{increment_formula, machine_to_formula, ruler_formula, same_degree_formula, selector_formula, zero_formula};
pub use witness::{
    check_conditions, column_degrees, increment_window, same_degree_window, witness_tree_sequence, witness_trees,
    zero_window, Report, TreeDegrees, WitnessParams,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("run description must have positive even length, got {0}")]
    DescriptionLength(usize),
    #[error("invalid growth: {0}")]
    Growth(String),
    #[error("expected depth-4 trees, got depth {0}")]
    Depth(usize),
    #[error("prefix {prefix} leaves no trees out of {trees}")]
    Prefix { prefix: usize, trees: usize },
}
