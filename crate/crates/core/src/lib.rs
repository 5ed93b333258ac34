pub mod codec;
pub mod eval;
pub mod logic;
pub mod minsky;
pub mod reduction;
pub mod vecseq;
