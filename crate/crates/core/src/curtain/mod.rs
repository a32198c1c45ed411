//! The curtain model over CAT(0) backends.

pub mod backend;
pub mod chains;
pub mod dual;
pub mod empirical;
pub mod model;
pub mod reparam;
