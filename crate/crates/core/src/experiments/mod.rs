//! Dataset generators, the trained and constructive experiment protocols,
//! and seed-sweep reports.

mod dataset;
mod protocols;
mod report;

pub use dataset::*;
pub use protocols::*;
pub use report::*;
