//! Vector-logic associative analysis.
//!
//! Solutions are graded with logic operations only: a query and a stored
//! row are compared coordinatewise, the resulting loss vector is compacted,
//! and compacted vectors are ranked with and/xor/or-reduction. On top of
//! that sit process models over associative tables (feasible-row search,
//! fault diagnosis, quasi-optimal covering for spare-based memory repair)
//! and a simulator of a 4x4 array of vector sequencers that runs the same
//! models as microprograms.
//!
//! * [`vlcore`]: binary and ternary vectors and their operations
//! * [`metric`]: quality criteria and their comparison
//! * [`assoc`]: associative tables, masking, diagnosis, best match
//! * [`cover`]: greedy and exact covering, memory repair pipeline
//! * [`lamp`]: sequencer and grid simulator, assembler, microprograms
//! * [`dq`]: design-solution quality estimate

pub mod assoc;
pub mod cover;
pub mod dq;
pub mod lamp;
pub mod metric;
pub mod vlcore;

pub use assoc::{AssociativeTable, DiagnosisMode};
pub use vlcore::{BitVector, TernaryVector};
