//! Coalgebraic partition refinement with certificates.

pub mod certlogic;
pub mod fixtures;
pub mod model;
pub mod partition;
pub mod semantics;
pub mod translate;
