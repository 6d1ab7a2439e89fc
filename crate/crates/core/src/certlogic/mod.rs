//! Certificates: modal formulae, stored in one shared DAG, that describe
//! each block of the refinement exactly.

mod build;
mod dag;
mod render;

pub use build::{attach_certificates, Ancestry, CertBuilder, CertMap};
pub use dag::{node_bound, DagStats, EdgeRef, FormulaDag, Node, NodeId};
pub use render::{parse_dag, render_text, serialize_dag};

use crate::model::StateId;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CertError {
    #[error("trace was produced in {trace} mode, certificates requested in {requested} mode")]
    ModeMismatch { trace: &'static str, requested: &'static str },
    #[error("trace covers {trace} states, system has {system}")]
    SizeMismatch { trace: usize, system: usize },
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("dangling node reference {0}")]
    Dangling(NodeId),
    #[error("malformed DAG JSON: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distinction {
    Equivalent,
    /// Holds at the first state and fails at the second.
    Formula(EdgeRef),
}

/// Finds the oldest conjunct on which the certificates of x and y differ
/// and returns x's version of it.
pub fn distinguish(x: StateId, y: StateId, map: &CertMap, dag: &FormulaDag) -> Result<Distinction, CertError> {
    let n = map.state_count();
    for s in [x, y] {
        if s >= n {
            return Err(CertError::UnknownState(s));
        }
    }
    if map.block_of(x) == map.block_of(y) {
        return Ok(Distinction::Equivalent);
    }
    for s in [x, y] {
        if !dag.contains(map.certificate(s)) {
            return Err(CertError::Dangling(map.certificate(s).node));
        }
    }
    let cx = map.conjuncts(map.certificate(x));
    let cy = map.conjuncts(map.certificate(y));
    let i = cx
        .iter()
        .zip(&cy)
        .position(|(a, b)| a.0 != b.0)
        .expect("certificates of different blocks diverge");
    Ok(Distinction::Formula(EdgeRef::pos(cx[i].1)))
}
