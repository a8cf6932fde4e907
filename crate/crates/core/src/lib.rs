//! Ground states of the subcritical NLS energy on metric graphs.

pub mod graph;
pub mod quad;
pub mod soliton;
pub mod mesh;
pub mod function;
mod solver;
pub mod rearrangement;
pub mod minimizer;
pub mod experiment;
