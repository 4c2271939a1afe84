//! Proof-complexity workbench for the implicational fragment of
//! intuitionistic propositional logic.

pub mod circuits;
pub mod dag;
pub mod formula;
pub mod frege;
pub mod interp;
pub mod natded;
mod normal;
pub mod schemas;
pub mod semantics;
pub mod tautgen;
pub mod transforms;
