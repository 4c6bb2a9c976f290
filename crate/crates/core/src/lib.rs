//! Symbolic calculator for gauge groups of Real and Quaternionic bundles over Real surfaces.

pub mod bundles;
pub mod cli;
pub mod decompose;
pub mod groups;
pub mod homotopy;
pub mod spaces;
pub mod surfaces;
pub mod tables;
