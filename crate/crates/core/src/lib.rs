//! Modified interlacement matrices of 4-regular multigraphs.
//!
//! A 4-regular graph `F` with an Euler system `C` and an arbitrary circuit
//! partition `P` yields a square GF(2) matrix `M(C, P)`. Changing `C` by a
//! κ-transform acts on `M(C, P)` by elementary row operations, which makes
//! rank, nullspace and inverse relations between these matrices directly
//! computable. This crate provides the graph machinery, exact GF(2) linear
//! algebra, executable checks of the resulting identities, and a CLI.

pub mod cli;
pub mod euler;
pub mod gf2;
pub mod graph4;
pub mod interlace;
pub mod profile;
pub mod random;

pub use euler::{hierholzer, EulerSystem, TransitionLabel};
pub use gf2::{Gf2Matrix, Gf2Vector};
pub use graph4::{Circuit, CircuitPartition, Graph4R, HalfEdge, Transition, TransitionSystem};
pub use interlace::{ModifiedInterlacementMatrix, SimpleGraph};
pub use profile::PartitionProfile;
