//! Exact computations in the labyrinth category over a finite ring and the
//! cross-effect calculus of functors on free-module categories.
//!
//! The crate provides four layers:
//!
//! * `ring`, `matrix`, `sets`, `arrows` — canonical residues, dense exact
//!   matrices with Gauss–Jordan elimination over prime moduli, and the
//!   injection/retraction/transportation vocabulary of free modules;
//! * `functor`, `table` — concrete functors into `F_p`-vector spaces (the
//!   linearization `U`, its reduced part, tensor/symmetric/exterior powers,
//!   sums, reductions, and user-supplied evaluation tables);
//! * `crosseffects` — deviations, the composition formula for deviations,
//!   cross-effect bases and idempotents, block decompositions, and
//!   polynomial-degree detection;
//! * `maze`, `phi`, `quadratic` — mazes over a ring with their covering-sum
//!   composition, the evaluation of mazes between cross-effects together with
//!   its inverse reconstruction, and the degree-two generator system.
//!
//! Everything is exact: all checks compare matrices entry by entry, never up
//! to tolerance.

pub mod arrows;
pub mod crosseffects;
pub mod error;
pub mod functor;
pub mod matrix;
pub mod maze;
pub mod phi;
pub mod quadratic;
pub mod report;
pub mod ring;
pub mod sample;
pub mod sets;
pub mod table;

pub use error::{Error, Result};
pub use matrix::ExactMatrix;
pub use ring::RingSpec;
pub use sets::IndexSet;
