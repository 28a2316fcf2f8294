//! Minimum-membership set cover with axis-parallel unit squares.
//!
//! Given points `P`, witness points `P'` and unit squares `S`, choose a
//! subset of `S` covering `P` that keeps the largest number of chosen
//! squares over any single witness small. The pipeline solves line
//! instances by local swaps, splits unit-height slabs into two line
//! instances with an LP relaxation, and unions the slab covers.

pub mod clique;
pub mod error;
pub mod geometry;
pub mod gmmgsc;
pub mod io;
pub mod line_solver;
pub mod lp;
pub mod oracle;
pub mod par;
pub mod slab_solver;

pub use error::{Error, Result};
pub use geometry::{membership, Instance, LineInstance, Point, Side, SquareId, Strictness, UnitSquare};
pub use gmmgsc::{derive_ply_points, solve, InstanceKind, Problem};
pub use line_solver::solve_line;
pub use par::Execution;
pub use slab_solver::{solve_slab, SlabInstance};

/// Knobs shared by every solver entry point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub strictness: Strictness,
    pub execution: Execution,
}

impl SolveOptions {
    pub fn sequential() -> Self {
        Self { execution: Execution::Sequential, ..Self::default() }
    }
}
