//! Volume integral equation for the induced current: grid, self term,
//! finite-difference `P`, and dense or iterative solves.

mod gmres;
mod grid;
mod operator;
mod selfterm;
mod system;

pub use gmres::{gmres, GmresOptions, GmresOutcome};
pub use grid::{build_grid, VolumeGrid};
pub use operator::{assemble_p_operator, POperator, StencilEntry};
pub use selfterm::diagonal_self_term;
pub use system::{solve_current, ForwardSystem, InducedCurrentField, Solver, DEFAULT_HALO, DENSE_LIMIT};
