//! Direct sampling indicators and the identities behind them.

mod cross;
mod grid;
mod identities;
mod index;

pub use cross::{cross_product_map, CrossSelector};
pub use grid::{IndexGrid, IndexLabel, LocalMax, SamplingGrid};
pub use identities::{verify_boundary_lemma, verify_correlation_approx, CorrelationRow, LemmaCheck};
pub use index::{
    compute_index_grid, index_combined, index_psi, probe_field, sweep_indices, Dataset, IndexMode, IndexSweep,
};

#[cfg(test)]
mod tests;
