//! Time-harmonic electromagnetic medium scattering in two and three
//! dimensions: a volume integral equation forward solver for the induced
//! current, synthetic near-field data, and direct sampling indicators that
//! locate scatterers by correlating the data with point-source probes.

pub mod dsm;
pub mod em;
pub mod error;
pub mod forward;
pub mod harness;
pub mod measurement;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
