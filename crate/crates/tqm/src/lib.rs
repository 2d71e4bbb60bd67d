//! Exact rational engine for the universal trace of topological quantum
//! mechanics on (matrix valued) Weyl algebras.
//!
//! Everything is computed over `Q` with sparse term maps. The modules build
//! on each other in order: [`weyl`] provides the Moyal product, [`forms`] the
//! formal de Rham algebra with `d`, `ι_Π`, `Δ` and BV integration, [`cyclic`]
//! the Hochschild and Connes operators, [`configspace`] the circle
//! configuration space integrals, [`expectation`] the free and interacting
//! expectation maps, [`liealg`] the Harish-Chandra pair data and
//! characteristic cochains, and [`trace`] the universal trace itself.

pub mod configspace;
pub mod cyclic;
pub mod error;
pub mod expectation;
pub mod forms;
pub mod liealg;
pub mod literal;
pub mod rational;
pub mod sample;
pub mod trace;
pub mod weyl;

pub use error::{Error, Result};
pub use rational::Q;
