//! Spin dynamics of an atom pair in an optical tweezer.
//!
//! The pipeline mirrors the experiment: collisions relax `|0,0⟩` into the
//! symmetric pair states ([`relaxation`]), an optional parity-dephasing step
//! destroys the pair coherence ([`spin::parity_dephasing`]), Raman pulses
//! rotate both atoms ([`pulse`]), and a push-out readout counts survivors
//! ([`detection`]). [`inference`] compares the resulting curves with count
//! data.

pub mod detection;
pub mod error;
pub mod inference;
pub mod par;
pub mod pulse;
pub mod relaxation;
pub mod spin;

pub use error::{Error, Result};
