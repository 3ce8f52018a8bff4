//! Pauli/Fourier analysis of low-degree quantum objects, shot-level simulation
//! of the measurement primitives that learn them, the learners themselves, and
//! numerical checks of Bohnenblust–Hille type inequalities.

pub mod bh;
pub mod error;
pub mod learn;
pub mod pauli;
pub mod qqa;
pub mod random;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
