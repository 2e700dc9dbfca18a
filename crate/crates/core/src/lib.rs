//! Trailing decimal digits of power towers `^h(q^E) mod 10^n`, the
//! conjectured minimum stabilization heights `f_q(x, y, n)`, and a harness
//! that checks the formulas against a brute-force oracle.

pub mod cli;
pub mod config;
pub mod conjecture;
pub mod error;
pub mod modmath;
pub mod tower;
pub mod verify;

pub use error::{Error, Result};
