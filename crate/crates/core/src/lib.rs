//! Averaged functions, zero counting and limit-cycle design for piecewise complex
//! perturbations of the holomorphic center `ż = i(z² - 1)/2`.

pub mod audit;
pub mod cli;
pub mod closed;
pub mod designer;
pub mod error;
pub mod perturbation;
pub mod pwsim;
pub mod quadrature;
pub mod rootkit;

pub use error::{Error, Result};
