//! Hahn-Exton q-Bessel functions and the Laurent q-Lommel polynomials.
//!
//! - [`qseries`]: q-shifted factorials and basic hypergeometric series
//! - [`bessel`]: `J_ν(x;q)`, the companion `j_ν(x;q)` and their derivatives
//! - [`lommel`]: recurrence families (`h_{m,ν}`, `V_m`, `p_n`, `P_n`, Al-Salam–Chihara, q-Hermite)
//! - [`spectral`]: Hessenberg spectra, polynomial roots and real zero tables
//! - [`moments`]: moment sequences, the strong moment functional and Gram matrices
//! - [`verify`]: registry of checkable identities with a batch runner

pub mod bessel;
pub mod error;
pub mod lommel;
pub mod moments;
pub mod poly;
pub mod qseries;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use qseries::QContext;
