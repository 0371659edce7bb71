//! Numerical engine for the Brownian loop soup with randomly marked loops.
//!
//! Each loop of the soup carries an independent random mark `X`. The
//! exponentials `exp(i β N(z))` of the marked layering (or winding) count are
//! conformal primaries whose dimensions are fixed by the characteristic
//! function `φ(β) = E[exp(iβX)]` of the mark. The crate provides
//!
//! * [`charfn`]: mark distributions, `φ`, and the layering/winding dimensions;
//! * [`special`]: the hypergeometric pieces, `Γ`, the constant `μ` and the
//!   crossing-symmetric function `A(x)`;
//! * [`correlators`]: closed-form plane and half-plane correlators, the
//!   subset-product skeleton and the Möbius / free-field utilities;
//! * [`blocks`]: Virasoro blocks to level 3 and extraction of the
//!   three-point coefficient products from the four-point function;
//! * [`mc`]: a Monte Carlo sampler of the loop soup used to check loop
//!   weights and one-point scaling independently;
//! * [`cli`]: the `bls` command-line front end.

pub mod blocks;
pub mod charfn;
pub mod cli;
pub mod correlators;
mod error;
pub mod identities;
pub mod io;
pub mod mc;
pub mod special;

pub use error::{Error, Result};

pub use num_complex::Complex64;
