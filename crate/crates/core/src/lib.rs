//! Numerical toolkit for information distances to normality.
//!
//! The crate works with one-dimensional laws given either as
//! [`MixedDistribution`]s (a sampled absolutely continuous part plus finitely
//! many atoms) or as [`GridDensity`] samples, and computes
//!
//! * the relative entropy `D(X)` to the normal law with matching mean and
//!   variance, the entropy power and the standardized Fisher distance
//!   `J_st(X)` ([`info`]);
//! * Gaussian regularization `X + σZ`, truncation, convolution and the
//!   Kolmogorov / total-variation distances ([`dist`]);
//! * characteristic functions continued to the complex plane ([`charfn`]) and
//!   the saddle-point (contour-shifted) density inversion ([`saddle`]);
//! * the cubic-phase counterexample family and its asymptotics ([`cramer`]);
//! * an experiment runner evaluating the inequality suite on pairs of laws
//!   ([`harness`]).
//!
//! The crate is `no_std` and only needs `alloc`. All logarithms are natural.
#![no_std]
#![cfg_attr(docsrs, feature(doc_cfg))]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod charfn;
pub mod cramer;
pub mod dist;
mod error;
pub mod fft;
mod grid;
pub mod harness;
pub mod info;
pub mod saddle;
pub mod special;

pub use charfn::{CharFn, LogImag, SandwichReport};
pub use cramer::{AsymptoticsReport, CounterexampleLaw, CubicPhaseCF};
pub use dist::{Atom, MixedDistribution, NormalParams, Regularized, TruncationParams};
pub use error::{Error, Result};
pub use grid::{GridDensity, GridSpec};
pub use harness::StabilityReport;
pub use info::{DistanceResult, EntropyResult, InequalityReport};
pub use saddle::{InversionResult, SaddleSolution};
