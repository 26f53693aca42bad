//! Exact symbolic engine for the additive shuffle algebra of a quiver.
//!
//! Everything here is exact arithmetic over `BigRational`; there is no floating
//! point anywhere. The crate is `no_std` + `alloc` so the engine stays free of
//! IO, clocks and host concerns; the companion CLI crate owns those.
//!
//! Module layout follows the pipeline:
//!
//! * [`scalar`], [`poly`], [`linear`], [`ratfun`], [`series`], [`rank`], [`rng`]:
//!   exact arithmetic (polynomials, linear-form rational functions, Laurent
//!   expansion and residues, fraction-free rank over Q(h)).
//! * [`quiver`]: vertices, arrows, Cartan matrices, arrow weights `m_h`.
//! * [`shuffle`]: weighted shuffle elements, the kernel `fac`, the product,
//!   the localized product and the embedding between them.
//! * [`words`]: generator words, their shuffle images, graded span tables.
//! * [`relations`]: (Y4), Serre (Y6) and the generating-series oracle.
//! * [`pairing`]: residue pairings on rank-one pieces and the Cartan series table.
//! * [`census`]: root data, PBW dimension predictions, bigrade and triangular
//!   consistency checks.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

use alloc::string::String;
use core::fmt;

pub mod census;
pub mod expr;
pub mod linear;
pub mod pairing;
pub mod poly;
pub mod quiver;
pub mod rank;
pub mod ratfun;
pub mod relations;
pub mod rng;
pub mod scalar;
pub mod series;
pub mod shuffle;
pub mod words;

pub use scalar::Rat;

/// Errors surfaced by the engine. Structural misuse (weight mismatches,
/// asymmetric inputs) is reported with enough detail to point at the offender.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Expression could not be parsed; `at` is a byte offset into the input.
    Parse { msg: String, at: usize },
    /// A polynomial claimed to be symmetric is not; carries the vertex and the
    /// 1-based slot transposition that breaks it.
    NotSymmetric { vertex: usize, swap: (u16, u16) },
    /// Operands live in incompatible weights or over different quivers.
    Shape(String),
    /// Bad quiver data (ids, Cartan matrix, loops without permission, ...).
    Quiver(String),
    /// Evaluation point sits on a pole of the rational function.
    PoleAtPoint(String),
    /// A configured resource budget was exceeded; reported, not fatal.
    Budget { stage: &'static str, detail: String },
    /// Unsupported input for this operation (documented restrictions).
    Unsupported(String),
    /// Invariant violation inside the engine; always a bug if seen.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { msg, at } => write!(f, "parse error at byte {at}: {msg}"),
            Error::NotSymmetric { vertex, swap } => write!(
                f,
                "polynomial is not symmetric: swapping slots {} and {} at vertex {} changes it",
                swap.0, swap.1, vertex
            ),
            Error::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            Error::Quiver(msg) => write!(f, "bad quiver: {msg}"),
            Error::PoleAtPoint(msg) => write!(f, "evaluation at a pole: {msg}"),
            Error::Budget { stage, detail } => write!(f, "budget exceeded in {stage}: {detail}"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

/// Desk-scale resource caps shared by the expensive operations.
///
/// `max_weight_norm` caps the 1-norm of any dimension vector fed to span or
/// census enumeration; `max_fdeg` caps the filtration degree of generator
/// words. Both are overridable from the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_weight_norm: u32,
    pub max_fdeg: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_weight_norm: 4, max_fdeg: 6 }
    }
}

impl Budget {
    pub fn check_weight(&self, norm: u32, stage: &'static str) -> Result<()> {
        if norm > self.max_weight_norm {
            return Err(Error::Budget {
                stage,
                detail: alloc::format!(
                    "weight 1-norm {norm} exceeds cap {}",
                    self.max_weight_norm
                ),
            });
        }
        Ok(())
    }

    pub fn check_fdeg(&self, fdeg: u32, stage: &'static str) -> Result<()> {
        if fdeg > self.max_fdeg {
            return Err(Error::Budget {
                stage,
                detail: alloc::format!("filtration degree {fdeg} exceeds cap {}", self.max_fdeg),
            });
        }
        Ok(())
    }
}
