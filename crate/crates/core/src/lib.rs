//! Frames of lattice translates.
//!
//! For a generator `f ∈ L²(ℝ^d)` and an invertible matrix `A`, the system
//! `τ_A(f) = {f(· − Ak) : k ∈ ℤ^d}` is described by the periodization
//!
//! ```text
//! Φ_f^A(γ) = (1/|det A|) Σ_k |f̂((A^T)^{-1}(γ + k))|²,   γ ∈ [0,1)^d.
//! ```
//!
//! `τ_A(f)` is a Bessel sequence with bound `B` when `Φ ≤ B`, a frame
//! sequence with bounds `A, B` when `A ≤ Φ ≤ B` off the zero set of `Φ`, a
//! Riesz sequence when in addition the zero set is null, and orthonormal
//! when `Φ = 1`. This crate tabulates `Φ` with a certified truncation tail,
//! turns the table into a [`classify::Verdict`], and cross-checks the result
//! against finite sections of the Gram matrix.
//!
//! ```
//! use translates::{classify, ClassifyOptions, Generator, LatticeSpec, Verdict};
//! use translates::periodization::compute_phi;
//!
//! let lattice = LatticeSpec::scalar(1.0)?;
//! let hat = Generator::bspline(1, 1)?;
//! let table = compute_phi(&hat, &lattice, 256, None)?;
//! let c = classify(&table, &ClassifyOptions::default())?;
//! assert_eq!(c.verdict, Verdict::RieszSequence);
//! assert!((c.lower.unwrap() - 1.0 / 3.0).abs() < 1e-6);
//! # Ok::<(), translates::Error>(())
//! ```

pub mod classify;
pub mod cli;
pub mod error;
pub mod generator;
pub mod lattice;
pub mod oracle;
pub mod periodization;
mod quadrature;

pub use classify::{classify, Classification, ClassifyOptions, SpectralBounds, Verdict};
pub use error::{Error, Result};
pub use generator::{DecayBound, Generator, GeneratorKind, SampledSpatial};
pub use lattice::{LatticePoint, LatticeSpec, Side};
pub use oracle::{CoefficientVector, GramMatrix};
pub use periodization::{CoefficientTable, PeriodizationTable};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    mod lattices {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/periodization.md")]
    mod periodization {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
