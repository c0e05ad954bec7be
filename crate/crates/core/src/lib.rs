//! Crystal-basis model of codon point mutations.
//!
//! Codons are assigned to irreducible representations of
//! `U_{q→0}(sl(2) ⊕ sl(2))` by the crystal tensor-product rule
//! ([`crystal`], [`genetic`]). Each codon gets a real eigenvalue from which a
//! codon distance follows ([`distance`]); distances weight a single-nucleotide
//! mutation generator ([`rate`]) that is aggregated to amino-acid level
//! ([`aggregate`]) and checked against PET91 inequalities ([`predict`],
//! [`fit`]).

pub mod aggregate;
pub mod crystal;
pub mod dataset;
pub mod distance;
pub mod error;
pub mod fit;
pub mod genetic;
pub mod half;
pub mod io;
pub mod predict;
pub mod rate;

pub use error::{Error, Result};
pub use genetic::{AminoAcid, ChargeSource, Codon, Dimer, Nucleotide, Translation};
pub use half::HalfInt;
