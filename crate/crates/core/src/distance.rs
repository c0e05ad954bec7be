//! Codon eigenvalues, codon distances and single-nucleotide adjacency.

use serde::{Deserialize, Serialize};

use crate::crystal::Weight;
use crate::error::{Error, Result};
use crate::genetic::{codon_record, dimer_record, ChargeSource, Codon, Nucleotide, SENSE_CODONS};

/// `(α, β, γ, η)` plus the source of the root charge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    #[serde(default)]
    pub charges: ChargeSource,
}

impl ModelParams {
    /// Requires `α, β, γ > 0` and `η > 1`.
    pub fn new(alpha: f64, beta: f64, gamma: f64, eta: f64) -> Result<Self> {
        Self::with_eta_min(alpha, beta, gamma, eta, 1.0)
    }

    /// As [`ModelParams::new`] but with `η > 2`.
    pub fn new_strict(alpha: f64, beta: f64, gamma: f64, eta: f64) -> Result<Self> {
        Self::with_eta_min(alpha, beta, gamma, eta, 2.0)
    }

    pub fn with_eta_min(alpha: f64, beta: f64, gamma: f64, eta: f64, eta_min: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if !(eta.is_finite() && eta > eta_min) {
            return Err(Error::InvalidParams(format!("eta must exceed {eta_min}, got {eta}")));
        }
        Ok(Self::new_unchecked(alpha, beta, gamma, eta))
    }

    /// No validation; for probing the eigenvalue outside the physical range.
    pub const fn new_unchecked(alpha: f64, beta: f64, gamma: f64, eta: f64) -> Self {
        ModelParams {
            alpha,
            beta,
            gamma,
            eta,
            charges: ChargeSource::Table,
        }
    }

    pub fn with_charges(mut self, charges: ChargeSource) -> Self {
        self.charges = charges;
        self
    }
}

/// The bracketed part of the eigenvalue:
/// `α Q¹ - β J¹₃ᵥ(J¹₃ᵥ - 1) + 4γ(C_H + C_V)`.
pub fn bracket(c: Codon, p: &ModelParams) -> f64 {
    let root = dimer_record(c.first_dimer());
    let q = f64::from(root.charge(p.charges));
    let j3v = root.j3_v.to_f64();
    let (ch, cv) = codon_record(c).casimirs();
    p.alpha * q - p.beta * j3v * (j3v - 1.0) + 4.0 * p.gamma * (ch + cv)
}

/// `2 (J_{3,H} + η J_{3,V})`.
pub fn weight_factor(w: Weight, eta: f64) -> f64 {
    2.0 * (w.j3_h.to_f64() + eta * w.j3_v.to_f64())
}

/// Eigenvalue `r` of a codon; defined for stop codons too.
pub fn r_value(c: Codon, p: &ModelParams) -> f64 {
    bracket(c, p) * weight_factor(codon_record(c).weight, p.eta)
}

/// `|r(c2) - r(c1)|`.
pub fn distance(c1: Codon, c2: Codon, p: &ModelParams) -> f64 {
    (r_value(c2, p) - r_value(c1, p)).abs()
}

pub fn is_nearest(c1: Codon, c2: Codon) -> bool {
    c1.hamming(&c2) == 1
}

/// Sense codons one substitution away from a sense codon.
pub fn sense_neighbors(c: Codon) -> Result<Vec<Codon>> {
    if c.is_stop() {
        return Err(Error::StopCodon(c.to_string()));
    }
    Ok(SENSE_CODONS
        .iter()
        .copied()
        .filter(|&o| is_nearest(c, o))
        .collect())
}

/// Which position changed and which sign components flipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChangeClass {
    /// 1-based position of the substituted nucleotide.
    pub position: u8,
    pub delta_h: bool,
    pub delta_v: bool,
}

impl ChangeClass {
    /// Pyrimidine↔pyrimidine or purine↔purine.
    pub fn is_transition(&self) -> bool {
        !self.delta_v
    }

    pub fn is_transversion(&self) -> bool {
        self.delta_v
    }
}

pub fn classify_change(c1: Codon, c2: Codon) -> Result<ChangeClass> {
    if !is_nearest(c1, c2) {
        return Err(Error::NotNearest(c1.to_string(), c2.to_string()));
    }
    let (pos, (a, b)) = c1
        .0
        .iter()
        .zip(c2.0.iter())
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .expect("exactly one position differs");
    let (ha, va) = Nucleotide::signs(*a);
    let (hb, vb) = Nucleotide::signs(*b);
    Ok(ChangeClass {
        position: pos as u8 + 1,
        delta_h: ha != hb,
        delta_v: va != vb,
    })
}
