//! The 61×61 single-nucleotide mutation generator and its evolution matrices.
//!
//! Entry `(j, i)` is the rate (or probability) of the move `i → j`: columns are
//! indexed by the source codon. A generator has non-negative off-diagonal
//! entries and zero column sums; `exp(Q t)` and `1 + τ Q` are then
//! column-stochastic.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::distance::{is_nearest, r_value, ModelParams};
use crate::error::{Error, Result};
use crate::genetic::{Codon, SENSE_CODONS};

pub const SENSE_COUNT: usize = 61;

/// Transition strength `F(d)`, a decreasing function of the codon distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Strength {
    /// `exp(-λ d)`.
    Exponential { lambda: f64 },
    /// `(1 + d / scale)^(-p)`.
    PowerLaw { p: f64, scale: f64 },
    /// `c`, independent of the distance.
    Constant { c: f64 },
}

impl Default for Strength {
    fn default() -> Self {
        Strength::Exponential { lambda: 0.01 }
    }
}

impl Strength {
    pub fn exponential(lambda: f64) -> Result<Self> {
        Strength::Exponential { lambda }.validated()
    }

    pub fn power_law(p: f64, scale: f64) -> Result<Self> {
        Strength::PowerLaw { p, scale }.validated()
    }

    pub fn constant(c: f64) -> Result<Self> {
        Strength::Constant { c }.validated()
    }

    fn validated(self) -> Result<Self> {
        let params: &[(&str, f64)] = match &self {
            Strength::Exponential { lambda } => &[("lambda", *lambda)],
            Strength::PowerLaw { p, scale } => &[("p", *p), ("scale", *scale)],
            Strength::Constant { c } => &[("c", *c)],
        };
        for (name, v) in params {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidStrength(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(self)
    }

    pub fn eval(&self, d: f64) -> f64 {
        match *self {
            Strength::Exponential { lambda } => (-lambda * d).exp(),
            Strength::PowerLaw { p, scale } => (1.0 + d / scale).powf(-p),
            Strength::Constant { c } => c,
        }
    }

    /// The same shape with every rate multiplied by `k`, where the shape
    /// allows it (`Constant` only); used for scale-invariance checks.
    pub fn scaled(&self, k: f64) -> Option<Self> {
        match *self {
            Strength::Constant { c } => Some(Strength::Constant { c: c * k }),
            _ => None,
        }
    }
}

/// `exp:lambda=0.01`, `power:p=2,scale=10`, `const:c=1`.
impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strength::Exponential { lambda } => write!(f, "exp:lambda={lambda:?}"),
            Strength::PowerLaw { p, scale } => write!(f, "power:p={p:?},scale={scale:?}"),
            Strength::Constant { c } => write!(f, "const:c={c:?}"),
        }
    }
}

impl FromStr for Strength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidStrength(format!("{s:?}: {why}"));
        let (kind, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut lambda = None;
        let mut p = None;
        let mut scale = None;
        let mut c = None;
        for kv in rest.split(',').filter(|kv| !kv.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let v: f64 = v.trim().parse().map_err(|_| bad("malformed number"))?;
            let slot = match k.trim() {
                "lambda" => &mut lambda,
                "p" => &mut p,
                "scale" => &mut scale,
                "c" => &mut c,
                other => return Err(bad(&format!("unknown key {other:?}"))),
            };
            *slot = Some(v);
        }
        match kind {
            "exp" => {
                Strength::exponential(lambda.ok_or_else(|| bad("missing lambda"))?)
            }
            "power" => Strength::power_law(
                p.ok_or_else(|| bad("missing p"))?,
                scale.unwrap_or(1.0),
            ),
            "const" => Strength::constant(c.unwrap_or(1.0)),
            _ => Err(bad("unknown kind")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Generator,
    Evolution,
    Stochastic,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Generator => "generator",
            MatrixKind::Evolution => "evolution",
            MatrixKind::Stochastic => "stochastic",
        }
    }
}

impl FromStr for MatrixKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "generator" => Ok(MatrixKind::Generator),
            "evolution" => Ok(MatrixKind::Evolution),
            "stochastic" => Ok(MatrixKind::Stochastic),
            other => Err(Error::Malformed(format!("unknown matrix kind {other:?}"))),
        }
    }
}

/// Provenance carried by every exported matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub params: ModelParams,
    pub strength: Strength,
    /// Evolution time `t` or step `τ`, when applicable.
    pub time: Option<f64>,
}

/// A matrix over the 61 sense codons in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct CodonMatrix {
    pub kind: MatrixKind,
    pub meta: Metadata,
    pub entries: DMatrix<f64>,
}

impl CodonMatrix {
    pub fn labels(&self) -> &'static [Codon] {
        &SENSE_CODONS
    }

    /// Rate or probability of `from → to`.
    pub fn get(&self, to: Codon, from: Codon) -> f64 {
        let j = crate::genetic::sense_index(to).expect("sense codon");
        let i = crate::genetic::sense_index(from).expect("sense codon");
        self.entries[(j, i)]
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.entries.column_iter().map(|c| c.sum()).collect()
    }

    pub fn max_exit_rate(&self) -> f64 {
        self.entries.diagonal().iter().fold(0.0_f64, |m, d| m.max(d.abs()))
    }

    fn expect_kind(&self, kind: MatrixKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::WrongMatrixKind {
                expected: kind.as_str(),
                found: self.kind.as_str(),
            });
        }
        Ok(())
    }
}

/// `Q_ji = F(d_ji)` for nearest sense codons, zero otherwise, with
/// `Q_ii = -Σ_{j≠i} Q_ji`.
pub fn build_generator(p: &ModelParams, f: &Strength) -> CodonMatrix {
    let codons: &[Codon] = &SENSE_CODONS;
    let r: Vec<f64> = codons.iter().map(|&c| r_value(c, p)).collect();
    let mut q = DMatrix::<f64>::zeros(SENSE_COUNT, SENSE_COUNT);
    for i in 0..SENSE_COUNT {
        let mut exit = 0.0;
        for j in 0..SENSE_COUNT {
            if i != j && is_nearest(codons[i], codons[j]) {
                let rate = f.eval((r[j] - r[i]).abs());
                q[(j, i)] = rate;
                exit += rate;
            }
        }
        q[(i, i)] = -exit;
    }
    CodonMatrix {
        kind: MatrixKind::Generator,
        meta: Metadata {
            params: *p,
            strength: *f,
            time: None,
        },
        entries: q,
    }
}

/// `P(t) = exp(Q t)`.
pub fn evolve(q: &CodonMatrix, t: f64) -> Result<CodonMatrix> {
    q.expect_kind(MatrixKind::Generator)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParams(format!("time must be non-negative, got {t}")));
    }
    let scaled = &q.entries * t;
    Ok(CodonMatrix {
        kind: MatrixKind::Evolution,
        meta: Metadata {
            time: Some(t),
            ..q.meta
        },
        entries: expm(&scaled),
    })
}

/// `1 + τ Q`; requires `τ max|Q_ii| ≤ 1`.
pub fn discrete_step(q: &CodonMatrix, tau: f64) -> Result<CodonMatrix> {
    q.expect_kind(MatrixKind::Generator)?;
    let max_exit = q.max_exit_rate();
    if !(tau.is_finite() && tau >= 0.0) || tau * max_exit > 1.0 {
        return Err(Error::TimeStepTooLarge {
            tau,
            bound: 1.0 / max_exit,
        });
    }
    let n = q.entries.nrows();
    let entries = DMatrix::<f64>::identity(n, n) + &q.entries * tau;
    Ok(CodonMatrix {
        kind: MatrixKind::Stochastic,
        meta: Metadata {
            time: Some(tau),
            ..q.meta
        },
        entries,
    })
}

/// One-PAM matrix `1 + 0.1 Q`.
pub fn pam_matrix(q: &CodonMatrix) -> Result<CodonMatrix> {
    discrete_step(q, 0.1)
}

/// Maximum absolute column sum.
pub fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2; the
/// series stops once the next term's norm falls below `1e-16` of the partial
/// sum's norm.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "matrix exponential needs a square matrix");
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a / 2f64.powi(squarings as i32);

    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=60 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if one_norm(&term) <= 1e-16 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Largest deviation of any column from the mean column (max norm).
pub fn column_spread(m: &DMatrix<f64>) -> f64 {
    let mean = m.column_mean();
    m.column_iter()
        .map(|c| (c - &mean).amax())
        .fold(0.0, f64::max)
}
