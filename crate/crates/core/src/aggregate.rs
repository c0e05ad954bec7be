//! Amino-acid substitution matrices aggregated from codon matrices.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::distance::{is_nearest, ModelParams};
use crate::error::{Error, Result};
use crate::genetic::{sense_index, AminoAcid, Codon, SENSE_CODONS};
use crate::rate::{build_generator, CodonMatrix, MatrixKind, Metadata, Strength};

const NORMALIZATION_TOL: f64 = 1e-12;

/// Codon frequencies within each synonym family (`f_i^a`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodonUsage {
    freq: BTreeMap<Codon, f64>,
}

impl CodonUsage {
    /// `f_i^a = 1 / |multiplet(a)|`.
    pub fn uniform() -> Self {
        let freq = AminoAcid::ALL
            .iter()
            .flat_map(|a| {
                let m = a.multiplet();
                m.iter().map(move |&c| (c, 1.0 / m.len() as f64))
            })
            .collect();
        CodonUsage { freq }
    }

    /// Normalizes arbitrary non-negative codon frequencies within each family.
    /// Stop codons are ignored; every sense codon must be present.
    pub fn from_frequencies(raw: &BTreeMap<Codon, f64>) -> Result<Self> {
        let mut freq = BTreeMap::new();
        for a in AminoAcid::ALL {
            let m = a.multiplet();
            let mut values = Vec::with_capacity(m.len());
            for c in m {
                let v = *raw
                    .get(c)
                    .ok_or_else(|| Error::UsageMissingCodon(c.to_string()))?;
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::MalformedNumber(format!("{c}: {v}")));
                }
                values.push(v);
            }
            let total: f64 = values.iter().sum();
            if total <= 0.0 {
                return Err(Error::UsageNotNormalized {
                    amino_acid: a.to_string(),
                    sum: total,
                });
            }
            // already-normalized families are kept bit-for-bit
            let scale = if (total - 1.0).abs() <= NORMALIZATION_TOL { 1.0 } else { total };
            for (c, v) in m.iter().zip(values) {
                freq.insert(*c, v / scale);
            }
        }
        Ok(CodonUsage { freq })
    }

    /// Takes frequencies as given; each family must already sum to 1.
    pub fn from_normalized(freq: BTreeMap<Codon, f64>) -> Result<Self> {
        let usage = CodonUsage { freq };
        usage.validate()?;
        Ok(usage)
    }

    pub fn validate(&self) -> Result<()> {
        for a in AminoAcid::ALL {
            let mut sum = 0.0;
            for c in a.multiplet() {
                sum += self
                    .freq
                    .get(c)
                    .ok_or_else(|| Error::UsageMissingCodon(c.to_string()))?;
            }
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::UsageNotNormalized {
                    amino_acid: a.to_string(),
                    sum,
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, c: Codon) -> f64 {
        self.freq.get(&c).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Codon, &f64)> {
        self.freq.iter()
    }
}

impl Default for CodonUsage {
    fn default() -> Self {
        Self::uniform()
    }
}

/// 20×20 matrix; entry `(b, a)` is the flow `a → b`, labels in
/// [`AminoAcid::ALL`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct AminoAcidMatrix {
    pub source_kind: MatrixKind,
    pub meta: Metadata,
    pub entries: DMatrix<f64>,
}

impl AminoAcidMatrix {
    /// Flow `from → to`.
    pub fn get(&self, to: AminoAcid, from: AminoAcid) -> f64 {
        self.entries[(to.index(), from.index())]
    }
}

/// `M(b, a) = Σ_{i∈a} Σ_{j∈b, nearest} f_i^a · cm(j, i)`.
///
/// The diagonal collects synonymous flow between distinct nearest codons.
pub fn aggregate(cm: &CodonMatrix, usage: &CodonUsage) -> Result<AminoAcidMatrix> {
    usage.validate()?;
    let mut m = DMatrix::<f64>::zeros(20, 20);
    for a in AminoAcid::ALL {
        for &i in a.multiplet() {
            let fi = usage.get(i);
            let ii = sense_index(i).expect("sense");
            for b in AminoAcid::ALL {
                for &j in b.multiplet() {
                    if is_nearest(i, j) {
                        let jj = sense_index(j).expect("sense");
                        m[(b.index(), a.index())] += fi * cm.entries[(jj, ii)];
                    }
                }
            }
        }
    }
    Ok(AminoAcidMatrix {
        source_kind: cm.kind,
        meta: cm.meta,
        entries: m,
    })
}

/// Amino-acid rates from the generator of one model configuration.
#[derive(Clone, Debug)]
pub struct AminoRates {
    matrix: AminoAcidMatrix,
}

impl AminoRates {
    pub fn new(p: &ModelParams, f: &Strength, usage: &CodonUsage) -> Result<Self> {
        let generator = build_generator(p, f);
        Ok(AminoRates {
            matrix: aggregate(&generator, usage)?,
        })
    }

    pub fn matrix(&self) -> &AminoAcidMatrix {
        &self.matrix
    }

    /// Directional rate `a → b`.
    pub fn directional(&self, a: AminoAcid, b: AminoAcid) -> f64 {
        self.matrix.get(b, a)
    }

    /// `(M(b,a) + M(a,b)) / 2`.
    pub fn pair_rate(&self, a: AminoAcid, b: AminoAcid) -> f64 {
        0.5 * (self.directional(a, b) + self.directional(b, a))
    }

    /// Expected non-synonymous outflow of `a`.
    pub fn mutability(&self, a: AminoAcid) -> f64 {
        AminoAcid::ALL
            .iter()
            .filter(|&&b| b != a)
            .map(|&b| self.directional(a, b))
            .sum()
    }
}

pub fn pair_rate(
    a: AminoAcid,
    b: AminoAcid,
    p: &ModelParams,
    f: &Strength,
    usage: &CodonUsage,
) -> Result<f64> {
    Ok(AminoRates::new(p, f, usage)?.pair_rate(a, b))
}

pub fn mutability(a: AminoAcid, p: &ModelParams, f: &Strength, usage: &CodonUsage) -> Result<f64> {
    Ok(AminoRates::new(p, f, usage)?.mutability(a))
}

/// Parses `CODON<TAB>frequency` lines; `#` starts a comment line.
pub fn parse_usage_tsv(text: &str) -> Result<CodonUsage> {
    let mut raw = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (codon, value) = line
            .split_once('\t')
            .ok_or_else(|| Error::Malformed(format!("usage line {}: expected two fields", lineno + 1)))?;
        let codon: Codon = codon.trim().parse()?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::MalformedNumber(value.trim().to_string()))?;
        if raw.insert(codon, value).is_some() {
            return Err(Error::Malformed(format!("usage line {}: duplicate codon {codon}", lineno + 1)));
        }
    }
    CodonUsage::from_frequencies(&raw)
}

pub fn usage_tsv(usage: &CodonUsage) -> String {
    let mut s = String::from("# codon\tfrequency\n");
    for c in SENSE_CODONS.iter() {
        s.push_str(&format!("{c}\t{:?}\n", usage.get(*c)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{distance, sense_neighbors};
    use crate::genetic::translate;
    use AminoAcid::*;

    fn unit() -> ModelParams {
        ModelParams::new(1.0, 1.0, 1.0, 2.0).unwrap()
    }

    fn constant_rates(c: f64) -> AminoRates {
        AminoRates::new(&unit(), &Strength::constant(c).unwrap(), &CodonUsage::uniform()).unwrap()
    }

    /// Number of nearest codon pairs between two synonym families.
    fn nearest_pairs(a: AminoAcid, b: AminoAcid) -> usize {
        let mut n = 0;
        for i in a.multiplet() {
            for j in b.multiplet() {
                if i.hamming(j) == 1 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn uniform_usage_is_normalized() {
        let u = CodonUsage::uniform();
        u.validate().unwrap();
        assert_eq!(u.get("UGG".parse().unwrap()), 1.0);
        assert_eq!(u.get("UCC".parse().unwrap()), 1.0 / 6.0);
    }

    #[test]
    fn met_trp_have_no_path() {
        let r = constant_rates(1.0);
        assert_eq!(r.directional(Met, Trp), 0.0);
        assert_eq!(r.pair_rate(Met, Trp), 0.0);
    }

    #[test]
    fn cys_trp_directional_asymmetry() {
        let c = 1.5;
        let r = constant_rates(c);
        assert_eq!(r.directional(Cys, Trp), c);
        assert_eq!(r.directional(Trp, Cys), 2.0 * c);
        assert_eq!(r.pair_rate(Cys, Trp), 1.5 * c);
        assert_eq!(r.pair_rate(Trp, Cys), r.pair_rate(Cys, Trp));
    }

    #[test]
    fn constant_strength_matches_pair_counts() {
        let c = 0.75;
        let r = constant_rates(c);
        for a in AminoAcid::ALL {
            for b in AminoAcid::ALL {
                if a == b {
                    continue;
                }
                let expected = nearest_pairs(a, b) as f64 / a.multiplet().len() as f64 * c;
                assert!((r.directional(a, b) - expected).abs() < 1e-14, "{a}->{b}");
            }
        }
    }

    #[test]
    fn mutability_examples() {
        let r = constant_rates(1.0);
        assert_eq!(r.mutability(Trp), 7.0);
        assert_eq!(r.mutability(Met), 9.0);
        assert!(r.mutability(Gly) < r.mutability(Ala));
    }

    #[test]
    fn mutability_equals_direct_outflow() {
        let p = ModelParams::new(0.3, 2.0, 0.8, 3.1).unwrap();
        let f = Strength::exponential(0.02).unwrap();
        let usage = CodonUsage::uniform();
        let r = AminoRates::new(&p, &f, &usage).unwrap();
        for a in AminoAcid::ALL {
            let direct: f64 = a
                .multiplet()
                .iter()
                .map(|&i| {
                    usage.get(i)
                        * sense_neighbors(i)
                            .unwrap()
                            .into_iter()
                            .filter(|&j| translate(j).amino_acid() != Some(a))
                            .map(|j| f.eval(distance(i, j, &p)))
                            .sum::<f64>()
                })
                .sum();
            assert!((r.mutability(a) - direct).abs() < 1e-12, "{a}");
            assert!(r.mutability(a) > 0.0);
        }
    }

    #[test]
    fn aggregate_is_linear() {
        let g1 = build_generator(&unit(), &Strength::exponential(0.01).unwrap());
        let g2 = build_generator(&unit(), &Strength::power_law(1.5, 20.0).unwrap());
        let usage = CodonUsage::uniform();
        let mut combo = g1.clone();
        combo.entries = &g1.entries * 2.0 + &g2.entries * 0.5;
        let lhs = aggregate(&combo, &usage).unwrap().entries;
        let rhs = aggregate(&g1, &usage).unwrap().entries * 2.0
            + aggregate(&g2, &usage).unwrap().entries * 0.5;
        assert!((lhs - rhs).amax() < 1e-12);
    }

    #[test]
    fn usage_normalizes_within_families() {
        let mut raw: BTreeMap<Codon, f64> = SENSE_CODONS.iter().map(|&c| (c, 3.0)).collect();
        raw.insert("CUC".parse().unwrap(), 9.0);
        let u = CodonUsage::from_frequencies(&raw).unwrap();
        u.validate().unwrap();
        assert!((u.get("CUC".parse().unwrap()) - 9.0 / 24.0).abs() < 1e-15);
        assert_eq!(u.get("UGG".parse().unwrap()), 1.0);
    }

    #[test]
    fn usage_errors() {
        let mut raw: BTreeMap<Codon, f64> = SENSE_CODONS.iter().map(|&c| (c, 1.0)).collect();
        raw.remove(&"UGG".parse().unwrap());
        assert!(matches!(
            CodonUsage::from_frequencies(&raw),
            Err(Error::UsageMissingCodon(_))
        ));
        raw.insert("UGG".parse().unwrap(), 0.0);
        assert!(matches!(
            CodonUsage::from_frequencies(&raw),
            Err(Error::UsageNotNormalized { .. })
        ));
        let bad: BTreeMap<Codon, f64> = SENSE_CODONS.iter().map(|&c| (c, 0.5)).collect();
        assert!(matches!(
            CodonUsage::from_normalized(bad),
            Err(Error::UsageNotNormalized { .. })
        ));
    }

    #[test]
    fn usage_tsv_parses() {
        let mut text = String::from("# comment\n");
        for c in SENSE_CODONS.iter() {
            text.push_str(&format!("{c}\t2\n"));
        }
        text.push_str("UAA\t5\n");
        let u = parse_usage_tsv(&text).unwrap();
        assert_eq!(u, CodonUsage::uniform());
        assert_eq!(parse_usage_tsv(&usage_tsv(&u)).unwrap(), u);
        assert!(matches!(
            parse_usage_tsv("CCC\tabc\n"),
            Err(Error::MalformedNumber(_))
        ));
        assert!(matches!(parse_usage_tsv("CCC\t1\n"), Err(Error::UsageMissingCodon(_))));
    }
}
