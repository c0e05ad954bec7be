//! Values enumerated independently of the library (brute force over the
//! standard genetic code) and checked against it.

use codon_crystal::aggregate::{AminoRates, CodonUsage};
use codon_crystal::distance::{classify_change, sense_neighbors, ModelParams};
use codon_crystal::genetic::SENSE_CODONS;
use codon_crystal::predict::eta_bound;
use codon_crystal::rate::Strength;
use codon_crystal::{AminoAcid, Codon};

fn codon(s: &str) -> Codon {
    s.parse().unwrap()
}

fn constant_rates() -> AminoRates {
    let p = ModelParams::new(1.0, 1.0, 1.0, 2.0).unwrap();
    AminoRates::new(&p, &Strength::constant(1.0).unwrap(), &CodonUsage::uniform()).unwrap()
}

#[test]
fn sense_adjacency() {
    let total: usize = SENSE_CODONS.iter().map(|&c| sense_neighbors(c).unwrap().len()).sum();
    assert_eq!(total, 526);
    assert_eq!(sense_neighbors(codon("CCC")).unwrap().len(), 9);
    assert_eq!(sense_neighbors(codon("UGG")).unwrap().len(), 7);
    assert_eq!(sense_neighbors(codon("UAC")).unwrap().len(), 7);
    assert!(sense_neighbors(codon("UAA")).is_err());
}

#[test]
fn every_codon_has_four_missense_neighbours() {
    let min = SENSE_CODONS
        .iter()
        .map(|&c| {
            sense_neighbors(c)
                .unwrap()
                .into_iter()
                .filter(|n| n.translate() != c.translate())
                .count()
        })
        .min();
    assert_eq!(min, Some(4));
}

#[test]
fn constant_strength_mutabilities() {
    let r = constant_rates();
    assert_eq!(r.mutability(AminoAcid::Trp), 7.0);
    assert_eq!(r.mutability(AminoAcid::Met), 9.0);
    assert_eq!(r.mutability(AminoAcid::Gly), 5.75);
    assert_eq!(r.mutability(AminoAcid::Ala), 6.0);
}

#[test]
fn constant_strength_pair_rates() {
    let r = constant_rates();
    assert_eq!(r.pair_rate(AminoAcid::Phe, AminoAcid::Leu), 2.0);
    assert_eq!(r.pair_rate(AminoAcid::Phe, AminoAcid::Tyr), 1.0);
    let b = eta_bound(
        &ModelParams::new(1.0, 1.0, 1.0, 2.0).unwrap(),
        &Strength::constant(1.0).unwrap(),
        &CodonUsage::uniform(),
    )
    .unwrap();
    assert!(b.model_agrees);
}

#[test]
fn transitions_flip_only_h() {
    let c = classify_change(codon("CCC"), codon("CCU")).unwrap();
    assert!(c.is_transition() && c.position == 3);
    let c = classify_change(codon("CCC"), codon("CAC")).unwrap();
    assert!(c.is_transversion() && c.position == 2);
    assert!(classify_change(codon("CCC"), codon("CAA")).is_err());
}
