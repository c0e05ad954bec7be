//! Qualitative predictions of the model and their comparison with PET91.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::aggregate::{AminoRates, CodonUsage};
use crate::distance::ModelParams;
use crate::error::{Error, Result};
use crate::genetic::{AminoAcid, ChargeSource};
use crate::rate::Strength;

/// Relative slack for "approximately less" rows.
pub const DEFAULT_APPROX_SLACK: f64 = 0.10;

/// Guards the normalized margins against `0 / 0`.
pub const MARGIN_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `lhs < rhs`.
    Less,
    /// `lhs <≈ rhs`, checked as `lhs < (1 + slack) rhs`.
    ApproxLess,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::ApproxLess => "<~",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "<" => Ok(Relation::Less),
            "<~" => Ok(Relation::ApproxLess),
            other => Err(Error::Malformed(format!("unknown relation {other:?}"))),
        }
    }

    /// Whether `lhs (relation) rhs` holds.
    pub fn holds(self, lhs: f64, rhs: f64, slack: f64) -> bool {
        lhs < self.effective_rhs(rhs, slack)
    }

    /// `(rhs' - lhs) / (rhs' + lhs + ε)`, positive when the relation holds.
    pub fn margin(self, lhs: f64, rhs: f64, slack: f64) -> f64 {
        let r = self.effective_rhs(rhs, slack);
        (r - lhs) / (r + lhs + MARGIN_EPS)
    }

    fn effective_rhs(self, rhs: f64, slack: f64) -> f64 {
        match self {
            Relation::Less => rhs,
            Relation::ApproxLess => rhs * (1.0 + slack),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimSource {
    Table,
    Text,
}

impl ClaimSource {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(ClaimSource::Table),
            "text" => Ok(ClaimSource::Text),
            other => Err(Error::Malformed(format!("unknown source {other:?}"))),
        }
    }
}

pub type AminoPair = (AminoAcid, AminoAcid);

/// `R(lhs) (relation) R(rhs)` with the experimental PET91 rates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityClaim {
    pub id: String,
    pub lhs: AminoPair,
    pub rhs: AminoPair,
    pub relation: Relation,
    pub exp_lhs: f64,
    pub exp_rhs: f64,
    pub source: ClaimSource,
}

impl InequalityClaim {
    pub fn experimental_holds(&self, slack: f64) -> bool {
        self.relation.holds(self.exp_lhs, self.exp_rhs, slack)
    }
}

impl fmt::Display for InequalityClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R({}<>{}) {} R({}<>{})",
            self.lhs.0,
            self.lhs.1,
            self.relation.symbol(),
            self.rhs.0,
            self.rhs.1
        )
    }
}

/// One experimental pair rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRateRecord {
    pub pair: AminoPair,
    pub value: f64,
    pub source: ClaimSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelativeMutability {
    pub pet91: f64,
    pub dayhoff: f64,
}

/// Experimental values transcribed into the bundled data files.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentalDataset {
    pub claims: Vec<InequalityClaim>,
    pub rates: Vec<PairRateRecord>,
    pub mutability: BTreeMap<AminoAcid, RelativeMutability>,
}

fn unordered(a: AminoAcid, b: AminoAcid) -> AminoPair {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::MalformedNumber(s.to_string()))
}

impl ExperimentalDataset {
    pub fn parse(pair_rates_tsv: &str, mutability_tsv: &str) -> Result<Self> {
        let mut claims = Vec::new();
        let mut rates = Vec::new();
        for (lineno, line) in pair_rates_tsv.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let bad = || Error::Malformed(format!("pair rate line {}: {line:?}", lineno + 1));
            match f[0] {
                "claim" if f.len() == 10 => {
                    let claim = InequalityClaim {
                        id: f[1].to_string(),
                        lhs: (f[2].parse()?, f[3].parse()?),
                        relation: Relation::parse(f[4])?,
                        rhs: (f[5].parse()?, f[6].parse()?),
                        exp_lhs: number(f[7])?,
                        exp_rhs: number(f[8])?,
                        source: ClaimSource::parse(f[9])?,
                    };
                    rates.push(PairRateRecord {
                        pair: claim.lhs,
                        value: claim.exp_lhs,
                        source: claim.source,
                    });
                    rates.push(PairRateRecord {
                        pair: claim.rhs,
                        value: claim.exp_rhs,
                        source: claim.source,
                    });
                    claims.push(claim);
                }
                "rate" if f.len() == 5 => rates.push(PairRateRecord {
                    pair: (f[1].parse()?, f[2].parse()?),
                    value: number(f[3])?,
                    source: ClaimSource::parse(f[4])?,
                }),
                _ => return Err(bad()),
            }
        }

        let mut mutability = BTreeMap::new();
        for (lineno, line) in mutability_tsv.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 {
                return Err(Error::Malformed(format!("mutability line {}: {line:?}", lineno + 1)));
            }
            let aa: AminoAcid = f[0].parse()?;
            mutability.insert(
                aa,
                RelativeMutability {
                    pet91: number(f[1])?,
                    dayhoff: number(f[2])?,
                },
            );
        }
        if mutability.len() != 20 {
            return Err(Error::DimensionMismatch {
                expected: 20,
                found: mutability.len(),
            });
        }
        Ok(ExperimentalDataset {
            claims,
            rates,
            mutability,
        })
    }

    /// Experimental rate for an unordered pair, preferring table values.
    pub fn pair_rate(&self, a: AminoAcid, b: AminoAcid) -> Option<f64> {
        let key = unordered(a, b);
        let matches = || self.rates.iter().filter(|r| unordered(r.pair.0, r.pair.1) == key);
        matches()
            .find(|r| r.source == ClaimSource::Table)
            .or_else(|| matches().next())
            .map(|r| r.value)
    }

    /// Unordered pairs that are transcribed with more than one value.
    pub fn rate_conflicts(&self) -> BTreeMap<AminoPair, Vec<f64>> {
        let mut all: BTreeMap<AminoPair, Vec<f64>> = BTreeMap::new();
        for r in &self.rates {
            let values = all.entry(unordered(r.pair.0, r.pair.1)).or_default();
            if !values.contains(&r.value) {
                values.push(r.value);
            }
        }
        all.retain(|_, v| v.len() > 1);
        all
    }
}

/// Values of `|60γ - 4β - 10α|`, `|12γ - 2α|`, `|36γ - 4β - 2α|` and whether
/// they form a strictly decreasing chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eq15Check {
    pub ok: bool,
    pub values: [f64; 3],
}

impl Eq15Check {
    /// Normalized violations of the two links; zero when both hold strictly
    /// with room to spare, negative otherwise.
    pub fn soft_violation(&self) -> f64 {
        let [x, y, z] = self.values;
        let link = |hi: f64, lo: f64| ((hi - lo) / (hi + lo + MARGIN_EPS)).min(0.0);
        link(x, y) + link(y, z)
    }
}

pub fn check_eq15(alpha: f64, beta: f64, gamma: f64) -> Eq15Check {
    let values = [
        (60.0 * gamma - 4.0 * beta - 10.0 * alpha).abs(),
        (12.0 * gamma - 2.0 * alpha).abs(),
        (36.0 * gamma - 4.0 * beta - 2.0 * alpha).abs(),
    ];
    Eq15Check {
        ok: values[0] > values[1] && values[1] > values[2],
        values,
    }
}

/// Phe⇔Leu versus Phe⇔Tyr, the comparison that bounds `η`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaBound {
    pub model_phe_leu: f64,
    pub model_phe_tyr: f64,
    pub exp_phe_leu: f64,
    pub exp_phe_tyr: f64,
    /// Whether the model reproduces `R(Phe⇔Leu) > R(Phe⇔Tyr)`.
    pub model_agrees: bool,
}

pub const EXP_PHE_LEU: f64 = 230.0;
pub const EXP_PHE_TYR: f64 = 179.0;

pub fn eta_bound(p: &ModelParams, f: &Strength, usage: &CodonUsage) -> Result<EtaBound> {
    Ok(eta_bound_from(&AminoRates::new(p, f, usage)?))
}

fn eta_bound_from(rates: &AminoRates) -> EtaBound {
    use AminoAcid::*;
    let model_phe_leu = rates.pair_rate(Phe, Leu);
    let model_phe_tyr = rates.pair_rate(Phe, Tyr);
    EtaBound {
        model_phe_leu,
        model_phe_tyr,
        exp_phe_leu: EXP_PHE_LEU,
        exp_phe_tyr: EXP_PHE_TYR,
        model_agrees: model_phe_leu > model_phe_tyr,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub claim: String,
    pub relation: Relation,
    pub source: ClaimSource,
    pub exp_lhs: f64,
    pub exp_rhs: f64,
    pub model_lhs: f64,
    pub model_rhs: f64,
    pub satisfied: bool,
    pub margin: f64,
}

/// Rates of the three doublet pairs that change the third letter of an
/// `NAN` codon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DoubletRates {
    pub asn_lys: f64,
    pub asp_glu: f64,
    pub his_gln: f64,
    pub exp_asn_lys: f64,
    pub exp_asp_glu: f64,
    pub exp_his_gln: f64,
    pub pairwise_distinct: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityRelation {
    /// Left is more stable.
    MoreStable,
    /// Left is much more stable.
    MuchMoreStable,
    /// Comparable stability.
    Comparable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HierarchyLink {
    pub left: AminoAcid,
    pub right: AminoAcid,
    pub relation: StabilityRelation,
    /// A sextet or triplet is involved.
    pub low_confidence: bool,
    pub model_left: f64,
    pub model_right: f64,
    pub model_agrees: bool,
    pub pet91_agrees: bool,
    pub dayhoff_agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MutabilityEntry {
    pub amino_acid: AminoAcid,
    pub multiplet_size: usize,
    pub model: f64,
    pub pet91: f64,
    pub dayhoff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HierarchyReport {
    /// Grouped by multiplet size (largest first), then by model mutability.
    pub entries: Vec<MutabilityEntry>,
    pub links: Vec<HierarchyLink>,
    pub model_agreements: usize,
    pub pet91_agreements: usize,
}

/// Stability chains; every link reads "left more stable than right".
pub fn hierarchy_links() -> Vec<(AminoAcid, AminoAcid, StabilityRelation)> {
    use AminoAcid::*;
    use StabilityRelation::*;
    vec![
        (Gly, Pro, MoreStable),
        (Pro, Ala, MoreStable),
        (Ala, Thr, MoreStable),
        (Thr, Ser, MoreStable),
        (Phe, Lys, MoreStable),
        (Lys, Ile, MoreStable),
        (Ile, Asn, MoreStable),
        (Leu, Val, MoreStable),
        (Glu, Asp, MoreStable),
        (His, Gln, Comparable),
        (Trp, Met, MuchMoreStable),
    ]
}

fn low_confidence(a: AminoAcid) -> bool {
    matches!(a, AminoAcid::Ser | AminoAcid::Leu | AminoAcid::Ile)
}

fn link_agrees(rel: StabilityRelation, left: f64, right: f64, slack: f64) -> bool {
    match rel {
        StabilityRelation::MoreStable | StabilityRelation::MuchMoreStable => left < right,
        StabilityRelation::Comparable => (left - right).abs() <= slack * left.abs().max(right.abs()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PredictConfig {
    pub approx_slack: f64,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            approx_slack: DEFAULT_APPROX_SLACK,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimSummary {
    pub satisfied: usize,
    pub total: usize,
    pub strict_satisfied: usize,
    pub strict_total: usize,
    pub approx_satisfied: usize,
    pub approx_total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionReport {
    pub params: ModelParams,
    pub strength: String,
    pub charges: ChargeSource,
    pub approx_slack: f64,
    pub claims: Vec<ClaimResult>,
    pub summary: ClaimSummary,
    pub doublets: DoubletRates,
    pub eq15: Eq15Check,
    pub eta_bound: EtaBound,
    pub hierarchy: HierarchyReport,
}

impl PredictionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scores every claim against precomputed amino-acid rates.
pub fn score_claims(rates: &AminoRates, data: &ExperimentalDataset, cfg: &PredictConfig) -> Vec<ClaimResult> {
    data.claims
        .iter()
        .map(|c| {
            let model_lhs = rates.pair_rate(c.lhs.0, c.lhs.1);
            let model_rhs = rates.pair_rate(c.rhs.0, c.rhs.1);
            ClaimResult {
                id: c.id.clone(),
                claim: c.to_string(),
                relation: c.relation,
                source: c.source,
                exp_lhs: c.exp_lhs,
                exp_rhs: c.exp_rhs,
                model_lhs,
                model_rhs,
                satisfied: c.relation.holds(model_lhs, model_rhs, cfg.approx_slack),
                margin: c.relation.margin(model_lhs, model_rhs, cfg.approx_slack),
            }
        })
        .collect()
}

fn summarize(results: &[ClaimResult]) -> ClaimSummary {
    let count = |rel: Option<Relation>, sat: bool| {
        results
            .iter()
            .filter(|r| rel.is_none_or(|x| r.relation == x) && (!sat || r.satisfied))
            .count()
    };
    ClaimSummary {
        satisfied: count(None, true),
        total: count(None, false),
        strict_satisfied: count(Some(Relation::Less), true),
        strict_total: count(Some(Relation::Less), false),
        approx_satisfied: count(Some(Relation::ApproxLess), true),
        approx_total: count(Some(Relation::ApproxLess), false),
    }
}

fn doublet_rates(rates: &AminoRates, data: &ExperimentalDataset) -> DoubletRates {
    use AminoAcid::*;
    let asn_lys = rates.pair_rate(Asn, Lys);
    let asp_glu = rates.pair_rate(Asp, Glu);
    let his_gln = rates.pair_rate(His, Gln);
    let exp = |a, b| data.pair_rate(a, b).unwrap_or(f64::NAN);
    DoubletRates {
        asn_lys,
        asp_glu,
        his_gln,
        exp_asn_lys: exp(Asn, Lys),
        exp_asp_glu: exp(Asp, Glu),
        exp_his_gln: exp(His, Gln),
        pairwise_distinct: asn_lys != asp_glu && asp_glu != his_gln && asn_lys != his_gln,
    }
}

fn hierarchy_from(rates: &AminoRates, data: &ExperimentalDataset, cfg: &PredictConfig) -> HierarchyReport {
    let mut entries: Vec<MutabilityEntry> = AminoAcid::ALL
        .iter()
        .map(|&a| {
            let exp = data.mutability[&a];
            MutabilityEntry {
                amino_acid: a,
                multiplet_size: a.multiplet().len(),
                model: rates.mutability(a),
                pet91: exp.pet91,
                dayhoff: exp.dayhoff,
            }
        })
        .collect();
    entries.sort_by(|x, y| {
        y.multiplet_size
            .cmp(&x.multiplet_size)
            .then(x.model.total_cmp(&y.model))
            .then(x.amino_acid.cmp(&y.amino_acid))
    });

    let links: Vec<HierarchyLink> = hierarchy_links()
        .into_iter()
        .map(|(left, right, relation)| {
            let ml = rates.mutability(left);
            let mr = rates.mutability(right);
            let el = data.mutability[&left];
            let er = data.mutability[&right];
            HierarchyLink {
                left,
                right,
                relation,
                low_confidence: low_confidence(left) || low_confidence(right),
                model_left: ml,
                model_right: mr,
                model_agrees: link_agrees(relation, ml, mr, cfg.approx_slack),
                pet91_agrees: link_agrees(relation, el.pet91, er.pet91, cfg.approx_slack),
                dayhoff_agrees: link_agrees(relation, el.dayhoff, er.dayhoff, cfg.approx_slack),
            }
        })
        .collect();
    HierarchyReport {
        model_agreements: links.iter().filter(|l| l.model_agrees).count(),
        pet91_agreements: links.iter().filter(|l| l.pet91_agrees).count(),
        entries,
        links,
    }
}

pub fn hierarchy_report(
    p: &ModelParams,
    f: &Strength,
    usage: &CodonUsage,
    data: &ExperimentalDataset,
    cfg: &PredictConfig,
) -> Result<HierarchyReport> {
    Ok(hierarchy_from(&AminoRates::new(p, f, usage)?, data, cfg))
}

pub fn evaluate_claims(
    p: &ModelParams,
    f: &Strength,
    usage: &CodonUsage,
    data: &ExperimentalDataset,
    cfg: &PredictConfig,
) -> Result<PredictionReport> {
    let rates = AminoRates::new(p, f, usage)?;
    let claims = score_claims(&rates, data, cfg);
    Ok(PredictionReport {
        params: *p,
        strength: f.to_string(),
        charges: p.charges,
        approx_slack: cfg.approx_slack,
        summary: summarize(&claims),
        claims,
        doublets: doublet_rates(&rates, data),
        eq15: check_eq15(p.alpha, p.beta, p.gamma),
        eta_bound: eta_bound_from(&rates),
        hierarchy: hierarchy_from(&rates, data, cfg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DatasetBundle;
    use AminoAcid::*;

    fn data() -> ExperimentalDataset {
        DatasetBundle::bundled().experimental().unwrap()
    }

    #[test]
    fn eq15_examples() {
        let c = check_eq15(0.1, 5.0, 0.5);
        assert!(c.ok);
        for (got, want) in c.values.iter().zip([9.0, 5.8, 2.2]) {
            assert!((got - want).abs() < 1e-12);
        }
        let c = check_eq15(1.0, 10.0, 1.0);
        assert!(!c.ok);
        assert_eq!(c.values, [10.0, 10.0, 6.0]);
        assert!(c.soft_violation() < 0.0 || c.values[0] == c.values[1]);
    }

    #[test]
    fn eq15_is_scale_invariant() {
        for (a, b, g) in [(0.1, 5.0, 0.5), (1.0, 10.0, 1.0), (2.0, 0.3, 0.9)] {
            for k in [0.01, 0.5, 3.0, 1e3] {
                assert_eq!(check_eq15(a, b, g).ok, check_eq15(k * a, k * b, k * g).ok);
            }
        }
    }

    #[test]
    fn bundled_claims() {
        let d = data();
        let table: Vec<_> = d.claims.iter().filter(|c| c.source == ClaimSource::Table).collect();
        assert_eq!(table.len(), 23);
        let first = &table[0];
        assert_eq!((first.lhs, first.rhs), ((Asp, Ala), (Glu, Ala)));
        assert_eq!((first.exp_lhs, first.exp_rhs), (63.0, 82.0));
        let va = d.claims.iter().find(|c| c.lhs == (Val, Ala) && c.rhs == (Val, Ile)).unwrap();
        assert_eq!((va.exp_lhs, va.exp_rhs), (226.0, 504.0));
        let mut ids: Vec<&str> = d.claims.iter().map(|c| c.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), d.claims.len());
    }

    #[test]
    fn experimental_columns_are_ordered() {
        for c in data().claims {
            assert!(c.experimental_holds(DEFAULT_APPROX_SLACK), "{}", c.id);
            if c.relation == Relation::Less {
                assert!(c.exp_lhs < c.exp_rhs, "{}", c.id);
            }
        }
    }

    #[test]
    fn mutability_dataset() {
        let d = data();
        let m = |a| {
            let r: RelativeMutability = d.mutability[&a];
            (r.pet91, r.dayhoff)
        };
        assert_eq!(m(Ala), (100.0, 100.0));
        assert_eq!(m(Trp), (25.0, 18.0));
        assert_eq!(m(Ser), (117.0, 120.0));
        assert_eq!(m(His), (91.0, 66.0));
        assert_eq!(m(Gln), (84.0, 93.0));
    }

    #[test]
    fn pet91_hierarchy_directions() {
        let d = data();
        let pet = |a| d.mutability[&a].pet91;
        assert!(pet(Gly) < pet(Pro) && pet(Pro) < pet(Ala) && pet(Ala) < pet(Thr) && pet(Thr) < pet(Ser));
        assert!(pet(Trp) < pet(Met));
    }

    #[test]
    fn experimental_pair_lookup_and_conflicts() {
        let d = data();
        assert_eq!(d.pair_rate(Phe, Leu), Some(230.0));
        assert_eq!(d.pair_rate(Leu, Phe), Some(230.0));
        assert_eq!(d.pair_rate(Asn, Lys), Some(150.0));
        // Pro<>Ala appears as 150 in the table and 23 in the text
        assert_eq!(d.pair_rate(Ala, Pro), Some(150.0));
        let conflicts = d.rate_conflicts();
        assert_eq!(conflicts[&(Ala, Pro)], vec![150.0, 23.0]);
        assert!(conflicts.contains_key(&(Ile, Thr)));
    }

    #[test]
    fn constant_strength_eta_bound() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 2.5).unwrap();
        let b = eta_bound(&p, &Strength::constant(1.0).unwrap(), &CodonUsage::uniform()).unwrap();
        // 6 nearest Phe/Leu pairs over families of 2 and 6; 2 Phe/Tyr pairs
        assert_eq!(b.model_phe_leu, 0.5 * (6.0 / 2.0 + 6.0 / 6.0));
        assert_eq!(b.model_phe_tyr, 0.5 * (2.0 / 2.0 + 2.0 / 2.0));
        assert_eq!((b.exp_phe_leu, b.exp_phe_tyr), (230.0, 179.0));
    }

    #[test]
    fn report_shape_and_determinism() {
        let p = ModelParams::new(0.1, 5.0, 0.5, 2.5).unwrap();
        let f = Strength::default();
        let u = CodonUsage::uniform();
        let d = data();
        let cfg = PredictConfig::default();
        let r1 = evaluate_claims(&p, &f, &u, &d, &cfg).unwrap();
        let r2 = evaluate_claims(&p, &f, &u, &d, &cfg).unwrap();
        assert_eq!(r1.claims.len(), d.claims.len());
        assert_eq!(r1.to_json(), r2.to_json());
        assert!(r1.eq15.ok);
        for c in &r1.claims {
            assert_eq!(c.satisfied, c.margin > 0.0, "{}", c.id);
        }
        assert_eq!(r1.hierarchy.links.len(), 11);
        assert_eq!(r1.hierarchy.entries.len(), 20);
    }

    #[test]
    fn satisfied_count_invariant_under_strength_scale() {
        let p = ModelParams::new(0.4, 2.0, 0.7, 3.0).unwrap();
        let u = CodonUsage::uniform();
        let d = data();
        let cfg = PredictConfig::default();
        let base = evaluate_claims(&p, &Strength::constant(1.0).unwrap(), &u, &d, &cfg).unwrap();
        for k in [0.001, 2.0, 1e4] {
            let f = Strength::constant(1.0).unwrap().scaled(k).unwrap();
            let r = evaluate_claims(&p, &f, &u, &d, &cfg).unwrap();
            assert_eq!(r.summary, base.summary);
        }
    }

    #[test]
    fn constant_baseline_hierarchy() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 2.0).unwrap();
        let h = hierarchy_report(
            &p,
            &Strength::constant(1.0).unwrap(),
            &CodonUsage::uniform(),
            &data(),
            &PredictConfig::default(),
        )
        .unwrap();
        let trp_met = h.links.iter().find(|l| l.left == Trp).unwrap();
        assert_eq!((trp_met.model_left, trp_met.model_right), (7.0, 9.0));
        assert!(trp_met.model_agrees && trp_met.pet91_agrees);
        let sizes: Vec<usize> = h.entries.iter().map(|e| e.multiplet_size).collect();
        let mut sorted = sizes.clone();
        sorted.sort_by(|a, b| b.cmp(a));
        assert_eq!(sizes, sorted);
    }
}
