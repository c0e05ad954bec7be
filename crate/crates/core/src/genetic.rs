//! Nucleotides, codons, the standard genetic code and the bundled
//! representation tables for dinucleotides and codons.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::crystal::{self, IrrepLabel, Sign, TensorWord, Weight};
use crate::error::{Error, Result};
use crate::half::HalfInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Nucleotide {
    C,
    U,
    G,
    A,
}

impl Nucleotide {
    /// Order used inside a block of the codon table (second and third letters).
    pub const ALL: [Nucleotide; 4] = [Nucleotide::C, Nucleotide::U, Nucleotide::G, Nucleotide::A];

    /// `(J_{3,H}, J_{3,V})` signs: C=(+,+), U=(-,+), G=(+,-), A=(-,-).
    pub fn signs(self) -> (Sign, Sign) {
        match self {
            Nucleotide::C => (Sign::Plus, Sign::Plus),
            Nucleotide::U => (Sign::Minus, Sign::Plus),
            Nucleotide::G => (Sign::Plus, Sign::Minus),
            Nucleotide::A => (Sign::Minus, Sign::Minus),
        }
    }

    pub fn from_signs(h: Sign, v: Sign) -> Nucleotide {
        match (h, v) {
            (Sign::Plus, Sign::Plus) => Nucleotide::C,
            (Sign::Minus, Sign::Plus) => Nucleotide::U,
            (Sign::Plus, Sign::Minus) => Nucleotide::G,
            (Sign::Minus, Sign::Minus) => Nucleotide::A,
        }
    }

    pub fn is_pyrimidine(self) -> bool {
        matches!(self, Nucleotide::C | Nucleotide::U)
    }

    pub fn from_char(c: char) -> Option<Nucleotide> {
        match c.to_ascii_uppercase() {
            'C' => Some(Nucleotide::C),
            'U' | 'T' => Some(Nucleotide::U),
            'G' => Some(Nucleotide::G),
            'A' => Some(Nucleotide::A),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Nucleotide::C => 'C',
            Nucleotide::U => 'U',
            Nucleotide::G => 'G',
            Nucleotide::A => 'A',
        }
    }

    fn block_rank(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Nucleotide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

fn parse_nucleotides<const N: usize>(s: &str) -> Option<[Nucleotide; N]> {
    let chars: Vec<char> = s.trim().chars().collect();
    if chars.len() != N {
        return None;
    }
    let mut out = [Nucleotide::C; N];
    for (slot, c) in out.iter_mut().zip(chars) {
        *slot = Nucleotide::from_char(c)?;
    }
    Some(out)
}

fn word_of(nts: &[Nucleotide]) -> TensorWord {
    let letters: Vec<(Sign, Sign)> = nts.iter().map(|n| n.signs()).collect();
    TensorWord::from_letters(&letters).expect("nonempty")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codon(pub [Nucleotide; 3]);

/// First-letter order of the printed codon table: the C and G blocks fill the
/// left column, U and A the right.
const FIRST_LETTER_ORDER: [Nucleotide; 4] =
    [Nucleotide::C, Nucleotide::G, Nucleotide::U, Nucleotide::A];

impl Codon {
    pub fn new(a: Nucleotide, b: Nucleotide, c: Nucleotide) -> Self {
        Codon([a, b, c])
    }

    pub fn nucleotides(&self) -> [Nucleotide; 3] {
        self.0
    }

    pub fn first_dimer(&self) -> Dimer {
        Dimer([self.0[0], self.0[1]])
    }

    pub fn word(&self) -> TensorWord {
        word_of(&self.0)
    }

    pub fn from_word(w: &TensorWord) -> Option<Codon> {
        if w.len() != 3 {
            return None;
        }
        let nts: Vec<Nucleotide> = w.letters().map(|(h, v)| Nucleotide::from_signs(h, v)).collect();
        Some(Codon([nts[0], nts[1], nts[2]]))
    }

    /// Position in the canonical (printed table) order, `0..64`.
    pub fn table_index(&self) -> usize {
        let first = FIRST_LETTER_ORDER
            .iter()
            .position(|n| *n == self.0[0])
            .expect("all nucleotides listed");
        16 * first + 4 * self.0[1].block_rank() + self.0[2].block_rank()
    }

    pub fn translate(&self) -> Translation {
        translate(*self)
    }

    pub fn is_stop(&self) -> bool {
        self.translate() == Translation::Stop
    }

    /// Number of positions at which the two codons differ.
    pub fn hamming(&self, other: &Codon) -> usize {
        self.0.iter().zip(other.0.iter()).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for Codon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in self.0 {
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl FromStr for Codon {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_nucleotides::<3>(s)
            .map(Codon)
            .ok_or_else(|| Error::InvalidCodon(s.to_string()))
    }
}

impl Serialize for Codon {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Codon {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All 64 codons in canonical table order.
pub static ALL_CODONS: LazyLock<Vec<Codon>> = LazyLock::new(|| {
    let mut out = Vec::with_capacity(64);
    for a in FIRST_LETTER_ORDER {
        for b in Nucleotide::ALL {
            for c in Nucleotide::ALL {
                out.push(Codon::new(a, b, c));
            }
        }
    }
    out
});

/// The 61 sense codons in canonical table order.
pub static SENSE_CODONS: LazyLock<Vec<Codon>> =
    LazyLock::new(|| ALL_CODONS.iter().copied().filter(|c| !c.is_stop()).collect());

/// Index of a sense codon within [`SENSE_CODONS`].
pub fn sense_index(c: Codon) -> Option<usize> {
    static INDEX: LazyLock<BTreeMap<Codon, usize>> = LazyLock::new(|| {
        SENSE_CODONS
            .iter()
            .enumerate()
            .map(|(i, c)| (*c, i))
            .collect()
    });
    INDEX.get(&c).copied()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AminoAcid {
    Ala,
    Arg,
    Asn,
    Asp,
    Cys,
    Gln,
    Glu,
    Gly,
    His,
    Ile,
    Leu,
    Lys,
    Met,
    Phe,
    Pro,
    Ser,
    Thr,
    Trp,
    Tyr,
    Val,
}

impl AminoAcid {
    /// Alphabetical by three-letter name.
    pub const ALL: [AminoAcid; 20] = [
        AminoAcid::Ala,
        AminoAcid::Arg,
        AminoAcid::Asn,
        AminoAcid::Asp,
        AminoAcid::Cys,
        AminoAcid::Gln,
        AminoAcid::Glu,
        AminoAcid::Gly,
        AminoAcid::His,
        AminoAcid::Ile,
        AminoAcid::Leu,
        AminoAcid::Lys,
        AminoAcid::Met,
        AminoAcid::Phe,
        AminoAcid::Pro,
        AminoAcid::Ser,
        AminoAcid::Thr,
        AminoAcid::Trp,
        AminoAcid::Tyr,
        AminoAcid::Val,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn three_letter(self) -> &'static str {
        match self {
            AminoAcid::Ala => "Ala",
            AminoAcid::Arg => "Arg",
            AminoAcid::Asn => "Asn",
            AminoAcid::Asp => "Asp",
            AminoAcid::Cys => "Cys",
            AminoAcid::Gln => "Gln",
            AminoAcid::Glu => "Glu",
            AminoAcid::Gly => "Gly",
            AminoAcid::His => "His",
            AminoAcid::Ile => "Ile",
            AminoAcid::Leu => "Leu",
            AminoAcid::Lys => "Lys",
            AminoAcid::Met => "Met",
            AminoAcid::Phe => "Phe",
            AminoAcid::Pro => "Pro",
            AminoAcid::Ser => "Ser",
            AminoAcid::Thr => "Thr",
            AminoAcid::Trp => "Trp",
            AminoAcid::Tyr => "Tyr",
            AminoAcid::Val => "Val",
        }
    }

    pub fn one_letter(self) -> char {
        match self {
            AminoAcid::Ala => 'A',
            AminoAcid::Arg => 'R',
            AminoAcid::Asn => 'N',
            AminoAcid::Asp => 'D',
            AminoAcid::Cys => 'C',
            AminoAcid::Gln => 'Q',
            AminoAcid::Glu => 'E',
            AminoAcid::Gly => 'G',
            AminoAcid::His => 'H',
            AminoAcid::Ile => 'I',
            AminoAcid::Leu => 'L',
            AminoAcid::Lys => 'K',
            AminoAcid::Met => 'M',
            AminoAcid::Phe => 'F',
            AminoAcid::Pro => 'P',
            AminoAcid::Ser => 'S',
            AminoAcid::Thr => 'T',
            AminoAcid::Trp => 'W',
            AminoAcid::Tyr => 'Y',
            AminoAcid::Val => 'V',
        }
    }

    pub fn from_one_letter(c: char) -> Option<AminoAcid> {
        AminoAcid::ALL
            .into_iter()
            .find(|a| a.one_letter() == c.to_ascii_uppercase())
    }

    /// Synonymous codons, in canonical table order.
    pub fn multiplet(self) -> &'static [Codon] {
        &MULTIPLETS[self.index()]
    }
}

impl fmt::Display for AminoAcid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.three_letter())
    }
}

impl FromStr for AminoAcid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.len() == 1 {
            return t
                .chars()
                .next()
                .and_then(AminoAcid::from_one_letter)
                .ok_or_else(|| Error::InvalidAminoAcid(s.to_string()));
        }
        AminoAcid::ALL
            .into_iter()
            .find(|a| a.three_letter().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::InvalidAminoAcid(s.to_string()))
    }
}

static MULTIPLETS: LazyLock<Vec<Vec<Codon>>> = LazyLock::new(|| {
    let mut out = vec![Vec::new(); 20];
    for c in SENSE_CODONS.iter() {
        if let Translation::Amino(a) = c.translate() {
            out[a.index()].push(*c);
        }
    }
    out
});

pub fn multiplet(a: AminoAcid) -> &'static [Codon] {
    a.multiplet()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Translation {
    Amino(AminoAcid),
    Stop,
}

impl Translation {
    pub fn amino_acid(self) -> Option<AminoAcid> {
        match self {
            Translation::Amino(a) => Some(a),
            Translation::Stop => None,
        }
    }
}

impl fmt::Display for Translation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Translation::Amino(a) => write!(f, "{a}"),
            Translation::Stop => f.write_str("Ter"),
        }
    }
}

impl FromStr for Translation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Ter" | "Stop" | "*" => Ok(Translation::Stop),
            other => other.parse().map(Translation::Amino),
        }
    }
}

/// Standard (eukaryotic nuclear) genetic code.
pub fn translate(c: Codon) -> Translation {
    // Row-major over U, C, A, G at every position.
    const CODE: &[u8; 64] = b"FFLLSSSSYY**CC*WLLLLPPPPHHQQRRRRIIIMTTTTNNKKSSRRVVVVAAAADDEEGGGG";
    let rank = |n: Nucleotide| match n {
        Nucleotide::U => 0,
        Nucleotide::C => 1,
        Nucleotide::A => 2,
        Nucleotide::G => 3,
    };
    let [a, b, d] = c.0;
    let letter = CODE[16 * rank(a) + 4 * rank(b) + rank(d)] as char;
    match letter {
        '*' => Translation::Stop,
        l => Translation::Amino(AminoAcid::from_one_letter(l).expect("valid code table")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimer(pub [Nucleotide; 2]);

impl Dimer {
    /// The 16 dinucleotides in the printed table order.
    pub fn all() -> Vec<Dimer> {
        let mut out = Vec::with_capacity(16);
        for a in Nucleotide::ALL {
            for b in Nucleotide::ALL {
                out.push(Dimer([a, b]));
            }
        }
        out
    }

    pub fn word(&self) -> TensorWord {
        word_of(&self.0)
    }

    pub fn record(&self) -> &'static DimerRecord {
        dimer_record(*self)
    }
}

impl fmt::Display for Dimer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0[0], self.0[1])
    }
}

impl FromStr for Dimer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_nucleotides::<2>(s)
            .map(Dimer)
            .ok_or_else(|| Error::InvalidDimer(s.to_string()))
    }
}

/// Which value of the root charge `Q` feeds the codon eigenvalue.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChargeSource {
    /// The tabulated values (default).
    #[default]
    Table,
    /// `Q = 4 J_{3,H} + C_V (J_{3,V} + 1) - 1`.
    Formula,
}

impl fmt::Display for ChargeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChargeSource::Table => "table",
            ChargeSource::Formula => "formula",
        })
    }
}

impl FromStr for ChargeSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "table" => Ok(ChargeSource::Table),
            "formula" => Ok(ChargeSource::Formula),
            other => Err(Error::InvalidParams(format!("unknown charge source {other:?}"))),
        }
    }
}

/// A row of the dinucleotide table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimerRecord {
    pub dimer: Dimer,
    pub j_h: HalfInt,
    pub j_v: HalfInt,
    pub j3_h: HalfInt,
    pub j3_v: HalfInt,
    /// Tabulated charge.
    pub charge: i32,
}

impl DimerRecord {
    pub fn charge_formula(&self) -> i32 {
        charge_from_labels(self.j3_h, self.j_v, self.j3_v)
    }

    pub fn charge(&self, source: ChargeSource) -> i32 {
        match source {
            ChargeSource::Table => self.charge,
            ChargeSource::Formula => self.charge_formula(),
        }
    }
}

fn charge_from_labels(j3_h: HalfInt, j_v: HalfInt, j3_v: HalfInt) -> i32 {
    // dinucleotide labels are integers
    let j3_h = j3_h.to_int().expect("integer weight");
    let j_v = j_v.to_int().expect("integer spin");
    let j3_v = j3_v.to_int().expect("integer weight");
    4 * j3_h + j_v * (j_v + 1) * (j3_v + 1) - 1
}

/// Root charge from the representation content of the dinucleotide, using
/// the crystal decomposition of the 2-fold tensor power.
pub fn charge_formula(d: Dimer) -> i32 {
    static DECOMP: LazyLock<crystal::Decomposition> = LazyLock::new(|| crystal::decompose(2));
    let (label, weight) = DECOMP.get(&d.word()).expect("every dimer decomposes");
    charge_from_labels(weight.j3_h, label.j_v, weight.j3_v)
}

pub fn charge_table(d: Dimer) -> i32 {
    dimer_record(d).charge
}

/// A row of the codon table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodonRecord {
    pub codon: Codon,
    pub translation: Translation,
    pub irrep: IrrepLabel,
    pub weight: Weight,
}

impl CodonRecord {
    /// Casimir eigenvalues `(C_H, C_V)`.
    pub fn casimirs(&self) -> (f64, f64) {
        (self.irrep.j_h.casimir(), self.irrep.j_v.casimir())
    }
}

pub const CODON_TABLE_TSV: &str = include_str!("../data/codon_table.tsv");
pub const DIMER_TABLE_TSV: &str = include_str!("../data/dimer_table.tsv");

const CODON_HEADER: &str = "# codon\tamino_acid\tj_h\tj_v\tcopy\tj3_h\tj3_v";
const DIMER_HEADER: &str = "# dimer\tj_h\tj_v\tj3_h\tj3_v\tq";

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn half(field: &str) -> Result<HalfInt> {
    field
        .parse()
        .map_err(|_| Error::MalformedNumber(field.to_string()))
}

pub fn parse_codon_table(text: &str) -> Result<Vec<CodonRecord>> {
    let mut out = Vec::with_capacity(64);
    for (lineno, line) in data_lines(text) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 7 {
            return Err(Error::Malformed(format!(
                "codon table line {}: expected 7 fields, found {}",
                lineno + 1,
                f.len()
            )));
        }
        let copy = f[4]
            .parse()
            .map_err(|_| Error::MalformedNumber(f[4].to_string()))?;
        out.push(CodonRecord {
            codon: f[0].parse()?,
            translation: f[1].parse()?,
            irrep: IrrepLabel {
                j_h: half(f[2])?,
                j_v: half(f[3])?,
                copy,
            },
            weight: Weight {
                j3_h: half(f[5])?,
                j3_v: half(f[6])?,
            },
        });
    }
    if out.len() != 64 {
        return Err(Error::DimensionMismatch {
            expected: 64,
            found: out.len(),
        });
    }
    Ok(out)
}

pub fn codon_table_tsv(records: &[CodonRecord]) -> String {
    let mut s = String::from(CODON_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.codon, r.translation, r.irrep.j_h, r.irrep.j_v, r.irrep.copy, r.weight.j3_h, r.weight.j3_v
        ));
    }
    s
}

pub fn parse_dimer_table(text: &str) -> Result<Vec<DimerRecord>> {
    let mut out = Vec::with_capacity(16);
    for (lineno, line) in data_lines(text) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(Error::Malformed(format!(
                "dimer table line {}: expected 6 fields, found {}",
                lineno + 1,
                f.len()
            )));
        }
        out.push(DimerRecord {
            dimer: f[0].parse()?,
            j_h: half(f[1])?,
            j_v: half(f[2])?,
            j3_h: half(f[3])?,
            j3_v: half(f[4])?,
            charge: f[5]
                .parse()
                .map_err(|_| Error::MalformedNumber(f[5].to_string()))?,
        });
    }
    if out.len() != 16 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            found: out.len(),
        });
    }
    Ok(out)
}

pub fn dimer_table_tsv(records: &[DimerRecord]) -> String {
    let mut s = String::from(DIMER_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.dimer, r.j_h, r.j_v, r.j3_h, r.j3_v, r.charge
        ));
    }
    s
}

static CODON_RECORDS: LazyLock<Vec<CodonRecord>> = LazyLock::new(|| {
    let mut rows = parse_codon_table(CODON_TABLE_TSV).expect("bundled codon table parses");
    rows.sort_by_key(|r| r.codon.table_index());
    rows
});

static DIMER_RECORDS: LazyLock<BTreeMap<Dimer, DimerRecord>> = LazyLock::new(|| {
    parse_dimer_table(DIMER_TABLE_TSV)
        .expect("bundled dimer table parses")
        .into_iter()
        .map(|r| (r.dimer, r))
        .collect()
});

/// All 64 bundled codon rows in canonical order.
pub fn codon_records() -> &'static [CodonRecord] {
    &CODON_RECORDS
}

pub fn codon_record(c: Codon) -> &'static CodonRecord {
    &CODON_RECORDS[c.table_index()]
}

pub fn dimer_records() -> Vec<&'static DimerRecord> {
    Dimer::all().into_iter().map(dimer_record).collect()
}

pub fn dimer_record(d: Dimer) -> &'static DimerRecord {
    &DIMER_RECORDS[&d]
}

/// Codon rows generated from the crystal decomposition, in canonical order.
pub fn derived_codon_records() -> Vec<CodonRecord> {
    let decomp = crystal::decompose(3);
    ALL_CODONS
        .iter()
        .map(|c| {
            let (irrep, weight) = *decomp.get(&c.word()).expect("complete decomposition");
            CodonRecord {
                codon: *c,
                translation: c.translate(),
                irrep,
                weight,
            }
        })
        .collect()
}

/// A dinucleotide whose formula charge differs from the tabulated one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChargeMismatch {
    pub dimer: Dimer,
    pub table: i32,
    pub formula: i32,
}

pub fn charge_mismatches() -> Vec<ChargeMismatch> {
    Dimer::all()
        .into_iter()
        .filter_map(|d| {
            let table = charge_table(d);
            let formula = charge_formula(d);
            (table != formula).then_some(ChargeMismatch {
                dimer: d,
                table,
                formula,
            })
        })
        .collect()
}

impl Serialize for Dimer {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
