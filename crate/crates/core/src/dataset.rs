//! The bundled data files and their SHA-256 manifest.
//!
//! A bundle is the five files below. The compiled-in copy is used unless a
//! directory is given explicitly or through `CCT_DATA_DIR`.

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::genetic::{self, CodonRecord, DimerRecord};
use crate::predict::ExperimentalDataset;

pub const DATA_DIR_ENV: &str = "CCT_DATA_DIR";
pub const MANIFEST: &str = "MANIFEST.sha256";
pub const CODON_TABLE: &str = "codon_table.tsv";
pub const DIMER_TABLE: &str = "dimer_table.tsv";
pub const PAIR_RATES: &str = "pet91_pair_rates.tsv";
pub const MUTABILITY: &str = "relative_mutability.tsv";

pub const DATA_FILES: [&str; 4] = [CODON_TABLE, DIMER_TABLE, PAIR_RATES, MUTABILITY];

const BUNDLED: [(&str, &str); 5] = [
    (CODON_TABLE, include_str!("../data/codon_table.tsv")),
    (DIMER_TABLE, include_str!("../data/dimer_table.tsv")),
    (PAIR_RATES, include_str!("../data/pet91_pair_rates.tsv")),
    (MUTABILITY, include_str!("../data/relative_mutability.tsv")),
    (MANIFEST, include_str!("../data/MANIFEST.sha256")),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetBundle {
    files: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl DatasetBundle {
    /// The compiled-in copy (not yet verified).
    pub fn bundled() -> Self {
        DatasetBundle {
            files: BUNDLED
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    /// Reads and verifies a bundle directory.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut files = BTreeMap::new();
        for name in DATA_FILES.iter().chain([&MANIFEST]) {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Malformed(format!("cannot read {}: {e}", path.display()))
            })?;
            files.insert(name.to_string(), text);
        }
        let bundle = DatasetBundle { files };
        bundle.verify()?;
        Ok(bundle)
    }

    /// `dir`, else `$CCT_DATA_DIR`, else the compiled-in copy; always verified.
    pub fn load(dir: Option<&Path>) -> Result<Self> {
        match dir {
            Some(d) => Self::load_dir(d),
            None => match std::env::var_os(DATA_DIR_ENV) {
                Some(d) => Self::load_dir(Path::new(&d)),
                None => {
                    let b = Self::bundled();
                    b.verify()?;
                    Ok(b)
                }
            },
        }
    }

    pub fn file(&self, name: &str) -> &str {
        self.files.get(name).map(String::as_str).unwrap_or("")
    }

    /// Parsed `sha256sum`-style manifest.
    pub fn manifest(&self) -> Result<BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for line in self.file(MANIFEST).lines().filter(|l| !l.trim().is_empty()) {
            let (hash, name) = line
                .split_once("  ")
                .ok_or_else(|| Error::Malformed(format!("manifest line {line:?}")))?;
            out.insert(name.trim().to_string(), hash.trim().to_ascii_lowercase());
        }
        Ok(out)
    }

    pub fn verify(&self) -> Result<()> {
        let manifest = self.manifest()?;
        for name in DATA_FILES {
            let expected = manifest
                .get(name)
                .ok_or_else(|| Error::Malformed(format!("manifest has no entry for {name}")))?;
            let found = sha256_hex(self.file(name).as_bytes());
            if &found != expected {
                return Err(Error::Checksum {
                    file: name.to_string(),
                    expected: expected.clone(),
                    found,
                });
            }
        }
        Ok(())
    }

    pub fn experimental(&self) -> Result<ExperimentalDataset> {
        ExperimentalDataset::parse(self.file(PAIR_RATES), self.file(MUTABILITY))
    }

    pub fn codon_records(&self) -> Result<Vec<CodonRecord>> {
        genetic::parse_codon_table(self.file(CODON_TABLE))
    }

    pub fn dimer_records(&self) -> Result<Vec<DimerRecord>> {
        genetic::parse_dimer_table(self.file(DIMER_TABLE))
    }

    /// Writes all files, manifest included, to `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, text) in &self.files {
            std::fs::write(dir.join(name), text)?;
        }
        Ok(())
    }
}
