//! CSV and JSON codecs for codon and amino-acid matrices.
//!
//! CSV layout: `#` comment lines carrying the kind and metadata, then a
//! header row of source labels and one row per target label. Entries are
//! written with 17 significant digits, so a save/load cycle is bitwise.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::aggregate::AminoAcidMatrix;
use crate::error::{Error, Result};
use crate::genetic::{AminoAcid, Codon, SENSE_CODONS};
use crate::rate::{CodonMatrix, MatrixKind, Metadata};

const CONVENTION: &str = "columns are sources: entry (row j, column i) is the flow i -> j";
const CORNER: &str = "to\\from";

fn codon_labels() -> Vec<String> {
    SENSE_CODONS.iter().map(|c| c.to_string()).collect()
}

fn amino_labels() -> Vec<String> {
    AminoAcid::ALL.iter().map(|a| a.three_letter().to_string()).collect()
}

fn write_csv(kind: MatrixKind, meta: &Metadata, labels: &[String], m: &DMatrix<f64>) -> String {
    let mut s = String::new();
    s.push_str(&format!("# kind: {}\n", kind.as_str()));
    s.push_str(&format!(
        "# meta: {}\n",
        serde_json::to_string(meta).expect("metadata serializes")
    ));
    s.push_str(&format!("# {CONVENTION}\n"));
    s.push_str(CORNER);
    for l in labels {
        s.push(',');
        s.push_str(l);
    }
    s.push('\n');
    for (j, l) in labels.iter().enumerate() {
        s.push_str(l);
        for i in 0..labels.len() {
            s.push_str(&format!(",{:.16e}", m[(j, i)]));
        }
        s.push('\n');
    }
    s
}

/// Label check: `parse` rejects unknown labels, position must match.
fn check_label(found: &str, expected: &str, valid: impl Fn(&str) -> bool) -> Result<()> {
    if !valid(found) {
        return Err(Error::UnknownLabel(found.to_string()));
    }
    if found != expected {
        return Err(Error::Malformed(format!(
            "label {found} out of order, expected {expected}"
        )));
    }
    Ok(())
}

fn read_csv(
    text: &str,
    labels: &[String],
    valid: impl Fn(&str) -> bool,
) -> Result<(MatrixKind, Metadata, DMatrix<f64>)> {
    let n = labels.len();
    let mut kind = None;
    let mut meta = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(k) = comment.strip_prefix("kind:") {
                kind = Some(k.trim().parse::<MatrixKind>()?);
            } else if let Some(m) = comment.strip_prefix("meta:") {
                meta = Some(
                    serde_json::from_str::<Metadata>(m.trim())
                        .map_err(|e| Error::Malformed(format!("metadata: {e}")))?,
                );
            }
        } else if !line.trim().is_empty() {
            rows.push(line.trim_end_matches('\r'));
        }
    }
    let kind = kind.ok_or_else(|| Error::Malformed("missing kind line".into()))?;
    let meta = meta.ok_or_else(|| Error::Malformed("missing meta line".into()))?;

    let (header, body) = rows
        .split_first()
        .ok_or_else(|| Error::Malformed("missing header row".into()))?;
    let header: Vec<&str> = header.split(',').map(str::trim).collect();
    if header.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: header.len().saturating_sub(1),
        });
    }
    for (found, expected) in header[1..].iter().zip(labels) {
        check_label(found, expected, &valid)?;
    }
    if body.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: body.len(),
        });
    }
    let mut m = DMatrix::zeros(n, n);
    for (j, row) in body.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').map(str::trim).collect();
        if cells.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: cells.len().saturating_sub(1),
            });
        }
        check_label(cells[0], &labels[j], &valid)?;
        for (i, cell) in cells[1..].iter().enumerate() {
            m[(j, i)] = cell
                .parse::<f64>()
                .map_err(|_| Error::MalformedNumber(format!("{cell:?} at row {}, column {}", labels[j], labels[i])))?;
        }
    }
    Ok((kind, meta, m))
}

fn is_sense_label(s: &str) -> bool {
    s.parse::<Codon>().is_ok_and(|c| !c.is_stop())
}

fn is_amino_label(s: &str) -> bool {
    s.parse::<AminoAcid>().is_ok()
}

pub fn codon_matrix_csv(m: &CodonMatrix) -> String {
    write_csv(m.kind, &m.meta, &codon_labels(), &m.entries)
}

pub fn parse_codon_matrix_csv(text: &str) -> Result<CodonMatrix> {
    let (kind, meta, entries) = read_csv(text, &codon_labels(), is_sense_label)?;
    Ok(CodonMatrix { kind, meta, entries })
}

pub fn amino_matrix_csv(m: &AminoAcidMatrix) -> String {
    write_csv(m.source_kind, &m.meta, &amino_labels(), &m.entries)
}

pub fn parse_amino_matrix_csv(text: &str) -> Result<AminoAcidMatrix> {
    let (source_kind, meta, entries) = read_csv(text, &amino_labels(), is_amino_label)?;
    Ok(AminoAcidMatrix {
        source_kind,
        meta,
        entries,
    })
}

pub fn save_codon_matrix(m: &CodonMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, codon_matrix_csv(m))?;
    Ok(())
}

pub fn load_codon_matrix(path: &Path) -> Result<CodonMatrix> {
    parse_codon_matrix_csv(&std::fs::read_to_string(path)?)
}

pub fn save_amino_matrix(m: &AminoAcidMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, amino_matrix_csv(m))?;
    Ok(())
}

pub fn load_amino_matrix(path: &Path) -> Result<AminoAcidMatrix> {
    parse_amino_matrix_csv(&std::fs::read_to_string(path)?)
}

/// JSON form of either matrix; `entries[j][i]` is the flow `i → j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub kind: MatrixKind,
    pub meta: Metadata,
    pub convention: String,
    pub labels: Vec<String>,
    pub entries: Vec<Vec<f64>>,
}

impl MatrixDocument {
    fn new(kind: MatrixKind, meta: Metadata, labels: Vec<String>, m: &DMatrix<f64>) -> Self {
        let entries = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        MatrixDocument {
            kind,
            meta,
            convention: CONVENTION.to_string(),
            labels,
            entries,
        }
    }

    fn matrix(&self, labels: &[String], valid: impl Fn(&str) -> bool) -> Result<DMatrix<f64>> {
        let n = labels.len();
        if self.labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.labels.len(),
            });
        }
        for (found, expected) in self.labels.iter().zip(labels) {
            check_label(found, expected, &valid)?;
        }
        if self.entries.len() != n || self.entries.iter().any(|r| r.len() != n) {
            let found = self.entries.iter().map(Vec::len).find(|&l| l != n).unwrap_or(self.entries.len());
            return Err(Error::DimensionMismatch { expected: n, found });
        }
        Ok(DMatrix::from_fn(n, n, |j, i| self.entries[j][i]))
    }
}

pub fn codon_matrix_json(m: &CodonMatrix) -> String {
    let doc = MatrixDocument::new(m.kind, m.meta, codon_labels(), &m.entries);
    serde_json::to_string_pretty(&doc).expect("matrix serializes")
}

pub fn parse_codon_matrix_json(text: &str) -> Result<CodonMatrix> {
    let doc: MatrixDocument = serde_json::from_str(text)?;
    let entries = doc.matrix(&codon_labels(), is_sense_label)?;
    Ok(CodonMatrix {
        kind: doc.kind,
        meta: doc.meta,
        entries,
    })
}

pub fn amino_matrix_json(m: &AminoAcidMatrix) -> String {
    let doc = MatrixDocument::new(m.source_kind, m.meta, amino_labels(), &m.entries);
    serde_json::to_string_pretty(&doc).expect("matrix serializes")
}

pub fn parse_amino_matrix_json(text: &str) -> Result<AminoAcidMatrix> {
    let doc: MatrixDocument = serde_json::from_str(text)?;
    let entries = doc.matrix(&amino_labels(), is_amino_label)?;
    Ok(AminoAcidMatrix {
        source_kind: doc.kind,
        meta: doc.meta,
        entries,
    })
}
