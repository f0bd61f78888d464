//! JSON and CSV serialization of charge configurations.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ChargeConfiguration;
use crate::error::{Error, Result};
use crate::lattice::BravaisLattice;
use crate::scalar::Real;

/// On-disk form: {"N": 2, "dim": 3, "values": [...]} in lexicographic K_N order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeFile {
    #[serde(rename = "N")]
    pub period: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub values: Vec<f64>,
}

impl ChargeFile {
    /// Dimension, inferred from N^d = len when absent.
    pub fn resolved_dim(&self) -> Result<usize> {
        if let Some(d) = self.dim {
            return Ok(d);
        }
        let candidates: Vec<usize> = (1..=crate::lattice::MAX_DIM)
            .filter(|&d| self.period.checked_pow(d as u32) == Some(self.values.len()))
            .collect();
        match candidates.as_slice() {
            [d] => Ok(*d),
            [] => Err(Error::InvalidArgument(format!(
                "{} charges is not a power of N = {}",
                self.values.len(),
                self.period
            ))),
            _ => Err(Error::InvalidArgument(
                "dimension is ambiguous; set \"dim\" explicitly".into(),
            )),
        }
    }
}

impl<T: Real> Serialize for ChargeConfiguration<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for ChargeConfiguration<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = ChargeFile::deserialize(deserializer)?;
        Self::from_file(&file).map_err(serde::de::Error::custom)
    }
}

impl<T: Real> ChargeConfiguration<T> {
    pub fn to_file(&self) -> ChargeFile {
        ChargeFile {
            period: self.period(),
            dim: Some(self.dim()),
            values: self.values().iter().map(|v| v.as_f64()).collect(),
        }
    }

    pub fn from_file(file: &ChargeFile) -> Result<Self> {
        let dim = file.resolved_dim()?;
        Self::new(dim, file.period, file.values.iter().map(|&v| T::lit(v)).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChargeFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("charge JSON: {e}")))?;
        Self::from_file(&file)
    }

    /// CSV with columns m1..md, x1..xd, charge.
    pub fn write_csv<W: Write>(&self, lattice: &BravaisLattice<T>, out: W) -> Result<()> {
        let d = self.dim();
        if lattice.dim() != d {
            return Err(Error::InvalidArgument("lattice and charges differ in dimension".into()));
        }
        let io_err = |e: csv::Error| Error::InvalidArgument(format!("CSV output: {e}"));
        let mut writer = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=d).map(|i| format!("m{i}")).collect();
        header.extend((1..=d).map(|i| format!("x{i}")));
        header.push("charge".into());
        writer.write_record(&header).map_err(io_err)?;
        for (m, x) in lattice.sublattice_points(self.period()) {
            let n: Vec<i64> = m.iter().map(|&c| c as i64).collect();
            let mut row: Vec<String> = m.iter().map(|c| c.to_string()).collect();
            row.extend(x.iter().map(|v| v.as_f64().to_string()));
            row.push(self.value(&n).as_f64().to_string());
            writer.write_record(&row).map_err(io_err)?;
        }
        writer
            .flush()
            .map_err(|e| Error::InvalidArgument(format!("CSV output: {e}")))
    }
}
