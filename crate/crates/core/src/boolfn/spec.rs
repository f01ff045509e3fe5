//! Function specifications (`maj:n=5`, `tribes:w=3,t=4`, `grid:side=3`,
//! `table:@file.json`) and the truth-table file format.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BooleanFunction;
use crate::error::{Error, Result};

/// `{"n": int, "table_hex": string}`: the `2^n` table bits packed into bytes
/// least-significant bit first, bytes in increasing index order, hex encoded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthTableFile {
    pub n: usize,
    pub table_hex: String,
}

impl TruthTableFile {
    pub fn from_function(f: &BooleanFunction) -> Result<Self> {
        let table = f
            .table()
            .ok_or_else(|| Error::Unsupported("a materializable truth table".into()))?;
        let mut bytes = vec![0u8; table.len().div_ceil(8)];
        for (i, &b) in table.iter().enumerate() {
            if b {
                bytes[i / 8] |= 1 << (i % 8);
            }
        }
        let table_hex = bytes.iter().map(|b| format!("{b:02x}")).collect();
        Ok(TruthTableFile { n: f.n(), table_hex })
    }

    pub fn to_function(&self) -> Result<BooleanFunction> {
        let hex = self.table_hex.trim();
        let len = 1usize << self.n;
        if hex.len() != 2 * len.div_ceil(8) {
            return Err(Error::malformed(format!(
                "table_hex for n={} needs {} hex digits, got {}",
                self.n,
                2 * len.div_ceil(8),
                hex.len()
            )));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|e| Error::malformed(format!("table_hex: {e}")))?;
        let table: Vec<bool> = (0..len).map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1).collect();
        BooleanFunction::from_table(self.n, &table)
    }
}

pub fn read_truth_table(path: &Path) -> Result<BooleanFunction> {
    let file: TruthTableFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.to_function()
}

pub fn write_truth_table(f: &BooleanFunction, path: &Path) -> Result<()> {
    let file = TruthTableFile::from_function(f)?;
    std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
    Ok(())
}

/// Parses the CLI mini-language into a function.
pub fn parse_function_spec(spec: &str) -> Result<BooleanFunction> {
    let (family, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let family = family.trim();
    if family == "table" {
        let path = rest.trim().trim_start_matches('@');
        if path.is_empty() {
            return Err(Error::malformed("table spec needs a file: table:@file.json"));
        }
        return read_truth_table(Path::new(path));
    }
    let mut params = BTreeMap::new();
    for kv in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::malformed(format!("expected key=value, got `{kv}`")))?;
        let v: u64 = v
            .trim()
            .parse()
            .map_err(|_| Error::malformed(format!("parameter `{k}` is not an integer")))?;
        params.insert(k.trim().to_string(), v);
    }
    BooleanFunction::make_named(family, &params)
}
