//! TOML code-spec files.
//!
//! ```toml
//! version = 1
//! n = 6
//! k = 3
//! t = 1
//! seed = 7
//! lambda = ["2", "4", "8", "10", "20", "40"]
//! rho = "9c1f"
//!
//! [field]
//! w = 16
//! poly = "1002d"
//! ```
//!
//! Symbols and the field polynomial are lowercase hex without a prefix.

use std::fs;
use std::path::Path;

use epmd_core::construction::{build_parity_matrix, Layout};
use epmd_core::mds::verify_mds;
use epmd_core::{CodeParams, Field, FieldElement};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEC_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpecFile {
    pub version: u32,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    /// Seed the ρ sampler was run with.
    pub seed: u64,
    pub lambda: Vec<String>,
    pub rho: String,
    pub field: FieldSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub w: u32,
    /// Full reduction polynomial, including the x^w term.
    pub poly: String,
}

pub fn to_hex(v: u64) -> String {
    format!("{v:x}")
}

pub fn from_hex(s: &str) -> Result<u64> {
    let canonical = !s.is_empty()
        && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
        && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(Error::SpecParse(format!("{s:?} is not lowercase hex without prefix")));
    }
    u64::from_str_radix(s, 16).map_err(|e| Error::SpecParse(format!("{s:?}: {e}")))
}

impl CodeSpecFile {
    pub fn from_params(params: &CodeParams, seed: u64) -> Self {
        CodeSpecFile {
            version: SPEC_VERSION,
            n: params.n(),
            k: params.k(),
            t: params.t(),
            seed,
            lambda: params.lambda().iter().map(|l| to_hex(l.value().into())).collect(),
            rho: to_hex(params.rho().value().into()),
            field: FieldSpec {
                w: params.field().bits(),
                poly: to_hex(params.field().poly()),
            },
        }
    }

    pub fn to_params(&self) -> Result<CodeParams> {
        if self.version != SPEC_VERSION {
            return Err(Error::SpecParse(format!("unsupported version {}", self.version)));
        }
        let field = Field::new(self.field.w, from_hex(&self.field.poly)?)?;
        let layout = Layout::new(self.n, self.k, self.t)?;
        let element = |s: &str| -> Result<FieldElement> { Ok(field.element(from_hex(s)?)?) };
        let lambda = self.lambda.iter().map(|s| element(s)).collect::<Result<Vec<_>>>()?;
        let rho = element(&self.rho)?;
        Ok(CodeParams::new(field, layout, lambda, rho)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::SpecParse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::SpecParse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml()?).map_err(|e| Error::io(path, e))
    }
}

/// Reads a spec file into code parameters, checking the MDS property unless
/// `skip_verify` is set.
pub fn load_params(path: &Path, skip_verify: bool) -> Result<(CodeSpecFile, CodeParams)> {
    let spec = CodeSpecFile::read(path)?;
    let params = spec.to_params()?;
    if !skip_verify {
        verify(&params)?;
    }
    Ok((spec, params))
}

pub fn verify(params: &CodeParams) -> Result<usize> {
    let report = verify_mds(params.field(), &build_parity_matrix(params));
    match report.failing_subset {
        Some(blocks) => Err(Error::NotMds(blocks)),
        None => Ok(report.subsets_checked),
    }
}
