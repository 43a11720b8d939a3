//! Binary codeword files.
//!
//! Layout: `b"EPMD"`, a version byte, then `n`, `ell` and `w` as little-endian
//! u32, then `n * ell` symbols of `w / 8` little-endian bytes, block-major.
//! A single stored block uses the same format with `n = 1`.

use std::fs;
use std::path::{Path, PathBuf};

use epmd_core::{CodeParams, FieldElement};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"EPMD";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 3 * 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodewordFile {
    pub n: u32,
    pub ell: u32,
    pub w: u32,
    pub symbols: Vec<FieldElement>,
}

impl CodewordFile {
    pub fn new(ell: usize, w: u32, blocks: &[Vec<FieldElement>]) -> Self {
        CodewordFile {
            n: blocks.len() as u32,
            ell: ell as u32,
            w,
            symbols: blocks.iter().flatten().copied().collect(),
        }
    }

    pub fn blocks(&self) -> Vec<Vec<FieldElement>> {
        self.symbols.chunks(self.ell.max(1) as usize).map(<[_]>::to_vec).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.symbols.len() * (self.w as usize / 8));
        out.extend_from_slice(MAGIC);
        out.push(FORMAT_VERSION);
        for field in [self.n, self.ell, self.w] {
            out.extend_from_slice(&field.to_le_bytes());
        }
        out.extend(encode_symbols(&self.symbols, self.w));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::SizeMismatch {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        if &bytes[..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(bytes[4]));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[5 + 4 * i..9 + 4 * i].try_into().unwrap());
        let (n, ell, w) = (word(0), word(1), word(2));
        if !matches!(w, 8 | 16 | 32) {
            return Err(Error::HeaderMismatch { what: "symbol width" });
        }
        let expected = (n as usize)
            .checked_mul(ell as usize)
            .and_then(|c| c.checked_mul(w as usize / 8))
            .and_then(|c| c.checked_add(HEADER_LEN))
            .ok_or(Error::HeaderMismatch { what: "size" })?;
        if bytes.len() != expected {
            return Err(Error::SizeMismatch {
                expected,
                found: bytes.len(),
            });
        }
        Ok(CodewordFile {
            n,
            ell,
            w,
            symbols: decode_symbols(&bytes[HEADER_LEN..], w)?,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    /// Checks `n`, `ell` and `w` against a code.
    pub fn check(&self, params: &CodeParams, n: usize) -> Result<()> {
        if self.w != params.field().bits() {
            return Err(Error::HeaderMismatch { what: "symbol width" });
        }
        if self.ell as usize != params.ell() {
            return Err(Error::HeaderMismatch { what: "ell" });
        }
        if self.n as usize != n {
            return Err(Error::HeaderMismatch { what: "n" });
        }
        Ok(())
    }
}

pub fn encode_symbols(symbols: &[FieldElement], w: u32) -> Vec<u8> {
    let width = w as usize / 8;
    symbols
        .iter()
        .flat_map(|s| s.value().to_le_bytes().into_iter().take(width))
        .collect()
}

pub fn decode_symbols(bytes: &[u8], w: u32) -> Result<Vec<FieldElement>> {
    let width = w as usize / 8;
    if width == 0 || !bytes.len().is_multiple_of(width) {
        return Err(Error::SizeMismatch {
            expected: bytes.len().next_multiple_of(width.max(1)),
            found: bytes.len(),
        });
    }
    Ok(bytes
        .chunks(width)
        .map(|c| {
            let mut word = [0u8; 4];
            word[..width].copy_from_slice(c);
            FieldElement(u32::from_le_bytes(word))
        })
        .collect())
}

/// `block_01.epmd` for block index 0.
pub fn block_file_name(index: usize) -> String {
    format!("block_{:02}.epmd", index + 1)
}

pub fn block_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(block_file_name(index))
}

/// Block index encoded in a `block_NN.epmd` name.
pub fn parse_block_file_name(name: &str) -> Option<usize> {
    let digits = name.strip_prefix("block_")?.strip_suffix(".epmd")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<usize>().ok()?.checked_sub(1)
}

pub fn write_block(dir: &Path, params: &CodeParams, index: usize, block: &[FieldElement]) -> Result<()> {
    CodewordFile::new(params.ell(), params.field().bits(), &[block.to_vec()]).write(&block_path(dir, index))
}

/// Loads every `block_NN.epmd` in `dir`; missing blocks are `None`.
pub fn read_blocks(dir: &Path, params: &CodeParams) -> Result<Vec<Option<Vec<FieldElement>>>> {
    let mut blocks = vec![None; params.n()];
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let Some(index) = entry.file_name().to_str().and_then(parse_block_file_name) else {
            continue;
        };
        if index >= params.n() {
            return Err(Error::Core(epmd_core::Error::InvalidBlock(index)));
        }
        let file = CodewordFile::read(&entry.path())?;
        file.check(params, 1)?;
        blocks[index] = Some(file.symbols);
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let f = CodewordFile {
            n: 1,
            ell: 2,
            w: 16,
            symbols: vec![FieldElement(0x0102), FieldElement(0xa0b0)],
        };
        let bytes = f.to_bytes();
        assert_eq!(&bytes[..5], b"EPMD\x01");
        assert_eq!(&bytes[5..17], &[1, 0, 0, 0, 2, 0, 0, 0, 16, 0, 0, 0]);
        assert_eq!(&bytes[17..], &[0x02, 0x01, 0xb0, 0xa0]);
        assert_eq!(CodewordFile::from_bytes(&bytes).unwrap(), f);
    }

    #[test]
    fn block_names() {
        assert_eq!(block_file_name(0), "block_01.epmd");
        assert_eq!(block_file_name(11), "block_12.epmd");
        assert_eq!(parse_block_file_name("block_03.epmd"), Some(2));
        assert_eq!(parse_block_file_name("block_00.epmd"), None);
        assert_eq!(parse_block_file_name("block_x.epmd"), None);
        assert_eq!(parse_block_file_name("codeword.epmd"), None);
    }

    #[test]
    fn symbol_widths() {
        let s = [FieldElement(0xdeadbeef), FieldElement(7)];
        assert_eq!(decode_symbols(&encode_symbols(&s, 32), 32).unwrap(), s);
        assert_eq!(encode_symbols(&[FieldElement(0xab)], 8), vec![0xab]);
        assert!(decode_symbols(&[1, 2, 3], 16).is_err());
    }
}
