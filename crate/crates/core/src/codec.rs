//! Systematic encoding and erasure decoding.
//!
//! Blocks 0..k carry the message verbatim. Everything else comes from the
//! parity-check equations: with P split by column-blocks into a known part K
//! and an unknown part U, `P_U · c_U = P_K · c_K` (minus is plus here).

use alloc::vec::Vec;

use crate::construction::{build_parity_matrix, CodeParams, Layout, ParityCheckMatrix};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::{mat_inverse, mat_mul, solve_full_column_rank, FieldMatrix};
use crate::mds::submatrix;

pub type Block = Vec<FieldElement>;

/// n blocks of ℓ symbols each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    blocks: Vec<Block>,
}

impl Codeword {
    pub fn new(layout: &Layout, blocks: Vec<Block>) -> Result<Self> {
        if blocks.len() != layout.n() || blocks.iter().any(|b| b.len() != layout.ell()) {
            return Err(Error::DimensionMismatch("codeword must have n blocks of ell symbols"));
        }
        Ok(Codeword { blocks })
    }

    pub fn zero(layout: &Layout) -> Self {
        Codeword {
            blocks: (0..layout.n()).map(|_| alloc::vec![FieldElement::ZERO; layout.ell()]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[FieldElement] {
        &self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<Block> {
        self.blocks
    }

    /// Block-major concatenation of all symbols.
    pub fn flatten(&self) -> Vec<FieldElement> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// The first `k` blocks, concatenated.
    pub fn message(&self, k: usize) -> Vec<FieldElement> {
        self.blocks[..k].iter().flatten().copied().collect()
    }

    pub fn add(&self, other: &Codeword) -> Codeword {
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x + *y).collect())
            .collect();
        Codeword { blocks }
    }

    /// Copy with the given blocks removed.
    pub fn erase(&self, erased: &[usize]) -> PartialCodeword {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (!erased.contains(&i)).then(|| b.clone()))
            .collect();
        PartialCodeword { blocks }
    }
}

/// A codeword with some blocks missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialCodeword {
    blocks: Vec<Option<Block>>,
}

impl PartialCodeword {
    pub fn new(blocks: Vec<Option<Block>>) -> Self {
        PartialCodeword { blocks }
    }

    pub fn blocks(&self) -> &[Option<Block>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> Option<&[FieldElement]> {
        self.blocks.get(i).and_then(|b| b.as_deref())
    }

    pub fn pattern(&self) -> ErasurePattern {
        ErasurePattern {
            erased: (0..self.blocks.len()).filter(|&i| self.blocks[i].is_none()).collect(),
        }
    }
}

/// Indices of erased blocks, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasurePattern {
    pub erased: Vec<usize>,
}

/// Parity-check matrix plus the precomputed systematic encoding map.
#[derive(Clone, Debug)]
pub struct Codec {
    params: CodeParams,
    parity: ParityCheckMatrix,
    // rℓ × kℓ: parity symbols as a function of the message
    encoding: FieldMatrix,
}

impl Codec {
    pub fn new(params: &CodeParams) -> Result<Self> {
        let parity = build_parity_matrix(params);
        let (n, k) = (params.n(), params.k());
        let data: Vec<usize> = (0..k).collect();
        let check: Vec<usize> = (k..n).collect();
        let field = params.field();
        let inv = mat_inverse(field, &submatrix(&parity, &check))?;
        let encoding = mat_mul(field, &inv, &submatrix(&parity, &data))?;
        Ok(Codec {
            params: params.clone(),
            parity,
            encoding,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn parity_matrix(&self) -> &ParityCheckMatrix {
        &self.parity
    }

    pub fn encode(&self, message: &[FieldElement]) -> Result<Codeword> {
        let (k, ell) = (self.params.k(), self.params.ell());
        if message.len() != k * ell {
            return Err(Error::DimensionMismatch("message must hold k * ell symbols"));
        }
        let field = self.params.field();
        let parity = mat_mul(field, &self.encoding, &FieldMatrix::column(message.to_vec()))?.into_data();
        let blocks = message.chunks(ell).chain(parity.chunks(ell)).map(<[_]>::to_vec).collect();
        Ok(Codeword { blocks })
    }

    /// P · c; all-zero exactly for codewords.
    pub fn syndrome(&self, codeword: &Codeword) -> Vec<FieldElement> {
        mat_mul(
            self.params.field(),
            self.parity.matrix(),
            &FieldMatrix::column(codeword.flatten()),
        )
        .expect("codeword length matches parity-check matrix")
        .into_data()
    }

    /// Fills in erased blocks. With fewer than r erasures the surplus
    /// equations are checked rather than ignored.
    pub fn decode(&self, partial: &PartialCodeword) -> Result<Codeword> {
        let layout = self.params.layout();
        let (n, ell) = (layout.n(), layout.ell());
        if partial.blocks.len() != n {
            return Err(Error::DimensionMismatch("partial codeword must have n block slots"));
        }
        for b in partial.blocks.iter().flatten() {
            if b.len() != ell {
                return Err(Error::DimensionMismatch("blocks must hold ell symbols"));
            }
        }
        let erased = partial.pattern().erased;
        if erased.len() > layout.r() {
            return Err(Error::TooManyErasures {
                erased: erased.len(),
                max: layout.r(),
            });
        }
        let mut blocks: Vec<Block> = partial
            .blocks
            .iter()
            .map(|b| b.clone().unwrap_or_default())
            .collect();
        if erased.is_empty() {
            return Ok(Codeword { blocks });
        }

        let field = self.params.field();
        let known: Vec<usize> = (0..n).filter(|i| !erased.contains(i)).collect();
        let known_symbols: Vec<FieldElement> = known.iter().flat_map(|&i| blocks[i].iter().copied()).collect();
        let rhs = mat_mul(field, &submatrix(&self.parity, &known), &FieldMatrix::column(known_symbols))?;
        let solution = solve_full_column_rank(field, &submatrix(&self.parity, &erased), &rhs)?.into_data();
        for (&i, chunk) in erased.iter().zip(solution.chunks(ell)) {
            blocks[i] = chunk.to_vec();
        }
        Ok(Codeword { blocks })
    }
}

pub fn encode(params: &CodeParams, message: &[FieldElement]) -> Result<Codeword> {
    Codec::new(params)?.encode(message)
}

pub fn decode_erasures(params: &CodeParams, partial: &PartialCodeword) -> Result<Codeword> {
    Codec::new(params)?.decode(partial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::mds::{sample_code, CodeTemplate};

    fn code(n: usize, k: usize, t: usize) -> CodeParams {
        let f = Field::with_bits(16).unwrap();
        sample_code(&CodeTemplate::new(f, n, k, t).unwrap(), 11, 10).unwrap().params
    }

    fn message(params: &CodeParams, seed: u32) -> Vec<FieldElement> {
        (0..(params.k() * params.ell()) as u32)
            .map(|i| FieldElement((i.wrapping_mul(2654435761) ^ seed.wrapping_mul(40503)) & 0xffff))
            .collect()
    }

    #[test]
    fn zero_message_gives_zero_codeword() {
        let p = code(6, 3, 1);
        let c = encode(&p, &alloc::vec![FieldElement::ZERO; 9]).unwrap();
        assert_eq!(c, Codeword::zero(p.layout()));
    }

    #[test]
    fn encoding_is_systematic_and_linear() {
        let p = code(6, 3, 1);
        let codec = Codec::new(&p).unwrap();
        let m1 = message(&p, 1);
        let m2 = message(&p, 2);
        let sum: Vec<_> = m1.iter().zip(&m2).map(|(a, b)| *a + *b).collect();
        let c1 = codec.encode(&m1).unwrap();
        let c2 = codec.encode(&m2).unwrap();
        assert_eq!(c1.message(3), m1);
        assert_eq!(c1.add(&c2), codec.encode(&sum).unwrap());
        assert!(codec.syndrome(&c1).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn decode_with_no_erasures_returns_input() {
        let p = code(6, 3, 1);
        let c = encode(&p, &message(&p, 5)).unwrap();
        assert_eq!(decode_erasures(&p, &c.erase(&[])).unwrap(), c);
    }

    #[test]
    fn decode_every_maximal_pattern() {
        let p = code(6, 3, 1);
        let codec = Codec::new(&p).unwrap();
        let c = codec.encode(&message(&p, 9)).unwrap();
        for erased in crate::mds::Combinations::new(6, 3) {
            assert_eq!(codec.decode(&c.erase(&erased)).unwrap(), c, "{erased:?}");
        }
    }

    #[test]
    fn too_many_erasures() {
        let p = code(6, 3, 1);
        let c = encode(&p, &message(&p, 5)).unwrap();
        assert_eq!(
            decode_erasures(&p, &c.erase(&[0, 1, 2, 3])),
            Err(Error::TooManyErasures { erased: 4, max: 3 })
        );
    }

    #[test]
    fn inconsistent_survivors_are_detected() {
        let p = code(6, 3, 1);
        let c = encode(&p, &message(&p, 5)).unwrap();
        let mut blocks: Vec<Option<Block>> = c.blocks().iter().cloned().map(Some).collect();
        blocks[4] = None;
        blocks[0].as_mut().unwrap()[1] += FieldElement::ONE;
        assert_eq!(
            decode_erasures(&p, &PartialCodeword::new(blocks)),
            Err(Error::InconsistentInput)
        );
    }

    #[test]
    fn message_length_is_checked() {
        let p = code(6, 3, 1);
        assert!(encode(&p, &[FieldElement::ONE; 8]).is_err());
    }
}
