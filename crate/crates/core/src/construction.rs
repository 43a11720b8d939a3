//! Index arithmetic and assembly of the parity-check matrix `P = H + E^ρ`.
//!
//! The n blocks are split into r = n − k groups of s = n / r blocks; block
//! (u, v) with u ∈ [r], v ∈ [s] is the ((u−1)s + v)-th block. Each block holds
//! ℓ = r^t symbols, addressed by vectors x ∈ [r]^t and linearized big-endian:
//! `flat = Σ (x_j − 1)·r^(t−j)`.
//!
//! Rows 0..ℓ of `P` are the Type I constraints (all-ones over one symbol
//! position). For p = 1..r−1 the rows p·ℓ..(p+1)·ℓ are Type II constraints:
//! λ_i^p on symbol x of every block, plus ρ on symbol `modify_vector(x, v, p)`
//! of block (x_{wrap(v,t)}, v) for every v ∈ [s].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::FieldMatrix;

/// Largest sub-packetization accepted by [`Layout::new`].
pub const MAX_SUBPACKETIZATION: usize = 1 << 16;

/// `l mod m`, except that multiples of m map to m. Result lies in `[m]`.
#[inline]
pub fn wrap(l: usize, m: usize) -> usize {
    debug_assert!(l >= 1 && m >= 1);
    match l % m {
        0 => m,
        x => x,
    }
}

/// Group/position of a block; both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId {
    pub u: usize,
    pub v: usize,
}

/// Flat (0-based) symbol position inside a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub usize);

/// Shape of a code instance: everything that does not depend on λ, ρ or the
/// field. Repair plans only depend on this.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Layout {
    n: usize,
    k: usize,
    r: usize,
    s: usize,
    t: usize,
    ell: usize,
}

impl Layout {
    pub fn new(n: usize, k: usize, t: usize) -> Result<Layout> {
        if k == 0 || k >= n {
            return Err(Error::InvalidParams(format!("need 1 <= k <= n-1, got n={n} k={k}")));
        }
        let r = n - k;
        if !n.is_multiple_of(r) {
            return Err(Error::InvalidParams(format!(
                "n - k = {r} must divide n = {n} (unequal groups are not supported)"
            )));
        }
        let s = n / r;
        if t == 0 || t > s {
            return Err(Error::InvalidParams(format!("need 1 <= t <= n/(n-k) = {s}, got t={t}")));
        }
        let ell = u32::try_from(t)
            .ok()
            .and_then(|t| r.checked_pow(t))
            .filter(|&l| l <= MAX_SUBPACKETIZATION)
            .ok_or_else(|| Error::InvalidParams(format!("sub-packetization {r}^{t} is too large")))?;
        Ok(Layout { n, k, r, s, t, ell })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of parity blocks and groups, n − k.
    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    /// Group size n / r.
    #[inline]
    pub fn s(&self) -> usize {
        self.s
    }

    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    /// Sub-packetization r^t.
    #[inline]
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Block with 0-based index `index`.
    pub fn block(&self, index: usize) -> Result<BlockId> {
        if index >= self.n {
            return Err(Error::InvalidBlock(index));
        }
        Ok(BlockId {
            u: index / self.s + 1,
            v: index % self.s + 1,
        })
    }

    /// 0-based index of `b`, i.e. `(u−1)s + v − 1`.
    pub fn block_index(&self, b: BlockId) -> Result<usize> {
        if b.u == 0 || b.u > self.r || b.v == 0 || b.v > self.s {
            return Err(Error::InvalidBlockId { u: b.u, v: b.v });
        }
        Ok((b.u - 1) * self.s + b.v - 1)
    }

    #[inline]
    fn weight(&self, a: usize) -> usize {
        self.r.pow((self.t - a) as u32)
    }

    /// Coordinate `a` ∈ [t] of `x`, in [r].
    #[inline]
    pub fn coord(&self, x: SymbolId, a: usize) -> usize {
        (x.0 / self.weight(a)) % self.r + 1
    }

    /// `x` with coordinate `a` replaced by `value` ∈ [r].
    #[inline]
    pub fn with_coord(&self, x: SymbolId, a: usize, value: usize) -> SymbolId {
        let w = self.weight(a);
        let old = self.coord(x, a);
        SymbolId(x.0 - (old - 1) * w + (value - 1) * w)
    }

    /// The coordinate vector (x₁, …, x_t).
    pub fn coords(&self, x: SymbolId) -> Vec<usize> {
        (1..=self.t).map(|a| self.coord(x, a)).collect()
    }

    pub fn symbol(&self, coords: &[usize]) -> SymbolId {
        debug_assert_eq!(coords.len(), self.t);
        SymbolId(coords.iter().fold(0, |acc, &c| acc * self.r + (c - 1)))
    }

    /// Replaces coordinate a = wrap(v, t) of `x` by wrap(x_a + p, r).
    #[inline]
    pub fn modify_vector(&self, x: SymbolId, v: usize, p: usize) -> SymbolId {
        let a = wrap(v, self.t);
        self.with_coord(x, a, wrap(self.coord(x, a) + p, self.r))
    }

    /// Column of `P` holding symbol `x` of block `block` (0-based).
    #[inline]
    pub fn column(&self, block: usize, x: SymbolId) -> usize {
        block * self.ell + x.0
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> {
        (0..self.ell).map(SymbolId)
    }
}

/// Symbolic coefficient of one term of a constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    One,
    /// λ_i^p, where i is the block the term belongs to.
    LambdaPow(usize),
    Rho,
}

/// One nonzero term of a parity constraint: coefficient × c(symbol; block).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Term {
    pub block: usize,
    pub symbol: SymbolId,
    pub coef: Coefficient,
}

/// Terms of the Type I constraint at symbol `x`.
pub fn type1_terms(layout: &Layout, x: SymbolId) -> impl Iterator<Item = Term> + '_ {
    (0..layout.n).map(move |block| Term {
        block,
        symbol: x,
        coef: Coefficient::One,
    })
}

/// Terms of the Type II constraint (p, x): the n λ-terms of part (a), then the
/// s ρ-terms of part (b) in order v = 1..s.
pub fn type2_terms(layout: &Layout, p: usize, x: SymbolId) -> impl Iterator<Item = Term> + '_ {
    let part_a = (0..layout.n).map(move |block| Term {
        block,
        symbol: x,
        coef: Coefficient::LambdaPow(p),
    });
    let part_b = (1..=layout.s).map(move |v| {
        let u = layout.coord(x, wrap(v, layout.t));
        Term {
            block: (u - 1) * layout.s + v - 1,
            symbol: layout.modify_vector(x, v, p),
            coef: Coefficient::Rho,
        }
    });
    part_a.chain(part_b)
}

/// λ, ρ and the field on top of a [`Layout`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeParams {
    layout: Layout,
    field: Field,
    lambda: Vec<FieldElement>,
    rho: FieldElement,
}

/// λ_i = g^i for i = 1..=n, with g the field's generator.
pub fn default_lambda(field: &Field, n: usize) -> Vec<FieldElement> {
    (1..=n as u64).map(|i| field.pow(field.generator(), i)).collect()
}

pub(crate) fn check_lambda(field: &Field, layout: &Layout, lambda: &[FieldElement]) -> Result<()> {
    if field.order() < layout.n as u64 + 1 {
        return Err(Error::InvalidParams(format!(
            "field of order {} is too small for n = {}",
            field.order(),
            layout.n
        )));
    }
    if lambda.len() != layout.n {
        return Err(Error::InvalidParams(format!(
            "expected {} lambda values, got {}",
            layout.n,
            lambda.len()
        )));
    }
    for (i, &l) in lambda.iter().enumerate() {
        if l.is_zero() || !field.contains(l) {
            return Err(Error::InvalidParams(format!("lambda[{i}] must be a nonzero field element")));
        }
        if lambda[..i].contains(&l) {
            return Err(Error::InvalidParams(format!("lambda[{i}] repeats an earlier value")));
        }
    }
    Ok(())
}

impl CodeParams {
    pub fn new(field: Field, layout: Layout, lambda: Vec<FieldElement>, rho: FieldElement) -> Result<Self> {
        check_lambda(&field, &layout, &lambda)?;
        if rho.is_zero() || !field.contains(rho) {
            return Err(Error::InvalidParams("rho must be a nonzero field element".into()));
        }
        Ok(CodeParams {
            layout,
            field,
            lambda,
            rho,
        })
    }

    /// Parameters with the default λ sequence.
    pub fn with_default_lambda(field: Field, n: usize, k: usize, t: usize, rho: FieldElement) -> Result<Self> {
        let layout = Layout::new(n, k, t)?;
        let lambda = default_lambda(&field, n);
        Self::new(field, layout, lambda, rho)
    }

    pub fn with_rho(&self, rho: FieldElement) -> Result<Self> {
        Self::new(self.field.clone(), self.layout, self.lambda.clone(), rho)
    }

    #[inline]
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn lambda(&self) -> &[FieldElement] {
        &self.lambda
    }

    #[inline]
    pub fn rho(&self) -> FieldElement {
        self.rho
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    pub fn k(&self) -> usize {
        self.layout.k
    }

    pub fn r(&self) -> usize {
        self.layout.r
    }

    pub fn s(&self) -> usize {
        self.layout.s
    }

    pub fn t(&self) -> usize {
        self.layout.t
    }

    pub fn ell(&self) -> usize {
        self.layout.ell
    }

    /// Numeric value of a term's coefficient.
    pub fn coefficient(&self, term: &Term) -> FieldElement {
        match term.coef {
            Coefficient::One => FieldElement::ONE,
            Coefficient::LambdaPow(p) => self.field.pow(self.lambda[term.block], p as u64),
            Coefficient::Rho => self.rho,
        }
    }
}

/// The rℓ × nℓ parity-check matrix of a code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    layout: Layout,
    matrix: FieldMatrix,
}

impl ParityCheckMatrix {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> FieldMatrix {
        self.matrix
    }

    /// Same matrix with its column-blocks reordered: block j of the result is
    /// block `order[j]` of `self`.
    pub fn permute_blocks(&self, order: &[usize]) -> ParityCheckMatrix {
        let ell = self.layout.ell;
        let cols: Vec<usize> = order.iter().flat_map(|&b| b * ell..(b + 1) * ell).collect();
        ParityCheckMatrix {
            layout: self.layout,
            matrix: self.matrix.select_columns(&cols),
        }
    }
}

/// Dense row of length nℓ from a list of terms; coinciding positions add.
fn row_from_terms(
    layout: &Layout,
    terms: impl Iterator<Item = Term>,
    mut eval: impl FnMut(&Term) -> FieldElement,
) -> Vec<FieldElement> {
    let mut row = vec![FieldElement::ZERO; layout.n * layout.ell];
    for term in terms {
        row[layout.column(term.block, term.symbol)] += eval(&term);
    }
    row
}

pub fn type1_row(params: &CodeParams, x: SymbolId) -> Vec<FieldElement> {
    row_from_terms(&params.layout, type1_terms(&params.layout, x), |_| FieldElement::ONE)
}

pub fn type2_row(params: &CodeParams, p: usize, x: SymbolId) -> Vec<FieldElement> {
    row_from_terms(&params.layout, type2_terms(&params.layout, p, x), |t| params.coefficient(t))
}

/// Builds P from raw ingredients. Unlike [`build_parity_matrix`] this accepts
/// repeated λ values and ρ = 0, which yields the unperturbed matrix H.
pub fn assemble_parity_matrix(
    field: &Field,
    layout: &Layout,
    lambda: &[FieldElement],
    rho: FieldElement,
) -> Result<ParityCheckMatrix> {
    if lambda.len() != layout.n {
        return Err(Error::InvalidParams(format!(
            "expected {} lambda values, got {}",
            layout.n,
            lambda.len()
        )));
    }
    let (r, ell, n) = (layout.r, layout.ell, layout.n);
    let mut matrix = FieldMatrix::zeros(r * ell, n * ell);
    // powers[p][i] = λ_i^p
    let powers: Vec<Vec<FieldElement>> = (0..r)
        .map(|p| lambda.iter().map(|&l| field.pow(l, p as u64)).collect())
        .collect();

    for x in layout.symbols() {
        for term in type1_terms(layout, x) {
            matrix[(x.0, layout.column(term.block, term.symbol))] += FieldElement::ONE;
        }
    }
    for p in 1..r {
        for x in layout.symbols() {
            let row = p * ell + x.0;
            for term in type2_terms(layout, p, x) {
                let c = match term.coef {
                    Coefficient::One => FieldElement::ONE,
                    Coefficient::LambdaPow(p) => powers[p][term.block],
                    Coefficient::Rho => rho,
                };
                matrix[(row, layout.column(term.block, term.symbol))] += c;
            }
        }
    }
    Ok(ParityCheckMatrix {
        layout: *layout,
        matrix,
    })
}

pub fn build_parity_matrix(params: &CodeParams) -> ParityCheckMatrix {
    assemble_parity_matrix(&params.field, &params.layout, &params.lambda, params.rho)
        .expect("validated parameters")
}

/// `(H, E)` with `H` the ρ = 0 matrix and `E = P − H` holding only the ρ
/// entries.
pub fn split_matrix(params: &CodeParams) -> (ParityCheckMatrix, ParityCheckMatrix) {
    let h = assemble_parity_matrix(&params.field, &params.layout, &params.lambda, FieldElement::ZERO)
        .expect("validated parameters");
    let p = build_parity_matrix(params);
    let e = p.matrix.add(&h.matrix).expect("same shape");
    (
        h,
        ParityCheckMatrix {
            layout: params.layout,
            matrix: e,
        },
    )
}

/// Direct builder for t = 1, following the single-coordinate form of the
/// constraints: symbols are x ∈ [r], and the ρ-term of constraint (p, x) sits
/// on symbol wrap(x + p, r) of every block in group x.
pub fn build_parity_matrix_t1(params: &CodeParams) -> Result<ParityCheckMatrix> {
    let layout = params.layout;
    if layout.t != 1 {
        return Err(Error::InvalidParams("the direct builder needs t = 1".into()));
    }
    let (n, r, s) = (layout.n, layout.r, layout.s);
    let field = &params.field;
    // here ℓ = r
    let mut matrix = FieldMatrix::zeros(r * r, n * r);
    let col = |u: usize, v: usize, x: usize| ((u - 1) * s + v - 1) * r + (x - 1);
    for x in 1..=r {
        for u in 1..=r {
            for v in 1..=s {
                matrix[(x - 1, col(u, v, x))] = FieldElement::ONE;
            }
        }
    }
    for p in 1..r {
        for x in 1..=r {
            let row = p * r + x - 1;
            for u in 1..=r {
                for v in 1..=s {
                    let i = (u - 1) * s + v;
                    matrix[(row, col(u, v, x))] += field.pow(params.lambda[i - 1], p as u64);
                }
            }
            for v in 1..=s {
                matrix[(row, col(x, v, wrap(x + p, r)))] += params.rho;
            }
        }
    }
    Ok(ParityCheckMatrix { layout, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, k: usize, t: usize) -> CodeParams {
        let f = Field::with_bits(16).unwrap();
        CodeParams::with_default_lambda(f, n, k, t, FieldElement(0x1234)).unwrap()
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap(3, 3), 3);
        assert_eq!(wrap(4, 3), 1);
        assert_eq!(wrap(1, 1), 1);
        assert_eq!(wrap(5, 2), 1);
        assert_eq!(wrap(6, 4), 2);
    }

    #[test]
    fn modify_vector_examples() {
        let l = Layout::new(9, 6, 2).unwrap();
        let x = l.symbol(&[1, 2]);
        assert_eq!(l.coords(l.modify_vector(x, 1, 1)), [2, 2]);
        assert_eq!(l.coords(l.modify_vector(x, 2, 1)), [1, 3]);
        // v = 3 wraps back to coordinate 1
        assert_eq!(l.coords(l.modify_vector(x, 3, 1)), [2, 2]);
        // r applications of p = 1 cycle back
        let mut y = x;
        for _ in 0..3 {
            y = l.modify_vector(y, 2, 1);
        }
        assert_eq!(y, x);
    }

    #[test]
    fn layout_rejects_bad_params() {
        assert!(Layout::new(7, 3, 1).is_err());
        assert!(Layout::new(6, 6, 1).is_err());
        assert!(Layout::new(6, 0, 1).is_err());
        assert!(Layout::new(6, 3, 0).is_err());
        assert!(Layout::new(6, 3, 3).is_err());
        assert!(Layout::new(6, 3, 2).is_ok());
    }

    #[test]
    fn block_ids_follow_group_layout() {
        let l = Layout::new(6, 3, 1).unwrap();
        assert_eq!(l.block(0).unwrap(), BlockId { u: 1, v: 1 });
        assert_eq!(l.block(3).unwrap(), BlockId { u: 2, v: 2 });
        assert_eq!(l.block(5).unwrap(), BlockId { u: 3, v: 2 });
        assert_eq!(l.block(6), Err(Error::InvalidBlock(6)));
        assert!(l.block_index(BlockId { u: 4, v: 1 }).is_err());
        for i in 0..6 {
            assert_eq!(l.block_index(l.block(i).unwrap()).unwrap(), i);
        }
    }

    #[test]
    fn params_validation() {
        let f = Field::with_bits(8).unwrap();
        let l = Layout::new(6, 3, 1).unwrap();
        let mut lambda = default_lambda(&f, 6);
        assert!(CodeParams::new(f.clone(), l, lambda.clone(), FieldElement::ZERO).is_err());
        lambda[1] = lambda[0];
        assert!(CodeParams::new(f.clone(), l, lambda.clone(), FieldElement::ONE).is_err());
        lambda[1] = FieldElement::ZERO;
        assert!(CodeParams::new(f.clone(), l, lambda, FieldElement::ONE).is_err());
        assert!(CodeParams::new(f.clone(), l, default_lambda(&f, 5), FieldElement::ONE).is_err());
        assert!(CodeParams::new(f.clone(), l, default_lambda(&f, 6), FieldElement(0x100)).is_err());
    }

    #[test]
    fn type1_row_examples() {
        let p = params(6, 3, 1);
        let row = type1_row(&p, SymbolId(0));
        let ones: Vec<_> = (0..row.len()).filter(|&c| !row[c].is_zero()).collect();
        assert_eq!(ones, [0, 3, 6, 9, 12, 15]);

        let p = params(9, 6, 2);
        let row = type1_row(&p, p.layout().symbol(&[1, 1]));
        let ones: Vec<_> = (0..row.len()).filter(|&c| !row[c].is_zero()).collect();
        assert_eq!(ones, (0..9).map(|i| 9 * i).collect::<Vec<_>>());
    }

    #[test]
    fn type2_row_examples() {
        let p = params(6, 3, 1);
        let f = p.field().clone();
        for (power, rho_cols) in [(1usize, [1usize, 4]), (2, [2, 5])] {
            let row = type2_row(&p, power, SymbolId(0));
            for i in 0..6 {
                assert_eq!(row[3 * i], f.pow(p.lambda()[i], power as u64));
            }
            for c in rho_cols {
                assert_eq!(row[c], p.rho());
            }
            assert_eq!(row.iter().filter(|v| !v.is_zero()).count(), 6 + 2);
        }
    }

    #[test]
    fn general_builder_matches_direct_t1_builder() {
        for (n, k) in [(6, 3), (4, 2), (8, 4), (12, 9)] {
            let p = params(n, k, 1);
            assert_eq!(build_parity_matrix(&p), build_parity_matrix_t1(&p).unwrap());
        }
    }

    #[test]
    fn split_identity() {
        let p = params(9, 6, 2);
        let (h, e) = split_matrix(&p);
        assert_eq!(h.matrix().add(e.matrix()).unwrap(), *build_parity_matrix(&p).matrix());
        let l = p.layout();
        assert_eq!(e.matrix().count_nonzero(), (l.r() - 1) * l.ell() * l.s());
        assert!(e.matrix().data().iter().all(|&v| v.is_zero() || v == p.rho()));
        for r in 0..l.ell() {
            assert!(e.matrix().row(r).iter().all(|v| v.is_zero()));
        }
    }
}
