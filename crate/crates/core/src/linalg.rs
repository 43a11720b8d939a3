//! Dense row-major matrices over a [`Field`].
//!
//! Elimination always takes the first nonzero entry at or below the current
//! row as pivot, so every routine here is deterministic.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for (c, v) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{:x}", v)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = FieldElement::ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch("data length must equal rows * cols"));
        }
        Ok(FieldMatrix { rows, cols, data })
    }

    /// Column vector.
    pub fn column(data: Vec<FieldElement>) -> Self {
        FieldMatrix {
            rows: data.len(),
            cols: 1,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn into_data(self) -> Vec<FieldElement> {
        self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [FieldElement] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    /// New matrix made of the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            let src = self.row(r);
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = src[c];
            }
        }
        out
    }

    /// Entrywise sum.
    pub fn add(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("operands must have equal shape"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect();
        Ok(FieldMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * self.cols);
        head[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut tail[..self.cols]);
    }

    /// `row[dst] += c * row[src]`
    fn add_scaled_row(&mut self, field: &Field, dst: usize, src: usize, c: FieldElement) {
        debug_assert_ne!(dst, src);
        let cols = self.cols;
        let (d, s) = if dst < src {
            let (head, tail) = self.data.split_at_mut(src * cols);
            (&mut head[dst * cols..(dst + 1) * cols], &tail[..cols])
        } else {
            let (head, tail) = self.data.split_at_mut(dst * cols);
            (&mut tail[..cols], &head[src * cols..(src + 1) * cols])
        };
        field.mul_acc(d, s, c);
    }

    /// Gauss-Jordan elimination restricted to the first `pivot_cols` columns.
    /// Returns the pivot column of each of the leading rank rows; those rows
    /// are normalized and their pivot columns cleared everywhere else.
    fn reduce(&mut self, field: &Field, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..pivot_cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = field
                .inv(self[(row, col)])
                .expect("pivot is nonzero by construction");
            field.scale(self.row_mut(row), inv);
            for r in 0..self.rows {
                if r != row {
                    let c = self[(r, col)];
                    if !c.is_zero() {
                        self.add_scaled_row(field, r, row, c);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Augmented matrix `[self | rhs]`.
    fn augment(&self, rhs: &FieldMatrix) -> FieldMatrix {
        let cols = self.cols + rhs.cols;
        let mut aug = Self::zeros(self.rows, cols);
        for r in 0..self.rows {
            let dst = aug.row_mut(r);
            dst[..self.cols].copy_from_slice(self.row(r));
            dst[self.cols..].copy_from_slice(rhs.row(r));
        }
        aug
    }
}

impl core::ops::Index<(usize, usize)> for FieldMatrix {
    type Output = FieldElement;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &FieldElement {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for FieldMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut FieldElement {
        &mut self.data[r * self.cols + c]
    }
}

/// Rank by Gaussian elimination.
pub fn mat_rank(field: &Field, m: &FieldMatrix) -> usize {
    let mut work = m.clone();
    work.reduce(field, m.cols).len()
}

/// Matrix product `a · b`.
pub fn mat_mul(field: &Field, a: &FieldMatrix, b: &FieldMatrix) -> Result<FieldMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch("left columns must equal right rows"));
    }
    let mut out = FieldMatrix::zeros(a.rows, b.cols);
    for r in 0..a.rows {
        let dst = &mut out.data[r * b.cols..(r + 1) * b.cols];
        for (k, &c) in a.row(r).iter().enumerate() {
            field.mul_acc(dst, b.row(k), c);
        }
    }
    Ok(out)
}

/// Solves `a · x = b` for square, invertible `a`.
pub fn mat_solve(field: &Field, a: &FieldMatrix, b: &FieldMatrix) -> Result<FieldMatrix> {
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch("coefficient matrix must be square"));
    }
    if b.rows != a.rows {
        return Err(Error::DimensionMismatch("right-hand side rows must equal matrix rows"));
    }
    let mut aug = a.augment(b);
    if aug.reduce(field, a.cols).len() < a.rows {
        return Err(Error::SingularMatrix);
    }
    Ok(aug.select_columns(&(a.cols..aug.cols).collect::<Vec<_>>()))
}

pub fn mat_inverse(field: &Field, a: &FieldMatrix) -> Result<FieldMatrix> {
    mat_solve(field, a, &FieldMatrix::identity(a.rows))
}

/// Solves a possibly overdetermined system `a · x = b` where `a` must have
/// full column rank. Rows beyond the pivots are checked for consistency.
pub fn solve_full_column_rank(
    field: &Field,
    a: &FieldMatrix,
    b: &FieldMatrix,
) -> Result<FieldMatrix> {
    if b.rows != a.rows {
        return Err(Error::DimensionMismatch("right-hand side rows must equal matrix rows"));
    }
    let mut aug = a.augment(b);
    let pivots = aug.reduce(field, a.cols);
    if pivots.len() < a.cols {
        return Err(Error::SingularMatrix);
    }
    for r in pivots.len()..aug.rows {
        if aug.row(r)[a.cols..].iter().any(|v| !v.is_zero()) {
            return Err(Error::InconsistentInput);
        }
    }
    // pivots are 0..cols in order, so the leading rows hold x
    let mut x = FieldMatrix::zeros(a.cols, b.cols);
    for r in 0..a.cols {
        x.row_mut(r).copy_from_slice(&aug.row(r)[a.cols..]);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf() -> Field {
        Field::with_bits(8).unwrap()
    }

    fn fe(v: u32) -> FieldElement {
        FieldElement(v)
    }

    #[test]
    fn rank_trivial() {
        let f = gf();
        assert_eq!(mat_rank(&f, &FieldMatrix::identity(7)), 7);
        assert_eq!(mat_rank(&f, &FieldMatrix::zeros(4, 6)), 0);
        assert_eq!(mat_rank(&f, &FieldMatrix::zeros(0, 0)), 0);
    }

    #[test]
    fn vandermonde_3x3_rank_via_determinant() {
        let f = gf();
        let l = [fe(2), fe(3), fe(9)];
        let mut v = FieldMatrix::zeros(3, 3);
        for (j, &x) in l.iter().enumerate() {
            for i in 0..3 {
                v[(i, j)] = f.pow(x, i as u64);
            }
        }
        // cofactor expansion
        let m = |r, c| v[(r, c)];
        let det = f.mul(m(0, 0), f.mul(m(1, 1), m(2, 2)) + f.mul(m(1, 2), m(2, 1)))
            + f.mul(m(0, 1), f.mul(m(1, 0), m(2, 2)) + f.mul(m(1, 2), m(2, 0)))
            + f.mul(m(0, 2), f.mul(m(1, 0), m(2, 1)) + f.mul(m(1, 1), m(2, 0)));
        assert!(!det.is_zero());
        assert_eq!(mat_rank(&f, &v), 3);

        // repeating a node drops the determinant and the rank
        for i in 0..3 {
            v[(i, 2)] = v[(i, 1)];
        }
        assert_eq!(mat_rank(&f, &v), 2);
    }

    #[test]
    fn mul_identity_and_scalar_expansion() {
        let f = gf();
        let a = FieldMatrix::from_vec(2, 2, vec![fe(3), fe(7), fe(0x53), fe(1)]).unwrap();
        let b = FieldMatrix::from_vec(2, 2, vec![fe(0xca), fe(2), fe(5), fe(0x80)]).unwrap();
        assert_eq!(mat_mul(&f, &FieldMatrix::identity(2), &b).unwrap(), b);
        assert_eq!(mat_mul(&f, &a, &FieldMatrix::identity(2)).unwrap(), a);
        let p = mat_mul(&f, &a, &b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = f.mul(a[(i, 0)], b[(0, j)]) + f.mul(a[(i, 1)], b[(1, j)]);
                assert_eq!(p[(i, j)], want);
            }
        }
        assert_eq!(
            mat_mul(&f, &a, &FieldMatrix::zeros(3, 1)),
            Err(Error::DimensionMismatch("left columns must equal right rows"))
        );
    }

    #[test]
    fn solve_trivial_cases() {
        let f = gf();
        let b = FieldMatrix::column(vec![fe(1), fe(2), fe(3)]);
        assert_eq!(mat_solve(&f, &FieldMatrix::identity(3), &b).unwrap(), b);
        let a = FieldMatrix::from_vec(2, 2, vec![fe(1), fe(1), fe(0), fe(1)]).unwrap();
        let zero = FieldMatrix::zeros(2, 1);
        assert_eq!(mat_solve(&f, &a, &zero).unwrap(), zero);
        let singular = FieldMatrix::from_vec(2, 2, vec![fe(1), fe(2), fe(1), fe(2)]).unwrap();
        assert_eq!(mat_solve(&f, &singular, &zero), Err(Error::SingularMatrix));
    }

    #[test]
    fn overdetermined_solve_checks_consistency() {
        let f = gf();
        // x0 = 5, x1 = 6, x0 + x1 = 3
        let a = FieldMatrix::from_vec(3, 2, vec![fe(1), fe(0), fe(0), fe(1), fe(1), fe(1)]).unwrap();
        let good = FieldMatrix::column(vec![fe(5), fe(6), fe(3)]);
        let x = solve_full_column_rank(&f, &a, &good).unwrap();
        assert_eq!(x.data(), &[fe(5), fe(6)]);
        let bad = FieldMatrix::column(vec![fe(5), fe(6), fe(4)]);
        assert_eq!(solve_full_column_rank(&f, &a, &bad), Err(Error::InconsistentInput));
    }
}
