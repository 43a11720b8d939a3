//! Arithmetic in binary extension fields GF(2^w), w ∈ {8, 16, 32}.
//!
//! Addition is XOR. For w ≤ 16 multiplication goes through log/antilog
//! tables built once per [`Field`]; for w = 32 it is shift-and-reduce.
//! A `Field` is cheap to clone (tables are shared) and immutable.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Sub, SubAssign};

use crate::error::{Error, Result};

/// Default reduction polynomial for GF(2^8): x^8 + x^4 + x^3 + x + 1.
pub const POLY_GF8: u64 = 0x11B;
/// Default reduction polynomial for GF(2^16): x^16 + x^5 + x^3 + x^2 + 1.
pub const POLY_GF16: u64 = 0x1002D;
/// Default reduction polynomial for GF(2^32): x^32 + x^22 + x^2 + x + 1.
pub const POLY_GF32: u64 = 0x1_0040_0007;

/// Degree-32 polynomials accepted without an irreducibility check.
pub const GF32_WHITELIST: &[u64] = &[POLY_GF32, 0x1_0000_008D];

/// One symbol of a [`Field`]. The value is only meaningful together with the
/// field it was produced by.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::LowerHex for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;

    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for FieldElement {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;

    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self + rhs
    }
}

impl SubAssign for FieldElement {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn sub_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

struct Tables {
    log: Vec<u32>,
    // doubled so log(a) + log(b) never needs a reduction
    exp: Vec<u32>,
}

struct Inner {
    bits: u32,
    poly: u64,
    generator: FieldElement,
    tables: Option<Tables>,
}

/// The base field GF(2^w) with a fixed reduction polynomial.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("bits", &self.inner.bits)
            .field("poly", &format_args!("{:#x}", self.inner.poly))
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.inner.bits == other.inner.bits && self.inner.poly == other.inner.poly
    }
}

impl Eq for Field {}

impl Field {
    /// Field with the default polynomial for `bits`.
    pub fn with_bits(bits: u32) -> Result<Field> {
        let poly = match bits {
            8 => POLY_GF8,
            16 => POLY_GF16,
            32 => POLY_GF32,
            _ => return Err(Error::InvalidField("extension degree must be 8, 16 or 32")),
        };
        Field::new(bits, poly)
    }

    /// Builds GF(2^bits) modulo `poly`. The x^bits term may be given or left
    /// implicit.
    pub fn new(bits: u32, poly: u64) -> Result<Field> {
        if !matches!(bits, 8 | 16 | 32) {
            return Err(Error::InvalidField("extension degree must be 8, 16 or 32"));
        }
        let top = 1u64 << bits;
        let poly = match poly >> bits {
            0 => poly | top,
            1 => poly,
            _ => return Err(Error::InvalidField("polynomial degree exceeds the extension degree")),
        };
        let irreducible = if bits == 32 {
            GF32_WHITELIST.contains(&poly)
        } else {
            is_irreducible_trial(poly, bits)
        };
        if !irreducible {
            return Err(Error::InvalidField("reduction polynomial is not irreducible"));
        }

        let generator = find_generator(bits, poly);
        let tables = (bits <= 16).then(|| build_tables(bits, poly, generator));
        Ok(Field {
            inner: Arc::new(Inner {
                bits,
                poly,
                generator,
                tables,
            }),
        })
    }

    /// Extension degree w.
    #[inline]
    pub fn bits(&self) -> u32 {
        self.inner.bits
    }

    /// Reduction polynomial including the x^w term.
    #[inline]
    pub fn poly(&self) -> u64 {
        self.inner.poly
    }

    /// Field order q = 2^w.
    #[inline]
    pub fn order(&self) -> u64 {
        1u64 << self.inner.bits
    }

    /// Serialized size of one symbol.
    #[inline]
    pub fn symbol_bytes(&self) -> usize {
        self.inner.bits as usize / 8
    }

    /// Smallest primitive element (as an integer) of the multiplicative group.
    #[inline]
    pub fn generator(&self) -> FieldElement {
        self.inner.generator
    }

    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value >= self.order() {
            return Err(Error::InvalidField("symbol value out of range"));
        }
        Ok(FieldElement(value as u32))
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        u64::from(a.0) < self.order()
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        match &self.inner.tables {
            Some(t) => {
                let l = t.log[a.0 as usize] + t.log[b.0 as usize];
                FieldElement(t.exp[l as usize])
            }
            None => FieldElement(
                shift_reduce_mul(u64::from(a.0), u64::from(b.0), self.inner.bits, self.inner.poly)
                    as u32,
            ),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        match &self.inner.tables {
            Some(t) => {
                let group = (self.order() - 1) as u32;
                let l = t.log[a.0 as usize];
                Ok(FieldElement(t.exp[((group - l) % group) as usize]))
            }
            // a^(q-2)
            None => Ok(self.pow(a, self.order() - 2)),
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e by square-and-multiply; a^0 = 1 for every a, including 0.
    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `dst[i] += c * src[i]` over the whole slice.
    pub fn mul_acc(&self, dst: &mut [FieldElement], src: &[FieldElement], c: FieldElement) {
        debug_assert_eq!(dst.len(), src.len());
        if c.is_zero() {
            return;
        }
        if c == FieldElement::ONE {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += *s;
            }
            return;
        }
        match &self.inner.tables {
            Some(t) => {
                let lc = t.log[c.0 as usize];
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        d.0 ^= t.exp[(t.log[s.0 as usize] + lc) as usize];
                    }
                }
            }
            None => {
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += self.mul(*s, c);
                }
            }
        }
    }

    /// `v[i] *= c` over the whole slice.
    pub fn scale(&self, v: &mut [FieldElement], c: FieldElement) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}

/// Multiply by shifting `a` and folding the overflow back in with `poly`.
fn shift_reduce_mul(mut a: u64, mut b: u64, bits: u32, poly: u64) -> u64 {
    let top = 1u64 << bits;
    let mut acc = 0u64;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
    }
    acc
}

fn degree(p: u64) -> u32 {
    63 - p.leading_zeros()
}

fn poly_mod(mut a: u64, m: u64) -> u64 {
    let dm = degree(m);
    while a != 0 && degree(a) >= dm {
        a ^= m << (degree(a) - dm);
    }
    a
}

/// Trial division by every polynomial of degree 1..=bits/2.
fn is_irreducible_trial(poly: u64, bits: u32) -> bool {
    if poly & 1 == 0 {
        return false;
    }
    for d in 2u64..(1u64 << (bits / 2 + 1)) {
        if poly_mod(poly, d) == 0 {
            return false;
        }
    }
    true
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

fn slow_pow(a: u64, mut e: u64, bits: u32, poly: u64) -> u64 {
    let mut base = a;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = shift_reduce_mul(acc, base, bits, poly);
        }
        base = shift_reduce_mul(base, base, bits, poly);
        e >>= 1;
    }
    acc
}

fn find_generator(bits: u32, poly: u64) -> FieldElement {
    let group = (1u64 << bits) - 1;
    let factors = prime_factors(group);
    (2u64..)
        .find(|&g| factors.iter().all(|&p| slow_pow(g, group / p, bits, poly) != 1))
        .map(|g| FieldElement(g as u32))
        .expect("multiplicative group of a finite field is cyclic")
}

fn build_tables(bits: u32, poly: u64, generator: FieldElement) -> Tables {
    let q = 1usize << bits;
    let group = q - 1;
    let mut log = vec![0u32; q];
    let mut exp = vec![0u32; 2 * group];
    let mut x = 1u64;
    for i in 0..group {
        exp[i] = x as u32;
        exp[i + group] = x as u32;
        log[x as usize] = i as u32;
        x = shift_reduce_mul(x, u64::from(generator.0), bits, poly);
    }
    Tables { log, exp }
}
