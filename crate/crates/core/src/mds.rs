//! MDS verification of a parity-check matrix and seeded sampling of ρ.
//!
//! A code is MDS iff every rℓ × rℓ block-submatrix `P_S` with |S| = r has full
//! rank. For a uniformly random nonzero ρ the probability that some `P_S` is
//! singular is at most C(n, r)·rℓ / (q − 1) (each det(P_S) is a nonzero
//! polynomial in ρ of degree ≤ rℓ), so a handful of draws suffices once the
//! field is comfortably larger than C(n, r)·rℓ.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::construction::{
    build_parity_matrix, check_lambda, default_lambda, CodeParams, Layout, ParityCheckMatrix,
};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::{mat_rank, FieldMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MdsReport {
    pub is_mds: bool,
    /// 0-based block indices of the first rank-deficient submatrix.
    pub failing_subset: Option<Vec<usize>>,
    pub subsets_checked: usize,
}

/// Column-blocks of `p` selected by `blocks` (0-based), in the given order.
pub fn submatrix(p: &ParityCheckMatrix, blocks: &[usize]) -> FieldMatrix {
    let ell = p.layout().ell();
    let cols: Vec<usize> = blocks.iter().flat_map(|&b| b * ell..(b + 1) * ell).collect();
    p.matrix().select_columns(&cols)
}

/// Lexicographic k-subsets of `0..n`.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        // rightmost position that can still move
        if let Some(i) = (0..k).rev().find(|&i| next[i] < self.n - k + i) {
            next[i] += 1;
            for j in i + 1..k {
                next[j] = next[j - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Checks all C(n, r) block-submatrices, stopping at the first failure.
pub fn verify_mds(field: &Field, p: &ParityCheckMatrix) -> MdsReport {
    let layout = p.layout();
    let full = layout.r() * layout.ell();
    let mut checked = 0;
    for subset in Combinations::new(layout.n(), layout.r()) {
        checked += 1;
        if mat_rank(field, &submatrix(p, &subset)) < full {
            return MdsReport {
                is_mds: false,
                failing_subset: Some(subset),
                subsets_checked: checked,
            };
        }
    }
    MdsReport {
        is_mds: true,
        failing_subset: None,
        subsets_checked: checked,
    }
}

/// Schwartz-Zippel bound C(n, r)·rℓ / (q − 1) on the chance that one uniformly
/// drawn ρ gives a non-MDS code.
pub fn failure_bound(layout: &Layout, field: &Field) -> f64 {
    let degree = binomial(layout.n(), layout.r()) * (layout.r() * layout.ell()) as u128;
    degree as f64 / (field.order() - 1) as f64
}

/// Warning threshold for [`failure_bound`].
pub const FAILURE_BOUND_WARN: f64 = 0.5;

/// Everything needed for a code except possibly ρ.
#[derive(Clone, Debug)]
pub struct CodeTemplate {
    pub field: Field,
    pub layout: Layout,
    pub lambda: Vec<FieldElement>,
    /// Tried first, before any sampling.
    pub rho: Option<FieldElement>,
}

impl CodeTemplate {
    pub fn new(field: Field, n: usize, k: usize, t: usize) -> Result<Self> {
        let layout = Layout::new(n, k, t)?;
        let lambda = default_lambda(&field, n);
        check_lambda(&field, &layout, &lambda)?;
        Ok(CodeTemplate {
            field,
            layout,
            lambda,
            rho: None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SampledCode {
    pub params: CodeParams,
    /// Number of random draws; 0 when the template's ρ was accepted.
    pub attempts: usize,
    pub report: MdsReport,
}

/// Uniform nonzero field element.
pub fn draw_nonzero(rng: &mut ChaCha8Rng, field: &Field) -> FieldElement {
    let mask = (field.order() - 1) as u32;
    loop {
        let v = rng.next_u32() & mask;
        if v != 0 {
            return FieldElement(v);
        }
    }
}

/// Finds a ρ for which the code is MDS: first the template's own ρ, if any,
/// then up to `max_retries` draws from a generator seeded with `seed`.
pub fn sample_code(template: &CodeTemplate, seed: u64, max_retries: usize) -> Result<SampledCode> {
    let base = |rho| CodeParams::new(template.field.clone(), template.layout, template.lambda.clone(), rho);

    if let Some(rho) = template.rho {
        let params = base(rho)?;
        let report = verify_mds(&template.field, &build_parity_matrix(&params));
        if report.is_mds {
            return Ok(SampledCode {
                params,
                attempts: 0,
                report,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_retries {
        let params = base(draw_nonzero(&mut rng, &template.field))?;
        let report = verify_mds(&template.field, &build_parity_matrix(&params));
        if report.is_mds {
            return Ok(SampledCode {
                params,
                attempts: attempt,
                report,
            });
        }
    }
    Err(Error::RetriesExhausted { attempts: max_retries })
}
