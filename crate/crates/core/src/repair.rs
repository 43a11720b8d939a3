//! Two-stage repair-by-transfer of a single failed block from all n − 1
//! survivors, with distinct-symbol bandwidth accounting.
//!
//! Let the failed block be (u*, v*) and a = wrap(v*, t).
//!
//! * Stage 1 downloads, from every helper, the r^(t−1) symbols whose
//!   coordinate a equals u*, and recovers the same positions of the failed
//!   block from the Type I constraints.
//! * Stage 2 recovers each remaining symbol y (y_a = û ≠ u*) from the Type II
//!   constraint (p, x) with x = y|_{x_a = u*} and wrap(u* + p, r) = û. Its
//!   part (a) is known after stage 1. Of its ρ-terms, the one on the failed
//!   block is y itself, those on blocks (u*, v) with wrap(v, t) = a need a
//!   fresh download, and all others have coordinate a equal to u* and were
//!   fetched in stage 1.
//!
//! Helpers only ever ship stored symbols; all arithmetic happens at the
//! repairing node.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;

use crate::codec::{Block, PartialCodeword};
use crate::construction::{type1_terms, type2_terms, wrap, BlockId, CodeParams, Layout, SymbolId};
use crate::error::{Error, Result};
use crate::field::FieldElement;

/// One stored symbol, named by position only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolRequest {
    pub block: usize,
    pub symbol: SymbolId,
}

/// Recovery of one stage-2 symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage2Step {
    pub p: usize,
    /// Symbol of the failed block recovered by this step.
    pub target: SymbolId,
    /// New downloads needed by this step.
    pub fetch: Vec<SymbolRequest>,
    /// ρ-terms already available from stage 1.
    pub known: Vec<SymbolRequest>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairPlan {
    pub layout: Layout,
    pub failed: BlockId,
    pub failed_index: usize,
    /// Coordinate a = wrap(v*, t) that stage 1 pins to u*.
    pub anchor: usize,
    /// Per helper (ascending block index), the symbols read in stage 1.
    pub stage1: Vec<(usize, Vec<SymbolId>)>,
    pub stage2: Vec<Stage2Step>,
}

impl RepairPlan {
    pub fn stage1_count(&self) -> usize {
        self.stage1.iter().map(|(_, s)| s.len()).sum()
    }

    pub fn stage2_count(&self) -> usize {
        self.stage2.iter().map(|s| s.fetch.len()).sum()
    }

    pub fn downloaded(&self) -> usize {
        self.stage1_count() + self.stage2_count()
    }

    /// Every symbol transferred, stage 1 first.
    pub fn requests(&self) -> Vec<SymbolRequest> {
        let stage1 = self
            .stage1
            .iter()
            .flat_map(|(block, syms)| syms.iter().map(move |&symbol| SymbolRequest { block: *block, symbol }));
        let stage2 = self.stage2.iter().flat_map(|s| s.fetch.iter().copied());
        stage1.chain(stage2).collect()
    }

    /// Symbols served by each block (the failed one serves none).
    pub fn per_helper(&self) -> Vec<usize> {
        let mut counts = vec![0; self.layout.n()];
        for req in self.requests() {
            counts[req.block] += 1;
        }
        counts
    }

    pub fn report(&self) -> RepairReport {
        let l = &self.layout;
        let cutset = cutset_bound(l.n(), l.k(), l.n() - 1, l.ell());
        let downloaded = self.downloaded();
        let ratio = Ratio::from_integer(downloaded as u64) / cutset;
        RepairReport {
            downloaded_symbols: downloaded,
            stage1_count: self.stage1_count(),
            stage2_count: self.stage2_count(),
            cutset,
            ratio,
            bound_ok: ratio <= ratio_bound(l.t()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairReport {
    pub downloaded_symbols: usize,
    pub stage1_count: usize,
    pub stage2_count: usize,
    pub cutset: Ratio<u64>,
    /// downloaded / cutset.
    pub ratio: Ratio<u64>,
    /// ratio ≤ 1 + 1/t.
    pub bound_ok: bool,
}

/// Ratio as a float, for display.
pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for RepairReport {
    /// Flat `key=value` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "downloaded={}", self.downloaded_symbols)?;
        writeln!(f, "stage1={}", self.stage1_count)?;
        writeln!(f, "stage2={}", self.stage2_count)?;
        writeln!(f, "cutset={}", self.cutset)?;
        writeln!(f, "ratio={}", ratio_to_f64(self.ratio))?;
        writeln!(f, "bound_ok={}", self.bound_ok)
    }
}

/// d·ℓ / (d − k + 1), the minimum download for repairing one block from d
/// helpers.
///
/// # Panics
/// If `d < k`.
pub fn cutset_bound(n: usize, k: usize, d: usize, ell: usize) -> Ratio<u64> {
    assert!(k <= d && d < n, "need k <= d <= n - 1");
    Ratio::new((d * ell) as u64, (d - k + 1) as u64)
}

/// 1 + 1/t.
pub fn ratio_bound(t: usize) -> Ratio<u64> {
    Ratio::new(t as u64 + 1, t as u64)
}

pub fn plan_repair(layout: &Layout, failed: BlockId) -> Result<RepairPlan> {
    let failed_index = layout.block_index(failed)?;
    let (r, t) = (layout.r(), layout.t());
    let u_star = failed.u;
    let anchor = wrap(failed.v, t);

    let pinned: Vec<SymbolId> = layout.symbols().filter(|&x| layout.coord(x, anchor) == u_star).collect();
    let stage1: Vec<(usize, Vec<SymbolId>)> = (0..layout.n())
        .filter(|&b| b != failed_index)
        .map(|b| (b, pinned.clone()))
        .collect();

    let mut fetched = BTreeSet::new();
    let mut stage2 = Vec::new();
    for &x in &pinned {
        for p in 1..r {
            let target = layout.with_coord(x, anchor, wrap(u_star + p, r));
            let mut step = Stage2Step {
                p,
                target,
                fetch: Vec::new(),
                known: Vec::new(),
            };
            // part (a) sits entirely on x, which stage 1 covers
            for term in type2_terms(layout, p, x).skip(layout.n()) {
                let req = SymbolRequest {
                    block: term.block,
                    symbol: term.symbol,
                };
                if term.block == failed_index {
                    debug_assert_eq!(term.symbol, target);
                } else if layout.coord(term.symbol, anchor) == u_star {
                    step.known.push(req);
                } else if fetched.insert(req) {
                    step.fetch.push(req);
                }
            }
            stage2.push(step);
        }
    }

    Ok(RepairPlan {
        layout: *layout,
        failed,
        failed_index,
        anchor,
        stage1,
        stage2,
    })
}

/// Rebuilds the failed block. Only symbols named by `plan` are read from
/// `survivors`.
pub fn execute_repair(params: &CodeParams, survivors: &PartialCodeword, plan: &RepairPlan) -> Result<Block> {
    let layout = params.layout();
    if plan.layout != *layout {
        return Err(Error::InvalidParams("repair plan was made for a different code".into()));
    }
    let (n, ell) = (layout.n(), layout.ell());
    let field = params.field();
    let failed = plan.failed_index;

    let mut downloaded: Vec<Option<FieldElement>> = vec![None; n * ell];
    for req in plan.requests() {
        let value = survivors
            .block(req.block)
            .filter(|_| req.block != failed)
            .and_then(|b| b.get(req.symbol.0).copied())
            .ok_or(Error::PlanMismatch {
                block: req.block,
                symbol: req.symbol.0,
            })?;
        downloaded[layout.column(req.block, req.symbol)] = Some(value);
    }
    let mut repaired: Vec<Option<FieldElement>> = vec![None; ell];

    let fetch = |repaired: &[Option<FieldElement>], block: usize, symbol: SymbolId| {
        let slot = if block == failed {
            repaired[symbol.0]
        } else {
            downloaded[layout.column(block, symbol)]
        };
        slot.ok_or(Error::PlanMismatch {
            block,
            symbol: symbol.0,
        })
    };

    // stage 1: the failed symbol is the sum of the others
    if plan.stage1.is_empty() {
        return Err(Error::InvalidParams("repair needs at least one helper".into()));
    }
    for x in layout.symbols().filter(|&x| layout.coord(x, plan.anchor) == plan.failed.u) {
        let mut acc = FieldElement::ZERO;
        for term in type1_terms(layout, x).filter(|t| t.block != failed) {
            acc += fetch(&repaired, term.block, term.symbol)?;
        }
        repaired[x.0] = Some(acc);
    }

    // stage 2: solve each Type II constraint for its single unknown
    for step in &plan.stage2 {
        let x = layout.with_coord(step.target, plan.anchor, plan.failed.u);
        let mut acc = FieldElement::ZERO;
        let mut target_coef = FieldElement::ZERO;
        for term in type2_terms(layout, step.p, x) {
            let c = params.coefficient(&term);
            if term.block == failed && term.symbol == step.target {
                target_coef += c;
            } else {
                acc += field.mul(c, fetch(&repaired, term.block, term.symbol)?);
            }
        }
        repaired[step.target.0] = Some(field.div(acc, target_coef).map_err(|_| Error::SingularMatrix)?);
    }

    repaired
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or(Error::PlanMismatch { block: failed, symbol: i }))
        .collect()
}

/// Context numbers for one measured repair.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub ell: usize,
    pub cutset: Ratio<u64>,
    pub measured: usize,
    /// The multiplicative gap to the cut-set bound.
    pub ratio: Ratio<u64>,
    pub ratio_bound: Ratio<u64>,
    /// Smallest ℓ compatible with the measured ratio when every helper
    /// contributes: ℓ ≥ (n − k) / ratio.
    pub implied_min_ell: f64,
    pub implied_min_ell_ok: bool,
    /// k ≤ 2·log₂ℓ·(⌊log_{r/(r−1)} ℓ⌋ + 1); `None` when r = 1.
    pub gtc_bound_ok: Option<bool>,
    /// (n − k)^(k/(n − k)), the repair-by-transfer sub-packetization needed for
    /// optimal bandwidth.
    pub twb_min_ell: f64,
    pub twb_bound_ok: bool,
}

const EPS: f64 = 1e-9;

pub fn bounds_report(n: usize, k: usize, t: usize, measured: &RepairReport) -> BoundsReport {
    let r = n - k;
    let ell = r.pow(t as u32);
    let cutset = cutset_bound(n, k, n - 1, ell);
    let ratio = Ratio::from_integer(measured.downloaded_symbols as u64) / cutset;
    let implied_min_ell = r as f64 / ratio_to_f64(ratio);
    let ell_f = ell as f64;

    let gtc_bound_ok = (r >= 2).then(|| {
        let steps = libm::floor(libm::log(ell_f) / libm::log(r as f64 / (r - 1) as f64) + EPS);
        k as f64 <= 2.0 * libm::log2(ell_f) * (steps + 1.0) + EPS
    });
    let twb_min_ell = libm::pow(r as f64, k as f64 / r as f64);

    BoundsReport {
        n,
        k,
        t,
        ell,
        cutset,
        measured: measured.downloaded_symbols,
        ratio,
        ratio_bound: ratio_bound(t),
        implied_min_ell,
        implied_min_ell_ok: ell_f + EPS >= implied_min_ell,
        gtc_bound_ok,
        twb_min_ell,
        twb_bound_ok: ell_f + EPS * twb_min_ell >= twb_min_ell,
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "k={}", self.k)?;
        writeln!(f, "t={}", self.t)?;
        writeln!(f, "ell={}", self.ell)?;
        writeln!(f, "cutset={}", self.cutset)?;
        writeln!(f, "measured={}", self.measured)?;
        writeln!(f, "ratio={}", ratio_to_f64(self.ratio))?;
        writeln!(f, "ratio_bound={}", self.ratio_bound)?;
        writeln!(f, "implied_min_ell={:.4}", self.implied_min_ell)?;
        writeln!(f, "implied_min_ell_ok={}", self.implied_min_ell_ok)?;
        match self.gtc_bound_ok {
            Some(ok) => writeln!(f, "gtc_bound_ok={ok}")?,
            None => writeln!(f, "gtc_bound_ok=n/a")?,
        }
        writeln!(f, "twb_min_ell={:.4}", self.twb_min_ell)?;
        writeln!(f, "twb_bound_ok={}", self.twb_bound_ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(n: usize, k: usize, t: usize, index: usize) -> RepairPlan {
        let l = Layout::new(n, k, t).unwrap();
        plan_repair(&l, l.block(index).unwrap()).unwrap()
    }

    #[test]
    fn cutset_examples() {
        assert_eq!(cutset_bound(6, 3, 5, 3), Ratio::from_integer(5));
        assert_eq!(cutset_bound(7, 1, 4, 9), Ratio::from_integer(9));
        assert_eq!(cutset_bound(9, 6, 8, 9), Ratio::from_integer(24));
        assert_eq!(cutset_bound(12, 9, 11, 9), Ratio::new(33, 1));
        assert_eq!(cutset_bound(8, 6, 7, 4), Ratio::new(28, 2));
    }

    #[test]
    fn t1_plan_counts() {
        let p = plan(6, 3, 1, 0);
        assert_eq!(p.failed, BlockId { u: 1, v: 1 });
        assert_eq!(p.stage1_count(), 5);
        assert!(p.stage1.iter().all(|(_, s)| s == &[SymbolId(0)]));
        assert_eq!(p.stage2_count(), 2);
        // the group partner (1, 2) ships symbols 2 and 3
        let fetched: Vec<_> = p.stage2.iter().flat_map(|s| s.fetch.clone()).collect();
        assert_eq!(
            fetched,
            [
                SymbolRequest { block: 1, symbol: SymbolId(1) },
                SymbolRequest { block: 1, symbol: SymbolId(2) }
            ]
        );
    }

    #[test]
    fn t2_plan_counts() {
        for i in 0..9 {
            let p = plan(9, 6, 2, i);
            assert_eq!(p.stage1_count(), 24);
            assert!(p.stage2_count() <= 6);
            // v* = 2 has no partner sharing its anchor coordinate
            let expected = if p.failed.v == 2 { 0 } else { 6 };
            assert_eq!(p.stage2_count(), expected, "block {i}");
        }
        for i in 0..6 {
            assert_eq!(plan(6, 3, 2, i).stage2_count(), 0);
            assert_eq!(plan(6, 3, 2, i).downloaded(), 15);
        }
    }

    #[test]
    fn requests_are_distinct_and_skip_failed_block() {
        let p = plan(12, 8, 3, 5);
        let reqs = p.requests();
        let set: BTreeSet<_> = reqs.iter().copied().collect();
        assert_eq!(set.len(), reqs.len());
        assert!(reqs.iter().all(|r| r.block != 5));
        assert_eq!(p.per_helper()[5], 0);
        assert_eq!(p.per_helper().iter().sum::<usize>(), p.downloaded());
    }

    #[test]
    fn invalid_block_rejected() {
        let l = Layout::new(6, 3, 1).unwrap();
        assert!(plan_repair(&l, BlockId { u: 4, v: 1 }).is_err());
        assert!(plan_repair(&l, BlockId { u: 1, v: 3 }).is_err());
    }

    #[test]
    fn report_values() {
        let rep = plan(6, 3, 1, 2).report();
        assert_eq!(rep.downloaded_symbols, 7);
        assert_eq!(rep.cutset, Ratio::from_integer(5));
        assert_eq!(rep.ratio, Ratio::new(7, 5));
        assert!(rep.bound_ok);
        let text = alloc::format!("{rep}");
        assert!(text.contains("downloaded=7\n"));
        assert!(text.contains("cutset=5\n"));
        assert!(text.contains("ratio=1.4\n"));
    }

    #[test]
    fn bounds_report_examples() {
        let rep = plan(6, 3, 1, 0).report();
        let b = bounds_report(6, 3, 1, &rep);
        assert_eq!(b.ratio, Ratio::new(7, 5));
        assert!((b.implied_min_ell - 3.0 / 1.4).abs() < 1e-12);
        assert!(b.implied_min_ell_ok);

        let b = bounds_report(6, 3, 2, &plan(6, 3, 2, 0).report());
        assert_eq!(b.ratio, Ratio::from_integer(1));

        // k = 1 forces n = 2, r = 1: cut-set equals ℓ and the log base is undefined
        let b = bounds_report(2, 1, 1, &plan(2, 1, 1, 0).report());
        assert_eq!(b.cutset, Ratio::from_integer(1));
        assert_eq!(b.gtc_bound_ok, None);

        let b = bounds_report(4, 3, 2, &plan(4, 3, 2, 1).report());
        assert_eq!(b.ell, 1);
        assert_eq!(b.cutset, Ratio::from_integer(3));
    }
}
