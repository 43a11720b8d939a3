//! Bandwidth sweep over a grid of (n, k, t).

use std::io::Write;

use epmd_core::codec::Codec;
use epmd_core::construction::Layout;
use epmd_core::mds::{sample_code, CodeTemplate};
use epmd_core::repair::{bounds_report, execute_repair, plan_repair, ratio_to_f64, RepairPlan};
use epmd_core::{Field, FieldElement};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};

pub const SAMPLE_RETRIES: usize = 16;

/// One CSV row. `bw`, `stage2` and `ratio` are the worst case over all n
/// failed blocks; the `_min` columns are the best case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub r: usize,
    pub s: usize,
    pub ell: usize,
    pub bw: usize,
    pub bw_min: usize,
    pub stage1: usize,
    pub stage2: usize,
    pub stage2_min: usize,
    /// Exact rational, e.g. `5` or `33/2`.
    pub cutset: String,
    pub ratio: f64,
    pub ratio_min: f64,
    pub ratio_bound: f64,
    pub bound_ok: bool,
    pub gtc_bound_ok: Option<bool>,
    pub twb_bound_ok: bool,
    pub implied_min_ell: f64,
    /// Every block repaired bit-exact on a sampled code; empty if no MDS
    /// code was found in the requested field.
    pub repair_ok: Option<bool>,
}

/// Every n ≤ 12 with r ∈ {2, 3, 4}, r | n, k ≥ 1 and 1 ≤ t ≤ n/r.
pub fn default_grid() -> Vec<(usize, usize, usize)> {
    let mut grid = Vec::new();
    for r in [2usize, 3, 4] {
        for n in (2 * r..=12).step_by(r) {
            for t in 1..=n / r {
                grid.push((n, n - r, t));
            }
        }
    }
    grid
}

/// Parses `"n,k,t;n,k,t"`.
pub fn parse_grid(text: &str) -> Result<Vec<(usize, usize, usize)>> {
    text.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|point| {
            let parts = point
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Usage(format!("grid point {point:?}: {e}")))?;
            match parts[..] {
                [n, k, t] => Ok((n, k, t)),
                _ => Err(Error::Usage(format!("grid point {point:?} is not n,k,t"))),
            }
        })
        .collect()
}

pub fn bench_row(layout: &Layout, field: Option<&Field>, seed: u64) -> Result<BenchRow> {
    let (n, k, t) = (layout.n(), layout.k(), layout.t());
    let plans = (0..n)
        .map(|i| plan_repair(layout, layout.block(i)?))
        .collect::<epmd_core::Result<Vec<_>>>()?;
    let reports: Vec<_> = plans.iter().map(RepairPlan::report).collect();
    let worst = reports.iter().max_by_key(|r| r.downloaded_symbols).expect("n >= 2");
    let best = reports.iter().min_by_key(|r| r.downloaded_symbols).expect("n >= 2");
    let bounds = bounds_report(n, k, t, worst);
    let repair_ok = match field {
        Some(f) => repair_check(layout, f, seed, &plans)?,
        None => None,
    };
    Ok(BenchRow {
        n,
        k,
        t,
        r: layout.r(),
        s: layout.s(),
        ell: layout.ell(),
        bw: worst.downloaded_symbols,
        bw_min: best.downloaded_symbols,
        stage1: worst.stage1_count,
        stage2: worst.stage2_count,
        stage2_min: best.stage2_count,
        cutset: worst.cutset.to_string(),
        ratio: ratio_to_f64(worst.ratio),
        ratio_min: ratio_to_f64(best.ratio),
        ratio_bound: ratio_to_f64(bounds.ratio_bound),
        bound_ok: reports.iter().all(|r| r.bound_ok),
        gtc_bound_ok: bounds.gtc_bound_ok,
        twb_bound_ok: bounds.twb_bound_ok,
        implied_min_ell: bounds.implied_min_ell,
        repair_ok,
    })
}

fn repair_check(layout: &Layout, field: &Field, seed: u64, plans: &[RepairPlan]) -> Result<Option<bool>> {
    let template = CodeTemplate::new(field.clone(), layout.n(), layout.k(), layout.t())?;
    let params = match sample_code(&template, seed, SAMPLE_RETRIES) {
        Ok(code) => code.params,
        Err(epmd_core::Error::RetriesExhausted { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let codec = Codec::new(&params)?;
    let mask = (field.order() - 1) as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let message: Vec<_> = (0..params.k() * params.ell()).map(|_| FieldElement(rng.next_u32() & mask)).collect();
    let codeword = codec.encode(&message)?;
    for (i, plan) in plans.iter().enumerate() {
        if execute_repair(&params, &codeword.erase(&[i]), plan)? != codeword.block(i) {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

/// Runs the grid, writing CSV to `out`. Invalid points are skipped and
/// returned with the reason.
pub fn run_bench<W: Write>(
    grid: &[(usize, usize, usize)],
    field: Option<&Field>,
    seed: u64,
    out: W,
) -> Result<Vec<String>> {
    let mut writer = csv::Writer::from_writer(out);
    let mut skipped = Vec::new();
    for &(n, k, t) in grid {
        let layout = match Layout::new(n, k, t) {
            Ok(l) => l,
            Err(e) => {
                skipped.push(format!("({n},{k},{t}): {e}"));
                continue;
            }
        };
        writer.serialize(bench_row(&layout, field, seed)?).map_err(csv_error)?;
    }
    writer.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(skipped)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv>", io),
        other => Error::Usage(format!("csv: {other:?}")),
    }
}
