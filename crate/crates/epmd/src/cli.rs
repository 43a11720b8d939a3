use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use epmd_core::codec::{Codec, PartialCodeword};
use epmd_core::mds::{failure_bound, sample_code, CodeTemplate, FAILURE_BOUND_WARN};
use epmd_core::repair::{bounds_report, execute_repair, plan_repair};
use epmd_core::{CodeParams, Field, FieldElement};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bench::{default_grid, parse_grid, run_bench};
use crate::error::{Error, Result};
use crate::format::{decode_symbols, encode_symbols, read_blocks, write_block, CodewordFile};
use crate::sim::sim_run;
use crate::specfile::{load_params, verify, CodeSpecFile};

pub const GEN_RETRIES: usize = 16;
pub const CODEWORD_FILE: &str = "codeword.epmd";
pub const MESSAGE_FILE: &str = "message.bin";

#[derive(Debug, Parser)]
#[command(name = "epmd", version, about = "MDS array codes with low-bandwidth single-node repair")]
pub struct Cli {
    /// Load spec files without re-checking the MDS property.
    #[arg(long, global = true)]
    pub skip_verify: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a code and write its spec file.
    Gen {
        n: usize,
        k: usize,
        t: usize,
        #[arg(long, default_value_t = 16)]
        field_bits: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "code.toml")]
        out: PathBuf,
    },
    /// Check that a spec file describes an MDS code.
    Verify {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Encode a message file of exactly k·ℓ·w/8 bytes.
    Encode {
        #[arg(long)]
        spec: PathBuf,
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Rebuild all blocks and the message from at least k block files.
    Decode {
        #[arg(long)]
        spec: PathBuf,
        /// Directory holding block_NN.epmd files.
        blocks: PathBuf,
        /// Defaults to the block directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan (and with a block directory, perform) repair of one block.
    Repair {
        #[arg(long)]
        spec: PathBuf,
        /// 1-based block index.
        #[arg(long)]
        failed: usize,
        blocks: Option<PathBuf>,
        /// Defaults to the block directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repair-bandwidth sweep as CSV.
    Bench {
        /// "n,k,t;n,k,t;..."; defaults to every n ≤ 12 with r ∈ {2,3,4}.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 16)]
        field_bits: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fail and repair nodes of a simulated cluster one at a time.
    Sim {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// 1-based nodes, comma separated; defaults to every node once.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<usize>>,
    },
}

pub fn run(cli: Cli) -> Result<()> {
    let skip = cli.skip_verify;
    let mut stdout = io::stdout().lock();
    let out = &mut stdout;
    match cli.command {
        Command::Gen {
            n,
            k,
            t,
            field_bits,
            seed,
            out: path,
        } => gen(n, k, t, field_bits, seed, &path, out),
        Command::Verify { spec } => {
            let (_, params) = load_params(&spec, true)?;
            let subsets = verify(&params)?;
            emit(out, format_args!("mds=true\nsubsets={subsets}\n"))
        }
        Command::Encode { spec, input, out: dir } => {
            let (_, params) = load_params(&spec, skip)?;
            encode(&params, &input, &dir, out)
        }
        Command::Decode { spec, blocks, out: dir } => {
            let (_, params) = load_params(&spec, skip)?;
            let dir = dir.unwrap_or_else(|| blocks.clone());
            decode(&params, &blocks, &dir, out)
        }
        Command::Repair {
            spec,
            failed,
            blocks,
            out: dir,
        } => {
            let (_, params) = load_params(&spec, skip)?;
            repair(&params, failed, blocks.as_deref(), dir.as_deref(), out)
        }
        Command::Bench {
            grid,
            field_bits,
            seed,
            out: path,
        } => {
            let grid = match grid {
                Some(text) => parse_grid(&text)?,
                None => default_grid(),
            };
            let field = Field::with_bits(field_bits)?;
            let skipped = match path {
                Some(path) => {
                    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
                    run_bench(&grid, Some(&field), seed, io::BufWriter::new(file))?
                }
                None => run_bench(&grid, Some(&field), seed, &mut *out)?,
            };
            for note in skipped {
                eprintln!("skipped {note}");
            }
            Ok(())
        }
        Command::Sim { spec, seed, schedule } => {
            let (_, params) = load_params(&spec, skip)?;
            let schedule = match schedule {
                Some(nodes) => nodes
                    .into_iter()
                    .map(|i| i.checked_sub(1).ok_or_else(|| Error::Usage("nodes are numbered from 1".into())))
                    .collect::<Result<Vec<_>>>()?,
                None => (0..params.n()).collect(),
            };
            let codec = Codec::new(&params)?;
            let codeword = codec.encode(&random_message(&params, seed))?;
            let (_, summary) = sim_run(&params, &codeword, &schedule)?;
            emit(out, format_args!("{summary}"))
        }
    }
}

fn emit(out: &mut impl Write, args: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(args).map_err(|e| Error::io("<stdout>", e))
}

fn gen(n: usize, k: usize, t: usize, bits: u32, seed: u64, path: &Path, out: &mut impl Write) -> Result<()> {
    if i64::try_from(seed).is_err() {
        return Err(Error::Usage("seed must fit in a signed 64-bit integer".into()));
    }
    let field = Field::with_bits(bits)?;
    let template = CodeTemplate::new(field.clone(), n, k, t)?;
    let bound = failure_bound(&template.layout, &field);
    emit(out, format_args!("failure_bound={bound:.6e}\n"))?;
    if bound > FAILURE_BOUND_WARN {
        eprintln!(
            "warning: GF(2^{bits}) is small for ({n},{k},{t}); a random rho fails with probability up to {bound:.3}"
        );
    }
    let code = sample_code(&template, seed, GEN_RETRIES)?;
    CodeSpecFile::from_params(&code.params, seed).write(path)?;
    emit(
        out,
        format_args!(
            "rho={:x}\nattempts={}\nsubsets={}\nspec={}\n",
            code.params.rho().value(),
            code.attempts,
            code.report.subsets_checked,
            path.display()
        ),
    )
}

fn random_message(params: &CodeParams, seed: u64) -> Vec<FieldElement> {
    let mask = (params.field().order() - 1) as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..params.k() * params.ell()).map(|_| FieldElement(rng.next_u32() & mask)).collect()
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_all(params: &CodeParams, codeword: &epmd_core::Codeword, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    CodewordFile::new(params.ell(), params.field().bits(), codeword.blocks()).write(&dir.join(CODEWORD_FILE))?;
    for (i, block) in codeword.blocks().iter().enumerate() {
        write_block(dir, params, i, block)?;
    }
    Ok(())
}

fn encode(params: &CodeParams, input: &Path, dir: &Path, out: &mut impl Write) -> Result<()> {
    let bytes = fs::read(input).map_err(|e| Error::io(input, e))?;
    let expected = params.k() * params.ell() * params.field().symbol_bytes();
    if bytes.len() != expected {
        return Err(Error::SizeMismatch {
            expected,
            found: bytes.len(),
        });
    }
    let message = decode_symbols(&bytes, params.field().bits())?;
    let codeword = Codec::new(params)?.encode(&message)?;
    write_all(params, &codeword, dir)?;
    emit(out, format_args!("blocks={}\nout={}\n", params.n(), dir.display()))
}

fn decode(params: &CodeParams, blocks_dir: &Path, dir: &Path, out: &mut impl Write) -> Result<()> {
    let partial = PartialCodeword::new(read_blocks(blocks_dir, params)?);
    let erased = partial.pattern().erased;
    let codeword = Codec::new(params)?.decode(&partial)?;
    write_all(params, &codeword, dir)?;
    let message = encode_symbols(&codeword.message(params.k()), params.field().bits());
    let path = dir.join(MESSAGE_FILE);
    fs::write(&path, message).map_err(|e| Error::io(&path, e))?;
    let erased: Vec<String> = erased.iter().map(|i| (i + 1).to_string()).collect();
    emit(out, format_args!("recovered={}\nout={}\n", erased.join(","), dir.display()))
}

fn repair(
    params: &CodeParams,
    failed: usize,
    blocks_dir: Option<&Path>,
    dir: Option<&Path>,
    out: &mut impl Write,
) -> Result<()> {
    let index = failed
        .checked_sub(1)
        .filter(|&i| i < params.n())
        .ok_or(epmd_core::Error::InvalidBlock(failed))?;
    let layout = params.layout();
    let plan = plan_repair(layout, layout.block(index)?)?;
    if let Some(blocks_dir) = blocks_dir {
        let mut blocks = read_blocks(blocks_dir, params)?;
        blocks[index] = None;
        let block = execute_repair(params, &PartialCodeword::new(blocks), &plan)?;
        let dir = dir.unwrap_or(blocks_dir);
        create_dir(dir)?;
        write_block(dir, params, index, &block)?;
    }
    let report = plan.report();
    let bounds = bounds_report(params.n(), params.k(), params.t(), &report);
    emit(out, format_args!("block={failed}\n{report}\n{bounds}"))
}
