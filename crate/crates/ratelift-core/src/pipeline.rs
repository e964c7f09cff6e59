//! The block-wise two-source transformation: split both oracles on the
//! schedule's cut points, obtain a regular table per block, emit
//! `z_i = E_i(x_i, y_i)`, and concatenate.
//!
//! The number of input bits a run touches is computable from the requested
//! output length alone ([`required_prefix`]), before looking at either
//! oracle; [`run`] reads exactly that prefix up front and never queries
//! again. That a-priori query bound is what makes the transformation a
//! bounded (truth-table style) reduction, and instrumented oracles can audit
//! it through their high-water marks.
//!
//! Block `i` wants a `(tau/4, 2)`-regular table with input length `n_i` and
//! output length `m_i = i^2`. The schedule's block lengths grow
//! geometrically, so explicit tables stop being materializable after a few
//! blocks; `toy` mode caps `n_i` (and then `m_i` at the capped `n_i`) to
//! keep end-to-end runs executable, at the cost of leaving the schedule's
//! guarantees — such runs are flagged as off-schedule in every trace.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::regular::{
    find_regular, CheckConfig, CheckMode, ColorTable, RegularError, RegularityReport,
};
use crate::schedule::{cut_points, derive_params, Rate, ScheduleError, SplitParams};
use crate::sources::{BitString, OracleSource};
use crate::splitmix64;

/// Largest block input length for which tables are materialized and
/// searched (`2^(2n)` entries each).
pub const MAX_SEARCH_N: u8 = 10;

/// Domain separator for per-block table seeds.
const BLOCK_SEED_DOMAIN: u64 = 0x7461_626C_6573_6564;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PipelineError {
    Schedule(ScheduleError),
    BadOutLen,
    BadToyCap { cap: usize },
    /// The configured block limit cannot cover the requested output length.
    BlockLimitTooSmall { limit: u32, out_len: u64 },
    /// A needed block's input length is beyond what explicit tables support;
    /// rerun with a toy cap to get an executable (off-schedule) pipeline.
    ScheduleInfeasible { block: u32, n_bits: BigUint },
    /// The required prefix does not fit in the address space.
    PrefixTooLarge { bits: BigUint },
    OracleTooShort {
        which: char,
        needed: usize,
        available: usize,
    },
    /// The table search for a block ran out of candidates.
    TableSearchExhausted {
        block: u32,
        candidates_tried: u64,
        best_max_load: u64,
    },
    ProviderFailure { block: u32, message: String },
    Regular(RegularError),
    BlockLengthMismatch {
        expected: usize,
        got_x: usize,
        got_y: usize,
    },
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Schedule(e) => write!(f, "{e}"),
            PipelineError::BadOutLen => write!(f, "output length must be >= 1"),
            PipelineError::BadToyCap { cap } => write!(
                f,
                "toy block cap {cap} out of range (need 1 <= cap <= {MAX_SEARCH_N})"
            ),
            PipelineError::BlockLimitTooSmall { limit, out_len } => write!(
                f,
                "block limit {limit} cannot emit {out_len} bits; raise the limit"
            ),
            PipelineError::ScheduleInfeasible { block, n_bits } => write!(
                f,
                "block {block} needs tables over {n_bits}-bit inputs, beyond the \
                 {MAX_SEARCH_N}-bit materialization limit; use toy mode for an \
                 executable off-schedule run"
            ),
            PipelineError::PrefixTooLarge { bits } => {
                write!(f, "required input prefix of {bits} bits is not addressable")
            }
            PipelineError::OracleTooShort {
                which,
                needed,
                available,
            } => write!(
                f,
                "oracle {which} has {available} bits but the run needs the \
                 {needed}-bit prefix"
            ),
            PipelineError::TableSearchExhausted {
                block,
                candidates_tried,
                best_max_load,
            } => write!(
                f,
                "table search for block {block} exhausted {candidates_tried} \
                 candidates (best max load {best_max_load})"
            ),
            PipelineError::ProviderFailure { block, message } => {
                write!(f, "table provider failed for block {block}: {message}")
            }
            PipelineError::Regular(e) => write!(f, "{e}"),
            PipelineError::BlockLengthMismatch {
                expected,
                got_x,
                got_y,
            } => write!(
                f,
                "block inputs must both have the table's input length {expected}, \
                 got {got_x} and {got_y}"
            ),
        }
    }
}

impl From<ScheduleError> for PipelineError {
    fn from(e: ScheduleError) -> Self {
        PipelineError::Schedule(e)
    }
}

impl From<RegularError> for PipelineError {
    fn from(e: RegularError) -> Self {
        PipelineError::Regular(e)
    }
}

/// One planned block: effective lengths after any toy caps, plus the
/// cumulative cut point they imply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPlan {
    /// 1-based block index.
    pub index: u32,
    /// Effective input length of the block.
    pub n_bits: BigUint,
    /// Effective output length of the block.
    pub m_bits: u64,
    /// Cut point after this block (sum of effective block lengths so far).
    pub t_end: BigUint,
    /// Input length was reduced by the toy cap.
    pub n_capped: bool,
    /// Output length was reduced below `index^2` by the toy cap.
    pub m_capped: bool,
}

/// A fully resolved plan for a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub params: SplitParams,
    /// Regularity parameter demanded of block tables: `sigma/2 = tau/4`.
    pub sigma_reg: Rate,
    /// Load factor demanded of block tables.
    pub c: Rate,
    pub blocks: Vec<BlockPlan>,
    pub toy_max_n: Option<usize>,
    pub block_limit: u32,
}

impl PipelineConfig {
    pub fn is_toy(&self) -> bool {
        self.toy_max_n.is_some()
    }
}

/// Builds the per-block plan for `(tau, a)` with up to `block_limit`
/// blocks. With `toy_max_n` set, block input lengths are capped at that
/// many bits and block output lengths at the capped input length; the
/// resulting run is flagged off-schedule.
pub fn plan(
    tau: Rate,
    a: u64,
    block_limit: u32,
    toy_max_n: Option<usize>,
) -> Result<PipelineConfig, PipelineError> {
    if block_limit == 0 {
        return Err(ScheduleError::BadCount.into());
    }
    if let Some(cap) = toy_max_n {
        if cap == 0 || cap > MAX_SEARCH_N as usize {
            return Err(PipelineError::BadToyCap { cap });
        }
    }
    let params = derive_params(tau, a)?;
    let sched = cut_points(&params, block_limit as usize)?;
    let sigma_reg = params.sigma / 2;
    let mut blocks = Vec::with_capacity(block_limit as usize);
    let mut t_end = BigUint::from(0u32);
    for i in 1..=block_limit {
        let paper_n = sched.n[i as usize - 1].clone();
        let paper_m = sched.m[i as usize - 1];
        let (n_bits, n_capped) = match toy_max_n {
            Some(cap) if paper_n > BigUint::from(cap) => (BigUint::from(cap), true),
            _ => (paper_n, false),
        };
        let (m_bits, m_capped) = if toy_max_n.is_some() {
            let n_u64 = n_bits.to_u64().expect("capped length fits u64");
            (paper_m.min(n_u64), paper_m > n_u64)
        } else {
            (paper_m, false)
        };
        t_end += &n_bits;
        blocks.push(BlockPlan {
            index: i,
            n_bits,
            m_bits,
            t_end: t_end.clone(),
            n_capped,
            m_capped,
        });
    }
    Ok(PipelineConfig {
        params,
        sigma_reg,
        c: Rate::new(2, 1),
        blocks,
        toy_max_n,
        block_limit,
    })
}

/// The a-priori query bound: how many blocks a run to `out_len` output bits
/// processes and how long an input prefix it reads from each oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequiredPrefix {
    pub blocks: u32,
    pub prefix_bits: BigUint,
}

/// Computes the exact query bound for `out_len` output bits without
/// consulting any oracle.
pub fn required_prefix(
    config: &PipelineConfig,
    out_len: u64,
) -> Result<RequiredPrefix, PipelineError> {
    if out_len == 0 {
        return Err(PipelineError::BadOutLen);
    }
    let mut emitted = 0u64;
    for block in &config.blocks {
        emitted = emitted.saturating_add(block.m_bits);
        if emitted >= out_len {
            return Ok(RequiredPrefix {
                blocks: block.index,
                prefix_bits: block.t_end.clone(),
            });
        }
    }
    Err(PipelineError::BlockLimitTooSmall {
        limit: config.block_limit,
        out_len,
    })
}

/// What [`run`] asks a table provider for, per block. The seed is derived
/// from the run's base seed and `(index, n, m)` only — never from oracle
/// data, so tables depend on the block position alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockRequest {
    pub block: u32,
    pub n: u8,
    pub m: u8,
    pub sigma: Rate,
    pub c: Rate,
    pub seed: u64,
}

/// A table handed back by a provider, with the evidence that came with it.
#[derive(Debug, Clone)]
pub struct ProvidedTable {
    pub table: ColorTable,
    pub report: RegularityReport,
    pub candidates_tried: u64,
    pub from_cache: bool,
}

#[derive(Debug, Clone)]
pub enum ProviderError {
    SearchExhausted {
        candidates_tried: u64,
        best_max_load: u64,
    },
    Failure(String),
}

/// Source of per-block tables. Implementations must be deterministic in the
/// request (the searching provider is; a caching provider must verify cache
/// hits against the same check the search would run).
pub trait TableProvider {
    fn table_for(&mut self, req: &BlockRequest) -> Result<ProvidedTable, ProviderError>;
}

/// Search settings for block tables.
#[derive(Debug, Clone, Copy)]
pub struct SearchParams {
    pub candidate_budget: u64,
    pub check: CheckConfig,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            candidate_budget: 200_000,
            check: CheckConfig::default(),
        }
    }
}

/// Provider that finds each table by seeded search, with no persistence.
#[derive(Debug, Clone, Default)]
pub struct SearchingProvider {
    pub params: SearchParams,
}

impl TableProvider for SearchingProvider {
    fn table_for(&mut self, req: &BlockRequest) -> Result<ProvidedTable, ProviderError> {
        let outcome = find_regular(
            req.n,
            req.m,
            req.sigma,
            req.c,
            req.seed,
            self.params.candidate_budget,
            &self.params.check,
        )
        .map_err(|e| ProviderError::Failure(alloc::format!("{e}")))?;
        match outcome {
            Ok(found) => Ok(ProvidedTable {
                table: found.table,
                report: found.report,
                candidates_tried: found.candidates_tried,
                from_cache: false,
            }),
            Err(ex) => Err(ProviderError::SearchExhausted {
                candidates_tried: ex.candidates_tried,
                best_max_load: ex.best_report.max_load,
            }),
        }
    }
}

/// Seed for block `index`'s table: a SplitMix64 chain over the base seed and
/// the block's `(index, n, m)`.
pub fn block_table_seed(base_seed: u64, index: u32, n_bits: u64, m_bits: u64) -> u64 {
    let mut s = splitmix64(base_seed ^ BLOCK_SEED_DOMAIN);
    s = splitmix64(s ^ u64::from(index));
    s = splitmix64(s ^ n_bits);
    splitmix64(s ^ m_bits)
}

/// Per-block record of what a run did.
#[derive(Debug, Clone)]
pub struct BlockTrace {
    pub index: u32,
    pub n_bits: u64,
    pub m_bits: u64,
    pub x_bits: BitString,
    pub y_bits: BitString,
    pub z_bits: BitString,
    pub table_fingerprint: String,
    pub table_seed: u64,
    pub candidates_tried: u64,
    pub table_from_cache: bool,
    pub check_mode: CheckMode,
    pub n_capped: bool,
    pub m_capped: bool,
}

/// Full record of a run: enough to re-derive the output bit for bit.
#[derive(Debug, Clone)]
pub struct ExtractionTrace {
    pub blocks: Vec<BlockTrace>,
    /// Bits read from each oracle (`t_j` for the last processed block).
    pub consumed_prefix: usize,
    pub requested_out_len: u64,
    pub toy: bool,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub z: BitString,
    pub trace: ExtractionTrace,
}

/// Looks up one block's output: `z_i = E_i(x_i, y_i)`.
pub fn extract_block(
    table: &ColorTable,
    x_i: &BitString,
    y_i: &BitString,
) -> Result<BitString, PipelineError> {
    let expected = table.n() as usize;
    if x_i.len() != expected || y_i.len() != expected {
        return Err(PipelineError::BlockLengthMismatch {
            expected,
            got_x: x_i.len(),
            got_y: y_i.len(),
        });
    }
    let color = table.entry(x_i.index_value(), y_i.index_value());
    Ok(BitString::from_index(u64::from(color), table.m() as usize))
}

/// Runs the transformation until at least `out_len` output bits exist,
/// returning the first `out_len` of them plus the full trace.
///
/// The required prefix is read from both oracles up front — the run never
/// touches an oracle index beyond [`required_prefix`]'s bound — and the
/// result is a pure function of `(config, oracle contents, out_len,
/// base_seed)`.
pub fn run(
    config: &PipelineConfig,
    x: &mut OracleSource,
    y: &mut OracleSource,
    out_len: u64,
    base_seed: u64,
    provider: &mut dyn TableProvider,
) -> Result<RunResult, PipelineError> {
    let need = required_prefix(config, out_len)?;

    // Refuse unmaterializable blocks before touching the oracles.
    for block in &config.blocks[..need.blocks as usize] {
        if block.n_bits > BigUint::from(MAX_SEARCH_N) {
            return Err(PipelineError::ScheduleInfeasible {
                block: block.index,
                n_bits: block.n_bits.clone(),
            });
        }
    }
    let prefix = need
        .prefix_bits
        .to_usize()
        .ok_or(PipelineError::PrefixTooLarge {
            bits: need.prefix_bits.clone(),
        })?;
    for (which, oracle) in [('x', &*x), ('y', &*y)] {
        if oracle.available_len() < prefix {
            return Err(PipelineError::OracleTooShort {
                which,
                needed: prefix,
                available: oracle.available_len(),
            });
        }
    }

    let x_full = x.read(1, prefix).expect("length checked above");
    let y_full = y.read(1, prefix).expect("length checked above");

    let mut z = BitString::new();
    let mut blocks = Vec::with_capacity(need.blocks as usize);
    let mut cursor = 0usize; // t_{i-1}
    for block in &config.blocks[..need.blocks as usize] {
        let n_bits = block.n_bits.to_u64().expect("feasible block fits u64");
        let start = cursor + 1;
        let end = cursor + n_bits as usize;
        cursor = end;
        let x_i = x_full.substring(start, end).expect("within prefix");
        let y_i = y_full.substring(start, end).expect("within prefix");
        let seed = block_table_seed(base_seed, block.index, n_bits, block.m_bits);
        let req = BlockRequest {
            block: block.index,
            n: n_bits as u8,
            m: block.m_bits as u8,
            sigma: config.sigma_reg,
            c: config.c,
            seed,
        };
        let provided = provider.table_for(&req).map_err(|e| match e {
            ProviderError::SearchExhausted {
                candidates_tried,
                best_max_load,
            } => PipelineError::TableSearchExhausted {
                block: block.index,
                candidates_tried,
                best_max_load,
            },
            ProviderError::Failure(message) => PipelineError::ProviderFailure {
                block: block.index,
                message,
            },
        })?;
        if provided.table.n() != req.n || provided.table.m() != req.m {
            return Err(PipelineError::ProviderFailure {
                block: block.index,
                message: alloc::format!(
                    "provider returned a {}x{}-shaped table for a {}x{} request",
                    provided.table.n(),
                    provided.table.m(),
                    req.n,
                    req.m
                ),
            });
        }
        let z_i = extract_block(&provided.table, &x_i, &y_i)?;
        z.extend(&z_i);
        blocks.push(BlockTrace {
            index: block.index,
            n_bits,
            m_bits: block.m_bits,
            x_bits: x_i,
            y_bits: y_i,
            z_bits: z_i,
            table_fingerprint: provided.table.fingerprint(),
            table_seed: seed,
            candidates_tried: provided.candidates_tried,
            table_from_cache: provided.from_cache,
            check_mode: provided.report.mode.clone(),
            n_capped: block.n_capped,
            m_capped: block.m_capped,
        });
    }
    debug_assert_eq!(cursor, prefix);

    Ok(RunResult {
        z: z.truncated(out_len as usize),
        trace: ExtractionTrace {
            blocks,
            consumed_prefix: prefix,
            requested_out_len: out_len,
            toy: config.is_toy(),
        },
    })
}
