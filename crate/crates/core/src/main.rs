//! Command-line front end: single runs, TLB sweeps, and trace dumps.
//!
//! Exit codes: 0 on success, 1 on I/O failure, 2 on configuration
//! errors (including bad flags), 3 on simulation aborts such as
//! segmentation faults or livelocked replay.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use vvmsim::driver::{
    self, load_config, run_report_csv, run_report_json, sweep_csv, RunMode, SimConfig, SweepSpec,
};
use vvmsim::tlb::ReplacementPolicy;
use vvmsim::workloads::{self, KernelSpec};
use vvmsim::SimError;

#[derive(Parser)]
#[command(
    name = "vvmsim",
    version,
    about = "Cycle-approximate simulator of a vector accelerator sharing its host core's MMU"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one kernel and report cycles and counters.
    Run(RunArgs),
    /// Simulate a kernel x TLB-size grid and report overhead rows.
    Sweep(SweepArgs),
    /// Print a kernel's memory trace without simulating it.
    Trace(TraceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmitFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Plru,
    TrueLru,
}

impl From<PolicyArg> for ReplacementPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Plru => ReplacementPolicy::Plru,
            PolicyArg::TrueLru => ReplacementPolicy::TrueLru,
        }
    }
}

/// Flags that select which kernel to build. `--kernel` takes either a
/// family name ("matmul", "axpy", "gather") sized by `--n` or
/// `--rows`/`--nnz`, or a complete name like "matmul64".
#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    kernel: Option<String>,
    /// Problem size for matmul (matrix dimension) and axpy (elements).
    #[arg(long)]
    n: Option<u32>,
    /// Row count for the gather kernel.
    #[arg(long)]
    rows: Option<u32>,
    /// Nonzeros per row for the gather kernel.
    #[arg(long)]
    nnz: Option<u32>,
}

impl KernelArgs {
    /// Resolve against the kernel already in the config (CLI wins).
    fn resolve(&self, base: KernelSpec) -> Result<KernelSpec, SimError> {
        let sized = self.n.is_some() || self.rows.is_some() || self.nnz.is_some();
        let spec = match self.kernel.as_deref() {
            None => base,
            Some(name) if name.chars().any(|c| c.is_ascii_digit()) => {
                if sized {
                    return Err(SimError::config(format!(
                        "kernel '{name}' already carries a size; drop --n/--rows/--nnz"
                    )));
                }
                return KernelSpec::parse(name);
            }
            Some("matmul") => KernelSpec::Matmul {
                n: self.n.unwrap_or(64),
            },
            Some("axpy") => KernelSpec::Axpy {
                n: self.n.unwrap_or(1024),
            },
            Some("gather") => KernelSpec::IndexedGather {
                rows: self.rows.unwrap_or(600),
                nnz_per_row: self.nnz.unwrap_or(21),
            },
            Some(other) => {
                return Err(SimError::config(format!(
                    "unrecognized kernel family '{other}'"
                )))
            }
        };
        // Size flags re-shape whatever kernel the config carried.
        Ok(match spec {
            KernelSpec::Matmul { n } => KernelSpec::Matmul {
                n: self.n.unwrap_or(n),
            },
            KernelSpec::Axpy { n } => KernelSpec::Axpy {
                n: self.n.unwrap_or(n),
            },
            KernelSpec::IndexedGather { rows, nnz_per_row } => KernelSpec::IndexedGather {
                rows: self.rows.unwrap_or(rows),
                nnz_per_row: self.nnz.unwrap_or(nnz_per_row),
            },
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// TLB capacity in entries (power of two, 2..=128).
    #[arg(long)]
    tlb_entries: Option<u32>,
    /// "vm" runs behind translation, "bm" runs bare-metal.
    #[arg(long)]
    mode: Option<String>,
    /// TOML file of defaults; explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    emit: EmitFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Start with an empty page table and fault pages in on first touch.
    #[arg(long)]
    demand_paging: bool,
    /// Replay the instruction stream this many times back to back.
    #[arg(long)]
    repeat: Option<u32>,
    /// Model timer interrupts, TLB pollution, and context switches.
    #[arg(long)]
    preemptive: bool,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated kernel names, e.g. matmul32,matmul64,matmul128.
    #[arg(long, value_delimiter = ',')]
    kernels: Option<Vec<String>>,
    /// Comma-separated TLB sizes, e.g. 2,4,8,16,32,64,128.
    #[arg(long, value_delimiter = ',')]
    tlb: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "csv")]
    emit: EmitFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Verification replays per cell; each must reproduce the first.
    #[arg(long)]
    repetitions: Option<u32>,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn base_config(path: Option<&PathBuf>) -> Result<SimConfig, SimError> {
    match path {
        Some(p) => load_config(p),
        None => Ok(SimConfig::default()),
    }
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), SimError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| SimError::Io {
            path: path.display().to_string(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), SimError> {
    let mut cfg = base_config(args.config.as_ref())?;
    cfg.kernel = args.kernel.resolve(cfg.kernel)?;
    if let Some(entries) = args.tlb_entries {
        cfg.tlb.num_entries = entries;
    }
    if let Some(mode) = args.mode.as_deref() {
        cfg.mode = RunMode::parse(mode)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(repeat) = args.repeat {
        cfg.repeat = repeat;
    }
    if args.demand_paging {
        cfg.demand_paging = true;
    }
    if args.preemptive {
        cfg.scheduler.preemptive = true;
    }
    if let Some(policy) = args.policy {
        cfg.tlb.policy = policy.into();
    }
    cfg.validate()?;

    let report = driver::run(&cfg)?;
    let text = match args.emit {
        EmitFormat::Json => run_report_json(&report),
        EmitFormat::Csv => run_report_csv(&report),
    };
    write_output(args.out.as_ref(), &text)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), SimError> {
    let mut base = base_config(args.config.as_ref())?;
    if let Some(seed) = args.seed {
        base.seed = seed;
    }
    if let Some(policy) = args.policy {
        base.tlb.policy = policy.into();
    }

    let mut spec = SweepSpec::default();
    if let Some(names) = &args.kernels {
        spec.kernels = names
            .iter()
            .map(|s| KernelSpec::parse(s))
            .collect::<Result<_, _>>()?;
    }
    if let Some(sizes) = &args.tlb {
        spec.tlb_sizes = sizes.clone();
    }
    if let Some(reps) = args.repetitions {
        spec.repetitions = reps;
    }

    let rows = driver::sweep(&spec, &base)?;
    let text = match args.emit {
        EmitFormat::Csv => sweep_csv(&rows),
        EmitFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("sweep rows serialize");
            s.push('\n');
            s
        }
    };
    write_output(args.out.as_ref(), &text)
}

fn cmd_trace(args: TraceArgs) -> Result<(), SimError> {
    let cfg = base_config(args.config.as_ref())?;
    let kernel = args.kernel.resolve(cfg.kernel)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let workload = workloads::generate(kernel, cfg.core.vlen_bits, seed)?;
    write_output(args.out.as_ref(), &workloads::dump_trace(&workload))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Trace(args) => cmd_trace(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("vvmsim: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
