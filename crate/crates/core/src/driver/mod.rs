//! Experiment orchestration: deterministic single runs, bare-metal vs.
//! virtual-memory overhead decomposition, TLB-size sweeps, and report
//! emission.

mod config_file;
mod emit;
mod engine;
mod sweep;

pub use config_file::load_config;
pub use emit::{run_report_csv, run_report_json, sweep_csv};
pub use engine::{run, run_workload};
pub use sweep::{overhead, sweep, SweepRow, SweepSpec};

use crate::addressing::RequestSource;
use crate::mmu::MmuLatencyParams;
use crate::os_model::{ContextSwitchCost, FaultServiceParams, OsCounters, SchedulerConfig};
use crate::tlb::TlbConfig;
use crate::vector_core::CoreTimingParams;
use crate::vlsu::CacheGeometry;
use crate::workloads::KernelSpec;
use crate::{Cycle, SimError};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunMode {
    #[serde(rename = "bm")]
    BareMetal,
    #[serde(rename = "vm")]
    VirtualMemory,
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunMode::BareMetal => "bm",
            RunMode::VirtualMemory => "vm",
        })
    }
}

impl RunMode {
    pub fn parse(text: &str) -> Result<RunMode, SimError> {
        match text {
            "bm" => Ok(RunMode::BareMetal),
            "vm" => Ok(RunMode::VirtualMemory),
            other => Err(SimError::config(format!(
                "mode must be 'vm' or 'bm', got '{other}'"
            ))),
        }
    }
}

/// Invalidation-filter cache parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CacheParams {
    pub sets: u32,
    pub index_bits: u32,
    pub line_bytes: u64,
    /// Cycles to invalidate one cache set touched by a vector store.
    pub per_set_cycles: u64,
}

impl Default for CacheParams {
    fn default() -> Self {
        let g = CacheGeometry::default();
        CacheParams {
            sets: g.sets,
            index_bits: g.index_bits,
            line_bytes: g.line_bytes,
            per_set_cycles: 1,
        }
    }
}

impl CacheParams {
    pub fn geometry(&self) -> CacheGeometry {
        CacheGeometry {
            sets: self.sets,
            index_bits: self.index_bits,
            line_bytes: self.line_bytes,
        }
    }
}

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub kernel: KernelSpec,
    pub mode: RunMode,
    /// Virtual-memory runs start with an empty page table and fault
    /// pages in on first touch instead of premapping the footprint.
    pub demand_paging: bool,
    pub seed: u64,
    /// Times the kernel's instruction stream is replayed back to back.
    pub repeat: u32,
    /// Keep a per-element log of committed accesses in the report.
    pub record_access_log: bool,
    /// Which source wins a simultaneous translation request.
    pub arbiter_tie_break: RequestSource,
    pub tlb: TlbConfig,
    pub mmu: MmuLatencyParams,
    pub core: CoreTimingParams,
    pub scheduler: SchedulerConfig,
    pub context_switch: ContextSwitchCost,
    pub fault: FaultServiceParams,
    pub cache: CacheParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            kernel: KernelSpec::Matmul { n: 64 },
            mode: RunMode::VirtualMemory,
            demand_paging: false,
            seed: 1,
            repeat: 1,
            record_access_log: false,
            arbiter_tie_break: RequestSource::Scalar,
            tlb: TlbConfig::default(),
            mmu: MmuLatencyParams::default(),
            core: CoreTimingParams::default(),
            scheduler: SchedulerConfig::default(),
            context_switch: ContextSwitchCost::default(),
            fault: FaultServiceParams::default(),
            cache: CacheParams::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.kernel.validate()?;
        self.tlb
            .validate()
            .map_err(|e| SimError::config(e.to_string()))?;
        self.core.validate().map_err(SimError::Config)?;
        self.scheduler.validate().map_err(SimError::Config)?;
        self.context_switch.validate().map_err(SimError::Config)?;
        self.cache
            .geometry()
            .validate()
            .map_err(|e| SimError::config(e.to_string()))?;
        if self.repeat == 0 {
            return Err(SimError::config("repeat must be at least 1"));
        }
        if self.mode == RunMode::BareMetal {
            if self.scheduler.preemptive {
                return Err(SimError::config(
                    "bare-metal runs cannot be preemptive: no OS is modeled",
                ));
            }
            if self.demand_paging {
                return Err(SimError::config(
                    "bare-metal runs cannot use demand paging: translation is off",
                ));
            }
        }
        Ok(())
    }

    /// Derived bare-metal baseline for overhead comparisons.
    pub fn baseline(&self) -> SimConfig {
        SimConfig {
            mode: RunMode::BareMetal,
            demand_paging: false,
            scheduler: SchedulerConfig {
                preemptive: false,
                ..self.scheduler
            },
            ..self.clone()
        }
    }
}

/// One committed memory access, for replay verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AccessRecord {
    /// Position of the instruction in the (repeated) stream; stable
    /// across fault replays.
    pub ordinal: u64,
    pub element: u32,
    pub vaddr: u64,
    pub is_store: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunCounters {
    /// Arbitration wait plus translation service per source.
    pub scalar_mmu_stall_cycles: Cycle,
    pub vector_mmu_stall_cycles: Cycle,
    pub arbiter_wait_cycles: Cycle,
    pub ptw_cycles: Cycle,
    pub scalar_tlb_hits: u64,
    pub scalar_tlb_misses: u64,
    pub vector_tlb_hits: u64,
    pub vector_tlb_misses: u64,
    pub scalar_translation_requests: u64,
    pub vector_translation_requests: u64,
    /// Frontend translation-stall cycles that overlapped backend work.
    pub hidden_stall_cycles: Cycle,
    /// Serialized translation-stall cycles chargeable to each source.
    pub exposed_scalar_mmu_cycles: Cycle,
    pub exposed_vector_mmu_cycles: Cycle,
    pub flush_events: u64,
    pub invalidation_cycles: Cycle,
    pub vector_instructions: u64,
    pub scalar_accesses: u64,
    pub os: OsCounters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kernel: String,
    pub n: u32,
    pub mode: String,
    pub tlb_entries: usize,
    pub seed: u64,
    pub total_cycles: Cycle,
    pub counters: RunCounters,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub access_log: Option<Vec<AccessRecord>>,
}

/// Slowdown of a virtual-memory run against its baseline, split into the
/// translation exposure of each requester plus everything else
/// (arbitration, OS activity, attribution rounding). Values are percent
/// of baseline cycles; `total_pct` is constructed as the sum of its
/// parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadBreakdown {
    pub total_pct: f64,
    pub cva6_mmu_pct: f64,
    pub ara_mmu_pct: f64,
    pub other_pct: f64,
}
