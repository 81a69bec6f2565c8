//! Vector core timing model: instruction classes, per-class cost rules,
//! register chaining, and the pipeline flush sequence used when a vector
//! memory access takes a page fault.
//!
//! The core is decoupled from its host: the scalar frontend dispatches one
//! instruction at a time into a fixed-depth backend queue and stalls when
//! the queue is full or when an unretired memory operation blocks the
//! non-speculative handshake. Execution cost is element throughput over
//! the lanes for arithmetic and memory-bandwidth-limited transfer for
//! loads/stores; chaining lets a consumer start while its producer is
//! still streaming results.

use crate::vlsu::VectorMemOp;
use crate::Cycle;
use serde::{Deserialize, Serialize};

/// Timing knobs for the paired scalar + vector cores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoreTimingParams {
    /// Parallel vector lanes.
    pub lanes: u32,
    /// Vector register length in bits; caps vl per element width.
    pub vlen_bits: u32,
    /// Bytes the memory port moves per cycle once a burst is streaming.
    pub mem_bw_bytes_per_cycle: u64,
    /// Frontend cost of handing one instruction to the backend.
    pub dispatch_cycles: Cycle,
    /// Backend queue depth; dispatch stalls when this many instructions
    /// are in flight.
    pub window_depth: usize,
    /// Pipeline flush after a vector memory fault, charged once the
    /// preceding instructions have drained.
    pub flush_cycles: Cycle,
    /// Consumers may start while the producer still streams results.
    pub chaining: bool,
    /// Scalar load/store execution cycles (cache hit assumed), excluding
    /// translation.
    pub scalar_mem_cycles: Cycle,
    /// Any other scalar instruction.
    pub scalar_issue_cycles: Cycle,
}

impl Default for CoreTimingParams {
    fn default() -> Self {
        CoreTimingParams {
            lanes: 2,
            vlen_bits: 2048,
            mem_bw_bytes_per_cycle: 8,
            dispatch_cycles: 4,
            window_depth: 8,
            flush_cycles: 10,
            chaining: true,
            scalar_mem_cycles: 2,
            scalar_issue_cycles: 1,
        }
    }
}

impl CoreTimingParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.lanes == 0 {
            return Err("lanes must be positive".into());
        }
        if self.mem_bw_bytes_per_cycle == 0 {
            return Err("memory bandwidth must be positive".into());
        }
        if self.window_depth == 0 {
            return Err("window_depth must be positive".into());
        }
        if self.vlen_bits == 0 || self.vlen_bits % 8 != 0 {
            return Err(format!("vlen_bits {} must be a positive multiple of 8", self.vlen_bits));
        }
        Ok(())
    }

    /// Elements of `ew` bytes that fit one vector register.
    pub fn vlmax(&self, element_width: u32) -> u32 {
        self.vlen_bits / (8 * element_width)
    }
}

/// Register identifiers are small indexes into the architectural vector
/// register file.
pub type VReg = u8;

#[derive(Debug, Clone, PartialEq)]
pub enum InstrClass {
    /// Element-wise op producing `rate` results per lane per cycle.
    Arithmetic { rate: u32 },
    /// Lane-crossing op (reductions, slides); never chains its output.
    Permutation { rate: u32 },
    /// Memory access through the shared translation path.
    Memory { op: VectorMemOp },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorInstruction {
    pub id: u64,
    pub class: InstrClass,
    pub vl: u32,
    pub sources: Vec<VReg>,
    pub dest: Option<VReg>,
}

impl VectorInstruction {
    /// Cycles the execution unit needs once operands are available,
    /// excluding translation time for memory ops.
    pub fn execute_cycles(&self, p: &CoreTimingParams) -> Cycle {
        match &self.class {
            InstrClass::Arithmetic { rate } | InstrClass::Permutation { rate } => {
                let per_cycle = (p.lanes * rate).max(1) as u64;
                (self.vl as u64).div_ceil(per_cycle).max(1)
            }
            InstrClass::Memory { op } => {
                let live = op.vl.saturating_sub(op.vstart) as u64;
                let bytes = live * op.element_width as u64;
                bytes.div_ceil(p.mem_bw_bytes_per_cycle).max(1)
            }
        }
    }

    pub fn is_memory(&self) -> bool {
        matches!(self.class, InstrClass::Memory { .. })
    }

    pub fn is_store(&self) -> bool {
        matches!(&self.class, InstrClass::Memory { op } if op.is_store)
    }
}

/// Earliest start for a consumer whose source register is produced over
/// [src_start, src_end). With chaining the consumer may trail the
/// producer element-by-element so long as it never overtakes it; without
/// chaining it waits for the full register.
pub fn chained_start(
    chaining: bool,
    src_start: Cycle,
    src_end: Cycle,
    consumer_duration: Cycle,
) -> Cycle {
    if chaining {
        let no_overtake = (src_end + 1).saturating_sub(consumer_duration);
        no_overtake.max(src_start + 1)
    } else {
        src_end
    }
}

/// Fault recovery sequence: finish everything older than the faulting
/// instruction, flush the pipeline, then hand control to the fault
/// handler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlushFsm {
    Idle,
    /// Waiting for instructions older than the fault to retire;
    /// holds the cycle the youngest of them completes.
    DrainPreceding { drain_done: Cycle },
    /// Pipeline flush in progress.
    Flushing { done: Cycle },
    /// Flush complete; fault is architecturally visible at `at`.
    AckFrontend { at: Cycle },
}

impl FlushFsm {
    pub fn begin(fault_seen: Cycle, older_retire: Cycle) -> FlushFsm {
        FlushFsm::DrainPreceding {
            drain_done: older_retire.max(fault_seen),
        }
    }

    pub fn step(self, flush_cycles: Cycle) -> FlushFsm {
        match self {
            FlushFsm::Idle => FlushFsm::Idle,
            FlushFsm::DrainPreceding { drain_done } => FlushFsm::Flushing {
                done: drain_done + flush_cycles,
            },
            FlushFsm::Flushing { done } => FlushFsm::AckFrontend { at: done },
            ack @ FlushFsm::AckFrontend { .. } => ack,
        }
    }

    /// Runs the machine to completion and returns when the fault reaches
    /// the frontend.
    pub fn resolve(fault_seen: Cycle, older_retire: Cycle, flush_cycles: Cycle) -> Cycle {
        let mut fsm = FlushFsm::begin(fault_seen, older_retire);
        loop {
            fsm = fsm.step(flush_cycles);
            if let FlushFsm::AckFrontend { at } = fsm {
                return at;
            }
        }
    }
}
