//! Operating-system cost model.
//!
//! Three OS behaviors cost cycles in a run: periodic scheduler ticks
//! (timer interrupt, optional TLB flush whose pollution is measured as
//! re-miss cycles on previously resident pages), context switches
//! (scalar register save plus streaming the whole vector register file
//! plus CSR bookkeeping), and demand page-fault service.

use crate::Cycle;
use serde::{Deserialize, Serialize};

/// What a scheduler tick does to the TLB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PollutionModel {
    /// Flush the shared TLB on every tick.
    pub flush_tlb: bool,
    /// Extra fixed cycles per tick beyond the interrupt entry/exit cost.
    pub extra_cycles: Cycle,
}

impl Default for PollutionModel {
    fn default() -> Self {
        PollutionModel {
            flush_tlb: true,
            extra_cycles: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchedulerConfig {
    /// Preemptive scheduling inserts a context switch every
    /// `context_switch_period_ticks` ticks.
    pub preemptive: bool,
    /// Timer frequency in Hz.
    pub tick_hz: u64,
    /// Core clock in Hz; together with tick_hz fixes the tick period in
    /// cycles.
    pub clock_hz: u64,
    /// Interrupt entry + handler + exit, charged to the frontend.
    pub interrupt_cycles: Cycle,
    /// Ticks between forced context switches when preemptive.
    pub context_switch_period_ticks: u64,
    pub pollution: PollutionModel,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            preemptive: false,
            tick_hz: 100,
            clock_hz: 50_000_000,
            interrupt_cycles: 20_000,
            context_switch_period_ticks: 1,
            pollution: PollutionModel::default(),
        }
    }
}

impl SchedulerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.tick_hz == 0 || self.clock_hz == 0 {
            return Err("tick_hz and clock_hz must be positive".into());
        }
        if self.clock_hz < self.tick_hz {
            return Err("clock must be at least as fast as the tick".into());
        }
        if self.preemptive && self.context_switch_period_ticks == 0 {
            return Err("context_switch_period_ticks must be positive".into());
        }
        Ok(())
    }

    /// Cycles between consecutive ticks.
    pub fn tick_period(&self) -> Cycle {
        self.clock_hz / self.tick_hz
    }

    /// Tick instants in [0, horizon): the k-th tick fires at
    /// floor(k * clock / tick) for k >= 1.
    pub fn ticks_before(&self, horizon: Cycle) -> Vec<Cycle> {
        let mut out = Vec::new();
        let mut k = 1u64;
        loop {
            let t = k * self.clock_hz / self.tick_hz;
            if t >= horizon {
                return out;
            }
            out.push(t);
            k += 1;
        }
    }

    /// First tick strictly after `now`.
    pub fn next_tick_after(&self, now: Cycle) -> Cycle {
        let mut k = now * self.tick_hz / self.clock_hz;
        loop {
            k += 1;
            let t = k * self.clock_hz / self.tick_hz;
            if t > now {
                return t;
            }
        }
    }
}

/// Process switch cost: scalar state, then the vector register file
/// streamed through the memory port, then CSR save/restore.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContextSwitchCost {
    pub scalar_cycles: Cycle,
    /// Full architectural vector register file in bytes (32 registers).
    pub vrf_bytes: u64,
    /// Port bandwidth used for the save; a restore costs the same again
    /// on the way back in.
    pub mem_bw_bytes_per_cycle: u64,
    pub csr_overhead_cycles: Cycle,
}

impl Default for ContextSwitchCost {
    fn default() -> Self {
        ContextSwitchCost {
            scalar_cycles: 1000,
            vrf_bytes: 8192,
            mem_bw_bytes_per_cycle: 8,
            csr_overhead_cycles: 152,
        }
    }
}

impl ContextSwitchCost {
    pub fn validate(&self) -> Result<(), String> {
        if self.mem_bw_bytes_per_cycle == 0 {
            return Err("context switch bandwidth must be positive".into());
        }
        Ok(())
    }

    /// Save plus restore of the vector register file.
    pub fn vrf_cycles(&self) -> Cycle {
        2 * self.vrf_bytes.div_ceil(self.mem_bw_bytes_per_cycle)
    }

    /// Switch cost for a process with live vector state.
    pub fn vector_process_cycles(&self) -> Cycle {
        self.scalar_cycles + self.vrf_cycles() + self.csr_overhead_cycles
    }

    /// Switch cost when no vector state is live.
    pub fn scalar_process_cycles(&self) -> Cycle {
        self.scalar_cycles
    }
}

/// Demand-paging service parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FaultServiceParams {
    /// Handler cost per serviced fault: trap entry, page allocation,
    /// table update, return.
    pub service_cycles: Cycle,
    /// Fault replays allowed per (instruction, element) before the run
    /// aborts as livelocked.
    pub retry_bound: u32,
}

impl Default for FaultServiceParams {
    fn default() -> Self {
        FaultServiceParams {
            service_cycles: 5000,
            retry_bound: 3,
        }
    }
}

/// OS activity attributable to a run, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OsCounters {
    pub timer_ticks: u64,
    pub context_switches: u64,
    pub page_faults_serviced: u64,
    /// Cycles of interrupt entry/exit and handler bodies.
    pub direct_tick_cycles: Cycle,
    /// Extra TLB re-fill cycles caused by tick-driven flushes: misses on
    /// pages that were resident when the flush hit.
    pub pollution_cycles: Cycle,
    pub context_switch_cycles: Cycle,
    pub fault_service_cycles: Cycle,
}
