//! Report emission: stable CSV columns for sweeps, key/value CSV for
//! single runs, and JSON mirroring the full report structure.

use super::{RunReport, SweepRow};
use std::fmt::Write as _;

pub const SWEEP_CSV_HEADER: &str =
    "kernel,n,tlb_entries,total_pct,cva6_mmu_pct,ara_mmu_pct,other_pct,total_cycles,baseline_cycles";

/// Sweep table as CSV with the documented column set. Percentages keep
/// six decimal places so emission is byte-stable.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{},{}",
            r.kernel.family(),
            r.kernel.size(),
            r.tlb_entries,
            r.breakdown.total_pct,
            r.breakdown.cva6_mmu_pct,
            r.breakdown.ara_mmu_pct,
            r.breakdown.other_pct,
            r.total_cycles,
            r.baseline_cycles
        )
        .expect("string writes cannot fail");
    }
    out
}

/// Single-run report as flat `key,value` CSV rows, counters included.
pub fn run_report_csv(r: &RunReport) -> String {
    let mut out = String::from("key,value\n");
    let mut kv = |k: &str, v: String| writeln!(out, "{k},{v}").expect("string write");
    kv("kernel", r.kernel.clone());
    kv("n", r.n.to_string());
    kv("mode", r.mode.clone());
    kv("tlb_entries", r.tlb_entries.to_string());
    kv("seed", r.seed.to_string());
    kv("total_cycles", r.total_cycles.to_string());
    let c = &r.counters;
    kv("scalar_mmu_stall_cycles", c.scalar_mmu_stall_cycles.to_string());
    kv("vector_mmu_stall_cycles", c.vector_mmu_stall_cycles.to_string());
    kv("arbiter_wait_cycles", c.arbiter_wait_cycles.to_string());
    kv("ptw_cycles", c.ptw_cycles.to_string());
    kv("scalar_tlb_hits", c.scalar_tlb_hits.to_string());
    kv("scalar_tlb_misses", c.scalar_tlb_misses.to_string());
    kv("vector_tlb_hits", c.vector_tlb_hits.to_string());
    kv("vector_tlb_misses", c.vector_tlb_misses.to_string());
    kv(
        "scalar_translation_requests",
        c.scalar_translation_requests.to_string(),
    );
    kv(
        "vector_translation_requests",
        c.vector_translation_requests.to_string(),
    );
    kv("hidden_stall_cycles", c.hidden_stall_cycles.to_string());
    kv(
        "exposed_scalar_mmu_cycles",
        c.exposed_scalar_mmu_cycles.to_string(),
    );
    kv(
        "exposed_vector_mmu_cycles",
        c.exposed_vector_mmu_cycles.to_string(),
    );
    kv("flush_events", c.flush_events.to_string());
    kv("invalidation_cycles", c.invalidation_cycles.to_string());
    kv("vector_instructions", c.vector_instructions.to_string());
    kv("scalar_accesses", c.scalar_accesses.to_string());
    kv("timer_ticks", c.os.timer_ticks.to_string());
    kv("context_switches", c.os.context_switches.to_string());
    kv("page_faults_serviced", c.os.page_faults_serviced.to_string());
    kv("direct_tick_cycles", c.os.direct_tick_cycles.to_string());
    kv("pollution_cycles", c.os.pollution_cycles.to_string());
    kv(
        "context_switch_cycles",
        c.os.context_switch_cycles.to_string(),
    );
    kv(
        "fault_service_cycles",
        c.os.fault_service_cycles.to_string(),
    );
    out
}

/// Full report as pretty JSON; field order is fixed by the structs, so
/// equal reports serialize to identical bytes.
pub fn run_report_json(r: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}
