//! Bare-metal vs. virtual-memory comparison and the TLB-size sweep.

use super::{engine, OverheadBreakdown, RunMode, RunReport, SimConfig};
use crate::workloads::KernelSpec;
use crate::SimError;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

/// Splits a virtual-memory run's slowdown over its baseline into the
/// serialized translation exposure of each requester; arbitration waits,
/// OS work, and attribution rounding land in `other`. Components are
/// percent of baseline cycles and sum to `total_pct` by construction.
pub fn overhead(vm: &RunReport, bm: &RunReport) -> Result<OverheadBreakdown, SimError> {
    if vm.kernel != bm.kernel || vm.n != bm.n {
        return Err(SimError::config(format!(
            "overhead comparison across different kernels: {} {} vs {} {}",
            vm.kernel, vm.n, bm.kernel, bm.n
        )));
    }
    if bm.total_cycles == 0 {
        return Err(SimError::config("baseline reports zero cycles"));
    }
    let base = bm.total_cycles as f64;
    let delta = vm.total_cycles as i128 - bm.total_cycles as i128;
    let (scalar_cycles, vector_cycles) = if delta <= 0 {
        (0, 0)
    } else {
        let delta = delta as u64;
        let s = vm.counters.exposed_scalar_mmu_cycles;
        let v = vm.counters.exposed_vector_mmu_cycles;
        let sum = s + v;
        if sum <= delta {
            (s, v)
        } else {
            // Exposure measured in-run can slightly exceed the end-to-end
            // delta when stalls partially coincide with slack the
            // baseline also had; scale both buckets down to fit.
            (s * delta / sum, v * delta / sum)
        }
    };
    let cva6_mmu_pct = scalar_cycles as f64 / base * 100.0;
    let ara_mmu_pct = vector_cycles as f64 / base * 100.0;
    let other_cycles = delta - scalar_cycles as i128 - vector_cycles as i128;
    let other_pct = other_cycles as f64 / base * 100.0;
    Ok(OverheadBreakdown {
        total_pct: cva6_mmu_pct + ara_mmu_pct + other_pct,
        cva6_mmu_pct,
        ara_mmu_pct,
        other_pct,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kernels: Vec<KernelSpec>,
    pub tlb_sizes: Vec<usize>,
    /// Extra verification runs per cell; each must reproduce the first
    /// bit for bit.
    pub repetitions: u32,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            kernels: vec![
                KernelSpec::Matmul { n: 32 },
                KernelSpec::Matmul { n: 64 },
                KernelSpec::Matmul { n: 128 },
            ],
            tlb_sizes: vec![2, 4, 8, 16, 32, 64, 128],
            repetitions: 1,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.kernels.is_empty() || self.tlb_sizes.is_empty() {
            return Err(SimError::config("sweep needs kernels and TLB sizes"));
        }
        for &s in &self.tlb_sizes {
            if !s.is_power_of_two() || !(2..=128).contains(&s) {
                return Err(SimError::config(format!(
                    "TLB size {s} must be a power of two in [2, 128]"
                )));
            }
        }
        if self.repetitions == 0 {
            return Err(SimError::config("repetitions must be at least 1"));
        }
        for k in &self.kernels {
            k.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub kernel: KernelSpec,
    pub tlb_entries: usize,
    pub breakdown: OverheadBreakdown,
    pub total_cycles: u64,
    pub baseline_cycles: u64,
}

fn cell_config(base: &SimConfig, kernel: KernelSpec, tlb_entries: usize) -> SimConfig {
    let mut cfg = base.clone();
    cfg.kernel = kernel;
    cfg.mode = RunMode::VirtualMemory;
    cfg.tlb.num_entries = tlb_entries as u32;
    cfg
}

fn run_checked(cfg: &SimConfig, repetitions: u32) -> Result<RunReport, SimError> {
    let first = engine::run(cfg)?;
    for _ in 1..repetitions {
        let again = engine::run(cfg)?;
        if again != first {
            return Err(SimError::config(format!(
                "nondeterministic run detected for kernel {} tlb {}",
                cfg.kernel, cfg.tlb.num_entries
            )));
        }
    }
    Ok(first)
}

/// Runs the full (kernel × TLB size) grid against one bare-metal
/// baseline per kernel. Rows come back in spec order — kernels outer,
/// sizes inner — regardless of how the cells were scheduled.
pub fn sweep(spec: &SweepSpec, base: &SimConfig) -> Result<Vec<SweepRow>, SimError> {
    spec.validate()?;
    base.validate()?;
    if base.scheduler.preemptive {
        return Err(SimError::config(
            "sweeps compare non-preemptive runs; disable scheduler.preemptive",
        ));
    }

    let baselines: Vec<RunReport> = map_runs(&spec.kernels, |&kernel| {
        let mut cfg = base.clone().baseline();
        cfg.kernel = kernel;
        run_checked(&cfg, spec.repetitions)
    })?;

    let cells: Vec<(usize, KernelSpec, usize)> = spec
        .kernels
        .iter()
        .enumerate()
        .flat_map(|(ki, &k)| spec.tlb_sizes.iter().map(move |&s| (ki, k, s)))
        .collect();
    let reports: Vec<RunReport> = map_runs(&cells, |&(_, kernel, size)| {
        run_checked(&cell_config(base, kernel, size), spec.repetitions)
    })?;

    cells
        .iter()
        .zip(reports)
        .map(|(&(ki, kernel, size), vm)| {
            let bm = &baselines[ki];
            Ok(SweepRow {
                kernel,
                tlb_entries: size,
                breakdown: overhead(&vm, bm)?,
                total_cycles: vm.total_cycles,
                baseline_cycles: bm.total_cycles,
            })
        })
        .collect()
}

/// Runs independent simulations over a slice, in parallel when the
/// `parallel` feature is on; results keep input order either way.
#[cfg(feature = "parallel")]
fn map_runs<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> Result<R, SimError> + Sync + Send,
) -> Result<Vec<R>, SimError> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_runs<T, R>(
    items: &[T],
    f: impl Fn(&T) -> Result<R, SimError>,
) -> Result<Vec<R>, SimError> {
    items.iter().map(f).collect()
}
