//! vvmsim: a deterministic, cycle-approximate simulator of a decoupled
//! vector accelerator that shares its host scalar core's MMU.
//!
//! The model covers the virtual-memory datapath of such a system:
//! page-bounded burst generation for vector memory operations, a shared
//! TLB-fronted translation path with a non-preemptive arbiter between the
//! scalar and vector requesters, precise vector page faults with
//! flush-and-resume semantics, and a small OS cost model (timer ticks,
//! context switches, page-fault service).
//!
//! Simulations are pure integer-cycle computations: the same configuration
//! always produces bit-identical reports.

pub mod addressing;
pub mod driver;
pub mod mmu;
pub mod os_model;
pub mod tlb;
pub mod vector_core;
pub mod vlsu;
pub mod workloads;

mod error;

pub use error::SimError;

/// Simulation timestamps are plain cycle counts.
pub type Cycle = u64;
