use thiserror::Error;

/// Top-level failure modes of a simulation run.
///
/// `Config` maps to process exit code 2, the abort variants to exit code 3.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),

    /// A translation faulted on an address outside every workload region.
    /// The modeled OS would deliver SIGSEGV, so the run aborts.
    #[error("segmentation fault: access to unmapped address {vaddr:#x} outside the workload footprint")]
    SegmentationFault { vaddr: u64 },

    /// The same instruction faulted at the same element repeatedly with no
    /// intervening mapping change.
    #[error("livelock: instruction {instr} faulted {attempts} times at element {element} with no forward progress")]
    Livelock {
        instr: u64,
        element: u32,
        attempts: u32,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl SimError {
    pub fn config(msg: impl Into<String>) -> Self {
        SimError::Config(msg.into())
    }

    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for simulation aborts, 1 for i/o failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 2,
            SimError::SegmentationFault { .. } | SimError::Livelock { .. } => 3,
            SimError::Io { .. } => 1,
        }
    }
}
