//! Config file loading. The file is flat key/value pairs under section
//! headers (TOML); every `SimConfig` field is addressable and anything
//! omitted keeps its default, so partial files work. CLI flags are
//! applied by the caller after loading and therefore override the file.

use super::SimConfig;
use crate::SimError;
use std::path::Path;

pub fn load_config(path: &Path) -> Result<SimConfig, SimError> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let cfg: SimConfig = toml::from_str(&text)
        .map_err(|e| SimError::config(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::RunMode;
    use crate::tlb::ReplacementPolicy;
    use crate::workloads::KernelSpec;
    use std::io::Write;

    fn load_str(text: &str) -> Result<SimConfig, SimError> {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        load_config(f.path())
    }

    #[test]
    fn empty_file_yields_defaults() {
        assert_eq!(load_str("").unwrap(), SimConfig::default());
    }

    #[test]
    fn sections_override_individual_fields() {
        let cfg = load_str(
            r#"
seed = 99
mode = "vm"
demand_paging = true
arbiter_tie_break = "vector"

[kernel]
name = "matmul"
n = 128

[tlb]
num_entries = 64
policy = "true_lru"

[mmu]
ptw_mem_access_cycles = 25

[core]
lanes = 4

[scheduler]
preemptive = true
tick_hz = 200

[scheduler.pollution]
flush_tlb = false

[context_switch]
scalar_cycles = 900

[fault]
service_cycles = 4000

[cache]
index_bits = 10
sets = 1024
"#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 99);
        assert!(cfg.demand_paging);
        assert_eq!(cfg.kernel, KernelSpec::Matmul { n: 128 });
        assert_eq!(cfg.tlb.num_entries, 64);
        assert_eq!(cfg.tlb.policy, ReplacementPolicy::TrueLru);
        assert_eq!(cfg.mmu.ptw_mem_access_cycles, 25);
        assert_eq!(cfg.mmu.tlb_hit_cycles, 1, "unset fields keep defaults");
        assert_eq!(cfg.core.lanes, 4);
        assert!(cfg.scheduler.preemptive);
        assert_eq!(cfg.scheduler.tick_hz, 200);
        assert!(!cfg.scheduler.pollution.flush_tlb);
        assert_eq!(cfg.context_switch.scalar_cycles, 900);
        assert_eq!(cfg.fault.service_cycles, 4000);
        assert_eq!(cfg.cache.sets, 1024);
        assert_eq!(cfg.mode, RunMode::VirtualMemory);
    }

    #[test]
    fn invalid_combinations_are_rejected_at_load() {
        let err = load_str("mode = \"bm\"\n[scheduler]\npreemptive = true\n").unwrap_err();
        assert!(matches!(err, SimError::Config(_)));
        let err = load_str("[tlb]\nnum_entries = 3\n").unwrap_err();
        assert!(matches!(err, SimError::Config(_)));
    }

    #[test]
    fn unknown_file_reports_io_error_with_path() {
        let err = load_config(Path::new("/nonexistent/vvmsim.toml")).unwrap_err();
        match err {
            SimError::Io { path, .. } => assert!(path.contains("vvmsim.toml")),
            other => panic!("expected I/O error, got {other:?}"),
        }
    }

    #[test]
    fn shipped_default_config_is_exactly_the_defaults() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
        let cfg = load_config(&path).unwrap();
        assert_eq!(
            cfg,
            SimConfig::default(),
            "configs/default.toml must spell out the built-in defaults verbatim"
        );
    }

    #[test]
    fn gather_kernel_parses_from_file() {
        let cfg = load_str("[kernel]\nname = \"indexed_gather\"\nrows = 600\nnnz_per_row = 21\n")
            .unwrap();
        assert_eq!(
            cfg.kernel,
            KernelSpec::IndexedGather {
                rows: 600,
                nnz_per_row: 21
            }
        );
    }
}
