//! Fully associative TLB with tree pseudo-LRU replacement.
//!
//! The tree policy keeps `num_entries - 1` bits in heap order; a bit of 0
//! points at the left subtree as the colder half. Touching a way flips
//! every bit on its root path to point away from it. A `TrueLru` policy
//! (exact timestamps) exists for monotonicity experiments and as a
//! reference point; it is not the hardware default.

use crate::addressing::PagePerms;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TlbError {
    #[error("num_entries must be a power of two in [2, 128], got {0}")]
    BadSize(u32),
    #[error("insert of vpn {0:#x} which is already resident")]
    DuplicateVpn(u64),
    #[error("entry field out of range: vpn {vpn:#x} (27 bits) / ppn {ppn:#x} (44 bits)")]
    FieldRange { vpn: u64, ppn: u64 },
    #[error("insert of an invalid entry")]
    InvalidEntry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplacementPolicy {
    Plru,
    TrueLru,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TlbConfig {
    pub num_entries: u32,
    pub policy: ReplacementPolicy,
}

impl Default for TlbConfig {
    fn default() -> Self {
        TlbConfig {
            num_entries: 16,
            policy: ReplacementPolicy::Plru,
        }
    }
}

impl TlbConfig {
    pub fn validate(&self) -> Result<(), TlbError> {
        let n = self.num_entries;
        if n < 2 || n > 128 || !n.is_power_of_two() {
            return Err(TlbError::BadSize(n));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TlbEntry {
    pub vpn: u64,
    pub ppn: u64,
    pub perms: PagePerms,
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TlbStats {
    pub lookups: u64,
    pub hits: u64,
    pub misses: u64,
    pub evictions: u64,
}

#[derive(Clone)]
pub struct TlbState {
    config: TlbConfig,
    ways: Vec<Option<TlbEntry>>,
    /// Heap-ordered tree bits; false points left. Unused under TrueLru.
    plru_bits: Vec<bool>,
    /// Last-touch stamps for TrueLru. Unused under Plru.
    stamps: Vec<u64>,
    clock: u64,
    /// vpn -> way, kept in sync with `ways` for O(1) lookup.
    index: HashMap<u64, usize>,
    stats: TlbStats,
}

impl TlbState {
    pub fn new(config: TlbConfig) -> Result<TlbState, TlbError> {
        config.validate()?;
        let n = config.num_entries as usize;
        Ok(TlbState {
            config,
            ways: vec![None; n],
            plru_bits: vec![false; n - 1],
            stamps: vec![0; n],
            clock: 0,
            index: HashMap::new(),
            stats: TlbStats::default(),
        })
    }

    pub fn config(&self) -> TlbConfig {
        self.config
    }

    pub fn stats(&self) -> TlbStats {
        self.stats
    }

    pub fn plru_bits(&self) -> &[bool] {
        &self.plru_bits
    }

    pub fn occupancy(&self) -> usize {
        self.index.len()
    }

    /// Currently resident vpns, ascending. Used for flush-pollution
    /// attribution snapshots.
    pub fn resident_vpns(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.index.keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// Associative probe. Hits touch the replacement state and count as a
    /// hit; misses only count.
    pub fn lookup(&mut self, vpn: u64) -> Option<TlbEntry> {
        self.stats.lookups += 1;
        match self.index.get(&vpn).copied() {
            Some(way) => {
                self.stats.hits += 1;
                self.touch(way);
                self.ways[way]
            }
            None => {
                self.stats.misses += 1;
                None
            }
        }
    }

    /// Refill. Picks the lowest-index free way if any, otherwise evicts the
    /// policy victim and returns it. Re-inserting a resident vpn is a
    /// caller contract violation.
    pub fn insert(&mut self, entry: TlbEntry) -> Result<Option<TlbEntry>, TlbError> {
        if !entry.valid {
            return Err(TlbError::InvalidEntry);
        }
        if entry.vpn >= (1 << 27) || entry.ppn >= (1 << 44) {
            return Err(TlbError::FieldRange {
                vpn: entry.vpn,
                ppn: entry.ppn,
            });
        }
        if self.index.contains_key(&entry.vpn) {
            return Err(TlbError::DuplicateVpn(entry.vpn));
        }

        let (way, evicted) = match self.ways.iter().position(|w| w.is_none()) {
            Some(free) => (free, None),
            None => {
                let victim = self.victim_way();
                let old = self.ways[victim].take().expect("victim way is occupied");
                self.index.remove(&old.vpn);
                self.stats.evictions += 1;
                (victim, Some(old))
            }
        };
        self.ways[way] = Some(entry);
        self.index.insert(entry.vpn, way);
        self.touch(way);
        Ok(evicted)
    }

    /// Full flush: every way invalid, replacement state reset, statistics
    /// preserved.
    pub fn invalidate_all(&mut self) {
        for w in &mut self.ways {
            *w = None;
        }
        self.index.clear();
        self.plru_bits.fill(false);
        self.stamps.fill(0);
        self.clock = 0;
    }

    fn touch(&mut self, way: usize) {
        match self.config.policy {
            ReplacementPolicy::Plru => {
                let n = self.ways.len();
                let (mut lo, mut hi) = (0usize, n);
                let mut node = 0usize;
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if way < mid {
                        self.plru_bits[node] = true; // colder half is now the right
                        node = 2 * node + 1;
                        hi = mid;
                    } else {
                        self.plru_bits[node] = false;
                        node = 2 * node + 2;
                        lo = mid;
                    }
                }
            }
            ReplacementPolicy::TrueLru => {
                self.clock += 1;
                self.stamps[way] = self.clock;
            }
        }
    }

    fn victim_way(&self) -> usize {
        match self.config.policy {
            ReplacementPolicy::Plru => {
                let n = self.ways.len();
                let mut node = 0usize;
                while node < n - 1 {
                    node = 2 * node + 1 + usize::from(self.plru_bits[node]);
                }
                node - (n - 1)
            }
            ReplacementPolicy::TrueLru => {
                let mut best = 0usize;
                for way in 1..self.ways.len() {
                    if self.stamps[way] < self.stamps[best] {
                        best = way;
                    }
                }
                best
            }
        }
    }
}
