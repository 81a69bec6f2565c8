//! Shared translation path: one TLB-fronted walker serving both the scalar
//! core and the vector unit through a non-preemptive arbiter.
//!
//! `translate` prices a single request: a hit costs `tlb_hit_cycles`, a
//! miss adds one `ptw_mem_access_cycles` charge per table level the walker
//! visits, and a faulting walk performs no refill. Queueing delay is the
//! arbiter's business and is accounted separately.

use crate::addressing::{
    AccessDescriptor, AccessKind, FaultCause, PageTable, PageTableId, PhysAddr, RequestSource,
    TranslationOutcome, VirtAddr,
};
use crate::tlb::{TlbEntry, TlbState};
use crate::Cycle;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MmuError {
    #[error("satp root {root:?} does not name the installed page table {actual:?}")]
    DanglingRoot {
        root: PageTableId,
        actual: PageTableId,
    },
    #[error("satp enabled without a page table")]
    NoPageTable,
    #[error(transparent)]
    Tlb(#[from] crate::tlb::TlbError),
}

/// Address-translation control state, satp-style.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SatpState {
    pub enabled: bool,
    pub root: PageTableId,
}

impl SatpState {
    pub fn bare() -> SatpState {
        SatpState {
            enabled: false,
            root: PageTableId(0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MmuLatencyParams {
    /// Cycles for the associative TLB probe; charged on hit and miss alike.
    pub tlb_hit_cycles: u64,
    /// Cycles per page-table level the walker touches on a miss.
    pub ptw_mem_access_cycles: u64,
}

impl Default for MmuLatencyParams {
    fn default() -> Self {
        MmuLatencyParams {
            tlb_hit_cycles: 1,
            ptw_mem_access_cycles: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MmuRequest {
    pub vaddr: VirtAddr,
    pub access: AccessDescriptor,
    pub issue_cycle: Cycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MmuResponse {
    pub outcome: TranslationOutcome,
    /// tlb probe + walk cycles; excludes arbitration wait.
    pub service_cycles: u64,
    pub tlb_hit: bool,
    pub ptw_cycles: u64,
}

const PA_MASK: u64 = (1 << 56) - 1;

/// Prices one translation request against the current TLB and page table.
///
/// With translation disabled the result is the identity mapping at zero
/// cost and the TLB is not consulted. Successful walks refill the TLB;
/// faulting walks do not.
pub fn translate(
    satp: &SatpState,
    tlb: &mut TlbState,
    pt: Option<&mut PageTable>,
    req: &MmuRequest,
    lat: &MmuLatencyParams,
) -> Result<MmuResponse, MmuError> {
    if !satp.enabled {
        let paddr = PhysAddr::new(req.vaddr.val() & PA_MASK).expect("masked to 56 bits");
        return Ok(MmuResponse {
            outcome: TranslationOutcome::Ok {
                paddr,
                perms: crate::addressing::PagePerms::RW,
            },
            service_cycles: 0,
            tlb_hit: false,
            ptw_cycles: 0,
        });
    }

    let pt = pt.ok_or(MmuError::NoPageTable)?;
    if pt.id() != satp.root {
        return Err(MmuError::DanglingRoot {
            root: satp.root,
            actual: pt.id(),
        });
    }

    let vpn = req.vaddr.vpn();
    if let Some(entry) = tlb.lookup(vpn) {
        let allowed = match req.access.kind {
            AccessKind::Load => entry.perms.read,
            AccessKind::Store => entry.perms.write,
        };
        let outcome = if allowed {
            TranslationOutcome::Ok {
                paddr: PhysAddr::new((entry.ppn << 12) | req.vaddr.page_offset())
                    .expect("ppn is 44 bits"),
                perms: entry.perms,
            }
        } else {
            TranslationOutcome::Fault {
                cause: FaultCause::for_access(req.access.kind),
                vaddr: req.vaddr,
            }
        };
        return Ok(MmuResponse {
            outcome,
            service_cycles: lat.tlb_hit_cycles,
            tlb_hit: true,
            ptw_cycles: 0,
        });
    }

    let walk = pt.walk(req.vaddr, req.access);
    let ptw_cycles = walk.levels_visited as u64 * lat.ptw_mem_access_cycles;
    if let TranslationOutcome::Ok { paddr, perms } = walk.outcome {
        tlb.insert(TlbEntry {
            vpn,
            ppn: paddr.ppn(),
            perms,
            valid: true,
        })?;
    }
    Ok(MmuResponse {
        outcome: walk.outcome,
        service_cycles: lat.tlb_hit_cycles + ptw_cycles,
        tlb_hit: false,
        ptw_cycles,
    })
}

/// Writes the translation control register. Any write invalidates the
/// whole TLB; enabling requires the named root to be the installed table.
pub fn set_satp(
    satp: &mut SatpState,
    tlb: &mut TlbState,
    new: SatpState,
    pt: Option<&PageTable>,
) -> Result<(), MmuError> {
    if new.enabled {
        match pt {
            None => return Err(MmuError::NoPageTable),
            Some(pt) if pt.id() != new.root => {
                return Err(MmuError::DanglingRoot {
                    root: new.root,
                    actual: pt.id(),
                })
            }
            Some(_) => {}
        }
    }
    *satp = new;
    tlb.invalidate_all();
    Ok(())
}

/// Non-preemptive single-requester arbiter. Whoever is granted keeps the
/// walker until its response; a requester arriving while the walker is
/// busy accumulates wait cycles. Simultaneous arrivals go to `tie_break`.
#[derive(Debug, Clone)]
pub struct MmuArbiter {
    pub tie_break: RequestSource,
    busy_until: Cycle,
    holder: Option<RequestSource>,
}

impl Default for MmuArbiter {
    fn default() -> Self {
        MmuArbiter::new(RequestSource::Scalar)
    }
}

impl MmuArbiter {
    pub fn new(tie_break: RequestSource) -> MmuArbiter {
        MmuArbiter {
            tie_break,
            busy_until: 0,
            holder: None,
        }
    }

    pub fn busy_until(&self) -> Cycle {
        self.busy_until
    }

    /// Picks the next requester to connect, given requests pending at the
    /// same decision point. `None` while the walker is still held.
    pub fn decide(
        &self,
        now: Cycle,
        pending_scalar: Option<&MmuRequest>,
        pending_vector: Option<&MmuRequest>,
    ) -> Option<RequestSource> {
        if now < self.busy_until {
            return None;
        }
        match (pending_scalar, pending_vector) {
            (None, None) => None,
            (Some(_), None) => Some(RequestSource::Scalar),
            (None, Some(_)) => Some(RequestSource::Vector),
            (Some(s), Some(v)) => {
                if s.issue_cycle < v.issue_cycle {
                    Some(RequestSource::Scalar)
                } else if v.issue_cycle < s.issue_cycle {
                    Some(RequestSource::Vector)
                } else {
                    Some(self.tie_break)
                }
            }
        }
    }

    /// Connects `source` as soon as the walker frees up at or after
    /// `ready`. Returns the grant cycle and the wait the requester ate.
    pub fn grant(&mut self, source: RequestSource, ready: Cycle) -> (Cycle, u64) {
        let start = ready.max(self.busy_until);
        self.holder = Some(source);
        (start, start - ready)
    }

    /// Marks the walker busy for `service` cycles starting at `start`.
    pub fn occupy(&mut self, start: Cycle, service: u64) {
        self.busy_until = start + service;
        if service == 0 {
            self.holder = None;
        }
    }
}
