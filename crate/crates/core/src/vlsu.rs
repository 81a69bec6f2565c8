//! Vector load/store address generation.
//!
//! Unit-stride operations move through memory as bursts that never cross a
//! 4 KiB page, so one translation covers one burst. Strided and indexed
//! operations translate every element individually. A translation fault
//! stops address generation at the faulting element: no later requests are
//! issued, and earlier bursts stay committed.

use crate::addressing::{
    AccessKind, FaultCause, PhysAddr, TranslationOutcome, VirtAddr, PAGE_SIZE,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VlsuError {
    #[error("element width {0} is not one of 1/2/4/8")]
    BadElementWidth(u32),
    #[error("vstart {vstart} exceeds vl {vl}")]
    VstartPastEnd { vstart: u32, vl: u32 },
    #[error("base {0:#x} is not aligned to the element width")]
    MisalignedBase(u64),
    #[error("stride {0} is not a multiple of the element width")]
    MisalignedStride(i64),
    #[error("indexed op needs exactly vl offsets, got {got} for vl {vl}")]
    OffsetCount { got: usize, vl: u32 },
    #[error("offset {0:#x} is not aligned to the element width")]
    MisalignedOffset(u64),
    #[error("vl {vl} exceeds register capacity {cap} for element width {ew}")]
    VlTooLong { vl: u32, cap: u32, ew: u32 },
    #[error("cache index_bits {0} exceeds 12")]
    IndexBitsTooWide(u32),
    #[error("cache geometry inconsistent: sets {sets} != 2^index_bits {index_bits}")]
    GeometryMismatch { sets: u32, index_bits: u32 },
    #[error("line_bytes {0} is not a power of two")]
    BadLineBytes(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AccessPattern {
    UnitStride,
    Strided { stride: i64 },
    Indexed { offsets: Vec<u64> },
}

/// One decoded vector memory operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorMemOp {
    pub pattern: AccessPattern,
    pub base: VirtAddr,
    pub element_width: u32,
    pub vl: u32,
    pub vstart: u32,
    pub is_store: bool,
}

impl VectorMemOp {
    pub fn new(
        pattern: AccessPattern,
        base: VirtAddr,
        element_width: u32,
        vl: u32,
        vstart: u32,
        is_store: bool,
    ) -> Result<VectorMemOp, VlsuError> {
        if !matches!(element_width, 1 | 2 | 4 | 8) {
            return Err(VlsuError::BadElementWidth(element_width));
        }
        if vstart > vl {
            return Err(VlsuError::VstartPastEnd { vstart, vl });
        }
        if base.val() % element_width as u64 != 0 {
            return Err(VlsuError::MisalignedBase(base.val()));
        }
        match &pattern {
            AccessPattern::UnitStride => {}
            AccessPattern::Strided { stride } => {
                if stride % element_width as i64 != 0 {
                    return Err(VlsuError::MisalignedStride(*stride));
                }
            }
            AccessPattern::Indexed { offsets } => {
                if offsets.len() != vl as usize {
                    return Err(VlsuError::OffsetCount {
                        got: offsets.len(),
                        vl,
                    });
                }
                if let Some(bad) = offsets.iter().find(|o| **o % element_width as u64 != 0) {
                    return Err(VlsuError::MisalignedOffset(*bad));
                }
            }
        }
        Ok(VectorMemOp {
            pattern,
            base,
            element_width,
            vl,
            vstart,
            is_store,
        })
    }

    pub fn access_kind(&self) -> AccessKind {
        if self.is_store {
            AccessKind::Store
        } else {
            AccessKind::Load
        }
    }

    /// Register-capacity check against a VLEN in bits; separate from
    /// construction because synthetic ops wider than one register are
    /// useful for exercising burst decomposition on its own.
    pub fn validate_vlen(&self, vlen_bits: u32) -> Result<(), VlsuError> {
        let cap = vlen_bits / (8 * self.element_width);
        if self.vl > cap {
            return Err(VlsuError::VlTooLong {
                vl: self.vl,
                cap,
                ew: self.element_width,
            });
        }
        Ok(())
    }

    pub fn element_vaddr(&self, element: u32) -> Option<VirtAddr> {
        let raw = match &self.pattern {
            AccessPattern::UnitStride => self
                .base
                .val()
                .checked_add(element as u64 * self.element_width as u64)?,
            AccessPattern::Strided { stride } => {
                let delta = (element as i64).checked_mul(*stride)?;
                self.base.val().checked_add_signed(delta)?
            }
            AccessPattern::Indexed { offsets } => self
                .base
                .val()
                .checked_add(offsets[element as usize])?,
        };
        VirtAddr::new(raw).ok()
    }
}

/// Contiguous page-bounded span of one operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Burst {
    pub start_vaddr: VirtAddr,
    pub length_bytes: u64,
    pub first_element: u32,
    pub element_count: u32,
}

impl Burst {
    pub fn end_vaddr(&self) -> u64 {
        self.start_vaddr.val() + self.length_bytes
    }
}

/// Burst plus its translated physical base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslatedBurst {
    pub burst: Burst,
    pub paddr: PhysAddr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddrGenFault {
    pub element: u32,
    pub cause: FaultCause,
    pub vaddr: VirtAddr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddrGenOutcome {
    pub translated: Vec<TranslatedBurst>,
    pub translations_issued: u32,
    pub fault: Option<AddrGenFault>,
}

/// Cuts elements [vstart, vl) of a unit-stride op at 4 KiB boundaries.
pub fn split_bursts(op: &VectorMemOp) -> Vec<Burst> {
    assert!(
        matches!(op.pattern, AccessPattern::UnitStride),
        "split_bursts is defined for unit-stride operations"
    );
    let ew = op.element_width as u64;
    let mut bursts = Vec::new();
    let mut element = op.vstart;
    let mut cursor = op.base.val() + op.vstart as u64 * ew;
    let end = op.base.val() + op.vl as u64 * ew;
    while cursor < end {
        let page_end = (cursor & !(PAGE_SIZE - 1)) + PAGE_SIZE;
        let burst_end = page_end.min(end);
        let length = burst_end - cursor;
        debug_assert_eq!(length % ew, 0, "elements never straddle a page");
        let count = (length / ew) as u32;
        bursts.push(Burst {
            start_vaddr: VirtAddr::new(cursor).expect("canonical by construction"),
            length_bytes: length,
            first_element: element,
            element_count: count,
        });
        element += count;
        cursor = burst_end;
    }
    bursts
}

/// Runs address generation, issuing one translation per unit-stride burst
/// and one per element otherwise. `translate` is the path to the shared
/// MMU; timing is the caller's concern.
pub fn generate(
    op: &VectorMemOp,
    mut translate: impl FnMut(VirtAddr, AccessKind) -> TranslationOutcome,
) -> AddrGenOutcome {
    let kind = op.access_kind();
    let mut out = AddrGenOutcome {
        translated: Vec::new(),
        translations_issued: 0,
        fault: None,
    };

    match &op.pattern {
        AccessPattern::UnitStride => {
            for burst in split_bursts(op) {
                out.translations_issued += 1;
                match translate(burst.start_vaddr, kind) {
                    TranslationOutcome::Ok { paddr, .. } => {
                        out.translated.push(TranslatedBurst { burst, paddr });
                    }
                    TranslationOutcome::Fault { cause, vaddr } => {
                        // Fault granularity for unit-stride is the burst's
                        // first element.
                        out.fault = Some(AddrGenFault {
                            element: burst.first_element,
                            cause,
                            vaddr,
                        });
                        return out;
                    }
                }
            }
        }
        AccessPattern::Strided { .. } | AccessPattern::Indexed { .. } => {
            let ew = op.element_width as u64;
            for element in op.vstart..op.vl {
                let Some(vaddr) = op.element_vaddr(element) else {
                    // Address arithmetic left the canonical range; the
                    // access faults without reaching the MMU.
                    out.fault = Some(AddrGenFault {
                        element,
                        cause: FaultCause::for_access(kind),
                        vaddr: op.base,
                    });
                    return out;
                };
                out.translations_issued += 1;
                match translate(vaddr, kind) {
                    TranslationOutcome::Ok { paddr, .. } => {
                        out.translated.push(TranslatedBurst {
                            burst: Burst {
                                start_vaddr: vaddr,
                                length_bytes: ew,
                                first_element: element,
                                element_count: 1,
                            },
                            paddr,
                        });
                    }
                    TranslationOutcome::Fault { cause, vaddr } => {
                        out.fault = Some(AddrGenFault {
                            element,
                            cause,
                            vaddr,
                        });
                        return out;
                    }
                }
            }
        }
    }
    out
}

/// Physically indexed write-through cache geometry for the invalidation
/// filter in front of the scalar core's L1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheGeometry {
    pub sets: u32,
    pub index_bits: u32,
    pub line_bytes: u64,
}

impl Default for CacheGeometry {
    fn default() -> Self {
        CacheGeometry {
            sets: 2048,
            index_bits: 11,
            line_bytes: 16,
        }
    }
}

impl CacheGeometry {
    pub fn validate(&self) -> Result<(), VlsuError> {
        if self.index_bits > 12 {
            return Err(VlsuError::IndexBitsTooWide(self.index_bits));
        }
        if self.sets != 1 << self.index_bits {
            return Err(VlsuError::GeometryMismatch {
                sets: self.sets,
                index_bits: self.index_bits,
            });
        }
        if !self.line_bytes.is_power_of_two() {
            return Err(VlsuError::BadLineBytes(self.line_bytes));
        }
        Ok(())
    }
}

/// Cycles spent by the invalidation filter flushing every cache set a
/// store touches: `per_set_cycles` for each distinct physical set index
/// across all bursts of the operation.
pub fn invalidation_cost(
    bursts: &[TranslatedBurst],
    geom: &CacheGeometry,
    per_set_cycles: u64,
) -> u64 {
    let line_shift = geom.line_bytes.trailing_zeros();
    let set_mask = (geom.sets as u64) - 1;
    let mut touched = vec![false; geom.sets as usize];
    let mut distinct = 0u64;
    for tb in bursts {
        let start = tb.paddr.val() & !(geom.line_bytes - 1);
        let end = tb.paddr.val() + tb.burst.length_bytes;
        let mut line = start;
        while line < end {
            let set = ((line >> line_shift) & set_mask) as usize;
            if !touched[set] {
                touched[set] = true;
                distinct += 1;
            }
            line += geom.line_bytes;
        }
    }
    distinct * per_set_cycles
}
