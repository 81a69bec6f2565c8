//! Sv39 address types and a three-level software page table.
//!
//! Virtual addresses are 39 bits significant (9+9+9 VPN bits, 12 offset
//! bits) with bits 63..39 equal to bit 38. Physical addresses are at most
//! 56 bits. The walk descends root -> level 2 -> level 1 -> level 0; only
//! 4 KiB leaf pages are supported.

use serde::{Deserialize, Serialize};

pub const PAGE_SHIFT: u32 = 12;
pub const PAGE_SIZE: u64 = 1 << PAGE_SHIFT;
pub const PAGE_OFFSET_MASK: u64 = PAGE_SIZE - 1;

/// Page-table levels walked for a 4 KiB leaf.
pub const WALK_LEVELS: u32 = 3;

const VPN_BITS: u32 = 9;
const VPN_MASK: u64 = (1 << VPN_BITS) - 1;
const VA_SIG_BITS: u32 = 39;
const PA_BITS: u32 = 56;
const PPN_BITS: u32 = 44;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AddressError {
    #[error("non-canonical virtual address {0:#x}: bits 63..39 must replicate bit 38")]
    NonCanonical(u64),
    #[error("physical address {0:#x} exceeds 56 bits")]
    PhysicalTooWide(u64),
    #[error("address {0:#x} is not page-aligned")]
    Unaligned(u64),
    #[error("page permissions {0:?} are invalid: a leaf needs R or X, and W requires R")]
    BadPermissions(PagePerms),
    #[error("ppn {0:#x} exceeds 44 bits")]
    PpnTooWide(u64),
}

/// Canonical Sv39 virtual address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VirtAddr(u64);

impl VirtAddr {
    pub fn new(raw: u64) -> Result<Self, AddressError> {
        if is_canonical(raw) {
            Ok(VirtAddr(raw))
        } else {
            Err(AddressError::NonCanonical(raw))
        }
    }

    pub fn val(self) -> u64 {
        self.0
    }

    pub fn page_offset(self) -> u64 {
        self.0 & PAGE_OFFSET_MASK
    }

    /// Concatenated 27-bit virtual page number.
    pub fn vpn(self) -> u64 {
        (self.0 >> PAGE_SHIFT) & ((1 << (3 * VPN_BITS)) - 1)
    }

    pub fn page_base(self) -> VirtAddr {
        VirtAddr(self.0 & !PAGE_OFFSET_MASK)
    }
}

impl std::fmt::Display for VirtAddr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// Physical address, at most 56 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhysAddr(u64);

impl PhysAddr {
    pub fn new(raw: u64) -> Result<Self, AddressError> {
        if raw < (1 << PA_BITS) {
            Ok(PhysAddr(raw))
        } else {
            Err(AddressError::PhysicalTooWide(raw))
        }
    }

    pub fn val(self) -> u64 {
        self.0
    }

    pub fn page_offset(self) -> u64 {
        self.0 & PAGE_OFFSET_MASK
    }

    pub fn ppn(self) -> u64 {
        self.0 >> PAGE_SHIFT
    }
}

fn is_canonical(raw: u64) -> bool {
    // Sign-extend from bit 38 and compare.
    let shift = 64 - VA_SIG_BITS;
    (((raw as i64) << shift) >> shift) as u64 == raw
}

/// Splits a virtual address into (vpn2, vpn1, vpn0, offset).
pub fn split_vaddr(va: VirtAddr) -> (u64, u64, u64, u64) {
    let raw = va.val();
    (
        (raw >> (PAGE_SHIFT + 2 * VPN_BITS)) & VPN_MASK,
        (raw >> (PAGE_SHIFT + VPN_BITS)) & VPN_MASK,
        (raw >> PAGE_SHIFT) & VPN_MASK,
        raw & PAGE_OFFSET_MASK,
    )
}

/// Leaf permission set. `write` implies `read`; a leaf must be readable or
/// executable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PagePerms {
    pub read: bool,
    pub write: bool,
    pub execute: bool,
    pub user: bool,
}

impl PagePerms {
    pub const RW: PagePerms = PagePerms {
        read: true,
        write: true,
        execute: false,
        user: true,
    };
    pub const RO: PagePerms = PagePerms {
        read: true,
        write: false,
        execute: false,
        user: true,
    };

    pub fn valid_for_leaf(self) -> bool {
        (!self.write || self.read) && (self.read || self.execute)
    }
}

/// One page-table slot. A valid entry with no permission bits is a pointer
/// to the next level, with `ppn` holding the child table id. A valid entry
/// with R or X set is a leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PageTableEntry {
    pub valid: bool,
    pub perms: PagePerms,
    pub accessed: bool,
    pub dirty: bool,
    pub ppn: u64,
}

impl PageTableEntry {
    pub const INVALID: PageTableEntry = PageTableEntry {
        valid: false,
        perms: PagePerms {
            read: false,
            write: false,
            execute: false,
            user: false,
        },
        accessed: false,
        dirty: false,
        ppn: 0,
    };

    pub fn is_leaf(&self) -> bool {
        self.valid && (self.perms.read || self.perms.execute)
    }

    pub fn is_pointer(&self) -> bool {
        self.valid && !self.perms.read && !self.perms.write && !self.perms.execute
    }
}

/// Identifies a page table for satp validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PageTableId(pub u32);

const SLOTS: usize = 1 << VPN_BITS;

#[derive(Clone)]
struct Table(Box<[PageTableEntry; SLOTS]>);

impl Table {
    fn new() -> Table {
        Table(Box::new([PageTableEntry::INVALID; SLOTS]))
    }
}

/// Three-level radix page table with value semantics. Each simulation owns
/// its own instance; clones never share state.
#[derive(Clone)]
pub struct PageTable {
    id: PageTableId,
    root: usize,
    tables: Vec<Table>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccessKind {
    Load,
    Store,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestSource {
    Scalar,
    Vector,
}

/// What a translation is for: permission checks depend on `kind`, fault
/// attribution and arbitration on `source`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AccessDescriptor {
    pub kind: AccessKind,
    pub source: RequestSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaultCause {
    LoadPageFault,
    StorePageFault,
}

impl FaultCause {
    pub fn for_access(kind: AccessKind) -> FaultCause {
        match kind {
            AccessKind::Load => FaultCause::LoadPageFault,
            AccessKind::Store => FaultCause::StorePageFault,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslationOutcome {
    Ok {
        paddr: PhysAddr,
        perms: PagePerms,
    },
    Fault {
        cause: FaultCause,
        vaddr: VirtAddr,
    },
}

impl TranslationOutcome {
    pub fn is_fault(&self) -> bool {
        matches!(self, TranslationOutcome::Fault { .. })
    }

    pub fn paddr(&self) -> Option<PhysAddr> {
        match self {
            TranslationOutcome::Ok { paddr, .. } => Some(*paddr),
            TranslationOutcome::Fault { .. } => None,
        }
    }
}

/// Result of a radix descent: the outcome plus how many table accesses the
/// walker performed (1..=3), which drives the walk latency model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkResult {
    pub outcome: TranslationOutcome,
    pub levels_visited: u32,
}

impl PageTable {
    pub fn new(id: PageTableId) -> PageTable {
        PageTable {
            id,
            root: 0,
            tables: vec![Table::new()],
        }
    }

    pub fn id(&self) -> PageTableId {
        self.id
    }

    /// Installs or replaces the leaf mapping va -> pa. Both addresses must
    /// be page-aligned; intermediate tables are created on demand.
    pub fn map_page(
        &mut self,
        va: VirtAddr,
        pa: PhysAddr,
        perms: PagePerms,
    ) -> Result<(), AddressError> {
        if va.page_offset() != 0 {
            return Err(AddressError::Unaligned(va.val()));
        }
        if pa.page_offset() != 0 {
            return Err(AddressError::Unaligned(pa.val()));
        }
        if !perms.valid_for_leaf() {
            return Err(AddressError::BadPermissions(perms));
        }
        if pa.ppn() >= (1 << PPN_BITS) {
            return Err(AddressError::PpnTooWide(pa.ppn()));
        }

        let (vpn2, vpn1, vpn0, _) = split_vaddr(va);
        let l1 = self.child_or_create(self.root, vpn2 as usize)?;
        let l0 = self.child_or_create(l1, vpn1 as usize)?;
        self.tables[l0].0[vpn0 as usize] = PageTableEntry {
            valid: true,
            perms,
            accessed: false,
            dirty: false,
            ppn: pa.ppn(),
        };
        Ok(())
    }

    fn child_or_create(&mut self, table: usize, slot: usize) -> Result<usize, AddressError> {
        let entry = self.tables[table].0[slot];
        if entry.is_pointer() {
            return Ok(entry.ppn as usize);
        }
        // Invalid or previously-leaf slot: allocate a fresh child table.
        let child = self.tables.len();
        self.tables.push(Table::new());
        self.tables[table].0[slot] = PageTableEntry {
            valid: true,
            perms: PagePerms {
                read: false,
                write: false,
                execute: false,
                user: false,
            },
            accessed: false,
            dirty: false,
            ppn: child as u64,
        };
        Ok(child)
    }

    /// Radix descent for one access. Mutates nothing except the Accessed
    /// and Dirty bits of the leaf, which are set eagerly (hardware-update
    /// style): A on any successful access, D additionally on stores.
    pub fn walk(&mut self, va: VirtAddr, access: AccessDescriptor) -> WalkResult {
        let (vpn2, vpn1, vpn0, offset) = split_vaddr(va);
        let fault = |levels| WalkResult {
            outcome: TranslationOutcome::Fault {
                cause: FaultCause::for_access(access.kind),
                vaddr: va,
            },
            levels_visited: levels,
        };

        let e2 = self.tables[self.root].0[vpn2 as usize];
        if !e2.is_pointer() {
            // Leaves above level 0 (superpages) are never created here and
            // fault if encountered.
            return fault(1);
        }
        let e1 = self.tables[e2.ppn as usize].0[vpn1 as usize];
        if !e1.is_pointer() {
            return fault(2);
        }
        let leaf_table = e1.ppn as usize;
        let leaf = &mut self.tables[leaf_table].0[vpn0 as usize];
        if !leaf.is_leaf() {
            return fault(3);
        }
        let allowed = match access.kind {
            AccessKind::Load => leaf.perms.read,
            AccessKind::Store => leaf.perms.write,
        };
        if !allowed {
            return fault(3);
        }
        leaf.accessed = true;
        if access.kind == AccessKind::Store {
            leaf.dirty = true;
        }
        let paddr = PhysAddr((leaf.ppn << PAGE_SHIFT) | offset);
        WalkResult {
            outcome: TranslationOutcome::Ok {
                paddr,
                perms: leaf.perms,
            },
            levels_visited: WALK_LEVELS,
        }
    }

    /// Leaf lookup without timing or A/D side effects; used by tests and
    /// the fault-service path to inspect current mappings.
    pub fn leaf(&self, va: VirtAddr) -> Option<PageTableEntry> {
        let (vpn2, vpn1, vpn0, _) = split_vaddr(va);
        let e2 = self.tables[self.root].0[vpn2 as usize];
        if !e2.is_pointer() {
            return None;
        }
        let e1 = self.tables[e2.ppn as usize].0[vpn1 as usize];
        if !e1.is_pointer() {
            return None;
        }
        let leaf = self.tables[e1.ppn as usize].0[vpn0 as usize];
        leaf.is_leaf().then_some(leaf)
    }
}
