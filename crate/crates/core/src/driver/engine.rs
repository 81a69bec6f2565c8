//! The run engine: an exact merge of the scalar frontend's instruction
//! stream with the vector unit's decoupled backend.
//!
//! Time advances per stream item, never per cycle. The frontend clock
//! moves through issue/dispatch costs; vector instructions retire on a
//! fixed-depth backend queue whose drain hides translation stalls. A
//! vector memory operation's translations (its address phase) are pumped
//! lazily: each scalar translation request first services every pending
//! vector request with an earlier issue time, and the phase drains fully
//! before the next vector dispatch — which is exact, because the frontend
//! is parked on the operation's answer at that point anyway.
//!
//! Ordering contract (fixes arbitration, and with it every counter): at
//! a given cycle, OS tick work precedes new translation requests, and
//! simultaneous scalar/vector requests go to the configured tie winner.

use crate::addressing::{
    AccessDescriptor, AccessKind, FaultCause, PagePerms, PageTable, PageTableId, PhysAddr,
    RequestSource, TranslationOutcome, VirtAddr,
};
use crate::mmu::{self, MmuArbiter, MmuRequest, SatpState};
use crate::tlb::TlbState;
use crate::vector_core::{chained_start, FlushFsm, InstrClass, VectorInstruction};
use crate::vlsu::{invalidation_cost, split_bursts, AccessPattern, Burst, TranslatedBurst};
use crate::workloads::{self, ScalarMemAccess, StreamItem, Workload};
use crate::{Cycle, SimError};
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::{AccessRecord, RunCounters, RunMode, RunReport, SimConfig};

const VREGS: usize = 32;
const PA_MASK: u64 = (1 << 56) - 1;

/// Runs the configured kernel and returns its report.
pub fn run(cfg: &SimConfig) -> Result<RunReport, SimError> {
    cfg.validate()?;
    let workload = workloads::generate(cfg.kernel, cfg.core.vlen_bits, cfg.seed)?;
    run_workload(cfg, &workload)
}

/// Runs an explicit workload (synthetic streams included) under `cfg`.
/// The config's kernel field is ignored except for validation defaults;
/// the report names the workload's own spec.
pub fn run_workload(cfg: &SimConfig, workload: &Workload) -> Result<RunReport, SimError> {
    cfg.validate()?;
    Engine::new(cfg, workload)?.execute()
}

/// In-flight address phase of one dispatched vector memory operation.
struct PendingPhase {
    ordinal: u64,
    instr: VectorInstruction,
    /// One entry per translation request, in issue order; the op inside
    /// `instr` keeps its original vstart, requests reflect the current
    /// attempt's one.
    requests: Vec<Burst>,
    /// Element that faults after the last listed request (non-canonical
    /// address found while building the request list).
    builtin_fault: Option<u32>,
    next: usize,
    /// Issue time of the next request; after the last response this is
    /// the phase's answer time.
    clock: Cycle,
    translated: Vec<(Burst, PhysAddr, Cycle)>,
    /// Arbitration wait + service accumulated by this attempt.
    trans_cost: Cycle,
    dispatch_end: Cycle,
    /// Retire frontier of everything older, captured at dispatch.
    older_retire: Cycle,
    fault: Option<(u32, FaultCause, VirtAddr, Cycle)>,
}

impl PendingPhase {
    fn new(
        ordinal: u64,
        instr: &VectorInstruction,
        vstart: u32,
        dispatch_end: Cycle,
        older_retire: Cycle,
    ) -> PendingPhase {
        let InstrClass::Memory { op } = &instr.class else {
            unreachable!("address phases exist only for memory ops");
        };
        let mut op = op.clone();
        op.vstart = vstart;
        let mut requests = Vec::new();
        let mut builtin_fault = None;
        match &op.pattern {
            AccessPattern::UnitStride => requests = split_bursts(&op),
            AccessPattern::Strided { .. } | AccessPattern::Indexed { .. } => {
                for e in op.vstart..op.vl {
                    match op.element_vaddr(e) {
                        Some(va) => requests.push(Burst {
                            start_vaddr: va,
                            length_bytes: op.element_width as u64,
                            first_element: e,
                            element_count: 1,
                        }),
                        None => {
                            builtin_fault = Some(e);
                            break;
                        }
                    }
                }
            }
        }
        PendingPhase {
            ordinal,
            instr: instr.clone(),
            requests,
            builtin_fault,
            next: 0,
            clock: dispatch_end,
            translated: Vec::new(),
            trans_cost: 0,
            dispatch_end,
            older_retire,
            fault: None,
        }
    }

    fn op(&self) -> &crate::vlsu::VectorMemOp {
        match &self.instr.class {
            InstrClass::Memory { op } => op,
            _ => unreachable!(),
        }
    }

    fn settled(&self) -> bool {
        self.fault.is_some() || self.next >= self.requests.len()
    }
}

struct Engine<'a> {
    cfg: &'a SimConfig,
    stream: &'a [StreamItem],
    kernel_name: String,
    kernel_n: u32,

    satp: SatpState,
    tlb: TlbState,
    pt: PageTable,
    arbiter: MmuArbiter,
    footprint: BTreeSet<u64>,
    polluted: HashSet<u64>,

    t_front: Cycle,
    commit_barrier: Cycle,
    /// Source and translation cycles of whatever last raised the barrier.
    barrier_cause: (Option<RequestSource>, Cycle),

    lsu_free: Cycle,
    alu_free: Cycle,
    retire_frontier: Cycle,
    inflight: VecDeque<Cycle>,
    scalar_unit_free: Cycle,
    reg_start: [Cycle; VREGS],
    reg_end: [Cycle; VREGS],
    reg_chainable: [bool; VREGS],

    pending: Option<PendingPhase>,
    next_tick: Option<Cycle>,

    c: RunCounters,
    fault_attempts: HashMap<(u64, u32), u32>,
    log: Option<Vec<AccessRecord>>,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a SimConfig, workload: &'a Workload) -> Result<Engine<'a>, SimError> {
        let tlb = TlbState::new(cfg.tlb).map_err(|e| SimError::config(e.to_string()))?;
        let root = PageTableId(1);
        let mut pt = PageTable::new(root);
        let footprint = workload.layout.page_set();
        let satp = match cfg.mode {
            RunMode::BareMetal => SatpState::bare(),
            RunMode::VirtualMemory => {
                if !cfg.demand_paging {
                    for &vpn in &footprint {
                        map_identity(&mut pt, vpn)?;
                    }
                }
                SatpState {
                    enabled: true,
                    root,
                }
            }
        };
        let next_tick = if cfg.scheduler.preemptive {
            Some(cfg.scheduler.next_tick_after(0))
        } else {
            None
        };
        Ok(Engine {
            cfg,
            stream: &workload.stream,
            kernel_name: workload.spec.family().to_string(),
            kernel_n: workload.spec.size(),
            satp,
            tlb,
            pt,
            arbiter: MmuArbiter::new(cfg.arbiter_tie_break),
            footprint,
            polluted: HashSet::new(),
            t_front: 0,
            commit_barrier: 0,
            barrier_cause: (None, 0),
            lsu_free: 0,
            alu_free: 0,
            retire_frontier: 0,
            inflight: VecDeque::new(),
            scalar_unit_free: 0,
            reg_start: [0; VREGS],
            reg_end: [0; VREGS],
            reg_chainable: [false; VREGS],
            pending: None,
            next_tick,
            c: RunCounters::default(),
            fault_attempts: HashMap::new(),
            log: cfg.record_access_log.then(Vec::new),
        })
    }

    fn execute(mut self) -> Result<RunReport, SimError> {
        let per_rep = self.stream.len() as u64;
        for rep in 0..self.cfg.repeat as u64 {
            for (pos, item) in self.stream.iter().enumerate() {
                let ordinal = rep * per_rep + pos as u64;
                match item {
                    StreamItem::Scalar(s) => self.do_scalar(s, ordinal)?,
                    StreamItem::Vector(v) => self.do_vector(v, ordinal)?,
                }
            }
        }
        self.resolve_pending()?;
        let total_cycles = self
            .t_front
            .max(self.commit_barrier)
            .max(self.busy_frontier());
        Ok(RunReport {
            kernel: self.kernel_name,
            n: self.kernel_n,
            mode: self.cfg.mode.to_string(),
            tlb_entries: self.cfg.tlb.num_entries as usize,
            seed: self.cfg.seed,
            total_cycles,
            counters: self.c,
            access_log: self.log.map(|mut l| {
                l.sort_unstable();
                l
            }),
        })
    }

    fn busy_frontier(&self) -> Cycle {
        self.retire_frontier.max(self.lsu_free).max(self.alu_free)
    }

    /// One translation through the shared MMU port, serialized behind
    /// whatever currently holds the walker. Returns the outcome, the
    /// completion cycle, and wait+service cost.
    fn translate_one(
        &mut self,
        source: RequestSource,
        vaddr: VirtAddr,
        kind: AccessKind,
        issue: Cycle,
    ) -> Result<(TranslationOutcome, Cycle, Cycle), SimError> {
        let (start, wait) = self.arbiter.grant(source, issue);
        let req = MmuRequest {
            vaddr,
            access: AccessDescriptor { kind, source },
            issue_cycle: issue,
        };
        let resp = mmu::translate(&self.satp, &mut self.tlb, Some(&mut self.pt), &req, &self.cfg.mmu)
            .map_err(|e| SimError::config(format!("translation setup broken: {e}")))?;
        self.arbiter.occupy(start, resp.service_cycles);
        let done = start + resp.service_cycles;
        let cost = wait + resp.service_cycles;
        self.c.arbiter_wait_cycles += wait;
        self.c.ptw_cycles += resp.ptw_cycles;
        match source {
            RequestSource::Scalar => {
                self.c.scalar_translation_requests += 1;
                self.c.scalar_mmu_stall_cycles += cost;
                if resp.tlb_hit {
                    self.c.scalar_tlb_hits += 1;
                } else {
                    self.c.scalar_tlb_misses += 1;
                }
            }
            RequestSource::Vector => {
                self.c.vector_translation_requests += 1;
                self.c.vector_mmu_stall_cycles += cost;
                if resp.tlb_hit {
                    self.c.vector_tlb_hits += 1;
                } else {
                    self.c.vector_tlb_misses += 1;
                }
            }
        }
        if !resp.tlb_hit && self.polluted.remove(&vaddr.vpn()) {
            self.c.os.pollution_cycles += resp.ptw_cycles;
        }
        Ok((resp.outcome, done, cost))
    }

    /// Serves pending vector address-phase requests. With a limit, only
    /// requests that beat a competing scalar request issued at `limit`
    /// are served — strictly earlier ones, or equal-time ones when the
    /// vector side wins ties.
    fn pump_pending(&mut self, limit: Option<Cycle>) -> Result<(), SimError> {
        loop {
            let (vaddr, kind, issue, element) = {
                let Some(p) = &self.pending else {
                    return Ok(());
                };
                if p.settled() {
                    return Ok(());
                }
                if let Some(l) = limit {
                    let beats = match self.cfg.arbiter_tie_break {
                        RequestSource::Scalar => p.clock < l,
                        RequestSource::Vector => p.clock <= l,
                    };
                    if !beats {
                        return Ok(());
                    }
                }
                let b = &p.requests[p.next];
                (b.start_vaddr, p.op().access_kind(), p.clock, b.first_element)
            };
            let (outcome, done, cost) = self.translate_one(RequestSource::Vector, vaddr, kind, issue)?;
            let p = self.pending.as_mut().expect("phase checked above");
            p.trans_cost += cost;
            p.clock = done;
            match outcome {
                TranslationOutcome::Ok { paddr, .. } => {
                    let burst = p.requests[p.next];
                    p.translated.push((burst, paddr, done));
                    p.next += 1;
                    if p.next == p.requests.len() {
                        if let Some(e) = p.builtin_fault {
                            p.fault = Some((
                                e,
                                FaultCause::for_access(p.op().access_kind()),
                                p.op().base,
                                done,
                            ));
                        }
                    }
                }
                TranslationOutcome::Fault { cause, vaddr } => {
                    p.fault = Some((element, cause, vaddr, done));
                }
            }
        }
    }

    /// Drains the pending phase completely, servicing any page faults
    /// (drain, flush, OS service, re-dispatch from the faulting element).
    fn resolve_pending(&mut self) -> Result<(), SimError> {
        while self.pending.is_some() {
            self.pump_pending(None)?;
            // A zero-request attempt can still carry a builtin fault.
            if let Some(p) = self.pending.as_mut() {
                if p.fault.is_none() && p.requests.is_empty() {
                    if let Some(e) = p.builtin_fault {
                        p.fault =
                            Some((e, FaultCause::for_access(p.op().access_kind()), p.op().base, p.clock));
                    }
                }
            }
            let phase = self.pending.take().expect("loop condition");
            match phase.fault {
                None => self.finish_phase(phase),
                Some(fault) => self.recover_vector_fault(phase, fault)?,
            }
        }
        Ok(())
    }

    /// Streams a phase's translated bursts through the memory port, each
    /// chasing its own translation. Returns (first_data, end) cycles.
    fn stream_data(&mut self, phase: &PendingPhase) -> (Cycle, Cycle) {
        let op = phase.op();
        let bw = self.cfg.core.mem_bw_bytes_per_cycle;
        let mut cursor = self.lsu_free.max(phase.dispatch_end);
        if op.is_store {
            // Store data leaves as the source register produces it.
            if let Some(&src) = phase.instr.sources.first() {
                let bytes: u64 = phase.translated.iter().map(|(b, ..)| b.length_bytes).sum();
                let dur = bytes.div_ceil(bw).max(1);
                cursor = cursor.max(self.operand_ready(src, dur));
            }
        }
        let mut first_data = None;
        for (burst, _, trans_done) in &phase.translated {
            let s = cursor.max(*trans_done);
            if first_data.is_none() {
                first_data = Some(s);
            }
            cursor = s + burst.length_bytes.div_ceil(bw).max(1);
        }
        let mut end = cursor;
        if op.is_store && !phase.translated.is_empty() {
            let bursts: Vec<TranslatedBurst> = phase
                .translated
                .iter()
                .map(|&(burst, paddr, _)| TranslatedBurst { burst, paddr })
                .collect();
            let inv = invalidation_cost(
                &bursts,
                &self.cfg.cache.geometry(),
                self.cfg.cache.per_set_cycles,
            );
            self.c.invalidation_cycles += inv;
            end += inv;
        }
        self.lsu_free = end.max(self.lsu_free);
        self.log_phase(phase);
        (first_data.unwrap_or(end), end)
    }

    fn log_phase(&mut self, phase: &PendingPhase) {
        let Some(log) = &mut self.log else { return };
        let is_store = phase.op().is_store;
        let ew = phase.op().element_width as u64;
        for (burst, ..) in &phase.translated {
            for e in 0..burst.element_count {
                log.push(AccessRecord {
                    ordinal: phase.ordinal,
                    element: burst.first_element + e,
                    vaddr: burst.start_vaddr.val() + e as u64 * ew,
                    is_store,
                });
            }
        }
    }

    /// Completes a faultless memory operation: commit at the answer,
    /// stream data, retire in order.
    fn finish_phase(&mut self, phase: PendingPhase) {
        let answer = phase.clock;
        let (first_data, end) = self.stream_data(&phase);
        if let Some(&dest) = phase.instr.dest.as_ref() {
            let d = dest as usize;
            self.reg_start[d] = first_data;
            self.reg_end[d] = end;
            self.reg_chainable[d] = true;
        }
        self.update_barrier(answer, Some(RequestSource::Vector), phase.trans_cost);
        let retire = self.retire_frontier.max(end);
        self.retire_frontier = retire;
        self.inflight.push_back(retire);
    }

    fn recover_vector_fault(
        &mut self,
        phase: PendingPhase,
        (element, cause, vaddr, at): (u32, FaultCause, VirtAddr, Cycle),
    ) -> Result<(), SimError> {
        let attempts = self
            .fault_attempts
            .entry((phase.ordinal, element))
            .or_insert(0);
        *attempts += 1;
        if *attempts > self.cfg.fault.retry_bound {
            return Err(SimError::Livelock {
                instr: phase.ordinal,
                element,
                attempts: *attempts,
            });
        }
        let _ = cause;
        // Elements before the fault commit: their data drains first.
        let (_, partial_end) = self.stream_data(&phase);
        let drain = self
            .retire_frontier
            .max(partial_end)
            .max(phase.older_retire);
        let visible = FlushFsm::resolve(at, drain, self.cfg.core.flush_cycles);
        self.c.flush_events += 1;
        let service_end =
            self.advance_front_to(visible.max(self.t_front) + self.cfg.fault.service_cycles)?;
        self.c.os.page_faults_serviced += 1;
        self.c.os.fault_service_cycles += self.cfg.fault.service_cycles;
        self.install_page(vaddr)?;
        // Re-dispatch from the faulting element.
        self.t_front = service_end;
        self.commit_barrier = self.commit_barrier.max(service_end);
        self.barrier_cause = (None, 0);
        let dispatch_end = self.advance_front_to(service_end + self.cfg.core.dispatch_cycles)?;
        self.t_front = dispatch_end;
        self.pending = Some(PendingPhase::new(
            phase.ordinal,
            &phase.instr,
            element,
            dispatch_end,
            self.retire_frontier,
        ));
        Ok(())
    }

    /// OS maps the faulting page, or the run dies on an access outside
    /// the workload's declared footprint.
    fn install_page(&mut self, vaddr: VirtAddr) -> Result<(), SimError> {
        let vpn = vaddr.vpn();
        if !self.footprint.contains(&vpn) {
            return Err(SimError::SegmentationFault {
                vaddr: vaddr.val(),
            });
        }
        map_identity(&mut self.pt, vpn)
    }

    fn update_barrier(&mut self, t: Cycle, source: Option<RequestSource>, trans_cost: Cycle) {
        if t > self.commit_barrier {
            self.commit_barrier = t;
            self.barrier_cause = (source, trans_cost);
        }
    }

    fn operand_ready(&self, reg: u8, consumer_duration: Cycle) -> Cycle {
        let r = reg as usize;
        chained_start(
            self.cfg.core.chaining && self.reg_chainable[r],
            self.reg_start[r],
            self.reg_end[r],
            consumer_duration,
        )
    }

    /// Moves the frontend to `target`, firing any timer ticks crossed on
    /// the way (flush + snapshot for pollution tracking, interrupt cost,
    /// periodic context switch). Returns the adjusted arrival time.
    fn advance_front_to(&mut self, mut target: Cycle) -> Result<Cycle, SimError> {
        let Some(mut tick) = self.next_tick else {
            return Ok(target);
        };
        while tick <= target {
            // Requests issued before the tick run against the old TLB.
            self.pump_pending(Some(tick))?;
            if self.cfg.scheduler.pollution.flush_tlb && self.satp.enabled {
                self.polluted = self.tlb.resident_vpns().into_iter().collect();
                self.tlb.invalidate_all();
            }
            self.c.os.timer_ticks += 1;
            self.c.os.direct_tick_cycles += self.cfg.scheduler.interrupt_cycles;
            target = target.max(tick)
                + self.cfg.scheduler.interrupt_cycles
                + self.cfg.scheduler.pollution.extra_cycles;
            if self.c.os.timer_ticks % self.cfg.scheduler.context_switch_period_ticks == 0 {
                // The outgoing process's vector state must be quiesced
                // before its registers stream out.
                let start = target.max(self.busy_frontier());
                let cost = self.cfg.context_switch.vector_process_cycles();
                target = start + cost;
                self.lsu_free = target;
                self.c.os.context_switches += 1;
                self.c.os.context_switch_cycles += cost;
            }
            tick = self.cfg.scheduler.next_tick_after(tick);
            self.next_tick = Some(tick);
        }
        Ok(target)
    }

    fn do_scalar(&mut self, s: &ScalarMemAccess, ordinal: u64) -> Result<(), SimError> {
        self.c.scalar_accesses += 1;
        let issue_done = self.advance_front_to(self.t_front + self.cfg.core.scalar_issue_cycles)?;
        self.t_front = issue_done;
        let mut ready = issue_done.max(self.scalar_unit_free);
        if let Some(r) = s.reads_vector {
            // Value produced by the vector unit: wait for its writer.
            ready = ready.max(self.reg_end[r as usize]);
        }
        let mut trans_cost = 0;
        let end = if self.satp.enabled {
            loop {
                self.pump_pending(Some(ready))?;
                let (outcome, done, cost) =
                    self.translate_one(RequestSource::Scalar, s.vaddr, s.kind, ready)?;
                match outcome {
                    TranslationOutcome::Ok { .. } => {
                        trans_cost = cost;
                        break done + self.cfg.core.scalar_mem_cycles;
                    }
                    TranslationOutcome::Fault { vaddr, .. } => {
                        let attempts = self.fault_attempts.entry((ordinal, 0)).or_insert(0);
                        *attempts += 1;
                        if *attempts > self.cfg.fault.retry_bound {
                            return Err(SimError::Livelock {
                                instr: ordinal,
                                element: 0,
                                attempts: *attempts,
                            });
                        }
                        // Scalar trap: flush, service, replay. The vector
                        // backend keeps draining underneath the handler.
                        self.c.flush_events += 1;
                        let service_end = self.advance_front_to(
                            done + self.cfg.core.flush_cycles + self.cfg.fault.service_cycles,
                        )?;
                        self.c.os.page_faults_serviced += 1;
                        self.c.os.fault_service_cycles += self.cfg.fault.service_cycles;
                        self.install_page(vaddr)?;
                        self.t_front = service_end;
                        ready = service_end.max(self.scalar_unit_free);
                    }
                }
            }
        } else {
            ready + self.cfg.core.scalar_mem_cycles
        };
        self.scalar_unit_free = end;
        self.update_barrier(end, Some(RequestSource::Scalar), trans_cost);
        if let Some(log) = &mut self.log {
            log.push(AccessRecord {
                ordinal,
                element: 0,
                vaddr: s.vaddr.val(),
                is_store: s.kind == AccessKind::Store,
            });
        }
        Ok(())
    }

    /// Backend queue admission: waits for a slot when `window_depth`
    /// instructions are still in flight.
    fn queue_slot(&mut self, t: Cycle) -> Cycle {
        while let Some(&r) = self.inflight.front() {
            if r <= t {
                self.inflight.pop_front();
            } else {
                break;
            }
        }
        if self.inflight.len() < self.cfg.core.window_depth {
            t
        } else {
            let r = self.inflight.pop_front().expect("nonempty when full");
            r.max(t)
        }
    }

    /// What `queue_slot` would return for a dispatch at `t`, without
    /// taking the slot. Retire times are queued in nondecreasing order.
    fn slot_time(&self, t: Cycle) -> Cycle {
        let outstanding = self.inflight.iter().filter(|&&r| r > t).count();
        if outstanding < self.cfg.core.window_depth {
            t
        } else {
            self.inflight
                .iter()
                .copied()
                .find(|&r| r > t)
                .expect("outstanding entries exist")
        }
    }

    fn do_vector(&mut self, v: &VectorInstruction, ordinal: u64) -> Result<(), SimError> {
        self.c.vector_instructions += 1;
        // The previous memory op must answer before anything younger
        // reaches the vector unit (non-speculative handshake).
        self.resolve_pending()?;
        let start = self.t_front;
        let barrier = self.commit_barrier;
        // The marginal cost of the commit wait: how much later the queue
        // admits this instruction than it would have without the barrier.
        // A full queue would have gated the dispatch anyway, so that part
        // of the wait is hidden behind backend work.
        let free_gate = self.slot_time(start);
        let gate = self.queue_slot(start.max(barrier));
        if barrier > start {
            let stall = barrier - start;
            let mmu_stall = stall.min(self.barrier_cause.1);
            let exposed = (gate - free_gate).min(mmu_stall);
            self.c.hidden_stall_cycles += mmu_stall - exposed;
            match self.barrier_cause.0 {
                Some(RequestSource::Scalar) => self.c.exposed_scalar_mmu_cycles += exposed,
                Some(RequestSource::Vector) => self.c.exposed_vector_mmu_cycles += exposed,
                None => {}
            }
        }
        let dispatch_end = self.advance_front_to(gate + self.cfg.core.dispatch_cycles)?;
        self.t_front = dispatch_end;

        match &v.class {
            InstrClass::Memory { .. } => {
                let mut phase =
                    PendingPhase::new(ordinal, v, 0, dispatch_end, self.retire_frontier);
                if self.satp.enabled {
                    self.pending = Some(phase);
                    // Translations are pumped lazily against competing
                    // scalar requests; the phase settles no later than
                    // the next vector dispatch.
                } else {
                    // Translation off: addresses pass through untouched.
                    phase.translated = phase
                        .requests
                        .iter()
                        .map(|&b| {
                            let pa = PhysAddr::new(b.start_vaddr.val() & PA_MASK)
                                .expect("masked to 56 bits");
                            (b, pa, dispatch_end)
                        })
                        .collect();
                    phase.next = phase.requests.len();
                    self.finish_phase(phase);
                }
            }
            InstrClass::Arithmetic { .. } | InstrClass::Permutation { .. } => {
                let dur = v.execute_cycles(&self.cfg.core);
                let mut ready = dispatch_end.max(self.alu_free);
                for &src in &v.sources {
                    ready = ready.max(self.operand_ready(src, dur));
                }
                let end = ready + dur;
                self.alu_free = end;
                if let Some(dest) = v.dest {
                    let d = dest as usize;
                    self.reg_start[d] = ready;
                    self.reg_end[d] = end;
                    // Lane-crossing results can't forward element-wise.
                    self.reg_chainable[d] =
                        matches!(v.class, InstrClass::Arithmetic { .. });
                }
                // Arithmetic cannot fault: it answers at dispatch.
                self.update_barrier(dispatch_end, None, 0);
                let retire = self.retire_frontier.max(end);
                self.retire_frontier = retire;
                self.inflight.push_back(retire);
            }
        }
        Ok(())
    }
}

fn map_identity(pt: &mut PageTable, vpn: u64) -> Result<(), SimError> {
    let va = VirtAddr::new(vpn << 12)
        .map_err(|e| SimError::config(format!("footprint page not canonical: {e}")))?;
    let pa = PhysAddr::new(vpn << 12)
        .map_err(|e| SimError::config(format!("footprint page beyond physical range: {e}")))?;
    pt.map_page(va, pa, PagePerms::RW)
        .map_err(|e| SimError::config(format!("identity mapping rejected: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::SimConfig;
    use crate::workloads::{gen_axpy, gen_matmul, KernelSpec};

    fn cfg(kernel: KernelSpec, mode: RunMode, tlb_entries: u32) -> SimConfig {
        let mut c = SimConfig {
            kernel,
            mode,
            ..SimConfig::default()
        };
        c.tlb.num_entries = tlb_entries;
        c
    }

    #[test]
    fn identical_configs_produce_identical_reports() {
        let c = cfg(KernelSpec::Matmul { n: 32 }, RunMode::VirtualMemory, 16);
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_latency_mmu_matches_bare_metal() {
        let mut vm = cfg(KernelSpec::Axpy { n: 256 }, RunMode::VirtualMemory, 16);
        vm.mmu.tlb_hit_cycles = 0;
        vm.mmu.ptw_mem_access_cycles = 0;
        let bm = cfg(KernelSpec::Axpy { n: 256 }, RunMode::BareMetal, 16);
        let vm_report = run(&vm).unwrap();
        let bm_report = run(&bm).unwrap();
        assert_eq!(vm_report.total_cycles, bm_report.total_cycles);
    }

    #[test]
    fn bare_metal_logs_no_mmu_traffic() {
        let r = run(&cfg(KernelSpec::Matmul { n: 32 }, RunMode::BareMetal, 16)).unwrap();
        assert_eq!(r.counters.scalar_translation_requests, 0);
        assert_eq!(r.counters.vector_translation_requests, 0);
        assert_eq!(r.counters.ptw_cycles, 0);
        assert_eq!(r.counters.scalar_mmu_stall_cycles, 0);
        assert_eq!(r.counters.vector_mmu_stall_cycles, 0);
    }

    #[test]
    fn small_matmul_misses_only_compulsory_pages() {
        let r = run(&cfg(KernelSpec::Matmul { n: 32 }, RunMode::VirtualMemory, 16)).unwrap();
        let misses = r.counters.scalar_tlb_misses + r.counters.vector_tlb_misses;
        assert!(misses <= 6, "expected compulsory misses only, got {misses}");
        assert!(misses > 0, "cold TLB must miss at least once");
    }

    #[test]
    fn vm_run_is_never_faster_than_bare_metal() {
        for kernel in [
            KernelSpec::Matmul { n: 32 },
            KernelSpec::Axpy { n: 1024 },
            KernelSpec::IndexedGather {
                rows: 40,
                nnz_per_row: 5,
            },
        ] {
            let vm = run(&cfg(kernel, RunMode::VirtualMemory, 16)).unwrap();
            let bm = run(&cfg(kernel, RunMode::BareMetal, 16)).unwrap();
            assert!(
                vm.total_cycles >= bm.total_cycles,
                "{kernel:?}: vm {} < bm {}",
                vm.total_cycles,
                bm.total_cycles
            );
        }
    }

    #[test]
    fn chaining_never_slows_a_run() {
        for kernel in [KernelSpec::Matmul { n: 32 }, KernelSpec::Axpy { n: 2048 }] {
            let mut on = cfg(kernel, RunMode::VirtualMemory, 16);
            on.core.chaining = true;
            let mut off = on.clone();
            off.core.chaining = false;
            let t_on = run(&on).unwrap().total_cycles;
            let t_off = run(&off).unwrap().total_cycles;
            assert!(t_on <= t_off, "{kernel:?}: chained {t_on} > unchained {t_off}");
        }
    }

    #[test]
    fn demand_paging_faults_once_per_footprint_page() {
        let mut c = cfg(KernelSpec::Matmul { n: 32 }, RunMode::VirtualMemory, 16);
        c.demand_paging = true;
        let r = run(&c).unwrap();
        assert_eq!(r.counters.os.page_faults_serviced, 6);
        assert_eq!(
            r.counters.os.fault_service_cycles,
            6 * c.fault.service_cycles
        );
    }

    #[test]
    fn demand_and_premapped_commit_identical_accesses() {
        let mut premapped = cfg(KernelSpec::Axpy { n: 2048 }, RunMode::VirtualMemory, 4);
        premapped.record_access_log = true;
        let mut demand = premapped.clone();
        demand.demand_paging = true;
        let a = run(&premapped).unwrap();
        let b = run(&demand).unwrap();
        assert!(b.counters.os.page_faults_serviced > 0);
        assert_eq!(a.access_log, b.access_log);
    }

    #[test]
    fn access_outside_footprint_aborts() {
        use crate::vlsu::{AccessPattern, VectorMemOp};
        // Hand-built stream touching a page the layout never declared.
        let mut w = gen_axpy(8, 2048);
        let rogue = VectorMemOp::new(
            AccessPattern::UnitStride,
            VirtAddr::new(0x4000_0000).unwrap(),
            8,
            8,
            0,
            false,
        )
        .unwrap();
        w.stream.push(StreamItem::Vector(VectorInstruction {
            id: 999,
            class: InstrClass::Memory { op: rogue },
            vl: 8,
            sources: vec![],
            dest: Some(3),
        }));
        let mut c = cfg(KernelSpec::Axpy { n: 8 }, RunMode::VirtualMemory, 16);
        c.demand_paging = true;
        let err = run_workload(&c, &w).unwrap_err();
        assert!(matches!(err, SimError::SegmentationFault { vaddr } if vaddr == 0x4000_0000));
    }

    #[test]
    fn preemptive_run_counts_ticks_and_switches() {
        let mut c = cfg(KernelSpec::Matmul { n: 64 }, RunMode::VirtualMemory, 16);
        c.scheduler.preemptive = true;
        c.repeat = 10;
        let r = run(&c).unwrap();
        assert!(r.counters.os.timer_ticks > 0, "run too short to tick");
        assert_eq!(
            r.counters.os.direct_tick_cycles,
            r.counters.os.timer_ticks * c.scheduler.interrupt_cycles
        );
        assert_eq!(r.counters.os.context_switches, r.counters.os.timer_ticks);
        assert_eq!(
            r.counters.os.context_switch_cycles,
            r.counters.os.context_switches * c.context_switch.vector_process_cycles()
        );
    }

    #[test]
    fn larger_tlb_never_misses_more() {
        let mut misses = Vec::new();
        for entries in [2u32, 8, 32, 128] {
            let mut c = cfg(KernelSpec::Matmul { n: 64 }, RunMode::VirtualMemory, entries);
            c.tlb.policy = crate::tlb::ReplacementPolicy::TrueLru;
            let r = run(&c).unwrap();
            misses.push(r.counters.scalar_tlb_misses + r.counters.vector_tlb_misses);
        }
        for pair in misses.windows(2) {
            assert!(pair[1] <= pair[0], "miss counts {misses:?} not monotone");
        }
    }

    #[test]
    fn hidden_stalls_appear_when_backend_is_busy() {
        let r = run(&cfg(KernelSpec::Matmul { n: 64 }, RunMode::VirtualMemory, 4)).unwrap();
        assert!(r.counters.hidden_stall_cycles > 0);
    }

    #[test]
    fn counters_stay_internally_consistent() {
        let r = run(&cfg(KernelSpec::Matmul { n: 64 }, RunMode::VirtualMemory, 8)).unwrap();
        let c = &r.counters;
        assert_eq!(
            c.scalar_tlb_hits + c.scalar_tlb_misses,
            c.scalar_translation_requests
        );
        assert_eq!(
            c.vector_tlb_hits + c.vector_tlb_misses,
            c.vector_translation_requests
        );
        assert!(c.scalar_mmu_stall_cycles >= c.scalar_tlb_hits + c.scalar_tlb_misses);
        assert!(r.total_cycles > 0);
        assert!(
            c.exposed_scalar_mmu_cycles + c.exposed_vector_mmu_cycles
                <= c.scalar_mmu_stall_cycles + c.vector_mmu_stall_cycles
        );
    }

    #[test]
    fn repeat_replays_the_stream() {
        let base = cfg(KernelSpec::Axpy { n: 512 }, RunMode::VirtualMemory, 16);
        let mut twice = base.clone();
        twice.repeat = 2;
        let a = run(&base).unwrap();
        let b = run(&twice).unwrap();
        assert_eq!(
            b.counters.vector_instructions,
            2 * a.counters.vector_instructions
        );
        assert!(b.total_cycles > a.total_cycles);
    }

    #[test]
    fn faulting_run_commits_same_accesses_as_faultless_oracle() {
        let mut c = cfg(
            KernelSpec::IndexedGather {
                rows: 30,
                nnz_per_row: 7,
            },
            RunMode::VirtualMemory,
            4,
        );
        c.record_access_log = true;
        let oracle = run(&c).unwrap();
        let mut faulty = c.clone();
        faulty.demand_paging = true;
        let replayed = run(&faulty).unwrap();
        assert!(replayed.counters.os.page_faults_serviced > 0);
        assert_eq!(oracle.access_log, replayed.access_log);
    }

    #[test]
    fn matmul_total_exceeds_pure_compute_bound() {
        let c = cfg(KernelSpec::Matmul { n: 32 }, RunMode::VirtualMemory, 16);
        let w = gen_matmul(32, c.core.vlen_bits);
        let compute: Cycle = w
            .stream
            .iter()
            .filter_map(|i| match i {
                StreamItem::Vector(v) if !v.is_memory() => Some(v.execute_cycles(&c.core)),
                _ => None,
            })
            .sum();
        let r = run(&c).unwrap();
        assert!(r.total_cycles >= compute);
    }
}
