//! Slot-by-slot transmission plans for the cooperative interference-alignment
//! schemes, plus a few reference schedules.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{BcConfig, IcConfig, Network, Receiver, Terminal};
use crate::numerics::{rational, Rational};
use crate::regions::{unequal_class_violation, DofPoint, Region2D};

pub type SymbolId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("malformed schedule: {0}")]
    Malformed(String),
    #[error("schedule document error: {0}")]
    Document(String),
}

/// A data symbol destined for `owner`, first transmitted in `origin_slot`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolInfo {
    pub id: SymbolId,
    pub owner: Receiver,
    pub origin_slot: usize,
    pub label: String,
}

/// Contiguous block of one earlier slot's reception at the relaying receiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaySegment {
    pub slot: usize,
    pub start: usize,
    pub end: usize,
}

impl RelaySegment {
    pub fn new(slot: usize, antennas: Range<usize>) -> Self {
        Self {
            slot,
            start: antennas.start,
            end: antennas.end,
        }
    }

    pub fn antennas(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// What one terminal does in one slot. Payload values occupy the first
/// antennas in order; remaining antennas are silent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Silent,
    SendFresh { owner: Receiver, symbols: Vec<SymbolId> },
    RelayReceived { segments: Vec<RelaySegment> },
    ReplayDecoded { symbols: Vec<SymbolId> },
}

impl Action {
    /// Number of transmit antennas carrying a value.
    pub fn width(&self) -> usize {
        match self {
            Action::Silent => 0,
            Action::SendFresh { symbols, .. } | Action::ReplayDecoded { symbols } => symbols.len(),
            Action::RelayReceived { segments } => segments.iter().map(RelaySegment::len).sum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotAction {
    pub terminal: Terminal,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeDescriptor {
    pub name: String,
    pub antennas: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    /// The DoF pair the scheme is published to achieve.
    pub claimed: DofPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub descriptor: SchemeDescriptor,
    pub network: Network,
    /// `slots[t - 1]` lists the non-silent actions of slot `t`.
    pub slots: Vec<Vec<SlotAction>>,
    pub symbols: Vec<SymbolInfo>,
}

impl Schedule {
    pub fn total_slots(&self) -> usize {
        self.slots.len()
    }

    /// Action of `terminal` in slot `t` (1-based); silent when not listed.
    pub fn action(&self, t: usize, terminal: Terminal) -> &Action {
        static SILENT: Action = Action::Silent;
        self.slots
            .get(t.wrapping_sub(1))
            .and_then(|s| s.iter().find(|a| a.terminal == terminal))
            .map(|a| &a.action)
            .unwrap_or(&SILENT)
    }

    pub fn own_symbols(&self, r: Receiver) -> impl Iterator<Item = &SymbolInfo> {
        self.symbols.iter().filter(move |s| s.owner == r)
    }

    /// Symbols that `r` retransmits at some point.
    pub fn replayed_by(&self, r: Receiver) -> BTreeSet<SymbolId> {
        self.slots
            .iter()
            .flatten()
            .filter(|a| a.terminal == r.terminal())
            .filter_map(|a| match &a.action {
                Action::ReplayDecoded { symbols } => Some(symbols.iter().copied()),
                _ => None,
            })
            .flatten()
            .collect()
    }

    /// Fresh-symbol count per receiver over `T`, as exact rationals.
    pub fn scheduled_dof(&self) -> DofPoint {
        let t = self.total_slots() as i64;
        let count = |r| self.own_symbols(r).count() as i64;
        DofPoint::new(rational(count(Receiver::R1), t), rational(count(Receiver::R2), t))
    }

    /// Structural checks; decodability of replays is left to the engine.
    pub fn validate(&self) -> Result<(), SchemeError> {
        let bad = |m: String| Err(SchemeError::Malformed(m));
        let t_total = self.total_slots();
        if t_total == 0 {
            return bad("schedule needs at least one slot".into());
        }
        for (k, s) in self.symbols.iter().enumerate() {
            if s.id != k {
                return bad(format!("symbol at position {k} has id {}", s.id));
            }
            if s.origin_slot == 0 || s.origin_slot > t_total {
                return bad(format!("symbol {} has origin slot {} outside 1..={t_total}", s.label, s.origin_slot));
            }
        }
        let mut emitted = vec![0usize; self.symbols.len()];
        for (idx, actions) in self.slots.iter().enumerate() {
            let t = idx + 1;
            let mut seen = BTreeSet::new();
            for SlotAction { terminal, action } in actions {
                let terminal = *terminal;
                if !self.network.has_terminal(terminal) {
                    return bad(format!("slot {t}: terminal {terminal} is not part of the network"));
                }
                if !seen.insert(terminal) {
                    return bad(format!("slot {t}: terminal {terminal} has two actions"));
                }
                let antennas = self.network.antennas(terminal).unwrap_or(0);
                if action.width() > antennas {
                    return bad(format!(
                        "slot {t}: {terminal} needs {} antennas but has {antennas}",
                        action.width()
                    ));
                }
                match action {
                    Action::Silent => {}
                    Action::SendFresh { owner, symbols } => {
                        if !terminal.is_transmitter() {
                            return bad(format!("slot {t}: receiver {terminal} cannot send fresh symbols"));
                        }
                        if let Network::Ic(_) = self.network {
                            let expected = if terminal == Terminal::T1 { Receiver::R1 } else { Receiver::R2 };
                            if *owner != expected {
                                return bad(format!("slot {t}: {terminal} only carries symbols for {expected}"));
                            }
                        }
                        for &id in symbols {
                            let Some(s) = self.symbols.get(id) else {
                                return bad(format!("slot {t}: unknown symbol id {id}"));
                            };
                            if s.owner != *owner || s.origin_slot != t {
                                return bad(format!("slot {t}: symbol {} does not originate here for {owner}", s.label));
                            }
                            emitted[id] += 1;
                        }
                    }
                    Action::RelayReceived { segments } => {
                        let Some(r) = terminal.receiver() else {
                            return bad(format!("slot {t}: transmitter {terminal} cannot relay"));
                        };
                        for seg in segments {
                            if seg.slot == 0 || seg.slot >= t {
                                return bad(format!("slot {t}: {terminal} relays slot {}, which is not earlier", seg.slot));
                            }
                            if seg.is_empty() || seg.end > self.network.rx_antennas(r) {
                                return bad(format!("slot {t}: {terminal} relays antennas {:?}", seg.antennas()));
                            }
                        }
                    }
                    Action::ReplayDecoded { symbols } => {
                        if terminal.is_transmitter() {
                            return bad(format!("slot {t}: transmitter {terminal} cannot replay"));
                        }
                        for &id in symbols {
                            let Some(s) = self.symbols.get(id) else {
                                return bad(format!("slot {t}: unknown symbol id {id}"));
                            };
                            if s.origin_slot >= t {
                                return bad(format!("slot {t}: {terminal} replays {} before it was sent", s.label));
                            }
                        }
                    }
                }
            }
        }
        if let Some(k) = emitted.iter().position(|&c| c != 1) {
            return bad(format!("symbol {} is sent {} times", self.symbols[k].label, emitted[k]));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, SchemeError> {
        serde_json::to_string_pretty(self).map_err(|e| SchemeError::Document(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, SchemeError> {
        let s: Schedule = serde_json::from_str(text).map_err(|e| SchemeError::Document(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Slot-by-terminal table in the style of the scheme figures.
    pub fn layout(&self) -> String {
        let terminals = self.network.terminals();
        let mut cells: Vec<Vec<String>> = Vec::new();
        for t in 1..=self.total_slots() {
            let mut row = vec![format!("t={t}")];
            for &term in &terminals {
                row.push(self.describe(t, term));
            }
            cells.push(row);
        }
        let mut header = vec!["slot".to_string()];
        header.extend(terminals.iter().map(|t| t.to_string()));
        let widths: Vec<usize> = (0..header.len())
            .map(|c| cells.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap())
            .collect();
        let line = |row: &[String]| {
            row.iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect::<Vec<_>>()
                .join(" | ")
                .trim_end()
                .to_string()
        };
        let mut out = format!("{} over T={}\n", self.descriptor.name, self.total_slots());
        out.push_str(&line(&header));
        out.push('\n');
        out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
        out.push('\n');
        for row in &cells {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    fn describe(&self, t: usize, terminal: Terminal) -> String {
        let labels = |ids: &[SymbolId]| {
            ids.iter()
                .map(|&k| self.symbols[k].label.as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self.action(t, terminal) {
            Action::Silent => "-".into(),
            Action::SendFresh { symbols, .. } => labels(symbols),
            Action::ReplayDecoded { symbols } => format!("replay {}", labels(symbols)),
            Action::RelayReceived { segments } => {
                let mut s = String::from("relay ");
                let rx = terminal.receiver().map(|r| r.index() + 1).unwrap_or(0);
                for (k, seg) in segments.iter().enumerate() {
                    if k > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "Y{rx}({})[{}..{}]", seg.slot, seg.start, seg.end);
                }
                s
            }
        }
    }
}

/// Incremental schedule assembly.
struct Builder {
    network: Network,
    slots: Vec<Vec<SlotAction>>,
    symbols: Vec<SymbolInfo>,
}

impl Builder {
    fn new(network: Network) -> Self {
        Self {
            network,
            slots: Vec::new(),
            symbols: Vec::new(),
        }
    }

    /// Opens a new slot and returns its 1-based index.
    fn slot(&mut self) -> usize {
        self.slots.push(Vec::new());
        self.slots.len()
    }

    fn push(&mut self, t: usize, terminal: Terminal, action: Action) {
        self.slots[t - 1].push(SlotAction { terminal, action });
    }

    fn fresh(&mut self, t: usize, owner: Receiver, labels: impl IntoIterator<Item = String>) -> Vec<SymbolId> {
        labels
            .into_iter()
            .map(|label| {
                let id = self.symbols.len();
                self.symbols.push(SymbolInfo {
                    id,
                    owner,
                    origin_slot: t,
                    label,
                });
                id
            })
            .collect()
    }

    fn send(&mut self, t: usize, terminal: Terminal, owner: Receiver, labels: impl IntoIterator<Item = String>) -> Vec<SymbolId> {
        let symbols = self.fresh(t, owner, labels);
        self.push(t, terminal, Action::SendFresh { owner, symbols: symbols.clone() });
        symbols
    }

    fn finish(self, descriptor: SchemeDescriptor) -> Result<Schedule, SchemeError> {
        let s = Schedule {
            descriptor,
            network: self.network,
            slots: self.slots,
            symbols: self.symbols,
        };
        s.validate()?;
        Ok(s)
    }
}

/// Packs `(slot, antenna)` pairs, in order, into per-slot relay payloads of
/// `width` values each.
fn pack_relays(sources: &[usize], antennas: usize, width: usize) -> Vec<Vec<RelaySegment>> {
    let flat: Vec<(usize, usize)> = sources
        .iter()
        .flat_map(|&s| (0..antennas).map(move |a| (s, a)))
        .collect();
    flat.chunks(width)
        .map(|chunk| {
            let mut segs: Vec<RelaySegment> = Vec::new();
            for &(s, a) in chunk {
                match segs.last_mut() {
                    Some(last) if last.slot == s && last.end == a => last.end += 1,
                    _ => segs.push(RelaySegment::new(s, a..a + 1)),
                }
            }
            segs
        })
        .collect()
}

fn equal_n_plan(
    network: Network,
    tx: [Terminal; 2],
    m1p: usize,
    m2p: usize,
    n: usize,
) -> Builder {
    let mut b = Builder::new(network);
    let mut counters = [0usize; 2];
    let mut phase = |b: &mut Builder, len: usize, terminal: Terminal, owner: Receiver, width: usize, prefix: &str| {
        let mut slots = Vec::new();
        for _ in 0..len {
            let t = b.slot();
            let c = &mut counters[owner.index()];
            let labels: Vec<String> = (0..width).map(|k| format!("{prefix}{}", *c + k + 1)).collect();
            *c += width;
            b.send(t, terminal, owner, labels);
            slots.push(t);
        }
        slots
    };
    let phase1 = phase(&mut b, n * (m2p - n), tx[0], Receiver::R1, m1p, "u");
    let phase2 = phase(&mut b, n * (m1p - n), tx[1], Receiver::R2, m2p, "v");
    let r2_relays = pack_relays(&phase1, m1p - n, n);
    let r1_relays = pack_relays(&phase2, m2p - n, n);
    debug_assert_eq!(r1_relays.len(), r2_relays.len());
    for (r1, r2) in r1_relays.into_iter().zip(r2_relays) {
        let t = b.slot();
        b.push(t, Terminal::R1, Action::RelayReceived { segments: r1 });
        b.push(t, Terminal::R2, Action::RelayReceived { segments: r2 });
    }
    b
}

/// Three-phase scheme for the `(M1, M2, N, N)` IC with `M1, M2 > N`.
pub fn build_rcia_equal_n(m1: usize, m2: usize, n: usize) -> Result<Schedule, SchemeError> {
    if n == 0 || m1 <= n || m2 <= n {
        return Err(SchemeError::Unsupported(format!(
            "equal-N scheme needs M1 > N and M2 > N, got ({m1},{m2},{n}); the perfect-CSIT region applies otherwise"
        )));
    }
    let cfg = IcConfig::new(m1, m2, n, n).map_err(|e| SchemeError::Unsupported(e.to_string()))?;
    let (m1p, m2p) = (m1.min(2 * n), m2.min(2 * n));
    let b = equal_n_plan(Network::Ic(cfg), [Terminal::T1, Terminal::T2], m1p, m2p, n);
    let t = (n * (m2p - n) + m2p * (m1p - n)) as i64;
    let claimed = DofPoint::new(
        rational((m1p * n * (m2p - n)) as i64, t),
        rational((m2p * n * (m1p - n)) as i64, t),
    );
    b.finish(SchemeDescriptor {
        name: format!("rcia-equal-n({m1},{m2},{n})"),
        antennas: vec![m1, m2, n, n],
        blocks: None,
        claimed,
    })
}

/// Same three phases on the `(M, N, N)` BC, the single transmitter serving
/// both phases on `min(M, 2N)` antennas.
pub fn build_rcia_bc(m: usize, n: usize) -> Result<Schedule, SchemeError> {
    if n == 0 || m <= n {
        return Err(SchemeError::Unsupported(format!(
            "BC scheme needs M > N, got ({m},{n}); zero-forcing already reaches the region otherwise"
        )));
    }
    let cfg = BcConfig::new(m, n, n).map_err(|e| SchemeError::Unsupported(e.to_string()))?;
    let mp = m.min(2 * n);
    let b = equal_n_plan(Network::Bc(cfg), [Terminal::T, Terminal::T], mp, mp, n);
    let d = rational((mp * n) as i64, (mp + n) as i64);
    b.finish(SchemeDescriptor {
        name: format!("rcia-bc({m},{n})"),
        antennas: vec![m, n, n],
        blocks: None,
        claimed: DofPoint::new(d, d),
    })
}

/// Block scheme for the unequal-antenna class, `B` blocks in `2B + 1` slots.
pub fn build_rcia_unequal(m1: usize, m2: usize, n1: usize, n2: usize, blocks: usize) -> Result<Schedule, SchemeError> {
    if let Some(why) = unequal_class_violation(m1, m2, n1, n2) {
        return Err(SchemeError::Unsupported(format!("unequal scheme for ({m1},{m2},{n1},{n2}): {why}")));
    }
    if blocks == 0 {
        return Err(SchemeError::Unsupported("unequal scheme needs B >= 1".into()));
    }
    let cfg = IcConfig::new(m1, m2, n1, n2).map_err(|e| SchemeError::Unsupported(e.to_string()))?;
    let mut b = Builder::new(Network::Ic(cfg));
    let mut pending_replay: Option<Vec<SymbolId>> = None;
    for blk in 1..=blocks {
        let t = b.slot();
        b.send(t, Terminal::T1, Receiver::R1, (1..=m1).map(|i| format!("u{i}^{blk}")));
        let first_v = b.send(t, Terminal::T2, Receiver::R2, (1..=m2).map(|j| format!("v{j}^{blk}")));
        let t2 = b.slot();
        b.send(t2, Terminal::T2, Receiver::R2, (m2 + 1..=2 * m2).map(|j| format!("v{j}^{blk}")));
        b.push(t2, Terminal::R2, Action::RelayReceived { segments: vec![RelaySegment::new(t, 0..n2)] });
        if let Some(symbols) = pending_replay.replace(first_v) {
            b.push(t2, Terminal::R1, Action::ReplayDecoded { symbols });
        }
    }
    let last = b.slot();
    if let Some(symbols) = pending_replay {
        b.push(last, Terminal::R1, Action::ReplayDecoded { symbols });
    }
    let (bb, t) = (blocks as i64, 2 * blocks as i64 + 1);
    let (n1i, m2i) = (n1 as i64, m2 as i64);
    b.finish(SchemeDescriptor {
        name: format!("rcia-unequal({m1},{m2},{n1},{n2};B={blocks})"),
        antennas: vec![m1, m2, n1, n2],
        blocks: Some(blocks),
        claimed: DofPoint::new(rational(2 * (n1i - m2i) * bb, t), rational(2 * m2i * bb, t)),
    })
}

/// One symbol from T1 to R1 over a `1×1` link.
pub fn build_point_to_point() -> Schedule {
    let cfg = IcConfig::new(1, 1, 1, 1).expect("valid");
    let mut b = Builder::new(Network::Ic(cfg));
    let t = b.slot();
    b.send(t, Terminal::T1, Receiver::R1, ["s1".to_string()]);
    b.finish(SchemeDescriptor {
        name: "point-to-point".into(),
        antennas: vec![1, 1, 1, 1],
        blocks: None,
        claimed: DofPoint::new(rational(1, 1), rational(0, 1)),
    })
    .expect("valid schedule")
}

/// `slots` slots in which nobody transmits.
pub fn build_silent(network: Network, slots: usize) -> Result<Schedule, SchemeError> {
    if slots == 0 {
        return Err(SchemeError::Malformed("schedule needs at least one slot".into()));
    }
    let antennas = network
        .terminals()
        .iter()
        .filter_map(|&t| network.antennas(t))
        .collect();
    Builder {
        network,
        slots: vec![Vec::new(); slots],
        symbols: Vec::new(),
    }
    .finish(SchemeDescriptor {
        name: format!("silent(T={slots})"),
        antennas,
        blocks: None,
        claimed: DofPoint::origin(),
    })
}

/// Down-closed convex hull of achievable points.
pub fn time_share(points: &[DofPoint]) -> Region2D {
    let zero = Rational::from_integer(0);
    let mut all = vec![DofPoint::origin()];
    for p in points {
        all.push(*p);
        all.push(DofPoint::new(p.d1, zero));
        all.push(DofPoint::new(zero, p.d2));
    }
    Region2D::from_points("time-share", &all)
}
