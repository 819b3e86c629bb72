//! Executes a [`Schedule`] over sampled channels while tracking every
//! reception as an explicit linear map of the data symbols and noise, and
//! decodes at each receiver using only the coefficients it can compute.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::channel::{
    self, sample_state, stream_id, ChannelError, ChannelState, MatrixName, MatrixSet, Network, NoiseMode,
    Receiver, StreamDomain,
};
use crate::numerics::{
    orthogonal_complement, rank, rational, row_space_leverage, solve_least_squares, CMatrix, NumericsError,
    SeededRng, C64, DEFAULT_REL_TOL,
};
use crate::regions::DofPoint;
use crate::schemes::{Action, Schedule, SchemeError, SymbolId};

/// Leverage above which an unknown counts as uniquely determined.
pub const LEVERAGE_THRESHOLD: f64 = 1.0 - 1e-6;
/// Largest admissible relative mismatch between tracked and simulated receptions.
pub const TRACKING_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Schedule(#[from] SchemeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("causality violation at slot {slot}: {detail}")]
    Causality { slot: usize, detail: String },
    #[error("visibility violation at {receiver}, slot {slot}: {detail}")]
    Visibility { receiver: Receiver, slot: usize, detail: String },
    #[error("tracked reception at {receiver} slot {slot} antenna {antenna} is off by {residual:e} (relative)")]
    Tracking {
        receiver: Receiver,
        slot: usize,
        antenna: usize,
        residual: f64,
    },
    #[error("slot {0} is outside the transcript")]
    SlotOutOfRange(usize),
    #[error("export failed: {0}")]
    Export(String),
}

/// One transmitted or received scalar as a linear map of symbols and noise.
#[derive(Clone, Debug)]
struct LinearSignal {
    value: C64,
    coef: Vec<C64>,
    noise: Vec<C64>,
    /// Channel matrices each symbol coefficient was built from.
    deps: Vec<MatrixSet>,
}

impl LinearSignal {
    fn zero(symbols: usize, noise: usize) -> Self {
        Self {
            value: C64::new(0.0, 0.0),
            coef: vec![C64::new(0.0, 0.0); symbols],
            noise: vec![C64::new(0.0, 0.0); noise],
            deps: vec![MatrixSet::EMPTY; symbols],
        }
    }

    /// `self += h · other`, where `h` is an entry of matrix `link`.
    fn accumulate(&mut self, h: C64, other: &LinearSignal, link: Option<MatrixName>) {
        self.value += h * other.value;
        for k in 0..self.coef.len() {
            if other.coef[k] != C64::new(0.0, 0.0) {
                self.coef[k] += h * other.coef[k];
                let mut d = self.deps[k].union(other.deps[k]);
                if let Some(l) = link {
                    d.insert(l);
                }
                self.deps[k] = d;
            }
        }
        for (n, o) in self.noise.iter_mut().zip(&other.noise) {
            *n += h * o;
        }
    }

    fn scaled(&self, a: f64) -> LinearSignal {
        let mut s = self.clone();
        s.value *= a;
        s.coef.iter_mut().for_each(|c| *c *= a);
        s.noise.iter_mut().for_each(|c| *c *= a);
        s
    }
}

/// A single received sample at one receiver antenna.
#[derive(Clone, Debug)]
pub struct Observation {
    pub receiver: Receiver,
    pub slot: usize,
    pub antenna: usize,
    pub coefficients: Vec<C64>,
    /// Whether the observing receiver can compute each coefficient.
    pub visible: Vec<bool>,
    pub dependencies: Vec<MatrixSet>,
    pub noise: Vec<C64>,
    pub value: C64,
}

impl Observation {
    pub fn admissible(&self) -> bool {
        self.visible.iter().all(|&v| v)
    }

    fn signal(&self) -> LinearSignal {
        LinearSignal {
            value: self.value,
            coef: self.coefficients.clone(),
            noise: self.noise.clone(),
            deps: self.dependencies.clone(),
        }
    }
}

/// Rank bookkeeping of one decode attempt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeDiagnostics {
    pub receiver: Receiver,
    pub slot: usize,
    /// Admissible rows stacked.
    pub rows: usize,
    /// Rows dropped because a coefficient is invisible to this receiver.
    pub excluded_rows: usize,
    /// Rows left after eliminating the nuisance unknowns.
    pub equations: usize,
    /// Target unknowns present in the rows.
    pub unknowns: usize,
    /// Rank of the targets after nuisance elimination.
    pub rank: usize,
    pub decoded: Vec<SymbolId>,
}

impl DecodeDiagnostics {
    pub fn triple(&self) -> (usize, usize, usize) {
        (self.equations, self.unknowns, self.rank)
    }
}

/// Estimate `ŝ_k = D_k·y` of a decoded symbol.
#[derive(Clone, Debug)]
pub struct DecodedSymbol {
    pub symbol: SymbolId,
    pub value: C64,
    /// Coefficients of the estimate on the noise samples.
    pub noise: Vec<C64>,
}

#[derive(Clone, Debug)]
pub struct DecodeOutcome {
    pub symbols: Vec<DecodedSymbol>,
    pub diagnostics: DecodeDiagnostics,
}

/// Everything observed during a run.
#[derive(Clone, Debug)]
pub struct Transcript {
    pub schedule: Schedule,
    pub seed: u64,
    pub mode: NoiseMode,
    pub states: Vec<ChannelState>,
    pub observations: Vec<Observation>,
    pub symbol_values: Vec<C64>,
    pub noise_values: Vec<C64>,
    /// First slot at whose end each symbol became decodable, per receiver.
    pub decoded: [BTreeMap<SymbolId, usize>; 2],
    pub diagnostics: Vec<DecodeDiagnostics>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationResult {
    pub scheme: String,
    pub seed: u64,
    pub slots: usize,
    pub success: [bool; 2],
    pub achieved: DofPoint,
    pub diagnostics: Vec<DecodeDiagnostics>,
    pub max_residual: f64,
    /// Mean squared error of the final own-symbol estimates.
    pub symbol_mse: Option<f64>,
}

impl SimulationResult {
    pub fn all_decoded(&self) -> bool {
        self.success.iter().all(|&s| s)
    }

    pub fn csv_header() -> [&'static str; 9] {
        ["scheme", "seed", "T", "d1_num", "d1_den", "d2_num", "d2_den", "success", "max_residual"]
    }

    pub fn csv_record(&self) -> [String; 9] {
        [
            self.scheme.clone(),
            self.seed.to_string(),
            self.slots.to_string(),
            self.achieved.d1.numer().to_string(),
            self.achieved.d1.denom().to_string(),
            self.achieved.d2.numer().to_string(),
            self.achieved.d2.denom().to_string(),
            self.all_decoded().to_string(),
            format!("{:e}", self.max_residual),
        ]
    }
}

pub fn achieved_dof(result: &SimulationResult) -> DofPoint {
    result.achieved
}

pub fn write_results_csv<W: Write>(results: &[SimulationResult], w: W) -> Result<(), EngineError> {
    let err = |e: csv::Error| EngineError::Export(e.to_string());
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SimulationResult::csv_header()).map_err(err)?;
    for r in results {
        out.write_record(r.csv_record()).map_err(err)?;
    }
    out.flush().map_err(|e| EngineError::Export(e.to_string()))
}

fn noise_layout(network: &Network) -> (usize, [usize; 2]) {
    let n1 = network.rx_antennas(Receiver::R1);
    let n2 = network.rx_antennas(Receiver::R2);
    (n1 + n2, [0, n1])
}

fn noise_index(network: &Network, slot: usize, r: Receiver, antenna: usize) -> usize {
    let (per_slot, offset) = noise_layout(network);
    (slot - 1) * per_slot + offset[r.index()] + antenna
}

/// Symbols a receiver wants to recover: its own plus those it must replay.
pub fn decode_targets(schedule: &Schedule, r: Receiver) -> BTreeSet<SymbolId> {
    let mut t: BTreeSet<SymbolId> = schedule.own_symbols(r).map(|s| s.id).collect();
    t.extend(schedule.replayed_by(r));
    t
}

fn decode_rows(
    receiver: Receiver,
    slot: usize,
    observations: &[&Observation],
    targets: &BTreeSet<SymbolId>,
    n_symbols: usize,
) -> Result<DecodeOutcome, EngineError> {
    let (rows, excluded): (Vec<&Observation>, Vec<&Observation>) =
        observations.iter().copied().partition(|o| o.admissible());
    let zero = C64::new(0.0, 0.0);
    let active: Vec<SymbolId> = (0..n_symbols)
        .filter(|&k| rows.iter().any(|o| o.coefficients[k] != zero))
        .collect();
    for o in &rows {
        if o.receiver != receiver || o.slot > slot {
            return Err(EngineError::Visibility {
                receiver,
                slot,
                detail: format!("row from {} slot {} offered to the decoder", o.receiver, o.slot),
            });
        }
    }
    let a = CMatrix::from_fn(rows.len(), active.len(), |i, j| rows[i].coefficients[active[j]]);
    let target_cols: Vec<usize> = (0..active.len()).filter(|&j| targets.contains(&active[j])).collect();
    let nuisance_cols: Vec<usize> = (0..active.len()).filter(|&j| !targets.contains(&active[j])).collect();
    let rank_all = rank(&a, DEFAULT_REL_TOL);
    let rank_nuisance = rank(&a.select_columns(&nuisance_cols), DEFAULT_REL_TOL);
    let leverage = row_space_leverage(&a, DEFAULT_REL_TOL);
    let (solvable, unresolved): (Vec<usize>, Vec<usize>) =
        (0..active.len()).partition(|&j| leverage[j] > LEVERAGE_THRESHOLD);

    let mut symbols = Vec::new();
    if !solvable.is_empty() {
        let q = orthogonal_complement(&a.select_columns(&unresolved), DEFAULT_REL_TOL);
        let qh = q.adjoint();
        let reduced = qh.mul(&a.select_columns(&solvable))?;
        // Rows of `decoder` map the stacked receptions to the estimates.
        let decoder = solve_least_squares(&reduced, &qh)?.solution;
        let y = CMatrix::column_vector(&rows.iter().map(|o| o.value).collect::<Vec<_>>());
        let n_noise = rows.first().map_or(0, |o| o.noise.len());
        let b = CMatrix::from_fn(rows.len(), n_noise, |i, j| rows[i].noise[j]);
        let est = decoder.mul(&y)?;
        let est_noise = decoder.mul(&b)?;
        for (i, &j) in solvable.iter().enumerate() {
            if targets.contains(&active[j]) {
                symbols.push(DecodedSymbol {
                    symbol: active[j],
                    value: est[(i, 0)],
                    noise: est_noise.row(i).to_vec(),
                });
            }
        }
    }
    let diagnostics = DecodeDiagnostics {
        receiver,
        slot,
        rows: rows.len(),
        excluded_rows: excluded.len(),
        equations: rows.len() - rank_nuisance,
        unknowns: target_cols.len(),
        rank: rank_all - rank_nuisance,
        decoded: symbols.iter().map(|s| s.symbol).collect(),
    };
    Ok(DecodeOutcome { symbols, diagnostics })
}

/// Re-runs the decoder of `receiver` on the rows it had at the end of `slot`.
pub fn decode(transcript: &Transcript, receiver: Receiver, slot: usize) -> Result<DecodeOutcome, EngineError> {
    if slot == 0 || slot > transcript.schedule.total_slots() {
        return Err(EngineError::SlotOutOfRange(slot));
    }
    let obs: Vec<&Observation> = transcript
        .observations
        .iter()
        .filter(|o| o.receiver == receiver && o.slot <= slot)
        .collect();
    decode_rows(
        receiver,
        slot,
        &obs,
        &decode_targets(&transcript.schedule, receiver),
        transcript.schedule.symbols.len(),
    )
}

fn transmit_scale(mode: NoiseMode, width: usize) -> f64 {
    match mode {
        NoiseMode::Noisy { power } if width > 0 => (power / width as f64).sqrt(),
        _ => 1.0,
    }
}

fn fresh_signal(k: SymbolId, value: C64, scale: f64, ns: usize, nn: usize) -> LinearSignal {
    let mut s = LinearSignal::zero(ns, nn);
    s.value = value * scale;
    s.coef[k] = C64::new(scale, 0.0);
    s
}

/// Runs `schedule` with channel, symbol and noise draws derived from `seed`.
pub fn run(schedule: &Schedule, seed: u64, mode: NoiseMode) -> Result<(Transcript, SimulationResult), EngineError> {
    schedule.validate()?;
    mode.validate()?;
    let network = schedule.network;
    let total = schedule.total_slots();
    let ns = schedule.symbols.len();
    let nn = if mode.is_noisy() { noise_layout(&network).0 * total } else { 0 };
    let symbol_values: Vec<C64> = schedule
        .symbols
        .iter()
        .map(|s| SeededRng::new(seed, stream_id(StreamDomain::Symbols, s.origin_slot, s.id)).unit_phase())
        .collect();
    let mut noise_values = vec![C64::new(0.0, 0.0); nn];
    let targets = [decode_targets(schedule, Receiver::R1), decode_targets(schedule, Receiver::R2)];

    let mut states = Vec::with_capacity(total);
    let mut observations: Vec<Observation> = Vec::new();
    let mut estimates: [BTreeMap<SymbolId, DecodedSymbol>; 2] = [BTreeMap::new(), BTreeMap::new()];
    let mut decoded: [BTreeMap<SymbolId, usize>; 2] = [BTreeMap::new(), BTreeMap::new()];
    let mut diagnostics = Vec::new();
    let mut max_residual = 0.0f64;

    for t in 1..=total {
        let state = sample_state(&network, t, seed)?;

        let mut tx_signals: Vec<Vec<LinearSignal>> = Vec::new();
        for &term in network.transmitters() {
            let m = network.antennas(term).expect("transmitter");
            let mut ant = vec![LinearSignal::zero(ns, nn); m];
            if let Action::SendFresh { symbols, .. } = schedule.action(t, term) {
                let scale = transmit_scale(mode, symbols.len());
                for (a, &k) in symbols.iter().enumerate() {
                    ant[a] = fresh_signal(k, symbol_values[k], scale, ns, nn);
                }
            }
            tx_signals.push(ant);
        }

        let mut rx_signals: Vec<Vec<LinearSignal>> = Vec::new();
        for r in Receiver::BOTH {
            let n = network.rx_antennas(r);
            let mut ant = vec![LinearSignal::zero(ns, nn); n];
            match schedule.action(t, r.terminal()) {
                Action::RelayReceived { segments } => {
                    let mut payload = Vec::new();
                    for seg in segments {
                        if seg.slot >= t {
                            return Err(EngineError::Causality {
                                slot: t,
                                detail: format!("{r} relays slot {} before receiving it", seg.slot),
                            });
                        }
                        for a in seg.antennas() {
                            let o = observations
                                .iter()
                                .find(|o| o.receiver == r && o.slot == seg.slot && o.antenna == a)
                                .expect("reception exists for an earlier slot");
                            payload.push(o.signal());
                        }
                    }
                    let alpha = match mode {
                        NoiseMode::Noisy { power } => {
                            let energy: f64 = payload.iter().map(|s| s.value.norm_sqr()).sum();
                            if energy > 0.0 {
                                (power / energy).sqrt()
                            } else {
                                1.0
                            }
                        }
                        NoiseMode::NoiseFree => 1.0,
                    };
                    for (a, s) in payload.iter().enumerate() {
                        ant[a] = s.scaled(alpha);
                    }
                }
                Action::ReplayDecoded { symbols } => {
                    let scale = transmit_scale(mode, symbols.len());
                    for (a, &k) in symbols.iter().enumerate() {
                        let ready = decoded[r.index()].get(&k).is_some_and(|&d| d < t);
                        let Some(est) = estimates[r.index()].get(&k).filter(|_| ready) else {
                            return Err(EngineError::Causality {
                                slot: t,
                                detail: format!(
                                    "{r} replays {} but has not decoded it before slot {t}",
                                    schedule.symbols[k].label
                                ),
                            });
                        };
                        let mut s = LinearSignal::zero(ns, nn);
                        s.value = est.value * scale;
                        s.coef[k] = C64::new(scale, 0.0);
                        for (dst, src) in s.noise.iter_mut().zip(&est.noise) {
                            *dst = src * scale;
                        }
                        ant[a] = s;
                    }
                }
                Action::Silent | Action::SendFresh { .. } => {}
            }
            rx_signals.push(ant);
        }

        let to_vec = |sigs: &[LinearSignal]| CMatrix::column_vector(&sigs.iter().map(|s| s.value).collect::<Vec<_>>());
        let tx_values: Vec<CMatrix> = tx_signals.iter().map(|s| to_vec(s)).collect();
        let xr = [to_vec(&rx_signals[0]), to_vec(&rx_signals[1])];
        let noise_stream = stream_id(StreamDomain::Noise, t, 0);
        let (y1, y2) = channel::apply(
            &state,
            &tx_values,
            [&xr[0], &xr[1]],
            mode,
            &mut SeededRng::new(seed, noise_stream),
        )?;
        if mode.is_noisy() {
            // Same stream, same order as `apply`: R1's samples, then R2's.
            let mut rng = SeededRng::new(seed, noise_stream);
            for r in Receiver::BOTH {
                let w = channel::awgn(&mut rng, network.rx_antennas(r));
                for a in 0..w.rows() {
                    noise_values[noise_index(&network, t, r, a)] = w[(a, 0)];
                }
            }
        }

        for (r, y) in Receiver::BOTH.into_iter().zip([&y1, &y2]) {
            let outgoing = r.outgoing_link();
            for a in 0..network.rx_antennas(r) {
                let mut sig = LinearSignal::zero(ns, nn);
                for (j, signals) in tx_signals.iter().enumerate() {
                    let h = state.direct(j, r);
                    let link = network.direct_link(j, r);
                    for (i, s) in signals.iter().enumerate() {
                        sig.accumulate(h[(a, i)], s, Some(link));
                    }
                }
                let g = state.cooperative(r);
                for (i, s) in rx_signals[r.other().index()].iter().enumerate() {
                    sig.accumulate(g[(a, i)], s, Some(r.incoming_link()));
                }
                if mode.is_noisy() {
                    sig.noise[noise_index(&network, t, r, a)] += C64::new(1.0, 0.0);
                }
                let tracked: C64 = sig.coef.iter().zip(&symbol_values).map(|(c, s)| c * s).sum::<C64>()
                    + sig.noise.iter().zip(&noise_values).map(|(c, w)| c * w).sum::<C64>();
                let magnitude: f64 = sig.coef.iter().zip(&symbol_values).map(|(c, s)| (c * s).norm()).sum::<f64>()
                    + sig.noise.iter().zip(&noise_values).map(|(c, w)| (c * w).norm()).sum::<f64>();
                let residual = (tracked - y[(a, 0)]).norm() / magnitude.max(y[(a, 0)].norm()).max(1.0);
                max_residual = max_residual.max(residual);
                if residual > TRACKING_TOL {
                    return Err(EngineError::Tracking {
                        receiver: r,
                        slot: t,
                        antenna: a,
                        residual,
                    });
                }
                let zero = C64::new(0.0, 0.0);
                let visible = sig
                    .coef
                    .iter()
                    .zip(&sig.deps)
                    .map(|(c, d)| *c == zero || !d.contains(outgoing))
                    .collect();
                observations.push(Observation {
                    receiver: r,
                    slot: t,
                    antenna: a,
                    coefficients: sig.coef,
                    visible,
                    dependencies: sig.deps,
                    noise: sig.noise,
                    value: y[(a, 0)],
                });
            }
        }
        states.push(state);

        for r in Receiver::BOTH {
            let obs: Vec<&Observation> = observations.iter().filter(|o| o.receiver == r).collect();
            let outcome = decode_rows(r, t, &obs, &targets[r.index()], ns)?;
            for s in outcome.symbols {
                decoded[r.index()].entry(s.symbol).or_insert(t);
                estimates[r.index()].insert(s.symbol, s);
            }
            diagnostics.push(outcome.diagnostics);
        }
    }

    let mut success = [true; 2];
    let mut counts = [0i64; 2];
    let mut sq_err = 0.0;
    let mut n_err = 0usize;
    for r in Receiver::BOTH {
        for s in schedule.own_symbols(r) {
            match estimates[r.index()].get(&s.id) {
                Some(e) => {
                    counts[r.index()] += 1;
                    sq_err += (e.value - symbol_values[s.id]).norm_sqr();
                    n_err += 1;
                }
                None => success[r.index()] = false,
            }
        }
    }
    let t = total as i64;
    let result = SimulationResult {
        scheme: schedule.descriptor.name.clone(),
        seed,
        slots: total,
        success,
        achieved: DofPoint::new(rational(counts[0], t), rational(counts[1], t)),
        diagnostics: diagnostics.clone(),
        max_residual,
        symbol_mse: (n_err > 0).then(|| sq_err / n_err as f64),
    };
    let transcript = Transcript {
        schedule: schedule.clone(),
        seed,
        mode,
        states,
        observations,
        symbol_values,
        noise_values,
        decoded,
        diagnostics,
    };
    Ok((transcript, result))
}

/// End-to-end channel seen by one receiver's final admissible rows.
#[derive(Clone, Debug)]
pub struct EffectiveChannel {
    /// Columns of the receiver's own symbols.
    pub own: CMatrix,
    /// Columns of every other symbol present.
    pub other: CMatrix,
    /// Coefficients on the noise samples (empty without noise).
    pub noise: CMatrix,
}

impl Transcript {
    pub fn effective_channel(&self, r: Receiver) -> EffectiveChannel {
        let rows: Vec<&Observation> = self
            .observations
            .iter()
            .filter(|o| o.receiver == r && o.admissible())
            .collect();
        let zero = C64::new(0.0, 0.0);
        let present = |k: &SymbolId| rows.iter().any(|o| o.coefficients[*k] != zero);
        let own: Vec<SymbolId> = self.schedule.own_symbols(r).map(|s| s.id).filter(present).collect();
        let other: Vec<SymbolId> = self
            .schedule
            .symbols
            .iter()
            .filter(|s| s.owner != r)
            .map(|s| s.id)
            .filter(present)
            .collect();
        let pick = |cols: &[SymbolId]| CMatrix::from_fn(rows.len(), cols.len(), |i, j| rows[i].coefficients[cols[j]]);
        let nn = rows.first().map_or(0, |o| o.noise.len());
        EffectiveChannel {
            own: pick(&own),
            other: pick(&other),
            noise: CMatrix::from_fn(rows.len(), nn, |i, j| rows[i].noise[j]),
        }
    }

    pub fn final_diagnostics(&self, r: Receiver) -> Option<&DecodeDiagnostics> {
        self.diagnostics.iter().rev().find(|d| d.receiver == r)
    }

    /// Structured summary: actions, matrix digests and decode diagnostics.
    pub fn export(&self) -> TranscriptDocument {
        let mut slots = Vec::new();
        for (idx, state) in self.states.iter().enumerate() {
            let t = idx + 1;
            let actions = self
                .schedule
                .network
                .terminals()
                .into_iter()
                .map(|term| (term.to_string(), self.schedule.action(t, term).clone()))
                .collect();
            let matrices = self
                .schedule
                .network
                .matrix_names()
                .iter()
                .filter_map(|&name| state.matrix(name).map(|m| (name.to_string(), MatrixDigest::of(m))))
                .collect();
            let diagnostics = self.diagnostics.iter().filter(|d| d.slot == t).cloned().collect();
            slots.push(SlotRecord {
                slot: t,
                actions,
                matrices,
                diagnostics,
            });
        }
        TranscriptDocument {
            scheme: self.schedule.descriptor.name.clone(),
            seed: self.seed,
            mode: self.mode,
            total_slots: self.schedule.total_slots(),
            symbols: self.schedule.symbols.iter().map(|s| s.label.clone()).collect(),
            slots,
            decoded: Receiver::BOTH
                .iter()
                .map(|r| {
                    let labels = self.decoded[r.index()]
                        .iter()
                        .map(|(&k, &slot)| (self.schedule.symbols[k].label.clone(), slot))
                        .collect();
                    (r.to_string(), labels)
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixDigest {
    pub rows: usize,
    pub cols: usize,
    pub first_row: Vec<[f64; 2]>,
    pub sha256: String,
}

impl MatrixDigest {
    pub fn of(m: &CMatrix) -> Self {
        let mut h = Sha256::new();
        for z in m.as_slice() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
        let sha256 = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            first_row: if m.rows() > 0 { m.row(0).iter().map(|z| [z.re, z.im]).collect() } else { Vec::new() },
            sha256,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SlotRecord {
    pub slot: usize,
    pub actions: BTreeMap<String, Action>,
    pub matrices: BTreeMap<String, MatrixDigest>,
    pub diagnostics: Vec<DecodeDiagnostics>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranscriptDocument {
    pub scheme: String,
    pub seed: u64,
    pub mode: NoiseMode,
    pub total_slots: usize,
    pub symbols: Vec<String>,
    pub slots: Vec<SlotRecord>,
    /// Receiver → symbol label → first decode slot.
    pub decoded: BTreeMap<String, BTreeMap<String, usize>>,
}

impl TranscriptDocument {
    pub fn to_json(&self) -> Result<String, EngineError> {
        serde_json::to_string_pretty(self).map_err(|e| EngineError::Export(e.to_string()))
    }
}
