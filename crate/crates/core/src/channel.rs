//! Per-slot channel realizations for the two-user MIMO IC and BC with
//! full-duplex receivers, and the receivers' channel-knowledge rules.
//!
//! Receiver outputs follow the model equations exactly:
//!
//! ```text
//! IC: y1 = H11·x1 + H12·x2 + G12·xr2 + w1      y2 = H21·x1 + H22·x2 + G21·xr1 + w2
//! BC: y1 = H1·x + G12·xr2 + w1                 y2 = H2·x + G21·xr1 + w2
//! ```
//!
//! A receiver's own transmission never appears in its own output.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{gaussian_matrix, CMatrix, NumericsError, SeededRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("power guard: {terminal} transmitted {energy:.3e} > 10·P = {limit:.3e}")]
    PowerGuard {
        terminal: Terminal,
        energy: f64,
        limit: f64,
    },
    #[error("terminal {terminal} does not exist in {network}")]
    UnknownTerminal { terminal: Terminal, network: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Receiver {
    R1,
    R2,
}

impl Receiver {
    pub const BOTH: [Receiver; 2] = [Receiver::R1, Receiver::R2];

    pub fn index(self) -> usize {
        match self {
            Receiver::R1 => 0,
            Receiver::R2 => 1,
        }
    }

    pub fn other(self) -> Receiver {
        match self {
            Receiver::R1 => Receiver::R2,
            Receiver::R2 => Receiver::R1,
        }
    }

    pub fn terminal(self) -> Terminal {
        match self {
            Receiver::R1 => Terminal::R1,
            Receiver::R2 => Terminal::R2,
        }
    }

    /// The cooperative link this receiver hears (`G12` for R1).
    pub fn incoming_link(self) -> MatrixName {
        match self {
            Receiver::R1 => MatrixName::G12,
            Receiver::R2 => MatrixName::G21,
        }
    }

    /// The cooperative link this receiver drives, whose realization it never learns.
    pub fn outgoing_link(self) -> MatrixName {
        self.other().incoming_link()
    }
}

impl fmt::Display for Receiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.terminal().fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Terminal {
    T1,
    T2,
    /// The single transmitter of the BC.
    T,
    R1,
    R2,
}

impl Terminal {
    pub fn receiver(self) -> Option<Receiver> {
        match self {
            Terminal::R1 => Some(Receiver::R1),
            Terminal::R2 => Some(Receiver::R2),
            _ => None,
        }
    }

    pub fn is_transmitter(self) -> bool {
        self.receiver().is_none()
    }
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Terminal::T1 => "T1",
            Terminal::T2 => "T2",
            Terminal::T => "T",
            Terminal::R1 => "R1",
            Terminal::R2 => "R2",
        };
        f.write_str(s)
    }
}

/// `(M1, M2, N1, N2)` interference channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IcConfig {
    pub m1: usize,
    pub m2: usize,
    pub n1: usize,
    pub n2: usize,
}

impl IcConfig {
    pub fn new(m1: usize, m2: usize, n1: usize, n2: usize) -> Result<Self, ChannelError> {
        if [m1, m2, n1, n2].contains(&0) {
            return Err(ChannelError::Config(format!(
                "antenna counts must be >= 1, got ({m1},{m2},{n1},{n2})"
            )));
        }
        Ok(Self { m1, m2, n1, n2 })
    }
}

impl fmt::Display for IcConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IC({},{},{},{})", self.m1, self.m2, self.n1, self.n2)
    }
}

/// `(M, N1, N2)` broadcast channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BcConfig {
    pub m: usize,
    pub n1: usize,
    pub n2: usize,
}

impl BcConfig {
    pub fn new(m: usize, n1: usize, n2: usize) -> Result<Self, ChannelError> {
        if [m, n1, n2].contains(&0) {
            return Err(ChannelError::Config(format!(
                "antenna counts must be >= 1, got ({m},{n1},{n2})"
            )));
        }
        Ok(Self { m, n1, n2 })
    }
}

impl fmt::Display for BcConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BC({},{},{})", self.m, self.n1, self.n2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Network {
    Ic(IcConfig),
    Bc(BcConfig),
}

impl Network {
    pub fn transmitters(&self) -> &'static [Terminal] {
        match self {
            Network::Ic(_) => &[Terminal::T1, Terminal::T2],
            Network::Bc(_) => &[Terminal::T],
        }
    }

    pub fn terminals(&self) -> Vec<Terminal> {
        let mut t = self.transmitters().to_vec();
        t.extend([Terminal::R1, Terminal::R2]);
        t
    }

    pub fn has_terminal(&self, t: Terminal) -> bool {
        t.receiver().is_some() || self.transmitters().contains(&t)
    }

    /// Position of a transmitter in [`Network::transmitters`].
    pub fn transmitter_index(&self, t: Terminal) -> Option<usize> {
        self.transmitters().iter().position(|&x| x == t)
    }

    pub fn rx_antennas(&self, r: Receiver) -> usize {
        match (self, r) {
            (Network::Ic(c), Receiver::R1) => c.n1,
            (Network::Ic(c), Receiver::R2) => c.n2,
            (Network::Bc(c), Receiver::R1) => c.n1,
            (Network::Bc(c), Receiver::R2) => c.n2,
        }
    }

    /// Antennas at any terminal (receivers transmit on their receive array).
    pub fn antennas(&self, t: Terminal) -> Option<usize> {
        match (self, t) {
            (_, Terminal::R1) => Some(self.rx_antennas(Receiver::R1)),
            (_, Terminal::R2) => Some(self.rx_antennas(Receiver::R2)),
            (Network::Ic(c), Terminal::T1) => Some(c.m1),
            (Network::Ic(c), Terminal::T2) => Some(c.m2),
            (Network::Bc(c), Terminal::T) => Some(c.m),
            _ => None,
        }
    }

    /// Name of the matrix from transmitter `tx_index` to receiver `r`.
    pub fn direct_link(&self, tx_index: usize, r: Receiver) -> MatrixName {
        match (self, tx_index, r) {
            (Network::Ic(_), 0, Receiver::R1) => MatrixName::H11,
            (Network::Ic(_), 1, Receiver::R1) => MatrixName::H12,
            (Network::Ic(_), 0, Receiver::R2) => MatrixName::H21,
            (Network::Ic(_), 1, Receiver::R2) => MatrixName::H22,
            (Network::Bc(_), 0, Receiver::R1) => MatrixName::H1,
            (Network::Bc(_), 0, Receiver::R2) => MatrixName::H2,
            _ => panic!("transmitter index {tx_index} out of range"),
        }
    }

    pub fn matrix_names(&self) -> &'static [MatrixName] {
        use MatrixName::*;
        match self {
            Network::Ic(_) => &[H11, H12, H21, H22, G12, G21],
            Network::Bc(_) => &[H1, H2, G12, G21],
        }
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Network::Ic(c) => c.fmt(f),
            Network::Bc(c) => c.fmt(f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MatrixName {
    H11,
    H12,
    H21,
    H22,
    H1,
    H2,
    G12,
    G21,
}

impl MatrixName {
    pub const ALL: [MatrixName; 8] = [
        MatrixName::H11,
        MatrixName::H12,
        MatrixName::H21,
        MatrixName::H22,
        MatrixName::H1,
        MatrixName::H2,
        MatrixName::G12,
        MatrixName::G21,
    ];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for MatrixName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Small set of matrix names.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct MatrixSet(u8);

impl MatrixSet {
    pub const EMPTY: MatrixSet = MatrixSet(0);

    pub fn single(name: MatrixName) -> Self {
        MatrixSet(name.bit())
    }

    pub fn insert(&mut self, name: MatrixName) {
        self.0 |= name.bit();
    }

    pub fn contains(self, name: MatrixName) -> bool {
        self.0 & name.bit() != 0
    }

    pub fn union(self, other: MatrixSet) -> MatrixSet {
        MatrixSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: MatrixSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = MatrixName> {
        MatrixName::ALL.into_iter().filter(move |n| self.contains(*n))
    }
}

impl FromIterator<MatrixName> for MatrixSet {
    fn from_iter<I: IntoIterator<Item = MatrixName>>(iter: I) -> Self {
        let mut s = MatrixSet::EMPTY;
        for n in iter {
            s.insert(n);
        }
        s
    }
}

/// Channel matrices a terminal knows. Receivers learn every listed matrix
/// instantaneously, i.e. for all slots up to and including the current one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsiView {
    pub terminal: Terminal,
    pub visible: MatrixSet,
}

impl CsiView {
    pub fn sees(&self, name: MatrixName) -> bool {
        self.visible.contains(name)
    }

    /// Knowledge of `name` at `slot` while the current slot is `current`.
    pub fn sees_at(&self, name: MatrixName, slot: usize, current: usize) -> bool {
        slot <= current && self.sees(name)
    }
}

pub fn csi_view(network: &Network, terminal: Terminal) -> Result<CsiView, ChannelError> {
    if !network.has_terminal(terminal) {
        return Err(ChannelError::UnknownTerminal {
            terminal,
            network: network.to_string(),
        });
    }
    let visible = match terminal.receiver() {
        None => MatrixSet::EMPTY,
        Some(r) => network
            .matrix_names()
            .iter()
            .copied()
            .filter(|&n| n != r.outgoing_link())
            .collect(),
    };
    Ok(CsiView { terminal, visible })
}

/// Noise-free or noisy operation with per-terminal power budget `power`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum NoiseMode {
    NoiseFree,
    Noisy { power: f64 },
}

impl NoiseMode {
    pub fn noisy_db(power_db: f64) -> Result<Self, ChannelError> {
        let power = 10f64.powf(power_db / 10.0);
        if !(power > 0.0 && power.is_finite()) {
            return Err(ChannelError::Config(format!("invalid power {power_db} dB")));
        }
        Ok(NoiseMode::Noisy { power })
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        match *self {
            NoiseMode::Noisy { power } if !(power > 0.0 && power.is_finite()) => {
                Err(ChannelError::Config(format!("noisy mode needs P > 0, got {power}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_noisy(&self) -> bool {
        matches!(self, NoiseMode::Noisy { .. })
    }
}

/// Domains of the per-run random streams.
#[derive(Clone, Copy, Debug)]
pub(crate) enum StreamDomain {
    Channel = 1,
    Symbols = 2,
    Noise = 3,
}

pub(crate) fn stream_id(domain: StreamDomain, slot: usize, index: usize) -> u64 {
    ((domain as u64) << 56) | ((slot as u64) << 16) | index as u64
}

/// One slot's channel realization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelState {
    pub slot: usize,
    pub network: Network,
    /// `direct[j][r]`: from transmitter `j` to receiver `r`.
    direct: Vec<[CMatrix; 2]>,
    pub g12: CMatrix,
    pub g21: CMatrix,
}

impl ChannelState {
    pub fn direct(&self, tx_index: usize, r: Receiver) -> &CMatrix {
        &self.direct[tx_index][r.index()]
    }

    /// Matrix from the other receiver into `r`.
    pub fn cooperative(&self, r: Receiver) -> &CMatrix {
        match r {
            Receiver::R1 => &self.g12,
            Receiver::R2 => &self.g21,
        }
    }

    pub fn matrix(&self, name: MatrixName) -> Option<&CMatrix> {
        use MatrixName::*;
        match (self.network, name) {
            (Network::Ic(_), H11) => Some(self.direct(0, Receiver::R1)),
            (Network::Ic(_), H12) => Some(self.direct(1, Receiver::R1)),
            (Network::Ic(_), H21) => Some(self.direct(0, Receiver::R2)),
            (Network::Ic(_), H22) => Some(self.direct(1, Receiver::R2)),
            (Network::Bc(_), H1) => Some(self.direct(0, Receiver::R1)),
            (Network::Bc(_), H2) => Some(self.direct(0, Receiver::R2)),
            (_, G12) => Some(&self.g12),
            (_, G21) => Some(&self.g21),
            _ => None,
        }
    }

    pub fn h11(&self) -> &CMatrix {
        self.matrix(MatrixName::H11).expect("IC state")
    }
    pub fn h12(&self) -> &CMatrix {
        self.matrix(MatrixName::H12).expect("IC state")
    }
    pub fn h21(&self) -> &CMatrix {
        self.matrix(MatrixName::H21).expect("IC state")
    }
    pub fn h22(&self) -> &CMatrix {
        self.matrix(MatrixName::H22).expect("IC state")
    }
    pub fn h1(&self) -> &CMatrix {
        self.matrix(MatrixName::H1).expect("BC state")
    }
    pub fn h2(&self) -> &CMatrix {
        self.matrix(MatrixName::H2).expect("BC state")
    }
}

fn draw(seed: u64, slot: usize, name: MatrixName, rows: usize, cols: usize) -> Result<CMatrix, ChannelError> {
    let mut rng = SeededRng::new(seed, stream_id(StreamDomain::Channel, slot, name as usize));
    Ok(gaussian_matrix(&mut rng, rows, cols)?)
}

/// Samples every matrix of slot `t` from its own `(slot, matrix)` substream
/// of `seed`, so slots and matrices are independent and individually
/// reproducible.
pub fn sample_state(network: &Network, t: usize, seed: u64) -> Result<ChannelState, ChannelError> {
    if t == 0 {
        return Err(ChannelError::Config("slots are numbered from 1".into()));
    }
    let n1 = network.rx_antennas(Receiver::R1);
    let n2 = network.rx_antennas(Receiver::R2);
    let mut direct = Vec::new();
    for (j, &tx) in network.transmitters().iter().enumerate() {
        let m = network.antennas(tx).expect("transmitter antennas");
        direct.push([
            draw(seed, t, network.direct_link(j, Receiver::R1), n1, m)?,
            draw(seed, t, network.direct_link(j, Receiver::R2), n2, m)?,
        ]);
    }
    Ok(ChannelState {
        slot: t,
        network: *network,
        direct,
        g12: draw(seed, t, MatrixName::G12, n1, n2)?,
        g21: draw(seed, t, MatrixName::G21, n2, n1)?,
    })
}

pub fn sample_ic_state(cfg: &IcConfig, t: usize, seed: u64) -> Result<ChannelState, ChannelError> {
    sample_state(&Network::Ic(*cfg), t, seed)
}

pub fn sample_bc_state(cfg: &BcConfig, t: usize, seed: u64) -> Result<ChannelState, ChannelError> {
    sample_state(&Network::Bc(*cfg), t, seed)
}

/// Column of i.i.d. CN(0, 1) noise samples.
pub fn awgn(rng: &mut SeededRng, len: usize) -> CMatrix {
    CMatrix::from_fn(len, 1, |_, _| rng.complex_normal())
}

fn check_vector(x: &CMatrix, len: usize, terminal: Terminal) -> Result<(), ChannelError> {
    if x.shape() != (len, 1) {
        return Err(ChannelError::Dimension(format!(
            "{terminal} input is {}x{}, expected {len}x1",
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

fn power_guard(x: &CMatrix, terminal: Terminal, mode: NoiseMode) -> Result<(), ChannelError> {
    if let NoiseMode::Noisy { power } = mode {
        let energy = x.frobenius_norm().powi(2);
        if energy > 10.0 * power {
            return Err(ChannelError::PowerGuard {
                terminal,
                energy,
                limit: 10.0 * power,
            });
        }
    }
    Ok(())
}

/// Receiver outputs for one slot. `tx` holds one column per transmitter in
/// [`Network::transmitters`] order; `xr` holds R1's and R2's transmissions.
pub fn apply(
    state: &ChannelState,
    tx: &[CMatrix],
    xr: [&CMatrix; 2],
    mode: NoiseMode,
    rng: &mut SeededRng,
) -> Result<(CMatrix, CMatrix), ChannelError> {
    mode.validate()?;
    let network = state.network;
    let transmitters = network.transmitters();
    if tx.len() != transmitters.len() {
        return Err(ChannelError::Dimension(format!(
            "{} transmit vectors for {} transmitters",
            tx.len(),
            transmitters.len()
        )));
    }
    for (x, &t) in tx.iter().zip(transmitters) {
        check_vector(x, network.antennas(t).unwrap(), t)?;
        power_guard(x, t, mode)?;
    }
    for r in Receiver::BOTH {
        check_vector(xr[r.index()], network.rx_antennas(r), r.terminal())?;
        power_guard(xr[r.index()], r.terminal(), mode)?;
    }

    let mut outputs = Vec::with_capacity(2);
    for r in Receiver::BOTH {
        let mut y = state.cooperative(r).mul(xr[r.other().index()])?;
        for (j, x) in tx.iter().enumerate() {
            y = y.add(&state.direct(j, r).mul(x)?)?;
        }
        if mode.is_noisy() {
            y = y.add(&awgn(rng, y.rows()))?;
        }
        outputs.push(y);
    }
    let y2 = outputs.pop().unwrap();
    let y1 = outputs.pop().unwrap();
    Ok((y1, y2))
}

#[allow(clippy::too_many_arguments)]
pub fn apply_ic(
    state: &ChannelState,
    x1: &CMatrix,
    x2: &CMatrix,
    xr1: &CMatrix,
    xr2: &CMatrix,
    mode: NoiseMode,
    rng: &mut SeededRng,
) -> Result<(CMatrix, CMatrix), ChannelError> {
    if !matches!(state.network, Network::Ic(_)) {
        return Err(ChannelError::Config("apply_ic on a BC state".into()));
    }
    apply(state, &[x1.clone(), x2.clone()], [xr1, xr2], mode, rng)
}

pub fn apply_bc(
    state: &ChannelState,
    x: &CMatrix,
    xr1: &CMatrix,
    xr2: &CMatrix,
    mode: NoiseMode,
    rng: &mut SeededRng,
) -> Result<(CMatrix, CMatrix), ChannelError> {
    if !matches!(state.network, Network::Bc(_)) {
        return Err(ChannelError::Config("apply_bc on an IC state".into()));
    }
    apply(state, std::slice::from_ref(x), [xr1, xr2], mode, rng)
}
