//! Simulation and verification of DoF regions for two-user MIMO interference
//! and broadcast channels with full-duplex receiver cooperation and no CSI at
//! the transmitters.

pub mod analysis;
pub mod channel;
pub mod engine;
pub mod numerics;
pub mod regions;
pub mod schemes;

pub use channel::{
    BcConfig, ChannelError, ChannelState, CsiView, IcConfig, MatrixName, MatrixSet, Network, NoiseMode, Receiver,
    Terminal,
};
pub use numerics::{CMatrix, NumericsError, Rational, C64};
pub use regions::{DofPoint, HalfPlane, Region2D, RegionError};
pub use schemes::{Action, RelaySegment, Schedule, SchemeDescriptor, SchemeError, SlotAction, SymbolId, SymbolInfo};
pub use engine::{DecodeDiagnostics, EngineError, Observation, SimulationResult, Transcript};
pub use analysis::{AnalysisError, ConsistencyReport, DecodabilityReport, Family, SlopeEstimate, Verdict};
