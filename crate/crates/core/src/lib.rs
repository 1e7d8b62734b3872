//! EEG rhythm power ratio analysis.
//!
//! The pipeline runs from raw multi-channel recordings ([`ingest`]) through
//! Welch spectra and band power ratios ([`spectral`]) to scalp maps
//! ([`topo`]) and sigmoid/polynomial curve models of the ratio over time
//! ([`regress`]). [`synth`] generates recordings with known band powers for
//! closed-loop checks.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ingest;
pub mod montage;
pub mod regress;
pub mod scalar;
pub mod signal;
pub mod spectral;
pub mod synth;
pub mod tables;
pub mod topo;

pub use scalar::Real;
pub use signal::{
    slice_epochs, BandDefinition, BandName, ChannelInfo, ChannelKind, Epoch, GameType, GamerType, Montage, MusicType,
    Phase, Recording, SessionProtocol,
};

pub type RecordingF64 = signal::Recording<f64>;
pub type RecordingF32 = signal::Recording<f32>;
pub type EpochF64 = signal::Epoch<f64>;
pub type PsdEstimateF64 = spectral::PsdEstimate<f64>;
pub type PsdEstimateF32 = spectral::PsdEstimate<f32>;
pub type BarSeriesF64 = spectral::BarSeries<f64>;
pub type TopoVectorF64 = topo::TopoVector<f64>;
pub type TopoGridF64 = topo::TopoGrid<f64>;
pub type FourPlF64 = regress::FourPl<f64>;
pub type QuarticF64 = regress::Quartic<f64>;
pub type FitResultF64 = regress::FitResult<f64>;
pub type FitResultF32 = regress::FitResult<f32>;
