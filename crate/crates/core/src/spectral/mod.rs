//! Welch power spectral density, band powers and rhythm power ratios.
//!
//! Each analysis window is split into `L` overlapped segments of length `M`;
//! every segment is tapered, transformed and normalised by `M·U·fs`, where
//! `U` is the mean squared taper value. The one-sided Welch spectrum is the
//! mean of these periodograms, in µV²/Hz. Band power is the trapezoidal
//! integral of the spectrum over the band, and a rhythm ratio (BAR, TBR)
//! divides two band powers.

mod bands;
mod bar;
mod welch;
mod window;

use thiserror::Error;

use crate::signal::SignalError;

pub use self::bands::{
    band_power, band_ratio, channel_band_power, channel_band_ratios, integrate_band, power_ratio, relative_increase,
    ChannelSelection,
};
pub use self::bar::{bar_timeseries, epoch_ratio, measure_baseline, BarPoint, BarSeries, RatioBands};
pub use self::welch::{
    frequency_grid, periodogram_segment, welch_channel, welch_psd, Periodogram, PsdEstimate, Segmentation, WelchConfig,
};
pub use self::window::{window_power_norm, Taper};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("segment is empty")]
    EmptySegment,
    #[error("segmentation needs {needed} samples, epoch has {available}")]
    SegmentTooLong { needed: usize, available: usize },
    #[error("invalid Welch configuration: {0}")]
    InvalidConfig(String),
    #[error("band [{f_low}, {f_high}] Hz is outside [0, {nyquist}] Hz")]
    BandOutOfRange { f_low: f64, f_high: f64, nyquist: f64 },
    #[error("denominator band power is zero")]
    ZeroDenominatorPower,
    #[error("current ratio must be positive, got {0}")]
    NonPositiveCurrent(f64),
    #[error("channel {0:?} is not in the spectrum")]
    UnknownChannel(String),
    #[error("no channels selected")]
    NoChannels,
    #[error("invalid ratio series: {0}")]
    InvalidSeries(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
}
