//! Recordings, montages, frequency bands and the session protocol.
//!
//! Every type here is immutable once constructed. Constructors validate the
//! invariants so that downstream code can index without re-checking.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("channel {label} has {found} samples, expected {expected}")]
    ChannelLengthMismatch {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("recording has {channels} channel labels but {series} sample series")]
    ChannelCountMismatch { channels: usize, series: usize },
    #[error("sampling rate must be positive and finite, got {0}")]
    InvalidSamplingRate(f64),
    #[error("non-finite sample in channel {label} at index {index}")]
    NonFiniteSample { label: String, index: usize },
    #[error("duplicate channel label {0}")]
    DuplicateLabel(String),
    #[error("electrode {label} at ({x}, {y}) lies outside the unit disc")]
    PositionOutsideDisc { label: String, x: f64, y: f64 },
    #[error("montage {0} has no eeg electrodes")]
    NoEegElectrodes(String),
    #[error("epoch [{t_start}, {t_end}) s exceeds recording span [{rec_start}, {rec_end}) s")]
    EpochOutOfRange {
        t_start: f64,
        t_end: f64,
        rec_start: f64,
        rec_end: f64,
    },
    #[error("protocol has no epoch times")]
    EmptyProtocol,
    #[error("window length must be positive and span at least one sample, got {0} s")]
    InvalidWindow(f64),
    #[error("invalid band {name}: [{f_low}, {f_high}] Hz")]
    InvalidBand { name: String, f_low: f64, f_high: f64 },
    #[error("music type {music} is only valid after gameplay, not during phase {phase}")]
    MusicOutsideAfterPhase { music: MusicType, phase: Phase },
    #[error("epoch times must be finite and non-negative")]
    InvalidEpochTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Eeg,
    Reference,
}

/// One electrode: 10-20 label, projected scalp position and kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelInfo {
    pub label: String,
    /// Azimuthal projection onto the unit disc; +x right ear, +y nose.
    pub position: [f64; 2],
    pub kind: ChannelKind,
}

impl ChannelInfo {
    pub fn new(label: impl Into<String>, position: [f64; 2], kind: ChannelKind) -> Result<Self, SignalError> {
        let label = label.into();
        let [x, y] = position;
        if !(x.is_finite() && y.is_finite()) || x * x + y * y > 1.0 + 1e-12 {
            return Err(SignalError::PositionOutsideDisc { label, x, y });
        }
        Ok(Self { label, position, kind })
    }

    pub fn eeg(label: impl Into<String>, position: [f64; 2]) -> Result<Self, SignalError> {
        Self::new(label, position, ChannelKind::Eeg)
    }

    pub fn is_eeg(&self) -> bool {
        self.kind == ChannelKind::Eeg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Montage {
    pub name: String,
    pub electrodes: Vec<ChannelInfo>,
}

impl Montage {
    pub fn new(name: impl Into<String>, electrodes: Vec<ChannelInfo>) -> Result<Self, SignalError> {
        let name = name.into();
        check_unique(electrodes.iter().map(|c| c.label.as_str()))?;
        for e in &electrodes {
            ChannelInfo::new(e.label.clone(), e.position, e.kind)?;
        }
        if !electrodes.iter().any(ChannelInfo::is_eeg) {
            return Err(SignalError::NoEegElectrodes(name));
        }
        Ok(Self { name, electrodes })
    }

    pub fn len(&self) -> usize {
        self.electrodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.electrodes.is_empty()
    }

    pub fn find(&self, label: &str) -> Option<&ChannelInfo> {
        self.electrodes.iter().find(|c| c.label == label)
    }

    pub fn eeg_electrodes(&self) -> impl Iterator<Item = &ChannelInfo> {
        self.electrodes.iter().filter(|c| c.is_eeg())
    }

    /// Keep only the named electrodes, in the order given.
    pub fn subset(&self, labels: &[&str]) -> Option<Montage> {
        let electrodes = labels
            .iter()
            .map(|l| self.find(l).cloned())
            .collect::<Option<Vec<_>>>()?;
        Montage::new(self.name.clone(), electrodes).ok()
    }
}

fn check_unique<'a>(labels: impl Iterator<Item = &'a str>) -> Result<(), SignalError> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(SignalError::DuplicateLabel(l.to_string()));
        }
    }
    Ok(())
}

/// Multi-channel EEG in microvolts.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording<T> {
    channels: Vec<ChannelInfo>,
    samples: Vec<Vec<T>>,
    sampling_rate: f64,
    start_offset: f64,
}

impl<T: Real> Recording<T> {
    pub fn new(
        channels: Vec<ChannelInfo>,
        samples: Vec<Vec<T>>,
        sampling_rate: f64,
    ) -> Result<Self, SignalError> {
        Self::with_offset(channels, samples, sampling_rate, 0.0)
    }

    pub fn with_offset(
        channels: Vec<ChannelInfo>,
        samples: Vec<Vec<T>>,
        sampling_rate: f64,
        start_offset: f64,
    ) -> Result<Self, SignalError> {
        if !(sampling_rate.is_finite() && sampling_rate > 0.0) {
            return Err(SignalError::InvalidSamplingRate(sampling_rate));
        }
        if channels.len() != samples.len() {
            return Err(SignalError::ChannelCountMismatch {
                channels: channels.len(),
                series: samples.len(),
            });
        }
        check_unique(channels.iter().map(|c| c.label.as_str()))?;
        let expected = samples.first().map_or(0, Vec::len);
        for (ch, series) in channels.iter().zip(&samples) {
            if series.len() != expected {
                return Err(SignalError::ChannelLengthMismatch {
                    label: ch.label.clone(),
                    expected,
                    found: series.len(),
                });
            }
            if let Some(index) = series.iter().position(|v| !v.is_finite()) {
                return Err(SignalError::NonFiniteSample {
                    label: ch.label.clone(),
                    index,
                });
            }
        }
        Ok(Self {
            channels,
            samples,
            sampling_rate,
            start_offset,
        })
    }

    pub fn channels(&self) -> &[ChannelInfo] {
        &self.channels
    }

    pub fn samples(&self) -> &[Vec<T>] {
        &self.samples
    }

    pub fn channel(&self, label: &str) -> Option<&[T]> {
        self.channels
            .iter()
            .position(|c| c.label == label)
            .map(|i| self.samples[i].as_slice())
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn start_offset(&self) -> f64 {
        self.start_offset
    }

    pub fn sample_count(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn duration(&self) -> f64 {
        self.sample_count() as f64 / self.sampling_rate
    }

    /// Append `other` in time. Channel lists and rates must match.
    pub fn concat(&self, other: &Recording<T>) -> Result<Recording<T>, SignalError> {
        if other.sampling_rate != self.sampling_rate {
            return Err(SignalError::InvalidSamplingRate(other.sampling_rate));
        }
        if other.channels != self.channels {
            return Err(SignalError::ChannelCountMismatch {
                channels: self.channels.len(),
                series: other.channels.len(),
            });
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        Recording::with_offset(self.channels.clone(), samples, self.sampling_rate, self.start_offset)
    }

    /// Multiply every sample by `k`.
    pub fn scaled(&self, k: T) -> Recording<T> {
        Recording {
            channels: self.channels.clone(),
            samples: self
                .samples
                .iter()
                .map(|s| s.iter().map(|&v| v * k).collect())
                .collect(),
            sampling_rate: self.sampling_rate,
            start_offset: self.start_offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandName {
    Delta,
    Theta,
    Alpha,
    Beta,
    Custom,
}

impl fmt::Display for BandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BandName::Delta => "delta",
            BandName::Theta => "theta",
            BandName::Alpha => "alpha",
            BandName::Beta => "beta",
            BandName::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Frequency band in Hz, `[f_low, f_high]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandDefinition {
    pub name: BandName,
    pub f_low: f64,
    pub f_high: f64,
}

impl BandDefinition {
    pub fn new(name: BandName, f_low: f64, f_high: f64) -> Result<Self, SignalError> {
        let band = Self { name, f_low, f_high };
        if !(f_low.is_finite() && f_high.is_finite() && 0.0 <= f_low && f_low < f_high) {
            return Err(band.invalid());
        }
        Ok(band)
    }

    pub const fn delta() -> Self {
        Self { name: BandName::Delta, f_low: 0.5, f_high: 4.0 }
    }

    pub const fn theta() -> Self {
        Self { name: BandName::Theta, f_low: 4.0, f_high: 8.0 }
    }

    pub const fn alpha() -> Self {
        Self { name: BandName::Alpha, f_low: 8.0, f_high: 13.0 }
    }

    pub const fn beta() -> Self {
        Self { name: BandName::Beta, f_low: 13.0, f_high: 30.0 }
    }

    pub fn by_name(name: BandName) -> Option<Self> {
        match name {
            BandName::Delta => Some(Self::delta()),
            BandName::Theta => Some(Self::theta()),
            BandName::Alpha => Some(Self::alpha()),
            BandName::Beta => Some(Self::beta()),
            BandName::Custom => None,
        }
    }

    pub fn width(&self) -> f64 {
        self.f_high - self.f_low
    }

    pub fn contains(&self, f: f64) -> bool {
        self.f_low <= f && f <= self.f_high
    }

    /// Validate against the Nyquist frequency of `sampling_rate`.
    pub fn check_nyquist(&self, sampling_rate: f64) -> Result<(), SignalError> {
        if self.f_high > sampling_rate / 2.0 {
            return Err(self.invalid());
        }
        Ok(())
    }

    fn invalid(&self) -> SignalError {
        SignalError::InvalidBand {
            name: self.name.to_string(),
            f_low: self.f_low,
            f_high: self.f_high,
        }
    }
}

macro_rules! label_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub fn as_str(&self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl std::str::FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!("unknown {} {other:?}", stringify!($name))),
                }
            }
        }
    };
}

label_enum!(Phase {
    Baseline => "baseline",
    DuringGameplay => "during_gameplay",
    AfterGameplay => "after_gameplay",
});

label_enum!(GameType {
    Puzzle => "puzzle",
    Strategic => "strategic",
    Combinational => "combinational",
    None => "none",
});

label_enum!(GamerType {
    Gamer => "gamer",
    NonGamer => "non_gamer",
});

label_enum!(MusicType {
    LowPitch => "low_pitch",
    MediumPitch => "medium_pitch",
    HighPitch => "high_pitch",
    NoMusic => "no_music",
    None => "none",
});

impl MusicType {
    /// Dominant pitch range of the relaxation music, Hz.
    pub fn pitch_range_hz(&self) -> Option<(f64, f64)> {
        match self {
            MusicType::LowPitch => Some((0.0, 200.0)),
            MusicType::MediumPitch => Some((200.0, 600.0)),
            MusicType::HighPitch => Some((600.0, f64::INFINITY)),
            MusicType::NoMusic | MusicType::None => None,
        }
    }
}

impl Phase {
    /// Seconds from phase start at which an analysis window begins.
    pub fn default_epoch_times(&self) -> Vec<f64> {
        match self {
            Phase::Baseline => vec![0.0],
            Phase::DuringGameplay => vec![900.0, 1800.0, 2700.0, 3600.0],
            Phase::AfterGameplay => vec![0.0, 180.0, 360.0, 540.0, 720.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionProtocol {
    pub phase: Phase,
    pub game_type: GameType,
    pub gamer_type: GamerType,
    pub music_type: MusicType,
    pub epoch_times: Vec<f64>,
}

impl SessionProtocol {
    /// Protocol with the phase's default epoch schedule.
    pub fn new(
        phase: Phase,
        game_type: GameType,
        gamer_type: GamerType,
        music_type: MusicType,
    ) -> Result<Self, SignalError> {
        Self::with_times(phase, game_type, gamer_type, music_type, phase.default_epoch_times())
    }

    pub fn with_times(
        phase: Phase,
        game_type: GameType,
        gamer_type: GamerType,
        music_type: MusicType,
        epoch_times: Vec<f64>,
    ) -> Result<Self, SignalError> {
        let p = Self {
            phase,
            game_type,
            gamer_type,
            music_type,
            epoch_times,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn baseline(gamer_type: GamerType) -> Self {
        Self {
            phase: Phase::Baseline,
            game_type: GameType::None,
            gamer_type,
            music_type: MusicType::None,
            epoch_times: Phase::Baseline.default_epoch_times(),
        }
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if self.music_type != MusicType::None && self.phase != Phase::AfterGameplay {
            return Err(SignalError::MusicOutsideAfterPhase {
                music: self.music_type,
                phase: self.phase,
            });
        }
        if self.epoch_times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(SignalError::InvalidEpochTime);
        }
        Ok(())
    }
}

/// A fixed-length window cut from a recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch<T> {
    pub channels: Vec<ChannelInfo>,
    pub samples: Vec<Vec<T>>,
    pub sampling_rate: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl<T: Real> Epoch<T> {
    pub fn sample_count(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Wrap a whole recording as one epoch.
    pub fn from_recording(rec: &Recording<T>) -> Self {
        Self {
            channels: rec.channels().to_vec(),
            samples: rec.samples().to_vec(),
            sampling_rate: rec.sampling_rate(),
            t_start: rec.start_offset(),
            t_end: rec.start_offset() + rec.duration(),
        }
    }
}

/// Cut one window of `window_len` seconds at every protocol epoch time.
///
/// Epoch times are measured from the start of the phase, which coincides
/// with `start_offset` of the recording. Sample indices are rounded to the
/// nearest sample.
pub fn slice_epochs<T: Real>(
    recording: &Recording<T>,
    protocol: &SessionProtocol,
    window_len: f64,
) -> Result<Vec<Epoch<T>>, SignalError> {
    if protocol.epoch_times.is_empty() {
        return Err(SignalError::EmptyProtocol);
    }
    protocol.validate()?;
    let fs = recording.sampling_rate();
    let len = (window_len * fs).round();
    if !(window_len.is_finite() && len >= 1.0) {
        return Err(SignalError::InvalidWindow(window_len));
    }
    let len = len as usize;
    let total = recording.sample_count();
    let rec_start = recording.start_offset();

    protocol
        .epoch_times
        .iter()
        .map(|&t| {
            let out_of_range = || SignalError::EpochOutOfRange {
                t_start: t,
                t_end: t + window_len,
                rec_start,
                rec_end: rec_start + recording.duration(),
            };
            let start = ((t - rec_start) * fs).round();
            if start < 0.0 {
                return Err(out_of_range());
            }
            let start = start as usize;
            if start + len > total {
                return Err(out_of_range());
            }
            Ok(Epoch {
                channels: recording.channels().to_vec(),
                samples: recording
                    .samples()
                    .iter()
                    .map(|s| s[start..start + len].to_vec())
                    .collect(),
                sampling_rate: fs,
                t_start: t,
                t_end: t + window_len,
            })
        })
        .collect()
}
