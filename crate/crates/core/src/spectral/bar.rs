use serde::{Deserialize, Serialize};

use super::bands::{band_ratio, relative_increase, ChannelSelection};
use super::welch::{welch_psd, WelchConfig};
use super::SpectralError;
use crate::scalar::Real;
use crate::signal::{slice_epochs, BandDefinition, Epoch, Phase, Recording, SessionProtocol};

/// Numerator and denominator bands of a rhythm power ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioBands {
    pub numerator: BandDefinition,
    pub denominator: BandDefinition,
}

impl RatioBands {
    /// Beta over alpha.
    pub const fn beta_alpha() -> Self {
        Self {
            numerator: BandDefinition::beta(),
            denominator: BandDefinition::alpha(),
        }
    }

    /// Theta over beta.
    pub const fn theta_beta() -> Self {
        Self {
            numerator: BandDefinition::theta(),
            denominator: BandDefinition::beta(),
        }
    }
}

impl Default for RatioBands {
    fn default() -> Self {
        Self::beta_alpha()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarPoint<T> {
    /// Seconds from phase start.
    pub time: f64,
    pub ratio: T,
}

/// Band ratio values at the protocol epochs of one session.
#[derive(Debug, Clone, PartialEq)]
pub struct BarSeries<T> {
    points: Vec<BarPoint<T>>,
    protocol: SessionProtocol,
    baseline: T,
}

impl<T: Real> BarSeries<T> {
    pub fn new(points: Vec<BarPoint<T>>, protocol: SessionProtocol, baseline: T) -> Result<Self, SpectralError> {
        if points.iter().any(|p| !(p.ratio > T::zero())) {
            return Err(SpectralError::InvalidSeries("ratios must be positive".into()));
        }
        if points.windows(2).any(|w| !(w[1].time > w[0].time)) {
            return Err(SpectralError::InvalidSeries("times must be strictly increasing".into()));
        }
        Ok(Self {
            points,
            protocol,
            baseline,
        })
    }

    pub fn points(&self) -> &[BarPoint<T>] {
        &self.points
    }

    pub fn protocol(&self) -> &SessionProtocol {
        &self.protocol
    }

    pub fn baseline(&self) -> T {
        self.baseline
    }

    pub fn ratios(&self) -> Vec<T> {
        self.points.iter().map(|p| p.ratio).collect()
    }

    pub fn relative_increases(&self) -> Result<Vec<T>, SpectralError> {
        self.points
            .iter()
            .map(|p| relative_increase(p.ratio, self.baseline))
            .collect()
    }

    /// `(minutes, ratio)` pairs for curve fitting. The stress curve during
    /// gameplay starts from the resting baseline at minute 0.
    pub fn fit_points(&self) -> Vec<(T, T)> {
        let minutes = |t: f64| T::of(t / 60.0);
        let mut out = Vec::with_capacity(self.points.len() + 1);
        if self.protocol.phase == Phase::DuringGameplay && self.points.first().is_none_or(|p| p.time > 0.0) {
            out.push((T::zero(), self.baseline));
        }
        out.extend(self.points.iter().map(|p| (minutes(p.time), p.ratio)));
        out
    }

    /// CSV with columns `time_s,bar,phase,game_type,gamer_type,music_type,baseline,relative_increase`.
    pub fn to_csv(&self) -> String {
        let p = &self.protocol;
        let mut out = String::from("time_s,bar,phase,game_type,gamer_type,music_type,baseline,relative_increase\n");
        for pt in &self.points {
            let inc = relative_increase(pt.ratio, self.baseline)
                .map(|v| v.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                pt.time, pt.ratio, p.phase, p.game_type, p.gamer_type, p.music_type, self.baseline, inc
            ));
        }
        out
    }

    /// Two-column `x_minutes,y_ratio` CSV of [`fit_points`](Self::fit_points).
    pub fn to_points_csv(&self) -> String {
        let mut out = String::from("x_minutes,y_ratio\n");
        for (x, y) in self.fit_points() {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

/// Band ratio of one epoch.
pub fn epoch_ratio<T: Real>(
    epoch: &Epoch<T>,
    config: &WelchConfig,
    bands: &RatioBands,
    channels: ChannelSelection<'_>,
) -> Result<T, SpectralError> {
    let psd = welch_psd(epoch, config)?;
    band_ratio(&psd, &bands.numerator, &bands.denominator, channels)
}

/// Ratio measured on the first analysis window of a resting recording.
pub fn measure_baseline<T: Real>(
    recording: &Recording<T>,
    config: &WelchConfig,
    bands: &RatioBands,
    channels: ChannelSelection<'_>,
) -> Result<T, SpectralError> {
    let protocol = SessionProtocol {
        epoch_times: vec![recording.start_offset()],
        ..SessionProtocol::baseline(crate::signal::GamerType::Gamer)
    };
    let epochs = slice_epochs(recording, &protocol, config.window_len)?;
    epoch_ratio(&epochs[0], config, bands, channels)
}

/// One ratio per protocol epoch.
pub fn bar_timeseries<T: Real>(
    recording: &Recording<T>,
    protocol: &SessionProtocol,
    config: &WelchConfig,
    bands: &RatioBands,
    baseline: T,
    channels: ChannelSelection<'_>,
) -> Result<BarSeries<T>, SpectralError> {
    let epochs = slice_epochs(recording, protocol, config.window_len)?;
    let points = epochs
        .iter()
        .map(|e| {
            Ok(BarPoint {
                time: e.t_start,
                ratio: epoch_ratio(e, config, bands, channels)?,
            })
        })
        .collect::<Result<Vec<_>, SpectralError>>()?;
    BarSeries::new(points, protocol.clone(), baseline)
}
