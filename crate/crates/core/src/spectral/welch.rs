use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::window::{window_power_norm, Taper};
use super::SpectralError;
use crate::scalar::Real;
use crate::signal::{ChannelInfo, Epoch};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WelchConfig {
    /// Analysis window, seconds.
    pub window_len: f64,
    pub segment_count: usize,
    pub overlap_fraction: f64,
    pub taper: Taper,
    /// DFT length; defaults to the segment length.
    pub fft_size: Option<usize>,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self {
            window_len: 10.0,
            segment_count: 4,
            overlap_fraction: 0.5,
            taper: Taper::Hamming,
            fft_size: None,
        }
    }
}

/// Resolved segmentation of one analysis window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segmentation {
    pub window_samples: usize,
    pub segment_len: usize,
    pub hop: usize,
    pub fft_size: usize,
}

impl Segmentation {
    pub fn offsets(&self, count: usize) -> impl Iterator<Item = usize> + '_ {
        (0..count).map(move |d| d * self.hop)
    }
}

const ROUNDING_SLACK: f64 = 1e-9;

impl WelchConfig {
    pub fn validate(&self) -> Result<(), SpectralError> {
        let bad = |why: &str| Err(SpectralError::InvalidConfig(why.to_string()));
        if !(self.window_len.is_finite() && self.window_len > 0.0) {
            return bad("window_len must be positive");
        }
        if self.segment_count == 0 {
            return bad("segment_count must be at least 1");
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return bad("overlap_fraction must lie in [0, 1)");
        }
        Ok(())
    }

    /// Segment length `M = floor(N / (1 + (L-1)(1-overlap)))` and hop
    /// `floor(M (1-overlap))` for a window of `N` samples.
    pub fn segmentation(&self, sampling_rate: f64) -> Result<Segmentation, SpectralError> {
        self.validate()?;
        let window_samples = (self.window_len * sampling_rate).round() as usize;
        let step = 1.0 - self.overlap_fraction;
        let denom = 1.0 + (self.segment_count as f64 - 1.0) * step;
        let segment_len = (window_samples as f64 / denom + ROUNDING_SLACK).floor() as usize;
        if segment_len == 0 {
            return Err(SpectralError::SegmentTooLong {
                needed: self.segment_count,
                available: window_samples,
            });
        }
        let hop = ((segment_len as f64 * step) + ROUNDING_SLACK).floor() as usize;
        if hop == 0 && self.segment_count > 1 {
            return Err(SpectralError::InvalidConfig("overlap leaves a zero hop".into()));
        }
        let fft_size = self.fft_size.unwrap_or(segment_len);
        if fft_size < segment_len {
            return Err(SpectralError::InvalidConfig(format!(
                "fft_size {fft_size} is shorter than the segment length {segment_len}"
            )));
        }
        Ok(Segmentation {
            window_samples,
            segment_len,
            hop,
            fft_size,
        })
    }
}

/// One-sided frequency grid `k · fs / nfft` for `k = 0..=nfft/2`.
pub fn frequency_grid<T: Real>(fft_size: usize, sampling_rate: f64) -> Vec<T> {
    let df = sampling_rate / fft_size as f64;
    (0..=fft_size / 2).map(|k| T::of(k as f64 * df)).collect()
}

/// Planned single-segment periodogram.
pub struct Periodogram<T: Real> {
    window: Vec<T>,
    /// `1 / (M U fs)`
    scale: T,
    fft: Arc<dyn Fft<T>>,
    fft_size: usize,
}

impl<T: Real> Periodogram<T> {
    pub fn new(taper: Taper, segment_len: usize, fft_size: usize, sampling_rate: f64) -> Result<Self, SpectralError> {
        if segment_len == 0 {
            return Err(SpectralError::EmptySegment);
        }
        let u: T = window_power_norm(taper, segment_len);
        Self::with_norm(taper, segment_len, u, fft_size, sampling_rate)
    }

    pub fn with_norm(
        taper: Taper,
        segment_len: usize,
        u: T,
        fft_size: usize,
        sampling_rate: f64,
    ) -> Result<Self, SpectralError> {
        if segment_len == 0 {
            return Err(SpectralError::EmptySegment);
        }
        if fft_size < segment_len {
            return Err(SpectralError::InvalidConfig(format!(
                "fft_size {fft_size} is shorter than the segment length {segment_len}"
            )));
        }
        if !(u > T::zero()) {
            return Err(SpectralError::InvalidConfig("window power must be positive".into()));
        }
        let scale = T::one() / (T::of_usize(segment_len) * u * T::of(sampling_rate));
        Ok(Self {
            window: taper.coefficients(segment_len),
            scale,
            fft: FftPlanner::new().plan_fft_forward(fft_size),
            fft_size,
        })
    }

    pub fn bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    /// Density spectrum of one segment, µV²/Hz, accumulated into `out`.
    pub fn accumulate(&self, segment: &[T], out: &mut [T], buffer: &mut Vec<Complex<T>>) -> Result<(), SpectralError> {
        if segment.len() != self.window.len() {
            return Err(if segment.is_empty() {
                SpectralError::EmptySegment
            } else {
                SpectralError::SegmentTooLong {
                    needed: self.window.len(),
                    available: segment.len(),
                }
            });
        }
        buffer.clear();
        buffer.extend(segment.iter().zip(&self.window).map(|(&x, &w)| Complex::new(x * w, T::zero())));
        buffer.resize(self.fft_size, Complex::new(T::zero(), T::zero()));
        self.fft.process(buffer);

        let nyquist = self.fft_size.is_multiple_of(2).then_some(self.fft_size / 2);
        let two = T::of(2.0);
        for (k, slot) in out.iter_mut().enumerate().take(self.bins()) {
            let p = buffer[k].norm_sqr() * self.scale;
            let one_sided = if k == 0 || Some(k) == nyquist { p } else { p * two };
            *slot = *slot + one_sided;
        }
        Ok(())
    }

    pub fn spectrum(&self, segment: &[T]) -> Result<Vec<T>, SpectralError> {
        let mut out = vec![T::zero(); self.bins()];
        self.accumulate(segment, &mut out, &mut Vec::with_capacity(self.fft_size))?;
        Ok(out)
    }
}

/// `P_d(f) = |DFT(x_d w)|² / (M U fs)`, one-sided.
pub fn periodogram_segment<T: Real>(
    segment: &[T],
    taper: Taper,
    u: T,
    fft_size: usize,
    sampling_rate: f64,
) -> Result<Vec<T>, SpectralError> {
    if segment.is_empty() {
        return Err(SpectralError::EmptySegment);
    }
    Periodogram::with_norm(taper, segment.len(), u, fft_size, sampling_rate)?.spectrum(segment)
}

/// Welch spectrum of one channel: mean of the overlapped periodograms.
pub fn welch_channel<T: Real>(samples: &[T], sampling_rate: f64, config: &WelchConfig) -> Result<Vec<T>, SpectralError> {
    let seg = config.segmentation(sampling_rate)?;
    let pg = Periodogram::new(config.taper, seg.segment_len, seg.fft_size, sampling_rate)?;
    welch_with(&pg, &seg, config.segment_count, samples)
}

fn welch_with<T: Real>(
    pg: &Periodogram<T>,
    seg: &Segmentation,
    count: usize,
    samples: &[T],
) -> Result<Vec<T>, SpectralError> {
    if samples.len() < seg.window_samples {
        return Err(SpectralError::SegmentTooLong {
            needed: seg.window_samples,
            available: samples.len(),
        });
    }
    let mut acc = vec![T::zero(); pg.bins()];
    let mut buffer = Vec::with_capacity(seg.fft_size);
    for off in seg.offsets(count) {
        pg.accumulate(&samples[off..off + seg.segment_len], &mut acc, &mut buffer)?;
    }
    let inv = T::one() / T::of_usize(count);
    acc.iter_mut().for_each(|v| *v = *v * inv);
    Ok(acc)
}

/// Per-channel Welch power spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate<T> {
    pub frequencies: Vec<T>,
    /// `power[channel][bin]`, µV²/Hz.
    pub power: Vec<Vec<T>>,
    pub channels: Vec<ChannelInfo>,
    pub sampling_rate: f64,
    pub fft_size: usize,
    pub config: WelchConfig,
}

impl<T: Real> PsdEstimate<T> {
    pub fn resolution(&self) -> f64 {
        self.sampling_rate / self.fft_size as f64
    }

    pub fn nyquist(&self) -> f64 {
        self.sampling_rate / 2.0
    }

    pub fn channel_index(&self, label: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.label == label)
    }

    /// Sum over bins of `P(f) Δf` for one channel; equals the mean square
    /// of the tapered segments divided by `U`.
    pub fn total_power(&self, channel: usize) -> T {
        let df = T::of(self.resolution());
        self.power[channel].iter().copied().sum::<T>() * df
    }

    /// Frequency of the largest bin.
    pub fn peak_frequency(&self, channel: usize) -> T {
        let (k, _) = self.power[channel]
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (k, &p)| if p > best.1 { (k, p) } else { best });
        self.frequencies[k]
    }
}

/// Welch PSD for every channel of an epoch.
pub fn welch_psd<T: Real>(epoch: &Epoch<T>, config: &WelchConfig) -> Result<PsdEstimate<T>, SpectralError> {
    let fs = epoch.sampling_rate;
    let seg = config.segmentation(fs)?;
    let pg = Periodogram::new(config.taper, seg.segment_len, seg.fft_size, fs)?;
    let power = epoch
        .samples
        .iter()
        .map(|s| welch_with(&pg, &seg, config.segment_count, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PsdEstimate {
        frequencies: frequency_grid(seg.fft_size, fs),
        power,
        channels: epoch.channels.clone(),
        sampling_rate: fs,
        fft_size: seg.fft_size,
        config: config.clone(),
    })
}
