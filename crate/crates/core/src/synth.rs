//! Seeded synthetic EEG with prescribed band powers, and noisy samples of
//! ratio trajectories drawn from a curve model.
//!
//! Each band is an oscillator bank: tones spaced 1 Hz apart, kept 1 Hz
//! inside the band edges, with independent uniform phases. A tone of
//! amplitude `A` carries power `A²/2`, so a bank of `K` tones with
//! `A = sqrt(2P/K)` integrates to `P` over the band. Optional white noise
//! adds a flat one-sided density `noise_floor` on top of the targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::regress::{FitError, Model};
use crate::scalar::Real;
use crate::signal::{BandDefinition, BandName, Montage, Recording, SignalError};

/// Name of the pseudo-random generator; recorded in output metadata.
pub const GENERATOR: &str = "ChaCha8";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("duration must be positive and finite, got {0} s")]
    InvalidDuration(f64),
    #[error("band {band} reaches {f_high} Hz, above the Nyquist frequency {nyquist} Hz")]
    BandAboveNyquist { band: String, f_high: f64, nyquist: f64 },
    #[error("target power for {0} must be finite and non-negative")]
    InvalidTarget(String),
    #[error("noise floor must be finite and non-negative, got {0}")]
    InvalidNoiseFloor(f64),
    #[error("channel gain refers to unknown channel {0}")]
    UnknownChannel(String),
    #[error("channel gain refers to band {0} which has no target")]
    UnknownBand(String),
    #[error("sigma must be finite and non-negative, got {0}")]
    InvalidSigma(f64),
    #[error("sample times must be strictly increasing")]
    UnorderedTimes,
    #[error(transparent)]
    Model(#[from] FitError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandTarget {
    pub band: BandDefinition,
    /// Integrated band power, µV².
    pub power: f64,
}

/// Multiplies one band's target power on one channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelGain {
    pub label: String,
    pub band: BandName,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Seconds.
    pub duration: f64,
    pub sampling_rate: f64,
    pub montage: Montage,
    pub targets: Vec<BandTarget>,
    /// One-sided white-noise density, µV²/Hz.
    pub noise_floor: f64,
    pub seed: u64,
    pub channel_gains: Vec<ChannelGain>,
}

impl SynthSpec {
    /// Alpha and beta targets on every channel, no noise.
    pub fn alpha_beta(duration: f64, sampling_rate: f64, montage: Montage, alpha: f64, beta: f64, seed: u64) -> Self {
        Self {
            duration,
            sampling_rate,
            montage,
            targets: vec![
                BandTarget {
                    band: BandDefinition::alpha(),
                    power: alpha,
                },
                BandTarget {
                    band: BandDefinition::beta(),
                    power: beta,
                },
            ],
            noise_floor: 0.0,
            seed,
            channel_gains: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(SynthError::InvalidDuration(self.duration));
        }
        if !(self.sampling_rate > 0.0 && self.sampling_rate.is_finite()) {
            return Err(SignalError::InvalidSamplingRate(self.sampling_rate).into());
        }
        let nyquist = self.sampling_rate / 2.0;
        for t in &self.targets {
            if t.band.f_high > nyquist {
                return Err(SynthError::BandAboveNyquist {
                    band: t.band.name.to_string(),
                    f_high: t.band.f_high,
                    nyquist,
                });
            }
            if !(t.power >= 0.0 && t.power.is_finite()) {
                return Err(SynthError::InvalidTarget(t.band.name.to_string()));
            }
        }
        if !(self.noise_floor >= 0.0 && self.noise_floor.is_finite()) {
            return Err(SynthError::InvalidNoiseFloor(self.noise_floor));
        }
        for g in &self.channel_gains {
            if self.montage.find(&g.label).is_none() {
                return Err(SynthError::UnknownChannel(g.label.clone()));
            }
            if !self.targets.iter().any(|t| t.band.name == g.band) {
                return Err(SynthError::UnknownBand(g.band.to_string()));
            }
            if !(g.factor >= 0.0 && g.factor.is_finite()) {
                return Err(SynthError::InvalidTarget(format!("{} on {}", g.band, g.label)));
            }
        }
        Ok(())
    }

    /// Target power of `target` on `label` after channel gains.
    pub fn channel_power(&self, label: &str, target: &BandTarget) -> f64 {
        self.channel_gains
            .iter()
            .filter(|g| g.label == label && g.band == target.band.name)
            .fold(target.power, |p, g| p * g.factor)
    }

    /// Seed, generator and targets, for a sidecar file.
    pub fn metadata(&self) -> Value {
        json!({
            "generator": GENERATOR,
            "seed": self.seed,
            "duration_s": self.duration,
            "sampling_rate_hz": self.sampling_rate,
            "montage": self.montage.name,
            "channels": self.montage.electrodes.iter().map(|e| e.label.as_str()).collect::<Vec<_>>(),
            "noise_floor": self.noise_floor,
            "targets": self.targets,
            "channel_gains": self.channel_gains,
        })
    }
}

/// Tone frequencies of one band's oscillator bank.
pub fn bank_frequencies(band: &BandDefinition) -> Vec<f64> {
    let width = band.f_high - band.f_low;
    let margin = if width > 2.0 { 1.0 } else { width / 4.0 };
    let span = width - 2.0 * margin;
    let count = (span.floor() as usize + 1).max(1);
    if count == 1 {
        return vec![band.f_low + width / 2.0];
    }
    let step = span / (count - 1) as f64;
    (0..count).map(|i| band.f_low + margin + i as f64 * step).collect()
}

/// Synthetic recording. Channel `i` draws from the generator stream `i`, so
/// channels are independent of each other and of the montage size.
pub fn synth_eeg<T: Real>(spec: &SynthSpec) -> Result<Recording<T>, SynthError> {
    spec.validate()?;
    let fs = spec.sampling_rate;
    let n = (spec.duration * fs).round() as usize;
    if n == 0 {
        return Err(SynthError::InvalidDuration(spec.duration));
    }
    let noise_sd = (spec.noise_floor * fs / 2.0).sqrt();
    let banks: Vec<Vec<f64>> = spec.targets.iter().map(|t| bank_frequencies(&t.band)).collect();

    let mut samples = Vec::with_capacity(spec.montage.len());
    for (ch, info) in spec.montage.electrodes.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(ch as u64);
        let mut tones: Vec<(f64, f64, f64)> = Vec::new();
        for (target, freqs) in spec.targets.iter().zip(&banks) {
            let power = spec.channel_power(&info.label, target);
            let amp = (2.0 * power / freqs.len() as f64).sqrt();
            for &f in freqs {
                let phase = rng.random::<f64>() * std::f64::consts::TAU;
                tones.push((amp, f, phase));
            }
        }
        let noise = (noise_sd > 0.0).then(|| Normal::new(0.0, noise_sd).expect("finite sd"));
        let series: Vec<T> = (0..n)
            .map(|i| {
                let t = i as f64 / fs;
                let mut v: f64 = tones
                    .iter()
                    .filter(|(amp, _, _)| *amp > 0.0)
                    .map(|&(amp, f, phase)| amp * (std::f64::consts::TAU * f * t + phase).sin())
                    .sum();
                if let Some(noise) = &noise {
                    v += noise.sample(&mut rng);
                }
                T::of(v)
            })
            .collect();
        samples.push(series);
    }
    Ok(Recording::new(spec.montage.electrodes.clone(), samples, fs)?)
}

/// Back-to-back segments, e.g. to step the ratio at epoch boundaries.
pub fn synth_segments<T: Real>(specs: &[SynthSpec]) -> Result<Recording<T>, SynthError> {
    let mut iter = specs.iter();
    let first = iter.next().ok_or(SynthError::InvalidDuration(0.0))?;
    let mut rec = synth_eeg::<T>(first)?;
    for spec in iter {
        rec = rec.concat(&synth_eeg::<T>(spec)?)?;
    }
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec<T> {
    pub model: Model<T>,
    /// Minutes, strictly increasing.
    pub times: Vec<T>,
    pub sigma: T,
    pub seed: u64,
}

/// `(x, model(x) + N(0, sigma²))` at each sample time.
pub fn synth_bar_trajectory<T: Real>(spec: &TrajectorySpec<T>) -> Result<Vec<(T, T)>, SynthError> {
    let sigma = spec.sigma.as_f64();
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(SynthError::InvalidSigma(sigma));
    }
    if spec.times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SynthError::UnorderedTimes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    spec.times
        .iter()
        .map(|&x| {
            let y = spec.model.eval(x)?;
            let e = if sigma > 0.0 { normal.sample(&mut rng) } else { 0.0 };
            Ok((x, y + T::of(e)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montage::standard_1020_30;
    use crate::regress::FourPl;
    use crate::signal::ChannelInfo;

    fn single() -> Montage {
        Montage::new("one", vec![ChannelInfo::eeg("Cz", [0.0, 0.0]).unwrap()]).unwrap()
    }

    #[test]
    fn bank_layout() {
        assert_eq!(bank_frequencies(&BandDefinition::alpha()), vec![9.0, 10.0, 11.0, 12.0]);
        assert_eq!(bank_frequencies(&BandDefinition::beta()).len(), 16);
        assert_eq!(bank_frequencies(&BandDefinition::delta()), vec![1.5, 3.0]);
        let narrow = BandDefinition::new(BandName::Custom, 10.0, 11.0).unwrap();
        assert_eq!(bank_frequencies(&narrow), vec![10.5]);
    }

    #[test]
    fn zero_targets_zero_signal() {
        let spec = SynthSpec::alpha_beta(2.0, 100.0, single(), 0.0, 0.0, 9);
        let rec = synth_eeg::<f64>(&spec).unwrap();
        assert!(rec.samples()[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = SynthSpec::alpha_beta(3.0, 250.0, standard_1020_30(), 4.329, 3.034, 42);
        let a = synth_eeg::<f64>(&spec).unwrap();
        let b = synth_eeg::<f64>(&spec).unwrap();
        assert_eq!(a, b);
        let c = synth_eeg::<f64>(&SynthSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a.samples()[0], c.samples()[0]);
        assert_ne!(a.samples()[0], a.samples()[1]);
    }

    #[test]
    fn mean_square_matches_total_power() {
        let spec = SynthSpec::alpha_beta(20.0, 500.0, single(), 4.329, 3.034, 1);
        let rec = synth_eeg::<f64>(&spec).unwrap();
        let x = &rec.samples()[0];
        let ms = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        approx::assert_relative_eq!(ms, 4.329 + 3.034, max_relative = 0.01);
    }

    #[test]
    fn noise_floor_variance() {
        let mut spec = SynthSpec::alpha_beta(20.0, 200.0, single(), 0.0, 0.0, 5);
        spec.noise_floor = 0.02;
        let rec = synth_eeg::<f64>(&spec).unwrap();
        let x = &rec.samples()[0];
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        approx::assert_relative_eq!(var, 0.02 * 100.0, max_relative = 0.05);
    }

    #[test]
    fn validation() {
        let spec = SynthSpec::alpha_beta(0.0, 500.0, single(), 1.0, 1.0, 0);
        assert!(matches!(synth_eeg::<f64>(&spec), Err(SynthError::InvalidDuration(_))));
        let spec = SynthSpec::alpha_beta(1.0, 40.0, single(), 1.0, 1.0, 0);
        assert!(matches!(synth_eeg::<f64>(&spec), Err(SynthError::BandAboveNyquist { .. })));
        let mut spec = SynthSpec::alpha_beta(1.0, 500.0, single(), 1.0, 1.0, 0);
        spec.channel_gains.push(ChannelGain {
            label: "Fz".into(),
            band: BandName::Beta,
            factor: 2.0,
        });
        assert_eq!(synth_eeg::<f64>(&spec), Err(SynthError::UnknownChannel("Fz".into())));
    }

    #[test]
    fn channel_gain_scales_power() {
        let mut spec = SynthSpec::alpha_beta(1.0, 500.0, single(), 1.0, 2.0, 0);
        spec.channel_gains.push(ChannelGain {
            label: "Cz".into(),
            band: BandName::Beta,
            factor: 3.0,
        });
        assert_eq!(spec.channel_power("Cz", &spec.targets[1]), 6.0);
        assert_eq!(spec.channel_power("Cz", &spec.targets[0]), 1.0);
        assert_eq!(spec.metadata()["generator"], GENERATOR);
    }

    #[test]
    fn trajectory_midpoint() {
        let spec = TrajectorySpec {
            model: Model::FourPl(FourPl::new(0.7, 1.0, 30.0, 2.4)),
            times: vec![0.0, 30.0, 60.0],
            sigma: 0.0,
            seed: 3,
        };
        let pts = synth_bar_trajectory(&spec).unwrap();
        approx::assert_abs_diff_eq!(pts[1].1, 1.55, epsilon = 1e-12);
        assert_eq!(pts[0], (0.0, 0.7));
        let bad = TrajectorySpec {
            times: vec![1.0, 1.0],
            ..spec.clone()
        };
        assert_eq!(synth_bar_trajectory(&bad), Err(SynthError::UnorderedTimes));
        let neg = TrajectorySpec { sigma: -1.0, ..spec };
        assert!(matches!(synth_bar_trajectory(&neg), Err(SynthError::InvalidSigma(_))));
    }
}
