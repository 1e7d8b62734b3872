use super::welch::PsdEstimate;
use super::SpectralError;
use crate::scalar::Real;
use crate::signal::BandDefinition;

/// Which channels of a PSD enter a band average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelSelection<'a> {
    /// Every EEG channel (reference channels are skipped).
    #[default]
    AllEeg,
    Labels(&'a [String]),
}

impl<'a> ChannelSelection<'a> {
    pub fn resolve<T: Real>(&self, psd: &PsdEstimate<T>) -> Result<Vec<usize>, SpectralError> {
        let idx: Vec<usize> = match self {
            ChannelSelection::AllEeg => (0..psd.channels.len()).filter(|&i| psd.channels[i].is_eeg()).collect(),
            ChannelSelection::Labels(labels) => labels
                .iter()
                .map(|l| psd.channel_index(l).ok_or_else(|| SpectralError::UnknownChannel(l.clone())))
                .collect::<Result<_, _>>()?,
        };
        if idx.is_empty() {
            return Err(SpectralError::NoChannels);
        }
        Ok(idx)
    }
}

/// Trapezoidal integral of a piecewise-linear spectrum over `[lo, hi]`.
/// The spectrum is interpolated linearly at the band edges.
pub fn integrate_band<T: Real>(frequencies: &[T], power: &[T], lo: T, hi: T) -> T {
    let half = T::of(0.5);
    let mut total = T::zero();
    for k in 0..frequencies.len().saturating_sub(1) {
        let (f0, f1) = (frequencies[k], frequencies[k + 1]);
        let a = f0.max(lo);
        let b = f1.min(hi);
        if b <= a {
            continue;
        }
        let slope = (power[k + 1] - power[k]) / (f1 - f0);
        let pa = power[k] + slope * (a - f0);
        let pb = power[k] + slope * (b - f0);
        total = total + (b - a) * (pa + pb) * half;
    }
    total
}

/// Band power of one channel, µV².
pub fn channel_band_power<T: Real>(psd: &PsdEstimate<T>, channel: usize, band: &BandDefinition) -> Result<T, SpectralError> {
    check_band(psd, band)?;
    Ok(integrate_band(
        &psd.frequencies,
        &psd.power[channel],
        T::of(band.f_low),
        T::of(band.f_high),
    ))
}

fn check_band<T: Real>(psd: &PsdEstimate<T>, band: &BandDefinition) -> Result<(), SpectralError> {
    if !(band.f_low >= 0.0 && band.f_low < band.f_high && band.f_high <= psd.nyquist()) {
        return Err(SpectralError::BandOutOfRange {
            f_low: band.f_low,
            f_high: band.f_high,
            nyquist: psd.nyquist(),
        });
    }
    Ok(())
}

/// Band power integrated per channel, then averaged over the selection.
pub fn band_power<T: Real>(
    psd: &PsdEstimate<T>,
    band: &BandDefinition,
    channels: ChannelSelection<'_>,
) -> Result<T, SpectralError> {
    check_band(psd, band)?;
    let idx = channels.resolve(psd)?;
    let sum: T = idx
        .iter()
        .map(|&c| integrate_band(&psd.frequencies, &psd.power[c], T::of(band.f_low), T::of(band.f_high)))
        .sum();
    Ok(sum / T::of_usize(idx.len()))
}

fn ratio_of<T: Real>(num: T, den: T) -> Result<T, SpectralError> {
    if !(den > T::zero()) {
        return Err(SpectralError::ZeroDenominatorPower);
    }
    Ok(num / den)
}

/// Ratio of two channel-averaged band powers (beta/alpha for BAR,
/// theta/beta for TBR).
pub fn band_ratio<T: Real>(
    psd: &PsdEstimate<T>,
    numerator: &BandDefinition,
    denominator: &BandDefinition,
    channels: ChannelSelection<'_>,
) -> Result<T, SpectralError> {
    let num = band_power(psd, numerator, channels)?;
    let den = band_power(psd, denominator, channels)?;
    ratio_of(num, den)
}

/// Ratio from precomputed band powers.
pub fn power_ratio<T: Real>(numerator_power: T, denominator_power: T) -> Result<T, SpectralError> {
    ratio_of(numerator_power, denominator_power)
}

/// Per-channel band ratio, in PSD channel order.
pub fn channel_band_ratios<T: Real>(
    psd: &PsdEstimate<T>,
    numerator: &BandDefinition,
    denominator: &BandDefinition,
) -> Result<Vec<T>, SpectralError> {
    (0..psd.channels.len())
        .map(|c| ratio_of(channel_band_power(psd, c, numerator)?, channel_band_power(psd, c, denominator)?))
        .collect()
}

/// Fractional rise of `current` over `baseline`, relative to `current`:
/// `(current - baseline) / current`.
pub fn relative_increase<T: Real>(current: T, baseline: T) -> Result<T, SpectralError> {
    if !(current > T::zero()) {
        return Err(SpectralError::NonPositiveCurrent(current.as_f64()));
    }
    Ok((current - baseline) / current)
}
