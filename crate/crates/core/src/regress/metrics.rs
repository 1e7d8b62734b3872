use super::FitError;
use crate::scalar::Real;

/// Residual sum of squares.
pub fn rss<T: Real>(observed: &[T], predicted: &[T]) -> Result<T, FitError> {
    if observed.len() != predicted.len() {
        return Err(FitError::LengthMismatch(observed.len(), predicted.len()));
    }
    Ok(observed.iter().zip(predicted).map(|(&y, &p)| (y - p) * (y - p)).sum())
}

/// `1 - RSS/TSS`, with TSS taken about the mean of the observations.
pub fn r_squared<T: Real>(observed: &[T], predicted: &[T]) -> Result<T, FitError> {
    let res = rss(observed, predicted)?;
    if observed.len() < 2 {
        return Err(FitError::TooFewPoints {
            needed: 2,
            found: observed.len(),
        });
    }
    let mean = observed.iter().copied().sum::<T>() / T::of_usize(observed.len());
    let tss: T = observed.iter().map(|&y| (y - mean) * (y - mean)).sum();
    if !(tss > T::zero()) {
        return Err(FitError::ZeroTotalVariance);
    }
    Ok(T::one() - res / tss)
}

/// Gaussian-likelihood AIC, `n·ln(2π·RSS/n) + n + 2k`.
pub fn aic<T: Real>(rss: T, n: usize, k: usize) -> Result<T, FitError> {
    if !(rss > T::zero()) {
        return Err(FitError::NonPositiveRss(rss.as_f64()));
    }
    let nt = T::of_usize(n);
    Ok(nt * (T::TAU() * rss / nt).ln() + nt + T::of_usize(2 * k))
}
