use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Data taper applied to each segment before the DFT. Periodic (DFT-even)
/// forms are used so that overlapped Hann/Hamming segments tile evenly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Taper {
    #[default]
    Hamming,
    Hann,
    Rectangular,
}

impl Taper {
    pub fn coefficient<T: Real>(&self, n: usize, len: usize) -> T {
        let phase = T::TAU() * T::of_usize(n) / T::of_usize(len);
        match self {
            Taper::Rectangular => T::one(),
            Taper::Hann => T::of(0.5) - T::of(0.5) * phase.cos(),
            Taper::Hamming => T::of(0.54) - T::of(0.46) * phase.cos(),
        }
    }

    pub fn coefficients<T: Real>(&self, len: usize) -> Vec<T> {
        (0..len).map(|n| self.coefficient(n, len)).collect()
    }
}

impl std::str::FromStr for Taper {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hamming" => Ok(Taper::Hamming),
            "hann" => Ok(Taper::Hann),
            "rectangular" => Ok(Taper::Rectangular),
            other => Err(format!("unknown taper {other:?}")),
        }
    }
}

/// Mean squared window value, `U = (1/M) Σ w(n)²`.
pub fn window_power_norm<T: Real>(taper: Taper, len: usize) -> T {
    assert!(len >= 1, "window length must be at least one sample");
    let sum: T = (0..len).map(|n| taper.coefficient::<T>(n, len).powi(2)).sum();
    sum / T::of_usize(len)
}
