//! Scalp topography: inverse-distance interpolation onto a unit-disc grid,
//! the angle-cosine similarity between two maps, and PPM/PGM rendering.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::signal::Montage;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopoError {
    #[error("vector has {found} values, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("topography vector is all zeros")]
    ZeroVector,
    #[error("topography value {index} is not finite")]
    NonFinite { index: usize },
    #[error("palette range [{min}, {max}] is empty")]
    DegenerateRange { min: f64, max: f64 },
    #[error("grid resolution must be at least 1")]
    ZeroResolution,
}

/// One scalar per EEG electrode, in montage order.
#[derive(Debug, Clone, PartialEq)]
pub struct TopoVector<T> {
    values: Vec<T>,
}

impl<T: Real> TopoVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self, TopoError> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(TopoError::NonFinite { index });
        }
        Ok(Self { values })
    }

    /// Build and check the length against the montage's EEG electrodes.
    pub fn for_montage(values: Vec<T>, montage: &Montage) -> Result<Self, TopoError> {
        let expected = montage.eeg_electrodes().count();
        if values.len() != expected {
            return Err(TopoError::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * k).collect(),
        }
    }
}

/// `cos θ = A·B / (|A||B|)`, clamped to `[-1, 1]`.
pub fn topo_similarity<T: Real>(a: &TopoVector<T>, b: &TopoVector<T>) -> Result<T, TopoError> {
    if a.len() != b.len() {
        return Err(TopoError::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    // scale by the largest magnitude first so huge or tiny inputs stay finite
    let norm_inf = |v: &[T]| v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let (sa, sb) = (norm_inf(a.values()), norm_inf(b.values()));
    if sa == T::zero() || sb == T::zero() {
        return Err(TopoError::ZeroVector);
    }
    let (mut dot, mut na, mut nb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.values().iter().zip(b.values()) {
        let (x, y) = (x / sa, y / sb);
        dot = dot + x * y;
        na = na + x * x;
        nb = nb + y * y;
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).max(-T::one()).min(T::one()))
}

/// Pairwise similarity of several maps.
pub fn similarity_matrix<T: Real>(maps: &[TopoVector<T>]) -> Result<Vec<Vec<T>>, TopoError> {
    maps.iter()
        .map(|a| maps.iter().map(|b| topo_similarity(a, b)).collect())
        .collect()
}

/// Square raster over `[-1, 1]²`; row 0 is the front of the head.
#[derive(Debug, Clone, PartialEq)]
pub struct TopoGrid<T> {
    pub resolution: usize,
    /// Row-major; `None` outside the head disc.
    pub values: Vec<Option<T>>,
    pub palette_range: (T, T),
}

impl<T: Real> TopoGrid<T> {
    /// Centre of cell `(row, col)`.
    pub fn cell_center(resolution: usize, row: usize, col: usize) -> [f64; 2] {
        let step = 2.0 / resolution as f64;
        [-1.0 + (col as f64 + 0.5) * step, 1.0 - (row as f64 + 0.5) * step]
    }

    /// `(row, col)` of the cell containing a disc position.
    pub fn cell_of(resolution: usize, position: [f64; 2]) -> (usize, usize) {
        let n = resolution as f64;
        let col = (((position[0] + 1.0) / 2.0 * n).floor() as isize).clamp(0, resolution as isize - 1);
        let row = (((1.0 - position[1]) / 2.0 * n).floor() as isize).clamp(0, resolution as isize - 1);
        (row as usize, col as usize)
    }

    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        self.values[row * self.resolution + col]
    }

    pub fn unmasked(&self) -> impl Iterator<Item = T> + '_ {
        self.values.iter().flatten().copied()
    }

    /// Location of the largest unmasked value.
    pub fn argmax(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, T)> = None;
        for (i, v) in self.values.iter().enumerate() {
            if let Some(v) = *v {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((i, v));
                }
            }
        }
        best.map(|(i, _)| (i / self.resolution, i % self.resolution))
    }

    /// Row-major CSV; masked cells are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.values.chunks(self.resolution) {
            let line: Vec<String> = row.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

pub const DEFAULT_RESOLUTION: usize = 64;

/// Inverse-distance-weighted (power 2) interpolation of electrode values
/// over the unit disc. Cells that contain an electrode take its value
/// exactly; when several electrodes share a cell the closest one wins.
pub fn interpolate_scalp<T: Real>(
    vector: &TopoVector<T>,
    montage: &Montage,
    resolution: usize,
) -> Result<TopoGrid<T>, TopoError> {
    if resolution == 0 {
        return Err(TopoError::ZeroResolution);
    }
    let positions: Vec<[f64; 2]> = montage.eeg_electrodes().map(|e| e.position).collect();
    if positions.len() != vector.len() {
        return Err(TopoError::LengthMismatch {
            expected: positions.len(),
            found: vector.len(),
        });
    }
    if vector.is_empty() {
        return Err(TopoError::ZeroVector);
    }
    let values = vector.values();

    let mut pinned: Vec<Option<(f64, usize)>> = vec![None; resolution * resolution];
    for (e, &p) in positions.iter().enumerate() {
        let (row, col) = TopoGrid::<T>::cell_of(resolution, p);
        let c = TopoGrid::<T>::cell_center(resolution, row, col);
        let d2 = (c[0] - p[0]).powi(2) + (c[1] - p[1]).powi(2);
        let slot = &mut pinned[row * resolution + col];
        if slot.is_none_or(|(best, _)| d2 < best) {
            *slot = Some((d2, e));
        }
    }

    let mut grid = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            if let Some((_, e)) = pinned[row * resolution + col] {
                grid.push(Some(values[e]));
                continue;
            }
            let [x, y] = TopoGrid::<T>::cell_center(resolution, row, col);
            if x * x + y * y > 1.0 {
                grid.push(None);
                continue;
            }
            let mut num = T::zero();
            let mut den = T::zero();
            let mut exact = None;
            for (&p, &v) in positions.iter().zip(values) {
                let d2 = (x - p[0]).powi(2) + (y - p[1]).powi(2);
                if d2 == 0.0 {
                    exact = Some(v);
                    break;
                }
                let w = T::of(1.0 / d2);
                num = num + w * v;
                den = den + w;
            }
            grid.push(Some(exact.unwrap_or(num / den)));
        }
    }

    let (lo, hi) = values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let palette_range = if lo < hi {
        (lo, hi)
    } else {
        let pad = (lo.abs() * T::of(0.5)).max(T::one());
        (lo - pad, hi + pad)
    };
    Ok(TopoGrid {
        resolution,
        values: grid,
        palette_range,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    /// Blue (low) through yellow to red (high), written as binary PPM.
    #[default]
    BlueRed,
    /// Grayscale PGM; masked cells are 255, data uses 0..=254.
    Gray,
}

const BLUE: [f64; 3] = [0.0, 0.0, 255.0];
const YELLOW: [f64; 3] = [255.0, 255.0, 0.0];
const RED: [f64; 3] = [255.0, 0.0, 0.0];
const WHITE: [u8; 3] = [255, 255, 255];

/// Colour for a normalised value `t ∈ [0, 1]`.
pub fn blue_red(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let (from, to, s) = if t <= 0.5 { (BLUE, YELLOW, t * 2.0) } else { (YELLOW, RED, (t - 0.5) * 2.0) };
    let mut out = [0u8; 3];
    for i in 0..3 {
        out[i] = (from[i] + (to[i] - from[i]) * s).round() as u8;
    }
    out
}

/// Binary PPM (P6) or PGM (P5) image of the grid; one pixel per cell.
pub fn render_topomap<T: Real>(grid: &TopoGrid<T>, palette: Palette) -> Result<Vec<u8>, TopoError> {
    let (lo, hi) = (grid.palette_range.0.as_f64(), grid.palette_range.1.as_f64());
    if !(lo < hi) {
        return Err(TopoError::DegenerateRange { min: lo, max: hi });
    }
    let n = grid.resolution;
    let norm = |v: T| (v.as_f64() - lo) / (hi - lo);
    let mut out = match palette {
        Palette::BlueRed => format!("P6\n{n} {n}\n255\n").into_bytes(),
        Palette::Gray => format!("P5\n{n} {n}\n255\n").into_bytes(),
    };
    for cell in &grid.values {
        match (palette, cell) {
            (Palette::BlueRed, Some(v)) => out.extend_from_slice(&blue_red(norm(*v))),
            (Palette::BlueRed, None) => out.extend_from_slice(&WHITE),
            (Palette::Gray, Some(v)) => out.push((norm(*v).clamp(0.0, 1.0) * 254.0).round() as u8),
            (Palette::Gray, None) => out.push(255),
        }
    }
    Ok(out)
}
