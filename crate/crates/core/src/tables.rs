//! Published group-mean ratio series and their reference curve fits.
//!
//! These are the reproduction targets: the BAR values measured during and
//! after gameplay, and the sigmoid and quartic parameters reported for them.
//! Two reference entries are internally inconsistent and carry
//! `anomalous = true`; they are kept verbatim but excluded from comparisons.

use crate::signal::{GameType, GamerType, MusicType};

/// Resting ratio shared by every session.
pub const BASELINE_BAR: f64 = 0.701;
/// Resting alpha band power, µV².
pub const BASELINE_ALPHA_POWER: f64 = 4.329;
/// Resting beta band power, µV².
pub const BASELINE_BETA_POWER: f64 = 3.034;

pub const DURING_MINUTES: [f64; 4] = [15.0, 30.0, 45.0, 60.0];
pub const AFTER_MINUTES: [f64; 5] = [0.0, 3.0, 6.0, 9.0, 12.0];

/// Ratios measured during gameplay with their printed fractional increases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuringRow {
    pub game_type: GameType,
    pub gamer_type: GamerType,
    pub ratios: [f64; 4],
    pub increases: [f64; 4],
}

impl DuringRow {
    /// Baseline point followed by the four gameplay measurements.
    pub fn fit_points(&self) -> Vec<(f64, f64)> {
        std::iter::once((0.0, BASELINE_BAR))
            .chain(DURING_MINUTES.iter().copied().zip(self.ratios))
            .collect()
    }
}

/// Ratios during the relaxation period that follows gameplay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfterRow {
    pub game_type: GameType,
    pub music_type: MusicType,
    pub gamer_type: GamerType,
    pub ratios: [f64; 5],
}

impl AfterRow {
    pub fn fit_points(&self) -> Vec<(f64, f64)> {
        AFTER_MINUTES.iter().copied().zip(self.ratios).collect()
    }
}

/// Reported sigmoid fit `(a, b, c, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourPlRow {
    pub game_type: GameType,
    pub music_type: MusicType,
    pub gamer_type: GamerType,
    pub params: [f64; 4],
    pub r_squared: f64,
    pub aic: f64,
    pub anomalous: bool,
}

/// Reported quartic coefficients, degree 0 first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticRow {
    pub game_type: GameType,
    pub music_type: MusicType,
    pub gamer_type: GamerType,
    pub coefficients: [f64; 5],
    pub r_squared: f64,
    pub anomalous: bool,
}

use GameType::{Combinational as C, Puzzle as P, Strategic as S};
use GamerType::{Gamer as G, NonGamer as NG};
use MusicType::{HighPitch as HI, LowPitch as LO, MediumPitch as MED, NoMusic as NO};

const fn during(game_type: GameType, gamer_type: GamerType, ratios: [f64; 4], increases: [f64; 4]) -> DuringRow {
    DuringRow {
        game_type,
        gamer_type,
        ratios,
        increases,
    }
}

pub const DURING: [DuringRow; 6] = [
    during(P, G, [0.729, 0.874, 1.297, 1.541], [0.0384, 0.1979, 0.4595, 0.5451]),
    during(P, NG, [0.862, 0.984, 1.542, 1.897], [0.1868, 0.2876, 0.5454, 0.6305]),
    during(C, G, [0.814, 0.917, 1.341, 1.797], [0.1388, 0.2356, 0.4773, 0.6099]),
    during(C, NG, [1.084, 1.295, 1.742, 2.149], [0.3533, 0.4587, 0.5976, 0.6738]),
    during(S, G, [1.173, 1.376, 1.862, 2.218], [0.4024, 0.4906, 0.6235, 0.6839]),
    during(S, NG, [1.337, 1.426, 1.856, 2.403], [0.4757, 0.5084, 0.6223, 0.7083]),
];

const fn after(game_type: GameType, music_type: MusicType, gamer_type: GamerType, ratios: [f64; 5]) -> AfterRow {
    AfterRow {
        game_type,
        music_type,
        gamer_type,
        ratios,
    }
}

pub const AFTER: [AfterRow; 24] = [
    after(P, LO, G, [1.541, 1.023, 0.865, 0.812, 0.709]),
    after(P, LO, NG, [1.897, 1.137, 0.912, 0.856, 0.716]),
    after(P, MED, G, [1.541, 1.148, 0.892, 0.841, 0.714]),
    after(P, MED, NG, [1.897, 1.239, 1.026, 0.913, 0.768]),
    after(P, HI, G, [1.541, 1.267, 0.914, 0.862, 0.736]),
    after(P, HI, NG, [1.897, 1.342, 1.103, 0.924, 0.784]),
    after(P, NO, G, [1.541, 1.186, 0.895, 0.852, 0.718]),
    after(P, NO, NG, [1.897, 1.289, 1.078, 0.917, 0.796]),
    after(C, LO, G, [1.797, 1.434, 0.968, 0.873, 0.713]),
    after(C, LO, NG, [2.149, 1.614, 1.172, 0.866, 0.72]),
    after(C, MED, G, [1.797, 1.349, 0.98, 0.851, 0.718]),
    after(C, MED, NG, [2.149, 1.614, 1.172, 0.924, 0.829]),
    after(C, HI, G, [1.797, 1.542, 1.034, 0.872, 0.820]),
    after(C, HI, NG, [2.149, 1.824, 1.197, 0.935, 0.805]),
    after(C, NO, G, [1.797, 1.479, 0.971, 0.807, 0.724]),
    after(C, NO, NG, [2.149, 1.672, 1.094, 0.894, 0.815]),
    after(S, LO, G, [2.218, 1.451, 1.145, 0.814, 0.717]),
    after(S, LO, NG, [2.403, 1.663, 1.232, 0.873, 0.749]),
    after(S, MED, G, [2.218, 1.71, 1.205, 0.917, 0.723]),
    after(S, MED, NG, [2.403, 1.846, 1.386, 0.996, 0.824]),
    after(S, HI, G, [2.218, 1.76, 1.235, 0.94, 0.816]),
    after(S, HI, NG, [2.403, 1.999, 1.49, 1.008, 0.827]),
    after(S, NO, G, [2.218, 1.75, 1.296, 0.951, 0.741]),
    after(S, NO, NG, [2.403, 1.983, 1.472, 1.017, 0.819]),
];

const fn fpl(
    game_type: GameType,
    music_type: MusicType,
    gamer_type: GamerType,
    params: [f64; 4],
    r_squared: f64,
    aic: f64,
) -> FourPlRow {
    FourPlRow {
        game_type,
        music_type,
        gamer_type,
        params,
        r_squared,
        aic,
        anomalous: false,
    }
}

const NONE: MusicType = MusicType::None;

pub const DURING_FOUR_PL: [FourPlRow; 6] = [
    fpl(P, NONE, G, [0.7113, 5.0082, 41.0507, 1.6653], 0.9996, -27.47),
    fpl(P, NONE, NG, [0.7701, 4.5143, 42.8531, 2.1471], 0.9887, -8.195),
    fpl(C, NONE, G, [0.7371, 3.1548, 62.6104, 3.0142], 0.9943, -12.68),
    fpl(C, NONE, NG, [0.7223, 1.1433, 7008.0, 8794.0], 0.9919, -8.719),
    fpl(S, NONE, G, [0.7187, 0.9913, 2403.0, 5339054.0], 0.989, -6.724),
    fpl(S, NONE, NG, [0.7472, 0.9616, 290172.0, 460270.4], 0.9605, 0.3441),
];

pub const AFTER_FOUR_PL: [FourPlRow; 24] = [
    fpl(P, LO, G, [1.5410, 0.3937, 360.9098, -2.4249], 0.9979, -20.95),
    fpl(P, LO, NG, [1.8970, 0.4967, 14.7121, -0.5570], 0.9973, -16.05),
    fpl(P, MED, G, [1.5414, 1.2729, 4.2799, 0.5133], 0.9937, -15.37),
    fpl(P, MED, NG, [1.8970, 0.79044, 5.1763, 0.2516], 0.9999, -36.46),
    fpl(P, HI, G, [1.5412, 3.2904, 3.4865, 0.8151], 0.9989, -24.73),
    FourPlRow {
        anomalous: true,
        ..fpl(P, HI, NG, [1.8969, 0.8284, 8.9388, -0.0215], 0.0009, -28.03)
    },
    fpl(P, NO, G, [1.5417, 1.6380, 3.9345, 0.6141], 0.9913, -13.77),
    fpl(P, NO, NG, [1.8969, 0.4707, 922.3299, -7.7168], 1.0, -40.25),
    fpl(C, LO, G, [1.7987, 2.2673, 4.1514, 0.6491], 0.994, -12.53),
    fpl(C, LO, NG, [2.1484, 1.4688, 5.8055, 0.2179], 0.9996, -23.86),
    fpl(C, MED, G, [1.7975, 1.6254, 4.3045, 0.5303], 0.9984, -19.37),
    fpl(C, MED, NG, [2.1486, 1.7268, 4.3938, 0.5875], 0.9997, -25.68),
    fpl(C, HI, G, [1.7970, 2.3198, 3.3399, 0.7732], 0.9999, -35.66),
    fpl(C, HI, NG, [2.1487, 1.7094, 4.4000, 0.5887], 0.9999, -31.0),
    fpl(C, NO, G, [1.7975, 2.7664, 4.1841, 0.6739], 0.9997, -27.28),
    fpl(C, NO, NG, [2.1490, 2.5295, 3.9101, 0.7385], 1.0, -42.42),
    fpl(S, LO, G, [2.2175, 0.8197, 0.89861, -0.7128], 0.9965, -12.21),
    fpl(S, LO, NG, [2.4024, 1.1049, 7.2473, -0.2689], 0.9988, -16.5),
    fpl(S, MED, G, [2.2183, 1.5853, 5.8047, 0.2552], 0.9999, -30.82),
    fpl(S, MED, NG, [2.4022, 1.2444, 9.5813, -0.4817], 0.9995, -21.38),
    fpl(S, HI, G, [2.2188, 1.6827, 5.9997, 0.2723595], 0.9998, -25.39),
    fpl(S, HI, NG, [2.399616, 1.754762, 7.592323, 0.03812683], 0.9985, -15.49),
    fpl(S, NO, G, [2.217533, 1.426625, 7.804479, -0.06470811], 0.9999, -28.79),
    fpl(S, NO, NG, [2.400454, 1.721276, 7.344441, 0.09479044], 0.9989, -17.12),
];

const fn qrt(game_type: GameType, music_type: MusicType, gamer_type: GamerType, coefficients: [f64; 5]) -> QuarticRow {
    QuarticRow {
        game_type,
        music_type,
        gamer_type,
        coefficients,
        r_squared: 1.0,
        anomalous: false,
    }
}

pub const DURING_QUARTIC: [QuarticRow; 6] = [
    qrt(P, NONE, G, [0.701, 0.01184, -0.00136, 5.373e-5, -5.086e-7]),
    qrt(P, NONE, NG, [0.701, 0.04116, -0.00341, 10.598e-5, -9.169e-7]),
    qrt(C, NONE, G, [0.701, 0.02556, -0.00202, 6.227e-5, -5.103e-7]),
    qrt(C, NONE, NG, [0.701, 0.05173, -0.00268, 7.081e-5, -5.629e-7]),
    qrt(S, NONE, G, [0.701, 0.06878, -0.00379, 9.874e-5, -7.942e-7]),
    QuarticRow {
        anomalous: true,
        ..qrt(S, NONE, NG, [0.701, 0.0989, -54541.0, 0.000126, -9.152e-7])
    },
];

#[allow(clippy::approx_constant)]
pub const AFTER_QUARTIC: [QuarticRow; 24] = [
    qrt(P, LO, G, [1.541, -0.2693, 0.0393, -0.0025, 0.000051]),
    qrt(P, LO, NG, [1897.0, -0.3926, 0.0558, -0.00331, 5.81276e-5]),
    qrt(P, MED, G, [1.541, -0.1170, -0.01404, 0.00367, -0.00018]),
    qrt(P, MED, NG, [1.897, -0.3543, 0.0576, -0.0046, 0.00014]),
    qrt(P, HI, G, [1.541, 0.0203, -0.0599, 0.0086, -0.00035]),
    qrt(P, HI, NG, [1.897, -0.2892, 0.0459, -0.00415, 0.00014]),
    qrt(P, NO, G, [1.541, -0.0649, -0.0333, 0.00598, -0.00027]),
    qrt(P, NO, NG, [1.897, -0.3355, 0.0585, -0.0053, 0.00017]),
    qrt(C, LO, G, [1.797, 0.0247, -0.0784, 0.0114, -0.00047]),
    qrt(C, LO, NG, [2.149, -0.1875, 0.00181, 0.00044, -9.774e-6]),
    qrt(C, MED, G, [1.797, -0.1109, -0.02518, 0.00474, -0.00021]),
    qrt(C, MED, NG, [2.149, -0.1708, -0.0077, 0.00194, -7.305e-5]),
    qrt(C, HI, G, [1.797, -0.11003, -0.0254, 0.0047, -0.00019]),
    qrt(C, HI, NG, [2.149, -0.1661, -0.0104, 0.0024, -9.465e-5]),
    qrt(C, NO, G, [1.797, 0.0514, -0.0808, 0.0107, -0.00041]),
    qrt(C, NO, NG, [2.149, -0.0276, -0.069, 0.0098, -0.00038]),
    qrt(S, LO, G, [2.218, -0.4486, 0.0906, -0.00989, 0.00038]),
    qrt(S, LO, NG, [2.403, -0.3553, 0.04918, 0.00019, -0.00098]),
    qrt(S, MED, G, [2.218, -0.1179, -0.0289, 0.0044, -0.00017]),
    qrt(S, MED, NG, [2.403, -0.21475, 0.0129, -0.00127, 6.121e-5]),
    qrt(S, HI, G, [2.218, -0.0715, -0.0428, 0.0059, -0.00023]),
    qrt(S, HI, NG, [2.403, -0.11075, -0.008, -0.0001019, 5.0926e-5]),
    qrt(S, NO, G, [2.218, -0.1420278, -0.00801, 0.00123, -3.549e-5]),
    qrt(S, NO, NG, [2.403, -0.1115, -0.01139, 0.0006, 1.852e-5]),
];

/// During-gameplay series for one group.
pub fn during_row(game_type: GameType, gamer_type: GamerType) -> Option<&'static DuringRow> {
    DURING
        .iter()
        .find(|r| r.game_type == game_type && r.gamer_type == gamer_type)
}

/// Relaxation series for one group.
pub fn after_row(game_type: GameType, music_type: MusicType, gamer_type: GamerType) -> Option<&'static AfterRow> {
    AFTER
        .iter()
        .find(|r| r.game_type == game_type && r.music_type == music_type && r.gamer_type == gamer_type)
}
