//! Bundled electrode layouts.

use crate::signal::{ChannelInfo, ChannelKind, Montage};

pub const STANDARD_1020_30: &str = "standard_1020_30";

/// The 30 scalp sites of the bundled montage, front to back.
pub const STANDARD_1020_30_LABELS: [&str; 30] = [
    "Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8", "FT7", "FC3", "FCz", "FC4", "FT8", "T7", "C3", "Cz", "C4", "T8",
    "TP7", "CP3", "CPz", "CP4", "TP8", "P7", "P3", "Pz", "P4", "P8", "O1", "Oz", "O2",
];

/// Frontal sites, used for channel-subset band ratios.
pub const FRONTAL_LABELS: [&str; 7] = ["Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8"];

fn unit(polar_deg: f64, azimuth_deg: f64) -> [f64; 3] {
    let (t, p) = (polar_deg.to_radians(), azimuth_deg.to_radians());
    [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
}

fn midpoint(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    let s = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
    let n = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
    [s[0] / n, s[1] / n, s[2] / n]
}

/// Azimuthal equidistant projection: the vertex maps to the origin and the
/// nasion/inion plane (polar angle 90°) to the unit circle.
fn project(v: [f64; 3]) -> [f64; 2] {
    let polar = v[2].clamp(-1.0, 1.0).acos();
    let rho = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if rho == 0.0 {
        return [0.0, 0.0];
    }
    let r = polar / std::f64::consts::FRAC_PI_2;
    [r * v[0] / rho, r * v[1] / rho]
}

fn sphere_position(label: &str) -> [f64; 3] {
    // Outer ring sits 10% above the nasion-inion line (72° from the vertex),
    // in 18° azimuth steps measured counterclockwise from the right ear.
    let ring = |az| unit(72.0, az);
    match label {
        "Fp1" => ring(108.0),
        "Fp2" => ring(72.0),
        "F7" => ring(144.0),
        "F8" => ring(36.0),
        "FT7" => ring(162.0),
        "FT8" => ring(18.0),
        "T7" => ring(180.0),
        "T8" => ring(0.0),
        "TP7" => ring(198.0),
        "TP8" => ring(342.0),
        "P7" => ring(216.0),
        "P8" => ring(324.0),
        "O1" => ring(252.0),
        "Oz" => ring(270.0),
        "O2" => ring(288.0),
        "Fz" => unit(36.0, 90.0),
        "FCz" => unit(18.0, 90.0),
        "Cz" => unit(0.0, 0.0),
        "CPz" => unit(18.0, 270.0),
        "Pz" => unit(36.0, 270.0),
        "C3" => unit(36.0, 180.0),
        "C4" => unit(36.0, 0.0),
        "F3" => midpoint(sphere_position("Fz"), sphere_position("F7")),
        "F4" => midpoint(sphere_position("Fz"), sphere_position("F8")),
        "FC3" => midpoint(sphere_position("FCz"), sphere_position("FT7")),
        "FC4" => midpoint(sphere_position("FCz"), sphere_position("FT8")),
        "CP3" => midpoint(sphere_position("CPz"), sphere_position("TP7")),
        "CP4" => midpoint(sphere_position("CPz"), sphere_position("TP8")),
        "P3" => midpoint(sphere_position("Pz"), sphere_position("P7")),
        "P4" => midpoint(sphere_position("Pz"), sphere_position("P8")),
        other => unreachable!("no bundled position for {other}"),
    }
}

/// 30-electrode 10-20 layout with unit-disc coordinates.
pub fn standard_1020_30() -> Montage {
    let electrodes = STANDARD_1020_30_LABELS
        .iter()
        .map(|&l| ChannelInfo {
            label: l.to_string(),
            position: project(sphere_position(l)),
            kind: ChannelKind::Eeg,
        })
        .collect();
    Montage::new(STANDARD_1020_30, electrodes).expect("bundled montage is valid")
}

/// Look up a montage bundled with the crate.
pub fn bundled(name: &str) -> Option<Montage> {
    (name == STANDARD_1020_30).then(standard_1020_30)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_unique_eeg_sites_inside_disc() {
        let m = standard_1020_30();
        assert_eq!(m.len(), 30);
        assert_eq!(m.eeg_electrodes().count(), 30);
        for e in &m.electrodes {
            let [x, y] = e.position;
            assert!(x * x + y * y <= 0.81 + 1e-12, "{} at {:?}", e.label, e.position);
        }
    }

    #[test]
    fn landmarks() {
        let m = standard_1020_30();
        let pos = |l| m.find(l).unwrap().position;
        assert_eq!(pos("Cz"), [0.0, 0.0]);
        approx::assert_abs_diff_eq!(pos("Fz")[1], 0.4, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(pos("T7")[0], -0.8, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(pos("Oz")[1], -0.8, epsilon = 1e-12);
        // left hemisphere has negative x
        assert!(pos("F3")[0] < 0.0 && pos("F4")[0] > 0.0);
        assert!(pos("F3")[1] > pos("C3")[1]);
    }
}
