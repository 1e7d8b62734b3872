use std::f64::consts::{PI, TAU};

use barstress::spectral::{
    band_power, band_ratio, welch_channel, welch_psd, ChannelSelection, Taper, WelchConfig,
};
use barstress::{BandDefinition, ChannelInfo, Epoch};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn epoch(samples: Vec<Vec<f64>>, fs: f64) -> Epoch<f64> {
    let channels = (0..samples.len())
        .map(|i| ChannelInfo::eeg(format!("E{i}"), [0.0, 0.0]).unwrap())
        .collect();
    let n = samples[0].len();
    Epoch {
        channels,
        samples,
        sampling_rate: fs,
        t_start: 0.0,
        t_end: n as f64 / fs,
    }
}

/// Welch spectrum written out term by term with an O(M²) DFT.
fn direct_welch(x: &[f64], fs: f64, m: usize, hop: usize, count: usize, taper: Taper) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|n| taper.coefficient::<f64>(n, m)).collect();
    let u = w.iter().map(|v| v * v).sum::<f64>() / m as f64;
    let bins = m / 2 + 1;
    let mut out = vec![0.0; bins];
    for d in 0..count {
        let seg = &x[d * hop..d * hop + m];
        for (k, o) in out.iter_mut().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for n in 0..m {
                let angle = TAU * ((k * n) % m) as f64 / m as f64;
                re += seg[n] * w[n] * angle.cos();
                im -= seg[n] * w[n] * angle.sin();
            }
            let mut p = (re * re + im * im) / (m as f64 * u * fs);
            if k != 0 && !(m.is_multiple_of(2) && k == m / 2) {
                p *= 2.0;
            }
            *o += p / count as f64;
        }
    }
    out
}

fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

#[test]
fn welch_matches_direct_dft_on_random_epochs() {
    let fs = 100.0;
    let cfg = WelchConfig::default();
    let seg = cfg.segmentation(fs).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let x: Vec<f64> = (0..1000).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let fast = welch_channel(&x, fs, &cfg).unwrap();
        let slow = direct_welch(&x, fs, seg.segment_len, seg.hop, cfg.segment_count, cfg.taper);
        assert!(max_relative_error(&fast, &slow) < 1e-10);
    }
}

#[test]
fn odd_segment_length_matches_direct_dft() {
    let fs = 50.0;
    let cfg = WelchConfig {
        window_len: 5.26,
        taper: Taper::Hann,
        ..WelchConfig::default()
    };
    let seg = cfg.segmentation(fs).unwrap();
    assert_eq!(seg.segment_len % 2, 1);
    let x: Vec<f64> = (0..263).map(|i| (i as f64 * 0.37).sin() + 0.1 * (i as f64 * 1.3).cos()).collect();
    let fast = welch_channel(&x, fs, &cfg).unwrap();
    let slow = direct_welch(&x, fs, seg.segment_len, seg.hop, cfg.segment_count, cfg.taper);
    assert!(max_relative_error(&fast, &slow) < 1e-10);
}

fn parseval_gap(x: &[f64], fs: f64, segments: usize) -> f64 {
    let cfg = WelchConfig {
        window_len: x.len() as f64 / fs,
        segment_count: segments,
        overlap_fraction: 0.0,
        taper: Taper::Rectangular,
        fft_size: None,
    };
    let seg = cfg.segmentation(fs).unwrap();
    let psd = welch_channel(x, fs, &cfg).unwrap();
    let df = fs / seg.segment_len as f64;
    let spectral: f64 = psd.iter().sum::<f64>() * df;
    let used = &x[..seg.segment_len * segments];
    let temporal = used.iter().map(|v| v * v).sum::<f64>() / used.len() as f64;
    (spectral - temporal).abs() / temporal
}

#[test]
fn parseval_rectangular_non_overlapping() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..5000).map(|_| rng.random::<f64>() - 0.5).collect();
    assert!(parseval_gap(&x, 500.0, 4) < 1e-9);
    assert!(parseval_gap(&x[..4999], 500.0, 3) < 1e-9);
}

#[test]
fn sinusoid_power_stays_in_its_band() {
    let fs = 500.0;
    let x: Vec<f64> = (0..5000).map(|i| 3.0 * (TAU * 10.37 * i as f64 / fs + 0.4).sin()).collect();
    let psd = welch_psd(&epoch(vec![x], fs), &WelchConfig::default()).unwrap();
    let alpha = band_power(&psd, &BandDefinition::alpha(), ChannelSelection::AllEeg).unwrap();
    assert!(alpha / psd.total_power(0) >= 0.95);
    assert!((psd.peak_frequency(0) - 10.37).abs() <= psd.resolution());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_holds_for_any_signal(
        seed in any::<u64>(),
        n in 64usize..2048,
        segments in 1usize..6,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        prop_assume!(n / segments >= 2);
        prop_assert!(parseval_gap(&x, 128.0, segments) < 1e-9);
    }

    #[test]
    fn psd_scales_quadratically_and_ratio_is_invariant(seed in any::<u64>(), k in 1e-3f64..1e3) {
        let fs = 100.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..1000)
            .map(|i| (TAU * 10.0 * i as f64 / fs).sin() + 0.5 * (TAU * 20.0 * i as f64 / fs).sin() + rng.random::<f64>() - 0.5)
            .collect();
        let scaled: Vec<f64> = x.iter().map(|v| v * k).collect();
        let cfg = WelchConfig::default();
        let base = welch_psd(&epoch(vec![x], fs), &cfg).unwrap();
        let big = welch_psd(&epoch(vec![scaled], fs), &cfg).unwrap();
        let expected: Vec<f64> = base.power[0].iter().map(|a| a * k * k).collect();
        prop_assert!(max_relative_error(&big.power[0], &expected) <= 1e-12);
        let r0 = band_ratio(&base, &BandDefinition::beta(), &BandDefinition::alpha(), ChannelSelection::AllEeg).unwrap();
        let r1 = band_ratio(&big, &BandDefinition::beta(), &BandDefinition::alpha(), ChannelSelection::AllEeg).unwrap();
        prop_assert!((r1 - r0).abs() <= 1e-12 * r0);
    }

    #[test]
    fn psd_is_non_negative(seed in any::<u64>(), taper in prop_oneof![Just(Taper::Hann), Just(Taper::Hamming), Just(Taper::Rectangular)]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..500).map(|_| rng.random::<f64>() - 0.5).collect();
        let cfg = WelchConfig { taper, ..WelchConfig::default() };
        let p = welch_channel(&x, 50.0, &cfg).unwrap();
        prop_assert!(p.iter().all(|v| *v >= 0.0));
    }
}

#[test]
fn tone_amplitude_maps_to_power() {
    // a bin-centred tone of amplitude A integrates to A²/2
    let fs = 200.0;
    let a = 2.5;
    let x: Vec<f64> = (0..2000).map(|i| a * (2.0 * PI * 12.0 * i as f64 / fs).cos()).collect();
    let psd = welch_psd(&epoch(vec![x], fs), &WelchConfig::default()).unwrap();
    let total = band_power(&psd, &BandDefinition::alpha(), ChannelSelection::AllEeg).unwrap();
    approx::assert_relative_eq!(total, a * a / 2.0, max_relative = 1e-9);
}
