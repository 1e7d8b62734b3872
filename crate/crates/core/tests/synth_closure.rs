use barstress::montage::standard_1020_30;
use barstress::spectral::{
    band_power, band_ratio, bar_timeseries, welch_psd, ChannelSelection, RatioBands, WelchConfig,
};
use barstress::synth::{synth_eeg, synth_segments, SynthSpec};
use barstress::tables::{self, BASELINE_ALPHA_POWER, BASELINE_BAR, BASELINE_BETA_POWER};
use barstress::{BandDefinition, Epoch, GameType, GamerType, Montage, MusicType, Phase, SessionProtocol};

fn cz() -> Montage {
    standard_1020_30().subset(&["Cz"]).unwrap()
}

#[test]
fn band_powers_match_targets() {
    for seed in 0..5 {
        let spec = SynthSpec::alpha_beta(10.0, 500.0, standard_1020_30(), BASELINE_ALPHA_POWER, BASELINE_BETA_POWER, seed);
        let rec = synth_eeg::<f64>(&spec).unwrap();
        let psd = welch_psd(&Epoch::from_recording(&rec), &WelchConfig::default()).unwrap();
        for c in 0..psd.channels.len() {
            let labels = [psd.channels[c].label.clone()];
            let sel = ChannelSelection::Labels(&labels);
            let alpha = band_power(&psd, &BandDefinition::alpha(), sel).unwrap();
            let beta = band_power(&psd, &BandDefinition::beta(), sel).unwrap();
            assert!((alpha / BASELINE_ALPHA_POWER - 1.0).abs() < 0.02, "alpha {alpha}");
            assert!((beta / BASELINE_BETA_POWER - 1.0).abs() < 0.02, "beta {beta}");
        }
        let bar = band_ratio(&psd, &BandDefinition::beta(), &BandDefinition::alpha(), ChannelSelection::AllEeg).unwrap();
        assert!((bar - BASELINE_BAR).abs() <= 0.035);
    }
}

#[test]
fn two_to_one_power_ratio() {
    let spec = SynthSpec::alpha_beta(12.0, 256.0, cz(), 1.5, 3.0, 8);
    let rec = synth_eeg::<f64>(&spec).unwrap();
    let psd = welch_psd(&Epoch::from_recording(&rec), &WelchConfig::default()).unwrap();
    let r = band_ratio(&psd, &BandDefinition::beta(), &BandDefinition::alpha(), ChannelSelection::AllEeg).unwrap();
    assert!((r - 2.0).abs() <= 0.05);
}

#[test]
fn noise_floor_adds_flat_power() {
    let mut spec = SynthSpec::alpha_beta(60.0, 200.0, cz(), 2.0, 1.0, 4);
    spec.noise_floor = 0.01;
    let rec = synth_eeg::<f64>(&spec).unwrap();
    let psd = welch_psd(
        &Epoch::from_recording(&rec),
        &WelchConfig {
            window_len: 60.0,
            segment_count: 23,
            ..WelchConfig::default()
        },
    )
    .unwrap();
    let alpha = band_power(&psd, &BandDefinition::alpha(), ChannelSelection::AllEeg).unwrap();
    approx::assert_relative_eq!(alpha, 2.0 + 0.01 * 5.0, max_relative = 0.03);
}

#[test]
fn ratio_steps_follow_the_generator() {
    let segment = |beta: f64, seed| SynthSpec::alpha_beta(10.0, 250.0, cz(), 2.0, beta, seed);
    let rec = synth_segments::<f64>(&[segment(1.4, 1), segment(3.0, 2)]).unwrap();
    let protocol = SessionProtocol::with_times(
        Phase::AfterGameplay,
        GameType::Puzzle,
        GamerType::Gamer,
        MusicType::LowPitch,
        vec![0.0, 10.0],
    )
    .unwrap();
    let s = bar_timeseries(&rec, &protocol, &WelchConfig::default(), &RatioBands::default(), 0.7, ChannelSelection::AllEeg)
        .unwrap();
    let r = s.ratios();
    assert!((r[0] / 0.7 - 1.0).abs() < 0.05);
    assert!((r[1] / 1.5 - 1.0).abs() < 0.05);
}

#[test]
fn scripted_gameplay_session_reproduces_published_series() {
    let row = tables::during_row(GameType::Strategic, GamerType::Gamer).unwrap();
    let fs = 100.0;
    let mut specs = vec![SynthSpec::alpha_beta(900.0, fs, cz(), BASELINE_ALPHA_POWER, BASELINE_BETA_POWER, 0)];
    for (i, &ratio) in row.ratios.iter().enumerate() {
        let duration = if i < 3 { 900.0 } else { 10.0 };
        specs.push(SynthSpec::alpha_beta(
            duration,
            fs,
            cz(),
            BASELINE_ALPHA_POWER,
            BASELINE_ALPHA_POWER * ratio,
            i as u64 + 1,
        ));
    }
    let rec = synth_segments::<f64>(&specs).unwrap();
    let protocol =
        SessionProtocol::new(Phase::DuringGameplay, GameType::Strategic, GamerType::Gamer, MusicType::None).unwrap();
    let s = bar_timeseries(
        &rec,
        &protocol,
        &WelchConfig::default(),
        &RatioBands::default(),
        BASELINE_BAR,
        ChannelSelection::AllEeg,
    )
    .unwrap();
    assert_eq!(s.points().iter().map(|p| p.time).collect::<Vec<_>>(), vec![900.0, 1800.0, 2700.0, 3600.0]);
    for (got, want) in s.ratios().iter().zip(row.ratios) {
        assert!((got / want - 1.0).abs() < 0.02, "{got} vs {want}");
    }
}

#[test]
fn f32_pipeline_agrees() {
    let spec = SynthSpec::alpha_beta(10.0, 500.0, cz(), BASELINE_ALPHA_POWER, BASELINE_BETA_POWER, 6);
    let a = synth_eeg::<f64>(&spec).unwrap();
    let b = synth_eeg::<f32>(&spec).unwrap();
    let cfg = WelchConfig::default();
    let ra = band_ratio(&welch_psd(&Epoch::from_recording(&a), &cfg).unwrap(), &BandDefinition::beta(), &BandDefinition::alpha(), ChannelSelection::AllEeg).unwrap();
    let rb = band_ratio(&welch_psd(&Epoch::from_recording(&b), &cfg).unwrap(), &BandDefinition::beta(), &BandDefinition::alpha(), ChannelSelection::AllEeg).unwrap();
    assert!((ra - rb as f64).abs() < 1e-4);
}
