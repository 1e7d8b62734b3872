use std::panic::{catch_unwind, AssertUnwindSafe};

use barstress::ingest::{read_csv, read_edf, read_edf_header, write_csv, write_edf, CsvLayout};
use barstress::montage::standard_1020_30;
use barstress::{Montage, Recording};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_recording(montage: &Montage, n: usize, fs: f64, seed: u64) -> Recording<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = montage
        .electrodes
        .iter()
        .map(|_| (0..n).map(|_| rng.random::<f64>() * 200.0 - 100.0).collect())
        .collect();
    Recording::new(montage.electrodes.clone(), samples, fs).unwrap()
}

#[test]
fn csv_round_trip_is_exact() {
    let m = standard_1020_30();
    let rec = random_recording(&m, 300, 250.0, 1);
    for layout in [
        CsvLayout::default(),
        CsvLayout {
            delimiter: ';',
            has_header: false,
            time_column: None,
        },
        CsvLayout {
            delimiter: '\t',
            has_header: true,
            time_column: Some(0),
        },
    ] {
        let bytes = write_csv(&rec, &layout);
        let back: Recording<f64> = read_csv(&bytes, &layout, 250.0, &m).unwrap();
        assert_eq!(back, rec);
    }
}

#[test]
fn edf_round_trip_within_quantization() {
    let m = standard_1020_30();
    let rec = random_recording(&m, 1000, 500.0, 2);
    let bytes = write_edf(&rec).unwrap();
    let header = read_edf_header(&bytes).unwrap();
    let back: Recording<f64> = read_edf(&bytes, &m).unwrap();
    assert_eq!(back.sampling_rate(), 500.0);
    assert_eq!(back.sample_count(), 1000);
    for ((orig, got), sig) in rec.samples().iter().zip(back.samples()).zip(&header.signals) {
        let step = (sig.physical_max - sig.physical_min) / (sig.digital_max - sig.digital_min) as f64;
        for (a, b) in orig.iter().zip(got) {
            assert!((a - b).abs() <= step / 2.0 + 1e-12 * step);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn csv_round_trip_any_values(values in prop::collection::vec(-1e6f64..1e6, 1..200), time in any::<bool>()) {
        let m = Montage::new("one", vec![barstress::ChannelInfo::eeg("Cz", [0.0, 0.0]).unwrap()]).unwrap();
        let rec = Recording::new(m.electrodes.clone(), vec![values], 128.0).unwrap();
        let layout = CsvLayout { time_column: time.then_some(0), ..CsvLayout::default() };
        let back: Recording<f64> = read_csv(&write_csv(&rec, &layout), &layout, 128.0, &m).unwrap();
        prop_assert_eq!(back, rec);
    }

    #[test]
    fn edf_round_trip_any_values(values in prop::collection::vec(-5e3f64..5e3, 2..400)) {
        let m = Montage::new("one", vec![barstress::ChannelInfo::eeg("Cz", [0.0, 0.0]).unwrap()]).unwrap();
        let rec = Recording::new(m.electrodes.clone(), vec![values], 100.0).unwrap();
        let bytes = write_edf(&rec).unwrap();
        let sig = &read_edf_header(&bytes).unwrap().signals[0];
        let step = (sig.physical_max - sig.physical_min) / 65535.0;
        let back: Recording<f64> = read_edf(&bytes, &m).unwrap();
        for (a, b) in rec.samples()[0].iter().zip(&back.samples()[0]) {
            prop_assert!((a - b).abs() <= step / 2.0 + 1e-9 * step);
        }
    }
}

const JUNK: [&str; 12] = [
    "", " ", "-1", "+", "nan", "inf", "1e999", "x", "\"", "9999999999999999999999", "\u{7f}", "0.0.0",
];

fn mutate(bytes: &[u8], rng: &mut ChaCha8Rng, header_len: usize) -> Vec<u8> {
    let mut out = bytes.to_vec();
    let span = header_len.min(out.len()).max(1);
    match rng.random_range(0..6) {
        0 => {
            let i = rng.random_range(0..span);
            out[i] = rng.random();
        }
        1 => {
            let cut = rng.random_range(0..out.len());
            out.truncate(cut);
        }
        2 => {
            let i = rng.random_range(0..span);
            let junk = JUNK.choose(rng).unwrap().as_bytes();
            let end = (i + junk.len()).min(out.len());
            out[i..end].copy_from_slice(&junk[..end - i]);
        }
        3 => {
            let i = rng.random_range(0..span);
            let extra: Vec<u8> = (0..rng.random_range(1..16)).map(|_| rng.random()).collect();
            out.splice(i..i, extra);
        }
        4 => {
            for _ in 0..rng.random_range(1..8) {
                let i = rng.random_range(0..span);
                out[i] = *b" 0123456789.-,;\n".choose(rng).unwrap();
            }
        }
        _ => {
            let i = rng.random_range(0..span);
            let j = rng.random_range(i..span.max(i + 1)).min(out.len());
            out.drain(i..j);
        }
    }
    out
}

#[test]
fn malformed_inputs_give_typed_errors() {
    let m = standard_1020_30();
    let rec = random_recording(&m.subset(&["Fz", "Cz", "Pz"]).unwrap(), 20, 10.0, 3);
    let csv = write_csv(&rec, &CsvLayout::default());
    let csv_header = csv.iter().position(|&b| b == b'\n').unwrap() + 1;
    let edf = write_edf(&rec).unwrap();
    let edf_header = 256 * 4;

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut errors = 0;
    for case in 0..10_000 {
        let outcome = if case % 2 == 0 {
            let bad = mutate(&csv, &mut rng, csv_header + 8);
            catch_unwind(AssertUnwindSafe(|| read_csv::<f64>(&bad, &CsvLayout::default(), 10.0, &m).err()))
        } else {
            let bad = mutate(&edf, &mut rng, edf_header);
            catch_unwind(AssertUnwindSafe(|| read_edf::<f64>(&bad, &m).err()))
        };
        let err = outcome.unwrap_or_else(|_| panic!("parser panicked on case {case}"));
        errors += usize::from(err.is_some());
    }
    assert!(errors > 5_000);
}
