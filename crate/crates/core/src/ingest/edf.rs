//! EDF subset: plain EDF, one sampling rate, no annotation signals.
//!
//! Layout: 256-byte main header, 256 bytes per signal header, then data
//! records of little-endian `i16` samples, signal by signal.

use super::IngestError;
use crate::scalar::Real;
use crate::signal::{ChannelInfo, Montage, Recording};

const MAIN_HEADER: usize = 256;
const SIGNAL_HEADER: usize = 256;
const DIGITAL_MIN: i32 = -32768;
const DIGITAL_MAX: i32 = 32767;

#[derive(Debug, Clone, PartialEq)]
pub struct EdfSignalHeader {
    pub label: String,
    pub transducer: String,
    pub unit: String,
    pub physical_min: f64,
    pub physical_max: f64,
    pub digital_min: i32,
    pub digital_max: i32,
    pub prefilter: String,
    pub samples_per_record: usize,
}

impl EdfSignalHeader {
    fn gain(&self) -> f64 {
        (self.physical_max - self.physical_min) / f64::from(self.digital_max - self.digital_min)
    }

    fn to_physical(&self, d: i16) -> f64 {
        self.physical_min + (f64::from(d) - f64::from(self.digital_min)) * self.gain()
    }

    /// Multiplier that converts the signal's physical unit to microvolts.
    fn microvolt_scale(&self) -> f64 {
        match self.unit.as_str() {
            "mV" => 1e3,
            "V" => 1e6,
            "nV" => 1e-3,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdfHeader {
    pub version: String,
    pub patient: String,
    pub recording: String,
    pub start_date: String,
    pub start_time: String,
    pub header_bytes: usize,
    pub record_count: usize,
    pub record_duration: f64,
    pub signals: Vec<EdfSignalHeader>,
}

impl EdfHeader {
    pub fn sampling_rate(&self) -> Option<f64> {
        self.signals
            .first()
            .map(|s| s.samples_per_record as f64 / self.record_duration)
    }

    fn record_bytes(&self) -> Option<usize> {
        self.signals
            .iter()
            .try_fold(0usize, |acc, s| acc.checked_add(s.samples_per_record.checked_mul(2)?))
    }
}

struct Fields<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Fields<'a> {
    fn text(&mut self, width: usize, field: &'static str) -> Result<String, IngestError> {
        let raw = &self.bytes[self.pos..self.pos + width];
        self.pos += width;
        if !raw.iter().all(|b| (0x20..0x7f).contains(b)) {
            return Err(IngestError::InvalidField {
                field,
                value: String::from_utf8_lossy(raw).into_owned(),
            });
        }
        Ok(String::from_utf8_lossy(raw).trim().to_string())
    }

    fn number<N: std::str::FromStr>(&mut self, width: usize, field: &'static str) -> Result<N, IngestError> {
        let s = self.text(width, field)?;
        s.parse().map_err(|_| IngestError::InvalidField { field, value: s })
    }

    fn each<N>(
        &mut self,
        count: usize,
        mut parse: impl FnMut(&mut Self) -> Result<N, IngestError>,
    ) -> Result<Vec<N>, IngestError> {
        (0..count).map(|_| parse(self)).collect()
    }
}

/// Parse and validate the fixed header block.
pub fn read_edf_header(bytes: &[u8]) -> Result<EdfHeader, IngestError> {
    if bytes.len() < MAIN_HEADER {
        return Err(IngestError::TruncatedHeader {
            needed: MAIN_HEADER,
            available: bytes.len(),
        });
    }
    let mut f = Fields { bytes, pos: 0 };
    let version = f.text(8, "version")?;
    if version != "0" {
        return Err(IngestError::BadMagic(version));
    }
    let patient = f.text(80, "patient")?;
    let recording = f.text(80, "recording")?;
    let start_date = f.text(8, "startdate")?;
    let start_time = f.text(8, "starttime")?;
    let header_bytes: usize = f.number(8, "header_bytes")?;
    let _reserved = f.text(44, "reserved")?;
    let record_count: i64 = f.number(8, "record_count")?;
    let record_duration: f64 = f.number(8, "record_duration")?;
    let signal_count: usize = f.number(4, "signal_count")?;

    if record_count == -1 {
        return Err(IngestError::UnknownRecordCount);
    }
    if record_count < 1 {
        return Err(IngestError::InvalidField {
            field: "record_count",
            value: record_count.to_string(),
        });
    }
    if !(record_duration.is_finite() && record_duration > 0.0) {
        return Err(IngestError::InvalidField {
            field: "record_duration",
            value: record_duration.to_string(),
        });
    }
    if signal_count == 0 {
        return Err(IngestError::InvalidField {
            field: "signal_count",
            value: "0".into(),
        });
    }
    let needed = MAIN_HEADER + SIGNAL_HEADER * signal_count;
    if bytes.len() < needed {
        return Err(IngestError::TruncatedHeader {
            needed,
            available: bytes.len(),
        });
    }
    if header_bytes != needed {
        return Err(IngestError::InvalidField {
            field: "header_bytes",
            value: header_bytes.to_string(),
        });
    }

    let ns = signal_count;
    let labels = f.each(ns, |f| f.text(16, "label"))?;
    let transducers = f.each(ns, |f| f.text(80, "transducer"))?;
    let units = f.each(ns, |f| f.text(8, "physical_dimension"))?;
    let pmins: Vec<f64> = f.each(ns, |f| f.number(8, "physical_min"))?;
    let pmaxs: Vec<f64> = f.each(ns, |f| f.number(8, "physical_max"))?;
    let dmins: Vec<i32> = f.each(ns, |f| f.number(8, "digital_min"))?;
    let dmaxs: Vec<i32> = f.each(ns, |f| f.number(8, "digital_max"))?;
    let prefilters = f.each(ns, |f| f.text(80, "prefilter"))?;
    let sprs: Vec<usize> = f.each(ns, |f| f.number(8, "samples_per_record"))?;

    let mut signals = Vec::with_capacity(ns);
    for i in 0..ns {
        let s = EdfSignalHeader {
            label: labels[i].clone(),
            transducer: transducers[i].clone(),
            unit: units[i].clone(),
            physical_min: pmins[i],
            physical_max: pmaxs[i],
            digital_min: dmins[i],
            digital_max: dmaxs[i],
            prefilter: prefilters[i].clone(),
            samples_per_record: sprs[i],
        };
        if s.digital_min >= s.digital_max || s.digital_min < DIGITAL_MIN || s.digital_max > DIGITAL_MAX {
            return Err(IngestError::DigitalRangeDegenerate(s.label));
        }
        if !(s.physical_min.is_finite() && s.physical_max.is_finite()) || s.physical_min == s.physical_max {
            return Err(IngestError::PhysicalRangeDegenerate(s.label));
        }
        if s.samples_per_record == 0 {
            return Err(IngestError::InvalidField {
                field: "samples_per_record",
                value: "0".into(),
            });
        }
        signals.push(s);
    }
    if signals
        .iter()
        .any(|s| s.samples_per_record != signals[0].samples_per_record)
    {
        return Err(IngestError::MixedSamplingRates);
    }

    Ok(EdfHeader {
        version,
        patient,
        recording,
        start_date,
        start_time,
        header_bytes,
        record_count: record_count as usize,
        record_duration,
        signals,
    })
}

fn montage_index(montage: &Montage, label: &str) -> Option<usize> {
    let bare = label.strip_prefix("EEG ").unwrap_or(label).trim();
    montage.electrodes.iter().position(|e| e.label == label || e.label == bare)
}

/// Decode an EDF byte stream into a recording in microvolts.
pub fn read_edf<T: Real>(bytes: &[u8], montage: &Montage) -> Result<Recording<T>, IngestError> {
    let header = read_edf_header(bytes)?;
    let record_bytes = header.record_bytes().ok_or(IngestError::TruncatedData {
        needed: usize::MAX,
        available: bytes.len(),
    })?;
    let needed = record_bytes
        .checked_mul(header.record_count)
        .and_then(|n| n.checked_add(header.header_bytes))
        .unwrap_or(usize::MAX);
    if bytes.len() < needed {
        return Err(IngestError::TruncatedData {
            needed,
            available: bytes.len(),
        });
    }

    let mut slots = Vec::with_capacity(header.signals.len());
    for s in &header.signals {
        let idx = montage_index(montage, &s.label).ok_or_else(|| IngestError::UnknownChannelLabel(s.label.clone()))?;
        if slots.contains(&idx) {
            return Err(IngestError::Signal(crate::signal::SignalError::DuplicateLabel(
                s.label.clone(),
            )));
        }
        slots.push(idx);
    }

    let mut series: Vec<Vec<T>> = header
        .signals
        .iter()
        .map(|s| Vec::with_capacity(s.samples_per_record * header.record_count))
        .collect();
    let mut pos = header.header_bytes;
    for _ in 0..header.record_count {
        for (s, out) in header.signals.iter().zip(series.iter_mut()) {
            let scale = s.microvolt_scale();
            for chunk in bytes[pos..pos + 2 * s.samples_per_record].chunks_exact(2) {
                let d = i16::from_le_bytes([chunk[0], chunk[1]]);
                out.push(T::of(s.to_physical(d) * scale));
            }
            pos += 2 * s.samples_per_record;
        }
    }

    let mut order: Vec<usize> = (0..slots.len()).collect();
    order.sort_by_key(|&i| slots[i]);
    let channels: Vec<ChannelInfo> = order.iter().map(|&i| montage.electrodes[slots[i]].clone()).collect();
    let mut series: Vec<Option<Vec<T>>> = series.into_iter().map(Some).collect();
    let samples = order.iter().map(|&i| series[i].take().unwrap_or_default()).collect();
    let fs = header.sampling_rate().unwrap_or(0.0);
    Ok(Recording::new(channels, samples, fs)?)
}

fn put(out: &mut Vec<u8>, text: &str, width: usize) -> Result<(), IngestError> {
    if text.len() > width || !text.is_ascii() {
        return Err(IngestError::Unencodable(format!("{text:?} does not fit {width} ASCII bytes")));
    }
    out.extend_from_slice(text.as_bytes());
    out.extend(std::iter::repeat_n(b' ', width - text.len()));
    Ok(())
}

/// Shortest decimal rendering of `v` that fits 8 bytes, rounded down
/// (`outward_low`) or up so the true value stays inside the range.
fn format_bound(v: f64, outward_low: bool) -> Result<(String, f64), IngestError> {
    for decimals in (0..=7).rev() {
        let scale = 10f64.powi(decimals);
        let scaled = v * scale;
        let q = if outward_low { scaled.floor() } else { scaled.ceil() };
        let text = format!("{:.*}", decimals as usize, q / scale);
        if text.len() <= 8 {
            let parsed: f64 = text.parse().expect("formatted float parses");
            return Ok((text, parsed));
        }
    }
    Err(IngestError::Unencodable(format!("value {v} does not fit an 8-byte field")))
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Choose (samples per record, duration text) so every record is full and
/// the duration field reproduces the sampling rate.
fn record_layout(n: usize, fs: f64) -> Result<(usize, String), IngestError> {
    let candidates = if fs.fract() == 0.0 && fs >= 1.0 {
        let spr = gcd(n, fs as usize);
        vec![spr, n]
    } else {
        vec![n]
    };
    for spr in candidates {
        let duration = spr as f64 / fs;
        let text = (0..=7)
            .rev()
            .map(|d| format!("{:.*}", d, duration))
            .map(|s| {
                if s.contains('.') {
                    s.trim_end_matches('0').trim_end_matches('.').to_string()
                } else {
                    s
                }
            })
            .find(|s| s.len() <= 8);
        if let Some(text) = text {
            let parsed: f64 = text.parse().unwrap_or(0.0);
            if parsed > 0.0 && ((spr as f64 / parsed) - fs).abs() <= 1e-9 * fs {
                return Ok((spr, text));
            }
        }
    }
    Err(IngestError::Unencodable(format!(
        "no record duration represents {fs} Hz over {n} samples"
    )))
}

/// Encode a recording as 16-bit EDF. Each channel gets its own physical
/// range (data min/max, widened to fit the 8-byte field), so the
/// round-trip error is at most half of `(max - min) / 65535`.
pub fn write_edf<T: Real>(recording: &Recording<T>) -> Result<Vec<u8>, IngestError> {
    let n = recording.sample_count();
    let ns = recording.channels().len();
    if n == 0 || ns == 0 {
        return Err(IngestError::Unencodable("recording is empty".into()));
    }
    if ns > 9999 {
        return Err(IngestError::Unencodable("more than 9999 signals".into()));
    }
    let (spr, duration) = record_layout(n, recording.sampling_rate())?;
    let record_count = n / spr;

    let mut ranges = Vec::with_capacity(ns);
    for s in recording.samples() {
        let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v.as_f64()), hi.max(v.as_f64()))
        });
        let (lo, hi) = if lo == hi { (lo - 1.0, hi + 1.0) } else { (lo, hi) };
        let (lo_text, lo) = format_bound(lo, true)?;
        let (hi_text, hi) = format_bound(hi, false)?;
        ranges.push((lo_text, lo, hi_text, hi));
    }

    let header_bytes = MAIN_HEADER + SIGNAL_HEADER * ns;
    let mut out = Vec::with_capacity(header_bytes + 2 * n * ns);
    put(&mut out, "0", 8)?;
    put(&mut out, "X X X X", 80)?;
    put(&mut out, "Startdate X X X X", 80)?;
    put(&mut out, "01.01.00", 8)?;
    put(&mut out, "00.00.00", 8)?;
    put(&mut out, &header_bytes.to_string(), 8)?;
    put(&mut out, "", 44)?;
    put(&mut out, &record_count.to_string(), 8)?;
    put(&mut out, &duration, 8)?;
    put(&mut out, &ns.to_string(), 4)?;

    let chans = recording.channels();
    for c in chans {
        put(&mut out, &c.label, 16)?;
    }
    for _ in chans {
        put(&mut out, "AgAgCl electrode", 80)?;
    }
    for _ in chans {
        put(&mut out, "uV", 8)?;
    }
    for r in &ranges {
        put(&mut out, &r.0, 8)?;
    }
    for r in &ranges {
        put(&mut out, &r.2, 8)?;
    }
    for _ in chans {
        put(&mut out, &DIGITAL_MIN.to_string(), 8)?;
    }
    for _ in chans {
        put(&mut out, &DIGITAL_MAX.to_string(), 8)?;
    }
    for _ in chans {
        put(&mut out, "", 80)?;
    }
    for _ in chans {
        put(&mut out, &spr.to_string(), 8)?;
    }
    for _ in chans {
        put(&mut out, "", 32)?;
    }

    let span = f64::from(DIGITAL_MAX - DIGITAL_MIN);
    for rec in 0..record_count {
        for (s, &(_, lo, _, hi)) in recording.samples().iter().zip(&ranges) {
            for v in &s[rec * spr..(rec + 1) * spr] {
                let d = ((v.as_f64() - lo) / (hi - lo) * span + f64::from(DIGITAL_MIN))
                    .round()
                    .clamp(f64::from(DIGITAL_MIN), f64::from(DIGITAL_MAX)) as i16;
                out.extend_from_slice(&d.to_le_bytes());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::ChannelInfo;

    fn one_channel_montage() -> Montage {
        Montage::new("one", vec![ChannelInfo::eeg("Cz", [0.0, 0.0]).unwrap()]).unwrap()
    }

    fn handmade(digital: i16, spr: usize) -> Vec<u8> {
        let mut out = Vec::new();
        put(&mut out, "0", 8).unwrap();
        put(&mut out, "", 160).unwrap();
        put(&mut out, "01.02.03", 8).unwrap();
        put(&mut out, "04.05.06", 8).unwrap();
        put(&mut out, "512", 8).unwrap();
        put(&mut out, "", 44).unwrap();
        put(&mut out, "1", 8).unwrap();
        put(&mut out, "1", 8).unwrap();
        put(&mut out, "1", 4).unwrap();
        put(&mut out, "Cz", 16).unwrap();
        put(&mut out, "", 80).unwrap();
        put(&mut out, "uV", 8).unwrap();
        put(&mut out, "-200", 8).unwrap();
        put(&mut out, "200", 8).unwrap();
        put(&mut out, "-2048", 8).unwrap();
        put(&mut out, "2047", 8).unwrap();
        put(&mut out, "", 80).unwrap();
        put(&mut out, &spr.to_string(), 8).unwrap();
        put(&mut out, "", 32).unwrap();
        for _ in 0..spr {
            out.extend_from_slice(&digital.to_le_bytes());
        }
        out
    }

    #[test]
    fn digital_max_maps_to_physical_max() {
        let rec: Recording<f64> = read_edf(&handmade(2047, 4), &one_channel_montage()).unwrap();
        assert_eq!(rec.sampling_rate(), 4.0);
        assert_eq!(rec.samples()[0], vec![200.0; 4]);
        let rec: Recording<f64> = read_edf(&handmade(-2048, 1), &one_channel_montage()).unwrap();
        assert_eq!(rec.samples()[0], vec![-200.0]);
    }

    #[test]
    fn header_errors() {
        let m = one_channel_montage();
        assert!(matches!(
            read_edf::<f64>(&[b'0'; 100], &m),
            Err(IngestError::TruncatedHeader { .. })
        ));
        let mut bad = handmade(0, 1);
        bad[0] = b'X';
        assert!(matches!(read_edf::<f64>(&bad, &m), Err(IngestError::BadMagic(_))));

        let mut unknown = handmade(0, 1);
        unknown[236..244].copy_from_slice(b"-1      ");
        assert_eq!(read_edf::<f64>(&unknown, &m), Err(IngestError::UnknownRecordCount));

        let mut degenerate = handmade(0, 1);
        let dmax = 256 + 16 + 80 + 8 + 8 + 8 + 8;
        degenerate[dmax..dmax + 8].copy_from_slice(b"-2048   ");
        assert!(matches!(
            read_edf::<f64>(&degenerate, &m),
            Err(IngestError::DigitalRangeDegenerate(_))
        ));

        let short = handmade(0, 4);
        assert!(matches!(
            read_edf::<f64>(&short[..short.len() - 1], &m),
            Err(IngestError::TruncatedData { .. })
        ));
    }

    #[test]
    fn mixed_rates_rejected() {
        let m = Montage::new(
            "two",
            vec![
                ChannelInfo::eeg("A", [0.0, 0.0]).unwrap(),
                ChannelInfo::eeg("B", [0.1, 0.0]).unwrap(),
            ],
        )
        .unwrap();
        let rec = Recording::new(m.electrodes.clone(), vec![vec![1.0f64, 2.0], vec![3.0, 4.0]], 2.0).unwrap();
        let mut bytes = write_edf(&rec).unwrap();
        let spr_b = 256 + 2 * (16 + 80 + 8 * 5 + 80) + 8;
        bytes[spr_b..spr_b + 8].copy_from_slice(b"1       ");
        assert_eq!(read_edf::<f64>(&bytes, &m), Err(IngestError::MixedSamplingRates));
    }

    #[test]
    fn bound_formatting_is_outward() {
        let (t, v) = format_bound(-123.456789123, true).unwrap();
        assert!(t.len() <= 8 && v <= -123.456789123);
        let (t, v) = format_bound(98765.4321, false).unwrap();
        assert!(t.len() <= 8 && v >= 98765.4321);
        assert!(format_bound(1e12, false).is_err());
    }

    #[test]
    fn record_layouts() {
        assert_eq!(record_layout(5000, 500.0).unwrap(), (500, "1".to_string()));
        assert_eq!(record_layout(5001, 500.0).unwrap(), (1, "0.002".to_string()));
        assert_eq!(record_layout(512, 256.0).unwrap(), (256, "1".to_string()));
        assert!(matches!(record_layout(10, 256.0), Err(IngestError::Unencodable(_))));
    }

    #[test]
    fn unit_scaling() {
        let mut bytes = handmade(2047, 1);
        let unit = 256 + 16 + 80;
        bytes[unit..unit + 8].copy_from_slice(b"mV      ");
        let rec: Recording<f64> = read_edf(&bytes, &one_channel_montage()).unwrap();
        assert_eq!(rec.samples()[0], vec![200_000.0]);
    }
}
