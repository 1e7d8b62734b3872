//! One function per subcommand. Each returns the files to write; nothing
//! touches the output directory until the whole computation has succeeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use barstress::ingest::{load_montage, read_csv, read_edf, write_csv, write_edf, CsvLayout, MONTAGE_DIR_ENV};
use barstress::regress::{compare_models, fit_4pl, fit_quartic, FitResult};
use barstress::spectral::{
    band_power, channel_band_power, channel_band_ratios, measure_baseline, power_ratio, welch_psd,
    BarPoint, BarSeries, ChannelSelection, PsdEstimate,
};
use barstress::synth::{synth_segments, BandTarget, ChannelGain, SynthSpec, GENERATOR};
use barstress::topo::{interpolate_scalp, render_topomap, similarity_matrix, Palette, TopoGrid, TopoVector};
use barstress::{slice_epochs, BandDefinition, BandName, Montage, Phase, Recording, SessionProtocol};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{Format, ModelChoice, RecordingFormat, RunConfig, SCHEMA_VERSION};
use crate::error::CliError;

#[derive(Debug, Default)]
pub struct Output {
    /// File name (relative to the output directory) and contents.
    pub files: Vec<(String, Vec<u8>)>,
    pub messages: Vec<String>,
    pub non_converged: bool,
}

impl Output {
    fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.into(), bytes.into()));
    }

    fn add_json(&mut self, name: &str, doc: &Value) {
        let mut bytes = serde_json::to_vec_pretty(doc).expect("json serializes");
        bytes.push(b'\n');
        self.add(name, bytes);
    }
}

fn montage(cfg: &RunConfig) -> Result<Montage, CliError> {
    let dir = std::env::var_os(MONTAGE_DIR_ENV).map(PathBuf::from);
    Ok(load_montage(&cfg.montage, dir.as_deref())?)
}

fn load_recording(cfg: &RunConfig, path: &Path) -> Result<Recording<f64>, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let montage = montage(cfg)?;
    let edf = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("edf"));
    let rec = if edf {
        read_edf(&bytes, &montage)
    } else {
        let fs = cfg
            .sampling_rate
            .ok_or_else(|| CliError::Validation("sampling_rate is required for CSV input".into()))?;
        read_csv(&bytes, &cfg.csv, fs, &montage)
    };
    rec.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn input_recording(cfg: &RunConfig) -> Result<Recording<f64>, CliError> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Validation("no input recording given".into()))?;
    load_recording(cfg, path)
}

fn selection(cfg: &RunConfig) -> ChannelSelection<'_> {
    match &cfg.channels {
        Some(labels) => ChannelSelection::Labels(labels),
        None => ChannelSelection::AllEeg,
    }
}

fn file_safe(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

pub fn psd(cfg: &RunConfig) -> Result<Output, CliError> {
    let rec = input_recording(cfg)?;
    let protocol = SessionProtocol {
        epoch_times: vec![cfg.psd.at],
        ..SessionProtocol::baseline(cfg.protocol.gamer_type)
    };
    let epoch = slice_epochs(&rec, &protocol, cfg.welch.window_len)?.remove(0);
    let psd = welch_psd(&epoch, &cfg.welch)?;

    let mut out = Output::default();
    let defaults = [Format::Csv, Format::Json];
    if cfg.wants(Format::Csv, &defaults) {
        for (c, info) in psd.channels.iter().enumerate() {
            let mut text = String::from("frequency_hz,psd_uv2_per_hz\n");
            for (f, p) in psd.frequencies.iter().zip(&psd.power[c]) {
                writeln!(text, "{f},{p}").unwrap();
            }
            out.add(format!("psd_{}.csv", file_safe(&info.label)), text);
        }
    }
    if cfg.wants(Format::Json, &defaults) {
        out.add_json("psd.json", &psd_json(&psd, cfg.psd.at)?);
    }
    out.messages.push(format!(
        "psd: {} channels, {} bins at {:.4} Hz resolution",
        psd.channels.len(),
        psd.frequencies.len(),
        psd.resolution()
    ));
    Ok(out)
}

fn psd_json(psd: &PsdEstimate<f64>, at: f64) -> Result<Value, CliError> {
    let bands = [BandDefinition::delta(), BandDefinition::theta(), BandDefinition::alpha(), BandDefinition::beta()];
    let mut channels = Vec::new();
    for (c, info) in psd.channels.iter().enumerate() {
        let mut powers = serde_json::Map::new();
        for band in bands.iter().filter(|b| b.f_high <= psd.nyquist()) {
            powers.insert(band.name.to_string(), json!(channel_band_power(psd, c, band)?));
        }
        channels.push(json!({
            "label": info.label,
            "peak_hz": psd.peak_frequency(c),
            "band_powers": powers,
            "psd": psd.power[c],
        }));
    }
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "window_start_s": at,
        "sampling_rate_hz": psd.sampling_rate,
        "fft_size": psd.fft_size,
        "resolution_hz": psd.resolution(),
        "welch": psd.config,
        "frequencies_hz": psd.frequencies,
        "channels": channels,
    }))
}

struct EpochMeasure {
    time: f64,
    ratio: f64,
    numerator: f64,
    denominator: f64,
}

fn measure_epochs(cfg: &RunConfig, rec: &Recording<f64>, protocol: &SessionProtocol) -> Result<Vec<EpochMeasure>, CliError> {
    slice_epochs(rec, protocol, cfg.welch.window_len)?
        .iter()
        .map(|e| {
            let psd = welch_psd(e, &cfg.welch)?;
            let numerator = band_power(&psd, &cfg.bands.numerator, selection(cfg))?;
            let denominator = band_power(&psd, &cfg.bands.denominator, selection(cfg))?;
            Ok(EpochMeasure {
                time: e.t_start,
                ratio: power_ratio(numerator, denominator)?,
                numerator,
                denominator,
            })
        })
        .collect()
}

fn resolve_baseline(cfg: &RunConfig, phase: Phase, measures: &[EpochMeasure]) -> Result<(f64, &'static str), CliError> {
    if let Some(v) = cfg.baseline.value {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Validation(format!("baseline.value must be positive, got {v}")));
        }
        return Ok((v, "configured"));
    }
    if let Some(path) = &cfg.baseline.input {
        let rec = load_recording(cfg, path)?;
        return Ok((measure_baseline(&rec, &cfg.welch, &cfg.bands, selection(cfg))?, "measured"));
    }
    if phase == Phase::Baseline {
        return Ok((measures[0].ratio, "measured"));
    }
    Err(CliError::Validation(
        "no baseline ratio: set baseline.value or baseline.input".into(),
    ))
}

pub fn bar(cfg: &RunConfig) -> Result<Output, CliError> {
    let rec = input_recording(cfg)?;
    let protocol = cfg.protocol.build()?;
    let measures = measure_epochs(cfg, &rec, &protocol)?;
    let (baseline, source) = resolve_baseline(cfg, protocol.phase, &measures)?;
    let points = measures.iter().map(|m| BarPoint { time: m.time, ratio: m.ratio }).collect();
    let series = BarSeries::new(points, protocol.clone(), baseline)?;
    let increases = series.relative_increases()?;

    let mut out = Output::default();
    let defaults = [Format::Csv, Format::Json];
    if cfg.wants(Format::Csv, &defaults) {
        let p = &protocol;
        let mut text = String::from(
            "time_s,bar,phase,game_type,gamer_type,music_type,baseline,relative_increase,numerator_power,denominator_power\n",
        );
        for (m, inc) in measures.iter().zip(&increases) {
            writeln!(
                text,
                "{},{},{},{},{},{},{},{},{},{}",
                m.time, m.ratio, p.phase, p.game_type, p.gamer_type, p.music_type, baseline, inc, m.numerator, m.denominator
            )
            .unwrap();
        }
        out.add("bar.csv", text);
        out.add("bar_points.csv", series.to_points_csv());
    }
    if cfg.wants(Format::Json, &defaults) {
        let rows: Vec<Value> = measures
            .iter()
            .zip(&increases)
            .map(|(m, inc)| {
                json!({
                    "time_s": m.time,
                    "minutes": m.time / 60.0,
                    "bar": m.ratio,
                    "relative_increase": inc,
                    "numerator_power": m.numerator,
                    "denominator_power": m.denominator,
                })
            })
            .collect();
        out.add_json(
            "bar.json",
            &json!({
                "schema_version": SCHEMA_VERSION,
                "protocol": protocol,
                "bands": cfg.bands,
                "channels": cfg.channels,
                "welch": cfg.welch,
                "baseline": {"value": baseline, "source": source},
                "points": rows,
                "fit_points": series.fit_points(),
            }),
        );
    }
    let ratios: Vec<String> = measures.iter().map(|m| format!("{:.4}", m.ratio)).collect();
    out.messages.push(format!("bar: baseline {baseline:.4} ({source}); ratios [{}]", ratios.join(", ")));
    Ok(out)
}

/// Two-column `x,y` points; a non-numeric first line is a header.
pub fn parse_points(text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split([',', ';', '\t']).map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => points.push((v[0], v[1])),
            None if points.is_empty() && fields.len() == 2 && !line_has_number_before(text, i) => continue,
            _ => {
                return Err(CliError::Validation(format!(
                    "points line {}: expected two numbers, found {line:?}",
                    i + 1
                )))
            }
        }
    }
    Ok(points)
}

fn line_has_number_before(text: &str, line: usize) -> bool {
    text.lines()
        .take(line)
        .any(|l| !l.trim().is_empty() && !l.trim().starts_with('#'))
}

fn fit_json(fit: &FitResult<f64>) -> Value {
    let mut doc = fit.to_json();
    doc["diverged"] = json!(!fit.converged);
    doc
}

pub fn fit(cfg: &RunConfig) -> Result<Output, CliError> {
    let path = cfg
        .fit
        .points
        .as_ref()
        .ok_or_else(|| CliError::Validation("no points file given".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let points = parse_points(&text)?;
    let options = cfg.fit.options();
    let mut fits = Vec::new();
    if matches!(cfg.fit.model, ModelChoice::FourPl | ModelChoice::Both) {
        fits.push(fit_4pl(&points, &options)?);
    }
    if matches!(cfg.fit.model, ModelChoice::Quartic | ModelChoice::Both) {
        fits.push(fit_quartic(&points)?);
    }
    let comparison = if fits.len() > 1 {
        let ranking = compare_models(&fits)?;
        Some(json!({
            "ranking": ranking.order.iter().map(|&i| fits[i].model.type_name()).collect::<Vec<_>>(),
            "overfit_warning": ranking.overfit_warning,
        }))
    } else {
        None
    };

    let mut out = Output {
        non_converged: fits.iter().any(|f| !f.converged),
        ..Output::default()
    };
    out.add_json(
        "fit.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "points": points,
            "fits": fits.iter().map(fit_json).collect::<Vec<_>>(),
            "comparison": comparison,
        }),
    );
    for f in &fits {
        out.messages.push(format!(
            "fit {}: r_squared {:.6}, aic {}, {}",
            f.model.type_name(),
            f.r_squared,
            if f.aic.is_finite() { format!("{:.4}", f.aic) } else { "-inf (interpolating)".into() },
            if f.converged { "converged" } else { "did not converge" }
        ));
    }
    Ok(out)
}

enum Scalar {
    Ratio,
    Band(BandDefinition),
}

fn parse_scalar(cfg: &RunConfig) -> Result<Scalar, CliError> {
    let raw = cfg.topo.scalar.as_str();
    if raw == "bar" {
        return Ok(Scalar::Ratio);
    }
    let bad = || CliError::Validation(format!("topo.scalar must be `bar` or `band:<name>`, got {raw:?}"));
    let name = raw.strip_prefix("band:").ok_or_else(bad)?;
    let name: BandName = serde_json::from_value(Value::String(name.into())).map_err(|_| bad())?;
    [cfg.bands.numerator, cfg.bands.denominator]
        .into_iter()
        .find(|b| b.name == name)
        .or_else(|| BandDefinition::by_name(name))
        .map(Scalar::Band)
        .ok_or_else(bad)
}

pub fn topo(cfg: &RunConfig) -> Result<Output, CliError> {
    let scalar = parse_scalar(cfg)?;
    let rec = input_recording(cfg)?;
    let protocol = cfg.protocol.build()?;
    let layout = Montage::new(cfg.montage.clone(), rec.channels().to_vec())?;
    let eeg: Vec<usize> = (0..rec.channels().len()).filter(|&i| rec.channels()[i].is_eeg()).collect();

    let epochs = slice_epochs(&rec, &protocol, cfg.welch.window_len)?;
    let mut vectors = Vec::with_capacity(epochs.len());
    for e in &epochs {
        let psd = welch_psd(e, &cfg.welch)?;
        let all = match &scalar {
            Scalar::Ratio => channel_band_ratios(&psd, &cfg.bands.numerator, &cfg.bands.denominator)?,
            Scalar::Band(band) => (0..psd.channels.len())
                .map(|c| channel_band_power(&psd, c, band))
                .collect::<Result<_, _>>()?,
        };
        vectors.push(TopoVector::for_montage(eeg.iter().map(|&i| all[i]).collect(), &layout)?);
    }
    let grids = vectors
        .iter()
        .map(|v| interpolate_scalp(v, &layout, cfg.topo.resolution))
        .collect::<Result<Vec<TopoGrid<f64>>, _>>()?;
    let similarity = similarity_matrix(&vectors)?;
    let images = grids
        .iter()
        .map(|g| render_topomap(g, cfg.topo.palette))
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = Output::default();
    let defaults = [Format::Ppm, Format::Csv, Format::Json];
    let ext = match cfg.topo.palette {
        Palette::BlueRed => "ppm",
        Palette::Gray => "pgm",
    };
    let want_images = cfg.wants(Format::Ppm, &defaults);
    let want_csv = cfg.wants(Format::Csv, &defaults);
    let labels: Vec<&str> = eeg.iter().map(|&i| rec.channels()[i].label.as_str()).collect();
    if want_images {
        for (i, img) in images.into_iter().enumerate() {
            out.add(format!("topo_{i}.{ext}"), img);
        }
    }
    if want_csv {
        for (i, g) in grids.iter().enumerate() {
            out.add(format!("topo_{i}_grid.csv"), g.to_csv());
        }
        let mut values = format!("time_s,{}\n", labels.join(","));
        for (e, v) in epochs.iter().zip(&vectors) {
            let cells: Vec<String> = v.values().iter().map(f64::to_string).collect();
            writeln!(values, "{},{}", e.t_start, cells.join(",")).unwrap();
        }
        out.add("topo_values.csv", values);
        out.add("similarity.csv", similarity_csv(&similarity));
    }
    if cfg.wants(Format::Json, &defaults) {
        let entries: Vec<Value> = epochs
            .iter()
            .zip(&vectors)
            .zip(&grids)
            .enumerate()
            .map(|(i, ((e, v), g))| {
                let peak = g.argmax().map(|(r, c)| {
                    json!({"row": r, "col": c, "center": TopoGrid::<f64>::cell_center(g.resolution, r, c)})
                });
                json!({
                    "index": i,
                    "time_s": e.t_start,
                    "image": want_images.then(|| format!("topo_{i}.{ext}")),
                    "grid_csv": want_csv.then(|| format!("topo_{i}_grid.csv")),
                    "argmax": peak,
                    "values": labels.iter().zip(v.values()).map(|(l, x)| (l.to_string(), json!(x))).collect::<serde_json::Map<_, _>>(),
                })
            })
            .collect();
        out.add_json(
            "topo.json",
            &json!({
                "schema_version": SCHEMA_VERSION,
                "scalar": cfg.topo.scalar,
                "resolution": cfg.topo.resolution,
                "palette": cfg.topo.palette,
                "epochs": entries,
                "similarity": similarity,
            }),
        );
    }
    out.messages.push(format!("topo: {} epochs, {}x{} grids", epochs.len(), cfg.topo.resolution, cfg.topo.resolution));
    Ok(out)
}

fn similarity_csv(m: &[Vec<f64>]) -> String {
    let mut text = String::from("epoch");
    for j in 0..m.len() {
        write!(text, ",{j}").unwrap();
    }
    text.push('\n');
    for (i, row) in m.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(text, "{i},{}", cells.join(",")).unwrap();
    }
    text
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum BandRef {
    Name(BandName),
    Full(BandDefinition),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetSpec {
    band: BandRef,
    power: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GainSpec {
    label: String,
    band: BandName,
    factor: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentSpec {
    duration: f64,
    targets: Option<Vec<TargetSpec>>,
    channel_gains: Option<Vec<GainSpec>>,
    noise_floor: Option<f64>,
}

/// Synthesis spec file. `segments`, when present, are generated back to
/// back; each inherits any field it leaves out and uses seed `seed + i`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthFile {
    #[serde(default = "schema_version")]
    schema_version: u32,
    duration: Option<f64>,
    sampling_rate: f64,
    montage: Option<String>,
    channels: Option<Vec<String>>,
    #[serde(default)]
    targets: Vec<TargetSpec>,
    #[serde(default)]
    noise_floor: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    channel_gains: Vec<GainSpec>,
    #[serde(default)]
    segments: Vec<SegmentSpec>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn targets(specs: &[TargetSpec]) -> Result<Vec<BandTarget>, CliError> {
    specs
        .iter()
        .map(|t| {
            let band = match &t.band {
                BandRef::Name(n) => BandDefinition::by_name(*n)
                    .ok_or_else(|| CliError::Validation("a custom band needs f_low and f_high".into()))?,
                BandRef::Full(b) => BandDefinition::new(b.name, b.f_low, b.f_high)?,
            };
            Ok(BandTarget { band, power: t.power })
        })
        .collect()
}

fn gains(specs: &[GainSpec]) -> Vec<ChannelGain> {
    specs
        .iter()
        .map(|g| ChannelGain {
            label: g.label.clone(),
            band: g.band,
            factor: g.factor,
        })
        .collect()
}

fn synth_specs(cfg: &RunConfig, file: &SynthFile) -> Result<Vec<SynthSpec>, CliError> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::Validation(format!("synth spec schema_version {} is not supported", file.schema_version)));
    }
    let mut montage_cfg = cfg.clone();
    if let Some(m) = &file.montage {
        montage_cfg.montage = m.clone();
    }
    let mut montage = montage(&montage_cfg)?;
    if let Some(labels) = &file.channels {
        let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
        montage = montage
            .subset(&labels)
            .ok_or_else(|| CliError::Validation(format!("channels {labels:?} are not all in montage {}", montage.name)))?;
    }
    let seed = cfg.seed.unwrap_or(file.seed);
    let base = SynthSpec {
        duration: file.duration.unwrap_or(0.0),
        sampling_rate: file.sampling_rate,
        montage,
        targets: targets(&file.targets)?,
        noise_floor: file.noise_floor,
        seed,
        channel_gains: gains(&file.channel_gains),
    };
    if file.segments.is_empty() {
        if file.duration.is_none() {
            return Err(CliError::Validation("synth spec needs a duration or segments".into()));
        }
        return Ok(vec![base]);
    }
    file.segments
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(SynthSpec {
                duration: s.duration,
                targets: match &s.targets {
                    Some(t) => targets(t)?,
                    None => base.targets.clone(),
                },
                channel_gains: s.channel_gains.as_deref().map_or_else(|| base.channel_gains.clone(), gains),
                noise_floor: s.noise_floor.unwrap_or(base.noise_floor),
                seed: seed.wrapping_add(i as u64),
                ..base.clone()
            })
        })
        .collect()
}

pub fn synth(cfg: &RunConfig) -> Result<Output, CliError> {
    let path = cfg
        .synth
        .spec
        .as_ref()
        .ok_or_else(|| CliError::Validation("no synth spec file given".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: SynthFile =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let specs = synth_specs(cfg, &file)?;
    let rec = synth_segments::<f64>(&specs)?;

    let mut out = Output::default();
    let stem = file_safe(&cfg.synth.name);
    let mut written = Vec::new();
    for kind in &cfg.synth.outputs {
        match kind {
            RecordingFormat::Csv => {
                written.push(format!("{stem}.csv"));
                out.add(format!("{stem}.csv"), write_csv(&rec, &CsvLayout::default()));
            }
            RecordingFormat::Edf => {
                written.push(format!("{stem}.edf"));
                out.add(format!("{stem}.edf"), write_edf(&rec)?);
            }
        }
    }
    out.add_json(
        &format!("{stem}.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "generator": GENERATOR,
            "seed": specs[0].seed,
            "sampling_rate_hz": rec.sampling_rate(),
            "duration_s": rec.duration(),
            "channels": rec.channels().iter().map(|c| c.label.as_str()).collect::<Vec<_>>(),
            "files": written,
            "segments": specs.iter().map(SynthSpec::metadata).collect::<Vec<_>>(),
        }),
    );
    out.messages.push(format!(
        "synth: {} channels, {} s at {} Hz, seed {}",
        rec.channels().len(),
        rec.duration(),
        rec.sampling_rate(),
        specs[0].seed
    ));
    Ok(out)
}

fn read_artifact(dir: &Path, name: &str) -> Result<Option<Value>, CliError> {
    let path = dir.join(name);
    match std::fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(CliError::io(&path, e)),
    }
}

pub fn report(cfg: &RunConfig) -> Result<Output, CliError> {
    let dir = &cfg.out;
    let bar = read_artifact(dir, "bar.json")?.ok_or_else(|| {
        CliError::Validation(format!("missing artifact {}; run `barstress bar` first", dir.join("bar.json").display()))
    })?;
    let fit = read_artifact(dir, "fit.json")?;
    let topo = read_artifact(dir, "topo.json")?;

    let absent = || json!({"status": "absent"});
    let fits = fit.as_ref().map_or_else(absent, |f| {
        json!({"status": "present", "fits": f["fits"], "comparison": f["comparison"]})
    });
    let topography = topo.as_ref().map_or_else(absent, |t| {
        let images: Vec<Value> = t["epochs"]
            .as_array()
            .map(|e| e.iter().map(|x| x["image"].clone()).filter(|v| !v.is_null()).collect())
            .unwrap_or_default();
        json!({"status": "present", "scalar": t["scalar"], "images": images, "similarity": t["similarity"]})
    });
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "bar": {
            "status": "present",
            "protocol": bar["protocol"],
            "bands": bar["bands"],
            "baseline": bar["baseline"],
            "points": bar["points"],
        },
        "fits": fits,
        "topography": topography,
    });

    let mut out = Output::default();
    out.add_json("report.json", &doc);
    out.add("report.md", markdown(&doc));
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    out.add_json(
        "report.meta.json",
        &json!({"generated_at_unix_s": now, "tool_version": env!("CARGO_PKG_VERSION")}),
    );
    out.messages.push(format!("report: {}", dir.join("report.json").display()));
    Ok(out)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), |x| format!("{x:.4}")),
        Value::Null => "n/a".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn markdown(doc: &Value) -> String {
    let mut md = String::from("# Session report\n\n");
    let bar = &doc["bar"];
    let p = &bar["protocol"];
    writeln!(
        md,
        "Phase `{}`, game `{}`, gamer type `{}`, music `{}`. Baseline ratio {} ({}).\n",
        cell(&p["phase"]),
        cell(&p["game_type"]),
        cell(&p["gamer_type"]),
        cell(&p["music_type"]),
        cell(&bar["baseline"]["value"]),
        cell(&bar["baseline"]["source"])
    )
    .unwrap();
    md.push_str("## Ratio series\n\n| minute | ratio | relative increase |\n|---:|---:|---:|\n");
    for pt in bar["points"].as_array().into_iter().flatten() {
        writeln!(md, "| {} | {} | {} |", cell(&pt["minutes"]), cell(&pt["bar"]), cell(&pt["relative_increase"])).unwrap();
    }

    md.push_str("\n## Curve fits\n\n");
    if doc["fits"]["status"] == "absent" {
        md.push_str("_absent_\n");
    } else {
        md.push_str("| model | R² | AIC | RSS | converged |\n|---|---:|---:|---:|---|\n");
        for f in doc["fits"]["fits"].as_array().into_iter().flatten() {
            let aic = if f["aic"].is_null() { "-inf".to_string() } else { cell(&f["aic"]) };
            writeln!(
                md,
                "| {} | {} | {} | {:.3e} | {} |",
                cell(&f["model_type"]),
                cell(&f["r_squared"]),
                aic,
                f["rss"].as_f64().unwrap_or(f64::NAN),
                f["converged"]
            )
            .unwrap();
        }
        let cmp = &doc["fits"]["comparison"];
        if !cmp.is_null() {
            let order: Vec<String> = cmp["ranking"].as_array().into_iter().flatten().map(cell).collect();
            writeln!(md, "\nRanking by AIC: {}.", order.join(" > ")).unwrap();
            if cmp["overfit_warning"] == true {
                md.push_str("The top-ranked model interpolates its points; its AIC lead reflects overfitting.\n");
            }
        }
    }

    md.push_str("\n## Topography\n\n");
    if doc["topography"]["status"] == "absent" {
        md.push_str("_absent_\n");
    } else {
        for img in doc["topography"]["images"].as_array().into_iter().flatten() {
            writeln!(md, "- {}", cell(img)).unwrap();
        }
        md.push_str("\nSimilarity (cos θ):\n\n");
        for row in doc["topography"]["similarity"].as_array().into_iter().flatten() {
            let cells: Vec<String> = row.as_array().into_iter().flatten().map(cell).collect();
            writeln!(md, "    {}", cells.join("  ")).unwrap();
        }
    }
    md
}
