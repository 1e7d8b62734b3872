//! Run configuration: defaults, a JSON config file, then `--set` overrides.

use std::path::{Path, PathBuf};

use barstress::ingest::CsvLayout;
use barstress::regress::FitOptions;
use barstress::spectral::{RatioBands, WelchConfig};
use barstress::topo::{Palette, DEFAULT_RESOLUTION};
use barstress::{BandDefinition, GameType, GamerType, MusicType, Phase, SessionProtocol};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Ppm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum ModelChoice {
    #[serde(rename = "4pl")]
    #[value(name = "4pl")]
    FourPl,
    #[serde(rename = "quartic")]
    Quartic,
    #[serde(rename = "both")]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordingFormat {
    Csv,
    Edf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub phase: Phase,
    pub game_type: GameType,
    pub gamer_type: GamerType,
    pub music_type: MusicType,
    /// Seconds from phase start; the phase default when absent.
    pub epoch_times: Option<Vec<f64>>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            phase: Phase::Baseline,
            game_type: GameType::None,
            gamer_type: GamerType::Gamer,
            music_type: MusicType::None,
            epoch_times: None,
        }
    }
}

impl ProtocolConfig {
    pub fn build(&self) -> Result<SessionProtocol, CliError> {
        let times = self.epoch_times.clone().unwrap_or_else(|| self.phase.default_epoch_times());
        Ok(SessionProtocol::with_times(self.phase, self.game_type, self.gamer_type, self.music_type, times)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// Known resting ratio.
    pub value: Option<f64>,
    /// Resting recording to measure the ratio from.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsdConfig {
    /// Start of the analysis window, seconds.
    pub at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub points: Option<PathBuf>,
    pub model: ModelChoice,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub multistart_count: usize,
    pub b_bounds: (f64, f64),
    pub c_min: f64,
    pub c_max_factor: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        let o = FitOptions::default();
        Self {
            points: None,
            model: ModelChoice::Both,
            max_iterations: o.max_iterations,
            tolerance: o.tolerance,
            multistart_count: o.multistart_count,
            b_bounds: o.b_bounds,
            c_min: o.c_min,
            c_max_factor: o.c_max_factor,
        }
    }
}

impl FitConfig {
    pub fn options(&self) -> FitOptions {
        FitOptions {
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            multistart_count: self.multistart_count,
            b_bounds: self.b_bounds,
            c_min: self.c_min,
            c_max_factor: self.c_max_factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopoConfig {
    /// `bar`, or `band:<name>` for one band's power.
    pub scalar: String,
    pub resolution: usize,
    pub palette: Palette,
}

impl Default for TopoConfig {
    fn default() -> Self {
        Self {
            scalar: "bar".into(),
            resolution: DEFAULT_RESOLUTION,
            palette: Palette::BlueRed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub spec: Option<PathBuf>,
    /// File stem of the generated recording.
    pub name: String,
    pub outputs: Vec<RecordingFormat>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            spec: None,
            name: "synth".into(),
            outputs: vec![RecordingFormat::Csv, RecordingFormat::Edf],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub input: Option<PathBuf>,
    /// Required for CSV input; EDF carries its own.
    pub sampling_rate: Option<f64>,
    pub csv: CsvLayout,
    /// Bundled montage name, `<name>.json` in `BARSTRESS_MONTAGE_DIR`, or a path.
    pub montage: String,
    /// Channels averaged into band powers; every EEG channel when absent.
    pub channels: Option<Vec<String>>,
    pub welch: WelchConfig,
    pub bands: RatioBands,
    pub protocol: ProtocolConfig,
    pub baseline: BaselineConfig,
    pub psd: PsdConfig,
    pub fit: FitConfig,
    pub topo: TopoConfig,
    pub synth: SynthConfig,
    pub out: PathBuf,
    /// Output kinds; empty means every kind the command produces.
    pub format: Vec<Format>,
    pub seed: Option<u64>,
    pub quiet: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            input: None,
            sampling_rate: None,
            csv: CsvLayout::default(),
            montage: barstress::montage::STANDARD_1020_30.into(),
            channels: None,
            welch: WelchConfig::default(),
            bands: RatioBands::default(),
            protocol: ProtocolConfig::default(),
            baseline: BaselineConfig::default(),
            psd: PsdConfig::default(),
            fit: FitConfig::default(),
            topo: TopoConfig::default(),
            synth: SynthConfig::default(),
            out: PathBuf::from("."),
            format: Vec::new(),
            seed: None,
            quiet: false,
        }
    }
}

impl RunConfig {
    /// Defaults, overlaid with the config file, then each `key.path=value`
    /// override in order.
    pub fn load(file: Option<&Path>, overrides: &[(String, Value)]) -> Result<Self, CliError> {
        let mut doc = serde_json::to_value(RunConfig::default()).expect("config serializes");
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let user: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            if !user.is_object() {
                return Err(CliError::Validation(format!("{}: config must be a JSON object", path.display())));
            }
            merge(&mut doc, user);
        }
        for (key, value) in overrides {
            set_path(&mut doc, key, value.clone())?;
        }
        let cfg: RunConfig =
            serde_json::from_value(doc).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        for band in [&self.bands.numerator, &self.bands.denominator] {
            BandDefinition::new(band.name, band.f_low, band.f_high)?;
        }
        self.welch.validate()?;
        self.fit.options().validate()?;
        if let Some(fs) = self.sampling_rate {
            if !(fs > 0.0 && fs.is_finite()) {
                return Err(CliError::Validation(format!("sampling_rate must be positive, got {fs}")));
            }
        }
        if self.topo.resolution == 0 {
            return Err(CliError::Validation("topo.resolution must be at least 1".into()));
        }
        Ok(())
    }

    /// Requested formats, or `defaults` when none were given.
    pub fn wants(&self, format: Format, defaults: &[Format]) -> bool {
        if self.format.is_empty() {
            defaults.contains(&format)
        } else {
            self.format.contains(&format)
        }
    }
}

/// Parse `key.path=value`; the value is JSON when it parses as JSON and a
/// plain string otherwise.
pub fn parse_override(raw: &str) -> Result<(String, Value), CliError> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| CliError::Validation(format!("override {raw:?} is not key=value")))?;
    let value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    Ok((key.trim().to_string(), value))
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn set_path(doc: &mut Value, key: &str, value: Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Validation(format!("invalid key path {key:?}")));
    }
    let mut node = doc;
    for part in &parts[..parts.len() - 1] {
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        node = node
            .as_object_mut()
            .expect("object")
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    if !node.is_object() {
        *node = Value::Object(Default::default());
    }
    node.as_object_mut().expect("object").insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
