//! Reading and writing recordings (CSV, EDF subset) and montage assets.

mod csv;
mod edf;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::montage;
use crate::signal::{Montage, SignalError};

pub use self::csv::{read_csv, write_csv, CsvLayout};
pub use self::edf::{read_edf, read_edf_header, write_edf, EdfHeader, EdfSignalHeader};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("line {line}: expected {expected} fields, found {found}")]
    MalformedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: cannot parse {text:?} as a number")]
    NonNumericSample {
        line: usize,
        column: usize,
        text: String,
    },
    #[error("channel label {0:?} is not part of the montage")]
    UnknownChannelLabel(String),
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error("delimiter must be a single printable ASCII byte")]
    InvalidDelimiter,
    #[error("time column {0} is out of range")]
    InvalidTimeColumn(usize),
    #[error("line {line}: time column is not strictly increasing")]
    NonMonotonicTime { line: usize },
    #[error("not an EDF file: version field is {0:?}")]
    BadMagic(String),
    #[error("header truncated: need {needed} bytes, have {available}")]
    TruncatedHeader { needed: usize, available: usize },
    #[error("data truncated: need {needed} bytes, have {available}")]
    TruncatedData { needed: usize, available: usize },
    #[error("header field {field} is invalid: {value:?}")]
    InvalidField { field: &'static str, value: String },
    #[error("record count is unknown (-1)")]
    UnknownRecordCount,
    #[error("signals use different sampling rates")]
    MixedSamplingRates,
    #[error("signal {0}: digital minimum must be below digital maximum")]
    DigitalRangeDegenerate(String),
    #[error("signal {0}: physical minimum equals physical maximum")]
    PhysicalRangeDegenerate(String),
    #[error("cannot encode recording as EDF: {0}")]
    Unencodable(String),
    #[error("montage file {path}: {message}")]
    Montage { path: PathBuf, message: String },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Environment variable naming a directory of `<name>.json` montage files.
pub const MONTAGE_DIR_ENV: &str = "BARSTRESS_MONTAGE_DIR";

/// Parse a montage JSON document (`{"name": .., "electrodes": [..]}`).
pub fn parse_montage(json: &str) -> Result<Montage, String> {
    let raw: Montage = serde_json::from_str(json).map_err(|e| e.to_string())?;
    Montage::new(raw.name, raw.electrodes).map_err(|e| e.to_string())
}

/// Resolve a montage by file path or by name.
///
/// Names are looked up in `override_dir` first (as `<name>.json`), then in
/// the bundled set.
pub fn load_montage(name_or_path: &str, override_dir: Option<&Path>) -> Result<Montage, IngestError> {
    let read = |path: &Path| -> Result<Montage, IngestError> {
        let err = |message: String| IngestError::Montage {
            path: path.to_path_buf(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        parse_montage(&text).map_err(err)
    };
    let as_path = Path::new(name_or_path);
    if name_or_path.ends_with(".json") || as_path.is_file() {
        return read(as_path);
    }
    if let Some(dir) = override_dir {
        let candidate = dir.join(format!("{name_or_path}.json"));
        if candidate.is_file() {
            return read(&candidate);
        }
    }
    montage::bundled(name_or_path).ok_or_else(|| IngestError::Montage {
        path: PathBuf::from(name_or_path),
        message: "no such montage".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_and_override() {
        let m = load_montage("standard_1020_30", None).unwrap();
        assert_eq!(m.len(), 30);

        let dir = std::env::temp_dir().join(format!("barstress-montage-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let custom = m.subset(&["Fz", "Cz"]).unwrap();
        std::fs::write(
            dir.join("standard_1020_30.json"),
            serde_json::to_string(&custom).unwrap(),
        )
        .unwrap();
        let overridden = load_montage("standard_1020_30", Some(&dir)).unwrap();
        assert_eq!(overridden.len(), 2);
        std::fs::remove_dir_all(&dir).unwrap();

        assert!(load_montage("nope", None).is_err());
    }

    #[test]
    fn montage_json_is_validated() {
        let bad = r#"{"name":"x","electrodes":[{"label":"A","position":[2.0,0.0],"kind":"eeg"}]}"#;
        assert!(parse_montage(bad).is_err());
        let ok = r#"{"name":"x","electrodes":[{"label":"A","position":[0.5,0.0],"kind":"eeg"}]}"#;
        assert_eq!(parse_montage(ok).unwrap().len(), 1);
    }
}
