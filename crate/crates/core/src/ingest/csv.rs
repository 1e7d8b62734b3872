use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::scalar::Real;
use crate::signal::{ChannelInfo, Montage, Recording};

/// Column layout of a recording CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsvLayout {
    pub delimiter: char,
    pub has_header: bool,
    /// Zero-based index of a time column, excluded from the channels.
    pub time_column: Option<usize>,
}

impl Default for CsvLayout {
    fn default() -> Self {
        Self {
            delimiter: ',',
            has_header: true,
            time_column: None,
        }
    }
}

impl CsvLayout {
    fn delimiter_byte(&self) -> Result<u8, IngestError> {
        let c = self.delimiter;
        if c.is_ascii() && (c.is_ascii_graphic() || c == '\t' || c == ' ') && !matches!(c, '"' | '.' | '-' | '+') {
            Ok(c as u8)
        } else {
            Err(IngestError::InvalidDelimiter)
        }
    }
}

/// Parse a CSV recording whose samples are microvolts.
///
/// With a header, the labels select montage electrodes; the resulting
/// channels follow montage order. Without a header, the file must carry one
/// column per montage electrode.
pub fn read_csv<T: Real>(
    bytes: &[u8],
    layout: &CsvLayout,
    sampling_rate: f64,
    montage: &Montage,
) -> Result<Recording<T>, IngestError> {
    let delimiter = layout.delimiter_byte()?;
    let text = std::str::from_utf8(bytes).map_err(|_| IngestError::InvalidUtf8)?;
    let mut reader = ::csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut rows = reader.records().enumerate().filter_map(|(i, r)| match r {
        Ok(rec) if rec.len() == 1 && rec[0].is_empty() => None,
        other => Some((i + 1, other)),
    });

    // file column index -> montage index
    let mut columns: Vec<usize> = Vec::new();
    let mut expected_fields = montage.len() + usize::from(layout.time_column.is_some());
    if layout.has_header {
        match rows.next() {
            Some((_, rec)) => {
                let rec = rec.map_err(|_| IngestError::InvalidUtf8)?;
                expected_fields = rec.len();
                if let Some(tc) = layout.time_column {
                    if tc >= rec.len() {
                        return Err(IngestError::InvalidTimeColumn(tc));
                    }
                }
                for (col, label) in rec.iter().enumerate() {
                    if Some(col) == layout.time_column {
                        continue;
                    }
                    let idx = montage
                        .electrodes
                        .iter()
                        .position(|e| e.label == label)
                        .ok_or_else(|| IngestError::UnknownChannelLabel(label.to_string()))?;
                    if columns.contains(&idx) {
                        return Err(IngestError::Signal(crate::signal::SignalError::DuplicateLabel(
                            label.to_string(),
                        )));
                    }
                    columns.push(idx);
                }
            }
            None => {
                return Err(IngestError::MalformedRow {
                    line: 1,
                    expected: montage.len(),
                    found: 0,
                })
            }
        }
    } else {
        if let Some(tc) = layout.time_column {
            if tc >= expected_fields {
                return Err(IngestError::InvalidTimeColumn(tc));
            }
        }
        columns = (0..montage.len()).collect();
    }

    let mut series: Vec<Vec<T>> = vec![Vec::new(); columns.len()];
    let mut last_time: Option<f64> = None;
    for (line, rec) in rows {
        let rec = rec.map_err(|_| IngestError::InvalidUtf8)?;
        if rec.len() != expected_fields {
            return Err(IngestError::MalformedRow {
                line,
                expected: expected_fields,
                found: rec.len(),
            });
        }
        let mut ch = 0;
        for (col, field) in rec.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| IngestError::NonNumericSample {
                line,
                column: col,
                text: field.to_string(),
            })?;
            if Some(col) == layout.time_column {
                if let Some(prev) = last_time {
                    if !(value > prev) {
                        return Err(IngestError::NonMonotonicTime { line });
                    }
                }
                last_time = Some(value);
                continue;
            }
            series[ch].push(T::of(value));
            ch += 1;
        }
    }

    // reorder into montage order
    let mut order: Vec<usize> = (0..columns.len()).collect();
    order.sort_by_key(|&i| columns[i]);
    let channels: Vec<ChannelInfo> = order.iter().map(|&i| montage.electrodes[columns[i]].clone()).collect();
    let mut series: Vec<Option<Vec<T>>> = series.into_iter().map(Some).collect();
    let samples = order.iter().map(|&i| series[i].take().unwrap_or_default()).collect();
    Ok(Recording::new(channels, samples, sampling_rate)?)
}

/// Serialize a recording as CSV. Values use the shortest representation
/// that parses back to the identical float.
pub fn write_csv<T: Real>(recording: &Recording<T>, layout: &CsvLayout) -> Vec<u8> {
    let delim = layout.delimiter.to_string();
    let n_fields = recording.channels().len() + usize::from(layout.time_column.is_some());
    let time_col = layout.time_column.map(|t| t.min(n_fields.saturating_sub(1)));
    let mut out = String::new();

    let mut push_row = |fields: Vec<String>| {
        out.push_str(&fields.join(&delim));
        out.push('\n');
    };

    let assemble = |time: String, values: Vec<String>| -> Vec<String> {
        let mut fields = values;
        if let Some(tc) = time_col {
            fields.insert(tc, time);
        }
        fields
    };

    if layout.has_header {
        let labels = recording.channels().iter().map(|c| c.label.clone()).collect();
        push_row(assemble("time".to_string(), labels));
    }
    let fs = recording.sampling_rate();
    for i in 0..recording.sample_count() {
        let values = recording.samples().iter().map(|s| s[i].to_string()).collect();
        push_row(assemble((i as f64 / fs).to_string(), values));
    }
    out.into_bytes()
}
