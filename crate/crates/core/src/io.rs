//! Stream readers and writers.
//!
//! Input streams are either CSV (one value per line, optional header line) or
//! JSONL (`{"t": 0, "x": 1.5}` per line). The format is sniffed from the first
//! non-blank line, so stdin works without a format flag.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::indicator::DriftEvent;
use crate::stream::{GroundTruth, Observation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Jsonl,
}

/// Streaming observation reader; yields one observation per data line.
pub struct ObservationReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    format: Option<InputFormat>,
    next_t: u64,
}

impl<R: BufRead> ObservationReader<R> {
    pub fn new(reader: R) -> Self {
        Self {
            lines: reader.lines(),
            line_no: 0,
            format: None,
            next_t: 0,
        }
    }

    /// Format detected so far, `None` before the first data line.
    pub fn format(&self) -> Option<InputFormat> {
        self.format
    }

    fn parse_line(&mut self, line: &str) -> Option<Result<Observation>> {
        let format = match self.format {
            Some(f) => f,
            None => {
                let f = if line.starts_with('{') {
                    InputFormat::Jsonl
                } else {
                    InputFormat::Csv
                };
                self.format = Some(f);
                if f == InputFormat::Csv && line.parse::<f64>().is_err() {
                    // header
                    return None;
                }
                f
            }
        };
        let parsed = match format {
            InputFormat::Csv => line.parse::<f64>().map_err(|e| Error::Parse {
                line: self.line_no,
                message: format!("`{line}` is not a number: {e}"),
            }),
            InputFormat::Jsonl => serde_json::from_str::<Observation>(line)
                .map_err(|e| Error::Parse {
                    line: self.line_no,
                    message: e.to_string(),
                })
                .and_then(|o| {
                    if o.timestamp != self.next_t {
                        Err(Error::Parse {
                            line: self.line_no,
                            message: format!(
                                "expected timestamp {}, found {}",
                                self.next_t, o.timestamp
                            ),
                        })
                    } else {
                        Ok(o.value)
                    }
                }),
        };
        Some(parsed.and_then(|value| {
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: self.line_no,
                    message: format!("non-finite value {value}"),
                });
            }
            let obs = Observation::new(self.next_t, value);
            self.next_t += 1;
            Ok(obs)
        }))
    }
}

impl<R: BufRead> Iterator for ObservationReader<R> {
    type Item = Result<Observation>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(item) = self.parse_line(trimmed) {
                return Some(item);
            }
        }
    }
}

/// Reads a whole stream into memory.
pub fn read_observations<R: BufRead>(reader: R) -> Result<Vec<Observation>> {
    ObservationReader::new(reader).collect()
}

/// Writes values as single-column CSV with an `x` header.
pub fn write_csv<W: Write>(mut out: W, stream: &[Observation]) -> Result<()> {
    writeln!(out, "x")?;
    for o in stream {
        writeln!(out, "{}", o.value)?;
    }
    Ok(())
}

pub fn write_jsonl<W: Write>(mut out: W, stream: &[Observation]) -> Result<()> {
    for o in stream {
        serde_json::to_writer(&mut out, o)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_events<W: Write>(mut out: W, events: &[DriftEvent]) -> Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_events<R: BufRead>(reader: R) -> Result<Vec<DriftEvent>> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(events)
}

pub fn write_truth<W: Write>(mut out: W, truth: &GroundTruth) -> Result<()> {
    serde_json::to_writer(&mut out, truth)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_truth<R: std::io::Read>(reader: R) -> Result<GroundTruth> {
    Ok(serde_json::from_reader(reader)?)
}
