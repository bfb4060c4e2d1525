//! Count data ingestion: frequency tables, raw samples and descriptive statistics.
//!
//! Frequency-table CSV:
//!
//! ```text
//! count,2012,2013
//! 0,6,5
//! 19,2,0
//! ```
//!
//! Each body row gives a count value and, per group, the number of units that
//! recorded it. Count values must be strictly increasing. A raw-sample CSV has
//! the single header `count` and one observation per row. Lines starting with
//! `#` are ignored in both.

use std::collections::HashSet;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::CountSample;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencyRow {
    pub count: u64,
    pub frequencies: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencyTable {
    group_labels: Vec<String>,
    rows: Vec<FrequencyRow>,
}

/// Either input layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dataset {
    Table(FrequencyTable),
    Raw(CountSample),
}

impl FrequencyTable {
    pub fn new(group_labels: Vec<String>, rows: Vec<FrequencyRow>) -> Result<Self> {
        let mut seen = HashSet::new();
        for label in &group_labels {
            if label.is_empty() || !seen.insert(label.as_str()) {
                return Err(Error::ParamDomain(format!("group label {label:?} is empty or repeated")));
            }
        }
        if group_labels.is_empty() {
            return Err(Error::ParamDomain("a frequency table needs at least one group".into()));
        }
        for pair in rows.windows(2) {
            if pair[1].count <= pair[0].count {
                return Err(Error::ParamDomain(format!(
                    "count values must increase: {} follows {}",
                    pair[1].count, pair[0].count
                )));
            }
        }
        if let Some(row) = rows.iter().find(|r| r.frequencies.len() != group_labels.len()) {
            return Err(Error::ParamDomain(format!(
                "row for count {} has {} frequencies, expected {}",
                row.count,
                row.frequencies.len(),
                group_labels.len()
            )));
        }
        Ok(Self { group_labels, rows })
    }

    /// One group per sample, rows over the union of observed values.
    pub fn from_samples(labels: Vec<String>, samples: &[CountSample]) -> Result<Self> {
        let mut values: Vec<u64> = samples.iter().flat_map(|s| s.values().iter().copied()).collect();
        values.sort_unstable();
        values.dedup();
        let tallies: Vec<_> = samples.iter().map(CountSample::tally).collect();
        let rows = values
            .into_iter()
            .map(|count| FrequencyRow {
                count,
                frequencies: tallies
                    .iter()
                    .map(|t| {
                        t.entries()
                            .binary_search_by_key(&count, |&(v, _)| v)
                            .map(|i| t.entries()[i].1)
                            .unwrap_or(0)
                    })
                    .collect(),
            })
            .collect();
        Self::new(labels, rows)
    }

    pub fn group_labels(&self) -> &[String] {
        &self.group_labels
    }

    pub fn rows(&self) -> &[FrequencyRow] {
        &self.rows
    }

    /// Number of units per group.
    pub fn totals(&self) -> Vec<u64> {
        (0..self.group_labels.len())
            .map(|g| self.rows.iter().map(|r| r.frequencies[g]).sum())
            .collect()
    }

    fn group_index(&self, group: &str) -> Result<usize> {
        self.group_labels
            .iter()
            .position(|g| g == group)
            .ok_or_else(|| Error::UnknownGroup(group.to_string()))
    }

    fn expand_index(&self, g: usize) -> Vec<u64> {
        self.rows
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.count, r.frequencies[g] as usize))
            .collect()
    }

    /// The group's units as an ascending sample.
    pub fn expand(&self, group: &str) -> Result<CountSample> {
        let g = self.group_index(group)?;
        CountSample::new(self.expand_index(g))
    }

    /// All groups' units pooled, group by group.
    pub fn aggregate(&self) -> Result<CountSample> {
        let values = (0..self.group_labels.len())
            .flat_map(|g| self.expand_index(g))
            .collect();
        CountSample::new(values)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("count");
        for label in &self.group_labels {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.count.to_string());
            for f in &row.frequencies {
                out.push(',');
                out.push_str(&f.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn parse_cell(cell: &str, line: u64, column: usize, what: &str) -> Result<u64> {
    let err = |message: String| Error::Parse { line, column, message };
    if cell.is_empty() {
        return Err(err(format!("empty {what}")));
    }
    match cell.parse::<u64>() {
        Ok(v) => Ok(v),
        Err(_) if cell.starts_with('-') && cell[1..].parse::<u64>().is_ok() => {
            Err(err(format!("negative {what} {cell}")))
        }
        Err(_) => Err(err(format!("{what} {cell:?} is not a nonnegative integer"))),
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input)
}

/// Parse either layout, deciding by the header: a lone `count` column is a raw sample.
pub fn parse_input<R: Read>(input: R) -> Result<Dataset> {
    let mut records = reader(input).into_records();
    let header = match records.next() {
        Some(h) => h?,
        None => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "missing header row".into(),
            })
        }
    };
    let line = header.position().map_or(1, |p| p.line());
    if header.get(0) != Some("count") {
        return Err(Error::Parse {
            line,
            column: 1,
            message: format!("header must start with `count`, found {:?}", header.get(0).unwrap_or("")),
        });
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if labels.is_empty() {
        let mut values = Vec::new();
        for record in records {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != 1 {
                return Err(Error::Parse {
                    line,
                    column: 2,
                    message: format!("expected 1 column, found {}", record.len()),
                });
            }
            values.push(parse_cell(&record[0], line, 1, "count")?);
        }
        return CountSample::new(values).map(Dataset::Raw);
    }

    for (i, label) in labels.iter().enumerate() {
        if label.is_empty() || labels[..i].contains(label) {
            return Err(Error::Parse {
                line,
                column: i + 2,
                message: format!("group label {label:?} is empty or repeated"),
            });
        }
    }
    let width = labels.len() + 1;
    let mut rows: Vec<FrequencyRow> = Vec::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::Parse {
                line,
                column: record.len().min(width) + 1,
                message: format!("expected {width} columns, found {}", record.len()),
            });
        }
        let count = parse_cell(&record[0], line, 1, "count value")?;
        if let Some(prev) = rows.last() {
            if count <= prev.count {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    message: format!("count values must increase: {count} follows {}", prev.count),
                });
            }
        }
        let frequencies = record
            .iter()
            .enumerate()
            .skip(1)
            .map(|(c, cell)| parse_cell(cell, line, c + 1, "frequency"))
            .collect::<Result<Vec<_>>>()?;
        rows.push(FrequencyRow { count, frequencies });
    }
    FrequencyTable::new(labels, rows).map(Dataset::Table)
}

pub fn parse_frequency_csv<R: Read>(input: R) -> Result<FrequencyTable> {
    match parse_input(input)? {
        Dataset::Table(t) => Ok(t),
        Dataset::Raw(_) => Err(Error::Parse {
            line: 1,
            column: 2,
            message: "expected at least one group column after `count`".into(),
        }),
    }
}

pub fn parse_raw_csv<R: Read>(input: R) -> Result<CountSample> {
    match parse_input(input)? {
        Dataset::Raw(s) => Ok(s),
        Dataset::Table(_) => Err(Error::Parse {
            line: 1,
            column: 2,
            message: "raw-sample input must have the single column `count`".into(),
        }),
    }
}

/// Moment summary. Skewness g₁ = m₃/m₂^{3/2} and excess kurtosis
/// g₂ = m₄/m₂² − 3 use central moments with divisor n; `std_dev` uses n − 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    /// `None` when every observation is equal.
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub min: u64,
    pub max: u64,
}

pub fn describe(sample: &CountSample) -> Result<DescriptiveStats> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::InsufficientData { required: 2, actual: n });
    }
    let nf = n as f64;
    let mean = sample.mean();
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in sample.values() {
        let dev = v as f64 - mean;
        let sq = dev * dev;
        m2 += sq;
        m3 += sq * dev;
        m4 += sq * sq;
    }
    let std_dev = (m2 / (nf - 1.0)).sqrt();
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0))
    } else {
        (None, None)
    };
    Ok(DescriptiveStats {
        n,
        mean,
        std_dev,
        skewness,
        excess_kurtosis,
        min: sample.min(),
        max: sample.max(),
    })
}
