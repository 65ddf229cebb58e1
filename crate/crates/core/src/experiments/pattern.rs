use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    None,
    MaxOne,
}

/// Intensity at each screen point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub screen_points: Vec<f64>,
    pub intensities: Vec<f64>,
    pub normalization: Normalization,
}

impl Pattern {
    pub fn new(screen_points: Vec<f64>, intensities: Vec<f64>) -> Result<Self> {
        if screen_points.len() != intensities.len() {
            return Err(Error::PatternFormat(format!(
                "{} screen points but {} intensities",
                screen_points.len(),
                intensities.len()
            )));
        }
        Ok(Self {
            screen_points,
            intensities,
            normalization: Normalization::None,
        })
    }

    pub fn len(&self) -> usize {
        self.screen_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.screen_points.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.intensities.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.intensities.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Divides by the maximum. A pattern whose maximum is not positive is
    /// returned unchanged apart from the tag.
    pub fn normalized(&self) -> Pattern {
        let max = self.max();
        let scale = if max > 0.0 { 1.0 / max } else { 1.0 };
        Pattern {
            screen_points: self.screen_points.clone(),
            intensities: self.intensities.iter().map(|i| i * scale).collect(),
            normalization: Normalization::MaxOne,
        }
    }

    /// Number of interior local maxima strictly above both neighbours.
    pub fn fringe_count(&self) -> usize {
        self.intensities
            .windows(3)
            .filter(|w| w[1] > w[0] && w[1] > w[2])
            .count()
    }

    /// `x,intensity` CSV, every value with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::PatternFormat(e.to_string());
        w.write_record(["x", "intensity"]).map_err(io)?;
        for (x, i) in self.screen_points.iter().zip(&self.intensities) {
            w.write_record([format!("{x:.16e}"), format!("{i:.16e}")])
                .map_err(io)?;
        }
        w.flush().map_err(|e| Error::PatternFormat(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::PatternFormat(e.to_string()))
    }

    /// Reads what [`Pattern::write_csv`] writes. Any missing field, extra
    /// field, unparsable number, missing header or unterminated last row is an
    /// error; the last case catches files cut short in the middle of a number.
    pub fn read_csv<R: Read>(mut input: R) -> Result<Pattern> {
        let mut text = String::new();
        input
            .read_to_string(&mut text)
            .map_err(|e| Error::PatternFormat(e.to_string()))?;
        if !text.ends_with('\n') {
            return Err(Error::PatternFormat("last row is not terminated by a newline".into()));
        }
        let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
        let err = |e: csv::Error| Error::PatternFormat(e.to_string());
        let headers = r.headers().map_err(err)?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "intensity" {
            return Err(Error::PatternFormat(format!(
                "expected header `x,intensity`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (row, record) in r.records().enumerate() {
            let record = record.map_err(err)?;
            if record.len() != 2 {
                return Err(Error::PatternFormat(format!(
                    "row {} has {} fields",
                    row + 1,
                    record.len()
                )));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::PatternFormat(format!("row {}: `{s}`: {e}", row + 1)))
            };
            xs.push(parse(&record[0])?);
            values.push(parse(&record[1])?);
        }
        if xs.is_empty() {
            return Err(Error::PatternFormat("no data rows".into()));
        }
        Pattern::new(xs, values)
    }
}
