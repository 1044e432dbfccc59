use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::randomized::POWER_LOOP_CONVENTION;

use super::ReportRow;

/// Exact CSV header line.
pub const CSV_HEADER: [&str; 9] = ["method", "size", "r", "p", "q", "re1", "re2", "time_s", "seed"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown format {s:?} (expected csv|json)")),
        }
    }
}

/// Report metadata written alongside JSON rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub library_version: String,
    pub experiment: String,
    pub power_loop_convention: String,
    pub seeds: Vec<u64>,
    /// The experiment configuration, serialized.
    pub config: serde_json::Value,
}

impl Metadata {
    pub fn new(experiment: &str, seeds: Vec<u64>, config: serde_json::Value) -> Self {
        Self {
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: experiment.to_string(),
            power_loop_convention: POWER_LOOP_CONVENTION.to_string(),
            seeds,
            config,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonReport {
    metadata: Metadata,
    rows: Vec<ReportRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    trials: Vec<ReportRow>,
}

/// Writes the header and one line per row. An empty slice yields a
/// header-only file.
pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

/// JSON object `{metadata, rows, trials?}`.
pub fn write_json<W: Write>(rows: &[ReportRow], trials: &[ReportRow], metadata: &Metadata, out: W) -> Result<()> {
    let report = JsonReport { metadata: metadata.clone(), rows: rows.to_vec(), trials: trials.to_vec() };
    serde_json::to_writer_pretty(out, &report)?;
    Ok(())
}

/// Reads back a JSON report as `(metadata, rows, trials)`.
pub fn read_json<R: Read>(input: R) -> Result<(Metadata, Vec<ReportRow>, Vec<ReportRow>)> {
    let report: JsonReport = serde_json::from_reader(input)?;
    Ok((report.metadata, report.rows, report.trials))
}

/// Writes `rows` to `path`. JSON output includes `metadata` and the
/// per-trial rows; CSV ignores both.
pub fn emit_report(
    rows: &[ReportRow],
    trials: &[ReportRow],
    format: Format,
    path: impl AsRef<Path>,
    metadata: &Metadata,
) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        Format::Csv => write_csv(rows, file),
        Format::Json => write_json(rows, trials, metadata, file),
    }
}

/// Gnuplot script plotting RE1 and RE2 against `r`, one curve per `q`, from
/// a CSV report.
pub fn gnuplot_script(csv_path: &str, q_list: &[usize]) -> String {
    let qs = q_list.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
    format!(
        "set datafile separator ','\n\
         set key top right\n\
         set xlabel 'r'\n\
         set logscale y\n\
         set multiplot layout 1,2\n\
         set title 'standard part (RE1)'\n\
         plot for [qq in \"{qs}\"] '{csv_path}' skip 1 using ($5 == qq+0 ? $3 : 1/0):6 with linespoints title 'q='.qq\n\
         set title 'infinitesimal part (RE2)'\n\
         plot for [qq in \"{qs}\"] '{csv_path}' skip 1 using ($5 == qq+0 ? $3 : 1/0):7 with linespoints title 'q='.qq\n\
         unset multiplot\n"
    )
}
