use std::io::{self, Write};
use std::path::Path;

use crate::config::Format;
use crate::runner::{Outcome, Row};

pub const CSV_HEADER: [&str; 10] = [
    "statement",
    "t",
    "lhs",
    "rhs",
    "gap",
    "relative_gap",
    "equality",
    "H_plus",
    "H_minus",
    "H",
];

// `{}` on f64 is the shortest string that parses back to the same value.
fn real(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn record(row: &Row) -> [String; 10] {
    [
        row.statement.clone(),
        real(row.t),
        real(row.lhs),
        real(row.rhs),
        real(row.gap),
        real(row.relative_gap),
        row.equality.map(|b| b.to_string()).unwrap_or_default(),
        real(row.h_plus),
        real(row.h_minus),
        real(row.h),
    ]
}

pub fn to_csv(outcome: &Outcome) -> io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in &outcome.rows {
        w.write_record(record(row))?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

pub fn to_plotdata(outcome: &Outcome) -> Vec<u8> {
    let mut s = String::new();
    for (i, series) in outcome.series.iter().enumerate() {
        if i > 0 {
            s.push_str("\n\n");
        }
        s.push_str(&format!("# series: {}\n# x y\n", series.name));
        for (x, y) in &series.points {
            s.push_str(&format!("{x} {y}\n"));
        }
    }
    s.into_bytes()
}

pub fn render(outcome: &Outcome, format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Report => Ok(outcome.report.clone().into_bytes()),
        Format::Csv => to_csv(outcome),
        Format::PlotData => Ok(to_plotdata(outcome)),
    }
}

/// Writes the whole file to a sibling temporary and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Renders `outcome` and writes it to `path`, or to standard output.
pub fn emit(outcome: &Outcome, format: Format, path: Option<&Path>) -> io::Result<()> {
    let bytes = render(outcome, format)?;
    match path {
        Some(p) => write_atomic(p, &bytes)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", p.display()))),
        None => io::stdout().lock().write_all(&bytes),
    }
}
