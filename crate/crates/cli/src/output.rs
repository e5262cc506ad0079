//! Writing results: `results.json`, one CSV per scan and an SVG line chart
//! per scan. Every file is written to a temporary sibling and renamed into
//! place.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;
use crate::record::{ResultRecord, Scan};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn write_results(dir: &Path, record: &ResultRecord) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("results.json");
    write_atomic(&path, record.to_json().as_bytes())?;
    Ok(path)
}

fn scan_csv(scan: &Scan) -> Result<Vec<u8>, CliError> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    wtr.write_record(&scan.columns).map_err(io)?;
    for row in &scan.rows {
        wtr.write_record(row.iter().map(|v| v.to_string()))
            .map_err(io)?;
    }
    wtr.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// A line chart of every column against the first.
pub fn scan_svg(scan: &Scan) -> String {
    let (w, h, pad) = (640.0, 400.0, 48.0);
    let xs: Vec<f64> = scan.rows.iter().map(|r| r[0]).collect();
    let ys = scan.rows.iter().flat_map(|r| r[1..].iter().copied());
    let (x0, x1) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let px = |x: f64| pad + (x - x0) / span(x0, x1) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y - y0) / span(y0, y1) * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(
        s,
        r#"<text x="{pad}" y="{}" >{:.4}</text>"#,
        h - pad + 16.0,
        x0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{:.4}</text>"#,
        w - pad,
        h - pad + 16.0,
        x1
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{:.4}</text>"#,
        pad - 4.0,
        h - pad,
        y0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{:.4}</text>"#,
        pad - 4.0,
        pad + 4.0,
        y1
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 12.0,
        scan.columns[0]
    );
    for (c, name) in scan.columns.iter().enumerate().skip(1) {
        let color = PALETTE[(c - 1) % PALETTE.len()];
        let points: Vec<String> = scan
            .rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", px(r[0]), py(r[c])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
            pad + 8.0,
            pad + 16.0 * c as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<name>.csv` and `<name>.svg` for each scan. Empty scans are
/// skipped with a warning on standard error.
pub fn emit_plot_data(dir: &Path, scans: &[Scan]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for scan in scans {
        if scan.rows.is_empty() || scan.columns.is_empty() {
            eprintln!("warning: scan {} is empty; no files written", scan.name);
            continue;
        }
        if let Some(row) = scan.rows.iter().find(|r| r.len() != scan.columns.len()) {
            return Err(CliError::Numerical(format!(
                "scan {} has a row of {} values for {} columns",
                scan.name,
                row.len(),
                scan.columns.len()
            )));
        }
        let csv_path = dir.join(format!("{}.csv", scan.name));
        write_atomic(&csv_path, &scan_csv(scan)?)?;
        written.push(csv_path);
        if scan.columns.len() >= 2 {
            let svg_path = dir.join(format!("{}.svg", scan.name));
            write_atomic(&svg_path, scan_svg(scan).as_bytes())?;
            written.push(svg_path);
        }
    }
    Ok(written)
}
