//! CSV emission. Floats are written with 17 significant digits so that every
//! value reads back to the identical `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use nonlocal_lwr::analysis::DiagnosticRecord;
use nonlocal_lwr::DensityField;

pub const SNAPSHOT_COLUMNS: &str = "cell_index,x_center,rho";
pub const DIAGNOSTIC_COLUMNS: &str = "t,mass,min,max,tv_delta,conv_l1,conv_deriv_l1,rh_residual";

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn optional(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// `# t=<time>` header, column row, then one row per cell.
pub fn snapshot_csv(field: &DensityField) -> String {
    snapshot_csv_values(field, field.values())
}

/// Snapshot layout for arbitrary cell values on the grid and time of `field`.
pub fn snapshot_csv_values(field: &DensityField, values: &[f64]) -> String {
    let grid = field.grid();
    let mut out = format!("# t={}\n{SNAPSHOT_COLUMNS}\n", float(field.time()));
    for (j, rho) in values.iter().enumerate() {
        let _ = writeln!(out, "{j},{},{}", float(grid.center(j)), float(*rho));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub x_centers: Vec<f64>,
    pub rho: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
#[error("malformed snapshot at line {line}: {message}")]
pub struct SnapshotError {
    pub line: usize,
    pub message: String,
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot, SnapshotError> {
    let err = |line: usize, message: &str| SnapshotError { line, message: message.into() };
    let mut lines = text.lines().enumerate();
    let t = lines
        .next()
        .and_then(|(_, l)| l.strip_prefix("# t="))
        .and_then(|v| v.parse::<f64>().ok())
        .ok_or_else(|| err(1, "expected `# t=<time>`"))?;
    if lines.next().map(|(_, l)| l) != Some(SNAPSHOT_COLUMNS) {
        return Err(err(2, "expected the column header"));
    }
    let mut snapshot = Snapshot { t, x_centers: Vec::new(), rho: Vec::new() };
    for (k, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let [index, x, rho] = fields[..] else {
            return Err(err(k + 1, "expected three columns"));
        };
        if index.parse::<usize>().ok() != Some(snapshot.rho.len()) {
            return Err(err(k + 1, "cell indices must be consecutive from 0"));
        }
        let x = x.parse::<f64>().map_err(|_| err(k + 1, "bad x_center"))?;
        let rho = rho.parse::<f64>().map_err(|_| err(k + 1, "bad rho"))?;
        snapshot.x_centers.push(x);
        snapshot.rho.push(rho);
    }
    Ok(snapshot)
}

pub fn diagnostics_csv(records: &[DiagnosticRecord]) -> String {
    let mut out = format!("{DIAGNOSTIC_COLUMNS}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            float(r.t),
            float(r.mass),
            float(r.min),
            float(r.max),
            float(r.tv_delta),
            optional(r.conv_l1),
            optional(r.conv_deriv_l1),
            float(r.rh_residual),
        );
    }
    out
}

/// Writes one numbered file per snapshot, `<prefix>_0000.csv` onwards.
pub fn write_snapshots<'a>(
    dir: &Path,
    prefix: &str,
    fields: impl IntoIterator<Item = &'a DensityField>,
) -> io::Result<usize> {
    let mut count = 0;
    for (k, field) in fields.into_iter().enumerate() {
        fs::write(dir.join(format!("{prefix}_{k:04}.csv")), snapshot_csv(field))?;
        count += 1;
    }
    Ok(count)
}
