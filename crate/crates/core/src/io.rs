//! File formats shared by the command-line front end: atomic writes,
//! grid dumps of `Ω`, gnuplot columns and the configuration digest.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::toda::{TodaError, TodaState, TorusGrid};

/// Writes `contents` to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

/// `ix,iy,h1,…,hl`, one row per cell in row-major order. Floats use the
/// shortest representation that parses back to the same bits.
pub fn omega_csv(state: &TodaState) -> String {
    let mut out = String::from("ix,iy");
    for k in 1..=state.dim {
        let _ = write!(out, ",h{k}");
    }
    out.push('\n');
    for cell in 0..state.grid.cells() {
        let (ix, iy) = state.grid.coords(cell);
        let _ = write!(out, "{ix},{iy}");
        for k in 0..state.dim {
            let _ = write!(out, ",{}", state.omega[cell * state.dim + k]);
        }
        out.push('\n');
    }
    out
}

/// Parses an [`omega_csv`] dump onto the given grid.
pub fn read_omega_csv(text: &str, grid: TorusGrid) -> Result<TodaState, TodaError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.len() < 3 || &headers[0] != "ix" || &headers[1] != "iy" {
        return Err(TodaError::Input("expected header ix,iy,h1,...".into()));
    }
    let dim = headers.len() - 2;
    let mut omega = vec![f64::NAN; grid.cells() * dim];
    let mut seen = vec![false; grid.cells()];
    for rec in reader.records() {
        let rec = rec?;
        let parse_idx = |s: &str| s.parse::<usize>().map_err(|_| TodaError::Input(format!("bad index {s:?}")));
        let (ix, iy) = (parse_idx(&rec[0])?, parse_idx(&rec[1])?);
        if ix >= grid.nx || iy >= grid.ny {
            return Err(TodaError::Input(format!("cell ({ix},{iy}) outside the grid")));
        }
        let cell = grid.index(ix, iy);
        if std::mem::replace(&mut seen[cell], true) {
            return Err(TodaError::Input(format!("cell ({ix},{iy}) listed twice")));
        }
        for k in 0..dim {
            let v: f64 = rec[k + 2].parse().map_err(|_| TodaError::Input(format!("bad value {:?}", &rec[k + 2])))?;
            omega[cell * dim + k] = v;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(TodaError::Input("grid dump is missing cells".into()));
    }
    Ok(TodaState { grid, dim, omega })
}

/// Gnuplot columns `x h1 … hl` along the row `iy`.
pub fn cross_section_dat(state: &TodaState, iy: usize) -> String {
    let mut out = String::from("# x");
    for k in 1..=state.dim {
        let _ = write!(out, " h{k}");
    }
    out.push('\n');
    for ix in 0..state.grid.nx {
        let cell = state.grid.index(ix, iy);
        let _ = write!(out, "{}", state.grid.point(cell).0);
        for k in 0..state.dim {
            let _ = write!(out, " {}", state.omega[cell * state.dim + k]);
        }
        out.push('\n');
    }
    out
}

pub fn energy_trace_dat(trace: &[f64]) -> String {
    let mut out = String::from("# iteration energy\n");
    for (i, e) in trace.iter().enumerate() {
        let _ = writeln!(out, "{i} {e}");
    }
    out
}
