use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::grid::{sample_preset, Preset, TorusGrid};
use super::problem::{assemble_problem, from_higgs_datum, TodaProblem};
use super::TodaError;
use crate::higgs::DiagonalHiggsDatum;
use crate::rootsys::{Root, RootSystem, RootSystemSpec};

/// A real scalar field on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Constant {
        value: f64,
    },
    Preset {
        name: Preset,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `N_y` lines of `N_x` comma-separated values, line `iy` holding row `iy`.
    Csv {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

impl FieldSpec {
    pub fn sample(&self, grid: &TorusGrid, base: &Path) -> Result<Vec<f64>, TodaError> {
        match self {
            FieldSpec::Constant { value } => Ok(vec![*value; grid.cells()]),
            FieldSpec::Preset { name, amplitude, offset } => Ok(sample_preset(grid, *name, *amplitude, *offset)),
            FieldSpec::Csv { path } => read_grid_csv(&base.join(path), grid),
        }
    }
}

fn read_grid_csv(path: &Path, grid: &TorusGrid) -> Result<Vec<f64>, TodaError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut out = Vec::with_capacity(grid.cells());
    for (iy, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != grid.nx {
            return Err(TodaError::Shape {
                what: format!("{} row {iy}", path.display()),
                expected: grid.nx,
                got: rec.len(),
            });
        }
        for field in rec.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| TodaError::Input(format!("{}: bad number {field:?}", path.display())))?;
            out.push(v);
        }
    }
    if out.len() != grid.cells() {
        return Err(TodaError::Shape { what: path.display().to_string(), expected: grid.cells(), got: out.len() });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceBasis {
    /// Components along the simple coroots.
    #[default]
    Coroot,
    /// Type `A` only: `r` diagonal entries summing to zero.
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveEntry {
    /// Simple-root coordinates.
    pub root: Vec<i64>,
    pub coefficient: FieldSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    #[serde(default)]
    pub basis: SourceBasis,
    pub components: Vec<FieldSpec>,
}

/// Problem file: either explicit root data or a diagonal Higgs datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemFile {
    Explicit {
        root_system: RootSystemSpec,
        grid: TorusGrid,
        active: Vec<ActiveEntry>,
        source: SourceSpec,
    },
    Datum {
        datum: DiagonalHiggsDatum,
        grid: TorusGrid,
        /// Coefficient used for every arrow; defaults to the constant 1.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coefficient: Option<FieldSpec>,
    },
}

impl ProblemFile {
    /// Builds the problem, resolving CSV paths against `base`.
    pub fn assemble(&self, base: &Path) -> Result<TodaProblem, TodaError> {
        match self {
            ProblemFile::Explicit { root_system, grid, active, source } => {
                grid.validate()?;
                let rs = RootSystem::build(root_system)?;
                let active = active
                    .iter()
                    .map(|a| Ok((Root(a.root.clone()), a.coefficient.sample(grid, base)?)))
                    .collect::<Result<Vec<_>, TodaError>>()?;
                let source = source_field(&rs, root_system, source, grid, base)?;
                assemble_problem(rs, active, source, *grid)
            }
            ProblemFile::Datum { datum, grid, coefficient } => {
                let c = match coefficient {
                    Some(spec) => spec.sample(grid, base)?,
                    None => vec![1.0; grid.cells()],
                };
                from_higgs_datum(datum, *grid, |_| c.clone())
            }
        }
    }
}

fn source_field(
    rs: &RootSystem,
    spec: &RootSystemSpec,
    source: &SourceSpec,
    grid: &TorusGrid,
    base: &Path,
) -> Result<Vec<f64>, TodaError> {
    let l = rs.rank();
    let comps: Vec<Vec<f64>> = source
        .components
        .iter()
        .map(|c| c.sample(grid, base))
        .collect::<Result<_, _>>()?;
    let cells = grid.cells();
    match source.basis {
        SourceBasis::Coroot => {
            if comps.len() != l {
                return Err(TodaError::Shape { what: "source components".into(), expected: l, got: comps.len() });
            }
            Ok((0..cells).flat_map(|cell| comps.iter().map(move |c| c[cell])).collect())
        }
        SourceBasis::Diagonal => {
            let is_type_a = matches!(spec, RootSystemSpec::Named { letter, .. } if letter.eq_ignore_ascii_case("A"));
            if !is_type_a {
                return Err(TodaError::OutsideCorootSpan("the diagonal basis needs a named type A system".into()));
            }
            if comps.len() != l + 1 {
                return Err(TodaError::Shape { what: "diagonal source entries".into(), expected: l + 1, got: comps.len() });
            }
            let mut out = Vec::with_capacity(cells * l);
            for cell in 0..cells {
                let trace: f64 = comps.iter().map(|c| c[cell]).sum();
                let scale: f64 = comps.iter().map(|c| c[cell].abs()).sum::<f64>().max(1.0);
                if trace.abs() > 1e-12 * scale {
                    return Err(TodaError::OutsideCorootSpan(format!("trace {trace:e} at cell {cell}")));
                }
                let mut acc = 0.0;
                for c in &comps[..l] {
                    acc += c[cell];
                    out.push(acc);
                }
            }
            Ok(out)
        }
    }
}

/// Reads and assembles a problem file; relative CSV paths are resolved
/// against the file's directory.
pub fn load_problem(path: &Path) -> Result<(ProblemFile, TodaProblem), TodaError> {
    let text = std::fs::read_to_string(path)?;
    let file: ProblemFile = serde_json::from_str(&text).map_err(|e| TodaError::Input(e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let problem = file.assemble(base)?;
    Ok((file, problem))
}
