//! The `diagmetric` command-line front end.
//!
//! Exit codes: 0 success or a true verdict, 1 a false verdict, 2 an input
//! error, 3 the solver hit its iteration limit. Every run prints a SHA-256
//! digest of its configuration and input files to stderr.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::cone::{self, ConeProblem, ConeVerdict};
use crate::higgs::{self, DiagonalHiggsDatum, WeightVector};
use crate::io;
use crate::rational::{self, Rational};
use crate::rootsys::{Root, RootSystem, RootSystemSpec};
use crate::scan::{self, ScanConfig};
use crate::toda::{self, SolveOptions, SolveReport, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ITERATION_LIMIT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    RootSystem(#[from] crate::rootsys::RootSystemError),
    #[error(transparent)]
    Higgs(#[from] higgs::HiggsError),
    #[error(transparent)]
    Cone(#[from] cone::ConeError),
    #[error(transparent)]
    Toda(#[from] toda::TodaError),
    #[error(transparent)]
    Rational(#[from] rational::ParseRationalError),
}

#[derive(Debug, Parser)]
#[command(name = "diagmetric", version, about = "Cone certificates, coordinate stability and a torus Toda solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Named type letter (A–G); use with --rank.
    #[arg(long = "type", value_name = "LETTER", conflicts_with = "system")]
    pub letter: Option<String>,
    #[arg(long, requires = "letter")]
    pub rank: Option<usize>,
    /// JSON file holding `{"type":..,"rank":..}` or `{"cartan":[[..]]}`.
    #[arg(long, value_name = "FILE")]
    pub system: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summarise a root system and optionally dump its roots as CSV.
    Roots {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Decide cone membership and print a certificate.
    Cone {
        #[arg(long, value_name = "FILE")]
        problem: PathBuf,
        /// Test the closed cone instead of the open one.
        #[arg(long)]
        closed: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Coordinate (semi)stability and both cone conditions of a datum.
    Stability {
        #[arg(long, value_name = "FILE")]
        datum: PathBuf,
        #[arg(long, default_value_t = higgs::DEFAULT_ENUMERATION_BOUND)]
        bound: usize,
    },
    /// Evaluate the dual character on a weight and classify it.
    GammaVee {
        #[arg(long, value_name = "FILE")]
        datum: PathBuf,
        /// Comma-separated traceless weight, e.g. `-1,1` or `1/2,-1/2`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Defaults to the minimal integral n.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Root-difference test on a set of active roots.
    Offdiag {
        #[command(flatten)]
        system: SystemArgs,
        /// Active root in simple-root coordinates, e.g. `1,0`; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        active: Vec<String>,
        /// Use the negated simple roots together with the highest root.
        #[arg(long, conflicts_with = "active")]
        cyclic: bool,
    },
    /// Exhaustive comparison of subset stability with cone membership.
    EquivalenceScan {
        #[arg(long, default_value_t = 4)]
        rmax: usize,
        #[arg(long, default_value_t = 3)]
        dmax: i64,
        /// CSV destination; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Solve the torus Toda problem.
    Solve {
        #[arg(long, value_name = "FILE")]
        problem: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long)]
        force_iterate: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        /// Also write gnuplot columns of a cross-section and the energy trace.
        #[arg(long)]
        emit_plot_data: bool,
    },
    /// Re-check serialized certificates and solutions.
    Verify {
        #[arg(long, value_name = "FILE", requires = "verdict")]
        cone_problem: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        verdict: Option<PathBuf>,
        #[arg(long, value_name = "FILE", requires = "omega")]
        problem: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        omega: Option<PathBuf>,
        #[arg(long, value_name = "FILE", requires = "problem")]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

/// Parses `argv` (including the program name), runs and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Read { path: path.to_owned(), source })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<(T, Vec<u8>), CliError> {
    let bytes = read(path)?;
    let v = serde_json::from_slice(&bytes).map_err(|source| CliError::Json { path: path.to_owned(), source })?;
    Ok((v, bytes))
}

fn digest(command: &Command, inputs: &[&[u8]]) {
    let config = format!("{command:?}");
    let mut parts: Vec<&[u8]> = vec![config.as_bytes()];
    parts.extend_from_slice(inputs);
    eprintln!("config-digest: {}", io::sha256_hex(&parts));
}

fn print_json(v: &serde_json::Value) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).expect("JSON values always serialize");
    writeln!(out)?;
    Ok(())
}

fn root_system(args: &SystemArgs) -> Result<(RootSystem, Vec<u8>), CliError> {
    match (&args.letter, args.rank, &args.system) {
        (Some(letter), Some(rank), None) => Ok((RootSystem::build(&RootSystemSpec::named(letter, rank))?, Vec::new())),
        (None, None, Some(path)) => {
            let (spec, bytes): (RootSystemSpec, _) = read_json(path)?;
            Ok((RootSystem::build(&spec)?, bytes))
        }
        _ => Err(CliError::Usage("give either --type with --rank, or --system".into())),
    }
}

fn parse_rationals(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',').map(|p| rational::parse_rational(p.trim()).map_err(CliError::from)).collect()
}

fn parse_root(s: &str) -> Result<Root, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|_| CliError::Usage(format!("bad root coordinate {p:?}"))))
        .collect::<Result<Vec<_>, _>>()
        .map(Root)
}

fn qvec(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational::format_rational).collect()
}

fn execute(command: &Command) -> Result<i32, CliError> {
    match command {
        Command::Roots { system, csv } => {
            let (rs, bytes) = root_system(system)?;
            digest(command, &[&bytes]);
            let highest = rs.highest_root().ok().map(|r| r.0.clone());
            print_json(&json!({
                "rank": rs.rank(),
                "cartan": rs.cartan(),
                "root_count": rs.roots().len(),
                "positive_roots": rs.positive_roots().count(),
                "components": rs.components(),
                "highest_root": highest,
                "killing": rs.killing_matrix().iter().map(|r| qvec(r)).collect::<Vec<_>>(),
            }))?;
            if let Some(path) = csv {
                io::write_atomic(path, rs.roots_csv().as_bytes())?;
            }
            Ok(EXIT_OK)
        }
        Command::Cone { problem, closed, out } => {
            let (p, bytes): (ConeProblem, _) = read_json(problem)?;
            p.validate()?;
            digest(command, &[&bytes]);
            let v = if *closed { cone::closed_cone_member(&p) } else { cone::open_cone_member(&p) };
            let text = serde_json::to_string_pretty(&v).expect("verdicts serialize");
            println!("{text}");
            if let Some(path) = out {
                io::write_atomic(path, format!("{text}\n").as_bytes())?;
            }
            Ok(if v.answer { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Stability { datum, bound } => {
            let (d, bytes): (DiagonalHiggsDatum, _) = read_json(datum)?;
            digest(command, &[&bytes]);
            let subsets = higgs::arrow_closed_subsets_bounded(&d, *bound)?;
            let semistable = subsets.iter().all(|s| d.degree_of(s) <= rational::q(0));
            let stable = subsets.iter().all(|s| d.degree_of(s) < rational::q(0));
            let closed = higgs::cone_condition(&d, false);
            let open = higgs::cone_condition(&d, true);
            print_json(&json!({
                "datum": d,
                "closed_subsets": subsets.iter().map(|s| json!({
                    "indices": s.indices,
                    "degree": rational::format_rational(&d.degree_of(s)),
                })).collect::<Vec<_>>(),
                "weak_components": d.weak_components(),
                "semistable": semistable,
                "stable": stable,
                "closed_cone": closed,
                "open_cone": open,
            }))?;
            Ok(if stable { EXIT_OK } else { EXIT_FALSE })
        }
        Command::GammaVee { datum, s, n } => {
            let (d, bytes): (DiagonalHiggsDatum, _) = read_json(datum)?;
            digest(command, &[&bytes]);
            let w = WeightVector::new(parse_rationals(s)?)?;
            let n = n.unwrap_or_else(|| higgs::minimal_n_of(&d));
            let value = higgs::gamma_vee_eval(&d, n, &w)?;
            let character = higgs::DualCharacter::of(&d, n)?;
            let class = match higgs::orbit_criterion(&d, n, &w) {
                Ok(c) => serde_json::to_value(c).expect("enum serializes"),
                Err(higgs::HiggsError::Inadmissible { i, j }) => json!(format!("inadmissible: arrow ({i},{j})")),
                Err(e) => return Err(e.into()),
            };
            print_json(&json!({
                "n": n,
                "minimal_n": higgs::minimal_n_of(&d),
                "gamma_vee": rational::format_rational(&value),
                "character_on_basis": qvec(&character.functional.0),
                "integral": character.is_integral(),
                "classification": class,
            }))?;
            Ok(EXIT_OK)
        }
        Command::Offdiag { system, active, cyclic } => {
            let (rs, bytes) = root_system(system)?;
            digest(command, &[&bytes]);
            let roots = if *cyclic {
                higgs::cyclic_active_set(&rs)?
            } else {
                active.iter().map(|a| parse_root(a)).collect::<Result<Vec<_>, _>>()?
            };
            if roots.is_empty() {
                return Err(CliError::Usage("no active roots given".into()));
            }
            let pass = higgs::offdiagonal_check(&roots, &rs)?;
            let mut report = json!({
                "active": roots.iter().map(|r| r.0.clone()).collect::<Vec<_>>(),
                "passes": pass,
            });
            if !pass {
                let (a, b) = higgs::offdiagonal_witness(&roots, &rs).expect("a failing check has a witness");
                report["witness"] = json!({ "alpha": a.0, "beta": b.0, "difference": a.sub(&b).0 });
                report["note"] = json!("sufficient check failed; the condition is not fully decided");
            }
            print_json(&report)?;
            Ok(if pass { EXIT_OK } else { EXIT_FALSE })
        }
        Command::EquivalenceScan { rmax, dmax, out } => {
            if *rmax < 2 || *rmax > 5 || *dmax < 0 {
                return Err(CliError::Usage("need 2 <= rmax <= 5 and dmax >= 0".into()));
            }
            digest(command, &[]);
            let cfg = ScanConfig { rmin: 2, rmax: *rmax, dmax: *dmax };
            let mut writer = csv::Writer::from_writer(Vec::new());
            let summary = scan::equivalence_scan(&cfg, |row| {
                writer.serialize(row).expect("in-memory CSV write");
            });
            let bytes = writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            let summary_json = json!({ "summary": summary, "mismatches": summary.mismatches() });
            match out {
                Some(path) => {
                    io::write_atomic(path, &bytes)?;
                    print_json(&summary_json)?;
                }
                None => {
                    std::io::stdout().lock().write_all(&bytes)?;
                    eprintln!("{summary_json}");
                }
            }
            Ok(if summary.mismatches() == 0 { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Solve { problem, out, force_iterate, tol, max_iter, emit_plot_data } => {
            if !(*tol > 0.0) {
                return Err(CliError::Usage("--tol must be positive".into()));
            }
            let bytes = read(problem)?;
            digest(command, &[&bytes]);
            let (_, p) = toda::load_problem(problem)?;
            let opts = SolveOptions { tol: *tol, max_iter: *max_iter, force_iterate: *force_iterate, ..SolveOptions::default() };
            let (state, report) = toda::solve(&p, &opts)?;
            std::fs::create_dir_all(out)?;
            io::write_atomic(&out.join("omega.csv"), io::omega_csv(&state).as_bytes())?;
            let text = serde_json::to_string_pretty(&report).expect("reports serialize");
            io::write_atomic(&out.join("report.json"), format!("{text}\n").as_bytes())?;
            if *emit_plot_data {
                io::write_atomic(&out.join("omega_section.dat"), io::cross_section_dat(&state, 0).as_bytes())?;
                io::write_atomic(&out.join("energy.dat"), io::energy_trace_dat(&report.energy_trace).as_bytes())?;
            }
            print_json(&json!({
                "verdict": report.verdict,
                "residual": report.residual,
                "mean_balance": report.mean_balance,
                "iterations": report.iterations,
                "boundary": report.precheck.boundary,
                "note": report.note,
            }))?;
            Ok(match report.verdict {
                Verdict::Converged => EXIT_OK,
                Verdict::Infeasible => EXIT_FALSE,
                Verdict::IterationLimit => EXIT_ITERATION_LIMIT,
            })
        }
        Command::Verify { cone_problem, verdict, problem, omega, report, tol } => {
            if cone_problem.is_none() && problem.is_none() {
                return Err(CliError::Usage("nothing to verify: give --cone-problem/--verdict or --problem/--omega".into()));
            }
            let mut inputs: Vec<Vec<u8>> = Vec::new();
            let mut checks: Vec<serde_json::Value> = Vec::new();
            let mut all = true;
            if let (Some(cp), Some(v)) = (cone_problem, verdict) {
                let (p, b1): (ConeProblem, _) = read_json(cp)?;
                let (v, b2): (ConeVerdict, _) = read_json(v)?;
                inputs.extend([b1, b2]);
                let ok = cone::verify_certificate(&p, &v);
                all &= ok;
                checks.push(json!({ "check": "cone-certificate", "pass": ok, "answer": v.answer }));
            }
            if let (Some(pp), Some(op)) = (problem, omega) {
                inputs.push(read(pp)?);
                let (_, p) = toda::load_problem(pp)?;
                let text = String::from_utf8(read(op)?).map_err(|e| CliError::Usage(e.to_string()))?;
                let state = io::read_omega_csv(&text, *p.grid())?;
                if state.dim != p.dim() {
                    return Err(CliError::Usage(format!("omega has {} components, problem needs {}", state.dim, p.dim())));
                }
                inputs.push(text.into_bytes());
                let rep: Option<SolveReport> = match report {
                    Some(r) => {
                        let (rep, b): (SolveReport, _) = read_json(r)?;
                        inputs.push(b);
                        Some(rep)
                    }
                    None => None,
                };
                let claimed = rep.as_ref().map(|r| r.verdict);
                if claimed == Some(Verdict::Infeasible) {
                    let pre = p.feasibility_precheck()?;
                    let active: Vec<Root> = p.active_roots().cloned().collect();
                    let ok = !pre.feasible()
                        && rep.as_ref().and_then(|r| r.recession_direction.as_ref()).is_some_and(|d| {
                            toda::verify_recession(p.root_system(), &active, &pre.problem.target, d)
                        });
                    all &= ok;
                    checks.push(json!({ "check": "recession-direction", "pass": ok }));
                } else if claimed != Some(Verdict::IterationLimit) {
                    let residual = p.residual(&state.omega)?;
                    let balance = p.mean_balance_check(&state.omega)?;
                    let cells = p.grid().cells() as f64;
                    let (r_ok, b_ok) = (residual <= *tol, balance <= cells * tol);
                    all &= r_ok && b_ok;
                    checks.push(json!({ "check": "residual", "pass": r_ok, "value": residual, "margin": tol - residual }));
                    checks.push(json!({ "check": "mean-balance", "pass": b_ok, "value": balance, "margin": cells * tol - balance }));
                } else {
                    checks.push(json!({ "check": "iteration-limit", "pass": true, "note": "no convergence claimed" }));
                }
            }
            let refs: Vec<&[u8]> = inputs.iter().map(Vec::as_slice).collect();
            digest(command, &refs);
            print_json(&json!({ "pass": all, "checks": checks }))?;
            Ok(if all { EXIT_OK } else { EXIT_FALSE })
        }
    }
}
