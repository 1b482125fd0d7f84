use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use phi4_lame::atlas::{self, AtlasFile, ExportFormat, GridAxis, SweepSpec};
use phi4_lame::constraints::{constraint_residuals, feasibility_conditions};
use phi4_lame::families::{catalog, descriptor};
use phi4_lame::solver::{solve_family, SolutionRecord, SolveOutcome, SolveSpec, Status};
use phi4_lame::symalg::derived_system;
use phi4_lame::vars::parse_assignments;
use phi4_lame::verify::{attach_pde, verify_record, DEFAULT_POINTS};
use phi4_lame::{Error, FamilyId, Var};

#[derive(Parser)]
#[command(name = "phi4-lame", version, about = "Lamé-polynomial solutions of coupled phi-four models")]
struct Cli {
    /// Seed for multistart sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Residual tolerance for verification.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SolveArgs {
    family: String,
    /// Fixed values, e.g. `Hz=0,alpha1=-1,m=1`.
    #[arg(long, default_value = "")]
    fix: String,
    /// Free names, e.g. `A,B,D,F,alpha2`.
    #[arg(long)]
    free: String,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Start intervals, e.g. `A=0:2,D=0.1:1`.
    #[arg(long = "box", default_value = "")]
    bounds: String,
}

#[derive(Subcommand)]
enum Command {
    /// Family catalog.
    Families {
        #[command(subcommand)]
        action: FamiliesAction,
    },
    /// Print the mechanically derived constraint system of a family.
    Derive { family: String },
    /// Solve a family for the free names.
    Solve(SolveArgs),
    /// Residuals and feasibility of stored records.
    Check { input: PathBuf },
    /// Collocation reports for stored records.
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
    },
    /// Solve over a grid of fixed values.
    Sweep {
        #[command(flatten)]
        solve: SolveArgs,
        /// Axes `name=start:stop:count`, separated by commas.
        #[arg(long)]
        grid: String,
    },
    /// Sample (x, φ, ψ) for one stored record.
    Profile {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Re-export stored records.
    Export {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum FamiliesAction {
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Structured,
    Tabular,
}

enum Failure {
    Verification(String),
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. }
            | Error::ContinuationFailure { .. }
            | Error::DivergentPeriod
            | Error::CrosscheckFailure { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Outcome {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn parse_names(text: &str) -> Result<Vec<Var>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Var>().map_err(Failure::from))
        .collect()
}

fn parse_range(pair: &str) -> Result<(Var, Vec<f64>), Failure> {
    let (name, rest) = pair
        .split_once('=')
        .ok_or_else(|| Failure::Input(format!("expected name=lo:hi, got `{pair}`")))?;
    let nums = rest
        .split(':')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::Input(format!("bad number in `{pair}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((name.parse()?, nums))
}

fn build_spec(args: &SolveArgs, seed: u64) -> Result<SolveSpec, Failure> {
    let family: FamilyId = args.family.parse()?;
    let mut spec = SolveSpec::new(family)
        .free(&parse_names(&args.free)?)
        .restarts(args.restarts)
        .seed(seed);
    for (v, x) in parse_assignments(&args.fix)? {
        spec = spec.fix(v, x);
    }
    for pair in args.bounds.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match parse_range(pair)? {
            (v, n) if n.len() == 2 => spec = spec.bounds(v, n[0], n[1]),
            _ => return Err(Failure::Input(format!("expected name=lo:hi, got `{pair}`"))),
        }
    }
    Ok(spec)
}

/// Accepts an atlas file, a solve outcome, a list of records or one record.
fn load_records(path: &Path) -> Result<Vec<SolutionRecord>, Failure> {
    let bytes = fs::read(path)?;
    if let Ok(f) = atlas::parse_structured(&bytes) {
        return Ok(f.records);
    }
    if let Ok(o) = serde_json::from_slice::<SolveOutcome>(&bytes) {
        return Ok(o.records);
    }
    if let Ok(v) = serde_json::from_slice::<Vec<SolutionRecord>>(&bytes) {
        return Ok(v);
    }
    serde_json::from_slice::<SolutionRecord>(&bytes)
        .map(|r| vec![r])
        .map_err(|e| Failure::Input(format!("{}: not a record file ({e})", path.display())))
}

fn families_list(out: &Option<PathBuf>) -> Outcome {
    let mut s = String::new();
    for d in catalog() {
        s.push_str(&format!(
            "{:<8} {:<5} φ = {:<14} ψ = {:<14} {:>2} eqs  unknowns {}\n",
            d.id.label(),
            d.model.label(),
            d.shape_phi.describe(),
            d.shape_psi.describe(),
            d.equation_count,
            d.unknowns.iter().map(|v| v.name()).collect::<Vec<_>>().join(","),
        ));
        for rule in &d.applicability {
            s.push_str(&format!("         requires {}\n", rule.name));
        }
        s.push_str(&format!(
            "         equations {}..{}: {}\n",
            d.equation_labels[0],
            d.equation_labels[d.equation_count - 1],
            d.summary
        ));
    }
    emit(out, s.as_bytes())
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Families { action: FamiliesAction::List } => families_list(&cli.out),
        Command::Derive { family } => {
            let f: FamilyId = family.parse()?;
            emit(&cli.out, derived_system(f).to_string().as_bytes())
        }
        Command::Solve(args) => {
            let spec = build_spec(args, cli.seed)?;
            let mut outcome = solve_family(&spec)?;
            for r in &mut outcome.records {
                if r.status != Status::Degenerate {
                    attach_pde(r)?;
                }
            }
            emit(&cli.out, &json(&outcome)?)?;
            let converged: Vec<_> = outcome.converged().collect();
            if converged.is_empty() {
                return Err(Failure::Numerical("no converged record".into()));
            }
            if converged.iter().any(|r| r.pde_max.is_none_or(|p| p > cli.tol)) {
                return Err(Failure::Verification("a converged record fails collocation".into()));
            }
            Ok(())
        }
        Command::Check { input } => {
            let records = load_records(input)?;
            let mut s = String::new();
            let mut ok = true;
            for (k, r) in records.iter().enumerate() {
                let res = constraint_residuals(r.family, &r.params, &r.coeffs)?;
                let feas = feasibility_conditions(r.family, &r.params, &r.coeffs)?;
                let labels = &descriptor(r.family).equation_labels;
                s.push_str(&format!("record {k}: {} ({:?})\n", r.family, r.status));
                for (l, v) in labels.iter().zip(&res) {
                    s.push_str(&format!("  {l:<10} {v:+.3e}\n"));
                }
                for name in &feas.satisfied {
                    s.push_str(&format!("  ok        {name}\n"));
                }
                for v in &feas.violated {
                    s.push_str(&format!("  VIOLATED  {} (slack {:+.3e})\n", v.name, v.slack));
                }
                let max = res.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                ok &= max <= cli.tol && feas.is_feasible();
            }
            emit(&cli.out, s.as_bytes())?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Verification("constraints or feasibility violated".into()))
            }
        }
        Command::Verify { input, points } => {
            let records = load_records(input)?;
            let reports = records
                .iter()
                .map(|r| verify_record(r, *points))
                .collect::<Result<Vec<_>, _>>()?;
            emit(&cli.out, &json(&reports)?)?;
            if reports.iter().any(|r| !(r.max_abs() <= cli.tol)) {
                return Err(Failure::Verification("collocation residual above tolerance".into()));
            }
            Ok(())
        }
        Command::Sweep { solve, grid } => {
            let base = build_spec(solve, cli.seed)?;
            let mut axes = BTreeMap::new();
            for pair in grid.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match parse_range(pair)? {
                    (v, n) if n.len() == 3 && n[2] >= 1.0 && n[2].fract() == 0.0 => {
                        axes.insert(
                            v,
                            GridAxis {
                                start: n[0],
                                stop: n[1],
                                count: n[2] as usize,
                            },
                        );
                    }
                    _ => return Err(Failure::Input(format!("expected name=start:stop:count, got `{pair}`"))),
                }
            }
            let spec = SweepSpec {
                grid: axes,
                base,
                seed: cli.seed,
            };
            let file = atlas::sweep(&spec)?;
            emit(&cli.out, &atlas::export_records(&file, ExportFormat::Structured)?)
        }
        Command::Profile { input, index, samples } => {
            let records = load_records(input)?;
            let r = records
                .get(*index)
                .ok_or_else(|| Failure::Input(format!("no record {index} (file has {})", records.len())))?;
            let rows = atlas::emit_profile_samples(r, *samples)?;
            let mut s = String::from("x,phi,psi\n");
            for (x, p, q) in rows {
                s.push_str(&format!("{x},{p},{q}\n"));
            }
            emit(&cli.out, s.as_bytes())
        }
        Command::Export { input, format } => {
            let records = load_records(input)?;
            let file = AtlasFile::from_records(records, cli.seed, "export");
            let format = match format {
                Format::Structured => ExportFormat::Structured,
                Format::Tabular => ExportFormat::Tabular,
            };
            emit(&cli.out, &atlas::export_records(&file, format)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
