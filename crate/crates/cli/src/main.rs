use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use vsys_core::figures::{FigureRegistry, ParamOverrides};
use vsys_core::output::{self, Metadata, Table};
use vsys_core::params::ParamFile;
use vsys_core::poleatlas::{self, Sweep, SweepVariable};
use vsys_core::scan::{self, MethodRegistry, OBSERVABLE_NAMES};
use vsys_core::{grid, master, peaks, report, Error, SystemParams};

mod selftest;

const EXIT_IO: u8 = 1;
const EXIT_PARAM: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_UNKNOWN_COMMAND: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "vsys", version, about = "Steady-state spectra of a V-type three-level system")]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Units {
    /// Rates and detunings in units of gamma1.
    Gamma1,
    /// Rates and detunings in Hz; requires --gamma1.
    Hz,
}

#[derive(Debug, Clone, Args)]
struct ParamArgs {
    /// Flat JSON parameter file; flags given on the command line win.
    #[arg(long = "params", value_name = "FILE")]
    file: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "gamma1")]
    units: Units,

    #[arg(long, allow_negative_numbers = true)]
    gamma1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    #[arg(long, alias = "gamma_l", allow_negative_numbers = true)]
    gamma_l: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta2: Option<f64>,
}

impl ParamArgs {
    fn param_file(&self) -> Result<ParamFile, Error> {
        let mut f = match &self.file {
            Some(path) => ParamFile::read(path)?,
            None => ParamFile::default(),
        };
        if let Some(g) = self.gamma1 {
            match self.units {
                Units::Hz => {
                    f.gamma1 = None;
                    f.gamma1_hz = Some(g);
                }
                Units::Gamma1 => {
                    f.gamma1_hz = None;
                    f.gamma1 = Some(g);
                }
            }
        }
        if self.units == Units::Hz && f.gamma1_hz.is_none() {
            return Err(Error::ParamFile("--units hz needs gamma1 in Hz (--gamma1 or gamma1_hz)".into()));
        }
        for (slot, flag) in [
            (&mut f.nu, self.nu),
            (&mut f.gamma_l, self.gamma_l),
            (&mut f.eps1, self.eps1),
            (&mut f.eps2, self.eps2),
            (&mut f.delta1, self.delta1),
            (&mut f.delta2, self.delta2),
        ] {
            if flag.is_some() {
                *slot = flag;
            }
        }
        Ok(f)
    }

    fn resolve(&self) -> Result<SystemParams, Error> {
        self.param_file()?.to_params()
    }

    /// Only the values actually given, in units of gamma1.
    fn overrides(&self) -> Result<ParamOverrides, Error> {
        let f = self.param_file()?;
        let scale = f.gamma1_hz.or(f.gamma1).unwrap_or(1.0);
        if !(scale > 0.0) {
            return Err(Error::NonPositiveRate { name: "gamma1", value: scale });
        }
        let s = |v: Option<f64>| v.map(|x| x / scale);
        Ok(ParamOverrides { nu: s(f.nu), gamma_l: s(f.gamma_l), eps1: s(f.eps1), eps2: s(f.eps2), delta1: s(f.delta1) })
    }
}

#[derive(Debug, Clone, Args)]
struct GridArgs {
    /// Lower end of the delta2 grid (default grid when omitted).
    #[arg(long, requires = "hi", allow_negative_numbers = true)]
    lo: Option<f64>,
    #[arg(long, requires = "lo", allow_negative_numbers = true)]
    hi: Option<f64>,
    #[arg(long, default_value_t = grid::DEFAULT_POINTS)]
    points: usize,
}

impl GridArgs {
    fn build(&self, p: &SystemParams) -> Result<(Vec<f64>, serde_json::Value), Error> {
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) => {
                let g = grid::uniform(lo, hi, self.points)?;
                Ok((g, json!({"lo": lo, "hi": hi, "points": self.points})))
            }
            _ => {
                let (g, spec) = grid::default_delta2(p)?;
                Ok((g, serde_json::to_value(spec)?))
            }
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady state at a single (delta1, delta2).
    Steady {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Spectrum over the probe detuning delta2.
    Scan {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// numeric, closedform or cic-terms.
        #[arg(long, default_value = "numeric")]
        method: String,
        /// CSV path; a JSON sidecar is written next to it. Stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extrema, heights and widths of a spectrum.
    Peaks {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "numeric")]
        method: String,
    },
    /// Poles of rho11 in the complex delta2 plane, optionally along a sweep.
    Poles {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_parser = parse_sweep)]
        sweep: Option<SweepVariable>,
        #[arg(long, requires = "sweep", allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, requires = "sweep", allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Logarithmic spacing for the sweep grid.
        #[arg(long)]
        log: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ATS/CIC classification with the critical clock Rabi frequency.
    Regime {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Critical clock Rabi frequency over a range of pump Rabi frequencies.
    Border {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the data behind a figure panel.
    Figure {
        /// Panel name, e.g. 1b or 6a.
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
    },
    /// Quick consistency checks of the solvers against each other.
    Selftest,
}

fn parse_sweep(s: &str) -> Result<SweepVariable, String> {
    s.parse::<SweepVariable>().map_err(|e| e.to_string())
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

/// Write `table` to `out` (with sidecar) or to stdout.
fn emit(mut table: Table, meta: &Metadata, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
            table.name = stem.to_string();
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let written = output::write_table(dir, &table, meta)?;
            eprintln!("wrote {}", written.display());
        }
        None => print!("{}", table.to_csv()?),
    }
    Ok(())
}

fn hierarchy_warnings(p: &SystemParams) -> Vec<String> {
    report::regime_report(p).limit_warnings.iter().map(ToString::to_string).collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    let threads = cli.threads;
    match cli.command {
        Command::Steady { params } => {
            let p = params.resolve()?;
            let g = master::build_generator(&p);
            let s = master::steady_state(&g)?;
            let row = scan::SpectrumRow::full(p.delta2, s);
            let mut state = serde_json::Map::new();
            for (name, v) in OBSERVABLE_NAMES.iter().zip(row.observables()) {
                state.insert(name.to_string(), json!(v));
            }
            print_json(&json!({
                "params": p,
                "state": state,
                "eigenvalues": s.eigenvalues(),
                "residual": g.residual(&s),
                "warnings": hierarchy_warnings(&p),
            }))
        }
        Command::Scan { params, grid, method, out } => {
            let p = params.resolve()?;
            let m = MethodRegistry::builtin().get(&method)?;
            let (g, spec) = grid.build(&p)?;
            let s = scan::scan(&p, &g, m.as_ref(), threads)?;
            let meta = Metadata::new(&p, m.name(), spec, hierarchy_warnings(&p))?;
            emit(output::scan_table("scan", &s), &meta, out.as_deref())
        }
        Command::Peaks { params, grid, method } => {
            let p = params.resolve()?;
            let m = MethodRegistry::builtin().get(&method)?;
            let (g, _) = grid.build(&p)?;
            let s = scan::scan(&p, &g, m.as_ref(), threads)?;
            print_json(&peaks::find_peaks(&s)?)
        }
        Command::Poles { params, sweep, from, to, points, log, out } => {
            let p = params.resolve()?;
            let Some(variable) = sweep else {
                return print_json(&poleatlas::physical_poles(&p)?);
            };
            let (Some(lo), Some(hi)) = (from, to) else {
                return Err(Error::InvalidGrid("--sweep needs --from and --to".into()));
            };
            let g = if log { grid::logarithmic(lo, hi, points)? } else { grid::uniform(lo, hi, points)? };
            let tr = poleatlas::track(&p, &Sweep { variable, grid: g })?;
            let mut warnings = hierarchy_warnings(&p);
            warnings.extend(tr.warnings.iter().map(|w| format!("{w:?}")));
            let spec = json!({"variable": variable.name(), "from": lo, "to": hi, "points": points, "log": log});
            let meta = Metadata::new(&p, "poles", spec, warnings)?;
            emit(output::pole_table("poles", &tr), &meta, out.as_deref())
        }
        Command::Regime { params } => print_json(&report::regime_report(&params.resolve()?)),
        Command::Border { params, from, to, points, out } => {
            let p = params.resolve()?;
            let g = grid::logarithmic(from, to, points)?;
            let mut t = Table::new("border", &["eps1", "eps2_c", "eps2_c_strong"]);
            for b in report::border(&p, &g) {
                t.push(vec![Some(b.eps1), Some(b.eps2_c), Some(b.eps2_c_strong)]);
            }
            let meta = Metadata::new(&p, "closedform", json!({"from": from, "to": to, "points": points, "log": true}), vec![])?;
            emit(t, &meta, out.as_deref())
        }
        Command::Figure { name, list, params, out_dir } => {
            let registry = FigureRegistry::builtin();
            if list {
                for n in registry.names() {
                    println!("{n}\t{}", registry.get(n)?.caption());
                }
                return Ok(());
            }
            let figure = registry.get(name.as_deref().unwrap_or_default())?;
            for panel in figure.render(&params.overrides()?, threads)? {
                let path = output::write_table(&out_dir, &panel.table, &panel.meta)?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Selftest => {
            if selftest::run() {
                Ok(())
            } else {
                Err(Error::SelftestFailed)
            }
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownFigure(_) => EXIT_UNKNOWN_COMMAND,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_IO,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_PARAM,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    EXIT_UNKNOWN_COMMAND
                }
                _ => EXIT_PARAM,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
