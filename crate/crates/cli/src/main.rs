use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cfwave::SolverId;
use cfwave_cli::commands::{self, figure_ks};
use cfwave_cli::config::{self, parse_k_list, parse_k_range, parse_l_list, parse_solvers, parse_spin, parse_steps, Format, Overrides, RunConfig};
use cfwave_cli::output::{emit, Record};
use cfwave_cli::run::run_rows;
use cfwave_cli::{CliError, Result};

/// Electron-hydrogen phase shifts with exact exchange (canonical functions)
/// and Numerov / local-exchange baselines.
#[derive(Parser)]
#[command(name = "cfwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Phase shifts for every requested (k, l, S, solver, h).
    Phaseshift(Common),
    /// Same as phaseshift, defaulting to all solvers.
    Sweep(Common),
    /// All four solvers side by side per channel.
    Compare(Common),
    /// Regenerate a published table or figure data set.
    Reproduce(Reproduce),
    /// Phase-shift spread over a list of step lengths.
    Sensitivity(Common),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Target {
    /// Table 1 to 4.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    table: Option<u8>,
    /// Figure 1 to 4.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    figure: Option<u8>,
}

#[derive(Args)]
struct Reproduce {
    #[command(flatten)]
    target: Target,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Default)]
struct Common {
    /// Comma-separated wavenumbers (a.u.).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// Wavenumber range start:stop:step, inclusive.
    #[arg(long = "k-range")]
    k_range: Option<String>,
    /// Partial waves, e.g. `0,1` or `2-5`.
    #[arg(long)]
    l: Option<String>,
    /// 0, 1 or both.
    #[arg(long)]
    spin: Option<String>,
    /// Comma-separated solver ids: kftee, mcdmm, fmcc, bn, or all.
    #[arg(long)]
    solver: Option<String>,
    /// Comma-separated base step lengths.
    #[arg(long)]
    h: Option<String>,
    /// Starting radius of the canonical functions.
    #[arg(long)]
    r0: Option<f64>,
    /// Last mesh point.
    #[arg(long)]
    rmax: Option<f64>,
    /// Config file (flat `key = value`); defaults to $CFWAVE_CONFIG.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Exit with status 2 if any row failed to converge.
    #[arg(long)]
    strict: bool,
    /// Omit wall-clock timings from the output.
    #[arg(long)]
    deterministic: bool,
}

impl Common {
    fn overrides(&self) -> Result<Overrides> {
        fn usage(flag: &'static str) -> impl Fn(String) -> CliError {
            move |m| CliError::Usage(format!("--{flag}: {m}"))
        }
        let mut o = Overrides::default();
        if let Some(s) = &self.k {
            o.k = Some(parse_k_list(s).map_err(usage("k"))?);
        }
        if let Some(s) = &self.k_range {
            o.k_range = Some(parse_k_range(s).map_err(usage("k-range"))?);
        }
        if let Some(s) = &self.l {
            o.l = Some(parse_l_list(s).map_err(usage("l"))?);
        }
        if let Some(s) = &self.spin {
            o.spins = Some(parse_spin(s).map_err(usage("spin"))?);
        }
        if let Some(s) = &self.solver {
            o.solvers = Some(parse_solvers(s).map_err(usage("solver"))?);
        }
        if let Some(s) = &self.h {
            o.h = Some(parse_steps(s).map_err(usage("h"))?);
        }
        o.r0 = self.r0;
        o.rmax = self.rmax;
        o.output = self.output.clone();
        o.format = self.format.as_deref().map(|f| f.parse::<Format>()).transpose().map_err(usage("format"))?;
        o.jobs = self.jobs;
        o.strict = self.strict.then_some(true);
        o.deterministic = self.deterministic.then_some(true);
        Ok(o)
    }

    /// Effective config: `base`, then the config file, then flags.
    fn resolve(&self, base: Overrides) -> Result<RunConfig> {
        let flags = self.overrides()?;
        let mut layered = RunConfig::default();
        base.apply(&mut layered);
        let mut cfg = config::resolve_onto(layered, self.config.as_deref())?;
        flags.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn finish<R: Record>(rows: &[R], cfg: &RunConfig) -> Result<ExitCode> {
    emit(rows, cfg.format, cfg.output.as_deref())?;
    if cfg.strict && rows.iter().any(|r| !r.converged()) {
        eprintln!("cfwave: unconverged rows present");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Phaseshift(c) => {
            let cfg = c.resolve(Overrides::default())?;
            let rows = run_rows(&cfg)?;
            for r in rows.iter().filter(|r| r.error.is_some()) {
                eprintln!("cfwave: k={} l={} S={} {}: {}", r.k, r.l, r.spin, r.solver, r.error.as_deref().unwrap_or(""));
            }
            finish(&rows, &cfg)
        }
        Command::Sweep(c) => {
            let base = Overrides { solvers: Some(SolverId::ALL.to_vec()), ..Overrides::default() };
            let cfg = c.resolve(base)?;
            let rows = run_rows(&cfg)?;
            finish(&rows, &cfg)
        }
        Command::Compare(c) => {
            let cfg = c.resolve(Overrides::default())?;
            finish(&commands::compare(&cfg)?, &cfg)
        }
        Command::Sensitivity(c) => {
            let base = Overrides {
                solvers: Some(vec![SolverId::Mcdmm]),
                h: Some(cfwave::reference::MCDMM_STEPS.to_vec()),
                ..Overrides::default()
            };
            let cfg = c.resolve(base)?;
            finish(&commands::sensitivity(&cfg)?, &cfg)
        }
        Command::Reproduce(r) => {
            let cfg = r.common.resolve(Overrides::default())?;
            if let Some(id) = r.target.table {
                let rows = commands::reproduce_table(&cfg, id)?;
                eprintln!("{}", commands::table_report(id, &rows));
                finish(&rows, &cfg)
            } else {
                let id = r.target.figure.unwrap_or(1);
                let mut cfg = cfg;
                if cfg.k.is_empty() {
                    cfg.k = figure_ks();
                }
                finish(&commands::reproduce_figure(&cfg, id)?, &cfg)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("cfwave: {e}");
            ExitCode::from(1)
        }
    }
}
