use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcl::commands;
use qcl::config::{Format, RunConfig, Theorem};
use qcl::error::{CliError, EXIT_PASS, EXIT_TOLERANCE, EXIT_USAGE};
use qcl::report::write_records;
use qcl::spec::{parse_f64, parse_vec4, FieldSpec, SurfaceSpec};
use qcl_core::contour::Rational;
use qcl_core::fields::KernelKind;
use qcl_core::C64;

#[derive(Parser)]
#[command(name = "qcl", version, about = "Numerical checks of quaternionic and biquaternionic integral theorems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one theorem and compare with its closed form.
    Verify(RunArgs),
    /// Sweep quadrature orders (`--quad 8,16,32`).
    Convergence {
        #[command(flatten)]
        run: RunArgs,
        /// Also require errors to fall monotonically until roundoff.
        #[arg(long)]
        self_test: bool,
    },
    /// Every theorem with its expected constant and computed value.
    Table(RunArgs),
    /// Evaluate a kernel at a point.
    KernelEval {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        reflected: bool,
        #[arg(long, value_name = "W,X,Y,Z", allow_hyphen_values = true)]
        offset: Option<String>,
        #[arg(long, value_name = "W,X,Y,Z", allow_hyphen_values = true)]
        at: String,
        /// Imaginary parts of the point coordinates.
        #[arg(long, value_name = "W,X,Y,Z", allow_hyphen_values = true)]
        at_im: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Residues of rational functions; without `--den`, the built-in table.
    Residue {
        /// Numerator coefficients, lowest degree first.
        #[arg(long, allow_hyphen_values = true)]
        num: Option<String>,
        /// Denominator coefficients, lowest degree first.
        #[arg(long, allow_hyphen_values = true)]
        den: Option<String>,
        /// Pole as `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        pole: Option<String>,
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

/// Run settings; each flag overrides the same field of `--config`.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    theorem: Option<String>,
    /// Field: const:<poly>, poly:<poly>, gen:<variant>:<poly>, kernel:<name>, random:deg=<n>.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    #[arg(long, value_name = "W,X,Y,Z", allow_hyphen_values = true)]
    q0: Option<String>,
    /// Surface: sphere:r=, capped:r=, box:h=, prism:rho=, deformed:rho=,t1=, narrow:rho=, wide:t1=.
    #[arg(long)]
    surface: Option<String>,
    /// Gauss–Legendre order, or a comma-separated list for `convergence`.
    #[arg(long)]
    quad: Option<String>,
    #[arg(long)]
    panels: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(t) = &self.theorem {
            cfg.theorem = Some(t.parse::<Theorem>()?);
        }
        if let Some(f) = &self.f {
            cfg.f = f.parse::<FieldSpec>()?;
        }
        if let Some(q) = &self.q0 {
            cfg.q0 = parse_vec4(q)?;
        }
        if let Some(s) = &self.surface {
            cfg.surface = Some(s.parse::<SurfaceSpec>()?);
        }
        if let Some(q) = &self.quad {
            cfg.orders = q
                .split(',')
                .map(|o| o.trim().parse().map_err(|_| CliError::usage(format!("bad quadrature order `{o}`"))))
                .collect::<Result<_, _>>()?;
        }
        if let Some(p) = self.panels {
            cfg.panels = p;
        }
        if self.tol.is_some() {
            cfg.tol = self.tol;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Verify(args) => {
            let cfg = args.resolve()?;
            let records = commands::verify(&cfg)?;
            let mut out = output(cfg.out.as_ref())?;
            write_records(&mut out, &records, cfg.format)?;
            out.flush()?;
            Ok(commands::exit_code(&records))
        }
        Cmd::Convergence { run, self_test } => {
            let cfg = run.resolve()?;
            let rows = commands::convergence(&cfg)?;
            let mut out = output(cfg.out.as_ref())?;
            write_records(&mut out, &rows, cfg.format)?;
            out.flush()?;
            let last_ok = rows.last().is_some_and(|r| r.pass);
            if !last_ok || (self_test && !commands::convergence_is_monotone(&rows)) {
                return Ok(EXIT_TOLERANCE);
            }
            Ok(EXIT_PASS)
        }
        Cmd::Table(args) => {
            let cfg = args.resolve()?;
            let records = commands::table(&cfg)?;
            let mut out = output(cfg.out.as_ref())?;
            write_records(&mut out, &records, cfg.format)?;
            out.flush()?;
            let failed = records.iter().filter(|r| !r.pass).count();
            eprintln!("{} rows, {} outside tolerance", records.len(), failed);
            Ok(commands::exit_code(&records))
        }
        Cmd::KernelEval { kernel, reflected, offset, at, at_im, format } => {
            let kind = KernelKind::from_name(&kernel).ok_or_else(|| CliError::usage(format!("unknown kernel `{kernel}`")))?;
            let offset = offset.as_deref().map(parse_vec4).transpose()?.unwrap_or([0.0; 4]);
            let at_im = at_im.as_deref().map(parse_vec4).transpose()?.unwrap_or([0.0; 4]);
            let v = commands::kernel_eval(kind, reflected, offset, parse_vec4(&at)?, at_im)?;
            let mut out = output(None)?;
            commands::write_kernel_value(&mut out, &v, format)?;
            out.flush()?;
            Ok(EXIT_PASS)
        }
        Cmd::Residue { num, den, pole, order, format } => {
            let rows = match (den, pole) {
                (None, None) if num.is_none() => commands::residue_self_test()?,
                (Some(den), Some(pole)) => {
                    let num = commands::parse_poly(num.as_deref().unwrap_or("1"))?;
                    let den = commands::parse_poly(&den)?;
                    let parts: Vec<f64> = pole.split(',').map(parse_f64).collect::<Result<_, _>>()?;
                    let pole = match parts[..] {
                        [re] => C64::new(re, 0.0),
                        [re, im] => C64::new(re, im),
                        _ => return Err(CliError::usage("pole must be `re` or `re,im`")),
                    };
                    vec![commands::residue_row("custom", &Rational::new(num, den), pole, order, None)?]
                }
                _ => return Err(CliError::usage("custom residues need both --den and --pole")),
            };
            let mut out = output(None)?;
            commands::write_residue_rows(&mut out, &rows, format)?;
            out.flush()?;
            Ok(if rows.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_TOLERANCE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qcl: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
