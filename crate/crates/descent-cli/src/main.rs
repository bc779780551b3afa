use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use descent::verdict::BoundPath;
use descent::DescentError;
use descent_cli::{
    analyze, batch, fixture_paths, load_certificate, load_curve, validate, ErrorReport, Options, DEFAULT_PRECISION,
    MAX_PRECISION, MIN_PRECISION,
};

#[derive(Parser)]
#[command(
    name = "descent",
    version,
    about = "2-descent bounds and depth-2 finiteness verdicts for hyperelliptic curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Working 2-adic precision in bits; doubled on precision failures up to 4096.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION,
          value_parser = clap::value_parser!(u32).range(MIN_PRECISION as i64..=MAX_PRECISION as i64))]
    precision: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Crude bounds use only the certificate dimension.
    #[arg(long, global = true, value_enum, default_value_t = PathArg::Refined)]
    path: PathArg,
}

#[derive(Subcommand)]
enum Command {
    /// Compute dim Ker θ_dR, the bounds and the verdict for one curve.
    Analyze(Inputs),
    /// Check the local conditions at 2 for every certificate element.
    Validate(Inputs),
    /// Analyze every subdirectory holding curve.json and certificate.json.
    Batch {
        #[arg(long, default_value = "fixtures/examples")]
        fixtures_dir: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
    },
}

#[derive(clap::Args)]
struct Inputs {
    /// Directory holding curve.json and certificate.json.
    dir: Option<PathBuf>,
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Crude,
    Refined,
}

impl Inputs {
    fn paths(&self) -> Result<(PathBuf, PathBuf), DescentError> {
        let (dc, dk) = match &self.dir {
            Some(d) => {
                let (c, k) = fixture_paths(d);
                (Some(c), Some(k))
            }
            None => (None, None),
        };
        let curve = self.curve.clone().or(dc).ok_or_else(|| DescentError::Io("no curve file given".into()))?;
        let cert =
            self.certificate.clone().or(dk).ok_or_else(|| DescentError::Io("no certificate file given".into()))?;
        Ok((curve, cert))
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), DescentError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| DescentError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| DescentError::Io(e.to_string())),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<ExitCode, DescentError> {
    let opts = Options {
        precision: cli.precision,
        path: match cli.path {
            PathArg::Crude => BoundPath::Crude,
            PathArg::Refined => BoundPath::Refined,
        },
    };
    match &cli.command {
        Command::Analyze(inputs) => {
            let (c, k) = inputs.paths()?;
            let report = analyze(&load_curve(&c)?, &load_certificate(&k)?, opts)?;
            let text = match cli.format {
                Format::Json => json(&report),
                Format::Tsv => format!("{}\n{}\n", descent::verdict::BoundsReport::TSV_HEADER, report.bounds.tsv_row()),
            };
            emit(&cli.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(inputs) => {
            let (c, k) = inputs.paths()?;
            let report = validate(&load_curve(&c)?, &load_certificate(&k)?, opts)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let text = match cli.format {
                Format::Json => json(&report),
                Format::Tsv => {
                    let mut s = String::from("element\tpass\n");
                    for e in &report.local.elements {
                        s.push_str(&format!("{}\t{}\n", e.index, e.pass));
                    }
                    s
                }
            };
            emit(&cli.out, &text)?;
            Ok(if report.all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Batch { fixtures_dir, jobs } => {
            let output = batch(fixtures_dir, *jobs as usize, opts)?;
            let text = match cli.format {
                Format::Json => json(&output),
                Format::Tsv => output.to_tsv(),
            };
            emit(&cli.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let report = ErrorReport::from(&e);
            eprintln!("{}", serde_json::to_string(&report).expect("error reports serialize"));
            ExitCode::from(report.exit_code as u8)
        }
    }
}
