use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use e2zeros::export;
use e2zeros::plot::{self, Figure, PlotSpec};
use e2zeros::verify::{self, TheoremSelection, VerifyOptions};
use e2zeros::zerofinder::{self, CatalogSelector};

#[derive(Debug, Parser)]
#[command(name = "e2zeros", version, about = "Zeros of the weight-2 Eisenstein series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Refine and export the catalog of zeros.
    Zeros {
        #[command(flatten)]
        selector: SelectorArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the numerical checks and write a JSON report.
    Verify {
        /// Run every check (same as `--theorem all`).
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum)]
        theorem: Option<Theorem>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Denominator bound for the catalog the theorem checks run on.
        #[arg(long = "max-denominator", default_value_t = 50)]
        max_denominator: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render one of the figures as SVG.
    Plot {
        #[arg(long, value_parser = parse_figure)]
        figure: Figure,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "max-denominator", conflicts_with = "min_height")]
        max_denominator: Option<u32>,
        #[arg(long = "min-height")]
        min_height: Option<f64>,
        /// Top of the sides of D for the h image.
        #[arg(long = "y-max")]
        y_max: Option<f64>,
    },
    /// The zeros on Re z = 0 and Re z = -1/2, by bisection.
    AxisZeros {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct SelectorArgs {
    #[arg(long = "max-denominator")]
    max_denominator: Option<u32>,
    #[arg(long = "min-height")]
    min_height: Option<f64>,
}

impl SelectorArgs {
    fn selector(&self) -> CatalogSelector {
        match (self.max_denominator, self.min_height) {
            (Some(q), _) => CatalogSelector::MaxDenominator(q),
            (None, Some(eps)) => CatalogSelector::MinHeight(eps),
            (None, None) => unreachable!("clap requires one selector"),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Theorem {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "4")]
    Four,
    All,
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    Figure::parse(s).ok_or_else(|| format!("unknown figure {s:?}; expected zeros_scatter, real_locus, h_image or circles"))
}

enum Outcome {
    Success,
    VerificationFailed,
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Zeros { selector, format, out } => {
            let catalog = zerofinder::build_catalog(selector.selector())?;
            if catalog.is_empty() {
                bail!("no zeros selected");
            }
            let text = match format {
                Format::Csv => export::catalog_csv(&catalog)?,
                Format::Json => export::catalog_json(&catalog)?,
            };
            emit(&text, out.as_ref())?;
            Ok(Outcome::Success)
        }
        Command::Verify {
            all,
            theorem,
            seed,
            max_denominator,
            out,
        } => {
            let selection = match (all, theorem) {
                (true, _) | (false, None) | (false, Some(Theorem::All)) => TheoremSelection::All,
                (false, Some(Theorem::One)) => TheoremSelection::One,
                (false, Some(Theorem::Two)) => TheoremSelection::Two,
                (false, Some(Theorem::Four)) => TheoremSelection::Four,
            };
            let options = VerifyOptions {
                selection,
                seed,
                max_denominator,
                ..VerifyOptions::default()
            };
            let report = verify::run_checks(&options)?;
            let chain = match selection {
                TheoremSelection::Two | TheoremSelection::All => verify::strip_bound_chain()?,
                _ => Vec::new(),
            };
            for check in &report.checks {
                eprintln!(
                    "{} {:<36} measured {} threshold {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    export::fmt17(check.measured),
                    export::fmt17(check.threshold)
                );
            }
            let json = export::report_json(&report, &chain)?;
            emit(&json, out.as_ref())?;
            Ok(if report.all_passed() {
                Outcome::Success
            } else {
                Outcome::VerificationFailed
            })
        }
        Command::Plot {
            figure,
            out,
            max_denominator,
            min_height,
            y_max,
        } => {
            let mut spec = PlotSpec::default_for(figure);
            if let Some(y) = y_max {
                spec.y_max = y;
            }
            let catalog = || {
                let selector = match (max_denominator, min_height) {
                    (Some(q), _) => CatalogSelector::MaxDenominator(q),
                    (None, Some(eps)) => CatalogSelector::MinHeight(eps),
                    (None, None) => match figure {
                        Figure::Circles => CatalogSelector::MaxDenominator(12),
                        _ => CatalogSelector::MinHeight(0.002),
                    },
                };
                zerofinder::build_catalog(selector)
            };
            match figure {
                Figure::ZerosScatter => plot::plot_zeros_svg(&catalog()?, &spec, &out)?,
                Figure::RealLocus => plot::plot_real_locus_svg(&spec, &out)?,
                Figure::HImage => plot::plot_h_image_svg(&spec, &out)?,
                Figure::Circles => plot::plot_circles_svg(&catalog()?, &spec, &out)?,
            }
            Ok(Outcome::Success)
        }
        Command::AxisZeros { format, out } => {
            let imaginary = zerofinder::zero_on_imaginary_axis()?;
            let half = zerofinder::zero_on_half_line()?;
            let text = match format {
                Format::Csv => format!(
                    "x,y\n{},{}\n{},{}\n",
                    export::fmt17(0.0),
                    export::fmt17(imaginary),
                    export::fmt17(-0.5),
                    export::fmt17(half)
                ),
                Format::Json => {
                    serde_json::to_string_pretty(&serde_json::json!({
                        "zeros": [
                            { "x": export::fmt17(0.0), "y": export::fmt17(imaginary) },
                            { "x": export::fmt17(-0.5), "y": export::fmt17(half) },
                        ],
                        "generated_by": export::generated_by(),
                    }))? + "\n"
                }
            };
            emit(&text, out.as_ref())?;
            Ok(Outcome::Success)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
