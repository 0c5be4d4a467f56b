//! `latent-groups`: rank linear models whose factor levels may fall into two
//! hidden groups, by fractional Bayes factors.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use latent_groups::scheme::SpaceConfig;
use latent_groups::tabular::TabularError;
use latent_groups::{analyze, AnalysisConfig, Dataset, PriorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Prior {
    Flat,
    Zs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "latent-groups", version, about = "Bayesian model selection with latent grouping factors")]
struct Args {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Numeric response column.
    #[arg(long)]
    response: String,
    /// Factor whose levels may split the regression effects (`A*B` derives
    /// the interaction of two factors).
    #[arg(long)]
    lgf_beta: Option<String>,
    /// Factor whose levels may split the error variance.
    #[arg(long)]
    lgf_sigma: Option<String>,
    /// Use one scheme for both effects and variances.
    #[arg(long)]
    same_scheme: bool,
    #[arg(long, default_value_t = 1)]
    min_levels_beta: usize,
    #[arg(long, default_value_t = 1)]
    min_levels_sigma: usize,
    /// Model formula, optionally suffixed by `:het` for group variances. Repeatable.
    #[arg(long = "model", required = true)]
    models: Vec<String>,
    #[arg(long, value_enum, default_value_t = Prior::Flat)]
    prior: Prior,
    /// Minimal training sample size; raised automatically when too small.
    #[arg(long)]
    m0: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append coefficient and variance estimates for a model index. Repeatable.
    #[arg(long = "show-estimates")]
    show_estimates: Vec<usize>,
    /// Read this column as a factor even if its labels look numeric. Repeatable.
    #[arg(long = "factor")]
    factors: Vec<String>,
}

fn parse_model(spec: &str) -> (String, bool) {
    match spec.strip_suffix(":het") {
        Some(f) => (f.trim().to_string(), true),
        None => (spec.trim().to_string(), false),
    }
}

/// Loads the CSV, reading as factors the declared columns, the grouping
/// factors (or their components) and any column that does not parse as numbers.
fn load(args: &Args) -> Result<Dataset> {
    let mut factors: Vec<String> = args.factors.clone();
    for lgf in args.lgf_beta.iter().chain(&args.lgf_sigma) {
        match lgf.split_once('*') {
            Some((a, b)) => factors.extend([a.to_string(), b.to_string()]),
            None => factors.push(lgf.clone()),
        }
    }
    factors.sort();
    factors.dedup();
    loop {
        let names: Vec<&str> = factors.iter().map(String::as_str).collect();
        match Dataset::load_csv(&args.data, &args.response, &names) {
            Ok(d) => return Ok(d),
            Err(TabularError::ParseFailure { column, .. }) if column != args.response && !factors.contains(&column) => {
                factors.push(column);
            }
            Err(e) => return Err(e).with_context(|| format!("--data {}", args.data.display())),
        }
    }
}

fn derive_lgf(mut data: Dataset, lgf: &Option<String>) -> Result<Dataset> {
    if let Some(name) = lgf {
        if data.column(name).is_none() {
            if let Some((a, b)) = name.split_once('*') {
                data = data.derive_interaction_factor(a, b, "*")?;
            }
        }
    }
    Ok(data)
}

fn run(args: &Args) -> Result<String> {
    if args.m0 == 0 {
        bail!("--m0 must be at least 1");
    }
    let mut data = load(args)?;
    data = derive_lgf(data, &args.lgf_beta)?;
    if args.lgf_sigma != args.lgf_beta {
        data = derive_lgf(data, &args.lgf_sigma)?;
    }
    let cfg = AnalysisConfig {
        space: SpaceConfig {
            models: args.models.iter().map(|m| parse_model(m)).collect(),
            lgf_beta: args.lgf_beta.clone(),
            lgf_sigma: args.lgf_sigma.clone(),
            same_scheme: args.same_scheme,
            min_levels_beta: args.min_levels_beta,
            min_levels_sigma: args.min_levels_sigma,
        },
        prior: match args.prior {
            Prior::Flat => PriorKind::Flat,
            Prior::Zs => PriorKind::ZellnerSiow,
        },
        m0: args.m0,
    };
    let (space, report) = analyze(&data, &cfg)?;
    for &i in &args.show_estimates {
        if i == 0 || i > space.len() {
            bail!("--show-estimates {i} is not a model index (1 to {})", space.len());
        }
    }
    Ok(match args.format {
        Format::Table => render::table(&report, &args.show_estimates),
        Format::Json => render::json(&report),
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = run(&args).and_then(|text| match &args.out {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("--out {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
