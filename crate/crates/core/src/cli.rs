//! Command-line front end.
//!
//! Exit codes: 0 success, 1 data or runtime error, 2 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::codec::{codec_conditional, codec_unconditional};
use crate::data::{load_csv, standardize};
use crate::error::{Error, Result};
use crate::eval::{run_benchmark, Scenario};
use crate::report::{describe, ResultDocument};
use crate::seed;
use crate::selector::{run_selection, Mode, SelectorConfig};
use crate::simgen::{generate_setting, generate_toy, write_csv, SimulationSpec};

#[derive(Debug, Parser)]
#[command(
    name = "tnvs",
    version,
    about = "Transparent nonlinear variable selection"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Does not change results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition the predictors of a CSV file into the four subsets.
    Select(SelectArgs),
    /// Write a synthetic dataset and its ground-truth sidecar.
    Simulate(SimulateArgs),
    /// Repeated selection on synthetic data, scored against ground truth.
    Bench(BenchArgs),
    /// Print a single CODEC value.
    Codec(CodecArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DMax {
    Auto,
    Fixed(usize),
}

impl FromStr for DMax {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(DMax::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) => Err("must be at least 1".into()),
            Ok(v) => Ok(DMax::Fixed(v)),
            Err(_) => Err(format!("expected a positive integer or 'auto', got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Tnvs,
    Foci,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Tnvs => Mode::Tnvs,
            ModeArg::Foci => Mode::Foci,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SelectorArgs {
    #[arg(long, default_value_t = 0.01)]
    pub alpha1: f64,
    #[arg(long, default_value_t = -0.01, allow_hyphen_values = true)]
    pub alpha2: f64,
    #[arg(long, default_value_t = 0.01)]
    pub alpha3: f64,
    /// Maximum model size, or `auto` for ⌈n / ln n⌉.
    #[arg(long, default_value = "auto")]
    pub dmax: DMax,
    #[arg(long, env = "TNVS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Tnvs)]
    pub mode: ModeArg,
    /// Wall-clock cap in seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
}

impl SelectorArgs {
    pub fn config(&self) -> SelectorConfig {
        SelectorConfig {
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            alpha3: self.alpha3,
            d_max: match self.dmax {
                DMax::Auto => None,
                DMax::Fixed(v) => Some(v),
            },
            seed: self.seed,
            mode: self.mode.into(),
            time_budget: self.time_budget,
            ..SelectorConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub response: String,
    #[command(flatten)]
    pub selector: SelectorArgs,
    /// Write the JSON document here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Suppress the text report on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SettingArg {
    Numbered(u8),
    Toy,
}

impl FromStr for SettingArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "toy" => Ok(SettingArg::Toy),
            "1" | "2" | "3" => Ok(SettingArg::Numbered(s.parse().unwrap())),
            _ => Err(format!("expected 1, 2, 3 or toy, got {s:?}")),
        }
    }
}

impl SettingArg {
    fn stem(self) -> String {
        match self {
            SettingArg::Numbered(k) => format!("setting{k}"),
            SettingArg::Toy => "toy".into(),
        }
    }

    fn scenario(self, seed: u64, n: Option<usize>, p: Option<usize>) -> Result<Scenario> {
        match self {
            SettingArg::Toy => Ok(Scenario::Toy {
                n: n.unwrap_or(2000),
                seed,
            }),
            SettingArg::Numbered(k) => {
                let mut spec = SimulationSpec::setting(k, seed)?;
                if let Some(n) = n {
                    spec.n = n;
                }
                if let Some(p) = p {
                    spec.p = p;
                }
                spec.validate()?;
                Ok(Scenario::Setting(spec))
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// 1, 2, 3 or toy.
    #[arg(long)]
    pub setting: SettingArg,
    #[arg(long, env = "TNVS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub setting: SettingArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub datasets: u64,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[command(flatten)]
    pub selector: SelectorArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Response column.
    #[arg(long)]
    pub y: String,
    /// Candidate column.
    #[arg(long)]
    pub x: String,
    /// Comma-separated conditioning columns.
    #[arg(long, value_delimiter = ',')]
    pub given: Vec<String>,
    #[arg(long, env = "TNVS_SEED", default_value_t = 0)]
    pub seed: u64,
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// JSON document for `select`.
pub fn select_document(args: &SelectArgs) -> Result<(ResultDocument, String)> {
    let data = load_csv::<f64>(&args.input, &args.response)?;
    let mut cfg = args.selector.config();
    let result = run_selection(&data, &cfg)?;
    cfg.d_max = Some(cfg.effective_d_max(data.n()));
    let doc = ResultDocument::new(&result, data.column_names(), cfg);
    Ok((doc, describe(&result, data.column_names())))
}

fn cmd_select(args: &SelectArgs) -> Result<()> {
    let (doc, text) = select_document(args)?;
    if !args.quiet {
        eprint!("{text}");
    }
    let mut json = serde_json::to_string_pretty(&doc)?;
    json.push('\n');
    emit(&json, args.output.as_deref())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let (data, gt) = match args.setting.scenario(args.seed, args.n, args.p)? {
        Scenario::Toy { n, seed } => generate_toy(n, seed)?,
        Scenario::Setting(spec) => generate_setting(&spec)?,
    };
    let (d, t) = write_csv(&data, &gt, &args.out, &args.setting.stem())?;
    println!("{}", d.display());
    println!("{}", t.display());
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let scenario = args.setting.scenario(args.selector.seed, args.n, args.p)?;
    let cfg = args.selector.config();
    let report = run_benchmark(&scenario, &cfg, args.reps as usize, args.datasets as usize)?;
    let method = match cfg.mode {
        Mode::Tnvs => "TNVS",
        Mode::Foci => "FOCI",
    };
    eprintln!("{}", crate::eval::EvalReport::table_header());
    eprintln!("{}", report.table_row(method));
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    emit(&json, args.output.as_deref())
}

/// Value printed by `codec`.
pub fn codec_value(args: &CodecArgs) -> Result<crate::codec::CodecValue> {
    let data = load_csv::<f64>(&args.input, &args.y)?;
    let view = standardize(&data);
    let col = |name: &str| {
        data.column_index(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_owned()))
    };
    let xj = view.column(col(&args.x)?);
    let mut rng = seed::stream(&[args.seed]);
    if args.given.is_empty() {
        codec_unconditional(data.response(), xj, &mut rng)
    } else {
        let given = args
            .given
            .iter()
            .map(|g| col(g).map(|j| view.column(j)))
            .collect::<Result<Vec<_>>>()?;
        codec_conditional(data.response(), xj, &given, &mut rng)
    }
}

fn cmd_codec(args: &CodecArgs) -> Result<()> {
    println!("{}", codec_value(args)?);
    Ok(())
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return 1;
        }
    }
    let outcome = match &cli.command {
        Command::Select(a) => cmd_select(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Codec(a) => cmd_codec(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e @ (Error::InvalidParameter(_) | Error::NotDivisibleByTen(_))) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
