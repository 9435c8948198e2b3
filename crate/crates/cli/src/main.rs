use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use menzerath_cli::commands;
use menzerath_cli::config::{Format, MeanArg, Mode, NegBinMethodArg, RunConfig, WeightingArg};

#[derive(Parser)]
#[command(name = "menzerath", version, about = "Clause-length statistics and Menzerath-Altmann fits for Ukrainian text")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Split raw text into sentences, writing vertical format.
    Segment {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Count words, syllables and clauses per sentence and build the table.
    Analyze {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Tagged)]
        mode: Mode,
        /// Predicative word list, one word per line
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MeanArg::Pooled)]
        mean: MeanArg,
        #[command(flatten)]
        common: Common,
    },
    /// Fit the clause-length curves and the sentence distribution.
    Fit {
        table: PathBuf,
        #[arg(long, value_enum, default_value_t = WeightingArg::Count)]
        weighting: WeightingArg,
        #[arg(long, value_enum, default_value_t = NegBinMethodArg::Ls)]
        negbin_method: NegBinMethodArg,
        #[command(flatten)]
        common: Common,
    },
    /// Compare gold clause counts with automatic ones.
    Evaluate {
        /// Automatic per-sentence TSV (from `analyze`)
        auto: PathBuf,
        /// Gold per-sentence TSV with `index` and `clauses` columns
        #[arg(long)]
        gold: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print a table with observed and, optionally, estimated columns.
    Report {
        table: PathBuf,
        /// Add estimated columns from fresh fits
        #[arg(long)]
        estimated: bool,
        #[arg(long, value_enum, default_value_t = WeightingArg::Count)]
        weighting: WeightingArg,
        #[arg(long, value_enum, default_value_t = NegBinMethodArg::Ls)]
        negbin_method: NegBinMethodArg,
        #[command(flatten)]
        common: Common,
    },
}

fn config(inputs: Vec<PathBuf>, common: Common) -> RunConfig {
    let mut c = RunConfig::new(inputs);
    c.out = common.out;
    c.format = common.format;
    c
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Segment { inputs, common } => commands::cmd_segment(&config(inputs, common)),
        Command::Analyze {
            inputs,
            mode,
            lexicon,
            mean,
            common,
        } => {
            let mut c = config(inputs, common);
            c.mode = mode;
            c.lexicon = lexicon;
            commands::cmd_analyze(&c, mean.into()).map(drop)
        }
        Command::Fit {
            table,
            weighting,
            negbin_method,
            common,
        } => {
            let mut c = config(Vec::new(), common);
            c.weighting = weighting;
            commands::cmd_fit(&table, &c, negbin_method.into()).map(drop)
        }
        Command::Evaluate { auto, gold, common } => commands::cmd_evaluate(&config(vec![auto], common), &gold).map(drop),
        Command::Report {
            table,
            estimated,
            weighting,
            negbin_method,
            common,
        } => {
            let mut c = config(Vec::new(), common);
            c.weighting = weighting;
            commands::cmd_report(&table, &c, estimated, negbin_method.into()).map(drop)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
