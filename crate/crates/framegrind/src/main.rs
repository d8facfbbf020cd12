//! framegrind CLI: run the pipeline, benchmark schedules, evaluate scores,
//! print the cost-model table and generate synthetic corpora.
//!
//! Exit codes: 0 success, 2 usage/config error, 3 runtime stage failure.
//! Failures print one JSON error object to stderr. Logging is controlled by
//! `FRAMEGRIND_LOG={error,info,debug}`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use framegrind::cmd::{self, CliError};
use framegrind::pipeline::ClockMode;

#[derive(Parser)]
#[command(name = "framegrind", version, about = "Asynchronous frame-processing pipeline with a smile-detection reference implementation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    Real,
    Sim,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl FormatArg {
    fn as_str(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline over a dataset or a synthetic stream.
    Run {
        /// Dataset directory or manifest file.
        input: Option<PathBuf>,
        /// Pipeline configuration (JSON); defaults to the built-in
        /// reference pipeline.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Generate N synthetic faces instead of reading a dataset.
        #[arg(long, value_name = "N")]
        synthetic: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the config's clock mode.
        #[arg(long, value_enum)]
        clock: Option<ClockArg>,
    },
    /// Benchmark service-time scenarios on the simulated clock.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Compute ACC and AUC from a scores file or a classifier plugin.
    Eval {
        /// Dataset manifest (labels; images in plugin mode).
        manifest: Option<PathBuf>,
        /// Pre-computed path,label,score file.
        #[arg(long, conflicts_with = "plugin")]
        scores: Option<PathBuf>,
        /// Classifier plugin command (first token) and its arguments.
        #[arg(long, num_args = 1.., value_name = "CMD")]
        plugin: Option<Vec<String>>,
        /// Decision threshold for accuracy.
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Print the parameter/FLO table of the modeled architectures.
    Costmodel {
        /// Directory of architecture JSON files; defaults to the shipped
        /// set (MobileNet V1, ResNet-50, VGG-16).
        #[arg(long)]
        archs: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Generate a labeled synthetic face corpus.
    GenCorpus {
        /// Number of faces.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            input,
            config,
            synthetic,
            seed,
            out,
            clock,
        } => cmd::run::cmd_run(&cmd::run::RunOptions {
            config,
            input,
            synthetic,
            seed,
            out,
            clock: clock.map(|c| match c {
                ClockArg::Real => ClockMode::Real,
                ClockArg::Sim => ClockMode::Sim,
            }),
        }),
        Command::Bench {
            config,
            out,
            format,
        } => cmd::bench::cmd_bench(&config, &out, format.as_str()),
        Command::Eval {
            manifest,
            scores,
            plugin,
            threshold,
            out,
            format,
        } => cmd::eval::cmd_eval(&cmd::eval::EvalOptions {
            manifest,
            scores,
            plugin,
            threshold,
            out,
            format: format.as_str().to_string(),
        }),
        Command::Costmodel { archs, out, format } => {
            cmd::costmodel::cmd_costmodel(archs.as_deref(), out.as_deref(), format.as_str())
        }
        Command::GenCorpus { n, seed, out } => cmd::gen_corpus::cmd_gen_corpus(n, seed, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("FRAMEGRIND_LOG")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(cmd::EXIT_USAGE as u8);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
