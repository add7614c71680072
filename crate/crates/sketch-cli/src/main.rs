//! `sketch` — structured output for language models from the command line.
//!
//! Exit codes: 0 ok, 2 usage or input trouble, 3 validation failure,
//! 4 format failure, 5 schema outside the strict-mode subset.

mod backends;
mod commands;
mod errors;
mod settings;
mod wizard;

use clap::{Args, Parser, Subcommand};
use errors::CliError;
use settings::{load_settings, require_seed_in_ci, GlobalArgs, ModeArg};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "sketch",
    version,
    about = "Schema-first task setup, constrained generation, datasets, and evaluation"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List or inspect the task-schema catalog
    Schemas {
        #[command(subcommand)]
        action: SchemasAction,
    },
    /// Create and validate task instance files
    Task {
        #[command(subcommand)]
        action: TaskAction,
    },
    /// Generate structured output for a task instance
    Generate(GenerateArgs),
    /// Build schema-following training data
    Dataset {
        #[command(subcommand)]
        action: DatasetAction,
    },
    /// Score a backend against an eval dataset
    Eval(EvalArgs),
}

#[derive(Subcommand)]
enum SchemasAction {
    /// One line per schema: name, category, required fields
    List,
    /// Full details of one schema
    Show { name: String },
}

#[derive(Subcommand)]
enum TaskAction {
    /// Build a task instance file (interactive form unless --from is given)
    New {
        /// Which task schema the instance follows
        #[arg(long, value_name = "NAME")]
        schema: String,
        /// Validate this document instead of running the form
        #[arg(long, value_name = "FILE")]
        from: Option<PathBuf>,
        /// Where to write the instance file
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Task instance file
    #[arg(long, value_name = "FILE")]
    task: PathBuf,
    /// Input text (one generation)
    #[arg(long, value_name = "TEXT", conflicts_with = "input_file")]
    input: Option<String>,
    /// File of inputs, one per non-empty line
    #[arg(long, value_name = "FILE")]
    input_file: Option<PathBuf>,
    /// Constrained decoding (the default)
    #[arg(long, conflicts_with = "free")]
    strict: bool,
    /// Plain completion with parse + validate afterwards
    #[arg(long)]
    free: bool,
    #[arg(long, value_name = "N", default_value_t = 512)]
    max_tokens: u32,
    /// Free-mode resampling budget
    #[arg(long, value_name = "N", default_value_t = 3)]
    attempts: u32,
    #[arg(long, value_name = "T", default_value_t = 1.0)]
    temperature: f64,
    /// Free mode: accept a JSON value embedded in surrounding prose
    #[arg(long)]
    lenient: bool,
    /// Pretty-print instead of one canonical line
    #[arg(long)]
    pretty: bool,
}

#[derive(Subcommand)]
enum DatasetAction {
    /// Draw structurally distinct random schemas (JSONL of schema documents)
    Schemas {
        #[arg(long, value_name = "N")]
        count: usize,
        /// Output file; stdout when omitted
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "D", default_value_t = 5)]
        max_depth: u32,
        #[arg(long, value_name = "W", default_value_t = 5)]
        max_width: u32,
    },
    /// Build value-selection samples over random schemas
    Samples {
        /// Distinct schemas to draw
        #[arg(long, value_name = "N")]
        schemas: usize,
        /// Samples per schema
        #[arg(long, value_name = "M", default_value_t = 2)]
        per_schema: usize,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[arg(long, value_name = "D", default_value_t = 5)]
        max_depth: u32,
        #[arg(long, value_name = "W", default_value_t = 5)]
        max_width: u32,
    },
    /// Mix task samples with schema-following samples
    Mix {
        /// Task samples to draw
        #[arg(long, value_name = "N")]
        task: usize,
        /// Schema-following samples to draw
        #[arg(long = "sf", value_name = "M")]
        schema_following: usize,
        /// Task pool JSONL (synthesized when omitted)
        #[arg(long, value_name = "FILE")]
        task_pool: Option<PathBuf>,
        /// Schema-following pool JSONL (synthesized when omitted)
        #[arg(long = "sf-pool", value_name = "FILE")]
        schema_following_pool: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[arg(long, value_name = "D", default_value_t = 5)]
        max_depth: u32,
        #[arg(long, value_name = "W", default_value_t = 5)]
        max_width: u32,
    },
}

#[derive(Args)]
struct EvalArgs {
    /// Eval dataset file
    #[arg(long, value_name = "FILE")]
    dataset: PathBuf,
    /// Worker threads (0 = ambient pool)
    #[arg(long, value_name = "N", default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_name = "N", default_value_t = 512)]
    max_tokens: u32,
    #[arg(long, value_name = "N", default_value_t = 3)]
    attempts: u32,
    #[arg(long, value_name = "T", default_value_t = 1.0)]
    temperature: f64,
    #[arg(long)]
    lenient: bool,
    /// Report file
    #[arg(long, value_name = "FILE", default_value = "report.json")]
    report: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("sketch: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = load_settings(&cli.global)?;
    match cli.command {
        Command::Schemas { action } => match action {
            SchemasAction::List => commands::schemas::list(&settings),
            SchemasAction::Show { name } => commands::schemas::show(&settings, &name),
        },
        Command::Task { action } => match action {
            TaskAction::New { schema, from, out } => {
                commands::task::new(&settings, &schema, from.as_deref(), &out)
            }
        },
        Command::Generate(args) => {
            require_seed_in_ci(&settings)?;
            let mode = if args.strict {
                Some(ModeArg::Strict)
            } else if args.free {
                Some(ModeArg::Free)
            } else {
                None
            };
            commands::generate::run(
                &settings,
                &commands::generate::GenerateParams {
                    task: &args.task,
                    input: args.input.as_deref(),
                    input_file: args.input_file.as_deref(),
                    mode,
                    max_tokens: args.max_tokens,
                    attempts: args.attempts,
                    temperature: args.temperature,
                    lenient: args.lenient,
                    pretty: args.pretty,
                },
            )
        }
        Command::Dataset { action } => {
            require_seed_in_ci(&settings)?;
            match action {
                DatasetAction::Schemas {
                    count,
                    out,
                    max_depth,
                    max_width,
                } => commands::dataset::schemas(
                    &settings,
                    count,
                    out.as_deref(),
                    max_depth,
                    max_width,
                ),
                DatasetAction::Samples {
                    schemas,
                    per_schema,
                    out,
                    max_depth,
                    max_width,
                } => commands::dataset::samples(
                    &settings,
                    schemas,
                    per_schema,
                    &out,
                    max_depth,
                    max_width,
                ),
                DatasetAction::Mix {
                    task,
                    schema_following,
                    task_pool,
                    schema_following_pool,
                    out,
                    max_depth,
                    max_width,
                } => commands::dataset::mix_pools(
                    &settings,
                    task,
                    schema_following,
                    task_pool.as_deref(),
                    schema_following_pool.as_deref(),
                    &out,
                    max_depth,
                    max_width,
                ),
            }
        }
        Command::Eval(args) => {
            require_seed_in_ci(&settings)?;
            commands::eval::run(
                &settings,
                &commands::eval::EvalParams {
                    dataset: &args.dataset,
                    workers: args.workers,
                    mode: args.mode,
                    max_tokens: args.max_tokens,
                    attempts: args.attempts,
                    temperature: args.temperature,
                    lenient: args.lenient,
                    report: &args.report,
                },
            )
        }
    }
}
