use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use catxai::commands::{self, Failure, RunArgs, TrainArgs};
use catxai_core::laws::{LawConfig, Suite};
use clap::{Parser, Subcommand, ValueEnum};

/// String diagrams for learning agents: typecheck, compare, run, train,
/// classify explainers and check laws.
#[derive(Parser)]
#[command(name = "catxai", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Typecheck every term of a DSL file
    Check { file: PathBuf },
    /// Print the normal form of a term
    Normalize { file: PathBuf, term: String },
    /// Exit 0 iff two terms are equal as string diagrams
    Eq { file: PathBuf, left: String, right: String },
    /// Write a term as a Graphviz DOT graph
    Render {
        file: PathBuf,
        term: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a term on a stream of inputs and print the trace
    Run {
        file: PathBuf,
        term: String,
        /// random, perceptron or step-varying
        #[arg(long)]
        translator: Option<String>,
        /// one input per line
        #[arg(long)]
        inputs: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train the observable agent and report its final accuracy
    Train {
        #[arg(long, default_value = "perceptron")]
        translator: String,
        /// lines `label L input X1 X2`; a separable set is generated when absent
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Print the taxonomy labels of an explainer spec
    Classify { spec: PathBuf },
    /// Institution checks
    Institution {
        #[command(subcommand)]
        command: InstitutionCommand,
    },
    /// Run law suites; exit 0 iff every law holds
    Laws {
        #[arg(long, value_enum)]
        suite: Option<SuiteArg>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// translators or instances per law
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
    /// Print the XLearn agent as a DSL document
    Agent {
        #[arg(long, value_enum, default_value_t = Variant::Abstract)]
        variant: Variant,
    },
}

#[derive(Subcommand)]
enum InstitutionCommand {
    /// Check the satisfaction condition for a signature morphism
    Check {
        sig: PathBuf,
        morph: PathBuf,
        /// target signature; defaults to the morphism's image
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        exhaustive_depth: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Category,
    Monoidal,
    Cartesian,
    Feedback,
    Streams,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Category => Suite::Category,
            SuiteArg::Monoidal => Suite::Monoidal,
            SuiteArg::Cartesian => Suite::Cartesian,
            SuiteArg::Feedback => Suite::Feedback,
            SuiteArg::Streams => Suite::Streams,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Abstract,
    Observable,
}

fn color_enabled() -> bool {
    match std::env::var("CATXAI_COLOR").as_deref() {
        Ok("1") => true,
        Ok("0") => false,
        _ => io::stderr().is_terminal(),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Check { file } => commands::check(out, &file),
        Command::Normalize { file, term } => commands::normalize_term(out, &file, &term),
        Command::Eq { file, left, right } => commands::eq(out, &file, &left, &right),
        Command::Render { file, term, output } => commands::render(out, &file, &term, output.as_deref()),
        Command::Run { file, term, translator, inputs, steps, seed } => commands::run(
            out,
            &RunArgs {
                file: &file,
                term: &term,
                translator: translator.as_deref(),
                inputs: inputs.as_deref(),
                steps,
                seed,
            },
        ),
        Command::Train { translator, data, steps, seed, samples } => {
            commands::train(out, &TrainArgs { translator: &translator, data: data.as_deref(), steps, seed, samples })
        }
        Command::Classify { spec } => commands::classify_spec(out, &spec),
        Command::Institution { command: InstitutionCommand::Check { sig, morph, target, exhaustive_depth } } => {
            commands::institution_check(out, &sig, &morph, target.as_deref(), exhaustive_depth)
        }
        Command::Laws { suite, seed, samples, steps } => {
            let cfg = LawConfig { seed, samples, steps, ..LawConfig::default() };
            commands::laws(out, suite.map(Suite::from), &cfg)
        }
        Command::Agent { variant } => commands::agent(out, matches!(variant, Variant::Observable)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match dispatch(cli, &mut out) {
        Ok(code) => code,
        Err(f) => {
            let _ = out.flush();
            eprintln!("{}", f.render(color_enabled()));
            f.exit
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
