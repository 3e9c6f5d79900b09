mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use miura_core::study::StudyCase;

use crate::config::RunConfig;
use crate::output::{sha256_hex, Manifest, OutputDir};

const DEFAULT_OUTPUT: &str = "miura-out";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Diverged(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] miura_core::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    fn exit_code(&self) -> u8 {
        use miura_core::Error as E;
        match self {
            CliError::Validation(_) => 2,
            CliError::Diverged(_) => 3,
            CliError::Core(E::NotConverged { .. }) => 3,
            CliError::Core(E::Io(_) | E::Json(_)) | CliError::Io { .. } | CliError::Internal(_) => 1,
            // remaining core errors come from bad inputs (non-positive phi, wrong shapes, ...)
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "miura", version, about = "Clifford operator experiments: Miura solver, GP reduction, refinement studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Worker threads for the operator kernels (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory [env: MIURA_OUTPUT_DIR, default: miura-out].
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a JSON config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Refinement study of a named residual.
    Study {
        #[arg(long)]
        case: StudyCase,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        levels: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn output_root(flag: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os("MIURA_OUTPUT_DIR").filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    let (cfg, base, common) = match cli.command {
        Command::Run { config, common } => {
            let text = std::fs::read_to_string(&config).map_err(|e| CliError::io(&config, e))?;
            let cfg = RunConfig::parse(&text, &config)?;
            let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
            (cfg, base, common)
        }
        Command::Study { case, levels, common } => {
            let cfg = commands::study_config(case, levels);
            cfg.validate()?;
            (cfg, PathBuf::new(), common)
        }
    };
    // hash the normalised config so equivalent files share a digest
    let canonical = serde_json::to_vec(&cfg).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut out = OutputDir::create(&output_root(common.output, &cfg))?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Internal(e.to_string()))?;
    let outcome = pool.install(|| commands::execute(&cfg, &base, &mut out))?;

    let manifest = Manifest {
        tool: "miura",
        version: env!("CARGO_PKG_VERSION"),
        core_version: miura_core::VERSION,
        command: cfg.command.name().into(),
        config_sha256: sha256_hex(&canonical),
        seed: cfg.seed,
        grid_hash: cfg.grid.as_ref().map(|g| g.hash()),
        outputs: Vec::new(),
    };
    let root = out.path().to_path_buf();
    out.finish(manifest)?;
    if outcome.diverged {
        return Err(CliError::Diverged(format!(
            "solver did not converge; partial results in {}",
            root.display()
        )));
    }
    Ok(root)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
