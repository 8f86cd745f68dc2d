mod commands;
mod config;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{read_config_file, Settings};

/// Lift graphs to path, clique and ring complexes and compare them with
/// Weisfeiler-Lehman style refinement or random-weight networks.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 input or parse
/// error, 3 member cap exceeded.
#[derive(Debug, Parser)]
#[command(name = "pathwl", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings that may also come from a config file (same key names).
#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Config file of `key = value` lines; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Path boundaries: `incidence` (truncations plus interior deletions with a skip-edge) or `truncation`
    #[arg(long, global = true, value_name = "MODE")]
    pub boundary_mode: Option<String>,
    /// Maximum number of members a single lift may create
    #[arg(long, global = true, value_name = "N")]
    pub member_cap: Option<String>,
    /// Hidden feature width of the network
    #[arg(long, global = true, value_name = "D")]
    pub hidden_dim: Option<String>,
    /// Length of the network embedding
    #[arg(long, global = true, value_name = "D")]
    pub embed_dim: Option<String>,
    /// Embeddings closer than this are indistinguishable
    #[arg(long, global = true, value_name = "X")]
    pub epsilon: Option<String>,
    /// Network seeds: `0..10`, `3` or `1,4,9`
    #[arg(long, global = true, value_name = "LIST")]
    pub seeds: Option<String>,
    /// Worker threads (0 = one per logical CPU)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<String>,
    /// Output format: text, csv or json
    #[arg(long, global = true, value_name = "FORMAT")]
    pub output_format: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    Auto,
    Graph6,
    Edges,
}

/// How to read a graph file.
#[derive(Debug, Args, Clone)]
pub struct InputArgs {
    /// Input format; `auto` picks graph6 for .g6 files and edge lists for `n <count>` headers
    #[arg(long, value_enum, default_value = "auto")]
    pub format: InputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lift a graph and print per-dimension member counts
    Lift {
        input: PathBuf,
        /// path, simplex or cell
        #[arg(long, default_value = "path")]
        kind: String,
        /// Maximum dimension (path and simplex)
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Maximum ring size (cell)
        #[arg(long, default_value_t = 4)]
        max_ring: usize,
        /// Graph to use from a multi-graph graph6 file
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Write the complex here in PCX v1 format
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[command(flatten)]
        input_args: InputArgs,
    },
    /// Decide whether a method tells two graphs apart
    ///
    /// Network methods report a verdict per seed; the overall verdict is
    /// DISTINGUISHED only when every seed separates the graphs.
    Test {
        graph_a: PathBuf,
        graph_b: PathBuf,
        /// pwl, swl, cwl, wl1, pcn or cwn
        #[arg(long, default_value = "pwl")]
        method: String,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        #[arg(long, default_value_t = 4)]
        max_ring: usize,
        /// Message-passing layers (network methods)
        #[arg(long, default_value_t = 4)]
        layers: usize,
        /// reduced or full refinement signatures
        #[arg(long, default_value = "reduced")]
        rule: String,
        #[arg(long, default_value_t = 0)]
        index_a: usize,
        #[arg(long, default_value_t = 0)]
        index_b: usize,
        /// Print both stable colour histograms
        #[arg(long)]
        dump_histograms: bool,
        #[command(flatten)]
        input_args: InputArgs,
    },
    /// Failure rates over strongly regular graph families
    Bench {
        /// Manifest of `name path n k lambda mu` lines
        manifest: PathBuf,
        /// Comma-separated methods
        #[arg(long, default_value = "pcn,pwl")]
        methods: String,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        #[arg(long, default_value_t = 4)]
        max_ring: usize,
        /// Layer counts for network methods, e.g. `3..=6`
        #[arg(long, default_value = "3..=6")]
        layers: String,
        #[arg(long, default_value = "reduced")]
        rule: String,
        /// Refine pair by pair instead of one joint run per family
        #[arg(long)]
        pairwise: bool,
        /// Directory for report.csv and report.json
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Print the cyclic-shifting families of every ring of a graph
    Families {
        input: PathBuf,
        /// Largest ring considered (default: vertex count)
        #[arg(long)]
        max_ring: Option<usize>,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[command(flatten)]
        input_args: InputArgs,
    },
    /// Time lifting of every graph in the given files
    TimeLift {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "path")]
        kind: String,
        /// Lift sizes to time (max dimension, or ring size for cells), e.g. `2..=6`
        #[arg(long, default_value = "2..=4")]
        sizes: String,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[command(flatten)]
        input_args: InputArgs,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Cap(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
}

fn settings(global: &GlobalArgs) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Some(path) = &global.config {
        for (k, v) in read_config_file(path)? {
            s.set(&k, &v)?;
        }
    }
    let flags = [
        ("boundary-mode", &global.boundary_mode),
        ("member-cap", &global.member_cap),
        ("hidden-dim", &global.hidden_dim),
        ("embed-dim", &global.embed_dim),
        ("epsilon", &global.epsilon),
        ("seeds", &global.seeds),
        ("threads", &global.threads),
        ("output-format", &global.output_format),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            s.set(key, v)?;
        }
    }
    s.validate()?;
    Ok(s)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = settings(&cli.global)?;
    if settings.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(settings.threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    commands::dispatch(cli.command, &settings)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use config::OutputFormat;

    #[test]
    fn flags_cover_config_keys() {
        let cmd = Cli::command();
        let longs: Vec<String> = cmd
            .get_arguments()
            .filter_map(|a| a.get_long().map(str::to_string))
            .collect();
        for key in config::KEYS {
            assert!(longs.iter().any(|l| l == key), "missing flag --{key}");
        }
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("pathwl-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "epsilon = 0.5\nhidden-dim = 8\n").unwrap();
        let cli = Cli::parse_from([
            "pathwl",
            "--config",
            path.to_str().unwrap(),
            "--epsilon",
            "0.25",
            "families",
            "x",
        ]);
        let s = settings(&cli.global).unwrap();
        assert_eq!(s.epsilon, 0.25);
        assert_eq!(s.hidden_dim, 8);
        assert_eq!(s.output_format, OutputFormat::Text);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
