use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sspectra_cli::{run, CliError, Command, Format, GraphSource, RunConfig};

#[derive(Parser)]
#[command(
    name = "sspectra",
    version,
    about = "Superspecial isogeny graphs, spectra, building balls and hash walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Worker threads for graph construction.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<String>,
}

#[derive(Args)]
struct GraphParams {
    #[arg(long)]
    g: u32,
    #[arg(long)]
    l: u64,
    #[arg(long)]
    p: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build Gr_g(l, p) and serialize it.
    Graph {
        #[command(flatten)]
        params: GraphParams,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Spectral report for a built graph or a graph JSON file.
    Spectra {
        #[arg(long, conflicts_with_all = ["g", "l", "p"])]
        graph: Option<String>,
        #[arg(long)]
        g: Option<u32>,
        #[arg(long)]
        l: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Ball around the standard lattice in the special 1-complex S_n.
    Building {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        l: u64,
        #[arg(long, default_value_t = 1)]
        radius: usize,
    },
    /// Hash a hex message by a walk in Gr_1(2, p) or Gr_2(2, p).
    Hash {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "")]
        message: String,
    },
}

fn config(cli: &Cli) -> Result<RunConfig, CliError> {
    let command = match &cli.command {
        Cmd::Graph { params, format } => Command::Graph {
            g: params.g,
            l: params.l,
            p: params.p,
            format: *format,
        },
        Cmd::Spectra {
            graph: Some(path), ..
        } => Command::Spectra {
            source: GraphSource::File(path.clone()),
        },
        Cmd::Spectra {
            graph: None,
            g: Some(g),
            l: Some(l),
            p: Some(p),
        } => Command::Spectra {
            source: GraphSource::Build {
                g: *g,
                l: *l,
                p: *p,
            },
        },
        Cmd::Spectra { .. } => {
            return Err(CliError::Config(
                "spectra needs --graph FILE or all of --g, --l, --p".into(),
            ))
        }
        Cmd::Building { n, l, radius } => Command::Building {
            n: *n,
            l: *l,
            radius: *radius,
        },
        Cmd::Hash { g, p, message } => Command::Hash {
            g: *g,
            p: *p,
            message: message.clone(),
        },
    };
    Ok(RunConfig {
        command,
        threads: cli.threads,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(&cli)
        .and_then(|c| run(&c))
        .and_then(|text| match &cli.output {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| CliError::Io(format!("{path}: {e}")))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sspectra: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
