use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser};

use filmfdi::cli::{run_subcommand, Options, Subcommand};
use filmfdi::scenario::load_scenario;
use filmfdi::table::ResultTable;
use filmfdi::Error;

/// Thin-film deposition and FDI scenario calculator.
///
/// Exit status: 0 success, 1 usage error, 2 scenario error, 3 numerical
/// failure.
#[derive(Debug, Parser)]
#[command(name = "filmfdi", version)]
enum Cli {
    /// Kinetic rates for every source/support pair.
    Rates(Common),
    /// Thickness rates over a grid of lateral offsets.
    Profile {
        #[command(flatten)]
        common: Common,
        /// Comma-separated lateral offsets, cm.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        offsets: Vec<f64>,
    },
    /// Mass rate deposited on each (circular) support.
    Mass(Common),
    /// Support masses from source masses through the transfer matrix.
    Forward(Common),
    /// Non-negative source masses reproducing the target support masses.
    Solve(Common),
    /// Fit the transfer matrix to the observations.
    Calibrate(Common),
    /// Rank investment locations.
    FdiRank {
        #[command(flatten)]
        common: Common,
        /// Drop locations whose investment value is negative.
        #[arg(long)]
        filter_negative_value: bool,
    },
    /// Required capital transfer velocity per location.
    FdiVelocity(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (JSON, version 1).
    #[arg(long)]
    scenario: PathBuf,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a rounded, aligned table to stdout.
    #[arg(long)]
    pretty: bool,
}

fn split(cli: Cli) -> (Subcommand, Common, Options) {
    let plain = |c| (c, Options::default());
    let (cmd, (common, options)) = match cli {
        Cli::Rates(c) => (Subcommand::Rates, plain(c)),
        Cli::Profile { common, offsets } => (
            Subcommand::Profile,
            (
                common,
                Options {
                    offsets: Some(offsets),
                    ..Options::default()
                },
            ),
        ),
        Cli::Mass(c) => (Subcommand::Mass, plain(c)),
        Cli::Forward(c) => (Subcommand::Forward, plain(c)),
        Cli::Solve(c) => (Subcommand::Solve, plain(c)),
        Cli::Calibrate(c) => (Subcommand::Calibrate, plain(c)),
        Cli::FdiRank {
            common,
            filter_negative_value,
        } => (
            Subcommand::FdiRank,
            (
                common,
                Options {
                    filter_negative_value,
                    ..Options::default()
                },
            ),
        ),
        Cli::FdiVelocity(c) => (Subcommand::FdiVelocity, plain(c)),
    };
    (cmd, common, options)
}

fn emit(table: &ResultTable, common: &Common) -> Result<(), Error> {
    let stdout = io::stdout();
    if let Some(path) = &common.out {
        let io_err = |source| Error::Io {
            path: path.display().to_string(),
            source,
        };
        let file = File::create(path).map_err(io_err)?;
        let mut w = BufWriter::new(file);
        table.write_csv(&mut w)?;
        w.flush().map_err(io_err)?;
    } else if !common.pretty {
        table.write_csv(stdout.lock())?;
    }
    if common.pretty {
        let mut lock = stdout.lock();
        lock.write_all(table.to_pretty().as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let (cmd, common, options) = split(cli);
    let result = load_scenario(&common.scenario)
        .and_then(|scenario| run_subcommand(cmd, &scenario, &options))
        .and_then(|table| emit(&table, &common));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("filmfdi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
