use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use memrig::campaign::{
    self, CampaignKind, Dataset, DEFAULT_C2C_CYCLES, DEFAULT_DISTURB_READS,
    DEFAULT_DISTURB_REPEATS, DEFAULT_READ_VOLTAGES_MV,
};
use memrig::report;
use memrig::{CellAddress, Client};
use std::path::{Path, PathBuf};

/// Host-side controller for the crossbar rig.
#[derive(Parser, Debug)]
#[command(name = "memrig", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check connectivity and print the firmware version.
    Connect { endpoint: String },
    /// Run a measurement campaign against a running rig.
    Run {
        #[command(subcommand)]
        campaign: RunCommand,
    },
    /// Render statistics and figures from recorded datasets.
    Report {
        #[command(subcommand)]
        kind: ReportCommand,
    },
}

#[derive(clap::Args, Debug)]
struct RunCommonArgs {
    /// Rig endpoint, host:port.
    #[arg(long)]
    endpoint: String,
    /// Cells: `all` or a `sl,bl[;sl,bl]*` list.
    #[arg(long, default_value = "all")]
    cells: String,
    /// Output directory for the dataset and metadata.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum RunCommand {
    /// Cycle-to-cycle variation: set-read-reset-read per cycle.
    C2c {
        #[command(flatten)]
        common: RunCommonArgs,
        /// Read voltages in mV, comma-separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        voltages: Option<Vec<i16>>,
        #[arg(long, default_value_t = DEFAULT_C2C_CYCLES)]
        cycles: u32,
    },
    /// Read disturb: set, read burst, reset, read burst, repeated.
    ReadDisturb {
        #[command(flatten)]
        common: RunCommonArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        voltages: Option<Vec<i16>>,
        #[arg(long, default_value_t = DEFAULT_DISTURB_READS)]
        reads: u32,
        #[arg(long, default_value_t = DEFAULT_DISTURB_REPEATS)]
        repeats: u32,
    },
    /// Endurance: alternate set/reset until the high state dies.
    Endurance {
        #[command(flatten)]
        common: RunCommonArgs,
        #[arg(long, default_value_t = 10_000)]
        max_cycles: u32,
    },
}

#[derive(Subcommand, Debug)]
enum ReportCommand {
    /// Empirical CDFs of both states per read voltage.
    Cdf {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Read-burst box plots, every 10th read index.
    Boxplot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long)]
        csv: PathBuf,
    },
}

fn parse_cells(spec: &str) -> anyhow::Result<Vec<CellAddress>> {
    if spec == "all" {
        return Ok(CellAddress::all());
    }
    let mut cells = Vec::new();
    for part in spec.split(';') {
        let coords: Vec<&str> = part.split(',').collect();
        if coords.len() != 2 {
            bail!("cell spec `{part}` is not `sl,bl`");
        }
        let sl: u8 = coords[0].trim().parse().context("parsing sl")?;
        let bl: u8 = coords[1].trim().parse().context("parsing bl")?;
        cells.push(CellAddress::new(sl, bl).map_err(|e| anyhow::anyhow!(e.to_string()))?);
    }
    if cells.is_empty() {
        bail!("no cells selected");
    }
    Ok(cells)
}

fn cells_json(cells: &[CellAddress]) -> serde_json::Value {
    serde_json::Value::Array(
        cells
            .iter()
            .map(|c| serde_json::json!({"sl": c.sl, "bl": c.bl}))
            .collect(),
    )
}

fn write_outputs(
    dir: &Path,
    kind: CampaignKind,
    dataset: &Dataset,
    meta: serde_json::Value,
) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let csv_path = dir.join(format!("{}.csv", kind.as_str()));
    dataset
        .export_csv(&csv_path)
        .with_context(|| format!("writing {}", csv_path.display()))?;
    let meta_path = dir.join(format!("{}.meta.json", kind.as_str()));
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
    Ok(csv_path)
}

fn load_dataset(input: &Path, kind: CampaignKind) -> anyhow::Result<Dataset> {
    let path = if input.is_dir() {
        input.join(format!("{}.csv", kind.as_str()))
    } else {
        input.to_path_buf()
    };
    Dataset::import_csv(&path).with_context(|| format!("reading {}", path.display()))
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Connect { endpoint } => {
            let mut client = Client::connect(&endpoint)
                .with_context(|| format!("connecting to {endpoint}"))?;
            let version = client.ping().context("ping")?;
            println!("rig at {endpoint} is up, firmware version {version}");
        }
        Command::Run { campaign: cmd } => run_campaign(cmd)?,
        Command::Report { kind } => run_report(kind)?,
    }
    Ok(())
}

fn run_campaign(cmd: RunCommand) -> anyhow::Result<()> {
    match cmd {
        RunCommand::C2c { common, voltages, cycles } => {
            let cells = parse_cells(&common.cells)?;
            let voltages = voltages.unwrap_or_else(|| DEFAULT_READ_VOLTAGES_MV.to_vec());
            let mut client = Client::connect(&common.endpoint)?;
            let dataset = campaign::run_c2c_campaign(&mut client, &cells, &voltages, cycles)
                .context("cycle-to-cycle campaign")?;
            let meta = serde_json::json!({
                "campaign": "c2c",
                "cells": cells_json(&cells),
                "voltages_mv": voltages,
                "cycles": cycles,
                "note": "one forming per cell; states reprogrammed in place across cycles",
            });
            let path = write_outputs(&common.out, CampaignKind::CycleToCycle, &dataset, meta)?;
            println!(
                "recorded {} reads ({} broken cells) to {}",
                dataset.read_records().count(),
                dataset.broken_cells().len(),
                path.display()
            );
        }
        RunCommand::ReadDisturb { common, voltages, reads, repeats } => {
            let cells = parse_cells(&common.cells)?;
            let voltages = voltages.unwrap_or_else(|| DEFAULT_READ_VOLTAGES_MV.to_vec());
            let mut client = Client::connect(&common.endpoint)?;
            let dataset = campaign::run_read_disturb_campaign(
                &mut client,
                &cells,
                &voltages,
                reads,
                repeats,
            )
            .context("read-disturb campaign")?;
            let meta = serde_json::json!({
                "campaign": "read_disturb",
                "cells": cells_json(&cells),
                "voltages_mv": voltages,
                "reads": reads,
                "repeats": repeats,
                "note": "one forming per cell; states reprogrammed in place across repeats",
            });
            let path = write_outputs(&common.out, CampaignKind::ReadDisturb, &dataset, meta)?;
            println!(
                "recorded {} reads ({} broken cells) to {}",
                dataset.read_records().count(),
                dataset.broken_cells().len(),
                path.display()
            );
        }
        RunCommand::Endurance { common, max_cycles } => {
            let cells = parse_cells(&common.cells)?;
            if cells.len() != 1 {
                bail!("endurance runs on exactly one cell, got {}", cells.len());
            }
            let mut client = Client::connect(&common.endpoint)?;
            let (report, dataset) =
                campaign::run_endurance_campaign(&mut client, cells[0], max_cycles)
                    .context("endurance campaign")?;
            let meta = serde_json::json!({
                "campaign": "endurance",
                "cells": cells_json(&cells),
                "max_cycles": max_cycles,
                "n_cmax_observed": report.n_cmax_observed,
                "broken": report.broken,
                "transient_failures": report.transient_failures,
            });
            if dataset.records.is_empty() {
                println!(
                    "cell {} survived 0 cycles (nothing to record)",
                    cells[0]
                );
            } else {
                let path = write_outputs(&common.out, CampaignKind::Endurance, &dataset, meta)?;
                if report.broken {
                    println!(
                        "cell {} broke at cycle {}; dataset at {}",
                        cells[0],
                        report.n_cmax_observed,
                        path.display()
                    );
                } else {
                    println!(
                        "cell {} survived {} cycles; dataset at {}",
                        cells[0],
                        report.n_cmax_observed,
                        path.display()
                    );
                }
            }
        }
    }
    Ok(())
}

fn run_report(cmd: ReportCommand) -> anyhow::Result<()> {
    match cmd {
        ReportCommand::Cdf { input, svg, csv } => {
            let dataset = load_dataset(&input, CampaignKind::CycleToCycle)?;
            let curves = report::render_cdf(&dataset, &svg)
                .map_err(|e| anyhow::anyhow!(e.to_string()))?;
            report::write_stats_csv(&dataset, &csv)
                .map_err(|e| anyhow::anyhow!(e.to_string()))?;
            println!("rendered {curves} curves to {}", svg.display());
        }
        ReportCommand::Boxplot { input, svg, csv } => {
            let dataset = load_dataset(&input, CampaignKind::ReadDisturb)?;
            let panels = report::render_boxplot(&dataset, 10, &svg)
                .map_err(|e| anyhow::anyhow!(e.to_string()))?;
            report::write_stats_csv(&dataset, &csv)
                .map_err(|e| anyhow::anyhow!(e.to_string()))?;
            println!("rendered {panels} panels to {}", svg.display());
        }
    }
    Ok(())
}
