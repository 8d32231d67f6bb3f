//! `interfgeo`: scan the interferometric/Bures metric pullbacks of a
//! two-band thermal insulator over a grid of band parameters and
//! temperatures.

mod config;
mod output;
mod svg;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use config::{PartialConfig, ScanConfig};
use interfgeo::pullback::{chern_number, metric_scan, MetricSample};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "interfgeo", version, about = "mixed-state metric scans for two-band insulators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan metric pullbacks over an (M, T) grid and write CSV/JSON/SVG.
    Scan(ScanArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// Config file in key = value form; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in model name (dirac).
    #[arg(long)]
    model: Option<String>,
    /// Band-parameter range min:max:steps, endpoints inclusive.
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    /// Temperature range min:max:steps, endpoints inclusive (T > 0).
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Brillouin-zone grid cells per axis (odd, >= 3).
    #[arg(long)]
    bz: Option<usize>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON output path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Optional SVG output prefix (writes `<prefix>_interf_heatmap.svg`,
    /// `<prefix>_bures_heatmap.svg`, `<prefix>_cuts.svg`).
    #[arg(long)]
    svg: Option<String>,
    /// Add a per-M lattice Chern number column.
    #[arg(long)]
    emit_chern: bool,
    /// Also scan at grid 2N+1 and write a `<out>.conv.csv` companion table.
    #[arg(long)]
    emit_convergence_pair: bool,
    /// Reserved for sampling-based diagnostics; recorded, not used by scans.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scan(args) => run_scan(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn run_scan(args: ScanArgs) -> Result<()> {
    let flags = PartialConfig {
        model: args.model,
        m: args.m,
        t: args.t,
        bz: args.bz,
        out: args.out,
        json: args.json,
        svg: args.svg,
        emit_chern: args.emit_chern.then_some(true),
        emit_convergence_pair: args.emit_convergence_pair.then_some(true),
        seed: args.seed,
    };
    let cfg = config::resolve(flags, args.config.as_deref())?;
    execute(&cfg)
}

fn execute(cfg: &ScanConfig) -> Result<()> {
    let model = interfgeo::bandmodels::by_name(&cfg.model)
        .ok_or_else(|| anyhow!("unknown model {:?}", cfg.model))?;
    let m_values = cfg.m.values();
    let t_values = cfg.t.values();
    let samples = metric_scan(&model, &m_values, &t_values, cfg.bz);

    let chern: Option<Vec<Option<i64>>> = cfg.emit_chern.then(|| {
        let per_m: Vec<Option<i64>> = m_values
            .iter()
            .map(|&m| chern_number(&model, m, cfg.bz).ok())
            .collect();
        samples
            .iter()
            .map(|s| {
                let idx = m_values.iter().position(|&m| m == s.m).unwrap();
                per_m[idx]
            })
            .collect()
    });

    output::write_csv(&cfg.out, &samples, chern.as_deref())?;
    if let Some(json_path) = &cfg.json {
        output::write_json(json_path, &samples, chern.as_deref(), cfg.seed)?;
    }
    if let Some(prefix) = &cfg.svg {
        svg::write_heatmap(
            &PathBuf::from(format!("{prefix}_interf_heatmap.svg")),
            &samples,
            |s: &MetricSample| s.g_interf.total,
            "interferometric metric total over (M, T)",
        )?;
        svg::write_heatmap(
            &PathBuf::from(format!("{prefix}_bures_heatmap.svg")),
            &samples,
            |s: &MetricSample| s.g_bures.total,
            "Bures metric total over (M, T)",
        )?;
        svg::write_line_cuts(&PathBuf::from(format!("{prefix}_cuts.svg")), &samples)?;
    }
    if cfg.emit_convergence_pair {
        let refined = metric_scan(&model, &m_values, &t_values, 2 * cfg.bz + 1);
        let conv_path = cfg.out.with_extension("conv.csv");
        output::write_convergence_csv(&conv_path, &samples, &refined)?;
    }
    Ok(())
}
