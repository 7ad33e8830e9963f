use std::fs;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use tdvpsim::circuits::{build_family, Family, FamilySpec};
use tdvpsim::engine::RunOutput;
use tdvpsim::metrics::feasibility_horizon;

use crate::options::{spec_label, EngineArgs, EngineKind};
use crate::outputs::{check_memory, write_metrics_csv};
use crate::{CliResult, Failure};

pub const AGGREGATE_HEADER: [&str; 14] = [
    "family",
    "size",
    "num_qubits",
    "step",
    "tebd_total_chi",
    "tdvp_total_chi",
    "tebd_max_chi",
    "tdvp_max_chi",
    "tebd_cost",
    "tdvp_cost",
    "tebd_correlator",
    "tdvp_correlator",
    "feasibility_horizon",
    "tdvp_le_tebd",
];

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// heisenberg1d, heisenberg1d-periodic, ising2d, qaoa or hea.
    #[arg(long, alias = "builder")]
    pub family: Family,
    /// Comma-separated sizes: qubit counts, or `RxC` (or a square side) for
    /// ising2d. An empty list does nothing.
    #[arg(long, value_delimiter = ',', default_value = "")]
    pub sizes: Vec<String>,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub coupling: f64,
    #[arg(long, default_value_t = 1.0)]
    pub field: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Worker threads; each runs independent (family, size) cells.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Aggregate CSV path.
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
    /// Also write the per-engine metrics CSVs of every cell here.
    #[arg(long)]
    pub raw_dir: Option<PathBuf>,
}

fn parse_size(family: Family, text: &str) -> CliResult<(usize, usize)> {
    let bad = || Failure::Input(format!("bad size '{text}' for {family}"));
    match family {
        Family::Ising2d => match text.split_once(['x', 'X']) {
            Some((r, c)) => Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?)),
            None => {
                let side = text.parse().map_err(|_| bad())?;
                Ok((side, side))
            }
        },
        _ => Ok((1, text.parse().map_err(|_| bad())?)),
    }
}

struct Cell {
    size: String,
    spec: FamilySpec,
}

struct CellResult {
    tebd: RunOutput,
    tdvp: RunOutput,
}

fn run_cell(cell: &Cell, args: &BenchArgs) -> CliResult<CellResult> {
    let circuit = build_family(&cell.spec)?;
    let psi0 = args.engine.initial_state(Some(cell.spec.family), circuit.num_qubits)?;
    let tebd = args.engine.run(EngineKind::Tebd, &circuit, &psi0)?;
    let tdvp = args.engine.run(EngineKind::Tdvp, &circuit, &psi0)?;
    if let Some(dir) = &args.raw_dir {
        let label = spec_label(&cell.spec);
        write_metrics_csv(&dir.join(format!("{label}_tebd.csv")), circuit.num_qubits, &tebd.metrics)?;
        write_metrics_csv(&dir.join(format!("{label}_tdvp.csv")), circuit.num_qubits, &tdvp.metrics)?;
    }
    Ok(CellResult { tebd, tdvp })
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    let sizes: Vec<&str> = args.sizes.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
    if sizes.is_empty() {
        return Ok(());
    }
    if args.jobs == 0 {
        return Err(Failure::Input("--jobs must be >= 1".into()));
    }
    args.engine.tebd_config()?;
    args.engine.tdvp_config()?;
    let mut cells = Vec::with_capacity(sizes.len());
    for text in sizes {
        let (rows, cols) = parse_size(args.family, text)?;
        let mut spec = match args.family {
            Family::Ising2d => FamilySpec::grid(rows, cols, args.steps),
            f => FamilySpec::new(f, cols, args.steps),
        };
        spec.dt = args.dt;
        spec.coupling = args.coupling;
        spec.field = args.field;
        spec.seed = args.seed;
        cells.push(Cell { size: text.to_string(), spec });
    }
    let concurrent = args.jobs.min(cells.len());
    let largest = cells.iter().map(|c| c.spec.num_qubits()).max().unwrap_or(0);
    // each worker holds both engines' states of its cell at once
    check_memory(largest, args.engine.chi_max(), 2 * concurrent)?;
    if let Some(dir) = &args.raw_dir {
        fs::create_dir_all(dir)?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Failure::Resource(format!("cannot start worker threads: {e}")))?;
    let results: Vec<CliResult<CellResult>> = pool.install(|| cells.par_iter().map(|c| run_cell(c, args)).collect());

    let chi_max = args.engine.chi_max();
    let mut w = csv::Writer::from_path(&args.out)?;
    w.write_record(AGGREGATE_HEADER)?;
    let mut flagged = Vec::new();
    for (cell, result) in cells.iter().zip(results) {
        let r = result?;
        let horizon = feasibility_horizon(&r.tebd.metrics, chi_max).map(|s| s.to_string()).unwrap_or_default();
        for (a, b) in r.tebd.metrics.iter().zip(&r.tdvp.metrics) {
            let economical = b.total_bond_dim() <= a.total_bond_dim();
            if !economical {
                flagged.push(format!(
                    "{} size {} step {}: tdvp {} > tebd {}",
                    args.family,
                    cell.size,
                    a.step,
                    b.total_bond_dim(),
                    a.total_bond_dim()
                ));
            }
            w.write_record([
                args.family.to_string(),
                cell.size.clone(),
                cell.spec.num_qubits().to_string(),
                a.step.to_string(),
                a.total_bond_dim().to_string(),
                b.total_bond_dim().to_string(),
                a.max_bond_dim().to_string(),
                b.max_bond_dim().to_string(),
                a.cost.to_string(),
                b.cost.to_string(),
                a.correlator.to_string(),
                b.correlator.to_string(),
                horizon.clone(),
                economical.to_string(),
            ])?;
        }
        println!(
            "{} size {}: {} steps, final total chi tebd {} / tdvp {}, tebd horizon {}",
            args.family,
            cell.size,
            r.tebd.metrics.len(),
            r.tebd.metrics.last().map_or(0, |m| m.total_bond_dim()),
            r.tdvp.metrics.last().map_or(0, |m| m.total_bond_dim()),
            if horizon.is_empty() { "none" } else { &horizon }
        );
    }
    w.flush()?;
    for f in &flagged {
        eprintln!("review: {f}");
    }
    Ok(())
}
