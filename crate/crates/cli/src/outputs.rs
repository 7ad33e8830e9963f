use std::fs;
use std::path::{Path, PathBuf};

use tdvpsim::circuits::Circuit;
use tdvpsim::engine::RunOutput;
use tdvpsim::metrics::{csv_header, feasibility_horizon, RunSummary, StepMetrics, SCHEMA_VERSION};
use tdvpsim::mps::peak_memory_bytes;

use crate::options::{CircuitSource, EngineArgs, EngineKind};
use crate::{memory_cap_bytes, CliResult, Failure};

pub fn write_metrics_csv(path: &Path, num_sites: usize, metrics: &[StepMetrics]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(csv_header(num_sites))?;
    for m in metrics {
        w.write_record(m.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn summarize(engine: EngineKind, name: &str, circuit: &Circuit, args: &EngineArgs, out: &RunOutput) -> RunSummary {
    let chi_max = args.chi_max();
    let bond_dims = out.state.bond_dims();
    RunSummary {
        schema_version: SCHEMA_VERSION,
        engine: engine.name().into(),
        circuit: name.into(),
        num_qubits: circuit.num_qubits,
        num_gates: circuit.gates.len(),
        num_layers: circuit.num_layers(),
        chi_max: args.chi_max,
        s_max: args.s_max,
        final_norm: out.state.norm(),
        cost: out.state.cost(),
        bond_dims,
        discarded_weight_cum: out.discarded_weight_cum,
        swap_count: out.swap_count,
        feasibility_horizon: feasibility_horizon(&out.metrics, chi_max),
        wall_time_ms: out.wall_time_ms,
    }
}

/// Refuses runs whose worst-case footprint exceeds the configured cap.
pub fn check_memory(num_qubits: usize, chi_max: usize, concurrent: usize) -> CliResult<()> {
    let cap = memory_cap_bytes()?;
    let need = peak_memory_bytes(num_qubits, 2, chi_max).saturating_mul(concurrent as u64);
    if need > cap {
        return Err(Failure::Resource(format!(
            "projected memory {} MB exceeds the cap of {} MB (set {} or lower --chi-max)",
            need >> 20,
            cap >> 20,
            crate::MEM_CAP_ENV
        )));
    }
    Ok(())
}

pub fn cmd_run(source: &CircuitSource, args: &EngineArgs, out_dir: &Path) -> CliResult<()> {
    let loaded = source.load()?;
    let circuit = &loaded.circuit;
    let n = circuit.num_qubits;
    args.tebd_config()?;
    args.tdvp_config()?;
    check_memory(n, args.chi_max(), 1)?;
    let psi0 = args.initial_state(loaded.family, n)?;
    fs::create_dir_all(out_dir)?;

    let mut runs = Vec::new();
    for &kind in args.engine.kinds() {
        let out = args.run(kind, circuit, &psi0)?;
        let stem = format!("{}_{}", loaded.name, kind.name());
        let csv_path: PathBuf = out_dir.join(format!("{stem}.csv"));
        write_metrics_csv(&csv_path, n, &out.metrics)?;
        let summary = summarize(kind, &loaded.name, circuit, args, &out);
        fs::write(out_dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&summary)? + "\n")?;
        println!(
            "{:<5} {} layers, final bonds {:?}, cost {}, norm {:.12}, swaps {}, {:.1} ms -> {}",
            kind.name(),
            out.metrics.len(),
            summary.bond_dims,
            summary.cost,
            summary.final_norm,
            summary.swap_count,
            summary.wall_time_ms,
            csv_path.display()
        );
        runs.push(out);
    }
    if let [tebd, tdvp] = runs.as_slice() {
        let gap = tebd.metrics.iter().zip(&tdvp.metrics).map(|(a, b)| (a.correlator - b.correlator).abs()).fold(0.0, f64::max);
        println!("max |correlator gap| between engines: {gap:.3e}");
    }
    Ok(())
}
