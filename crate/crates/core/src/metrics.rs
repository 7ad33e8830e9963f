//! Per-layer metrics records and the run summary.
//!
//! CSV columns: `step, chi_1 .. chi_{N-1}, cost, correlator,
//! discarded_weight_cum, wall_time_ms`. `cost` is `Σ χ_j³`, `correlator`
//! is `⟨X_c X_{c+1}⟩` with `c = ⌊N/2⌋`, and `wall_time_ms` is measured from
//! the start of the run.

use serde::{Deserialize, Serialize};

/// Version of the CSV column layout and the summary JSON fields.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    /// 1-based layer number.
    pub step: usize,
    pub bond_dims: Vec<usize>,
    pub cost: u64,
    pub correlator: f64,
    pub discarded_weight_cum: f64,
    pub wall_time_ms: f64,
}

pub fn cube_sum(bond_dims: &[usize]) -> u64 {
    bond_dims.iter().map(|&c| (c as u64).pow(3)).sum()
}

pub fn csv_header(num_sites: usize) -> Vec<String> {
    let mut h = vec!["step".to_string()];
    h.extend((1..num_sites).map(|j| format!("chi_{j}")));
    h.extend(["cost", "correlator", "discarded_weight_cum", "wall_time_ms"].map(String::from));
    h
}

impl StepMetrics {
    pub fn total_bond_dim(&self) -> usize {
        self.bond_dims.iter().sum()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims.iter().copied().max().unwrap_or(1)
    }

    pub fn csv_record(&self) -> Vec<String> {
        let mut r = vec![self.step.to_string()];
        r.extend(self.bond_dims.iter().map(usize::to_string));
        r.push(self.cost.to_string());
        // `{:?}` switches to exponent form for tiny values and still round-trips
        r.push(format!("{:?}", self.correlator));
        r.push(format!("{:?}", self.discarded_weight_cum));
        r.push(format!("{:.3}", self.wall_time_ms));
        r
    }

    /// Inverse of [`StepMetrics::csv_record`]; `None` on malformed rows.
    pub fn from_csv_record(fields: &[&str]) -> Option<Self> {
        if fields.len() < 5 {
            return None;
        }
        let n = fields.len();
        let bond_dims = fields[1..n - 4].iter().map(|f| f.parse().ok()).collect::<Option<Vec<usize>>>()?;
        Some(Self {
            step: fields[0].parse().ok()?,
            bond_dims,
            cost: fields[n - 4].parse().ok()?,
            correlator: fields[n - 3].parse().ok()?,
            discarded_weight_cum: fields[n - 2].parse().ok()?,
            wall_time_ms: fields[n - 1].parse().ok()?,
        })
    }
}

/// First step at which any bond reaches `chi_max`.
pub fn feasibility_horizon(metrics: &[StepMetrics], chi_max: usize) -> Option<usize> {
    metrics.iter().find(|m| m.max_bond_dim() >= chi_max).map(|m| m.step)
}

/// Final-state summary written next to the metrics CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub engine: String,
    pub circuit: String,
    pub num_qubits: usize,
    pub num_gates: usize,
    pub num_layers: usize,
    /// `None` when unbounded.
    pub chi_max: Option<usize>,
    pub s_max: f64,
    pub final_norm: f64,
    pub bond_dims: Vec<usize>,
    pub cost: u64,
    pub discarded_weight_cum: f64,
    pub swap_count: usize,
    pub feasibility_horizon: Option<usize>,
    pub wall_time_ms: f64,
}
