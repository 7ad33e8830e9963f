//! Shared circuit driver for both engines.

use std::time::Instant;

use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::gates::{pauli, GateOp};
use crate::metrics::{cube_sum, StepMetrics};
use crate::mps::Mps;

/// What a single gate application did to the state.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GateReport {
    /// Sum over all SVDs of the discarded weight, relative to the block norm.
    pub discarded_weight: f64,
    /// Routing SWAPs inserted to make the gate nearest-neighbour.
    pub swaps: usize,
}

impl GateReport {
    pub fn absorb(&mut self, other: &GateReport) {
        self.discarded_weight += other.discarded_weight;
        self.swaps += other.swaps;
    }
}

pub trait Engine {
    fn name(&self) -> &'static str;
    fn chi_max(&self) -> usize;
    fn s_max(&self) -> f64;
    fn apply_gate(&self, psi: &mut Mps, gate: &GateOp) -> Result<GateReport>;
}

/// Observables recorded alongside the bond profile at every layer mark.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Probes {
    /// Left site `c` of the `⟨X_c X_{c+1}⟩` correlator; `None` means `⌊N/2⌋`.
    pub correlator_site: Option<usize>,
    /// Record the largest per-gate change of the norm.
    pub track_norm: bool,
}

impl Probes {
    pub fn correlator_site_for(&self, num_sites: usize) -> usize {
        self.correlator_site.unwrap_or(num_sites / 2)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub state: Mps,
    pub metrics: Vec<StepMetrics>,
    pub swap_count: usize,
    pub discarded_weight_cum: f64,
    /// `max_g |‖ψ_g‖ − ‖ψ_{g−1}‖|`, if tracked.
    pub max_norm_drift: Option<f64>,
    pub wall_time_ms: f64,
}

pub fn center_correlator(psi: &Mps, site: usize) -> f64 {
    if site == 0 || site >= psi.num_sites() {
        return f64::NAN;
    }
    psi.expectation_two_site(site, &pauli::x(), &pauli::x()).unwrap_or(f64::NAN)
}

/// Applies the gates in order, recording metrics whenever a layer mark is
/// reached.
pub fn run_circuit<E: Engine + ?Sized>(engine: &E, circuit: &Circuit, psi0: &Mps, probes: &Probes) -> Result<RunOutput> {
    if circuit.num_qubits != psi0.num_sites() {
        return Err(Error::InvalidInput(format!("circuit has {} qubits, state has {} sites", circuit.num_qubits, psi0.num_sites())));
    }
    circuit.validate()?;
    let start = Instant::now();
    let mut psi = psi0.clone();
    let mut metrics = Vec::with_capacity(circuit.num_layers());
    let mut marks = circuit.layer_marks.iter().peekable();
    let mut total = GateReport::default();
    let mut drift: Option<f64> = probes.track_norm.then_some(0.0);
    let mut norm = if probes.track_norm { psi.norm() } else { 0.0 };
    let corr_site = probes.correlator_site_for(psi.num_sites());

    let record = |psi: &Mps, total: &GateReport, metrics: &mut Vec<StepMetrics>| {
        let bond_dims = psi.bond_dims();
        metrics.push(StepMetrics {
            step: metrics.len() + 1,
            cost: cube_sum(&bond_dims),
            bond_dims,
            correlator: center_correlator(psi, corr_site),
            discarded_weight_cum: total.discarded_weight,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    };

    while marks.peek() == Some(&&0) {
        marks.next();
        record(&psi, &total, &mut metrics);
    }
    for (i, gate) in circuit.gates.iter().enumerate() {
        let report = engine.apply_gate(&mut psi, gate).map_err(|e| Error::Circuit(format!("gate #{i} ({}): {e}", gate.kind)))?;
        total.absorb(&report);
        if let Some(d) = drift.as_mut() {
            let next = psi.norm();
            *d = d.max((next - norm).abs());
            norm = next;
        }
        while marks.peek() == Some(&&(i + 1)) {
            marks.next();
            record(&psi, &total, &mut metrics);
        }
    }
    Ok(RunOutput {
        state: psi,
        metrics,
        swap_count: total.swaps,
        discarded_weight_cum: total.discarded_weight,
        max_norm_drift: drift,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
