//! Baseline engine: contract each two-qubit gate into the merged pair and
//! truncate with an SVD. Long-range gates go through a SWAP network.

use num_complex::Complex64 as C64;

use crate::circuits::Circuit;
use crate::engine::{run_circuit, Engine, GateReport, Probes, RunOutput};
use crate::error::{Error, Result};
use crate::gates::{gate_unitary, gate_unitary_ascending, swap_matrix, GateOp};
use crate::linalg::{self, DenseMatrix, TruncationReport};
use crate::mps::Mps;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TebdConfig {
    pub s_max: f64,
    pub chi_max: usize,
    pub record_metrics: bool,
}

impl Default for TebdConfig {
    fn default() -> Self {
        Self { s_max: 1e-12, chi_max: usize::MAX, record_metrics: true }
    }
}

impl TebdConfig {
    pub fn new(s_max: f64, chi_max: usize) -> Result<Self> {
        let cfg = Self { s_max, chi_max, record_metrics: true };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_max >= 0.0) || !self.s_max.is_finite() {
            return Err(Error::InvalidInput(format!("s_max must be finite and >= 0, got {}", self.s_max)));
        }
        if self.chi_max < 1 {
            return Err(Error::InvalidInput("chi_max must be >= 1".into()));
        }
        Ok(())
    }
}

fn check_two_site_unitary(psi: &Mps, u: &DenseMatrix) -> Result<()> {
    let d = psi.local_dim();
    if u.shape() != (d * d, d * d) {
        return Err(Error::InvalidInput(format!("two-site gate must be {0}x{0}", d * d)));
    }
    linalg::ensure_finite(u, "two-site gate")?;
    let deviation = linalg::unitarity_deviation(u);
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// `θ'[a, q1 q2, c] = Σ u[(q1 q2), (p1 p2)] θ[a, p1 p2, c]` on the
/// `(left·d) × (d·right)` merged matrix.
fn apply_to_pair(theta: &DenseMatrix, u: &DenseMatrix, left: usize, d: usize) -> DenseMatrix {
    let right = theta.ncols() / d;
    let mut out = DenseMatrix::zeros(theta.nrows(), theta.ncols());
    let zero = C64::new(0.0, 0.0);
    for c in 0..right {
        for (row, (q1, q2)) in (0..d).flat_map(|q1| (0..d).map(move |q2| (q1, q2))).enumerate() {
            for (col, (p1, p2)) in (0..d).flat_map(|p1| (0..d).map(move |p2| (p1, p2))).enumerate() {
                let w = u[(row, col)];
                if w == zero {
                    continue;
                }
                for a in 0..left {
                    out[(a + left * q1, q2 + d * c)] += w * theta[(a + left * p1, p2 + d * c)];
                }
            }
        }
    }
    out
}

/// Applies `u` (lower site most significant) to sites `i, i+1` (0-based)
/// and leaves the center on the right site if `center_right`.
fn apply_pair(psi: &mut Mps, i: usize, u: &DenseMatrix, cfg: &TebdConfig, center_right: bool) -> Result<TruncationReport> {
    if psi.center_idx() != Some(i) && psi.center_idx() != Some(i + 1) {
        psi.shift_center_idx(i);
    }
    let left = psi.tensors()[i].left_dim();
    let theta = apply_to_pair(&psi.merge_pair(i), u, left, psi.local_dim());
    psi.split_pair(i, &theta, cfg.s_max, cfg.chi_max, center_right)
}

/// Applies the two-site unitary `u` to sites `site, site+1` and truncates
/// the bond. The center ends on `site + 1`.
pub fn apply_nn_gate(psi: &mut Mps, site: usize, u: &DenseMatrix, cfg: &TebdConfig) -> Result<TruncationReport> {
    cfg.validate()?;
    psi.check_site(site)?;
    if site >= psi.num_sites() {
        return Err(Error::InvalidInput(format!("no site to the right of {site}")));
    }
    check_two_site_unitary(psi, u)?;
    apply_pair(psi, site - 1, u, cfg, true)
}

/// Applies `u` on qubits `k < kq` by moving qubit `k` next to `kq` with
/// `kq − k − 1` SWAPs, applying `u`, and swapping back. Every SVD along the
/// way is truncated.
pub fn apply_long_range_gate(psi: &mut Mps, k: usize, kq: usize, u: &DenseMatrix, cfg: &TebdConfig) -> Result<GateReport> {
    cfg.validate()?;
    psi.check_site(k)?;
    psi.check_site(kq)?;
    if kq <= k {
        return Err(Error::InvalidInput(format!("long-range gate needs k < k+q, got ({k}, {kq})")));
    }
    check_two_site_unitary(psi, u)?;
    let swap = swap_matrix();
    let mut report = GateReport::default();
    let (i, j) = (k - 1, kq - 1);
    for s in i..j - 1 {
        report.discarded_weight += apply_pair(psi, s, &swap, cfg, true)?.discarded_weight;
        report.swaps += 1;
    }
    let back_left = j > i + 1;
    report.discarded_weight += apply_pair(psi, j - 1, u, cfg, !back_left)?.discarded_weight;
    for s in (i..j - 1).rev() {
        report.discarded_weight += apply_pair(psi, s, &swap, cfg, false)?.discarded_weight;
        report.swaps += 1;
    }
    Ok(report)
}

/// Applies any circuit gate with the TEBD rules.
pub fn apply_gate_tebd(psi: &mut Mps, gate: &GateOp, cfg: &TebdConfig) -> Result<GateReport> {
    gate.validate(psi.num_sites())?;
    if !gate.is_two_qubit() {
        psi.apply_single_qubit_gate(gate.qubits[0], &gate_unitary(gate), true)?;
        return Ok(GateReport::default());
    }
    let (k, kq) = gate.span();
    let u = gate_unitary_ascending(gate);
    if kq == k + 1 {
        let r = apply_nn_gate(psi, k, &u, cfg)?;
        Ok(GateReport { discarded_weight: r.discarded_weight, swaps: 0 })
    } else {
        apply_long_range_gate(psi, k, kq, &u, cfg)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TebdEngine {
    pub cfg: TebdConfig,
}

impl Engine for TebdEngine {
    fn name(&self) -> &'static str {
        "tebd"
    }

    fn chi_max(&self) -> usize {
        self.cfg.chi_max
    }

    fn s_max(&self) -> f64 {
        self.cfg.s_max
    }

    fn apply_gate(&self, psi: &mut Mps, gate: &GateOp) -> Result<GateReport> {
        apply_gate_tebd(psi, gate, &self.cfg)
    }
}

pub fn run_circuit_tebd(circuit: &Circuit, psi0: &Mps, cfg: &TebdConfig, probes: &Probes) -> Result<RunOutput> {
    cfg.validate()?;
    let mut out = run_circuit(&TebdEngine { cfg: *cfg }, circuit, psi0, probes)?;
    if !cfg.record_metrics {
        out.metrics.clear();
    }
    Ok(out)
}
