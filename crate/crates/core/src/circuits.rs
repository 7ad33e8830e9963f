//! Circuits, the benchmark circuit families and the JSON circuit format.
//!
//! ```json
//! {"version": 1, "num_qubits": 4, "seed": 7, "layer_marks": [7],
//!  "gates": [{"name": "rx", "qubits": [1], "params": [0.3]}, ...]}
//! ```
//!
//! Qubits are 1-based. `layer_marks[i]` is the number of gates applied when
//! layer `i` (a Trotter step or ansatz layer) is complete.
//!
//! Random angles come from ChaCha20 keyed with the seed (little-endian in the
//! first eight key bytes, remaining bytes zero), using the gate index as the
//! stream id. Each angle consumes one 64-bit word `w` and equals
//! `-π + 2π · (w >> 11) · 2⁻⁵³`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{GateKind, GateOp};
use crate::mps::InitialState;

pub const IR_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<GateOp>,
    pub layer_marks: Vec<usize>,
    pub seed: Option<u64>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new(), layer_marks: Vec::new(), seed: None }
    }

    pub fn push(&mut self, gate: GateOp) {
        self.gates.push(gate);
    }

    /// Closes the current layer at the present gate count.
    pub fn mark_layer(&mut self) {
        self.layer_marks.push(self.gates.len());
    }

    pub fn num_layers(&self) -> usize {
        self.layer_marks.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 {
            return Err(Error::Circuit("circuit needs at least one qubit".into()));
        }
        for (i, g) in self.gates.iter().enumerate() {
            g.validate(self.num_qubits).map_err(|e| Error::Circuit(format!("gate #{i} ({}): {e}", g.kind)))?;
        }
        if self.layer_marks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Circuit("layer_marks must be strictly increasing".into()));
        }
        if let Some(&last) = self.layer_marks.last() {
            if last > self.gates.len() {
                return Err(Error::Circuit(format!("layer mark {last} beyond {} gates", self.gates.len())));
            }
        }
        Ok(())
    }

    /// Number of gates of each kind.
    pub fn gate_counts(&self) -> HashMap<GateKind, usize> {
        let mut counts = HashMap::new();
        for g in &self.gates {
            *counts.entry(g.kind).or_insert(0) += 1;
        }
        counts
    }

    pub fn to_json(&self) -> Result<String> {
        let ir = CircuitIr {
            version: IR_VERSION,
            num_qubits: self.num_qubits,
            seed: self.seed,
            layer_marks: self.layer_marks.clone(),
            gates: self
                .gates
                .iter()
                .map(|g| GateIr { name: g.kind.name().to_string(), qubits: g.qubits.clone(), params: g.params.clone() })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&ir)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ir: CircuitIr = serde_json::from_str(text)?;
        if ir.version != IR_VERSION {
            return Err(Error::Circuit(format!("unsupported circuit version {}", ir.version)));
        }
        let mut gates = Vec::with_capacity(ir.gates.len());
        for (i, g) in ir.gates.into_iter().enumerate() {
            let kind = GateKind::from_name(&g.name).ok_or_else(|| Error::Circuit(format!("gate #{i}: unknown gate name '{}'", g.name)))?;
            let op = GateOp { kind, qubits: g.qubits, params: g.params };
            op.validate(ir.num_qubits).map_err(|e| Error::Circuit(format!("gate #{i} ({}): {e}", g.name)))?;
            gates.push(op);
        }
        let circuit = Self { num_qubits: ir.num_qubits, gates, layer_marks: ir.layer_marks, seed: ir.seed };
        circuit.validate()?;
        Ok(circuit)
    }
}

pub fn load_circuit(path: impl AsRef<Path>) -> Result<Circuit> {
    Circuit::from_json(&std::fs::read_to_string(path)?)
}

pub fn save_circuit(circuit: &Circuit, path: impl AsRef<Path>) -> Result<()> {
    let mut text = circuit.to_json()?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitIr {
    version: u32,
    num_qubits: usize,
    seed: Option<u64>,
    layer_marks: Vec<usize>,
    gates: Vec<GateIr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateIr {
    name: String,
    qubits: Vec<usize>,
    params: Vec<f64>,
}

// ---------------------------------------------------------------------------
// seeded angles

#[derive(Clone, Copy, Debug)]
pub struct AngleSource {
    seed: u64,
}

impl AngleSource {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// `count` angles in `[-π, π)` for the gate at `gate_index`.
    pub fn angles(&self, gate_index: usize, count: usize) -> Vec<f64> {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(gate_index as u64);
        (0..count)
            .map(|_| {
                let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                -PI + 2.0 * PI * u
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// builders

/// Nearest-neighbour pairs `(i, i+1)` with `i` odd (`parity = 0`, the 0-based
/// even-odd layer) or `i` even (`parity = 1`).
pub fn brickwork_pairs(num_qubits: usize, parity: usize) -> Vec<(usize, usize)> {
    (1 + parity..num_qubits).step_by(2).map(|i| (i, i + 1)).collect()
}

/// Trotterized XXX Heisenberg chain with a longitudinal field.
///
/// Each step applies `exp(-i dt h Z)` on every qubit, then the `ZZ`, `XX` and
/// `YY` couplings `exp(-i dt J P⊗P)` on the even-odd and odd-even pairs, plus
/// the `(N, 1)` pair when `periodic`.
pub fn heisenberg_1d(n: usize, j: f64, h: f64, dt: f64, steps: usize, periodic: bool) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Circuit(format!("Heisenberg chain needs N >= 2, got {n}")));
    }
    if periodic && n < 3 {
        return Err(Error::Circuit("periodic Heisenberg chain needs N >= 3".into()));
    }
    let mut c = Circuit::new(n);
    let coupling = 2.0 * dt * j;
    for _ in 0..steps {
        for q in 1..=n {
            c.push(GateOp::rz(q, 2.0 * dt * h));
        }
        for make in [GateOp::rzz, GateOp::rxx, GateOp::ryy] {
            for parity in [0, 1] {
                for (a, b) in brickwork_pairs(n, parity) {
                    c.push(make(a, b, coupling));
                }
            }
            if periodic {
                c.push(make(n, 1, coupling));
            }
        }
        c.mark_layer();
    }
    Ok(c)
}

/// Serpentine embedding of a `rows × cols` grid into a chain: even rows run
/// left to right, odd rows right to left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsingGrid {
    pub rows: usize,
    pub cols: usize,
}

impl IsingGrid {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Circuit(format!("degenerate {rows}x{cols} grid")));
        }
        Ok(Self { rows, cols })
    }

    pub fn num_sites(&self) -> usize {
        self.rows * self.cols
    }

    /// 1-based chain index of grid cell `(row, col)` (0-based coordinates).
    pub fn snake_index(&self, row: usize, col: usize) -> usize {
        let offset = if row % 2 == 0 { col } else { self.cols - 1 - col };
        row * self.cols + offset + 1
    }

    /// Horizontal bonds, even-odd then odd-even within every row.
    pub fn horizontal_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for parity in [0, 1] {
            for r in 0..self.rows {
                for c in (parity..self.cols.saturating_sub(1)).step_by(2) {
                    out.push(ordered(self.snake_index(r, c), self.snake_index(r, c + 1)));
                }
            }
        }
        out
    }

    /// Vertical bonds, even-odd then odd-even within every column.
    pub fn vertical_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for parity in [0, 1] {
            for c in 0..self.cols {
                for r in (parity..self.rows.saturating_sub(1)).step_by(2) {
                    out.push(ordered(self.snake_index(r, c), self.snake_index(r + 1, c)));
                }
            }
        }
        out
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Trotterized transverse-field Ising model on a snake-mapped grid: per step
/// `exp(-i dt g X)` on every qubit, then `exp(-i dt J Z⊗Z)` on all row pairs
/// followed by all column pairs.
pub fn ising_2d(rows: usize, cols: usize, j: f64, g: f64, dt: f64, steps: usize) -> Result<Circuit> {
    let grid = IsingGrid::new(rows, cols)?;
    let n = grid.num_sites();
    let mut c = Circuit::new(n);
    let horizontal = grid.horizontal_pairs();
    let vertical = grid.vertical_pairs();
    for _ in 0..steps {
        for q in 1..=n {
            c.push(GateOp::rx(q, 2.0 * dt * g));
        }
        for &(a, b) in horizontal.iter().chain(&vertical) {
            c.push(GateOp::rzz(a, b, 2.0 * dt * j));
        }
        c.mark_layer();
    }
    Ok(c)
}

/// QAOA for a 1D Ising cost function with independently drawn angles:
/// per layer `rx` on every qubit, then `rzz` on the even-odd and odd-even
/// pairs.
pub fn qaoa(n: usize, layers: usize, seed: u64) -> Result<Circuit> {
    if n < 2 || layers < 1 {
        return Err(Error::Circuit(format!("QAOA needs N >= 2 and p >= 1, got N={n}, p={layers}")));
    }
    let angles = AngleSource::new(seed);
    let mut c = Circuit::new(n);
    c.seed = Some(seed);
    for _ in 0..layers {
        for q in 1..=n {
            let t = angles.angles(c.gates.len(), 1)[0];
            c.push(GateOp::rx(q, t));
        }
        for parity in [0, 1] {
            for (a, b) in brickwork_pairs(n, parity) {
                let t = angles.angles(c.gates.len(), 1)[0];
                c.push(GateOp::rzz(a, b, t));
            }
        }
        c.mark_layer();
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Entangler {
    #[default]
    Cz,
    Cx,
}

impl FromStr for Entangler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cz" => Ok(Entangler::Cz),
            "cx" | "cnot" => Ok(Entangler::Cx),
            other => Err(Error::InvalidInput(format!("unknown entangler '{other}'"))),
        }
    }
}

/// Hardware-efficient ansatz: per layer a `u3` with fresh angles on every
/// qubit, then entanglers on the even-odd (even layers) or odd-even (odd
/// layers) brickwork pairs.
pub fn hea(n: usize, depth: usize, seed: u64, entangler: Entangler) -> Result<Circuit> {
    if n < 2 || depth < 1 {
        return Err(Error::Circuit(format!("HEA needs N >= 2 and depth >= 1, got N={n}, depth={depth}")));
    }
    let angles = AngleSource::new(seed);
    let mut c = Circuit::new(n);
    c.seed = Some(seed);
    for layer in 0..depth {
        for q in 1..=n {
            let t = angles.angles(c.gates.len(), 3);
            c.push(GateOp::u3(q, t[0], t[1], t[2]));
        }
        for (a, b) in brickwork_pairs(n, layer % 2) {
            c.push(match entangler {
                Entangler::Cz => GateOp::cz(a, b),
                Entangler::Cx => GateOp::cx(a, b),
            });
        }
        c.mark_layer();
    }
    Ok(c)
}

/// The five benchmark families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Heisenberg1d,
    HeisenbergPeriodic,
    Ising2d,
    Qaoa,
    Hea,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Heisenberg1d, Family::HeisenbergPeriodic, Family::Ising2d, Family::Qaoa, Family::Hea];

    pub fn name(self) -> &'static str {
        match self {
            Family::Heisenberg1d => "heisenberg1d",
            Family::HeisenbergPeriodic => "heisenberg1d-periodic",
            Family::Ising2d => "ising2d",
            Family::Qaoa => "qaoa",
            Family::Hea => "hea",
        }
    }

    /// Input state used by the benchmarks: Néel for the spin chains, all
    /// zeros otherwise.
    pub fn default_initial_state(self) -> InitialState {
        match self {
            Family::Heisenberg1d | Family::HeisenbergPeriodic => InitialState::Neel,
            _ => InitialState::Zeros,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .or(match s {
                "heisenberg" => Some(Family::Heisenberg1d),
                "heisenberg-periodic" | "periodic" => Some(Family::HeisenbergPeriodic),
                "ising" => Some(Family::Ising2d),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidInput(format!("unknown circuit family '{s}'")))
    }
}

/// Parameters for [`build_family`]. Model couplings default to the critical
/// point `J = h = g = 1` with `dt = 0.1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    /// Chain length; ignored for `Ising2d`.
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    /// Trotter steps or ansatz layers.
    pub steps: usize,
    pub coupling: f64,
    pub field: f64,
    pub dt: f64,
    pub seed: u64,
    pub entangler: Entangler,
}

impl FamilySpec {
    pub fn new(family: Family, n: usize, steps: usize) -> Self {
        Self { family, n, rows: 1, cols: n, steps, coupling: 1.0, field: 1.0, dt: 0.1, seed: 0, entangler: Entangler::Cz }
    }

    pub fn grid(rows: usize, cols: usize, steps: usize) -> Self {
        Self { rows, cols, ..Self::new(Family::Ising2d, rows * cols, steps) }
    }

    pub fn num_qubits(&self) -> usize {
        match self.family {
            Family::Ising2d => self.rows * self.cols,
            _ => self.n,
        }
    }
}

pub fn build_family(spec: &FamilySpec) -> Result<Circuit> {
    match spec.family {
        Family::Heisenberg1d => heisenberg_1d(spec.n, spec.coupling, spec.field, spec.dt, spec.steps, false),
        Family::HeisenbergPeriodic => heisenberg_1d(spec.n, spec.coupling, spec.field, spec.dt, spec.steps, true),
        Family::Ising2d => ising_2d(spec.rows, spec.cols, spec.coupling, spec.field, spec.dt, spec.steps),
        Family::Qaoa => qaoa(spec.n, spec.steps, spec.seed),
        Family::Hea => hea(spec.n, spec.steps, spec.seed, spec.entangler),
    }
}
