//! Gate library: unitaries, product-form generators and identity-padded
//! generator MPOs.
//!
//! Rotation gates follow `U(θ) = exp(-i θ/2 P)`. Every two-qubit gate except
//! SWAP has a generator of the form `c · H_k ⊗ H_{k+q}` with
//! `gate = exp(-i c H_k ⊗ H_{k+q})` exactly (no global phase).

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};

pub mod pauli {
    use super::*;

    fn m2(a: [[C64; 2]; 2]) -> DenseMatrix {
        DenseMatrix::from_fn(2, 2, |r, c| a[r][c])
    }

    const O: C64 = C64::new(0.0, 0.0);
    const ONE: C64 = C64::new(1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);

    pub fn id() -> DenseMatrix {
        m2([[ONE, O], [O, ONE]])
    }

    pub fn x() -> DenseMatrix {
        m2([[O, ONE], [ONE, O]])
    }

    pub fn y() -> DenseMatrix {
        m2([[O, -I], [I, O]])
    }

    pub fn z() -> DenseMatrix {
        m2([[ONE, O], [O, -ONE]])
    }

    pub fn h() -> DenseMatrix {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        m2([[s, s], [s, -s]])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    U3,
    H,
    X,
    Cx,
    Cz,
    Rxx,
    Ryy,
    Rzz,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 12] = [
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::U3,
        GateKind::H,
        GateKind::X,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Rxx,
        GateKind::Ryy,
        GateKind::Rzz,
        GateKind::Swap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::U3 => "u3",
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Rxx => "rxx",
            GateKind::Ryy => "ryy",
            GateKind::Rzz => "rzz",
            GateKind::Swap => "swap",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn num_qubits(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::U3 | GateKind::H | GateKind::X => 1,
            _ => 2,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rxx | GateKind::Ryy | GateKind::Rzz => 1,
            GateKind::U3 => 3,
            GateKind::H | GateKind::X | GateKind::Cx | GateKind::Cz | GateKind::Swap => 0,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One circuit element. Qubits are 1-based; for controlled gates the first
/// qubit is the control.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        let g = Self { kind, qubits, params };
        g.check_shape()?;
        Ok(g)
    }

    fn check_shape(&self) -> Result<()> {
        if self.qubits.len() != self.kind.num_qubits() {
            return Err(Error::Gate(format!("{} acts on {} qubit(s), got {}", self.kind, self.kind.num_qubits(), self.qubits.len())));
        }
        if self.params.len() != self.kind.num_params() {
            return Err(Error::Gate(format!("{} takes {} parameter(s), got {}", self.kind, self.kind.num_params(), self.params.len())));
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Gate(format!("{} has a non-finite parameter", self.kind)));
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::Gate(format!("{} targets qubit {} twice", self.kind, self.qubits[0])));
        }
        Ok(())
    }

    /// Arity, parameter count, distinctness and `1 <= q <= num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        self.check_shape()?;
        if let Some(&q) = self.qubits.iter().find(|&&q| q == 0 || q > num_qubits) {
            return Err(Error::Gate(format!("{}: qubit {q} outside 1..={num_qubits}", self.kind)));
        }
        Ok(())
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits.len() == 2
    }

    /// Lower and upper target site of a two-qubit gate.
    pub fn span(&self) -> (usize, usize) {
        let a = self.qubits[0];
        let b = *self.qubits.last().expect("gate has qubits");
        (a.min(b), a.max(b))
    }

    /// `q` in the gate range `[k, k+q]`; zero for single-qubit gates.
    pub fn range(&self) -> usize {
        let (lo, hi) = self.span();
        hi - lo
    }

    fn one(kind: GateKind, q: usize, params: Vec<f64>) -> Self {
        Self { kind, qubits: vec![q], params }
    }

    fn two(kind: GateKind, a: usize, b: usize, params: Vec<f64>) -> Self {
        Self { kind, qubits: vec![a, b], params }
    }

    pub fn rx(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Rx, q, vec![theta])
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Ry, q, vec![theta])
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Rz, q, vec![theta])
    }
    pub fn u3(q: usize, t1: f64, t2: f64, t3: f64) -> Self {
        Self::one(GateKind::U3, q, vec![t1, t2, t3])
    }
    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q, vec![])
    }
    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q, vec![])
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::two(GateKind::Cx, control, target, vec![])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::two(GateKind::Cz, a, b, vec![])
    }
    pub fn rxx(a: usize, b: usize, theta: f64) -> Self {
        Self::two(GateKind::Rxx, a, b, vec![theta])
    }
    pub fn ryy(a: usize, b: usize, theta: f64) -> Self {
        Self::two(GateKind::Ryy, a, b, vec![theta])
    }
    pub fn rzz(a: usize, b: usize, theta: f64) -> Self {
        Self::two(GateKind::Rzz, a, b, vec![theta])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::two(GateKind::Swap, a, b, vec![])
    }
}

fn rotation(p: &DenseMatrix, theta: f64) -> DenseMatrix {
    let n = p.nrows();
    linalg::identity(n) * C64::new((theta / 2.0).cos(), 0.0) - p * C64::new(0.0, (theta / 2.0).sin())
}

pub fn swap_matrix() -> DenseMatrix {
    let mut s = DenseMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        s[(r, c)] = C64::new(1.0, 0.0);
    }
    s
}

/// Unitary in the qubit order given by `g.qubits` (first qubit is the most
/// significant index).
pub fn gate_unitary(g: &GateOp) -> DenseMatrix {
    use GateKind::*;
    let p = &g.params;
    match g.kind {
        Rx => rotation(&pauli::x(), p[0]),
        Ry => rotation(&pauli::y(), p[0]),
        Rz => rotation(&pauli::z(), p[0]),
        U3 => rotation(&pauli::z(), p[0]) * rotation(&pauli::y(), p[1]) * rotation(&pauli::z(), p[2]),
        H => pauli::h(),
        X => pauli::x(),
        Cx => {
            let mut u = linalg::identity(4);
            u[(2, 2)] = C64::new(0.0, 0.0);
            u[(3, 3)] = C64::new(0.0, 0.0);
            u[(2, 3)] = C64::new(1.0, 0.0);
            u[(3, 2)] = C64::new(1.0, 0.0);
            u
        }
        Cz => {
            let mut u = linalg::identity(4);
            u[(3, 3)] = C64::new(-1.0, 0.0);
            u
        }
        Rxx => rotation(&pauli::x().kronecker(&pauli::x()), p[0]),
        Ryy => rotation(&pauli::y().kronecker(&pauli::y()), p[0]),
        Rzz => rotation(&pauli::z().kronecker(&pauli::z()), p[0]),
        Swap => swap_matrix(),
    }
}

/// Two-qubit unitary re-expressed with the lower site as the most
/// significant index.
pub fn gate_unitary_ascending(g: &GateOp) -> DenseMatrix {
    let u = gate_unitary(g);
    if g.is_two_qubit() && g.qubits[0] > g.qubits[1] {
        let s = swap_matrix();
        &s * u * &s
    } else {
        u
    }
}

/// `coefficient · H_k ⊗ H_{k+q}` with `span = (k, k+q)` in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductGenerator {
    pub coefficient: f64,
    pub factor_left: DenseMatrix,
    pub factor_right: DenseMatrix,
    pub span: (usize, usize),
}

impl ProductGenerator {
    pub fn range(&self) -> usize {
        self.span.1 - self.span.0
    }

    /// The generator as a dense 4×4 matrix on the two target qubits.
    pub fn two_qubit_matrix(&self) -> DenseMatrix {
        self.factor_left.kronecker(&self.factor_right) * C64::new(self.coefficient, 0.0)
    }
}

/// Product-form generator of a two-qubit gate; SWAP and single-qubit gates
/// have none.
pub fn gate_generator(g: &GateOp) -> Result<ProductGenerator> {
    use GateKind::*;
    if !g.is_two_qubit() {
        return Err(Error::Gate(format!("{} is a single-qubit gate and is applied directly", g.kind)));
    }
    let i_minus_z = pauli::id() - pauli::z();
    let i_minus_x = pauli::id() - pauli::x();
    // factors in the order of g.qubits
    let (coefficient, first, second) = match g.kind {
        Rzz => (g.params[0] / 2.0, pauli::z(), pauli::z()),
        Rxx => (g.params[0] / 2.0, pauli::x(), pauli::x()),
        Ryy => (g.params[0] / 2.0, pauli::y(), pauli::y()),
        Cx => (FRAC_PI_4, i_minus_z, i_minus_x),
        Cz => (FRAC_PI_4, i_minus_z.clone(), i_minus_z),
        Swap => {
            return Err(Error::Gate("swap has no product-form generator".into()));
        }
        _ => unreachable!("two-qubit kinds are covered"),
    };
    let (factor_left, factor_right) = if g.qubits[0] < g.qubits[1] { (first, second) } else { (second, first) };
    Ok(ProductGenerator { coefficient, factor_left, factor_right, span: g.span() })
}

/// Bond-dimension-one operator chain over an inclusive window of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMpo {
    window: (usize, usize),
    coefficient: f64,
    operators: Vec<DenseMatrix>,
    identity: Vec<bool>,
}

impl GeneratorMpo {
    pub fn window(&self) -> (usize, usize) {
        self.window
    }

    /// Scalar multiplying the product of the site operators.
    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    /// Operator bond dimension, always one.
    pub fn bond_dim(&self) -> usize {
        1
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Local operator at `site` (1-based, inside the window).
    pub fn operator(&self, site: usize) -> &DenseMatrix {
        &self.operators[site - self.window.0]
    }

    pub fn is_identity(&self, site: usize) -> bool {
        self.identity[site - self.window.0]
    }

    /// `coefficient` times the Kronecker product of all window operators.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::from_element(1, 1, C64::new(self.coefficient, 0.0));
        for op in &self.operators {
            out = out.kronecker(op);
        }
        out
    }
}

/// Pads `gen` with identities over `window = (lo, hi)`. The factors are
/// stored unscaled; the coefficient is kept alongside.
pub fn build_generator_mpo(gen: &ProductGenerator, window: (usize, usize), num_sites: usize) -> Result<GeneratorMpo> {
    let (lo, hi) = window;
    let (k, kq) = gen.span;
    if lo == 0 || hi > num_sites || lo > hi {
        return Err(Error::InvalidInput(format!("window [{lo}, {hi}] outside 1..={num_sites}")));
    }
    if lo > k || hi < kq {
        return Err(Error::InvalidInput(format!("window [{lo}, {hi}] does not cover span [{k}, {kq}]")));
    }
    let d = gen.factor_left.nrows();
    let mut operators = Vec::with_capacity(hi - lo + 1);
    let mut identity = Vec::with_capacity(hi - lo + 1);
    for site in lo..=hi {
        if site == k {
            operators.push(gen.factor_left.clone());
            identity.push(false);
        } else if site == kq {
            operators.push(gen.factor_right.clone());
            identity.push(false);
        } else {
            operators.push(linalg::identity(d));
            identity.push(true);
        }
    }
    Ok(GeneratorMpo { window, coefficient: gen.coefficient, operators, identity })
}
