//! Gate application by local time-dependent variational evolution.
//!
//! A two-qubit gate `exp(-i c H_k ⊗ H_{k+q})` is treated as unit-time
//! evolution under its generator. The tangent-space projection is restricted
//! to the window `[k-1, k+q+1]` (clamped to the chain), so only tensors in
//! the window change. One left-to-right sweep per gate:
//!
//! 1. center at `lo`, right environments built from `hi` down;
//! 2. for each pair `(n, n+1)`: evolve the merged block forward with
//!    `exp(-i H_eff)`, split by truncated SVD with the center moving right,
//!    grow the left environment, and unless `n+1 = hi` evolve site `n+1`
//!    backward with `exp(+i H_eff)`.
//!
//! For gates of range two or more the right block bases inside the window
//! are first widened to include the generator's image (see
//! [`expand_right_bases`]); the sweep then splits losslessly and the window
//! is recompressed afterwards with the configured `s_max` and `chi_max`.
//!
//! The generator MPO has bond dimension one, so every environment block is a
//! `χ × χ` matrix `E[bra, ket]`.

use num_complex::Complex64 as C64;

use crate::circuits::Circuit;
use crate::engine::{run_circuit, Engine, GateReport, Probes, RunOutput};
use crate::error::{Error, Result};
use crate::gates::{self, build_generator_mpo, gate_generator, GateKind, GateOp, GeneratorMpo};
use crate::linalg::{self, lanczos_expm_apply, matmul, DenseMatrix, KrylovOptions, LinearOperator, TruncationReport};
use crate::mps::{Mps, SiteTensor};
use crate::tebd::{self, TebdConfig};

/// Inclusive site range `[lo, hi]` touched by one gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: usize,
    pub hi: usize,
    pub gate_span: (usize, usize),
}

impl Window {
    /// `[k-1, k+q+1]` clamped to `[1, N]`.
    pub fn for_span(k: usize, kq: usize, num_sites: usize) -> Result<Self> {
        if k == 0 || kq <= k || kq > num_sites {
            return Err(Error::InvalidInput(format!("gate span ({k}, {kq}) invalid for N = {num_sites}")));
        }
        Ok(Self { lo: k.saturating_sub(1).max(1), hi: (kq + 1).min(num_sites), gate_span: (k, kq) })
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    #[default]
    TwoSite,
    OneSite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TdvpConfig {
    pub s_max: f64,
    pub chi_max: usize,
    pub krylov_max: usize,
    pub krylov_tol: f64,
    /// Sweeps per gate; each sweep evolves for time `1 / sweeps`.
    pub sweeps: usize,
    pub scheme: Scheme,
    /// Widen the window's right block bases before a long-range gate; see
    /// [`expand_right_bases`].
    pub expansion: bool,
}

impl Default for TdvpConfig {
    fn default() -> Self {
        let k = KrylovOptions::default();
        Self {
            s_max: 1e-12,
            chi_max: usize::MAX,
            krylov_max: k.krylov_max,
            krylov_tol: k.tol,
            sweeps: 1,
            scheme: Scheme::TwoSite,
            expansion: true,
        }
    }
}

impl TdvpConfig {
    pub fn new(s_max: f64, chi_max: usize) -> Result<Self> {
        let cfg = Self { s_max, chi_max, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        TebdConfig { s_max: self.s_max, chi_max: self.chi_max, record_metrics: true }.validate()?;
        if self.krylov_max < 2 {
            return Err(Error::InvalidInput("krylov_max must be >= 2".into()));
        }
        if !(self.krylov_tol > 0.0) {
            return Err(Error::InvalidInput("krylov_tol must be > 0".into()));
        }
        if self.sweeps < 1 {
            return Err(Error::InvalidInput("sweeps must be >= 1".into()));
        }
        Ok(())
    }

    fn krylov(&self) -> KrylovOptions {
        KrylovOptions { krylov_max: self.krylov_max, tol: self.krylov_tol }
    }

    /// Lossless splits, used while the window carries expanded bases.
    fn padded(&self) -> TdvpConfig {
        TdvpConfig { s_max: 0.0, chi_max: usize::MAX, ..*self }
    }

    fn tebd(&self) -> TebdConfig {
        TebdConfig { s_max: self.s_max, chi_max: self.chi_max, record_metrics: true }
    }
}

// ---------------------------------------------------------------------------
// environments

fn eye(n: usize) -> DenseMatrix {
    linalg::identity(n)
}

/// `L'[b', b] = Σ O[q', q] conj(A^{q'}[a', b']) L[a', a] A^q[a, b]`.
pub fn grow_left(env: &DenseMatrix, t: &SiteTensor, op: Option<&DenseMatrix>) -> DenseMatrix {
    let d = t.phys_dim();
    let slices: Vec<DenseMatrix> = (0..d).map(|q| t.matrix(q)).collect();
    let mut out = DenseMatrix::zeros(t.right_dim(), t.right_dim());
    for (q, a) in slices.iter().enumerate() {
        let la = matmul(env, a);
        for (qb, b) in slices.iter().enumerate() {
            let w = match op {
                Some(o) => o[(qb, q)],
                None if qb == q => C64::new(1.0, 0.0),
                None => continue,
            };
            if w != C64::new(0.0, 0.0) {
                out += matmul(&b.adjoint(), &la) * w;
            }
        }
    }
    out
}

/// `R'[a', a] = Σ O[q', q] conj(B^{q'}[a', b']) R[b', b] B^q[a, b]`.
pub fn grow_right(env: &DenseMatrix, t: &SiteTensor, op: Option<&DenseMatrix>) -> DenseMatrix {
    let d = t.phys_dim();
    let slices: Vec<DenseMatrix> = (0..d).map(|q| t.matrix(q)).collect();
    let mut out = DenseMatrix::zeros(t.left_dim(), t.left_dim());
    for (q, a) in slices.iter().enumerate() {
        let ra = matmul(env, &a.transpose());
        for (qb, b) in slices.iter().enumerate() {
            let w = match op {
                Some(o) => o[(qb, q)],
                None if qb == q => C64::new(1.0, 0.0),
                None => continue,
            };
            if w != C64::new(0.0, 0.0) {
                out += matmul(&b.conjugate(), &ra) * w;
            }
        }
    }
    out
}

/// Left and right environment blocks of a window.
#[derive(Clone, Debug)]
pub struct Environment {
    lo: usize,
    /// `left[n - lo]` covers sites `lo..n`, i.e. everything left of `n`.
    left: Vec<Option<DenseMatrix>>,
    /// `right[n - lo]` covers sites `n+1..=hi`.
    right: Vec<Option<DenseMatrix>>,
}

impl Environment {
    /// Fresh environments for `psi` with the center at `win.lo`: identity at
    /// `lo` on the left, every right block from `hi` down to `lo`.
    pub fn new(psi: &Mps, mpo: &GeneratorMpo, win: &Window) -> Self {
        let len = win.len();
        let mut left = vec![None; len];
        let mut right = vec![None; len];
        left[0] = Some(eye(psi.tensor(win.lo).left_dim()));
        right[len - 1] = Some(eye(psi.tensor(win.hi).right_dim()));
        for n in (win.lo + 1..=win.hi).rev() {
            let r = right[n - win.lo].as_ref().expect("built from the right");
            let next = grow_right(r, psi.tensor(n), site_op(mpo, n));
            right[n - 1 - win.lo] = Some(next);
        }
        Self { lo: win.lo, left, right }
    }

    pub fn left(&self, site: usize) -> &DenseMatrix {
        self.left[site - self.lo].as_ref().expect("left block not built")
    }

    pub fn right(&self, site: usize) -> &DenseMatrix {
        self.right[site - self.lo].as_ref().expect("right block not built")
    }

    /// Extends the left block past `site` (now left-canonical).
    pub fn advance_left(&mut self, psi: &Mps, mpo: &GeneratorMpo, site: usize) {
        let next = grow_left(self.left(site), psi.tensor(site), site_op(mpo, site));
        self.left[site + 1 - self.lo] = Some(next);
    }
}

fn site_op(mpo: &GeneratorMpo, site: usize) -> Option<&DenseMatrix> {
    (!mpo.is_identity(site)).then(|| mpo.operator(site))
}

// ---------------------------------------------------------------------------
// effective Hamiltonians

/// `coefficient · L ⊗ O_1 ⊗ ... ⊗ O_k ⊗ R` acting on a flattened block with
/// layout `(left, phys_1, ..., phys_k, right)`, left index fastest. Zero
/// physical legs give the bond Hamiltonian.
pub struct EffectiveHamiltonian<'a> {
    left: &'a DenseMatrix,
    right: &'a DenseMatrix,
    ops: Vec<Option<&'a DenseMatrix>>,
    coefficient: f64,
    phys: usize,
}

impl<'a> EffectiveHamiltonian<'a> {
    pub fn new(left: &'a DenseMatrix, ops: Vec<Option<&'a DenseMatrix>>, right: &'a DenseMatrix, coefficient: f64, phys: usize) -> Self {
        Self { left, right, ops, coefficient, phys }
    }

    pub fn arity(&self) -> usize {
        self.ops.len()
    }

    fn middle(&self) -> usize {
        self.phys.pow(self.ops.len() as u32)
    }
}

impl LinearOperator for EffectiveHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.left.nrows() * self.middle() * self.right.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let (l, r, m, d) = (self.left.nrows(), self.right.nrows(), self.middle(), self.phys);
        let x = DenseMatrix::from_column_slice(l, m * r, x);
        let lx = matmul(self.left, &x);
        let mut buf = lx.as_slice().to_vec();
        let mut local = vec![C64::new(0.0, 0.0); d];
        for (j, op) in self.ops.iter().enumerate() {
            let Some(op) = op else { continue };
            let inner = l * d.pow(j as u32);
            let outer = buf.len() / (inner * d);
            for o in 0..outer {
                for i in 0..inner {
                    let base = i + inner * d * o;
                    for (p, v) in local.iter_mut().enumerate() {
                        *v = buf[base + inner * p];
                    }
                    for q in 0..d {
                        buf[base + inner * q] = (0..d).map(|p| op[(q, p)] * local[p]).sum();
                    }
                }
            }
        }
        let mid = DenseMatrix::from_column_slice(l * m, r, &buf);
        let out = matmul(&mid, &self.right.transpose());
        let c = C64::new(self.coefficient, 0.0);
        for (yi, v) in y.iter_mut().zip(out.as_slice()) {
            *yi = v * c;
        }
    }
}

// ---------------------------------------------------------------------------
// sweeps

fn check_mpo(psi: &Mps, mpo: &GeneratorMpo, win: &Window) -> Result<()> {
    if mpo.window() != (win.lo, win.hi) {
        return Err(Error::InvalidInput(format!("generator window {:?} differs from sweep window [{}, {}]", mpo.window(), win.lo, win.hi)));
    }
    if win.hi > psi.num_sites() {
        return Err(Error::SiteOutOfRange { site: win.hi, num_sites: psi.num_sites() });
    }
    if win.hi == win.lo {
        return Err(Error::InvalidInput("window must cover at least two sites".into()));
    }
    Ok(())
}

fn require_center(psi: &Mps, site: usize) -> Result<()> {
    match psi.center_idx() {
        Some(c) if c + 1 == site => Ok(()),
        found => Err(Error::CenterMisplaced { expected: site, found: found.map(|c| c + 1) }),
    }
}

/// One forward/backward sweep over `win` evolving for time `dt`. The center
/// must be at `win.lo` and ends at `win.hi`.
pub fn local_2tdvp_sweep(psi: &mut Mps, mpo: &GeneratorMpo, win: &Window, cfg: &TdvpConfig, dt: f64) -> Result<Vec<TruncationReport>> {
    check_mpo(psi, mpo, win)?;
    require_center(psi, win.lo)?;
    let d = psi.local_dim();
    let opts = cfg.krylov();
    let coeff = mpo.coefficient();
    let forward = C64::new(0.0, -dt);
    let backward = C64::new(0.0, dt);
    let mut env = Environment::new(psi, mpo, win);
    let mut reports = Vec::with_capacity(win.len() - 1);
    for n in win.lo..win.hi {
        let theta = psi.merge_pair(n - 1);
        let evolved = {
            let h = EffectiveHamiltonian::new(env.left(n), vec![site_op(mpo, n), site_op(mpo, n + 1)], env.right(n + 1), coeff, d);
            lanczos_expm_apply(&h, theta.as_slice(), forward, &opts)?
        };
        let theta = DenseMatrix::from_column_slice(theta.nrows(), theta.ncols(), &evolved);
        reports.push(psi.split_pair(n - 1, &theta, cfg.s_max, cfg.chi_max, true)?);
        env.advance_left(psi, mpo, n);
        if n + 1 < win.hi {
            let t = psi.tensor(n + 1).clone();
            let evolved = {
                let h = EffectiveHamiltonian::new(env.left(n + 1), vec![site_op(mpo, n + 1)], env.right(n + 1), coeff, d);
                lanczos_expm_apply(&h, t.data(), backward, &opts)?
            };
            psi.tensors_mut()[n] = SiteTensor::from_flat(t.left_dim(), d, t.right_dim(), evolved);
        }
    }
    Ok(reports)
}

/// Applies `exp(-i G)` for the generator MPO `mpo` over `win`. The center
/// must be at `win.lo`; it ends at `win.hi`.
pub fn local_2tdvp_apply_gate(psi: &mut Mps, mpo: &GeneratorMpo, win: &Window, cfg: &TdvpConfig) -> Result<Vec<TruncationReport>> {
    cfg.validate()?;
    let dt = 1.0 / cfg.sweeps as f64;
    let mut reports = Vec::new();
    for sweep in 0..cfg.sweeps {
        if sweep > 0 {
            psi.shift_center_idx(win.lo - 1);
        }
        reports.extend(local_2tdvp_sweep(psi, mpo, win, cfg, dt)?);
    }
    Ok(reports)
}

/// Relative singular-value cutoff when orthonormalizing expanded bases.
const EXPANSION_TOL: f64 = 1e-12;

fn apply_physical(t: &SiteTensor, op: &DenseMatrix) -> SiteTensor {
    let mut out = SiteTensor::zeros(t.left_dim(), t.phys_dim(), t.right_dim());
    for b in 0..t.right_dim() {
        for a in 0..t.left_dim() {
            for q in 0..t.phys_dim() {
                let v = (0..t.phys_dim()).map(|p| op[(q, p)] * t.get(p, a, b)).sum();
                out.set(q, a, b, v);
            }
        }
    }
    out
}

/// Enlarges the right block bases of bonds `lo+1 .. k+q-1` so that each
/// also spans its image under `op` acting on site `k+q`. The state itself is
/// unchanged and the center stays at `lo`.
///
/// Without this, a gate of range two or more sees a two-site tangent space
/// that cannot hold the extra Schmidt vectors it creates on the inner bonds,
/// and the projected evolution is only approximate unless every bond is
/// already saturated. The enlarged bases make each projected subspace
/// invariant under the generator, so the sweep reproduces the gate.
pub fn expand_right_bases(psi: &mut Mps, op: &DenseMatrix, win: &Window) -> Result<()> {
    require_center(psi, win.lo)?;
    let (lo, kq) = (win.lo, win.gate_span.1);
    if kq < lo + 2 {
        return Ok(());
    }
    let d = psi.local_dim();
    let far = psi.tensor(kq);
    let mut old = far.as_right_matrix();
    let mut image = apply_physical(far, op).as_right_matrix();
    for j in (lo + 2..=kq).rev() {
        let l = old.nrows();
        let mut stacked = DenseMatrix::zeros(2 * l, old.ncols());
        stacked.rows_mut(0, l).copy_from(&old);
        stacked.rows_mut(l, l).copy_from(&image);
        let svd = linalg::truncated_svd(&stacked, 0.0, usize::MAX)?;
        let top = svd.s.first().copied().unwrap_or(0.0);
        let rank = svd.s.iter().take_while(|&&v| v > EXPANSION_TOL * top).count();
        let mut weights = svd.u.columns(0, rank).into_owned();
        for (c, sv) in svd.s.iter().take(rank).enumerate() {
            weights.column_mut(c).iter_mut().for_each(|z| *z *= sv);
        }
        psi.tensors_mut()[j - 1] = SiteTensor::from_right_matrix(svd.v_dag.rows(0, rank).into_owned(), d);
        let prev = psi.tensor(j - 1).as_left_matrix();
        old = SiteTensor::from_left_matrix(matmul(&prev, &weights.rows(0, l).into_owned()), d).as_right_matrix();
        image = SiteTensor::from_left_matrix(matmul(&prev, &weights.rows(l, l).into_owned()), d).as_right_matrix();
    }
    psi.tensors_mut()[lo] = SiteTensor::from_right_matrix(old, d);
    Ok(())
}

/// Truncates every bond inside `win` with a right-to-left SVD sweep and
/// returns the center to `win.hi`.
fn compress_window(psi: &mut Mps, win: &Window, cfg: &TdvpConfig) -> Result<Vec<TruncationReport>> {
    require_center(psi, win.hi)?;
    let mut reports = Vec::with_capacity(win.len() - 1);
    for i in (win.lo - 1..win.hi - 1).rev() {
        let theta = psi.merge_pair(i);
        reports.push(psi.split_pair(i, &theta, cfg.s_max, cfg.chi_max, false)?);
    }
    psi.shift_center_idx(win.hi - 1);
    Ok(reports)
}

/// Fixed-rank variant over the gate span `[k, k+q]`: one-site forward
/// steps, QR splits, and backward bond steps. Bond dimensions never change.
/// The center must be at `k`; it ends at `k+q`.
pub fn local_1tdvp_apply_gate(psi: &mut Mps, mpo: &GeneratorMpo, cfg: &TdvpConfig) -> Result<()> {
    cfg.validate()?;
    let (k, kq) = mpo.window();
    let win = Window { lo: k, hi: kq, gate_span: (k, kq) };
    check_mpo(psi, mpo, &win)?;
    require_center(psi, k)?;
    let d = psi.local_dim();
    let opts = cfg.krylov();
    let coeff = mpo.coefficient();
    let mut env = Environment::new(psi, mpo, &win);
    for n in k..=kq {
        let t = psi.tensor(n).clone();
        let (l, r) = (t.left_dim(), t.right_dim());
        let evolved = {
            let h = EffectiveHamiltonian::new(env.left(n), vec![site_op(mpo, n)], env.right(n), coeff, d);
            lanczos_expm_apply(&h, t.data(), C64::new(0.0, -1.0), &opts)?
        };
        if n == kq {
            psi.tensors_mut()[n - 1] = SiteTensor::from_flat(l, d, r, evolved);
            break;
        }
        let m = DenseMatrix::from_column_slice(l * d, r, &evolved);
        let (q, c) = linalg::qr_orthonormalize(&m)?;
        if q.ncols() != r {
            return Err(Error::InvalidInput(format!("bond {n} exceeds its local rank; one-site evolution needs a minimal MPS")));
        }
        psi.tensors_mut()[n - 1] = SiteTensor::from_flat(l, d, r, q.as_slice().to_vec());
        env.advance_left(psi, mpo, n);
        let c = {
            let h = EffectiveHamiltonian::new(env.left(n + 1), vec![], env.right(n), coeff, d);
            let out = lanczos_expm_apply(&h, c.as_slice(), C64::new(0.0, 1.0), &opts)?;
            DenseMatrix::from_column_slice(r, r, &out)
        };
        let next = psi.tensor(n + 1);
        let (nl, nr) = (next.left_dim(), next.right_dim());
        let merged = matmul(&c, &DenseMatrix::from_column_slice(nl, d * nr, next.data()));
        psi.tensors_mut()[n] = SiteTensor::from_flat(nl, d, nr, merged.as_slice().to_vec());
        psi.set_center_idx(n);
    }
    psi.set_center_idx(kq - 1);
    Ok(())
}

/// Applies any circuit gate with the TDVP rules: single-qubit gates and
/// SWAPs by direct contraction, everything else through its generator.
pub fn apply_gate_tdvp(psi: &mut Mps, gate: &GateOp, cfg: &TdvpConfig) -> Result<GateReport> {
    gate.validate(psi.num_sites())?;
    if !gate.is_two_qubit() || gate.kind == GateKind::Swap {
        return tebd::apply_gate_tebd(psi, gate, &cfg.tebd());
    }
    let gen = gate_generator(gate)?;
    let (k, kq) = gen.span;
    match cfg.scheme {
        Scheme::TwoSite => {
            let win = Window::for_span(k, kq, psi.num_sites())?;
            let mpo = build_generator_mpo(&gen, (win.lo, win.hi), psi.num_sites())?;
            psi.shift_center_idx(win.lo - 1);
            let reports = if cfg.expansion && kq - k >= 2 {
                expand_right_bases(psi, mpo.operator(kq), &win)?;
                local_2tdvp_apply_gate(psi, &mpo, &win, &cfg.padded())?;
                compress_window(psi, &win, cfg)?
            } else {
                local_2tdvp_apply_gate(psi, &mpo, &win, cfg)?
            };
            Ok(GateReport { discarded_weight: reports.iter().map(|r| r.discarded_weight).sum(), swaps: 0 })
        }
        Scheme::OneSite => {
            let mpo = build_generator_mpo(&gen, (k, kq), psi.num_sites())?;
            psi.shift_center_idx(k - 1);
            local_1tdvp_apply_gate(psi, &mpo, cfg)?;
            Ok(GateReport::default())
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TdvpEngine {
    pub cfg: TdvpConfig,
}

impl Engine for TdvpEngine {
    fn name(&self) -> &'static str {
        "tdvp"
    }

    fn chi_max(&self) -> usize {
        self.cfg.chi_max
    }

    fn s_max(&self) -> f64 {
        self.cfg.s_max
    }

    fn apply_gate(&self, psi: &mut Mps, gate: &GateOp) -> Result<GateReport> {
        apply_gate_tdvp(psi, gate, &self.cfg)
    }
}

pub fn run_circuit_tdvp(circuit: &Circuit, psi0: &Mps, cfg: &TdvpConfig, probes: &Probes) -> Result<RunOutput> {
    cfg.validate()?;
    run_circuit(&TdvpEngine { cfg: *cfg }, circuit, psi0, probes)
}

/// Dense matrix of an effective Hamiltonian, for inspection.
pub fn effective_hamiltonian_dense(h: &EffectiveHamiltonian<'_>) -> DenseMatrix {
    let n = h.dim();
    let mut out = DenseMatrix::zeros(n, n);
    let mut e = vec![C64::new(0.0, 0.0); n];
    let mut col = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = C64::new(1.0, 0.0);
        h.apply(&e, &mut col);
        out.column_mut(j).copy_from_slice(&col);
        e[j] = C64::new(0.0, 0.0);
    }
    out
}

/// Generator MPO of `gate` over its clamped window.
pub fn generator_mpo(gate: &GateOp, num_sites: usize) -> Result<(GeneratorMpo, Window)> {
    let gen = gates::gate_generator(gate)?;
    let win = Window::for_span(gen.span.0, gen.span.1, num_sites)?;
    Ok((build_generator_mpo(&gen, (win.lo, win.hi), num_sites)?, win))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::heisenberg_1d;
    use crate::gates::pauli;
    use crate::mps::max_bond_dim;
    use crate::oracle::{fidelity, mps_to_dense, run_circuit_dense, DenseState};
    use crate::tebd::run_circuit_tebd;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn exact() -> TdvpConfig {
        TdvpConfig { s_max: 0.0, ..TdvpConfig::default() }
    }

    fn oracle_after(psi: &Mps, gate: &GateOp) -> DenseState {
        let mut c = Circuit::new(psi.num_sites());
        c.push(gate.clone());
        run_circuit_dense(&c, &mps_to_dense(psi).unwrap()).unwrap()
    }

    fn saturated(n: usize, seed: u64) -> Mps {
        let mut rng = StdRng::seed_from_u64(seed);
        Mps::random(n, 2, 1 << n, &mut rng)
    }

    #[test]
    fn window_clamping() {
        assert_eq!(Window::for_span(1, 2, 6).unwrap(), Window { lo: 1, hi: 3, gate_span: (1, 2) });
        assert_eq!(Window::for_span(3, 6, 6).unwrap(), Window { lo: 2, hi: 6, gate_span: (3, 6) });
        assert_eq!(Window::for_span(2, 5, 7).unwrap().len(), 6);
        assert!(Window::for_span(3, 3, 6).is_err());
        assert!(Window::for_span(3, 7, 6).is_err());
    }

    #[test]
    fn environments_match_recomputation() {
        let mut rng = StdRng::seed_from_u64(7);
        let mut psi = Mps::random(7, 2, 4, &mut rng);
        let (mpo, win) = generator_mpo(&GateOp::rzz(3, 5, 0.3), 7).unwrap();
        psi.shift_center(win.lo).unwrap();
        let mut env = Environment::new(&psi, &mpo, &win);
        psi.shift_center(win.lo + 1).unwrap();
        env.advance_left(&psi, &mpo, win.lo);
        // rebuild the left block from scratch on the moved gauge
        let fresh = grow_left(&eye(psi.tensor(win.lo).left_dim()), psi.tensor(win.lo), site_op(&mpo, win.lo));
        assert!((env.left(win.lo + 1) - fresh).norm() < 1e-12);
        // right blocks: identity at hi, and the block at lo+1 reproduces ⟨ψ|ψ⟩-style contraction
        assert!((env.right(win.hi) - eye(psi.tensor(win.hi).right_dim())).norm() == 0.0);
    }

    #[test]
    fn effective_hamiltonians_are_hermitian() {
        let mut rng = StdRng::seed_from_u64(8);
        let mut psi = Mps::random(6, 2, 4, &mut rng);
        let (mpo, win) = generator_mpo(&GateOp::cx(4, 2), 6).unwrap();
        psi.shift_center(win.lo).unwrap();
        let env = Environment::new(&psi, &mpo, &win);
        let n = win.lo;
        let h2 =
            EffectiveHamiltonian::new(env.left(n), vec![site_op(&mpo, n), site_op(&mpo, n + 1)], env.right(n + 1), mpo.coefficient(), 2);
        let h1 = EffectiveHamiltonian::new(env.left(n), vec![site_op(&mpo, n)], env.right(n), mpo.coefficient(), 2);
        for h in [&h2, &h1] {
            let dim = h.dim();
            let u: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen(), rng.gen())).collect();
            let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen(), rng.gen())).collect();
            let (mut hu, mut hv) = (vec![C64::default(); dim], vec![C64::default(); dim]);
            h.apply(&u, &mut hu);
            h.apply(&v, &mut hv);
            let uhv: C64 = u.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
            let vhu: C64 = v.iter().zip(&hu).map(|(a, b)| a.conj() * b).sum();
            assert!((uhv - vhu.conj()).norm() < 1e-10);
            assert!(linalg::hermiticity_deviation(&effective_hamiltonian_dense(h)) < 1e-10);
        }
    }

    #[test]
    fn zero_angle_is_identity() {
        let mut rng = StdRng::seed_from_u64(9);
        let psi0 = Mps::random(6, 2, 4, &mut rng);
        let mut psi = psi0.clone();
        apply_gate_tdvp(&mut psi, &GateOp::rzz(2, 3, 0.0), &exact()).unwrap();
        let f = fidelity(&mps_to_dense(&psi0).unwrap(), &mps_to_dense(&psi).unwrap()).unwrap();
        assert!(f > 1.0 - 1e-12);
        assert!((psi.norm() - psi0.norm()).abs() < 1e-12);
    }

    #[test]
    fn cnot_builds_bell_pair() {
        let mut psi = Mps::product_state(4, 2, &[0, 0, 0, 0]).unwrap();
        psi.apply_single_qubit_gate(2, &pauli::h(), true).unwrap();
        let g = GateOp::cx(2, 3);
        let expected = oracle_after(&psi, &g);
        apply_gate_tdvp(&mut psi, &g, &TdvpConfig::default()).unwrap();
        assert!(fidelity(&expected, &mps_to_dense(&psi).unwrap()).unwrap() > 1.0 - 1e-10);
        assert_eq!(psi.bond_dims(), vec![1, 2, 1]);
    }

    #[test]
    fn locality_and_center() {
        let mut rng = StdRng::seed_from_u64(10);
        let mut psi = Mps::random(8, 2, 4, &mut rng);
        let (mpo, win) = generator_mpo(&GateOp::rzz(4, 5, 0.8), 8).unwrap();
        psi.shift_center(win.lo).unwrap();
        let before = psi.clone();
        local_2tdvp_apply_gate(&mut psi, &mpo, &win, &exact()).unwrap();
        assert_eq!(psi.center(), win.hi);
        for site in (1..win.lo).chain(win.hi + 1..=8) {
            assert_eq!(psi.tensor(site), before.tensor(site), "site {site}");
        }
        let dims_before = before.bond_dims();
        let dims_after = psi.bond_dims();
        for bond in (1..win.lo).chain(win.hi..8) {
            assert_eq!(dims_before[bond - 1], dims_after[bond - 1]);
        }
    }

    #[test]
    fn center_must_be_at_window_start() {
        let mut rng = StdRng::seed_from_u64(11);
        let mut psi = Mps::random(6, 2, 4, &mut rng);
        let (mpo, win) = generator_mpo(&GateOp::rzz(3, 4, 0.8), 6).unwrap();
        psi.shift_center(5).unwrap();
        assert!(matches!(
            local_2tdvp_apply_gate(&mut psi, &mpo, &win, &exact()),
            Err(Error::CenterMisplaced { expected: 2, found: Some(5) })
        ));
    }

    #[test]
    fn nearest_neighbour_gates_are_exact() {
        let mut rng = StdRng::seed_from_u64(12);
        let psi0 = Mps::random(7, 2, 3, &mut rng);
        for g in [GateOp::rzz(1, 2, 0.7), GateOp::rxx(3, 4, -1.3), GateOp::cx(5, 4), GateOp::cz(6, 7), GateOp::ryy(2, 3, 2.9)] {
            let mut psi = psi0.clone();
            apply_gate_tdvp(&mut psi, &g, &exact()).unwrap();
            let f = fidelity(&oracle_after(&psi0, &g), &mps_to_dense(&psi).unwrap()).unwrap();
            assert!(f > 1.0 - 1e-10, "{g:?}: {f}");
        }
    }

    #[test]
    fn long_range_gate_on_saturated_state() {
        let psi0 = saturated(7, 13);
        let g = GateOp::rzz(2, 5, 1.1);
        let mut psi = psi0.clone();
        let r = apply_gate_tdvp(&mut psi, &g, &exact()).unwrap();
        assert_eq!(r.swaps, 0);
        let f = fidelity(&oracle_after(&psi0, &g), &mps_to_dense(&psi).unwrap()).unwrap();
        assert!(f > 1.0 - 1e-8, "{f}");
    }

    #[test]
    fn expansion_keeps_state_and_gauge() {
        let mut rng = StdRng::seed_from_u64(16);
        let mut psi = Mps::random(8, 2, 3, &mut rng);
        let (mpo, win) = generator_mpo(&GateOp::rzz(2, 6, 0.4), 8).unwrap();
        psi.shift_center(win.lo).unwrap();
        let before = psi.clone();
        expand_right_bases(&mut psi, mpo.operator(6), &win).unwrap();
        assert_eq!(psi.center(), win.lo);
        assert!(psi.canonical_residuals().iter().all(|&r| r < 1e-10));
        let f = fidelity(&mps_to_dense(&before).unwrap(), &mps_to_dense(&psi).unwrap()).unwrap();
        assert!(f > 1.0 - 1e-12);
        let (old, new) = (before.bond_dims(), psi.bond_dims());
        for bond in win.lo + 1..6 {
            assert!(new[bond - 1] > old[bond - 1] && new[bond - 1] <= 2 * old[bond - 1], "bond {bond}: {old:?} -> {new:?}");
        }
        for bond in (1..=win.lo).chain(6..8) {
            assert_eq!(new[bond - 1], old[bond - 1]);
        }
    }

    #[test]
    fn long_range_gates_on_low_rank_states() {
        let neel = Mps::product_state(8, 2, &[0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
        let mut rng = StdRng::seed_from_u64(17);
        let random = Mps::random(8, 2, 2, &mut rng);
        let gates = [GateOp::rxx(2, 6, 0.9), GateOp::cx(7, 3), GateOp::ryy(1, 8, -1.7), GateOp::cz(1, 3)];
        for psi0 in [&neel, &random] {
            for g in &gates {
                let mut psi = psi0.clone();
                let r = apply_gate_tdvp(&mut psi, g, &TdvpConfig::default()).unwrap();
                assert_eq!(r.swaps, 0);
                let f = fidelity(&oracle_after(psi0, g), &mps_to_dense(&psi).unwrap()).unwrap();
                assert!(f > 1.0 - 1e-8, "{g:?}: {f}");
            }
        }
    }

    #[test]
    fn without_expansion_long_range_gates_are_approximate() {
        let psi0 = Mps::product_state(8, 2, &[0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
        let g = GateOp::rxx(2, 6, 0.9);
        let mut psi = psi0.clone();
        let cfg = TdvpConfig { expansion: false, ..TdvpConfig::default() };
        apply_gate_tdvp(&mut psi, &g, &cfg).unwrap();
        let f = fidelity(&oracle_after(&psi0, &g), &mps_to_dense(&psi).unwrap()).unwrap();
        assert!(f < 1.0 - 1e-6, "{f}");
    }

    #[test]
    fn periodic_heisenberg_step_matches_oracle() {
        let psi0 = Mps::product_state(8, 2, &[0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
        let c = heisenberg_1d(8, 1.0, 1.0, 0.1, 1, true).unwrap();
        let out = run_circuit_tdvp(&c, &psi0, &TdvpConfig::default(), &Probes::default()).unwrap();
        assert_eq!(out.swap_count, 0);
        let reference = run_circuit_dense(&c, &mps_to_dense(&psi0).unwrap()).unwrap();
        assert!(fidelity(&reference, &mps_to_dense(&out.state).unwrap()).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn one_site_scheme_keeps_bonds() {
        let psi0 = saturated(6, 14);
        for n in 1..6 {
            assert_eq!(psi0.bond_dims()[n - 1], max_bond_dim(6, 2, n));
        }
        let cfg = TdvpConfig { scheme: Scheme::OneSite, ..exact() };
        for g in [GateOp::rzz(3, 4, 0.9), GateOp::rzz(2, 3, 0.0)] {
            let mut psi = psi0.clone();
            apply_gate_tdvp(&mut psi, &g, &cfg).unwrap();
            assert_eq!(psi.bond_dims(), psi0.bond_dims());
            assert!((psi.norm() - 1.0).abs() < 1e-8);
            let f = fidelity(&oracle_after(&psi0, &g), &mps_to_dense(&psi).unwrap()).unwrap();
            assert!(f > 1.0 - 1e-8, "{g:?}: {f}");
        }
    }

    #[test]
    fn single_qubit_circuits_match_tebd_bitwise() {
        let mut c = Circuit::new(4);
        for q in 1..=4 {
            c.push(GateOp::u3(q, 0.1 * q as f64, 0.2, -0.3));
            c.push(GateOp::h(q));
        }
        c.mark_layer();
        let psi0 = Mps::product_state(4, 2, &[0, 1, 1, 0]).unwrap();
        let a = run_circuit_tdvp(&c, &psi0, &TdvpConfig::default(), &Probes::default()).unwrap();
        let b = run_circuit_tebd(&c, &psi0, &TebdConfig::default(), &Probes::default()).unwrap();
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn swap_gates_are_contracted() {
        let mut rng = StdRng::seed_from_u64(15);
        let psi0 = Mps::random(5, 2, 4, &mut rng);
        let g = GateOp::swap(2, 3);
        let mut psi = psi0.clone();
        apply_gate_tdvp(&mut psi, &g, &exact()).unwrap();
        assert!(fidelity(&oracle_after(&psi0, &g), &mps_to_dense(&psi).unwrap()).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn heisenberg_step_matches_oracle() {
        let psi0 = Mps::product_state(8, 2, &[0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
        let c = heisenberg_1d(8, 1.0, 1.0, 0.1, 2, false).unwrap();
        let out = run_circuit_tdvp(&c, &psi0, &TdvpConfig::default(), &Probes::default()).unwrap();
        assert_eq!(out.metrics.len(), 2);
        assert_eq!(out.swap_count, 0);
        let reference = run_circuit_dense(&c, &mps_to_dense(&psi0).unwrap()).unwrap();
        assert!(fidelity(&reference, &mps_to_dense(&out.state).unwrap()).unwrap() > 1.0 - 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gates_match_oracle_on_random_states(seed in any::<u64>(), chi in 1usize..5, k in 1usize..7, q in 1usize..7, theta in -3.0f64..3.0) {
            let n = 7;
            let kq = (k + q).min(n);
            prop_assume!(kq > k);
            let mut rng = StdRng::seed_from_u64(seed);
            let psi0 = Mps::random(n, 2, chi, &mut rng);
            let g = match seed % 3 {
                0 => GateOp::rzz(k, kq, theta),
                1 => GateOp::ryy(kq, k, theta),
                _ => GateOp::cx(kq, k),
            };
            let mut psi = psi0.clone();
            apply_gate_tdvp(&mut psi, &g, &TdvpConfig::default()).unwrap();
            let f = fidelity(&oracle_after(&psi0, &g), &mps_to_dense(&psi).unwrap()).unwrap();
            prop_assert!(f > 1.0 - 1e-8, "{:?}: {}", g, f);
        }

        #[test]
        fn norm_is_preserved_without_truncation(seed in any::<u64>(), k in 1usize..6, q in 1usize..4, theta in -3.0f64..3.0) {
            let n = 8;
            let kq = (k + q).min(n);
            let mut rng = StdRng::seed_from_u64(seed);
            let mut psi = Mps::random(n, 2, 4, &mut rng);
            let before = psi.norm();
            apply_gate_tdvp(&mut psi, &GateOp::rxx(k, kq, theta), &exact()).unwrap();
            prop_assert!((psi.norm() - before).abs() <= 1e-8);
        }
    }
}
