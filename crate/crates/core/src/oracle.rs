//! Dense state-vector reference and dense tangent-space projectors.
//!
//! Deliberately naive and independent of the engines: nothing here calls the
//! TEBD or TDVP code. Site 1 is the most significant digit of a basis index.

use num_complex::Complex64 as C64;

use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::gates::{self, GateOp, ProductGenerator};
use crate::linalg::{self, DenseMatrix};
use crate::mps::Mps;

/// Largest state the oracle will allocate.
pub const MAX_DENSE_QUBITS: usize = 14;
/// Largest chain for which projectors are formed as dense matrices.
pub const MAX_PROJECTOR_QUBITS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    num_sites: usize,
    local_dim: usize,
    amplitudes: Vec<C64>,
}

fn guard(num_sites: usize, max: usize) -> Result<()> {
    if num_sites > max {
        Err(Error::Oversize { num_qubits: num_sites, max })
    } else {
        Ok(())
    }
}

impl DenseState {
    pub fn from_amplitudes(num_sites: usize, local_dim: usize, amplitudes: Vec<C64>) -> Result<Self> {
        guard(num_sites, MAX_DENSE_QUBITS)?;
        let dim = local_dim.pow(num_sites as u32);
        if amplitudes.len() != dim {
            return Err(Error::InvalidInput(format!("expected {dim} amplitudes, got {}", amplitudes.len())));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("amplitudes must be finite".into()));
        }
        Ok(Self { num_sites, local_dim, amplitudes })
    }

    /// Computational basis state `|labels⟩` of qubits.
    pub fn basis(labels: &[usize]) -> Result<Self> {
        let n = labels.len();
        guard(n, MAX_DENSE_QUBITS)?;
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::InvalidInput("qubit labels must be 0 or 1".into()));
        }
        let index = labels.iter().fold(0, |acc, &l| 2 * acc + l);
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { num_sites: n, local_dim: 2, amplitudes })
    }

    /// Tensor product of per-site vectors.
    pub fn product(factors: &[Vec<C64>]) -> Result<Self> {
        guard(factors.len(), MAX_DENSE_QUBITS)?;
        let d = factors.first().map_or(2, Vec::len);
        let mut amplitudes = vec![C64::new(1.0, 0.0)];
        for f in factors {
            if f.len() != d {
                return Err(Error::InvalidInput("product factors must share a dimension".into()));
            }
            amplitudes = amplitudes.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
        }
        Self::from_amplitudes(factors.len(), d, amplitudes)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::vec_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let amplitudes = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a - b).collect();
        Self { amplitudes, ..self.clone() }
    }

    fn stride(&self, site: usize) -> usize {
        self.local_dim.pow((self.num_sites - site) as u32)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.num_sites {
            Err(Error::SiteOutOfRange { site, num_sites: self.num_sites })
        } else {
            Ok(())
        }
    }

    /// Applies `op` to `sites` in place; the first listed site is the most
    /// significant index of `op`.
    pub fn apply_operator(&mut self, sites: &[usize], op: &DenseMatrix) -> Result<()> {
        for &s in sites {
            self.check_site(s)?;
        }
        let d = self.local_dim;
        let k = sites.len();
        let block = d.pow(k as u32);
        if op.shape() != (block, block) {
            return Err(Error::InvalidInput(format!("operator must be {block}x{block}")));
        }
        if (1..k).any(|i| sites[..i].contains(&sites[i])) {
            return Err(Error::InvalidInput("operator sites must be distinct".into()));
        }
        let strides: Vec<usize> = sites.iter().map(|&s| self.stride(s)).collect();
        // offset of every local configuration relative to the base index
        let offsets: Vec<usize> = (0..block)
            .map(|mut c| {
                let mut off = 0;
                for st in strides.iter().rev() {
                    off += (c % d) * st;
                    c /= d;
                }
                off
            })
            .collect();
        let mut local = vec![C64::new(0.0, 0.0); block];
        for base in 0..self.amplitudes.len() {
            if strides.iter().any(|&st| (base / st) % d != 0) {
                continue;
            }
            for (l, off) in local.iter_mut().zip(&offsets) {
                *l = self.amplitudes[base + off];
            }
            for (r, off) in offsets.iter().enumerate() {
                self.amplitudes[base + off] = (0..block).map(|c| op[(r, c)] * local[c]).sum();
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.num_sites)?;
        self.apply_operator(&gate.qubits, &gates::gate_unitary(gate))
    }
}

/// Exact gate-by-gate evolution.
pub fn run_circuit_dense(circuit: &Circuit, psi0: &DenseState) -> Result<DenseState> {
    if circuit.num_qubits != psi0.num_sites {
        return Err(Error::InvalidInput(format!("circuit has {} qubits, state has {}", circuit.num_qubits, psi0.num_sites)));
    }
    let mut psi = psi0.clone();
    for (i, g) in circuit.gates.iter().enumerate() {
        psi.apply_gate(g).map_err(|e| Error::Circuit(format!("gate #{i}: {e}")))?;
    }
    Ok(psi)
}

/// Contracts the chain `M_1^{q_1} ... M_N^{q_N}` for every configuration.
pub fn mps_to_dense(psi: &Mps) -> Result<DenseState> {
    guard(psi.num_sites(), MAX_DENSE_QUBITS)?;
    let d = psi.local_dim();
    // rows: configurations of the sites so far, columns: open right bond
    let mut acc = DenseMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for t in psi.tensors() {
        let slices: Vec<DenseMatrix> = (0..d).map(|q| t.matrix(q)).collect();
        let mut next = DenseMatrix::zeros(acc.nrows() * d, t.right_dim());
        for row in 0..acc.nrows() {
            let r = acc.row(row);
            for (q, m) in slices.iter().enumerate() {
                next.row_mut(row * d + q).copy_from(&(r * m));
            }
        }
        acc = next;
    }
    DenseState::from_amplitudes(psi.num_sites(), d, acc.column(0).iter().copied().collect())
}

/// `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`.
pub fn fidelity(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.num_sites != b.num_sites || a.local_dim != b.local_dim {
        return Err(Error::InvalidInput("fidelity of states on different spaces".into()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::InvalidInput("fidelity with a zero vector".into()));
    }
    Ok((a.inner(b).norm() / (na * nb)).powi(2).min(1.0))
}

/// `coefficient · ⊗_s ops[s]` applied to `psi`, identities elsewhere.
pub fn apply_product_operator(psi: &DenseState, ops: &[(usize, &DenseMatrix)], coefficient: f64) -> Result<DenseState> {
    let mut out = psi.clone();
    for &(site, op) in ops {
        out.apply_operator(&[site], op)?;
    }
    Ok(out.scaled(C64::new(coefficient, 0.0)))
}

/// Dense XXX Heisenberg Hamiltonian `J Σ (XX + YY + ZZ) + h Σ Z`.
pub fn heisenberg_hamiltonian(n: usize, j: f64, h: f64, periodic: bool) -> Result<DenseMatrix> {
    guard(n, MAX_PROJECTOR_QUBITS + 2)?;
    let dim = 1usize << n;
    let embed = |ops: &[(usize, DenseMatrix)]| {
        let mut out = DenseMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for site in 1..=n {
            let op = ops.iter().find(|(s, _)| *s == site).map_or_else(gates::pauli::id, |(_, o)| o.clone());
            out = out.kronecker(&op);
        }
        out
    };
    let mut ham = DenseMatrix::zeros(dim, dim);
    let mut bonds: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
    if periodic && n > 2 {
        bonds.push((n, 1));
    }
    for (a, b) in bonds {
        for p in [gates::pauli::x(), gates::pauli::y(), gates::pauli::z()] {
            ham += embed(&[(a, p.clone()), (b, p)]) * C64::new(j, 0.0);
        }
    }
    for s in 1..=n {
        ham += embed(&[(s, gates::pauli::z())]) * C64::new(h, 0.0);
    }
    Ok(ham)
}

/// `exp(-i t H) |psi⟩` by full diagonalization.
pub fn evolve_exact(ham: &DenseMatrix, psi: &DenseState, t: f64) -> Result<DenseState> {
    if ham.nrows() != psi.amplitudes.len() {
        return Err(Error::InvalidInput("Hamiltonian and state dimensions differ".into()));
    }
    let u = linalg::expm_hermitian(ham, C64::new(0.0, -t));
    let v = DenseMatrix::from_column_slice(psi.amplitudes.len(), 1, &psi.amplitudes);
    let out = u * v;
    DenseState::from_amplitudes(psi.num_sites, psi.local_dim, out.as_slice().to_vec())
}

// ---------------------------------------------------------------------------
// tangent-space projectors

/// Which projector sum to form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectorMode {
    /// All two-site forward terms minus all interior one-site backward terms.
    Global,
    /// Terms restricted to the inclusive window `[lo, hi]` (1-based).
    Local { lo: usize, hi: usize },
}

/// Orthonormal basis (as columns) of the column space of `m`, from the
/// eigenvectors of `m mᴴ` with non-negligible eigenvalues.
fn range_basis(m: &DenseMatrix) -> DenseMatrix {
    let gram = m * m.adjoint();
    let (values, vectors) = linalg::hermitian_eigen(&gram).expect("finite Gram matrix");
    let top = values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 1e-12 * top).collect();
    DenseMatrix::from_fn(m.nrows(), keep.len(), |r, c| vectors[(r, keep[c])])
}

/// Block projectors built from the state's own tensors. `left[n]` projects
/// onto the span of the left block of sites `1..=n`, `right[n]` onto the
/// span of the right block `n+1..=N`.
struct BlockProjectors {
    left: Vec<DenseMatrix>,
    right: Vec<DenseMatrix>,
}

fn block_projectors(psi: &Mps) -> BlockProjectors {
    let n = psi.num_sites();
    let d = psi.local_dim();
    let mut left = vec![DenseMatrix::from_element(1, 1, C64::new(1.0, 0.0))];
    let mut block = DenseMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for t in psi.tensors() {
        let mut next = DenseMatrix::zeros(block.nrows() * d, t.right_dim());
        for q in 0..d {
            let m = t.matrix(q);
            for row in 0..block.nrows() {
                next.row_mut(row * d + q).copy_from(&(block.row(row) * &m));
            }
        }
        block = next;
        let b = range_basis(&block);
        left.push(&b * b.adjoint());
    }
    let mut right = vec![DenseMatrix::from_element(1, 1, C64::new(1.0, 0.0))];
    // block[i_R, a]: configurations of sites n+1..N by the open left bond
    let mut block = DenseMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for t in psi.tensors().iter().rev() {
        let mut next = DenseMatrix::zeros(d * block.nrows(), t.left_dim());
        for q in 0..d {
            let m = t.matrix(q);
            for row in 0..block.nrows() {
                let v = &m * block.row(row).transpose();
                next.row_mut(q * block.nrows() + row).copy_from(&v.transpose());
            }
        }
        block = next;
        let b = range_basis(&block);
        right.push(&b * b.adjoint());
    }
    right.reverse();
    debug_assert_eq!(left.len(), n + 1);
    BlockProjectors { left, right }
}

/// `(P_L^{[1:a]} ⊗ I ⊗ P_R^{[b+1:N]}) v` where the identity covers `a+1..=b`.
fn apply_term(v: &DenseState, proj: &BlockProjectors, a: usize, b: usize) -> Vec<C64> {
    let d = v.local_dim;
    let n = v.num_sites;
    let dl = d.pow(a as u32);
    let dm = d.pow((b - a) as u32);
    let dr = d.pow((n - b) as u32);
    let pl = &proj.left[a];
    let pr = &proj.right[b];
    let amp = &v.amplitudes;
    let idx = |l: usize, m: usize, r: usize| (l * dm + m) * dr + r;
    let mut tmp = vec![C64::new(0.0, 0.0); amp.len()];
    for l in 0..dl {
        for m in 0..dm {
            for r in 0..dr {
                tmp[idx(l, m, r)] = (0..dr).map(|rr| pr[(r, rr)] * amp[idx(l, m, rr)]).sum();
            }
        }
    }
    let mut out = vec![C64::new(0.0, 0.0); amp.len()];
    for l in 0..dl {
        for m in 0..dm {
            for r in 0..dr {
                out[idx(l, m, r)] = (0..dl).map(|ll| pl[(l, ll)] * tmp[idx(ll, m, r)]).sum();
            }
        }
    }
    out
}

/// Dense image of the two-site tangent projector of `psi` applied to `v`.
///
/// Forward pair term `n` is `P_L^{[1:n-1]} ⊗ I_n ⊗ I_{n+1} ⊗ P_R^{[n+2:N]}`
/// and backward site term `n+1` is `P_L^{[1:n]} ⊗ I_{n+1} ⊗ P_R^{[n+2:N]}`.
/// Global mode sums pairs `1..N-1` and subtracts sites `2..N-1`; local mode
/// sums pairs `lo..hi-1` and subtracts sites `lo+1..hi-1`.
pub fn dense_tangent_projector_2site(psi: &Mps, v: &DenseState, mode: ProjectorMode) -> Result<DenseState> {
    let n = psi.num_sites();
    guard(n, MAX_PROJECTOR_QUBITS)?;
    if v.num_sites != n || v.local_dim != psi.local_dim() {
        return Err(Error::InvalidInput("vector and MPS live on different spaces".into()));
    }
    if n < 2 {
        return Ok(v.clone());
    }
    let (lo, hi) = match mode {
        ProjectorMode::Global => (1, n),
        ProjectorMode::Local { lo, hi } => {
            if lo == 0 || hi > n || hi <= lo {
                return Err(Error::InvalidInput(format!("window [{lo}, {hi}] invalid for N = {n}")));
            }
            (lo, hi)
        }
    };
    let proj = block_projectors(psi);
    let mut out = vec![C64::new(0.0, 0.0); v.amplitudes.len()];
    for pair in lo..hi {
        for (o, t) in out.iter_mut().zip(apply_term(v, &proj, pair - 1, pair + 1)) {
            *o += t;
        }
    }
    for site in lo + 1..hi {
        for (o, t) in out.iter_mut().zip(apply_term(v, &proj, site - 1, site)) {
            *o -= t;
        }
    }
    DenseState::from_amplitudes(n, v.local_dim, out)
}

/// `‖P_global·Hψ − P_local·Hψ‖ / ‖Hψ‖` for the product generator `gen`,
/// with the local window `[k-1, k+q+1]` clamped to the chain.
pub fn local_projection_residual(psi: &Mps, gen: &ProductGenerator) -> Result<f64> {
    let n = psi.num_sites();
    let (k, kq) = gen.span;
    let dense = mps_to_dense(psi)?;
    let hpsi = apply_product_operator(&dense, &[(k, &gen.factor_left), (kq, &gen.factor_right)], gen.coefficient)?;
    let scale = hpsi.norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let global = dense_tangent_projector_2site(psi, &hpsi, ProjectorMode::Global)?;
    let local = dense_tangent_projector_2site(psi, &hpsi, ProjectorMode::Local { lo: k.saturating_sub(1).max(1), hi: (kq + 1).min(n) })?;
    Ok(global.sub(&local).norm() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_family, Family, FamilySpec};
    use crate::gates::{gate_generator, pauli};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_dense(rng: &mut StdRng, n: usize) -> DenseState {
        let amps = (0..1usize << n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        DenseState::from_amplitudes(n, 2, amps).unwrap()
    }

    #[test]
    fn empty_circuit_is_identity() {
        let psi = DenseState::basis(&[1, 0, 1]).unwrap();
        let out = run_circuit_dense(&Circuit::new(3), &psi).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn bell_from_h_and_cnot() {
        let mut circ = Circuit::new(2);
        circ.push(GateOp::h(1));
        circ.push(GateOp::cx(1, 2));
        let out = run_circuit_dense(&circ, &DenseState::basis(&[0, 0]).unwrap()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [r, 0.0, 0.0, r];
        for (a, e) in out.amplitudes().iter().zip(expected) {
            assert!((a - c(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn reversed_cnot_acts_on_second_control() {
        let mut psi = DenseState::basis(&[0, 1]).unwrap();
        psi.apply_gate(&GateOp::cx(2, 1)).unwrap();
        assert_eq!(psi, DenseState::basis(&[1, 1]).unwrap());
    }

    #[test]
    fn benchmark_circuits_preserve_norm() {
        let mut specs: Vec<FamilySpec> = [Family::Heisenberg1d, Family::HeisenbergPeriodic, Family::Qaoa, Family::Hea]
            .into_iter()
            .map(|f| FamilySpec::new(f, 8, 2))
            .collect();
        specs.push(FamilySpec::grid(2, 4, 2));
        let psi0 = DenseState::basis(&[0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
        for spec in specs {
            let out = run_circuit_dense(&build_family(&spec).unwrap(), &psi0).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12, "{:?}", spec.family);
        }
    }

    #[test]
    fn oversize_is_rejected() {
        assert!(matches!(DenseState::basis(&[0; 15]), Err(Error::Oversize { .. })));
    }

    #[test]
    fn product_mps_is_one_hot() {
        let psi = Mps::product_state(4, 2, &[1, 0, 0, 1]).unwrap();
        assert_eq!(mps_to_dense(&psi).unwrap(), DenseState::basis(&[1, 0, 0, 1]).unwrap());
    }

    #[test]
    fn random_mps_norm_matches() {
        let mut rng = StdRng::seed_from_u64(3);
        let mut psi = Mps::random(7, 2, 5, &mut rng);
        psi.apply_single_qubit_gate(4, &(pauli::x() * c(1.7) + pauli::z()), false).unwrap();
        let dense = mps_to_dense(&psi).unwrap();
        assert!((dense.norm() - psi.norm()).abs() < 1e-10);
    }

    #[test]
    fn fidelity_examples() {
        let zero = DenseState::basis(&[0, 0]).unwrap();
        let one = DenseState::basis(&[0, 1]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DenseState::from_amplitudes(2, 2, vec![c(r), c(0.0), c(0.0), c(r)]).unwrap();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!((fidelity(&bell, &zero).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(&zero, &zero.scaled(c(0.0))).is_err());
    }

    #[test]
    fn exact_evolution_matches_small_step_trotter() {
        let ham = heisenberg_hamiltonian(4, 1.0, 1.0, false).unwrap();
        assert!(linalg::hermiticity_deviation(&ham) < 1e-14);
        let psi = DenseState::basis(&[0, 1, 0, 1]).unwrap();
        let exact = evolve_exact(&ham, &psi, 0.05).unwrap();
        let spec = FamilySpec { dt: 0.005, ..FamilySpec::new(Family::Heisenberg1d, 4, 10) };
        let trotter = run_circuit_dense(&build_family(&spec).unwrap(), &psi).unwrap();
        assert!(fidelity(&exact, &trotter).unwrap() > 1.0 - 1e-5);
    }

    #[test]
    fn saturated_projector_is_identity() {
        let mut rng = StdRng::seed_from_u64(11);
        let psi = Mps::random(3, 2, 2, &mut rng);
        let v = random_dense(&mut rng, 3);
        let pv = dense_tangent_projector_2site(&psi, &v, ProjectorMode::Global).unwrap();
        assert!(pv.sub(&v).norm() < 1e-10 * v.norm());
    }

    #[test]
    fn projector_is_idempotent_and_hermitian() {
        let mut rng = StdRng::seed_from_u64(5);
        let psi = Mps::random(6, 2, 3, &mut rng);
        let u = random_dense(&mut rng, 6);
        let v = random_dense(&mut rng, 6);
        let pv = dense_tangent_projector_2site(&psi, &v, ProjectorMode::Global).unwrap();
        let ppv = dense_tangent_projector_2site(&psi, &pv, ProjectorMode::Global).unwrap();
        assert!(ppv.sub(&pv).norm() <= 1e-10 * pv.norm());
        let pu = dense_tangent_projector_2site(&psi, &u, ProjectorMode::Global).unwrap();
        assert!((u.inner(&pv) - pu.inner(&v)).norm() < 1e-10 * u.norm() * v.norm());
        // the state itself lies in its tangent space
        let dense = mps_to_dense(&psi).unwrap();
        let pd = dense_tangent_projector_2site(&psi, &dense, ProjectorMode::Global).unwrap();
        assert!(pd.sub(&dense).norm() < 1e-10);
    }

    fn theorem_residual(psi: &Mps, gate: &GateOp) -> f64 {
        local_projection_residual(psi, &gate_generator(gate).unwrap()).unwrap()
    }

    #[test]
    fn local_projection_equals_global_interior() {
        let mut rng = StdRng::seed_from_u64(21);
        let psi = Mps::random(6, 2, 4, &mut rng);
        assert!(theorem_residual(&psi, &GateOp::rzz(3, 4, 0.7)) < 1e-10);
    }

    #[test]
    fn local_projection_equals_global_at_edges() {
        let mut rng = StdRng::seed_from_u64(22);
        let psi = Mps::random(6, 2, 4, &mut rng);
        assert!(theorem_residual(&psi, &GateOp::rzz(1, 2, 0.7)) < 1e-10);
        assert!(theorem_residual(&psi, &GateOp::cx(6, 4)) < 1e-10);
        assert!(theorem_residual(&psi, &GateOp::rxx(2, 5, -1.1)) < 1e-10);
    }

    #[test]
    fn window_missing_the_span_is_not_global() {
        let mut rng = StdRng::seed_from_u64(23);
        let psi = Mps::random(6, 2, 4, &mut rng);
        let gen = gate_generator(&GateOp::rzz(3, 4, 0.7)).unwrap();
        let dense = mps_to_dense(&psi).unwrap();
        let hpsi = apply_product_operator(&dense, &[(3, &gen.factor_left), (4, &gen.factor_right)], gen.coefficient).unwrap();
        let global = dense_tangent_projector_2site(&psi, &hpsi, ProjectorMode::Global).unwrap();
        let narrow = dense_tangent_projector_2site(&psi, &hpsi, ProjectorMode::Local { lo: 4, hi: 6 }).unwrap();
        assert!(global.sub(&narrow).norm() > 1e-3 * hpsi.norm());
    }
}
