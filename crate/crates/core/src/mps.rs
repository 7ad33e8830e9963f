//! Matrix product states with an explicit orthogonality center.
//!
//! A state of `N` sites with local dimension `d` is stored as a chain of
//! rank-3 tensors `M_n[q, a, b]` (physical index `q`, left bond `a`, right
//! bond `b`) with boundary bonds of dimension one. Every public method leaves
//! the state in mixed canonical form: tensors left of the center satisfy
//! `Σ_q M^{q†} M^q = I`, tensors right of it satisfy `Σ_q M^q M^{q†} = I`.
//!
//! Internally a site tensor is a flat buffer with the left bond running
//! fastest, then the physical index, then the right bond. This makes both
//! matricizations `(left·phys) × right` and `left × (phys·right)` plain
//! column-major views of the same buffer.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, matmul, DenseMatrix, TruncationReport};

#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor {
    left: usize,
    phys: usize,
    right: usize,
    data: Vec<C64>,
}

impl SiteTensor {
    pub fn zeros(left: usize, phys: usize, right: usize) -> Self {
        Self { left, phys, right, data: vec![C64::new(0.0, 0.0); left * phys * right] }
    }

    pub fn left_dim(&self) -> usize {
        self.left
    }

    pub fn phys_dim(&self) -> usize {
        self.phys
    }

    pub fn right_dim(&self) -> usize {
        self.right
    }

    #[inline]
    fn offset(&self, q: usize, a: usize, b: usize) -> usize {
        a + self.left * (q + self.phys * b)
    }

    /// Entry `M[q, a, b]` (0-based).
    pub fn get(&self, q: usize, a: usize, b: usize) -> C64 {
        self.data[self.offset(q, a, b)]
    }

    pub fn set(&mut self, q: usize, a: usize, b: usize, value: C64) {
        let i = self.offset(q, a, b);
        self.data[i] = value;
    }

    /// The `left × right` matrix `M^q`.
    pub fn matrix(&self, q: usize) -> DenseMatrix {
        DenseMatrix::from_fn(self.left, self.right, |a, b| self.get(q, a, b))
    }

    pub fn scale(&mut self, factor: C64) {
        for z in &mut self.data {
            *z *= factor;
        }
    }

    pub(crate) fn as_left_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_column_slice(self.left * self.phys, self.right, &self.data)
    }

    pub(crate) fn as_right_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_column_slice(self.left, self.phys * self.right, &self.data)
    }

    pub(crate) fn from_left_matrix(m: DenseMatrix, phys: usize) -> Self {
        debug_assert_eq!(m.nrows() % phys, 0);
        Self { left: m.nrows() / phys, phys, right: m.ncols(), data: m.as_slice().to_vec() }
    }

    pub(crate) fn from_right_matrix(m: DenseMatrix, phys: usize) -> Self {
        debug_assert_eq!(m.ncols() % phys, 0);
        Self { left: m.nrows(), phys, right: m.ncols() / phys, data: m.as_slice().to_vec() }
    }

    pub(crate) fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn from_flat(left: usize, phys: usize, right: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), left * phys * right);
        Self { left, phys, right, data }
    }
}

/// Upper bound `d^min(n, N-n)` for the bond between sites `n` and `n+1`.
pub fn max_bond_dim(num_sites: usize, local_dim: usize, bond: usize) -> usize {
    let exp = bond.min(num_sites - bond) as u32;
    local_dim.checked_pow(exp).unwrap_or(usize::MAX)
}

/// Bytes held by an MPS whose bonds are all at their cap
/// `min(chi_max, d^min(n, N-n))`, plus the largest two-site block and its
/// SVD factors. Saturates instead of overflowing.
pub fn peak_memory_bytes(num_sites: usize, local_dim: usize, chi_max: usize) -> u64 {
    let entry = std::mem::size_of::<C64>() as u64;
    let bond = |b: usize| -> u64 {
        if b == 0 || b == num_sites {
            1
        } else {
            max_bond_dim(num_sites, local_dim, b).min(chi_max) as u64
        }
    };
    let d = local_dim as u64;
    let mut tensors = 0u64;
    let mut block = 0u64;
    for n in 1..=num_sites {
        tensors = tensors.saturating_add(bond(n - 1).saturating_mul(d).saturating_mul(bond(n)));
        if n < num_sites {
            let side = bond(n - 1).saturating_mul(d).max(d.saturating_mul(bond(n + 1)));
            block = block.max(side.saturating_mul(side));
        }
    }
    // theta, U, V and the Krylov basis are each at most one block
    tensors.saturating_add(block.saturating_mul(4)).saturating_mul(entry)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    tensors: Vec<SiteTensor>,
    local_dim: usize,
    /// 0-based; `None` only transiently inside operations.
    center: Option<usize>,
}

impl Mps {
    /// Computational-basis product state `|labels[0] labels[1] ...⟩`.
    pub fn product_state(num_sites: usize, local_dim: usize, labels: &[usize]) -> Result<Self> {
        if num_sites == 0 || local_dim == 0 {
            return Err(Error::InvalidInput("need at least one site of dimension >= 1".into()));
        }
        if labels.len() != num_sites {
            return Err(Error::InvalidInput(format!("{} labels for {num_sites} sites", labels.len())));
        }
        let mut tensors = Vec::with_capacity(num_sites);
        for (n, &q) in labels.iter().enumerate() {
            if q >= local_dim {
                return Err(Error::InvalidInput(format!("label {q} at site {} exceeds local dimension {local_dim}", n + 1)));
            }
            let mut t = SiteTensor::zeros(1, local_dim, 1);
            t.set(q, 0, 0, C64::new(1.0, 0.0));
            tensors.push(t);
        }
        Ok(Self { tensors, local_dim, center: Some(0) })
    }

    /// Product state where every site holds the given local vector (normalized).
    pub fn uniform_product(num_sites: usize, local: &[C64]) -> Result<Self> {
        let norm = linalg::vec_norm(local);
        if num_sites == 0 || local.is_empty() || norm == 0.0 {
            return Err(Error::InvalidInput("empty or zero local state".into()));
        }
        let d = local.len();
        let tensors = (0..num_sites).map(|_| SiteTensor::from_flat(1, d, 1, local.iter().map(|z| z / norm).collect())).collect();
        Ok(Self { tensors, local_dim: d, center: Some(0) })
    }

    /// Random normalized state with bond dimensions `min(chi, d^min(n, N-n))`,
    /// centered at site 1.
    pub fn random<R: Rng + ?Sized>(num_sites: usize, local_dim: usize, chi: usize, rng: &mut R) -> Self {
        assert!(num_sites >= 1 && local_dim >= 1 && chi >= 1);
        let bonds: Vec<usize> =
            (0..=num_sites).map(|b| if b == 0 || b == num_sites { 1 } else { chi.min(max_bond_dim(num_sites, local_dim, b)) }).collect();
        let tensors = (0..num_sites)
            .map(|n| {
                let (l, r) = (bonds[n], bonds[n + 1]);
                let m = linalg::random_complex_matrix(rng, l * local_dim, r);
                SiteTensor::from_left_matrix(m, local_dim)
            })
            .collect();
        let mut psi = Self { tensors, local_dim, center: None };
        psi.canonicalize(0);
        psi.normalize();
        psi
    }

    /// Builds a state from raw tensors and brings it into canonical form
    /// centered at `center` (1-based).
    pub fn from_tensors(tensors: Vec<SiteTensor>, center: usize) -> Result<Self> {
        let psi = Self::validated(tensors, None)?;
        let mut psi = psi;
        psi.check_site(center)?;
        psi.canonicalize(center - 1);
        Ok(psi)
    }

    fn validated(tensors: Vec<SiteTensor>, center: Option<usize>) -> Result<Self> {
        let first = tensors.first().ok_or_else(|| Error::InvalidInput("MPS needs at least one tensor".into()))?;
        let d = first.phys;
        if first.left != 1 || tensors.last().map(|t| t.right) != Some(1) {
            return Err(Error::InvalidInput("boundary bonds must have dimension 1".into()));
        }
        for (n, t) in tensors.iter().enumerate() {
            if t.phys != d {
                return Err(Error::InvalidInput(format!("site {} has physical dimension {}", n + 1, t.phys)));
            }
            if t.data.len() != t.left * t.phys * t.right {
                return Err(Error::InvalidInput(format!("site {} buffer length mismatch", n + 1)));
            }
            if n + 1 < tensors.len() && t.right != tensors[n + 1].left {
                return Err(Error::InvalidInput(format!("bond {} mismatch: {} vs {}", n + 1, t.right, tensors[n + 1].left)));
            }
        }
        Ok(Self { tensors, local_dim: d, center })
    }

    pub fn num_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Orthogonality center (1-based).
    pub fn center(&self) -> usize {
        self.center.expect("public MPS values are always centered") + 1
    }

    /// `χ_1 .. χ_{N-1}`.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.tensors.len() - 1].iter().map(|t| t.right).collect()
    }

    /// `Σ_j χ_j³` over the internal bonds.
    pub fn cost(&self) -> u64 {
        self.bond_dims().iter().map(|&c| (c as u64).pow(3)).sum()
    }

    pub fn tensor(&self, site: usize) -> &SiteTensor {
        &self.tensors[site - 1]
    }

    pub fn tensors(&self) -> &[SiteTensor] {
        &self.tensors
    }

    pub(crate) fn tensors_mut(&mut self) -> &mut [SiteTensor] {
        &mut self.tensors
    }

    pub(crate) fn center_idx(&self) -> Option<usize> {
        self.center
    }

    pub(crate) fn set_center_idx(&mut self, idx: usize) {
        self.center = Some(idx);
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.num_sites() {
            Err(Error::SiteOutOfRange { site, num_sites: self.num_sites() })
        } else {
            Ok(())
        }
    }

    // -----------------------------------------------------------------------
    // gauge

    fn move_right(&mut self, i: usize) {
        let d = self.local_dim;
        let (q, r) = linalg::qr_orthonormalize(&self.tensors[i].as_left_matrix()).expect("finite tensor");
        self.tensors[i] = SiteTensor::from_left_matrix(q, d);
        let next = matmul(&r, &self.tensors[i + 1].as_right_matrix());
        self.tensors[i + 1] = SiteTensor::from_right_matrix(next, d);
    }

    fn move_left(&mut self, i: usize) {
        let d = self.local_dim;
        let x = self.tensors[i].as_right_matrix();
        let (q, r) = linalg::qr_orthonormalize(&x.adjoint()).expect("finite tensor");
        self.tensors[i] = SiteTensor::from_right_matrix(q.adjoint(), d);
        let prev = matmul(&self.tensors[i - 1].as_left_matrix(), &r.adjoint());
        self.tensors[i - 1] = SiteTensor::from_left_matrix(prev, d);
    }

    /// Full two-way sweep; used when no canonical structure can be assumed.
    fn canonicalize(&mut self, target: usize) {
        let n = self.num_sites();
        for i in 0..n - 1 {
            self.move_right(i);
        }
        for i in (target + 1..n).rev() {
            self.move_left(i);
        }
        self.center = Some(target);
    }

    pub(crate) fn shift_center_idx(&mut self, target: usize) {
        let Some(mut c) = self.center else {
            self.canonicalize(target);
            return;
        };
        while c < target {
            self.move_right(c);
            c += 1;
        }
        while c > target {
            self.move_left(c);
            c -= 1;
        }
        self.center = Some(target);
    }

    /// Moves the orthogonality center to `target` (1-based) by QR steps.
    pub fn shift_center(&mut self, target: usize) -> Result<()> {
        self.check_site(target)?;
        self.shift_center_idx(target - 1);
        Ok(())
    }

    /// Residual of the canonical condition of every site (0 at the center).
    pub fn canonical_residuals(&self) -> Vec<f64> {
        let c = self.center.unwrap_or(usize::MAX);
        self.tensors
            .iter()
            .enumerate()
            .map(|(n, t)| {
                if n < c {
                    let a = t.as_left_matrix();
                    linalg::unitarity_deviation(&a)
                } else if n > c {
                    let b = t.as_right_matrix();
                    linalg::unitarity_deviation(&b.adjoint())
                } else {
                    0.0
                }
            })
            .collect()
    }

    // -----------------------------------------------------------------------
    // contractions

    /// `⟨ψ| O_1 ⊗ ... ⊗ O_N |ψ⟩` where unspecified sites carry the identity.
    /// Independent of the gauge.
    pub(crate) fn sandwich(&self, ops: &[(usize, &DenseMatrix)]) -> C64 {
        let mut env = DenseMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for (n, t) in self.tensors.iter().enumerate() {
            let op = ops.iter().find(|(s, _)| *s == n).map(|(_, o)| *o);
            let slices: Vec<DenseMatrix> = (0..t.phys).map(|q| t.matrix(q)).collect();
            let mut next = DenseMatrix::zeros(t.right, t.right);
            for (p, bra) in slices.iter().enumerate() {
                let bra_env = matmul(&bra.adjoint(), &env);
                for (pp, ket) in slices.iter().enumerate() {
                    let w = match op {
                        Some(o) => o[(p, pp)],
                        None if p == pp => C64::new(1.0, 0.0),
                        None => continue,
                    };
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    next += matmul(&bra_env, ket) * w;
                }
            }
            env = next;
        }
        env[(0, 0)]
    }

    pub fn norm(&self) -> f64 {
        self.sandwich(&[]).re.max(0.0).sqrt()
    }

    pub fn normalize(&mut self) {
        let nrm = self.norm();
        if nrm > 0.0 {
            let idx = self.center.unwrap_or(0);
            self.tensors[idx].scale(C64::new(1.0 / nrm, 0.0));
        }
    }

    fn check_operator(&self, op: &DenseMatrix, what: &str) -> Result<()> {
        let d = self.local_dim;
        if op.shape() != (d, d) {
            return Err(Error::InvalidInput(format!("{what} must be {d}x{d}, got {:?}", op.shape())));
        }
        linalg::ensure_finite(op, what)
    }

    /// Contracts `u` into the physical leg of `site`. Bond dimensions and the
    /// canonical structure are untouched.
    pub fn apply_single_qubit_gate(&mut self, site: usize, u: &DenseMatrix, strict: bool) -> Result<()> {
        self.check_site(site)?;
        self.check_operator(u, "single-site gate")?;
        if strict {
            let deviation = linalg::unitarity_deviation(u);
            if deviation > 1e-12 {
                return Err(Error::NotUnitary { deviation });
            }
        }
        let t = &self.tensors[site - 1];
        let (l, d, r) = (t.left, t.phys, t.right);
        let mut out = SiteTensor::zeros(l, d, r);
        for b in 0..r {
            for q in 0..d {
                for qq in 0..d {
                    let w = u[(q, qq)];
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for a in 0..l {
                        let i = out.offset(q, a, b);
                        out.data[i] += w * t.get(qq, a, b);
                    }
                }
            }
        }
        self.tensors[site - 1] = out;
        Ok(())
    }

    pub fn expectation_single(&self, site: usize, op: &DenseMatrix) -> Result<f64> {
        self.check_site(site)?;
        self.check_operator(op, "observable")?;
        let num = self.sandwich(&[(site - 1, op)]);
        Ok((num / self.sandwich(&[])).re)
    }

    /// `⟨ψ| A_site B_{site+1} |ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn expectation_two_site(&self, site: usize, op_a: &DenseMatrix, op_b: &DenseMatrix) -> Result<f64> {
        self.check_site(site)?;
        if site == self.num_sites() {
            return Err(Error::InvalidInput(format!("sites {site} and {} are not both in the chain", site + 1)));
        }
        self.check_operator(op_a, "observable")?;
        self.check_operator(op_b, "observable")?;
        let num = self.sandwich(&[(site - 1, op_a), (site, op_b)]);
        Ok((num / self.sandwich(&[])).re)
    }

    /// Same as [`Mps::expectation_two_site`] for an arbitrary pair of distinct sites.
    pub fn expectation_pair(&self, site_a: usize, op_a: &DenseMatrix, site_b: usize, op_b: &DenseMatrix) -> Result<f64> {
        self.check_site(site_a)?;
        self.check_site(site_b)?;
        if site_a == site_b {
            return Err(Error::InvalidInput("expectation_pair needs two distinct sites".into()));
        }
        let num = self.sandwich(&[(site_a - 1, op_a), (site_b - 1, op_b)]);
        Ok((num / self.sandwich(&[])).re)
    }

    // -----------------------------------------------------------------------
    // two-site blocks

    /// The merged tensor of sites `i, i+1` (0-based) as a
    /// `(left·d) × (d·right)` matrix.
    pub(crate) fn merge_pair(&self, i: usize) -> DenseMatrix {
        matmul(&self.tensors[i].as_left_matrix(), &self.tensors[i + 1].as_right_matrix())
    }

    /// Splits a merged pair back into sites `i, i+1` with a truncated SVD.
    ///
    /// `s_max` applies to the singular values of the normalized block. If
    /// anything is discarded the block is renormalized to its original norm,
    /// and the reported `discarded_weight` is relative to that norm.
    pub(crate) fn split_pair(
        &mut self,
        i: usize,
        theta: &DenseMatrix,
        s_max: f64,
        chi_max: usize,
        center_right: bool,
    ) -> Result<TruncationReport> {
        let d = self.local_dim;
        let total = theta.norm();
        let svd = linalg::truncated_svd(theta, s_max * total, chi_max)?;
        let kept_weight: f64 = svd.s.iter().map(|s| s * s).sum();
        let mut report = svd.report;
        let mut s = svd.s;
        if report.discarded_weight > 0.0 && kept_weight > 0.0 {
            let rescale = total / kept_weight.sqrt();
            for v in &mut s {
                *v *= rescale;
            }
            report.discarded_weight /= total * total;
            report.singular_values = s.iter().map(|v| v / total).collect();
        } else if total > 0.0 {
            report.discarded_weight = 0.0;
            report.singular_values = s.iter().map(|v| v / total).collect();
        }

        let mut u = svd.u;
        let mut v_dag = svd.v_dag;
        if center_right {
            for (k, sv) in s.iter().enumerate() {
                v_dag.row_mut(k).iter_mut().for_each(|z| *z *= sv);
            }
            self.center = Some(i + 1);
        } else {
            for (k, sv) in s.iter().enumerate() {
                u.column_mut(k).iter_mut().for_each(|z| *z *= sv);
            }
            self.center = Some(i);
        }
        self.tensors[i] = SiteTensor::from_left_matrix(u, d);
        self.tensors[i + 1] = SiteTensor::from_right_matrix(v_dag, d);
        Ok(report)
    }

    /// Truncates the bond between `bond` and `bond + 1` (1-based). The center
    /// must sit on one of the two sites and stays there.
    pub fn truncate_bond(&mut self, bond: usize, s_max: f64, chi_max: usize) -> Result<TruncationReport> {
        self.check_site(bond)?;
        if bond == self.num_sites() {
            return Err(Error::InvalidInput(format!("bond {bond} is a chain boundary")));
        }
        let c = self.center;
        if c != Some(bond - 1) && c != Some(bond) {
            return Err(Error::CenterMisplaced { expected: bond, found: c.map(|x| x + 1) });
        }
        let theta = self.merge_pair(bond - 1);
        self.split_pair(bond - 1, &theta, s_max, chi_max, c == Some(bond))
    }

    // -----------------------------------------------------------------------
    // debug dump

    pub fn to_dump(&self) -> MpsDump {
        MpsDump {
            num_sites: self.num_sites(),
            local_dim: self.local_dim,
            center: self.center(),
            tensors: self
                .tensors
                .iter()
                .map(|t| {
                    let mut entries = Vec::with_capacity(t.data.len());
                    for q in 0..t.phys {
                        for a in 0..t.left {
                            for b in 0..t.right {
                                let z = t.get(q, a, b);
                                entries.push([z.re, z.im]);
                            }
                        }
                    }
                    TensorDump { shape: [t.phys, t.left, t.right], entries }
                })
                .collect(),
        }
    }

    pub fn from_dump(dump: &MpsDump) -> Result<Self> {
        let mut tensors = Vec::with_capacity(dump.tensors.len());
        for (n, td) in dump.tensors.iter().enumerate() {
            let [d, l, r] = td.shape;
            if td.entries.len() != d * l * r {
                return Err(Error::InvalidInput(format!("tensor {} has {} entries, shape needs {}", n + 1, td.entries.len(), d * l * r)));
            }
            let mut t = SiteTensor::zeros(l, d, r);
            let mut it = td.entries.iter();
            for q in 0..d {
                for a in 0..l {
                    for b in 0..r {
                        let [re, im] = *it.next().expect("length checked");
                        t.set(q, a, b, C64::new(re, im));
                    }
                }
            }
            tensors.push(t);
        }
        if tensors.len() != dump.num_sites {
            return Err(Error::InvalidInput("num_sites does not match tensor count".into()));
        }
        let psi = Self::validated(tensors, None)?;
        psi.check_site(dump.center)?;
        if psi.local_dim != dump.local_dim {
            return Err(Error::InvalidInput("local_dim does not match tensors".into()));
        }
        Ok(Self { center: Some(dump.center - 1), ..psi })
    }
}

/// JSON debug form of an MPS. Each tensor lists its shape as
/// `[phys, left, right]` and its entries as `[re, im]` pairs in row-major
/// order over `(q, a, b)`. `center` is 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpsDump {
    pub num_sites: usize,
    pub local_dim: usize,
    pub center: usize,
    pub tensors: Vec<TensorDump>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorDump {
    pub shape: [usize; 3],
    pub entries: Vec<[f64; 2]>,
}

/// Named qubit product states used as circuit inputs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitialState {
    /// `|00…0⟩`
    #[default]
    Zeros,
    /// `|++…+⟩`
    Plus,
    /// `|0101…⟩`
    Neel,
}

impl InitialState {
    pub fn name(self) -> &'static str {
        match self {
            InitialState::Zeros => "zeros",
            InitialState::Plus => "plus",
            InitialState::Neel => "neel",
        }
    }

    pub fn build(self, num_sites: usize) -> Result<Mps> {
        match self {
            InitialState::Zeros => Mps::product_state(num_sites, 2, &vec![0; num_sites]),
            InitialState::Neel => Mps::product_state(num_sites, 2, &(0..num_sites).map(|i| i % 2).collect::<Vec<_>>()),
            InitialState::Plus => Mps::uniform_product(num_sites, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]),
        }
    }
}

impl std::str::FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zeros" | "zero" | "0" => Ok(InitialState::Zeros),
            "plus" | "+" => Ok(InitialState::Plus),
            "neel" => Ok(InitialState::Neel),
            other => Err(Error::InvalidInput(format!("unknown initial state '{other}' (expected zeros, plus or neel)"))),
        }
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::pauli;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell() -> Mps {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = SiteTensor::zeros(1, 2, 2);
        a.set(0, 0, 0, C64::new(s, 0.0));
        a.set(1, 0, 1, C64::new(s, 0.0));
        let mut b = SiteTensor::zeros(2, 2, 1);
        b.set(0, 0, 0, C64::new(1.0, 0.0));
        b.set(1, 1, 0, C64::new(1.0, 0.0));
        Mps::from_tensors(vec![a, b], 1).unwrap()
    }

    #[test]
    fn product_state_basics() {
        let psi = Mps::product_state(2, 2, &[0, 0]).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-14);
        assert_eq!(psi.center(), 1);

        let psi = Mps::product_state(3, 2, &[0, 1, 0]).unwrap();
        let z = psi.expectation_single(2, &pauli::z()).unwrap();
        assert!((z + 1.0).abs() < 1e-14);

        let psi = Mps::product_state(5, 2, &[0; 5]).unwrap();
        assert_eq!(psi.bond_dims(), vec![1; 4]);
    }

    #[test]
    fn product_state_rejects_bad_label() {
        assert!(Mps::product_state(2, 2, &[0, 2]).is_err());
    }

    #[test]
    fn memory_estimate() {
        // N = 2: tensors 4 + 4 entries, block 2x2 -> (8 + 4 * 4) * 16 bytes
        assert_eq!(peak_memory_bytes(2, 2, 8), 384);
        assert!(peak_memory_bytes(49, 2, 512) > peak_memory_bytes(49, 2, 64));
        assert!(peak_memory_bytes(200, 2, usize::MAX) > 0);
    }

    #[test]
    fn named_initial_states() {
        let neel: InitialState = "Neel".parse().unwrap();
        let psi = neel.build(4).unwrap();
        let z: Vec<f64> = (1..=4).map(|s| psi.expectation_single(s, &pauli::z()).unwrap()).collect();
        assert_eq!(z, vec![1.0, -1.0, 1.0, -1.0]);

        let plus = InitialState::Plus.build(3).unwrap();
        assert!((plus.expectation_single(2, &pauli::x()).unwrap() - 1.0).abs() < 1e-14);
        assert!("up".parse::<InitialState>().is_err());
    }

    #[test]
    fn shift_to_current_center_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = Mps::random(5, 2, 4, &mut rng);
        let mut moved = psi.clone();
        moved.shift_center(1).unwrap();
        assert_eq!(psi, moved);
    }

    #[test]
    fn shift_rejects_out_of_range() {
        let mut psi = Mps::product_state(3, 2, &[0; 3]).unwrap();
        assert!(matches!(psi.shift_center(4), Err(Error::SiteOutOfRange { .. })));
        assert!(psi.shift_center(0).is_err());
    }

    #[test]
    fn canonical_residuals_after_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut psi = Mps::random(8, 2, 6, &mut rng);
        for target in [8, 3, 5, 1] {
            psi.shift_center(target).unwrap();
            assert_eq!(psi.center(), target);
            for r in psi.canonical_residuals() {
                assert!(r <= 1e-10, "residual {r}");
            }
        }
    }

    #[test]
    fn scaling_one_tensor_scales_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut psi = Mps::random(5, 2, 3, &mut rng);
        psi.tensors_mut()[3].scale(C64::new(2.0, 0.0));
        assert!((psi.norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn x_gate_flips_qubit() {
        let mut psi = Mps::product_state(1, 2, &[0]).unwrap();
        psi.apply_single_qubit_gate(1, &pauli::x(), true).unwrap();
        assert_eq!(psi.tensor(1).get(1, 0, 0), C64::new(1.0, 0.0));
        assert_eq!(psi.tensor(1).get(0, 0, 0), C64::new(0.0, 0.0));
    }

    #[test]
    fn identity_gate_leaves_state_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = Mps::random(4, 2, 3, &mut rng);
        let mut out = psi.clone();
        out.apply_single_qubit_gate(2, &linalg::identity(2), true).unwrap();
        assert_eq!(psi, out);
    }

    #[test]
    fn strict_mode_rejects_non_unitary() {
        let mut psi = Mps::product_state(2, 2, &[0, 0]).unwrap();
        let m = pauli::x() * C64::new(2.0, 0.0);
        assert!(matches!(psi.apply_single_qubit_gate(1, &m, true), Err(Error::NotUnitary { .. })));
        assert!(psi.apply_single_qubit_gate(1, &m, false).is_ok());
    }

    #[test]
    fn correlators_of_simple_states() {
        let zero = Mps::product_state(2, 2, &[0, 0]).unwrap();
        let xx = zero.expectation_two_site(1, &pauli::x(), &pauli::x()).unwrap();
        assert!(xx.abs() < 1e-14);

        let b = bell();
        let xx = b.expectation_two_site(1, &pauli::x(), &pauli::x()).unwrap();
        assert!((xx - 1.0).abs() < 1e-12);
        assert!(b.expectation_two_site(2, &pauli::x(), &pauli::x()).is_err());
    }

    #[test]
    fn truncating_bell_state_to_one() {
        let mut b = bell();
        let report = b.truncate_bond(1, 0.0, 1).unwrap();
        assert_eq!(report.kept, 1);
        assert!((report.discarded_weight - 0.5).abs() < 1e-12);
        assert!((b.norm() - 1.0).abs() < 1e-12);
        assert_eq!(b.bond_dims(), vec![1]);
    }

    #[test]
    fn truncating_product_state_discards_nothing() {
        let mut psi = Mps::product_state(4, 2, &[1, 0, 1, 1]).unwrap();
        psi.shift_center(2).unwrap();
        let report = psi.truncate_bond(2, 1e-9, 8).unwrap();
        assert_eq!(report.kept, 1);
        assert_eq!(report.discarded_weight, 0.0);
    }

    #[test]
    fn truncate_requires_adjacent_center() {
        let mut psi = Mps::product_state(4, 2, &[0; 4]).unwrap();
        assert!(matches!(psi.truncate_bond(3, 0.0, 2), Err(Error::CenterMisplaced { .. })));
    }

    #[test]
    fn bond_dims_respect_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = Mps::random(7, 2, 100, &mut rng);
        for (b, chi) in psi.bond_dims().into_iter().enumerate() {
            assert!(chi <= max_bond_dim(7, 2, b + 1));
        }
        assert_eq!(psi.bond_dims(), vec![2, 4, 8, 8, 4, 2]);
    }

    #[test]
    fn dump_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut psi = Mps::random(4, 2, 3, &mut rng);
        psi.shift_center(3).unwrap();
        let json = serde_json::to_string(&psi.to_dump()).unwrap();
        let back = Mps::from_dump(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.center(), 3);
        for (a, b) in psi.tensors().iter().zip(back.tensors()) {
            assert_eq!(a, b);
        }
    }
}
