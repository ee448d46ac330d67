// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Knill-Laflamme checks and recovery synthesis for codes given as isometries.
//!
//! Everything is computed through W and the products E·W, so a 512-dim code
//! never needs a Choi matrix or a full projector product.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::matkit::{self, fix_phase, herm_eig, op_norm, trace_norm, CMatrix, C64, I, ONE, ZERO};
use crate::randkit::random_state;

/// Tolerance used when a recovery is synthesized.
pub const KL_TOL: f64 = 1e-9;
/// Branches with d_ii at or below this are dropped.
pub const BRANCH_TOL: f64 = 1e-12;
/// Relative cutoff for the column span used by `verify_recovery`.
const RANGE_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct Code {
    physical_dim: usize,
    logical_dim: usize,
    w: CMatrix,
}

impl Code {
    pub fn new(w: CMatrix) -> Result<Self> {
        let (n, k) = w.shape();
        if k == 0 || k > n {
            return Err(Error::Dimension(format!("isometry shape {n}x{k}")));
        }
        let dev = w.adjoint().matmul(&w).max_abs_diff(&CMatrix::identity(k));
        if dev > 1e-10 {
            return Err(Error::Domain(format!("W†W deviates from I by {dev:.3e}")));
        }
        Ok(Self { physical_dim: n, logical_dim: k, w })
    }

    pub fn physical_dim(&self) -> usize {
        self.physical_dim
    }

    pub fn logical_dim(&self) -> usize {
        self.logical_dim
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.w
    }

    /// P = W W†
    pub fn projector(&self) -> CMatrix {
        self.w.matmul(&self.w.adjoint())
    }

    /// W ρ W†
    pub fn encode(&self, rho: &CMatrix) -> CMatrix {
        self.w.matmul(rho).matmul(&self.w.adjoint())
    }
}

#[derive(Clone, Debug)]
pub struct KlReport {
    pub passes: bool,
    /// α_ij = Tr[W†E_i†E_jW]/k
    pub alpha: CMatrix,
    pub max_residual: f64,
}

fn check_errors(code: &Code, errors: &[CMatrix]) -> Result<()> {
    let n = code.physical_dim;
    if let Some(e) = errors.iter().find(|e| e.shape() != (n, n)) {
        return Err(Error::Dimension(format!("error operator {:?} on a {n}-dim code", e.shape())));
    }
    if errors.is_empty() {
        return Err(Error::Dimension("empty error list".into()));
    }
    Ok(())
}

pub fn kl_check(code: &Code, errors: &[CMatrix], tol: f64) -> Result<KlReport> {
    check_errors(code, errors)?;
    let k = code.logical_dim;
    let ew: Vec<CMatrix> = errors.iter().map(|e| e.matmul(&code.w)).collect();
    let m = errors.len();
    let mut alpha = CMatrix::zeros(m, m);
    let mut worst: f64 = 0.0;
    let id = CMatrix::identity(k);
    for i in 0..m {
        let ai = ew[i].adjoint();
        for j in 0..m {
            let g = ai.matmul(&ew[j]);
            let a = g.trace() / k as f64;
            alpha[(i, j)] = a;
            worst = worst.max(op_norm(&(&g - &id.scale(a))));
        }
    }
    Ok(KlReport { passes: worst <= tol, alpha, max_residual: worst })
}

/// Parts of the synthesized recovery, kept for inspection.
#[derive(Clone, Debug)]
pub struct RecoveryParts {
    /// Eigenvalues d_ii of α, descending.
    pub d: Vec<f64>,
    /// F_i W for the kept branches.
    pub fw: Vec<CMatrix>,
    /// Q = I − Σ V_i V_i†
    pub q: CMatrix,
}

/// Recovery R(X) = Σ V_i† X V_i + Q X Q with V_i = F_i P/√d_ii.
pub fn build_recovery(code: &Code, errors: &[CMatrix]) -> Result<Channel> {
    let parts = recovery_parts(code, errors)?;
    let n = code.physical_dim;
    let w = &code.w;
    let mut kraus: Vec<CMatrix> = Vec::with_capacity(parts.fw.len() + 1);
    for (g, &d) in parts.fw.iter().zip(&parts.d) {
        // V_i† = W (F_i W)†/√d
        kraus.push(w.matmul(&g.adjoint()).scale_re(1.0 / d.sqrt()));
    }
    if parts.q.frobenius() > 1e-12 {
        kraus.push(parts.q);
    }
    Channel::new(n, n, kraus)
}

pub fn recovery_parts(code: &Code, errors: &[CMatrix]) -> Result<RecoveryParts> {
    let rep = kl_check(code, errors, KL_TOL)?;
    if !rep.passes {
        return Err(Error::KlViolated(rep.max_residual));
    }
    let n = code.physical_dim;
    let e = herm_eig(&rep.alpha)?;
    let ew: Vec<CMatrix> = errors.iter().map(|x| x.matmul(&code.w)).collect();
    let mut d = Vec::new();
    let mut fw = Vec::new();
    let mut q = CMatrix::identity(n);
    for t in (0..e.values.len()).rev() {
        let dt = e.values[t];
        if dt <= BRANCH_TOL {
            continue;
        }
        let mut v = e.vector(t);
        fix_phase(&mut v);
        // F_t = Σ_j ū_tj E_j with row t of U equal to v†.
        let mut g = CMatrix::zeros(n, code.logical_dim);
        for (j, x) in ew.iter().enumerate() {
            if v[j] != ZERO {
                g += &x.scale(v[j]);
            }
        }
        sub_outer(&mut q, &g, 1.0 / dt);
        d.push(dt);
        fw.push(g);
    }
    Ok(RecoveryParts { d, fw, q })
}

/// q −= s·g g†, skipping zero rows of g so untouched entries stay exact.
fn sub_outer(q: &mut CMatrix, g: &CMatrix, s: f64) {
    let rows: Vec<usize> = (0..g.rows()).filter(|&i| g.row(i).iter().any(|z| *z != ZERO)).collect();
    for &i in &rows {
        for &j in &rows {
            let v: C64 = g.row(i).iter().zip(g.row(j)).map(|(a, b)| a * b.conj()).sum();
            q[(i, j)] -= v * s;
        }
    }
}

/// Weighted error model X ↦ Σ p_i E_i X E_i†.
#[derive(Clone, Debug)]
pub struct Noise {
    pub probs: Vec<f64>,
    pub ops: Vec<CMatrix>,
}

impl Noise {
    pub fn new(probs: Vec<f64>, ops: Vec<CMatrix>) -> Result<Self> {
        if probs.len() != ops.len() || ops.is_empty() {
            return Err(Error::Probability("one weight per error operator".into()));
        }
        if probs.iter().any(|&p| p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Probability("weights must be nonnegative and sum to 1".into()));
        }
        Ok(Self { probs, ops })
    }

    /// Uniform weights 1/m.
    pub fn uniform(ops: Vec<CMatrix>) -> Result<Self> {
        let m = ops.len();
        Self::new(vec![1.0 / m.max(1) as f64; m], ops)
    }
}

/// Largest ‖(R∘E)(WρW†) − WρW†‖₁ over `samples` random logical states.
pub fn verify_recovery<R: Rng + ?Sized>(
    recovery: &Channel,
    noise: &Noise,
    code: &Code,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = code.physical_dim;
    let k = code.logical_dim;
    check_errors(code, &noise.ops)?;
    if recovery.din() != n || recovery.dout() != n {
        return Err(Error::Dimension(format!("recovery {}->{} on a {n}-dim code", recovery.din(), recovery.dout())));
    }
    // R(N(WρW†)) − WρW† = Σ_j p_j G_j ρ G_j† − WρW† with G_j = K E W, so every
    // sample lives on the span of the columns of W and the G_j.
    let mut terms: Vec<(f64, CMatrix)> = Vec::new();
    for (p, e) in noise.probs.iter().zip(&noise.ops) {
        if *p == 0.0 {
            continue;
        }
        let ew = e.matmul(&code.w);
        for kr in recovery.kraus() {
            terms.push((*p, kr.matmul(&ew)));
        }
    }
    let mut cols: Vec<Vec<C64>> = (0..k).map(|a| code.w.column(a)).collect();
    for (_, g) in &terms {
        cols.extend((0..k).map(|a| g.column(a)));
    }
    let basis = matkit::orthonormalize(&cols, RANGE_TOL);
    let q = CMatrix::from_columns(&basis)?;
    let qa = q.adjoint();
    let r = q.cols();
    let wr = qa.matmul(&code.w);
    let reduced: Vec<(f64, CMatrix)> = terms.iter().map(|(p, g)| (*p, qa.matmul(g))).collect();
    // Deviation is linear in ρ: precompute its image on the matrix units.
    let mut delta = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            let mut d = CMatrix::from_fn(r, r, |i, j| -wr[(i, a)] * wr[(j, b)].conj());
            for (p, g) in &reduced {
                for i in 0..r {
                    let gi = g[(i, a)] * *p;
                    for j in 0..r {
                        d[(i, j)] += gi * g[(j, b)].conj();
                    }
                }
            }
            delta.push(d);
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let rho = random_state(&[k], rng).into_rho();
        let mut d = CMatrix::zeros(r, r);
        for a in 0..k {
            for b in 0..k {
                d += &delta[a * k + b].scale(rho[(a, b)]);
            }
        }
        worst = worst.max(trace_norm(&d));
    }
    Ok(worst)
}

const SPAN_TOL: f64 = 1e-8;
const SPAN_VERIFY_TOL: f64 = 1e-7;
const SPAN_SAMPLES: usize = 20;

/// True iff each new error lies in span(base) and the recovery built from
/// `base` corrects the uniform mixture of the new errors.
pub fn span_correction_check(code: &Code, base: &[CMatrix], new: &[CMatrix]) -> Result<bool> {
    check_errors(code, base)?;
    check_errors(code, new)?;
    for e in new {
        if span_residual(base, e) > SPAN_TOL {
            return Ok(false);
        }
    }
    let rec = build_recovery(code, base)?;
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
    let dev = verify_recovery(&rec, &Noise::uniform(new.to_vec())?, code, SPAN_SAMPLES, &mut rng)?;
    Ok(dev <= SPAN_VERIFY_TOL)
}

fn sparse(m: &CMatrix) -> Vec<(usize, C64)> {
    m.data().iter().enumerate().filter(|(_, z)| **z != ZERO).map(|(i, z)| (i, *z)).collect()
}

fn sparse_inner(a: &[(usize, C64)], b: &CMatrix) -> C64 {
    a.iter().map(|(i, z)| z.conj() * b.data()[*i]).sum()
}

/// Relative Frobenius residual of the least-squares projection of `e` onto span(base).
pub fn span_residual(base: &[CMatrix], e: &CMatrix) -> f64 {
    let sb: Vec<Vec<(usize, C64)>> = base.iter().map(sparse).collect();
    let m = base.len();
    let gram = CMatrix::from_fn(m, m, |i, j| sparse_inner(&sb[i], &base[j]));
    let rhs: Vec<C64> = sb.iter().map(|s| sparse_inner(s, e)).collect();
    let ginv = matkit::matrix_function(&gram, matkit::MatFn::Pinv).expect("Gram is Hermitian");
    let coef = ginv.mat_vec(&rhs);
    let mut res = e.clone();
    for (c, s) in coef.iter().zip(&sb) {
        if *c == ZERO {
            continue;
        }
        for (i, z) in s {
            res.data_mut()[*i] -= c * z;
        }
    }
    let norm = e.frobenius();
    if norm == 0.0 {
        0.0
    } else {
        res.frobenius() / norm
    }
}

/// Single-qubit Pauli `p` ∈ {'I','X','Y','Z'} on qubit `q` (0-based, qubit 0 most significant).
pub fn pauli_on(n: usize, q: usize, p: char) -> CMatrix {
    let dim = 1usize << n;
    let mask = 1usize << (n - 1 - q);
    let mut m = CMatrix::zeros(dim, dim);
    for x in 0..dim {
        let bit = x & mask != 0;
        let (row, amp) = match p {
            'X' => (x ^ mask, ONE),
            'Y' => (x ^ mask, if bit { -I } else { I }),
            'Z' => (x, if bit { -ONE } else { ONE }),
            _ => (x, ONE),
        };
        m[(row, x)] = amp;
    }
    m
}

/// {1, X_i, Y_i, Z_i : i = 1..n}, 3n + 1 operators.
pub fn one_paulis(n: usize) -> Vec<CMatrix> {
    let mut out = vec![CMatrix::identity(1usize << n)];
    for q in 0..n {
        for p in ['X', 'Y', 'Z'] {
            out.push(pauli_on(n, q, p));
        }
    }
    out
}

/// Nine-qubit Shor code, |0_L>, |1_L> = ((|000> ± |111>)/√2)^⊗3.
pub fn shor_code() -> Code {
    let block = |sign: f64| {
        let mut v = vec![ZERO; 8];
        v[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[7] = C64::new(sign * std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v
    };
    let logical = |sign: f64| {
        let b = block(sign);
        matkit::kron_vec(&matkit::kron_vec(&b, &b), &b)
    };
    let w = CMatrix::from_columns(&[logical(1.0), logical(-1.0)]).expect("equal lengths");
    Code::new(w).expect("orthonormal logical states")
}

/// span{|0..0>, |1..1>} on n qubits.
pub fn repetition_code(n: usize) -> Code {
    let dim = 1usize << n;
    let mut w = CMatrix::zeros(dim, 2);
    w[(0, 0)] = ONE;
    w[(dim - 1, 1)] = ONE;
    Code::new(w).expect("orthonormal")
}

/// exp(iθ P) for a Pauli-type P with P² = I.
pub fn pauli_rotation(p: &CMatrix, theta: f64) -> CMatrix {
    let n = p.rows();
    &CMatrix::identity(n).scale_re(theta.cos()) + &p.scale(C64::new(0.0, theta.sin()))
}
