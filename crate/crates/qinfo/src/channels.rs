// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Completely positive maps in Kraus form, Choi calculus and channel distances.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matkit::{
    self, fix_phase, herm_eig, hs_inner, kron, op_norm, partial_trace, trace_norm, CMatrix, C64, ONE, ZERO,
};
use crate::randkit::random_pure;
use crate::states::{PureState, State};

/// Largest Choi matrix (din·dout) built by default.
pub const DEFAULT_CHOI_CAP: usize = 4096;
/// Relative tolerance for Choi positivity and rank.
pub const CHOI_TOL: f64 = 1e-9;

/// Completely positive map X ↦ Σ E X E†.
#[derive(Clone, Debug)]
pub struct Channel {
    din: usize,
    dout: usize,
    kraus: Vec<CMatrix>,
}

impl Channel {
    pub fn new(din: usize, dout: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Dimension("a channel needs at least one Kraus operator".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.shape() != (dout, din)) {
            return Err(Error::Dimension(format!("Kraus operator {:?}, expected {dout}x{din}", k.shape())));
        }
        Ok(Self { din, dout, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self { din: d, dout: d, kraus: vec![CMatrix::identity(d)] }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        let (r, c) = u.shape();
        Self::new(c, r, vec![u])
    }

    /// X ↦ Σ p_i U_i X U_i†
    pub fn mixture(probs: &[f64], ops: &[CMatrix]) -> Result<Self> {
        if probs.len() != ops.len() || probs.iter().any(|&p| p < 0.0) {
            return Err(Error::Probability("one nonnegative weight per operator".into()));
        }
        let (r, c) = ops.first().ok_or_else(|| Error::Dimension("empty list".into()))?.shape();
        Self::new(c, r, probs.iter().zip(ops).map(|(p, u)| u.scale_re(p.sqrt())).collect())
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Σ E X E† on an arbitrary input matrix.
    pub fn apply_mat(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dout, self.dout);
        for e in &self.kraus {
            let ex = e.matmul(x);
            out += &e.matmul(&ex.adjoint()).adjoint();
        }
        out
    }

    /// Σ E† E
    pub fn kraus_gram(&self) -> CMatrix {
        let mut s = CMatrix::zeros(self.din, self.din);
        for e in &self.kraus {
            s += &e.adjoint().matmul(e);
        }
        s
    }

    /// Σ E E†
    pub fn kraus_outer(&self) -> CMatrix {
        let mut s = CMatrix::zeros(self.dout, self.dout);
        for e in &self.kraus {
            s += &e.matmul(&e.adjoint());
        }
        s
    }
}

/// Unnormalized Choi matrix J = Σ_ij |i><j| ⊗ T(|i><j|), input factor first.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    din: usize,
    dout: usize,
    j: CMatrix,
}

impl ChoiMatrix {
    pub fn new(din: usize, dout: usize, j: CMatrix) -> Result<Self> {
        if j.shape() != (din * dout, din * dout) {
            return Err(Error::Dimension(format!("Choi {:?} for {din}->{dout}", j.shape())));
        }
        let defect = j.hermiticity_defect();
        if defect > matkit::HERM_TOL * (1.0 + j.frobenius()) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { din, dout, j: j.hermitian_part() })
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.j
    }

    pub fn is_cp(&self) -> Result<bool> {
        let e = herm_eig(&self.j)?;
        Ok(e.values.first().copied().unwrap_or(0.0) >= -CHOI_TOL * e.max_abs())
    }

    /// Tr_out J = I
    pub fn is_tp(&self) -> Result<bool> {
        let t = partial_trace(&self.j, &[self.din, self.dout], &[0])?;
        Ok(t.max_abs_diff(&CMatrix::identity(self.din)) <= CHOI_TOL)
    }

    /// Tr_in J = I
    pub fn is_unital(&self) -> Result<bool> {
        let t = partial_trace(&self.j, &[self.din, self.dout], &[1])?;
        Ok(t.max_abs_diff(&CMatrix::identity(self.dout)) <= CHOI_TOL)
    }

    pub fn rank(&self) -> Result<usize> {
        let e = herm_eig(&self.j)?;
        let top = e.max_abs();
        Ok(e.values.iter().filter(|&&v| v.abs() > CHOI_TOL * top).count())
    }

    /// T(X) = Tr_in[(Xᵀ ⊗ I) J]
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let (din, dout) = (self.din, self.dout);
        let mut out = CMatrix::zeros(dout, dout);
        for i in 0..din {
            for k in 0..din {
                let xik = x[(i, k)];
                if xik == ZERO {
                    continue;
                }
                for a in 0..dout {
                    for b in 0..dout {
                        out[(a, b)] += xik * self.j[(i * dout + a, k * dout + b)];
                    }
                }
            }
        }
        out
    }
}

pub fn choi(ch: &Channel) -> Result<ChoiMatrix> {
    choi_with_cap(ch, DEFAULT_CHOI_CAP)
}

pub fn choi_with_cap(ch: &Channel, cap: usize) -> Result<ChoiMatrix> {
    let (din, dout) = (ch.din, ch.dout);
    let dim = din * dout;
    if dim > cap {
        return Err(Error::ChoiTooLarge { dim, cap });
    }
    let mut j = CMatrix::zeros(dim, dim);
    for e in &ch.kraus {
        let v = kraus_vector(e);
        for (p, &vp) in v.iter().enumerate() {
            if vp == ZERO {
                continue;
            }
            for (q, &vq) in v.iter().enumerate() {
                j[(p, q)] += vp * vq.conj();
            }
        }
    }
    Ok(ChoiMatrix { din, dout, j })
}

/// |E>> = Σ_i |i> ⊗ E|i>, so that J = Σ |E>><<E|.
pub fn kraus_vector(e: &CMatrix) -> Vec<C64> {
    let (dout, din) = e.shape();
    let mut v = vec![ZERO; din * dout];
    for i in 0..din {
        for a in 0..dout {
            v[i * dout + a] = e[(a, i)];
        }
    }
    v
}

/// Minimal Kraus family read off the eigendecomposition of J, eigenvalues descending.
pub fn kraus_from_choi(j: &ChoiMatrix) -> Result<Channel> {
    let e = herm_eig(&j.j)?;
    let top = e.max_abs();
    let lo = e.values.first().copied().unwrap_or(0.0);
    if lo < -CHOI_TOL * top {
        return Err(Error::NotPsd(lo));
    }
    let (din, dout) = (j.din, j.dout);
    let mut kraus = Vec::new();
    for k in (0..e.values.len()).rev() {
        let lam = e.values[k];
        if lam <= CHOI_TOL * top {
            continue;
        }
        let mut v = e.vector(k);
        fix_phase(&mut v);
        let s = lam.sqrt();
        kraus.push(CMatrix::from_fn(dout, din, |a, i| v[i * dout + a] * s));
    }
    if kraus.is_empty() {
        kraus.push(CMatrix::zeros(dout, din));
    }
    Channel::new(din, dout, kraus)
}

/// Always true for a Kraus family up to rounding; checked through the Choi spectrum.
pub fn is_cp(ch: &Channel) -> Result<bool> {
    choi(ch)?.is_cp()
}

pub fn is_tp(ch: &Channel) -> bool {
    ch.kraus_gram().max_abs_diff(&CMatrix::identity(ch.din)) <= CHOI_TOL
}

pub fn is_unital(ch: &Channel) -> bool {
    ch.din == ch.dout && ch.kraus_outer().max_abs_diff(&CMatrix::identity(ch.dout)) <= CHOI_TOL
}

pub fn choi_rank(ch: &Channel) -> Result<usize> {
    choi(ch)?.rank()
}

pub fn apply(ch: &Channel, rho: &State) -> Result<State> {
    if rho.dim() != ch.din {
        return Err(Error::Dimension(format!("state of dimension {} into a {}-dim channel", rho.dim(), ch.din)));
    }
    let out = ch.apply_mat(rho.rho());
    let dims = if ch.din == ch.dout { rho.dims().to_vec() } else { vec![ch.dout] };
    State::from_psd(dims, &out)
}

/// Kraus {E†}: the Hilbert-Schmidt adjoint map.
pub fn adjoint(ch: &Channel) -> Channel {
    Channel { din: ch.dout, dout: ch.din, kraus: ch.kraus.iter().map(CMatrix::adjoint).collect() }
}

/// a ∘ b (b acts first).
pub fn compose(a: &Channel, b: &Channel) -> Result<Channel> {
    if b.dout != a.din {
        return Err(Error::Dimension(format!("compose {}->{} after {}->{}", a.din, a.dout, b.din, b.dout)));
    }
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for ea in &a.kraus {
        for eb in &b.kraus {
            kraus.push(ea.matmul(eb));
        }
    }
    Channel::new(b.din, a.dout, kraus)
}

pub fn tensor(a: &Channel, b: &Channel) -> Channel {
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for ea in &a.kraus {
        for eb in &b.kraus {
            kraus.push(kron(ea, eb));
        }
    }
    Channel { din: a.din * b.din, dout: a.dout * b.dout, kraus }
}

/// Stinespring isometry V = Σ_i E_i ⊗ |i>: C^din -> C^dout ⊗ C^k.
pub fn stinespring(ch: &Channel) -> CMatrix {
    let k = ch.kraus.len();
    let mut v = CMatrix::zeros(ch.dout * k, ch.din);
    for (t, e) in ch.kraus.iter().enumerate() {
        for a in 0..ch.dout {
            for x in 0..ch.din {
                v[(a * k + t, x)] = e[(a, x)];
            }
        }
    }
    v
}

/// ρ ↦ Tr_out[V ρ V†], a channel into the k-dim environment.
pub fn complementary(ch: &Channel) -> Result<Channel> {
    let dev = ch.kraus_gram().max_abs_diff(&CMatrix::identity(ch.din));
    if dev > CHOI_TOL {
        return Err(Error::NotTracePreserving(dev));
    }
    let k = ch.kraus.len();
    let kraus = (0..ch.dout)
        .map(|a| CMatrix::from_fn(k, ch.din, |t, x| ch.kraus[t][(a, x)]))
        .collect();
    Channel::new(ch.din, k, kraus)
}

/// Classical channel from a column-stochastic kernel `n[y][x] = N(y|x)`,
/// Kraus E_xy = √N(y|x) |y><x|.
pub fn classical_channel(n: &[Vec<f64>]) -> Result<Channel> {
    let (ny, nx) = kernel_shape(n)?;
    let mut kraus = Vec::new();
    for x in 0..nx {
        for (y, row) in n.iter().enumerate() {
            if row[x] > 0.0 {
                let mut e = CMatrix::zeros(ny, nx);
                e[(y, x)] = C64::new(row[x].sqrt(), 0.0);
                kraus.push(e);
            }
        }
    }
    Channel::new(nx, ny, kraus)
}

/// (outputs, inputs) of a validated column-stochastic kernel.
pub fn kernel_shape(n: &[Vec<f64>]) -> Result<(usize, usize)> {
    let ny = n.len();
    let nx = n.first().map_or(0, |r| r.len());
    if ny == 0 || nx == 0 || n.iter().any(|r| r.len() != nx) {
        return Err(Error::Dimension("kernel must be a nonempty rectangular array".into()));
    }
    for x in 0..nx {
        let col: f64 = n.iter().map(|r| r[x]).sum();
        if n.iter().any(|r| r[x] < 0.0 || !r[x].is_finite()) || (col - 1.0).abs() > 1e-12 {
            return Err(Error::NotStochastic(x));
        }
    }
    Ok((ny, nx))
}

/// Schur multiplier x ↦ [φ_ij x_ij].
#[derive(Clone, Debug)]
pub struct SchurMap {
    pub phi: CMatrix,
}

impl SchurMap {
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let n = self.phi.rows();
        CMatrix::from_fn(n, n, |i, j| self.phi[(i, j)] * x[(i, j)])
    }

    /// J[(i,i),(j,j)] = φ_ij, zero elsewhere.
    pub fn choi(&self) -> Result<ChoiMatrix> {
        let n = self.phi.rows();
        let mut j = CMatrix::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                j[(a * n + a, b * n + b)] = self.phi[(a, b)];
            }
        }
        ChoiMatrix::new(n, n, j)
    }

    pub fn is_cp(&self) -> Result<bool> {
        self.choi()?.is_cp()
    }

    /// Kraus form D_k = diag(√λ_k v_k) when φ = Σ λ_k v_k v_k† is PSD.
    pub fn to_channel(&self) -> Result<Channel> {
        let e = herm_eig(&self.phi)?;
        let top = e.max_abs();
        let lo = e.values.first().copied().unwrap_or(0.0);
        if lo < -CHOI_TOL * top {
            return Err(Error::NotPsd(lo));
        }
        let n = self.phi.rows();
        let kraus: Vec<CMatrix> = (0..n)
            .rev()
            .filter(|&k| e.values[k] > CHOI_TOL * top)
            .map(|k| {
                let s = e.values[k].sqrt();
                CMatrix::from_diag(&e.vector(k).iter().map(|z| z * s).collect::<Vec<_>>())
            })
            .collect();
        Channel::new(n, n, kraus)
    }
}

pub fn schur_channel(phi: CMatrix) -> Result<SchurMap> {
    if !phi.is_square() {
        return Err(Error::Dimension("Schur symbol must be square".into()));
    }
    Ok(SchurMap { phi })
}

/// U with B_i = Σ_j u_ij A_j and U†U = I, for a linearly independent family `a`.
pub fn kraus_change_of_basis(a: &[CMatrix], b: &[CMatrix]) -> Result<CMatrix> {
    let shape = a.first().ok_or_else(|| Error::Dimension("empty Kraus family".into()))?.shape();
    if a.iter().chain(b).any(|k| k.shape() != shape) || b.is_empty() {
        return Err(Error::Dimension("Kraus operators of different shapes".into()));
    }
    let r = a.len();
    let gram = CMatrix::from_fn(r, r, |l, j| hs_inner(&a[l], &a[j]).expect("same shape"));
    let rank = matkit::rank(&gram, 1e-12);
    if rank < r {
        return Err(Error::NotMinimal { rank, len: r });
    }
    let (dout, din) = shape;
    let ja = choi(&Channel::new(din, dout, a.to_vec())?)?;
    let jb = choi(&Channel::new(din, dout, b.to_vec())?)?;
    let dist = ja.j.max_abs_diff(&jb.j);
    if dist >= 1e-6 {
        return Err(Error::NotEquivalent(dist));
    }
    let ginv = matkit::matrix_function(&gram, matkit::MatFn::Pinv)?;
    let p = b.len();
    let mut u = CMatrix::zeros(p, r);
    for (i, bi) in b.iter().enumerate() {
        let proj: Vec<C64> = a.iter().map(|al| hs_inner(al, bi).expect("same shape")).collect();
        for j in 0..r {
            u[(i, j)] = (0..r).map(|l| ginv[(j, l)] * proj[l]).sum();
        }
    }
    let mut worst: f64 = 0.0;
    for (i, bi) in b.iter().enumerate() {
        let mut rec = CMatrix::zeros(dout, din);
        for (j, aj) in a.iter().enumerate() {
            rec += &aj.scale(u[(i, j)]);
        }
        worst = worst.max(op_norm(&(&rec - bi)));
    }
    if worst > 1e-8 {
        return Err(Error::NotEquivalent(worst));
    }
    Ok(u)
}

pub const ONE_TO_ONE_RESTARTS: usize = 16;

/// Lower bound on ‖a − b‖_{1→1} by alternating sign-operator and
/// top-eigenvector steps; the value is attained at the returned witness.
pub fn one_to_one_norm_lb<R: Rng + ?Sized>(
    a: &Channel,
    b: &Channel,
    restarts: usize,
    iters: usize,
    rng: &mut R,
) -> Result<(f64, PureState)> {
    if a.din != b.din || a.dout != b.dout {
        return Err(Error::Dimension("channels act between different spaces".into()));
    }
    let d = a.din;
    let (aa, ba) = (adjoint(a), adjoint(b));
    let value = |psi: &[C64]| {
        let p = CMatrix::outer(psi, psi);
        trace_norm(&(&a.apply_mat(&p) - &b.apply_mat(&p)))
    };
    let mut best: Option<(f64, Vec<C64>)> = None;
    for s in 0..restarts.max(1) {
        let mut psi = if s == 0 { matkit::ket(d, 0) } else { random_pure(&[d], rng).vec().to_vec() };
        let mut val = value(&psi);
        for _ in 0..iters {
            let p = CMatrix::outer(&psi, &psi);
            let diff = &a.apply_mat(&p) - &b.apply_mat(&p);
            let e = herm_eig(&diff.hermitian_part())?;
            let sign = e.rebuild(|x| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 });
            let pulled = &aa.apply_mat(&sign) - &ba.apply_mat(&sign);
            let h = herm_eig(&pulled.hermitian_part())?;
            let top = h.values.len() - 1;
            let k = if h.values[top] >= -h.values[0] { top } else { 0 };
            let cand = h.vector(k);
            let nv = value(&cand);
            if nv <= val * (1.0 + 1e-14) {
                break;
            }
            psi = cand;
            val = nv;
        }
        if best.as_ref().is_none_or(|(bv, _)| val > *bv) {
            best = Some((val, psi));
        }
    }
    let (v, psi) = best.expect("one restart");
    Ok((v, PureState::normalized(vec![d], psi)?))
}

/// Channels whose Choi matrices are (1 − F)/(d − 1) and (1 + F)/(d + 1),
/// F the swap: normalized antisymmetric and symmetric projectors.
pub fn swap_projector_pair(d: usize) -> Result<(Channel, Channel)> {
    let swap = swap_operator(d);
    let id = CMatrix::identity(d * d);
    let anti = (&id - &swap).scale_re(1.0 / (d as f64 - 1.0));
    let sym = (&id + &swap).scale_re(1.0 / (d as f64 + 1.0));
    Ok((kraus_from_choi(&ChoiMatrix::new(d, d, anti)?)?, kraus_from_choi(&ChoiMatrix::new(d, d, sym)?)?))
}

/// Σ |ij><ji|
pub fn swap_operator(d: usize) -> CMatrix {
    let mut f = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(i * d + j, j * d + i)] = ONE;
        }
    }
    f
}

/// Choi matrix of the transpose map on M_d (the swap operator).
pub fn transpose_map_choi(d: usize) -> ChoiMatrix {
    ChoiMatrix { din: d, dout: d, j: swap_operator(d) }
}

/// ‖T_n(a)‖/‖a‖ for a = Σ e_ij ⊗ e_ji and T_n the blockwise transpose.
pub fn transpose_channel_norm_demo(n: usize) -> f64 {
    let mut a = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            // Block (i, j) holds e_ji.
            a[(i * n + j, j * n + i)] = ONE;
        }
    }
    let mut ta = CMatrix::zeros(n * n, n * n);
    for bi in 0..n {
        for bj in 0..n {
            let blk = a.block(bi * n, bi * n + n, bj * n, bj * n + n).transpose();
            ta.set_block(bi * n, bj * n, &blk);
        }
    }
    op_norm(&ta) / op_norm(&a)
}
