// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Entropies (in bits), strong subadditivity, Petz recovery and Markov states.

use crate::channels::{self, Channel};
use crate::error::{Error, Result};
use crate::matkit::{apply_fn, herm_eig, kron, null_space, trace_norm, CMatrix, MatFn, C64, HERM_TOL, ONE, SUPPORT_TOL};
use crate::states::State;

/// Support-containment tolerance for relative entropy.
pub const SUPPORT_CONTAINMENT_TOL: f64 = 1e-9;
/// Conditional mutual information below this is reported as zero.
pub const CMI_FLOOR: f64 = -1e-8;
/// is_markov rejects ρ_B with a larger condition number on its support.
pub const MAX_CONDITION: f64 = 1e10;

fn entropy_of(m: &CMatrix) -> Result<f64> {
    let e = herm_eig(m)?;
    let top = e.max_abs();
    Ok(e.values
        .iter()
        .filter(|&&x| x > SUPPORT_TOL * top)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0))
}

pub fn von_neumann(rho: &State) -> f64 {
    entropy_of(rho.rho()).expect("states are Hermitian")
}

/// D(ρ‖σ) in bits; `f64::INFINITY` when supp ρ ⊄ supp σ.
pub fn relative_entropy(rho: &State, sigma: &State) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!("relative entropy of {} and {} dims", rho.dim(), sigma.dim())));
    }
    let es = herm_eig(sigma.rho())?;
    let cut = SUPPORT_TOL * es.max_abs();
    let mut cross = 0.0;
    let mut outside = 0.0;
    for (k, &lam) in es.values.iter().enumerate() {
        let v = es.vector(k);
        let w = rho.rho().mat_vec(&v);
        let weight: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        if lam > cut {
            cross += weight * lam.log2();
        } else {
            outside += weight;
        }
    }
    if outside > SUPPORT_CONTAINMENT_TOL {
        return Ok(f64::INFINITY);
    }
    Ok((-von_neumann(rho) - cross).max(0.0))
}

fn expect_parts(rho: &State, n: usize) -> Result<()> {
    if rho.dims().len() != n {
        return Err(Error::Dimension(format!("expected {n} subsystems, got {:?}", rho.dims())));
    }
    Ok(())
}

/// I(A:B) = S(A) + S(B) − S(AB).
pub fn mutual_info(rho: &State) -> Result<f64> {
    expect_parts(rho, 2)?;
    let a = rho.reduced(&[0])?;
    let b = rho.reduced(&[1])?;
    Ok(von_neumann(&a) + von_neumann(&b) - von_neumann(rho))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyReport {
    pub s_ab: f64,
    pub s_bc: f64,
    pub s_b: f64,
    pub s_abc: f64,
    pub cmi: f64,
}

/// I(A:C|B) for a state on A ⊗ B ⊗ C.
pub fn cond_mutual_info(rho: &State) -> Result<EntropyReport> {
    expect_parts(rho, 3)?;
    let s_ab = von_neumann(&rho.reduced(&[0, 1])?);
    let s_bc = von_neumann(&rho.reduced(&[1, 2])?);
    let s_b = von_neumann(&rho.reduced(&[1])?);
    let s_abc = von_neumann(rho);
    let raw = s_ab + s_bc - s_b - s_abc;
    let cmi = if raw < 0.0 && raw >= CMI_FLOOR { 0.0 } else { raw };
    Ok(EntropyReport { s_ab, s_bc, s_b, s_abc, cmi })
}

/// Recovery channel X ↦ √σ T†(T(σ)^{−1/2} X T(σ)^{−1/2}) √σ, with inverses
/// taken on the support of T(σ).
pub fn petz_map(sigma: &State, ch: &Channel) -> Result<Channel> {
    if sigma.dim() != ch.din() {
        return Err(Error::Dimension(format!("state of dim {} into channel on {}", sigma.dim(), ch.din())));
    }
    let dev = (&ch.kraus_gram() - &CMatrix::identity(ch.din())).max_abs();
    if dev > channels::CHOI_TOL {
        return Err(Error::NotTracePreserving(dev));
    }
    let sqrt_sigma = apply_fn(&herm_eig(sigma.rho())?, MatFn::Sqrt)?;
    let out = ch.apply_mat(sigma.rho()).hermitian_part();
    let inv_sqrt = apply_fn(&herm_eig(&out)?, MatFn::PinvSqrt)?;
    let kraus = ch
        .kraus()
        .iter()
        .map(|e| sqrt_sigma.matmul(&e.adjoint()).matmul(&inv_sqrt))
        .collect();
    Channel::new(ch.dout(), ch.din(), kraus)
}

/// Map B → BC, X ↦ √ρ_BC (ρ_B^{−1/2} X ρ_B^{−1/2} ⊗ I_C) √ρ_BC.
pub fn ssa_petz_map(rho_bc: &State, rho_b: &State) -> Result<Channel> {
    let dims = rho_bc.dims();
    if dims.len() != 2 || rho_b.dim() != dims[0] {
        return Err(Error::Dimension(format!("rho_bc dims {:?} with rho_b of dim {}", dims, rho_b.dim())));
    }
    let (db, dc) = (dims[0], dims[1]);
    let sqrt_bc = apply_fn(&herm_eig(rho_bc.rho())?, MatFn::Sqrt)?;
    let inv_b = apply_fn(&herm_eig(rho_b.rho())?, MatFn::PinvSqrt)?;
    let kraus = (0..dc)
        .map(|c| {
            let ket_c = CMatrix::from_fn(dc, 1, |i, _| if i == c { ONE } else { C64::new(0.0, 0.0) });
            sqrt_bc.matmul(&kron(&inv_b, &ket_c))
        })
        .collect();
    Channel::new(db, db * dc, kraus)
}

/// One direct-sum component q · ρ_{A bL} ⊗ ρ_{bR C}.
#[derive(Clone, Debug)]
pub struct MarkovBlock {
    pub q: f64,
    /// Dims [A, bL].
    pub left: State,
    /// Dims [bR, C].
    pub right: State,
}

/// ⊕_j q_j ρ_{A bL_j} ⊗ ρ_{bR_j C} on A ⊗ B ⊗ C, where B = ⊕_j bL_j ⊗ bR_j
/// and block j occupies consecutive basis vectors of B.
pub fn markov_state(blocks: &[MarkovBlock]) -> Result<State> {
    let first = blocks.first().ok_or_else(|| Error::Probability("no blocks".into()))?;
    let total: f64 = blocks.iter().map(|b| b.q).sum();
    if blocks.iter().any(|b| !(b.q >= 0.0) || !b.q.is_finite()) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::Probability(format!("weights sum to {total}")));
    }
    if blocks.iter().any(|b| b.left.dims().len() != 2 || b.right.dims().len() != 2) {
        return Err(Error::Dimension("each factor must be bipartite".into()));
    }
    let da = first.left.dims()[0];
    let dc = first.right.dims()[1];
    if blocks.iter().any(|b| b.left.dims()[0] != da || b.right.dims()[1] != dc) {
        return Err(Error::Dimension("A and C dimensions differ across blocks".into()));
    }
    let db: usize = blocks.iter().map(|b| b.left.dims()[1] * b.right.dims()[0]).sum();
    let n = da * db * dc;
    let mut rho = CMatrix::zeros(n, n);
    let mut offset = 0;
    for blk in blocks {
        let (bl, br) = (blk.left.dims()[1], blk.right.dims()[0]);
        let local = kron(blk.left.rho(), blk.right.rho());
        // local index ((a·bl + l)·br + r)·dc + c  ↦  (a·db + offset + l·br + r)·dc + c
        let m = bl * br * dc;
        let map = |t: usize| {
            let a = t / m;
            let rest = t % m;
            (a * db + offset + rest / dc) * dc + rest % dc
        };
        let dl = da * m;
        for i in 0..dl {
            let gi = map(i);
            for j in 0..dl {
                let v = local[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    rho[(gi, map(j))] += v * blk.q;
                }
            }
        }
        offset += bl * br;
    }
    State::new(vec![da, db, dc], rho)
}

/// Condition number of a PSD matrix restricted to its support.
fn support_condition(m: &CMatrix) -> Result<f64> {
    let e = herm_eig(m)?;
    let top = e.max_abs();
    let lo = e.values.iter().copied().filter(|&x| x > SUPPORT_TOL * top).fold(f64::INFINITY, f64::min);
    Ok(if lo.is_finite() { top / lo } else { 1.0 })
}

/// Trace-norm distance between ρ_ABC and (id_A ⊗ T″)(ρ_AB).
pub fn markov_reconstruction_error(rho: &State) -> Result<f64> {
    expect_parts(rho, 3)?;
    let d = rho.dims();
    let t = ssa_petz_map(&rho.reduced(&[1, 2])?, &rho.reduced(&[1])?)?;
    let lifted = channels::tensor(&Channel::identity(d[0]), &t);
    let rec = lifted.apply_mat(rho.reduced(&[0, 1])?.rho());
    Ok(trace_norm(&(&rec - rho.rho())))
}

/// Double certificate: T″ reconstructs ρ_ABC within `tol` and I(A:C|B) ≤ `tol`.
pub fn is_markov(rho: &State, tol: f64) -> Result<bool> {
    expect_parts(rho, 3)?;
    let cond = support_condition(rho.reduced(&[1])?.rho())?;
    if cond > MAX_CONDITION {
        return Err(Error::IllConditioned(cond));
    }
    let report = cond_mutual_info(rho)?;
    if report.cmi > tol {
        return Ok(false);
    }
    Ok(markov_reconstruction_error(rho)? <= tol)
}

/// Orthonormal basis of {X : X B = B X and X B† = B† X for every B}.
pub fn kraus_commutant(ops: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let n = match ops.first() {
        Some(b) => b.rows(),
        None => return Err(Error::Dimension("empty operator list".into())),
    };
    if ops.iter().any(|b| b.shape() != (n, n)) {
        return Err(Error::Dimension("operators must be square and equal-sized".into()));
    }
    let id = CMatrix::identity(n);
    // Row-major vec: vec(XB) = (I ⊗ Bᵀ) vec X, vec(BX) = (B ⊗ I) vec X.
    let mut rows: Vec<CMatrix> = Vec::with_capacity(2 * ops.len());
    for b in ops {
        for op in [b.clone(), b.adjoint()] {
            rows.push(&kron(&id, &op.transpose()) - &kron(&op, &id));
        }
    }
    let nn = n * n;
    let mut stacked = CMatrix::zeros(rows.len() * nn, nn);
    for (k, blk) in rows.iter().enumerate() {
        stacked.set_block(k * nn, 0, blk);
    }
    let scale = stacked.max_abs();
    if scale <= HERM_TOL {
        return Ok((0..nn).map(|t| CMatrix::unit(n, n, t / n, t % n)).collect());
    }
    let ns = null_space(&stacked, 1e-9);
    Ok((0..ns.cols()).map(|k| CMatrix::new(n, n, ns.column(k)).expect("n x n")).collect())
}
