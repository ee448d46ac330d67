// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Density matrices, pure states, Schmidt analysis, the Werner family and
//! the Weyl unitary error basis.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matkit::{
    self, herm_eig, kron_vec, partial_trace, polar_unitary, svd, trace_norm, vnorm, CMatrix, MatFn, C64,
    HERM_TOL, ONE, SUPPORT_TOL, ZERO,
};
use crate::randkit::haar_unitary;

const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct State {
    dims: Vec<usize>,
    rho: CMatrix,
}

impl State {
    /// Validates and symmetrizes `rho`.
    pub fn new(dims: Vec<usize>, rho: CMatrix) -> Result<Self> {
        let total: usize = dims.iter().product();
        if !rho.is_square() || rho.rows() != total {
            return Err(Error::Dimension(format!("rho {:?} vs dims {dims:?}", rho.shape())));
        }
        let defect = rho.hermiticity_defect();
        if defect > HERM_TOL * (1.0 + rho.frobenius()) {
            return Err(Error::NotHermitian(defect));
        }
        let rho = rho.hermitian_part();
        let tr = rho.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::Domain(format!("trace {tr} differs from 1")));
        }
        let lo = matkit::min_eig(&rho)?;
        if lo < -STATE_TOL {
            return Err(Error::NotPsd(lo));
        }
        Ok(Self { dims, rho })
    }

    /// Normalizes a PSD matrix by its trace.
    pub fn from_psd(dims: Vec<usize>, m: &CMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if tr <= 0.0 {
            return Err(Error::Domain("nonpositive trace".into()));
        }
        Self::new(dims, m.scale_re(1.0 / tr))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { dims: psi.dims.clone(), rho: CMatrix::outer(&psi.vec, &psi.vec) }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self { dims, rho: CMatrix::identity(d).scale_re(1.0 / d as f64) }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_rho(self) -> CMatrix {
        self.rho
    }

    /// Marginal on the kept subsystems.
    pub fn reduced(&self, keep: &[usize]) -> Result<State> {
        let m = partial_trace(&self.rho, &self.dims, keep)?;
        let mut k = keep.to_vec();
        k.sort_unstable();
        k.dedup();
        Ok(State { dims: k.iter().map(|&i| self.dims[i]).collect(), rho: m.hermitian_part() })
    }

    pub fn tensor(&self, other: &State) -> State {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        State { dims, rho: matkit::kron(&self.rho, &other.rho) }
    }

    /// Regroups all subsystems into one.
    pub fn flattened(&self) -> State {
        State { dims: vec![self.dim()], rho: self.rho.clone() }
    }

    pub fn with_dims(&self, dims: Vec<usize>) -> Result<State> {
        if dims.iter().product::<usize>() != self.dim() {
            return Err(Error::Dimension(format!("dims {dims:?} for a {}-dim state", self.dim())));
        }
        Ok(State { dims, rho: self.rho.clone() })
    }
}

#[derive(Clone, Debug)]
pub struct PureState {
    dims: Vec<usize>,
    vec: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, vec: Vec<C64>) -> Result<Self> {
        if dims.iter().product::<usize>() != vec.len() {
            return Err(Error::Dimension(format!("vector of length {} vs dims {dims:?}", vec.len())));
        }
        let n = vnorm(&vec);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("norm {n} differs from 1")));
        }
        Ok(Self { dims, vec })
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(dims: Vec<usize>, vec: Vec<C64>) -> Result<Self> {
        let n = vnorm(&vec);
        if n == 0.0 {
            return Err(Error::Domain("zero vector".into()));
        }
        Self::new(dims, vec.iter().map(|z| z / n).collect())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn vec(&self) -> &[C64] {
        &self.vec
    }

    pub fn density(&self) -> State {
        State::from_pure(self)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { dims, vec: kron_vec(&self.vec, &other.vec) }
    }
}

#[derive(Clone, Debug)]
pub struct SchmidtForm {
    /// Descending.
    pub coeffs: Vec<f64>,
    /// Orthonormal columns on the A side.
    pub left_vecs: CMatrix,
    /// Orthonormal columns on the B side.
    pub right_vecs: CMatrix,
    pub cut: usize,
}

impl SchmidtForm {
    /// Σ λ_k |a_k>|b_k>
    pub fn reconstruct(&self) -> Vec<C64> {
        let (da, db) = (self.left_vecs.rows(), self.right_vecs.rows());
        let mut v = vec![ZERO; da * db];
        for (k, &l) in self.coeffs.iter().enumerate() {
            for i in 0..da {
                let a = self.left_vecs[(i, k)] * l;
                for j in 0..db {
                    v[i * db + j] += a * self.right_vecs[(j, k)];
                }
            }
        }
        v
    }
}

fn split_dims(dims: &[usize], cut: usize) -> Result<(usize, usize)> {
    if cut == 0 || cut >= dims.len() {
        return Err(Error::CutOutOfRange { cut, parts: dims.len() });
    }
    Ok((dims[..cut].iter().product(), dims[cut..].iter().product()))
}

/// Schmidt decomposition across the bipartition systems `0..cut` | `cut..`.
pub fn schmidt_decompose(psi: &PureState, cut: usize) -> Result<SchmidtForm> {
    let (da, db) = split_dims(&psi.dims, cut)?;
    let m = CMatrix::new(da, db, psi.vec.clone())?;
    let s = svd(&m);
    Ok(SchmidtForm { coeffs: s.singulars, left_vecs: s.left, right_vecs: s.right.conj(), cut })
}

pub const SCHMIDT_RANK_TOL: f64 = 1e-10;

pub fn schmidt_rank(psi: &PureState, cut: usize, tol: f64) -> Result<usize> {
    let f = schmidt_decompose(psi, cut)?;
    let top = f.coeffs.first().copied().unwrap_or(0.0);
    Ok(f.coeffs.iter().filter(|&&l| l > tol * top).count())
}

/// Purification on H ⊗ C^r with r = rank(ρ).
pub fn purify(rho: &State) -> Result<PureState> {
    let e = herm_eig(&rho.rho)?;
    let top = e.max_abs();
    let support: Vec<usize> = (0..e.values.len()).filter(|&k| e.values[k] > SUPPORT_TOL * top).collect();
    let d = rho.dim();
    let r = support.len();
    let mut v = vec![ZERO; d * r];
    for (t, &k) in support.iter().enumerate() {
        let s = e.values[k].sqrt();
        for i in 0..d {
            v[i * r + t] = e.vectors[(i, k)] * s;
        }
    }
    PureState::normalized(vec![d, r], v)
}

/// (1/√d) Σ |ii>
pub fn max_entangled(d: usize) -> PureState {
    let mut v = vec![ZERO; d * d];
    let s = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = C64::new(s, 0.0);
    }
    PureState { dims: vec![d, d], vec: v }
}

/// ρ_F = F |ψ0><ψ0| + (1 − F)(I − |ψ0><ψ0|)/(d² − 1)
pub fn werner(d: usize, f: f64) -> Result<State> {
    if d < 2 {
        return Err(Error::Dimension("Werner states need d >= 2".into()));
    }
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::FOutOfRange(f));
    }
    let p = max_entangled(d).density().into_rho();
    let n = d * d;
    let rest = &CMatrix::identity(n) - &p;
    let rho = &p.scale_re(f) + &rest.scale_re((1.0 - f) / (n as f64 - 1.0));
    State::new(vec![d, d], rho)
}

/// Schmidt number k of ρ_F, with (k−1)/d < F ≤ k/d (k = 1 for F ≤ 1/d).
pub fn werner_schmidt_number(d: usize, f: f64) -> Result<usize> {
    if d < 2 {
        return Err(Error::Dimension("Werner states need d >= 2".into()));
    }
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::FOutOfRange(f));
    }
    let min = 1.0 / (d * d) as f64;
    if f < min - 1e-15 {
        return Err(Error::BelowValidRange { f, min });
    }
    let k = (f * d as f64 - 1e-12).ceil() as usize;
    Ok(k.clamp(1, d))
}

/// F(ρ,σ) = ‖√ρ √σ‖₁²
pub fn fidelity(rho: &State, sigma: &State) -> Result<f64> {
    check_same(rho, sigma)?;
    let a = matkit::matrix_function(&rho.rho, MatFn::Sqrt)?;
    let b = matkit::matrix_function(&sigma.rho, MatFn::Sqrt)?;
    let f = trace_norm(&a.matmul(&b)).powi(2);
    Ok(f.clamp(0.0, 1.0))
}

/// ‖ρ − σ‖₁ (ranges over [0, 2]).
pub fn trace_distance(rho: &State, sigma: &State) -> Result<f64> {
    check_same(rho, sigma)?;
    Ok(trace_norm(&(&rho.rho - &sigma.rho)))
}

fn check_same(a: &State, b: &State) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("states of dimension {} and {}", a.dim(), b.dim())));
    }
    Ok(())
}

fn square_side(rho: &State) -> Result<usize> {
    let d = (rho.dim() as f64).sqrt().round() as usize;
    if d * d != rho.dim() || (rho.dims.len() == 2 && rho.dims[0] != rho.dims[1]) {
        return Err(Error::Dimension(format!("expected a d⊗d state, got dims {:?}", rho.dims)));
    }
    Ok(d)
}

pub const OVERLAP_RESTARTS: usize = 20;
pub const OVERLAP_ITERS: usize = 200;

/// Result of the overlap ascent.
#[derive(Clone, Debug)]
pub struct OverlapResult {
    pub value: f64,
    pub u: CMatrix,
    /// Objective after each iteration of the winning restart.
    pub trace: Vec<f64>,
}

/// Lower bound on max_U <ψ_U|ρ|ψ_U> with ψ_U = (U⊗I)ψ0.
///
/// With u = vec(U) the objective is u†Ru/d for the PSD matrix R = ρ, so each
/// polar step U ← polar(Ru) cannot decrease it. The first restart starts at
/// the identity, the rest at Haar-random unitaries.
pub fn max_overlap_maxent<R: Rng + ?Sized>(
    rho: &State,
    restarts: usize,
    iters: usize,
    rng: &mut R,
) -> Result<OverlapResult> {
    let d = square_side(rho)?;
    let r = &rho.rho;
    let eval = |u: &CMatrix| -> f64 {
        let v = u.data();
        let rv = r.mat_vec(v);
        matkit::inner(v, &rv).re / d as f64
    };
    let mut best: Option<OverlapResult> = None;
    for s in 0..restarts.max(1) {
        let mut u = if s == 0 { CMatrix::identity(d) } else { haar_unitary(d, rng) };
        let mut val = eval(&u);
        let mut trace = vec![val];
        for _ in 0..iters {
            let g = CMatrix::new(d, d, r.mat_vec(u.data()))?;
            let next = polar_unitary(&g);
            let nv = eval(&next);
            if nv < val {
                break;
            }
            let done = nv - val <= 1e-15 * (1.0 + val.abs());
            u = next;
            val = nv;
            trace.push(val);
            if done {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| val > b.value) {
            best = Some(OverlapResult { value: val, u, trace });
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Largest k+1 with max overlap > k/d, using the ascent's lower bound.
pub fn schmidt_number_lower_bound<R: Rng + ?Sized>(rho: &State, rng: &mut R) -> Result<usize> {
    schmidt_number_lower_bound_with(rho, OVERLAP_RESTARTS, OVERLAP_ITERS, rng)
}

pub fn schmidt_number_lower_bound_with<R: Rng + ?Sized>(
    rho: &State,
    restarts: usize,
    iters: usize,
    rng: &mut R,
) -> Result<usize> {
    let d = square_side(rho)?;
    let v = max_overlap_maxent(rho, restarts, iters, rng)?.value;
    let k = (d as f64 * v - 1e-9).ceil();
    Ok((k.max(1.0) as usize).min(d))
}

/// Weyl basis W_(a,b) = U_a V_b, index a·d + b, with U_a δ_x = δ_{x+a} and
/// V_b δ_x = exp(2πi·bx/d) δ_x.
pub fn unitary_error_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut w = CMatrix::zeros(d, d);
            for x in 0..d {
                let ph = 2.0 * PI * (b * x) as f64 / d as f64;
                w[((x + a) % d, x)] = C64::from_polar(1.0, ph);
            }
            out.push(w);
        }
    }
    out
}

/// ψ_α = (1/√d) Σ_i (W_α|i>)|i>
pub fn epr_basis(d: usize) -> Vec<PureState> {
    let s = 1.0 / (d as f64).sqrt();
    unitary_error_basis(d)
        .into_iter()
        .map(|w| {
            let mut v = vec![ZERO; d * d];
            for i in 0..d {
                for j in 0..d {
                    v[j * d + i] += w[(j, i)] * s;
                }
            }
            PureState { dims: vec![d, d], vec: v }
        })
        .collect()
}

/// |0...0> style basis product state.
pub fn basis_state(dims: Vec<usize>, index: usize) -> PureState {
    let n: usize = dims.iter().product();
    let mut v = vec![ZERO; n];
    v[index] = ONE;
    PureState { dims, vec: v }
}
