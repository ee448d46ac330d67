// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Random unitaries, states and channels; matrix concentration experiments;
//! ε-randomizing unitary families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::matkit::{self, herm_eig, kron, partial_trace, qr, trace_norm, CMatrix, MatFn, C64};
use crate::states::{unitary_error_basis, PureState, State};

/// Seeded generator for a named purpose; distinct names give independent streams.
pub fn stream_rng(seed: u64, name: &str) -> ChaCha20Rng {
    // FNV-1a keeps stream ids stable across platforms and releases.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(h);
    rng
}

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Haar unitary: Ginibre matrix, QR, then columns of Q rescaled by the phases
/// of R's diagonal.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    let (q, r) = qr(&g);
    let mut out = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            out[(i, j)] *= ph;
        }
    }
    out
}

/// Haar isometry C^cols -> C^rows (first columns of a Haar unitary).
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let u = haar_unitary(rows, rng);
    u.block(0, rows, 0, cols)
}

pub fn random_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> PureState {
    let n: usize = dims.iter().product();
    let v: Vec<C64> = (0..n).map(|_| gaussian_c64(rng)).collect();
    PureState::normalized(dims.to_vec(), v).expect("Gaussian vector is nonzero")
}

/// Induced-measure mixed state G G†/Tr with G of shape d x rank.
pub fn random_state_rank<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> State {
    let n: usize = dims.iter().product();
    let g = ginibre(n, rank, rng);
    State::from_psd(dims.to_vec(), &g.matmul(&g.adjoint())).expect("Ginibre product is PSD")
}

pub fn random_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> State {
    let n: usize = dims.iter().product();
    random_state_rank(dims, n, rng)
}

/// GUE-distributed Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    ginibre(d, d, rng).hermitian_part()
}

/// Trace-preserving channel from a Haar isometry C^din -> C^dout ⊗ C^k.
///
/// Panics unless dout·k ≥ din; fewer Kraus operators cannot sum to the identity.
pub fn random_channel<R: Rng + ?Sized>(din: usize, dout: usize, k: usize, rng: &mut R) -> Channel {
    assert!(dout * k >= din, "a {din}->{dout} channel needs at least {} Kraus operators", din.div_ceil(dout));
    let v = haar_isometry(dout * k, din, rng);
    let kraus = (0..k)
        .map(|t| CMatrix::from_fn(dout, din, |i, j| v[(i * k + t, j)]))
        .collect();
    Channel::new(din, dout, kraus).expect("consistent shapes")
}

/// Completely positive (generally not trace-preserving) map with Ginibre Kraus operators.
pub fn random_cp_map<R: Rng + ?Sized>(din: usize, dout: usize, k: usize, rng: &mut R) -> Channel {
    let kraus = (0..k).map(|_| ginibre(dout, din, rng)).collect();
    Channel::new(din, dout, kraus).expect("consistent shapes")
}

#[derive(Clone, Debug)]
pub enum Sampler {
    /// U diag(b_1..b_d) U† with b_i ~ Bernoulli(mu) i.i.d. and U Haar; mean mu·I.
    BernoulliProjector { mu: f64 },
    /// U diag(u_1..u_d) U† with u_i ~ Uniform[0,1] and U Haar; mean I/2.
    RandomPsdBounded,
    /// Finite list of operators in [0, I] drawn with the given weights.
    Custom { mats: Vec<CMatrix>, weights: Vec<f64> },
}

/// Distribution over matrices X with 0 ≤ X ≤ I.
#[derive(Clone, Debug)]
pub struct MatrixDistribution {
    pub dim: usize,
    pub sampler: Sampler,
}

impl MatrixDistribution {
    pub fn new(dim: usize, sampler: Sampler) -> Result<Self> {
        match &sampler {
            Sampler::BernoulliProjector { mu } if !(0.0..=1.0).contains(mu) => {
                return Err(Error::Domain(format!("Bernoulli parameter {mu}")));
            }
            Sampler::Custom { mats, weights } => {
                if mats.is_empty() || mats.len() != weights.len() {
                    return Err(Error::Probability("weights must match a nonempty list".into()));
                }
                if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return Err(Error::Probability("weights must be nonnegative and sum to 1".into()));
                }
                for m in mats {
                    if m.shape() != (dim, dim) {
                        return Err(Error::Dimension(format!("operator {:?} in dimension {dim}", m.shape())));
                    }
                    let e = herm_eig(m)?;
                    let lo = e.values.first().copied().unwrap_or(0.0);
                    let hi = e.values.last().copied().unwrap_or(0.0);
                    if lo < -1e-10 || hi > 1.0 + 1e-10 {
                        return Err(Error::Domain(format!("operator spectrum [{lo}, {hi}] outside [0, 1]")));
                    }
                }
            }
            _ => {}
        }
        Ok(Self { dim, sampler })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        let d = self.dim;
        match &self.sampler {
            Sampler::BernoulliProjector { mu } => {
                let diag: Vec<f64> = (0..d).map(|_| if rng.random::<f64>() < *mu { 1.0 } else { 0.0 }).collect();
                rotate_diag(&diag, rng)
            }
            Sampler::RandomPsdBounded => {
                let diag: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
                rotate_diag(&diag, rng)
            }
            Sampler::Custom { mats, weights } => {
                let x: f64 = rng.random();
                let mut acc = 0.0;
                for (m, w) in mats.iter().zip(weights) {
                    acc += w;
                    if x < acc {
                        return m.clone();
                    }
                }
                mats.last().expect("nonempty").clone()
            }
        }
    }

    /// Exact mean E[X].
    pub fn mean(&self) -> CMatrix {
        let d = self.dim;
        match &self.sampler {
            Sampler::BernoulliProjector { mu } => CMatrix::identity(d).scale_re(*mu),
            Sampler::RandomPsdBounded => CMatrix::identity(d).scale_re(0.5),
            Sampler::Custom { mats, weights } => {
                let mut m = CMatrix::zeros(d, d);
                for (x, w) in mats.iter().zip(weights) {
                    m += &x.scale_re(*w);
                }
                m
            }
        }
    }

    /// μ when E[X] = μI.
    pub fn isotropic_mean(&self) -> Result<f64> {
        let m = self.mean();
        let mu = m.trace().re / self.dim as f64;
        let spread = (&m - &CMatrix::identity(self.dim).scale_re(mu)).max_abs();
        if spread > 1e-10 {
            return Err(Error::MeanNotIsotropic(spread));
        }
        Ok(mu)
    }
}

fn rotate_diag<R: Rng + ?Sized>(diag: &[f64], rng: &mut R) -> CMatrix {
    let d = diag.len();
    if d == 1 || diag.iter().all(|&x| x == diag[0]) {
        return CMatrix::from_real_diag(diag);
    }
    let u = haar_unitary(d, rng);
    let mut out = CMatrix::zeros(d, d);
    for (t, &w) in diag.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for i in 0..d {
            let a = u[(i, t)] * w;
            for j in 0..d {
                out[(i, j)] += a * u[(j, t)].conj();
            }
        }
    }
    out
}

/// Trials per independent stream; fixed so counts do not depend on thread count.
const CHUNK: usize = 500;

fn count_events<R, F>(trials: usize, rng: &mut R, event: F) -> usize
where
    R: Rng + ?Sized,
    F: Fn(&mut ChaCha20Rng) -> bool + Sync,
{
    let base: u64 = rng.random();
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = ChaCha20Rng::seed_from_u64(base);
            r.set_stream(c as u64);
            let n = CHUNK.min(trials - c * CHUNK);
            (0..n).filter(|_| event(&mut r)).count()
        })
        .sum()
}

/// "X ≰ A": some eigenvalue of A − X below −1e−10.
pub fn not_below(x: &CMatrix, a: &CMatrix) -> bool {
    matkit::min_eig(&(a - x)).map(|v| v < -1e-10).unwrap_or(true)
}

/// Empirical Pr{X ≰ A} against Tr[M A⁻¹].
pub fn matrix_markov_check<R: Rng + ?Sized>(
    dist: &MatrixDistribution,
    a: &CMatrix,
    trials: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if a.shape() != (dist.dim, dist.dim) {
        return Err(Error::Dimension(format!("A is {:?}, distribution dimension {}", a.shape(), dist.dim)));
    }
    let e = herm_eig(a)?;
    let lo = e.values.first().copied().unwrap_or(0.0);
    if lo <= 1e-12 * e.max_abs().max(1e-300) {
        return Err(Error::SingularA);
    }
    let ainv = e.rebuild(|x| 1.0 / x);
    let bound = dist.mean().matmul(&ainv).trace().re;
    let hits = count_events(trials, rng, |r| not_below(&dist.sample(r), a));
    Ok((hits as f64 / trials as f64, bound))
}

/// D(α‖μ) in nats.
pub fn binary_divergence(alpha: f64, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("binary divergence at alpha={alpha}, mu={mu}")));
    }
    let term = |p: f64, q: f64| if p == 0.0 { 0.0 } else { p * (p / q).ln() };
    Ok(term(alpha, mu) + term(1.0 - alpha, 1.0 - mu))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailReport {
    pub dim: usize,
    pub n: usize,
    pub trials: usize,
    pub alpha: f64,
    pub mu: f64,
    /// True when the event is the lower tail (α < μ).
    pub lower_tail: bool,
    pub empirical_prob: f64,
    pub aw_bound: f64,
}

impl TailReport {
    /// Binomial standard deviation at the bound probability.
    pub fn sigma(&self) -> f64 {
        let p = self.aw_bound.clamp(0.0, 1.0);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Empirical frequency within the bound plus 3σ.
    pub fn honored(&self) -> bool {
        self.empirical_prob <= self.aw_bound + 3.0 * self.sigma()
    }
}

/// Empirical Pr{(1/n)ΣX_i ≰ αI} (or ≱ for α < μ) against d·exp(−n D(α‖μ)).
pub fn tail_bound_experiment<R: Rng + ?Sized>(
    dist: &MatrixDistribution,
    n: usize,
    alpha: f64,
    trials: usize,
    rng: &mut R,
) -> Result<TailReport> {
    let mu = dist.isotropic_mean()?;
    let d = dist.dim;
    let bound = d as f64 * (-(n as f64) * binary_divergence(alpha, mu)?).exp();
    let lower = alpha < mu;
    let hits = count_events(trials, rng, |r| {
        let mut s = CMatrix::zeros(d, d);
        for _ in 0..n {
            s += &dist.sample(r);
        }
        let e = herm_eig(&s.scale_re(1.0 / n as f64)).expect("Hermitian sum");
        if lower {
            e.values[0] < alpha - 1e-10
        } else {
            e.values[d - 1] > alpha + 1e-10
        }
    });
    Ok(TailReport {
        dim: d,
        n,
        trials,
        alpha,
        mu,
        lower_tail: lower,
        empirical_prob: hits as f64 / trials as f64,
        aw_bound: bound,
    })
}

/// (Tr e^{A+B}, Tr[e^A e^B])
pub fn golden_thompson_check(a: &CMatrix, b: &CMatrix) -> Result<(f64, f64)> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension("operands differ in shape".into()));
    }
    let lhs = matkit::matrix_function(&(a + b), MatFn::Exp)?.trace().re;
    let ea = matkit::matrix_function(a, MatFn::Exp)?;
    let eb = matkit::matrix_function(b, MatFn::Exp)?;
    Ok((lhs, ea.matmul(&eb).trace().re))
}

#[derive(Clone, Debug)]
pub struct RandomizingFamily {
    pub probs: Vec<f64>,
    pub unitaries: Vec<CMatrix>,
}

impl RandomizingFamily {
    pub fn new(probs: Vec<f64>, unitaries: Vec<CMatrix>) -> Result<Self> {
        if probs.len() != unitaries.len() || probs.is_empty() {
            return Err(Error::Probability("one probability per unitary".into()));
        }
        if probs.iter().any(|&p| p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Probability("probabilities must be nonnegative and sum to 1".into()));
        }
        for u in &unitaries {
            let d = u.rows();
            if !u.is_square() || u.adjoint().matmul(u).max_abs_diff(&CMatrix::identity(d)) > 1e-10 {
                return Err(Error::Domain("family member is not unitary".into()));
            }
        }
        Ok(Self { probs, unitaries })
    }

    pub fn uniform(unitaries: Vec<CMatrix>) -> Result<Self> {
        let n = unitaries.len();
        Self::new(vec![1.0 / n as f64; n], unitaries)
    }
}

/// ‖Σ p_i (U_i⊗I) ρ_AB (U_i⊗I)† − ρ̃_A ⊗ ρ_B‖₁ with ρ̃_A = Σ p_i U_i ρ_A U_i†.
/// A is the first subsystem, B the rest.
pub fn epsilon_randomizing_deviation(rho_ab: &State, fam: &RandomizingFamily) -> Result<f64> {
    let (out, target) = randomized_pair(rho_ab, fam)?;
    Ok(trace_norm(&(&out - &target)))
}

/// (Σ p_i (U_i⊗I)ρ(U_i⊗I)†, ρ̃_A ⊗ ρ_B)
pub fn randomized_pair(rho_ab: &State, fam: &RandomizingFamily) -> Result<(CMatrix, CMatrix)> {
    let dims = rho_ab.dims();
    if dims.len() < 2 {
        return Err(Error::Dimension("randomizing needs a bipartite state".into()));
    }
    let da = dims[0];
    let db: usize = dims[1..].iter().product();
    if fam.unitaries.iter().any(|u| u.rows() != da) {
        return Err(Error::Dimension(format!("unitaries must act on the {da}-dim A factor")));
    }
    let two = [da, db];
    let rho = rho_ab.rho();
    let rho_a = partial_trace(rho, &two, &[0])?;
    let rho_b = partial_trace(rho, &two, &[1])?;
    let id_b = CMatrix::identity(db);
    let mut out = CMatrix::zeros(da * db, da * db);
    let mut tilde = CMatrix::zeros(da, da);
    for (p, u) in fam.probs.iter().zip(&fam.unitaries) {
        let ub = kron(u, &id_b);
        out += &ub.matmul(rho).matmul(&ub.adjoint()).scale_re(*p);
        tilde += &u.matmul(&rho_a).matmul(&u.adjoint()).scale_re(*p);
    }
    Ok((out, kron(&tilde, &rho_b)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilySampler {
    Haar,
    /// Weyl operators drawn without replacement while the group lasts.
    Weyl,
}

/// Uniform family of `n` unitaries on A and its achieved deviation.
pub fn sample_randomizing_family<R: Rng + ?Sized>(
    rho_ab: &State,
    n: usize,
    rng: &mut R,
    sampler: FamilySampler,
) -> Result<(RandomizingFamily, f64)> {
    let da = *rho_ab.dims().first().ok_or_else(|| Error::Dimension("empty dims".into()))?;
    if n == 0 {
        return Err(Error::Domain("family needs at least one unitary".into()));
    }
    let unitaries = match sampler {
        FamilySampler::Haar => (0..n).map(|_| haar_unitary(da, rng)).collect(),
        FamilySampler::Weyl => {
            let basis = unitary_error_basis(da);
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                let mut idx: Vec<usize> = (0..basis.len()).collect();
                idx.shuffle(rng);
                for i in idx.into_iter().take(n - out.len()) {
                    out.push(basis[i].clone());
                }
            }
            out
        }
    };
    let fam = RandomizingFamily::uniform(unitaries)?;
    let eps = epsilon_randomizing_deviation(rho_ab, &fam)?;
    Ok((fam, eps))
}

/// Σ_α (1/d²) W_α ρ W_α†
pub fn weyl_twirl(rho: &CMatrix) -> CMatrix {
    let d = rho.rows();
    let mut out = CMatrix::zeros(d, d);
    for w in unitary_error_basis(d) {
        out += &w.matmul(rho).matmul(&w.adjoint());
    }
    out.scale_re(1.0 / (d * d) as f64)
}
