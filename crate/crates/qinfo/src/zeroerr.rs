// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Operator systems, confusability graphs, independence numbers and the
//! quantum Lovász number ϑ̃ computed by semidefinite programming.

use crate::channels::{self, Channel};
use crate::error::{Error, Result};
use crate::matkit::{self, hs_inner, inner, kron, op_norm, orthonormalize, CMatrix, C64, I, ONE, ZERO};
use crate::sdpcore::{HermitianSdp, SdpOptions, SdpStatus};
use crate::states::PureState;

/// Identity-membership and adjoint-closure tolerance.
pub const SYSTEM_TOL: f64 = 1e-10;
/// Solver tolerance used by `theta_tilde`.
pub const THETA_TOL: f64 = 1e-7;
/// Largest graph accepted by the exact independence search.
pub const MAX_SEARCH_VERTICES: usize = 30;

/// Self-adjoint subspace of M_n containing the identity, with an HS-orthonormal basis.
#[derive(Clone, Debug)]
pub struct OperatorSystem {
    ambient: usize,
    basis: Vec<CMatrix>,
}

impl OperatorSystem {
    pub fn from_spanning(n: usize, span: &[CMatrix]) -> Result<Self> {
        if let Some(b) = span.iter().find(|b| b.shape() != (n, n)) {
            return Err(Error::Dimension(format!("element of shape {:?} in M_{n}", b.shape())));
        }
        let vecs: Vec<Vec<C64>> = span.iter().map(|b| b.data().to_vec()).collect();
        let basis = orthonormalize(&vecs, 1e-10)
            .into_iter()
            .map(|v| CMatrix::new(n, n, v).expect("n x n"))
            .collect();
        let s = Self { ambient: n, basis };
        let id_res = s.residual(&CMatrix::identity(n));
        if id_res > SYSTEM_TOL {
            return Err(Error::NotOperatorSystem(format!("identity residual {id_res:.3e}")));
        }
        for b in &s.basis {
            let r = s.residual(&b.adjoint());
            if r > SYSTEM_TOL {
                return Err(Error::NotOperatorSystem(format!("not closed under adjoint ({r:.3e})")));
            }
        }
        Ok(s)
    }

    /// All of M_n.
    pub fn full(n: usize) -> Self {
        Self { ambient: n, basis: (0..n * n).map(|t| CMatrix::unit(n, n, t / n, t % n)).collect() }
    }

    /// ℂ I_n.
    pub fn scalars(n: usize) -> Self {
        Self { ambient: n, basis: vec![CMatrix::identity(n).scale_re(1.0 / (n as f64).sqrt())] }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let mut p = CMatrix::zeros(self.ambient, self.ambient);
        for b in &self.basis {
            p += &b.scale(inner(b.data(), x.data()));
        }
        p
    }

    pub fn residual(&self, x: &CMatrix) -> f64 {
        (x - &self.project(x)).frobenius()
    }

    /// S₁ ⊗ S₂ ⊆ M_{n₁ n₂}.
    pub fn tensor(&self, other: &OperatorSystem) -> OperatorSystem {
        let mut basis = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.basis {
            for b in &other.basis {
                basis.push(kron(a, b));
            }
        }
        OperatorSystem { ambient: self.ambient * other.ambient, basis }
    }

    /// True when every basis element of `self` lies in `other`.
    pub fn is_subsystem_of(&self, other: &OperatorSystem) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.residual(b) <= SYSTEM_TOL)
    }

    /// HS-orthonormal Hermitian basis of S^⊥.
    pub fn perp_hermitian_basis(&self) -> Vec<CMatrix> {
        let n = self.ambient;
        let herm = hermitian_unit_basis(n);
        let mut coords: Vec<Vec<C64>> = Vec::with_capacity(2 * self.dim() + n * n);
        for b in &self.basis {
            let adj = b.adjoint();
            let re = (b + &adj).scale_re(0.5);
            let im = (b - &adj).scale(C64::new(0.0, -0.5));
            coords.push(real_coords(&herm, &re));
            coords.push(real_coords(&herm, &im));
        }
        let own = orthonormalize(&coords, 1e-10);
        let k = own.len();
        let mut all = own;
        all.extend((0..n * n).map(|t| matkit::ket(n * n, t)));
        let full = orthonormalize(&all, 1e-10);
        full[k..].iter().map(|c| from_real_coords(&herm, c)).collect()
    }
}

/// E_ii, (E_ij + E_ji)/√2 and i(E_ij − E_ji)/√2 for i < j.
pub fn hermitian_unit_basis(n: usize) -> Vec<CMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(CMatrix::unit(n, n, i, i));
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut a = CMatrix::zeros(n, n);
            a[(i, j)] = C64::new(s, 0.0);
            a[(j, i)] = C64::new(s, 0.0);
            out.push(a);
            let mut b = CMatrix::zeros(n, n);
            b[(i, j)] = I * s;
            b[(j, i)] = -I * s;
            out.push(b);
        }
    }
    out
}

fn real_coords(herm: &[CMatrix], h: &CMatrix) -> Vec<C64> {
    herm.iter().map(|e| C64::new(hs_inner(e, h).expect("same shape").re, 0.0)).collect()
}

fn from_real_coords(herm: &[CMatrix], c: &[C64]) -> CMatrix {
    let n = herm[0].rows();
    let mut out = CMatrix::zeros(n, n);
    for (e, w) in herm.iter().zip(c) {
        if w.re != 0.0 {
            out += &e.scale_re(w.re);
        }
    }
    out
}

/// span{E_i† E_j} of a trace-preserving channel.
pub fn op_system_from_channel(ch: &Channel) -> Result<OperatorSystem> {
    let dev = (&ch.kraus_gram() - &CMatrix::identity(ch.din())).max_abs();
    if dev > channels::CHOI_TOL {
        return Err(Error::NotTracePreserving(dev));
    }
    let mut span = Vec::with_capacity(ch.kraus().len().pow(2));
    for a in ch.kraus() {
        for b in ch.kraus() {
            span.push(a.adjoint_mul(b));
        }
    }
    OperatorSystem::from_spanning(ch.din(), &span)
}

/// Simple undirected graph without loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<bool>>,
}

impl Graph {
    pub fn new(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![vec![false; vertices]; vertices];
        for &(u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) with {vertices} vertices")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            adj[u][v] = true;
            adj[v][u] = true;
        }
        Ok(Self { adj })
    }

    pub fn empty(n: usize) -> Self {
        Self { adj: vec![vec![false; n]; n] }
    }

    pub fn complete(n: usize) -> Self {
        Self { adj: (0..n).map(|i| (0..n).map(|j| i != j).collect()).collect() }
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("n >= 3")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("valid path")
    }

    pub fn vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    /// Edges (u, v) with u < v, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertices();
        (0..n).flat_map(|u| (u + 1..n).filter(move |&v| self.adj[u][v]).map(move |v| (u, v))).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&e| e).count()
    }

    /// Edge-list text: one `u v` pair per line, 0-indexed. Blank lines and
    /// lines starting with `#` are skipped; a line holding a single integer
    /// sets the vertex count (otherwise it is one more than the largest index).
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut declared: Option<usize> = None;
        let mut top = 0;
        for (lineno, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let nums: std::result::Result<Vec<usize>, _> = t.split_whitespace().map(str::parse).collect();
            let bad = || Error::InvalidGraph(format!("line {}: expected \"u v\", got {t:?}", lineno + 1));
            match nums.map_err(|_| bad())?.as_slice() {
                [n] => declared = Some(*n),
                [u, v] => {
                    top = top.max(u + 1).max(v + 1);
                    edges.push((*u, *v));
                }
                _ => return Err(bad()),
            }
        }
        Self::new(declared.unwrap_or(top), &edges)
    }
}

/// S_G = span{E_ii} ∪ {E_ij : i ∼ j}.
pub fn graph_op_system(g: &Graph) -> OperatorSystem {
    let n = g.vertices();
    let mut basis: Vec<CMatrix> = (0..n).map(|i| CMatrix::unit(n, n, i, i)).collect();
    for (u, v) in g.edges() {
        basis.push(CMatrix::unit(n, n, u, v));
        basis.push(CMatrix::unit(n, n, v, u));
    }
    OperatorSystem { ambient: n, basis }
}

/// Inputs x ≠ x′ are adjacent iff some output has positive probability under both.
pub fn confusability_graph(kernel: &[Vec<f64>]) -> Result<Graph> {
    let (_, nx) = channels::kernel_shape(kernel)?;
    let mut edges = Vec::new();
    for x in 0..nx {
        for x2 in x + 1..nx {
            if kernel.iter().any(|row| row[x] > 0.0 && row[x2] > 0.0) {
                edges.push((x, x2));
            }
        }
    }
    Graph::new(nx, &edges)
}

struct Search {
    nbr: Vec<u32>,
    best: u32,
}

impl Search {
    /// Upper bound on α of the induced subgraph: a greedy clique cover size.
    fn clique_cover(&self, mut cand: u32) -> u32 {
        let mut cliques = 0;
        while cand != 0 {
            let v = cand.trailing_zeros();
            let mut clique_cand = cand & self.nbr[v as usize];
            cand &= !(1 << v);
            while clique_cand != 0 {
                let w = clique_cand.trailing_zeros();
                clique_cand &= self.nbr[w as usize];
                cand &= !(1 << w);
            }
            cliques += 1;
        }
        cliques
    }

    fn run(&mut self, cand: u32, size: u32) {
        if cand == 0 {
            self.best = self.best.max(size);
            return;
        }
        if size + self.clique_cover(cand) <= self.best {
            return;
        }
        // Branch on the candidate of largest degree inside the candidate set.
        let mut pick = 0;
        let mut pick_deg = -1i32;
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            let d = (self.nbr[v as usize] & cand).count_ones() as i32;
            if d > pick_deg {
                pick_deg = d;
                pick = v;
            }
        }
        let bit = 1u32 << pick;
        if pick_deg == 0 {
            // No edges left: every candidate fits.
            self.best = self.best.max(size + cand.count_ones());
            return;
        }
        self.run(cand & !bit & !self.nbr[pick as usize], size + 1);
        self.run(cand & !bit, size);
    }
}

/// Exact independence number by branch and bound.
pub fn graph_independence(g: &Graph) -> Result<usize> {
    let n = g.vertices();
    if n > MAX_SEARCH_VERTICES {
        return Err(Error::TooLarge(n));
    }
    let nbr: Vec<u32> = (0..n)
        .map(|u| (0..n).filter(|&v| g.has_edge(u, v)).fold(0u32, |m, v| m | (1 << v)))
        .collect();
    let mut s = Search { nbr, best: 0 };
    let all = ((1u64 << n) - 1) as u32;
    s.run(all, 0);
    Ok(s.best as usize)
}

/// True iff ⟨ψ_m′| b |ψ_m⟩ vanishes (to 1e−9) for all m ≠ m′ and basis elements b.
pub fn verify_independent_states(s: &OperatorSystem, psis: &[PureState]) -> Result<bool> {
    let n = s.ambient();
    if let Some(p) = psis.iter().find(|p| p.vec().len() != n) {
        return Err(Error::Dimension(format!("state of length {} for M_{n}", p.vec().len())));
    }
    for b in s.basis() {
        for (m, p) in psis.iter().enumerate() {
            let bp = b.mat_vec(p.vec());
            for (m2, q) in psis.iter().enumerate() {
                if m != m2 && inner(q.vec(), &bp).norm() > 1e-9 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaResult {
    /// Lower bound from the dual-feasible point (ρ, M′).
    pub primal: f64,
    /// Upper bound from the solver's primal matrix; the reported value.
    pub dual: f64,
    pub gap: f64,
    pub iterations: usize,
}

impl ThetaResult {
    pub fn value(&self) -> f64 {
        self.dual
    }
}

/// ϑ(S ⊗ M_dc) maximized over I ⊗ ρ + M′ ⪰ 0 with M′ ⊥ S ⊗ M_dc; `dc` defaults to n.
pub fn theta_tilde(s: &OperatorSystem, dc: Option<usize>) -> Result<ThetaResult> {
    theta_tilde_with(s, dc, &SdpOptions { tol: THETA_TOL, ..SdpOptions::default() })
}

pub fn theta_tilde_with(s: &OperatorSystem, dc: Option<usize>, opts: &SdpOptions) -> Result<ThetaResult> {
    let n = s.ambient();
    let dc = dc.unwrap_or(n);
    if n == 0 || dc == 0 {
        return Err(Error::Dimension("empty system".into()));
    }
    let nx = n * dc;
    let phi: Vec<C64> = {
        let mut v = vec![ZERO; nx];
        for i in 0..n.min(dc) {
            v[i * dc + i] = ONE;
        }
        v
    };
    let expect = |m: &CMatrix| inner(&phi, &m.mat_vec(&phi)).re;

    let mut sdp = HermitianSdp::new(vec![nx, dc])?;
    let shift_x = CMatrix::identity(nx).scale_re(1.0 / dc as f64);
    let shift_r = CMatrix::identity(dc).scale_re(1.0 / dc as f64);
    let constant = expect(&shift_x);
    sdp.set_objective(0, -&shift_x)?;
    sdp.set_objective(1, -&shift_r)?;

    // ρ = I/dc + Σ r_k G_k over a traceless Hermitian basis.
    let traceless = OperatorSystem::scalars(dc).perp_hermitian_basis();
    let id_n = CMatrix::identity(n);
    for g in &traceless {
        let fx = kron(&id_n, g);
        let rhs = -expect(&fx);
        sdp.add_constraint(vec![(0, fx), (1, g.clone())], rhs)?;
    }
    // M′ = Σ m_l K_a ⊗ H_b with K_a ⊥ S.
    let herm_c = hermitian_unit_basis(dc);
    for k in s.perp_hermitian_basis() {
        for h in &herm_c {
            let fx = kron(&k, h);
            let rhs = -expect(&fx);
            sdp.add_constraint(vec![(0, fx)], rhs)?;
        }
    }
    let (sol, _) = sdp.solve(opts).map_err(|e| Error::SolverFailure(e.to_string()))?;
    let last = *sol.last();
    let diag = format!(
        "status {:?} after {} iterations: primal {:.9e}, dual {:.9e}, pinf {:.2e}, dinf {:.2e}",
        sol.status, sol.iterations, last.primal, last.dual, last.pinf, last.dinf
    );
    let upper = constant - sol.primal;
    let lower = constant - sol.dual;
    if sol.status != SdpStatus::Optimal || sol.gap.abs() > 1e-6 * (1.0 + upper.abs()) {
        return Err(Error::SolverFailure(diag));
    }
    Ok(ThetaResult { primal: lower, dual: upper, gap: sol.gap, iterations: sol.iterations })
}

/// ‖I + m‖ for a witness m ⊥ S with I + m ⪰ 0; a lower bound on ϑ(S).
pub fn theta_lower_from_witness(s: &OperatorSystem, m: &CMatrix) -> Result<f64> {
    let n = s.ambient();
    if m.shape() != (n, n) {
        return Err(Error::Dimension(format!("witness {:?} for M_{n}", m.shape())));
    }
    let overlap = s.project(m).frobenius();
    if overlap > 1e-8 {
        return Err(Error::NotFeasibleWitness(format!("component in S of norm {overlap:.3e}")));
    }
    let shifted = m + &CMatrix::identity(n);
    if !shifted.is_hermitian(1e-9) {
        return Err(Error::NotFeasibleWitness("I + m is not Hermitian".into()));
    }
    let lo = matkit::min_eig(&shifted.hermitian_part())?;
    if lo < -1e-9 {
        return Err(Error::NotFeasibleWitness(format!("I + m has eigenvalue {lo:.3e}")));
    }
    Ok(op_norm(&shifted))
}
