// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Primal-dual interior point method with Nesterov-Todd scaling and a
//! Mehrotra predictor-corrector step. The Schur complement is dense and
//! factored by Cholesky.

use nalgebra::{Cholesky, DVector, SymmetricEigen};

use super::{RMat, SdpProblem};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_iter: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIter,
}

/// Diagnostics of one iterate, recorded before the step is taken.
#[derive(Clone, Copy, Debug)]
pub struct IterRecord {
    pub primal: f64,
    pub dual: f64,
    /// ‖b − A(X)‖ / (1 + ‖b‖)
    pub pinf: f64,
    /// ‖C − Aᵀy + Z‖ / (1 + ‖C‖)
    pub dinf: f64,
    /// ⟨X, Z⟩, never negative.
    pub complementarity: f64,
    /// yᵀ(b − A(X)) − ⟨C − Aᵀy + Z, X⟩; dual − primal = complementarity + this.
    pub infeasibility_term: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub primal: f64,
    pub dual: f64,
    /// dual − primal.
    pub gap: f64,
    pub x: Vec<RMat>,
    pub y: Vec<f64>,
    pub z: Vec<RMat>,
    pub iterations: usize,
    pub status: SdpStatus,
    pub history: Vec<IterRecord>,
}

impl SdpSolution {
    pub fn last(&self) -> &IterRecord {
        self.history.last().expect("at least one iterate")
    }
}

const STEP_FACTOR: f64 = 0.95;
const STALL_LIMIT: usize = 30;
const MAX_SCHUR_CONDITION: f64 = 1e14;

struct Ops<'a> {
    p: &'a SdpProblem,
}

impl Ops<'_> {
    fn a(&self, x: &[RMat]) -> Vec<f64> {
        self.p
            .constraints()
            .iter()
            .map(|c| c.mats.iter().zip(x).filter_map(|(a, xb)| a.as_ref().map(|a| a.dot(xb))).sum())
            .collect()
    }

    fn at(&self, y: &[f64]) -> Vec<RMat> {
        let mut out: Vec<RMat> = self.p.block_sizes().iter().map(|&s| RMat::zeros(s, s)).collect();
        for (c, &yi) in self.p.constraints().iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(&c.mats) {
                if let Some(a) = a {
                    *o += a * yi;
                }
            }
        }
        out
    }
}

fn dot_blocks(a: &[RMat], b: &[RMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn norm_blocks(a: &[RMat]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn sym(m: RMat) -> RMat {
    (&m + m.transpose()) * 0.5
}

/// Per-block NT scaling data.
struct Scaling {
    g: RMat,
    ginv: RMat,
    /// W = G Gᵀ
    w: RMat,
    lambda: Vec<f64>,
    lx_inv: RMat,
    lz_inv: RMat,
}

fn lower_inverse(l: &RMat) -> Option<RMat> {
    l.solve_lower_triangular(&RMat::identity(l.nrows(), l.ncols()))
}

fn scaling(x: &RMat, z: &RMat) -> Option<Scaling> {
    let lx = Cholesky::new(x.clone())?.l();
    let lz = Cholesky::new(z.clone())?.l();
    let svd = (lz.transpose() * &lx).svd(true, true);
    let v = svd.v_t?.transpose();
    let sig = svd.singular_values;
    if sig.iter().any(|&s| !(s > 0.0)) {
        return None;
    }
    let n = sig.len();
    let inv_half = RMat::from_diagonal(&sig.map(|s| 1.0 / s.sqrt()));
    let half = RMat::from_diagonal(&sig.map(f64::sqrt));
    let lx_inv = lower_inverse(&lx)?;
    let lz_inv = lower_inverse(&lz)?;
    let g = &lx * &v * inv_half;
    let ginv = half * v.transpose() * &lx_inv;
    let w = &g * g.transpose();
    Some(Scaling { g, ginv, w, lambda: (0..n).map(|i| sig[i]).collect(), lx_inv, lz_inv })
}

/// Largest α with L Lᵀ + α D ⪰ 0 (infinite when D ⪰ 0).
fn max_step(l_inv: &RMat, d: &RMat) -> f64 {
    let m = sym(l_inv * d * l_inv.transpose());
    let lo = SymmetricEigen::new(m).eigenvalues.min();
    if lo < 0.0 {
        -1.0 / lo
    } else {
        f64::INFINITY
    }
}

struct Direction {
    dx: Vec<RMat>,
    dy: DVector<f64>,
    dz: Vec<RMat>,
}

/// Solves the Newton system for a scaled complementarity target `rs`.
fn direction(
    ops: &Ops,
    sc: &[Scaling],
    schur: &Schur,
    rs: &[RMat],
    rd: &[RMat],
    rp: &[f64],
) -> Direction {
    let rc: Vec<RMat> = sc.iter().zip(rs).map(|(s, r)| &s.g * r * s.g.transpose()).collect();
    let lhs: Vec<RMat> = sc.iter().zip(rc.iter().zip(rd)).map(|(s, (c, d))| c + &s.w * d * &s.w).collect();
    let h = DVector::from_iterator(rp.len(), ops.a(&lhs).iter().zip(rp).map(|(a, r)| a - r));
    let dy = schur.solve(h);
    let aty = ops.at(dy.as_slice());
    let dz: Vec<RMat> = aty.iter().zip(rd).map(|(a, d)| sym(a - d)).collect();
    let dx: Vec<RMat> = sc.iter().zip(rc.iter().zip(&dz)).map(|(s, (c, z))| sym(c - &s.w * z * &s.w)).collect();
    Direction { dx, dy, dz }
}

/// Cholesky factor of the Jacobi-equilibrated Schur complement D⁻¹ M D⁻¹.
struct Schur {
    chol: Cholesky<f64, nalgebra::Dyn>,
    d_inv: DVector<f64>,
}

impl Schur {
    fn factor(mut m: RMat) -> Option<Self> {
        let d_inv = m.diagonal().map(|x| if x > 0.0 { 1.0 / x.sqrt() } else { 1.0 });
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] *= d_inv[i] * d_inv[j];
            }
        }
        Some(Self { chol: Cholesky::new(m)?, d_inv })
    }

    /// Estimate from the Cholesky diagonal.
    fn condition(&self) -> f64 {
        let ld = self.chol.l_dirty().diagonal();
        (ld.max() / ld.min()).powi(2)
    }

    fn solve(&self, h: DVector<f64>) -> DVector<f64> {
        let scaled = h.component_mul(&self.d_inv);
        self.chol.solve(&scaled).component_mul(&self.d_inv)
    }
}

fn steps(sc: &[Scaling], d: &Direction) -> (f64, f64) {
    let ap = sc.iter().zip(&d.dx).map(|(s, dx)| max_step(&s.lx_inv, dx)).fold(f64::INFINITY, f64::min);
    let ad = sc.iter().zip(&d.dz).map(|(s, dz)| max_step(&s.lz_inv, dz)).fold(f64::INFINITY, f64::min);
    (ap, ad)
}

fn initial_point(p: &SdpProblem) -> (Vec<RMat>, Vec<RMat>) {
    let mut xs = Vec::new();
    let mut zs = Vec::new();
    for (k, &s) in p.block_sizes().iter().enumerate() {
        let sf = s as f64;
        let mut xi = 10f64.max(sf.sqrt());
        let mut eta = 10f64.max(sf.sqrt()).max(p.objective()[k].norm());
        for c in p.constraints() {
            if let Some(a) = &c.mats[k] {
                let na = a.norm();
                xi = xi.max(sf * (1.0 + c.rhs.abs()) / (1.0 + na));
                eta = eta.max(na);
            }
        }
        xs.push(RMat::identity(s, s) * xi);
        zs.push(RMat::identity(s, s) * eta);
    }
    (xs, zs)
}

/// Solves `p` from an infeasible big-shift start.
pub fn solve(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    let ops = Ops { p };
    let m = p.num_constraints();
    let b: Vec<f64> = p.constraints().iter().map(|c| c.rhs).collect();
    let c = p.objective();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nc = norm_blocks(c);
    let ntot: usize = p.block_sizes().iter().sum();

    let (mut x, mut z) = initial_point(p);
    let mut y = vec![0.0; m];
    let mut history = Vec::new();
    let mut best_pinf = f64::INFINITY;
    let mut stall = 0;

    for iter in 0..=opts.max_iter {
        let ax = ops.a(&x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, a)| bi - a).collect();
        let aty = ops.at(&y);
        let rd: Vec<RMat> = c.iter().zip(aty.iter().zip(&z)).map(|(ci, (a, zi))| ci - a + zi).collect();
        let primal = dot_blocks(c, &x);
        let dual: f64 = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
        let pinf_abs = rp.iter().map(|r| r * r).sum::<f64>().sqrt();
        let pinf = pinf_abs / (1.0 + nb);
        let dinf = norm_blocks(&rd) / (1.0 + nc);
        let xz = dot_blocks(&x, &z);
        let infeas = y.iter().zip(&rp).map(|(a, r)| a * r).sum::<f64>() - dot_blocks(&rd, &x);
        history.push(IterRecord { primal, dual, pinf, dinf, complementarity: xz, infeasibility_term: infeas });
        let relgap = (dual - primal).abs() / (1.0 + primal.abs() + dual.abs());

        let done = |status| SdpSolution {
            primal,
            dual,
            gap: dual - primal,
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            iterations: iter,
            status,
            history: history.clone(),
        };
        if relgap <= opts.tol && pinf <= opts.tol && dinf <= opts.tol {
            return Ok(done(SdpStatus::Optimal));
        }
        if iter == opts.max_iter {
            return Ok(done(SdpStatus::MaxIter));
        }
        if pinf < 0.999 * best_pinf {
            best_pinf = pinf;
            stall = 0;
        } else {
            stall += 1;
            if stall >= STALL_LIMIT && pinf > 1e-6 {
                return Err(Error::Infeasible { iterations: iter, primal_residual: pinf });
            }
        }

        let breakdown = |condition| Error::NumericalBreakdown { iteration: iter, condition };
        let sc: Vec<Scaling> = match x.iter().zip(&z).map(|(xb, zb)| scaling(xb, zb)).collect::<Option<_>>() {
            Some(s) => s,
            None => return Err(breakdown(f64::INFINITY)),
        };

        // Schur complement M_ij = ⟨Gᵀ A_i G, Gᵀ A_j G⟩.
        let width: usize = p.block_sizes().iter().map(|s| s * s).sum();
        let mut v = RMat::zeros(m, width);
        for (i, con) in p.constraints().iter().enumerate() {
            let mut off = 0;
            for (k, a) in con.mats.iter().enumerate() {
                let s = p.block_sizes()[k];
                if let Some(a) = a {
                    let t = sc[k].g.transpose() * a * &sc[k].g;
                    for (q, val) in t.iter().enumerate() {
                        v[(i, off + q)] = *val;
                    }
                }
                off += s * s;
            }
        }
        let schur = match Schur::factor(&v * v.transpose()) {
            Some(f) => f,
            None => return Err(breakdown(f64::INFINITY)),
        };
        let cond = schur.condition();
        if !(cond <= MAX_SCHUR_CONDITION) {
            return Err(breakdown(cond));
        }

        let mu = xz / ntot as f64;
        let pred_rs: Vec<RMat> = sc.iter().map(|s| RMat::from_diagonal(&DVector::from_iterator(s.lambda.len(), s.lambda.iter().map(|l| -l)))).collect();
        let pred = direction(&ops, &sc, &schur, &pred_rs, &rd, &rp);
        let (ap, ad) = steps(&sc, &pred);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let x_aff: Vec<RMat> = x.iter().zip(&pred.dx).map(|(a, d)| a + d * ap).collect();
        let z_aff: Vec<RMat> = z.iter().zip(&pred.dz).map(|(a, d)| a + d * ad).collect();
        let mu_aff = dot_blocks(&x_aff, &z_aff) / ntot as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let corr_rs: Vec<RMat> = sc
            .iter()
            .zip(pred.dx.iter().zip(&pred.dz))
            .map(|(s, (dx, dz))| {
                let dxs = &s.ginv * dx * s.ginv.transpose();
                let dzs = s.g.transpose() * dz * &s.g;
                let cross = (&dxs * &dzs + &dzs * &dxs) * 0.5;
                let n = s.lambda.len();
                RMat::from_fn(n, n, |i, j| {
                    let mut r = -cross[(i, j)];
                    if i == j {
                        r += sigma * mu - s.lambda[i] * s.lambda[i];
                    }
                    2.0 * r / (s.lambda[i] + s.lambda[j])
                })
            })
            .collect();
        let dir = direction(&ops, &sc, &schur, &corr_rs, &rd, &rp);
        let (ap, ad) = steps(&sc, &dir);
        let ap = (STEP_FACTOR * ap).min(1.0);
        let ad = (STEP_FACTOR * ad).min(1.0);
        for (xb, d) in x.iter_mut().zip(&dir.dx) {
            *xb = sym(&*xb + d * ap);
        }
        for (zb, d) in z.iter_mut().zip(&dir.dz) {
            *zb = sym(&*zb + d * ad);
        }
        for (yi, d) in y.iter_mut().zip(dir.dy.iter()) {
            *yi += ad * d;
        }
    }
    unreachable!("loop returns at max_iter")
}
