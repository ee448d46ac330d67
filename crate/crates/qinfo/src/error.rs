// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("negative eigenvalue {0:.3e} outside tolerance")]
    NegativeEigenvalue(f64),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("cut {cut} out of range for {parts} subsystems")]
    CutOutOfRange { cut: usize, parts: usize },
    #[error("fidelity parameter F={0} outside [0, 1]")]
    FOutOfRange(f64),
    #[error("F={f} below 1/d^2={min}; Schmidt number is not determined there")]
    BelowValidRange { f: f64, min: f64 },
    #[error("Choi matrix of total dimension {dim} exceeds cap {cap}")]
    ChoiTooLarge { dim: usize, cap: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("map is not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error("kernel is not column stochastic (column {0})")]
    NotStochastic(usize),
    #[error("Kraus families define different maps (Choi distance {0:.3e})")]
    NotEquivalent(f64),
    #[error("Kraus family is linearly dependent (rank {rank} < {len})")]
    NotMinimal { rank: usize, len: usize },
    #[error("Knill-Laflamme condition violated (residual {0:.3e})")]
    KlViolated(f64),
    #[error("eigenvalues must be distinct and positive")]
    EigsNotDistinct,
    #[error("k={k} out of range for {m}x{n}")]
    KOutOfRange { k: usize, m: usize, n: usize },
    #[error("invalid probability vector: {0}")]
    Probability(String),
    #[error("reduced state is ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),
    #[error("graph with {0} vertices exceeds the exact-search limit")]
    TooLarge(usize),
    #[error("witness is not feasible: {0}")]
    NotFeasibleWitness(String),
    #[error("SDP solver failed: {0}")]
    SolverFailure(String),
    #[error("SDP declared infeasible after {iterations} iterations (primal residual {primal_residual:.3e})")]
    Infeasible { iterations: usize, primal_residual: f64 },
    #[error("Newton system breakdown at iteration {iteration} (condition {condition:.3e})")]
    NumericalBreakdown { iteration: usize, condition: f64 },
    #[error("not an operator system: {0}")]
    NotOperatorSystem(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("matrix A is singular")]
    SingularA,
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("distribution mean is not isotropic (spread {0:.3e})")]
    MeanNotIsotropic(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
