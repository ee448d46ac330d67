// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Finite-dimensional quantum information toolkit.
//!
//! Channels in Kraus and Choi form, error-correcting codes with synthesized
//! recovery maps, Schmidt and Werner analysis, entropies and Petz recovery,
//! the quantum Lovász number as a semidefinite program, and matrix
//! concentration experiments.

pub mod channels;
pub mod entropy;
pub mod entwit;
mod error;
pub mod matkit;
pub mod qec;
pub mod randkit;
pub mod sdpcore;
pub mod states;
pub mod zeroerr;

pub use error::{Error, Result};
pub use matkit::{CMatrix, C64};
