// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use qinfo::matkit::{c, CMatrix};
use qinfo::randkit;
use rand_chacha::ChaCha20Rng;

pub fn rng(name: &str) -> ChaCha20Rng {
    randkit::stream_rng(0x7e57, name)
}

pub fn rng_seeded(seed: u64, name: &str) -> ChaCha20Rng {
    randkit::stream_rng(seed, name)
}

/// Matrix from parallel real/imaginary slices, row-major.
pub fn from_parts(rows: usize, cols: usize, re: &[f64], im: &[f64]) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| c(re[i * cols + j], im[i * cols + j]))
}

pub fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    let d = a.max_abs_diff(b);
    assert!(d <= tol, "matrices differ by {d:e} (tol {tol:e})");
}
