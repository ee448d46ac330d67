// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! SDPA sparse text export (F0 = C, F_i = A_i, c = b).

use std::fmt::Write;

use super::{RMat, SdpProblem};

/// C-style `%.16e`: sign, 17 significant digits, exponent with sign and at least two digits.
pub(crate) fn c_exp(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.16e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

fn entries(out: &mut String, matno: usize, blk: usize, m: &RMat) {
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let v = m[(i, j)];
            if v != 0.0 {
                writeln!(out, "{matno} {blk} {} {} {}", i + 1, j + 1, c_exp(v)).expect("string write");
            }
        }
    }
}

pub fn to_sdpa_string(p: &SdpProblem) -> String {
    let mut out = String::new();
    writeln!(out, "\"qinfo export: max <C,X> s.t. <A_i,X> = b_i, X psd").expect("string write");
    writeln!(out, "{}", p.num_constraints()).expect("string write");
    writeln!(out, "{}", p.block_sizes().len()).expect("string write");
    let sizes: Vec<String> = p.block_sizes().iter().map(|s| s.to_string()).collect();
    writeln!(out, "{}", sizes.join(" ")).expect("string write");
    let rhs: Vec<String> = p.constraints().iter().map(|c| c_exp(c.rhs)).collect();
    writeln!(out, "{}", rhs.join(" ")).expect("string write");
    for (k, c) in p.objective().iter().enumerate() {
        entries(&mut out, 0, k + 1, c);
    }
    for (i, con) in p.constraints().iter().enumerate() {
        for (k, a) in con.mats.iter().enumerate() {
            if let Some(a) = a {
                entries(&mut out, i + 1, k + 1, a);
            }
        }
    }
    out
}
