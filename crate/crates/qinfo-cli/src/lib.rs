// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: JSON documents in, canonical JSON or table reports out.
//!
//! Exit codes: 0 on success, 1 when an analysis fails, 2 on malformed input.

pub mod canon;
mod commands;
pub mod doc;

pub use commands::{run, Outcome};
