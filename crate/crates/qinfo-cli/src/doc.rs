// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! JSON documents for states, channels, codes, error sets, graphs and operator systems.
//!
//! Complex scalars are `[re, im]`. Matrices are row-major nested arrays, or for
//! large sparse matrices `{"rows", "cols", "entries": [[i, j, [re, im]], ...]}`.

use std::fmt;
use std::path::Path;

use qinfo::channels::Channel;
use qinfo::matkit::{c, CMatrix, C64};
use qinfo::qec::Code;
use qinfo::states::{PureState, State};
use qinfo::zeroerr::{Graph, OperatorSystem};
use serde_json::{json, Map, Value};

use crate::canon::num;

/// Malformed input, reported with the file and the offending line or field.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

type Res<T> = std::result::Result<T, InputError>;

/// Matrices at least this large are written sparsely when at most a quarter full.
const SPARSE_MIN_ENTRIES: usize = 256;

#[derive(Clone, Debug)]
pub enum Document {
    State(State),
    Pure(PureState),
    Channel(Channel),
    Code(Code),
    Errors { ops: Vec<CMatrix>, probs: Option<Vec<f64>> },
    Graph(Graph),
    System(OperatorSystem),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::State(_) | Document::Pure(_) => "state",
            Document::Channel(_) => "channel",
            Document::Code(_) => "code",
            Document::Errors { .. } => "errors",
            Document::Graph(_) => "graph",
            Document::System(_) => "system",
        }
    }
}

pub fn read_text(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Res<Document> {
    parse_document(&read_text(path)?, &path.display().to_string())
}

pub fn parse_document(text: &str, origin: &str) -> Res<Document> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| InputError(format!("{origin}: {e}")))?;
    Doc { origin }.document(&v)
}

struct Doc<'a> {
    origin: &'a str,
}

impl Doc<'_> {
    fn err(&self, field: &str, msg: impl fmt::Display) -> InputError {
        InputError(format!("{}: field `{field}`: {msg}", self.origin))
    }

    fn field<'v>(&self, obj: &'v Map<String, Value>, name: &str) -> Res<&'v Value> {
        obj.get(name).ok_or_else(|| self.err(name, "missing"))
    }

    fn usize_at(&self, v: &Value, path: &str) -> Res<usize> {
        v.as_u64().map(|x| x as usize).ok_or_else(|| self.err(path, "expected a nonnegative integer"))
    }

    fn real_at(&self, v: &Value, path: &str) -> Res<f64> {
        v.as_f64().ok_or_else(|| self.err(path, "expected a number"))
    }

    fn array_at<'v>(&self, v: &'v Value, path: &str) -> Res<&'v Vec<Value>> {
        v.as_array().ok_or_else(|| self.err(path, "expected an array"))
    }

    fn complex_at(&self, v: &Value, path: &str) -> Res<C64> {
        match v.as_array().map(Vec::as_slice) {
            Some([re, im]) => Ok(c(self.real_at(re, &format!("{path}[0]"))?, self.real_at(im, &format!("{path}[1]"))?)),
            _ => Err(self.err(path, "expected a complex number [re, im]")),
        }
    }

    fn dims_at(&self, v: &Value, path: &str) -> Res<Vec<usize>> {
        let arr = self.array_at(v, path)?;
        let dims = arr
            .iter()
            .enumerate()
            .map(|(k, d)| self.usize_at(d, &format!("{path}[{k}]")))
            .collect::<Res<Vec<_>>>()?;
        if dims.is_empty() || dims.contains(&0) {
            return Err(self.err(path, "dimensions must be a nonempty list of positive integers"));
        }
        Ok(dims)
    }

    fn vector_at(&self, v: &Value, path: &str) -> Res<Vec<C64>> {
        self.array_at(v, path)?.iter().enumerate().map(|(k, z)| self.complex_at(z, &format!("{path}[{k}]"))).collect()
    }

    fn matrix_at(&self, v: &Value, path: &str) -> Res<CMatrix> {
        if let Some(obj) = v.as_object() {
            let part = |name: &str| obj.get(name).ok_or_else(|| self.err(path, format!("sparse matrix needs `{name}`")));
            let rows = self.usize_at(part("rows")?, &format!("{path}.rows"))?;
            let cols = self.usize_at(part("cols")?, &format!("{path}.cols"))?;
            let entries = part("entries")?;
            let mut m = CMatrix::zeros(rows, cols);
            for (k, e) in self.array_at(entries, &format!("{path}.entries"))?.iter().enumerate() {
                let p = format!("{path}.entries[{k}]");
                match e.as_array().map(Vec::as_slice) {
                    Some([i, j, z]) => {
                        let (i, j) = (self.usize_at(i, &p)?, self.usize_at(j, &p)?);
                        if i >= rows || j >= cols {
                            return Err(self.err(&p, format!("index ({i}, {j}) outside {rows}x{cols}")));
                        }
                        m[(i, j)] = self.complex_at(z, &format!("{p}[2]"))?;
                    }
                    _ => return Err(self.err(&p, "expected [row, col, [re, im]]")),
                }
            }
            return Ok(m);
        }
        let rows = self.array_at(v, path)?;
        let mut data = Vec::new();
        let mut cols = None;
        for (i, row) in rows.iter().enumerate() {
            let p = format!("{path}[{i}]");
            let entries = self.vector_at(row, &p)?;
            match cols {
                None => cols = Some(entries.len()),
                Some(n) if n != entries.len() => {
                    return Err(self.err(&p, format!("row has {} entries, expected {n}", entries.len())))
                }
                _ => {}
            }
            data.extend(entries);
        }
        if rows.is_empty() || cols == Some(0) {
            return Err(self.err(path, "empty matrix"));
        }
        CMatrix::new(rows.len(), cols.unwrap_or(0), data).map_err(|e| self.err(path, e))
    }

    fn matrices_at(&self, v: &Value, path: &str) -> Res<Vec<CMatrix>> {
        let arr = self.array_at(v, path)?;
        if arr.is_empty() {
            return Err(self.err(path, "expected at least one matrix"));
        }
        arr.iter().enumerate().map(|(k, m)| self.matrix_at(m, &format!("{path}[{k}]"))).collect()
    }

    fn document(&self, v: &Value) -> Res<Document> {
        let obj = v.as_object().ok_or_else(|| InputError(format!("{}: expected a JSON object", self.origin)))?;
        let kind = self.field(obj, "kind")?.as_str().ok_or_else(|| self.err("kind", "expected a string"))?;
        match kind {
            "state" => {
                let dims = self.dims_at(self.field(obj, "dims")?, "dims")?;
                match (obj.get("rho"), obj.get("vector")) {
                    (Some(rho), None) => {
                        let m = self.matrix_at(rho, "rho")?;
                        State::new(dims, m).map(Document::State).map_err(|e| self.err("rho", e))
                    }
                    (None, Some(vec)) => {
                        let v = self.vector_at(vec, "vector")?;
                        PureState::new(dims, v).map(Document::Pure).map_err(|e| self.err("vector", e))
                    }
                    _ => Err(self.err("rho", "a state needs exactly one of `rho` or `vector`")),
                }
            }
            "channel" => {
                let din = self.usize_at(self.field(obj, "din")?, "din")?;
                let dout = self.usize_at(self.field(obj, "dout")?, "dout")?;
                let kraus = self.matrices_at(self.field(obj, "kraus")?, "kraus")?;
                Channel::new(din, dout, kraus).map(Document::Channel).map_err(|e| self.err("kraus", e))
            }
            "code" => {
                let w = self.matrix_at(self.field(obj, "isometry")?, "isometry")?;
                Code::new(w).map(Document::Code).map_err(|e| self.err("isometry", e))
            }
            "errors" => {
                let ops = self.matrices_at(self.field(obj, "ops")?, "ops")?;
                let shape = ops[0].shape();
                if let Some(k) = ops.iter().position(|m| m.shape() != shape) {
                    return Err(self.err(&format!("ops[{k}]"), format!("shape differs from {shape:?}")));
                }
                let probs = match obj.get("probs") {
                    None => None,
                    Some(p) => {
                        let arr = self.array_at(p, "probs")?;
                        if arr.len() != ops.len() {
                            return Err(self.err("probs", format!("{} weights for {} operators", arr.len(), ops.len())));
                        }
                        Some(arr.iter().enumerate().map(|(k, x)| self.real_at(x, &format!("probs[{k}]"))).collect::<Res<_>>()?)
                    }
                };
                Ok(Document::Errors { ops, probs })
            }
            "graph" => {
                let n = self.usize_at(self.field(obj, "vertices")?, "vertices")?;
                let mut edges = Vec::new();
                for (k, e) in self.array_at(self.field(obj, "edges")?, "edges")?.iter().enumerate() {
                    let p = format!("edges[{k}]");
                    match e.as_array().map(Vec::as_slice) {
                        Some([u, v]) => edges.push((self.usize_at(u, &p)?, self.usize_at(v, &p)?)),
                        _ => return Err(self.err(&p, "expected [u, v]")),
                    }
                }
                Graph::new(n, &edges).map(Document::Graph).map_err(|e| self.err("edges", e))
            }
            "system" => {
                let n = self.usize_at(self.field(obj, "dim")?, "dim")?;
                let span = self.matrices_at(self.field(obj, "span")?, "span")?;
                OperatorSystem::from_spanning(n, &span).map(Document::System).map_err(|e| self.err("span", e))
            }
            other => Err(self.err("kind", format!("unknown document kind {other:?}"))),
        }
    }
}

pub fn complex_value(z: C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn vector_value(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|&z| complex_value(z)).collect())
}

pub fn matrix_value(m: &CMatrix) -> Value {
    let (rows, cols) = m.shape();
    let nnz = m.nnz();
    if rows * cols >= SPARSE_MIN_ENTRIES && 4 * nnz <= rows * cols {
        let mut entries = Vec::with_capacity(nnz);
        for i in 0..rows {
            for j in 0..cols {
                let z = m[(i, j)];
                if z != c(0.0, 0.0) {
                    entries.push(json!([i, j, complex_value(z)]));
                }
            }
        }
        return json!({ "rows": rows, "cols": cols, "entries": entries });
    }
    Value::Array((0..rows).map(|i| vector_value(m.row(i))).collect())
}

pub fn matrices_value(ms: &[CMatrix]) -> Value {
    Value::Array(ms.iter().map(matrix_value).collect())
}

pub fn reals_value(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn state_value(s: &State) -> Value {
    json!({ "kind": "state", "dims": s.dims(), "rho": matrix_value(s.rho()) })
}

pub fn pure_value(p: &PureState) -> Value {
    json!({ "kind": "state", "dims": p.dims(), "vector": vector_value(p.vec()) })
}

pub fn channel_value(ch: &Channel) -> Value {
    json!({ "kind": "channel", "din": ch.din(), "dout": ch.dout(), "kraus": matrices_value(ch.kraus()) })
}

pub fn code_value(code: &Code) -> Value {
    json!({ "kind": "code", "isometry": matrix_value(code.isometry()) })
}

pub fn errors_value(ops: &[CMatrix], probs: Option<&[f64]>) -> Value {
    let mut v = json!({ "kind": "errors", "ops": matrices_value(ops) });
    if let Some(p) = probs {
        v["probs"] = reals_value(p);
    }
    v
}

pub fn graph_value(g: &Graph) -> Value {
    let edges: Vec<Value> = g.edges().into_iter().map(|(u, v)| json!([u, v])).collect();
    json!({ "kind": "graph", "vertices": g.vertices(), "edges": edges })
}

pub fn system_value(s: &OperatorSystem) -> Value {
    json!({ "kind": "system", "dim": s.ambient(), "span": matrices_value(s.basis()) })
}

pub fn document_value(d: &Document) -> Value {
    match d {
        Document::State(s) => state_value(s),
        Document::Pure(p) => pure_value(p),
        Document::Channel(ch) => channel_value(ch),
        Document::Code(code) => code_value(code),
        Document::Errors { ops, probs } => errors_value(ops, probs.as_deref()),
        Document::Graph(g) => graph_value(g),
        Document::System(s) => system_value(s),
    }
}
