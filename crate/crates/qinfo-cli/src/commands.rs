// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use qinfo::channels::{self, Channel};
use qinfo::entropy;
use qinfo::entwit;
use qinfo::matkit::{herm_eig, op_norm, trace_norm, CMatrix};
use qinfo::qec::{self, Code, Noise};
use qinfo::randkit::{self, FamilySampler, MatrixDistribution, Sampler};
use qinfo::states::{self, PureState, State};
use qinfo::zeroerr::{self, Graph};
use qinfo::Error;
use serde_json::{json, Map, Value};

use crate::canon::{num, to_canonical};
use crate::doc::{self, Document, InputError};

#[derive(Parser, Debug)]
#[command(name = "qinfo", version, about = "Batch analyses over quantum states, channels, codes and graphs")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the command's numerical tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Emit canonical JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Schmidt coefficients of a pure state across a cut.
    Schmidt {
        state: PathBuf,
        #[arg(long, default_value_t = 1)]
        cut: usize,
    },
    /// Structural checks on a channel.
    #[command(subcommand)]
    Channel(ChannelCommand),
    /// Error-correction conditions and recovery synthesis.
    #[command(subcommand)]
    Qec(QecCommand),
    /// Werner state and its Schmidt number.
    Werner {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        f: f64,
    },
    /// Lovász-type bound of a graph (edge list or JSON) or operator system.
    Theta {
        input: PathBuf,
        #[arg(long)]
        dc: Option<usize>,
    },
    /// Entropies, conditional mutual information and the Markov test of a tripartite state.
    Ssa { state: PathBuf },
    /// Petz recovery map of a state through a channel.
    Petz { state: PathBuf, channel: PathBuf },
    /// Sample a unitary family that decorrelates the first subsystem.
    Randomize {
        state: PathBuf,
        #[arg(long)]
        n_unitaries: usize,
        #[arg(long, value_enum, default_value_t = SamplerArg::Haar)]
        sampler: SamplerArg,
    },
    /// Matrix tail-bound experiment.
    Tailbound {
        #[arg(long, value_enum)]
        dist: DistArg,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Bernoulli parameter; the uniform-spectrum distribution has mean 1/2.
        #[arg(long, default_value_t = 0.5)]
        mu: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Print a built-in input document.
    Example { name: ExampleName },
}

#[derive(Subcommand, Debug)]
enum ChannelCommand {
    /// CP, TP and unital checks, Choi rank and complementary dimensions.
    Analyze { channel: PathBuf },
}

#[derive(Subcommand, Debug)]
enum QecCommand {
    /// Knill-Laflamme conditions for a code and error set.
    Check { code: PathBuf, errors: PathBuf },
    /// Build the recovery channel and measure its worst deviation on random logical states.
    Recover {
        code: PathBuf,
        errors: PathBuf,
        #[arg(long, default_value_t = 20)]
        verify: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SamplerArg {
    Haar,
    Weyl,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DistArg {
    /// Haar-rotated diagonal of i.i.d. Bernoulli(mu) entries.
    Bernoulli,
    /// Haar-rotated diagonal of i.i.d. uniform [0, 1] entries.
    Psd,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExampleName {
    ShorCode,
    ShorErrors,
    Bell,
    K5,
    C5,
}

/// Exit status and the text destined for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    /// Exit 2.
    Input(String),
    /// Exit 1; the report, when present, is still printed.
    Analysis { reason: String, detail: String, report: Option<Report> },
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.0)
    }
}

/// Errors that indicate malformed arguments rather than a failed analysis.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Dimension(_)
            | Error::CutOutOfRange { .. }
            | Error::FOutOfRange(_)
            | Error::BelowValidRange { .. }
            | Error::Domain(_)
            | Error::Probability(_)
            | Error::InvalidGraph(_)
            | Error::NotOperatorSystem(_)
            | Error::NotHermitian(_)
            | Error::NotPsd(_)
            | Error::NonFinite
    )
}

fn reason_of(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|ch: char| !ch.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

fn lib(context: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        if is_input_error(&e) {
            Failure::Input(format!("{context}: {e}"))
        } else {
            Failure::Analysis { reason: reason_of(&e), detail: format!("{context}: {e}"), report: None }
        }
    }
}

struct Report {
    command: &'static str,
    fields: Map<String, Value>,
    status: &'static str,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Self { command, fields: Map::new(), status: "ok" }
    }

    fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), v.into());
        self
    }

    fn real(&mut self, key: &str, x: f64) -> &mut Self {
        self.set(key, num(x))
    }

    fn into_value(self) -> Value {
        let mut m = self.fields;
        m.insert("kind".into(), "report".into());
        m.insert("command".into(), self.command.into());
        m.insert("status".into(), self.status.into());
        Value::Object(m)
    }
}

type Run = std::result::Result<Value, Failure>;

/// Parse `argv` (program name first) and execute one command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let json = cli.json;
    match dispatch(&cli) {
        Ok(v) => Outcome { code: 0, stdout: render(&v, json), stderr: String::new() },
        Err(Failure::Input(msg)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(Failure::Analysis { reason, detail, report }) => {
            let mut v = match report {
                Some(r) => r.into_value(),
                None => json!({ "kind": "report", "command": command_name(&cli.command), "status": "error" }),
            };
            v["reason"] = json!({ "kind": reason, "message": detail });
            Outcome { code: 1, stdout: render(&v, json), stderr: format!("error [{reason}]: {detail}\n") }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Schmidt { .. } => "schmidt",
        Command::Channel(_) => "channel analyze",
        Command::Qec(QecCommand::Check { .. }) => "qec check",
        Command::Qec(QecCommand::Recover { .. }) => "qec recover",
        Command::Werner { .. } => "werner",
        Command::Theta { .. } => "theta",
        Command::Ssa { .. } => "ssa",
        Command::Petz { .. } => "petz",
        Command::Randomize { .. } => "randomize",
        Command::Tailbound { .. } => "tailbound",
        Command::Example { .. } => "example",
    }
}

fn render(v: &Value, json: bool) -> String {
    if json || v.get("kind").and_then(Value::as_str) != Some("report") {
        return to_canonical(v) + "\n";
    }
    let mut lines = Vec::new();
    flatten("", v, &mut lines);
    let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    lines.iter().map(|(k, val)| format!("{k:<width$}  {val}\n")).collect()
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let scalar = |v: &Value| match v {
        Value::Number(n) if n.is_f64() => format!("{}", n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match v {
        Value::Object(m) if m.contains_key("kind") && !prefix.is_empty() => {
            let kind = m["kind"].as_str().unwrap_or("document");
            out.push((prefix.to_string(), format!("<{kind} document; use --json>")));
        }
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            for k in keys {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, &m[k], out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) && items.len() <= 16 => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", parts.join(", "))));
        }
        Value::Array(items) => out.push((prefix.to_string(), format!("<{} items; use --json>", items.len()))),
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn dispatch(cli: &Cli) -> Run {
    match &cli.command {
        Command::Schmidt { state, cut } => schmidt(state, *cut, cli.tol),
        Command::Channel(ChannelCommand::Analyze { channel }) => analyze_channel(channel),
        Command::Qec(QecCommand::Check { code, errors }) => qec_check(code, errors, cli.tol),
        Command::Qec(QecCommand::Recover { code, errors, verify }) => {
            qec_recover(code, errors, *verify, cli.tol, cli.seed)
        }
        Command::Werner { d, f } => werner(*d, *f),
        Command::Theta { input, dc } => theta(input, *dc),
        Command::Ssa { state } => ssa(state, cli.tol),
        Command::Petz { state, channel } => petz(state, channel),
        Command::Randomize { state, n_unitaries, sampler } => {
            randomize(state, *n_unitaries, *sampler, cli.seed)
        }
        Command::Tailbound { dist, dim, mu, n, alpha, trials } => {
            let sampler = match dist {
                DistArg::Bernoulli => Sampler::BernoulliProjector { mu: *mu },
                DistArg::Psd => Sampler::RandomPsdBounded,
            };
            tailbound(*dim, sampler, *n, *alpha, *trials, cli.seed)
        }
        Command::Example { name } => Ok(example(*name)),
    }
}

fn load_state(path: &Path) -> std::result::Result<State, Failure> {
    match doc::load(path)? {
        Document::State(s) => Ok(s),
        Document::Pure(p) => Ok(p.density()),
        other => Err(wrong_kind(path, "state", &other)),
    }
}

fn load_channel(path: &Path) -> std::result::Result<Channel, Failure> {
    match doc::load(path)? {
        Document::Channel(ch) => Ok(ch),
        other => Err(wrong_kind(path, "channel", &other)),
    }
}

fn wrong_kind(path: &Path, want: &str, got: &Document) -> Failure {
    Failure::Input(format!("{}: field `kind`: expected a {want} document, got {}", path.display(), got.kind()))
}

fn schmidt(path: &Path, cut: usize, tol: Option<f64>) -> Run {
    let psi = match doc::load(path)? {
        Document::Pure(p) => p,
        Document::State(s) => {
            let e = herm_eig(s.rho()).map_err(lib("state"))?;
            let top = e.values.len() - 1;
            if e.values[top] < 1.0 - 1e-9 {
                return Err(Failure::Input(format!("{}: field `rho`: not a pure state", path.display())));
            }
            PureState::normalized(s.dims().to_vec(), e.vector(top)).map_err(lib("state"))?
        }
        other => return Err(wrong_kind(path, "state", &other)),
    };
    let form = states::schmidt_decompose(&psi, cut).map_err(lib("schmidt"))?;
    let tol = tol.unwrap_or(states::SCHMIDT_RANK_TOL);
    let top = form.coeffs.first().copied().unwrap_or(0.0);
    let rank = form.coeffs.iter().filter(|&&l| l > tol * top.max(1e-300)).count();
    let probs: Vec<f64> = form.coeffs.iter().map(|l| l * l).collect();
    let ent: f64 = probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    let mut r = Report::new("schmidt");
    r.set("dims", psi.dims().to_vec())
        .set("cut", cut)
        .set("coefficients", doc::reals_value(&form.coeffs))
        .set("schmidt_rank", rank)
        .real("sum_squares", probs.iter().sum())
        .real("entanglement_entropy", ent);
    Ok(r.into_value())
}

fn analyze_channel(path: &Path) -> Run {
    let ch = load_channel(path)?;
    let comp = channels::complementary(&ch).map_err(lib("complementary"))?;
    let mut r = Report::new("channel analyze");
    r.set("din", ch.din())
        .set("dout", ch.dout())
        .set("kraus_count", ch.kraus().len())
        .set("cp", channels::is_cp(&ch).map_err(lib("choi"))?)
        .set("tp", channels::is_tp(&ch))
        .set("unital", channels::is_unital(&ch))
        .set("choi_rank", channels::choi_rank(&ch).map_err(lib("choi"))?)
        .set("complementary", json!({ "din": comp.din(), "dout": comp.dout() }));
    Ok(r.into_value())
}

fn load_code_and_errors(code: &Path, errors: &Path) -> std::result::Result<(Code, Vec<CMatrix>, Option<Vec<f64>>), Failure> {
    let code = match doc::load(code)? {
        Document::Code(c) => c,
        other => return Err(wrong_kind(code, "code", &other)),
    };
    let (ops, probs) = match doc::load(errors)? {
        Document::Errors { ops, probs } => (ops, probs),
        Document::Channel(ch) => (ch.kraus().to_vec(), None),
        other => return Err(wrong_kind(errors, "errors", &other)),
    };
    let n = code.physical_dim();
    if ops[0].shape() != (n, n) {
        return Err(Failure::Input(format!(
            "{}: field `ops`: operators are {:?}, code is {n}-dimensional",
            errors.display(),
            ops[0].shape()
        )));
    }
    Ok((code, ops, probs))
}

fn qec_check(code: &Path, errors: &Path, tol: Option<f64>) -> Run {
    let (code, ops, _) = load_code_and_errors(code, errors)?;
    let rep = qec::kl_check(&code, &ops, tol.unwrap_or(qec::KL_TOL)).map_err(lib("kl"))?;
    let alpha = herm_eig(&rep.alpha.hermitian_part()).map_err(lib("alpha"))?;
    let mut r = Report::new("qec check");
    r.set("physical_dim", code.physical_dim())
        .set("logical_dim", code.logical_dim())
        .set("error_count", ops.len())
        .set("passes", rep.passes)
        .real("max_residual", rep.max_residual)
        .set("alpha_eigenvalues", doc::reals_value(&alpha.values));
    if rep.passes {
        Ok(r.into_value())
    } else {
        r.status = "failed";
        let detail = format!("Knill-Laflamme residual {:.3e}", rep.max_residual);
        Err(Failure::Analysis { reason: "KlViolated".into(), detail, report: Some(r) })
    }
}

fn qec_recover(code: &Path, errors: &Path, samples: usize, tol: Option<f64>, seed: u64) -> Run {
    let (code, ops, probs) = load_code_and_errors(code, errors)?;
    let rec = qec::build_recovery(&code, &ops).map_err(lib("recovery"))?;
    let noise = match probs {
        Some(p) => Noise::new(p, ops.clone()),
        None => Noise::uniform(ops.clone()),
    }
    .map_err(lib("noise"))?;
    let dev = qec::verify_recovery(&rec, &noise, &code, samples, &mut randkit::stream_rng(seed, "qec-recover.verify")).map_err(lib("verify"))?;
    let tol = tol.unwrap_or(1e-8);
    let mut r = Report::new("qec recover");
    r.set("physical_dim", code.physical_dim())
        .set("logical_dim", code.logical_dim())
        .set("error_count", ops.len())
        .set("recovery_kraus_count", rec.kraus().len())
        .real("recovery_tp_deviation", op_norm(&(&rec.kraus_gram() - &CMatrix::identity(code.physical_dim()))))
        .set("samples", samples)
        .real("max_deviation", dev)
        .real("tolerance", tol)
        .set("verified", dev <= tol);
    if dev <= tol {
        Ok(r.into_value())
    } else {
        r.status = "failed";
        let detail = format!("worst trace-norm deviation {dev:.3e} exceeds {tol:.1e}");
        Err(Failure::Analysis { reason: "RecoveryDeviation".into(), detail, report: Some(r) })
    }
}

fn werner(d: usize, f: f64) -> Run {
    let rho = states::werner(d, f).map_err(lib("werner"))?;
    let k = states::werner_schmidt_number(d, f).map_err(lib("werner"))?;
    let mut r = Report::new("werner");
    r.set("d", d)
        .real("f", f)
        .set("schmidt_number", k)
        .set("ppt", entwit::ppt_test(&rho, 1).map_err(lib("ppt"))?)
        .set("state", doc::state_value(&rho));
    Ok(r.into_value())
}

fn theta(path: &Path, dc: Option<usize>) -> Run {
    let text = doc::read_text(path)?;
    let origin = path.display().to_string();
    let (system, graph) = if text.trim_start().starts_with('{') {
        match doc::parse_document(&text, &origin)? {
            Document::Graph(g) => (zeroerr::graph_op_system(&g), Some(g)),
            Document::System(s) => (s, None),
            Document::Channel(ch) => (zeroerr::op_system_from_channel(&ch).map_err(lib("operator system"))?, None),
            other => return Err(Failure::Input(format!("{origin}: field `kind`: expected graph, system or channel, got {}", other.kind()))),
        }
    } else {
        let g = Graph::parse_edge_list(&text).map_err(|e| Failure::Input(format!("{origin}: {e}")))?;
        (zeroerr::graph_op_system(&g), Some(g))
    };
    let res = zeroerr::theta_tilde(&system, dc).map_err(lib("theta"))?;
    let mut r = Report::new("theta");
    r.set("ambient_dim", system.ambient())
        .set("system_dim", system.dim())
        .set("dc", dc.unwrap_or(system.ambient()))
        .real("value", res.value())
        .real("primal", res.primal)
        .real("dual", res.dual)
        .real("gap", res.gap)
        .set("iterations", res.iterations);
    if let Some(g) = graph.filter(|g| g.vertices() <= zeroerr::MAX_SEARCH_VERTICES) {
        r.set("vertices", g.vertices())
            .set("edges", g.edges().len())
            .set("independence_number", zeroerr::graph_independence(&g).map_err(lib("independence"))?);
    }
    Ok(r.into_value())
}

fn ssa(path: &Path, tol: Option<f64>) -> Run {
    let rho = load_state(path)?;
    if rho.dims().len() != 3 {
        return Err(Failure::Input(format!("{}: field `dims`: expected three subsystems, got {:?}", path.display(), rho.dims())));
    }
    let rep = entropy::cond_mutual_info(&rho).map_err(lib("entropy"))?;
    let tol = tol.unwrap_or(1e-7);
    let mut r = Report::new("ssa");
    r.set("dims", rho.dims().to_vec())
        .real("s_ab", rep.s_ab)
        .real("s_bc", rep.s_bc)
        .real("s_b", rep.s_b)
        .real("s_abc", rep.s_abc)
        .real("cmi", rep.cmi)
        .real("tolerance", tol);
    match entropy::is_markov(&rho, tol) {
        Ok(m) => {
            r.set("markov", m)
                .real("reconstruction_error", entropy::markov_reconstruction_error(&rho).map_err(lib("petz"))?);
        }
        Err(Error::IllConditioned(cond)) => {
            r.set("markov", Value::Null).real("rho_b_condition", cond);
        }
        Err(e) => return Err(lib("markov")(e)),
    }
    Ok(r.into_value())
}

fn petz(state: &Path, channel: &Path) -> Run {
    let sigma = load_state(state)?;
    let ch = load_channel(channel)?;
    let p = entropy::petz_map(&sigma, &ch).map_err(lib("petz"))?;
    let recovered = p.apply_mat(&ch.apply_mat(sigma.rho()));
    let mut r = Report::new("petz");
    r.real("recovery_error", trace_norm(&(&recovered - sigma.rho())))
        .set("kraus_count", p.kraus().len())
        .set("petz", doc::channel_value(&p));
    Ok(r.into_value())
}

fn randomize(path: &Path, n: usize, sampler: SamplerArg, seed: u64) -> Run {
    let rho = load_state(path)?;
    if rho.dims().len() < 2 {
        return Err(Failure::Input(format!("{}: field `dims`: expected a bipartite state", path.display())));
    }
    let (s, name) = match sampler {
        SamplerArg::Haar => (FamilySampler::Haar, "haar"),
        SamplerArg::Weyl => (FamilySampler::Weyl, "weyl"),
    };
    let (fam, eps) = randkit::sample_randomizing_family(&rho, n, &mut randkit::stream_rng(seed, "randomize.family"), s).map_err(lib("randomize"))?;
    let mut r = Report::new("randomize");
    r.set("n_unitaries", n)
        .set("sampler", name)
        .real("epsilon", eps)
        .set("probs", doc::reals_value(&fam.probs))
        .set("unitaries", doc::matrices_value(&fam.unitaries));
    Ok(r.into_value())
}

fn tailbound(dim: usize, sampler: Sampler, n: usize, alpha: f64, trials: usize, seed: u64) -> Run {
    if dim == 0 || n == 0 || trials == 0 {
        return Err(Failure::Input("--dim, --n and --trials must be positive".into()));
    }
    let dist = MatrixDistribution::new(dim, sampler).map_err(lib("distribution"))?;
    let rep = randkit::tail_bound_experiment(&dist, n, alpha, trials, &mut randkit::stream_rng(seed, "tailbound.trials")).map_err(lib("tailbound"))?;
    let mut r = Report::new("tailbound");
    r.set("seed", seed)
        .set("dim", dim)
        .set("n", n)
        .set("trials", trials)
        .real("alpha", alpha)
        .real("mu", rep.mu)
        .set("lower_tail", rep.lower_tail)
        .real("empirical", rep.empirical_prob)
        .real("bound", rep.aw_bound)
        .real("sigma", rep.sigma())
        .set("honored", rep.honored());
    Ok(r.into_value())
}

fn example(name: ExampleName) -> Value {
    match name {
        ExampleName::ShorCode => doc::code_value(&qec::shor_code()),
        ExampleName::ShorErrors => doc::errors_value(&qec::one_paulis(9), None),
        ExampleName::Bell => doc::pure_value(&states::max_entangled(2)),
        ExampleName::K5 => doc::graph_value(&Graph::complete(5)),
        ExampleName::C5 => doc::graph_value(&Graph::cycle(5)),
    }
}
