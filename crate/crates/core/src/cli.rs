//! Batch front-end. Reports go to stdout (or `--out`) as JSON with a stable
//! key order; a one-line summary goes to stderr.
//!
//! Exit codes: 0 success, 1 analysis precondition failure, 2 malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::association::{associations_of, find_unfaithful_triples, Budget};
use crate::growshrink::{markov_blanket, GsConfig, Mode};
use crate::nodeset::NodeSet;
use crate::oracle::{CiStatement, GTestConfig, IndependenceOracle, Oracle, OracleError};
use crate::orientation::{orient, orient_all, OrientationError, OrientationQuery};
use crate::scenarios::{builtin, Scenario, ScenarioError};
use crate::sparsest_permutation::{all_permutation_dags, probe_collider_conjecture};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "faithcheck", version, about = "Faithfulness-violation analyses over exact or sampled independence oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file, or `builtin:<name>`.
    #[arg(long)]
    scenario: String,
    /// Largest conditioning set to try.
    #[arg(long)]
    budget: Option<usize>,
    /// Run against a G-test on this many forward samples instead of the exact oracle.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Modified,
    Classic,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// 1- and strict 2-associations, plus unfaithful triples for discrete payloads.
    Assoc {
        #[command(flatten)]
        common: Common,
        /// Restrict to one target; all variables otherwise.
        #[arg(long)]
        target: Option<String>,
    },
    /// Apply the orientation rule to one query, or to every candidate query when no center is given.
    Orient {
        #[command(flatten)]
        common: Common,
        #[arg(long, requires_all = ["left", "right"])]
        center: Option<String>,
        #[arg(long, value_delimiter = ',')]
        left: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        right: Vec<String>,
    },
    /// Markov blanket by Grow-Shrink.
    Mb {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Modified)]
        mode: ModeArg,
        /// Write the query trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sparsest permutation minimizers.
    Sp {
        #[command(flatten)]
        common: Common,
    },
    /// Verified assumption annotations.
    Audit {
        #[command(flatten)]
        common: Common,
    },
    /// Draw samples and compare G-test answers with the exact oracle.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Also write the samples as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Assoc { common, .. }
            | Command::Orient { common, .. }
            | Command::Mb { common, .. }
            | Command::Sp { common }
            | Command::Audit { common }
            | Command::Sample { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Assoc { .. } => "assoc",
            Command::Orient { .. } => "orient",
            Command::Mb { .. } => "mb",
            Command::Sp { .. } => "sp",
            Command::Audit { .. } => "audit",
            Command::Sample { .. } => "sample",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Precondition(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Precondition(_) => EXIT_PRECONDITION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Precondition(m) => m,
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::UnknownVariable(_) | OracleError::Overlap | OracleError::InvalidConfig(_) => Failure::Input(e.to_string()),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

impl From<OrientationError> for Failure {
    fn from(e: OrientationError) -> Self {
        match e {
            OrientationError::Oracle(o) => o.into(),
            OrientationError::InvalidQuery(m) => Failure::Input(format!("invalid orientation query: {m}")),
            other => Failure::Precondition(other.to_string()),
        }
    }
}

#[derive(Serialize)]
struct ScenarioMeta<'a> {
    name: &'a str,
    payload: &'a str,
    nodes: &'a [String],
    edges: Vec<String>,
    params: &'a std::collections::BTreeMap<String, String>,
}

#[derive(Serialize)]
struct SampleMeta {
    n: usize,
    seed: u64,
    alpha: f64,
}

/// Field order is the serialized key order.
#[derive(Serialize)]
struct RunReport<'a> {
    command: &'a str,
    scenario: ScenarioMeta<'a>,
    backend: &'a str,
    sample: Option<SampleMeta>,
    result: Value,
    oracle_queries: u64,
    /// Excluded from golden comparisons.
    wall_time_ms: u128,
}

fn load_scenario(spec: &str) -> Result<Scenario, ScenarioError> {
    match spec.strip_prefix("builtin:") {
        Some(name) => builtin(name),
        None => Scenario::load(Path::new(spec)),
    }
}

const DEFAULT_SAMPLES: usize = 1000;

/// Sample size for the G-test backend, if one is requested.
fn sample_size(cmd: &Command) -> Option<usize> {
    let c = cmd.common();
    match cmd {
        Command::Sample { .. } => Some(c.samples.unwrap_or(DEFAULT_SAMPLES)),
        _ => c.samples,
    }
}

fn build_oracle(s: &Scenario, c: &Common, n: Option<usize>) -> Result<Option<Oracle>, Failure> {
    let Some(n) = n else { return Ok(None) };
    let cfg = GTestConfig::with_alpha(c.alpha)?;
    if n == 0 {
        return Err(Failure::Input("--samples must be at least 1".into()));
    }
    let data = s.sample(n, c.seed).map_err(|e| Failure::Precondition(e.to_string()))?;
    Ok(Some(Oracle::sample(data, cfg)?))
}

fn budget_of(c: &Common) -> Budget {
    c.budget.map_or(Budget::UNBOUNDED, Budget::limit)
}

fn labels_of(o: &Oracle, s: NodeSet) -> Vec<String> {
    s.iter().map(|i| o.labels()[i].clone()).collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("serializes") + "\n";
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write `{}`: {e}", path.display())))
}

fn analyse(cmd: &Command, s: &Scenario, o: &Oracle) -> Result<(Value, String), Failure> {
    let c = cmd.common();
    let budget = budget_of(c);
    match cmd {
        Command::Assoc { target, .. } => {
            let targets = match target {
                Some(t) => vec![o.index_of(t)?],
                None => (0..o.num_vars()).collect(),
            };
            let mut reports = Vec::new();
            for &t in &targets {
                reports.extend(associations_of(o, t, budget)?);
            }
            let triples = match find_unfaithful_triples(o, budget) {
                Ok(t) => Some(t),
                Err(OracleError::Unsupported(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let summary = format!(
                "{} association(s){}",
                reports.len(),
                triples.as_ref().map_or(String::new(), |t| format!(", {} unfaithful triple(s)", t.len()))
            );
            Ok((json!({ "associations": to_value(&reports), "unfaithful_triples": to_value(&triples) }), summary))
        }
        Command::Orient { center: Some(center), left, right, .. } => {
            let l: Vec<&str> = left.iter().map(String::as_str).collect();
            let r: Vec<&str> = right.iter().map(String::as_str).collect();
            let mut q = OrientationQuery::from_labels(o, center, &l, &r)?;
            q.budget = budget;
            let v = orient(o, &q)?;
            let summary = format!("{:?} at {}{}", v.outcome, v.center, if v.shielding_caveat { " (shielding caveat)" } else { "" });
            Ok((to_value(&v), summary))
        }
        Command::Orient { .. } => {
            let d = orient_all(o, budget)?;
            let summary = format!("{} verdict(s), oriented {:?}", d.verdicts.len(), d.oriented_edges);
            Ok((to_value(&d), summary))
        }
        Command::Mb { target, mode, trace, .. } => {
            let t = o.index_of(target)?;
            let mode = match mode {
                ModeArg::Modified => Mode::Modified,
                ModeArg::Classic => Mode::Classic,
            };
            let cfg = GsConfig { mode, budget, ..Default::default() };
            let (mb, tr) = markov_blanket(o, t, o.variables(), &cfg)?;
            if let Some(path) = trace {
                write_json(path, &tr)?;
            }
            let truth = s.dag().markov_blanket(t).map_err(|e| Failure::Input(e.to_string()))?;
            let found = labels_of(o, mb);
            let summary = format!("MB({target}) = {{{}}}", found.join(", "));
            Ok((
                json!({
                    "target": target,
                    "mode": to_value(&mode),
                    "markov_blanket": found,
                    "graph_markov_blanket": labels_of(o, truth),
                    "matches_graph": mb == truth,
                    "trace_entries": tr.entries.len(),
                    "truncated": tr.truncated,
                }),
                summary,
            ))
        }
        Command::Sp { .. } => {
            let all = all_permutation_dags(o).map_err(|e| Failure::Precondition(e.to_string()))?;
            let min = all.iter().map(|d| d.edge_count).min().unwrap_or(0);
            let minimizers: Vec<_> = all.iter().filter(|d| d.edge_count == min).collect();
            let probe = probe_collider_conjecture(o, s.dag())?;
            let summary = format!("{} minimizer(s) with {min} edge(s) out of {} permutations", minimizers.len(), all.len());
            Ok((
                json!({
                    "permutations": all.len(),
                    "min_edges": min,
                    "minimizers": to_value(&minimizers),
                    "pattern_probe": to_value(&probe),
                }),
                summary,
            ))
        }
        Command::Audit { .. } => {
            let a = s.annotations();
            let mark = |b: bool| if b { "ok" } else { "FAIL" };
            let summary = format!(
                "CMC {} AF {} 2-AF {} OF {} 2-OF(i) {} 2-OF(ii) {} CD {}{}",
                mark(a.cmc.holds),
                mark(a.af.holds),
                mark(a.two_af.holds),
                mark(a.of.holds),
                mark(a.two_of_i.holds),
                mark(a.two_of_ii.holds),
                mark(a.collider_dependence.holds),
                if a.exhaustive { "" } else { " (partial)" }
            );
            Ok((to_value(a), summary))
        }
        Command::Sample { csv, .. } => {
            let exact = s.oracle();
            let data = s.sample(c.samples.unwrap_or(DEFAULT_SAMPLES), c.seed).map_err(|e| Failure::Precondition(e.to_string()))?;
            if let Some(path) = csv {
                std::fs::write(path, data.to_csv()).map_err(|e| Failure::Input(format!("cannot write `{}`: {e}", path.display())))?;
            }
            let n = exact.num_vars();
            let (mut total, mut agree, mut disagreements) = (0usize, 0usize, Vec::new());
            for x in 0..n {
                for y in x + 1..n {
                    for z in budget.subsets(exact.variables().without(x).without(y)).0 {
                        let truth = exact.query(x, y, z)?;
                        let test = o.query(x, y, z)?;
                        total += 1;
                        if truth == test {
                            agree += 1;
                        } else if disagreements.len() < 20 {
                            disagreements.push(CiStatement::new(o, x, y, z, test));
                        }
                    }
                }
            }
            let summary = format!("G-test agrees with the exact oracle on {agree}/{total} queries");
            Ok((json!({ "queries": total, "agree": agree, "disagreements": to_value(&disagreements) }), summary))
        }
    }
}

fn execute(cmd: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let started = Instant::now();
    let c = cmd.common();
    if !(c.alpha > 0.0 && c.alpha < 1.0) {
        return Err(Failure::Input(format!("--alpha {} outside (0, 1)", c.alpha)));
    }
    let s = load_scenario(&c.scenario)?;
    let n_samples = sample_size(cmd);
    let sample_oracle = build_oracle(&s, c, n_samples)?;
    let o = sample_oracle.as_ref().unwrap_or_else(|| s.oracle());
    o.reset_query_count();
    let (result, summary) = analyse(cmd, &s, o)?;
    let report = RunReport {
        command: cmd.name(),
        scenario: ScenarioMeta {
            name: s.name(),
            payload: s.payload().kind(),
            nodes: s.dag().labels(),
            edges: s.dag().edge_strings(),
            params: s.params(),
        },
        backend: o.backend().name(),
        sample: n_samples.map(|n| SampleMeta { n, seed: c.seed, alpha: c.alpha }),
        result,
        oracle_queries: o.query_count(),
        wall_time_ms: started.elapsed().as_millis(),
    };
    match &c.out {
        Some(path) => write_json(path, &report)?,
        None => {
            let text = serde_json::to_string_pretty(&report).expect("serializes");
            writeln!(stdout, "{text}").map_err(|e| Failure::Input(e.to_string()))?;
        }
    }
    let _ = writeln!(stderr, "{} [{}]: {summary}", cmd.name(), s.name());
    Ok(())
}

/// Parses `args` (including the program name) and runs one analysis.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{}", e.render()) } else { write!(stdout, "{}", e.render()) };
            return code;
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}
