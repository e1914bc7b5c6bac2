//! Canonical scenarios: a ground-truth graph, a distribution payload, the
//! parameters used to build it, and an audit of which faithfulness-type
//! assumptions it satisfies. Audits are computed, never trusted from input.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::association::{is_one, is_strict_two, scan_one, Budget, StrictReading};
use crate::distribution::{format_rational, parse_rational, ratio, Cpt, Dataset, DiscreteJoint, DistributionError, Rational, Variable};
use crate::graph::{random_dag, Dag, GraphError};
use crate::nodeset::NodeSet;
use crate::oracle::{CiStatement, GaussianSystem, IndependenceOracle, Oracle, OracleError};
use crate::orientation::{candidate_sides, rule_holds, OrientationQuery};

/// Largest graph audited exhaustively; larger ones get a budgeted audit.
pub const AUDIT_MAX_NODES: usize = 6;
const PARTIAL_AUDIT_BUDGET: usize = 3;
const MAX_WITNESSES: usize = 8;

pub const BUILTIN_NAMES: &[&str] = &[
    "example1",
    "example2",
    "fig3",
    "fig4b",
    "transitivity",
    "chain",
    "fork",
    "collider",
    "cancelling3",
    "cancelling4",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("malformed scenario file: {0}")]
    Json(String),
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("unknown built-in scenario `{0}`")]
    UnknownBuiltin(String),
    #[error("distribution violates the Markov condition: {0}")]
    MarkovViolation(String),
}

fn field_err(field: impl Into<String>, e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Field { field: field.into(), message: e.to_string() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Discrete(Vec<Cpt>),
    Gaussian(GaussianSystem),
    Graph,
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Discrete(_) => "discrete",
            Payload::Gaussian(_) => "gaussian",
            Payload::Graph => "graph",
        }
    }
}

/// An assumption violation, or the query that could not be satisfied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditWitness {
    pub subject: String,
    pub statement: Option<CiStatement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct AssumptionCheck {
    pub holds: bool,
    /// Instances of the assumption's premise that were examined.
    pub checked: usize,
    pub witnesses: Vec<AuditWitness>,
}

impl AssumptionCheck {
    fn new() -> Self {
        AssumptionCheck { holds: true, checked: 0, witnesses: Vec::new() }
    }

    fn record(&mut self, ok: bool, subject: impl FnOnce() -> String, statement: Option<CiStatement>) {
        self.checked += 1;
        if !ok {
            self.holds = false;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(AuditWitness { subject: subject(), statement });
            }
        }
    }
}

/// Verified assumption status of a distribution against its graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Annotations {
    /// `false` when the graph was too large and checks were budgeted.
    pub exhaustive: bool,
    pub cmc: AssumptionCheck,
    pub af: AssumptionCheck,
    pub two_af: AssumptionCheck,
    pub of: AssumptionCheck,
    pub two_of_i: AssumptionCheck,
    pub two_of_ii: AssumptionCheck,
    /// Every true collider between candidate side sets keeps each cross pair
    /// dependent given any superset of the center and the other side members,
    /// shielded or not.
    pub collider_dependence: AssumptionCheck,
}

impl Annotations {
    /// 2-adjacency faithfulness, collider dependence and the Markov condition.
    pub fn supports_blanket_recovery(&self) -> bool {
        self.cmc.holds && self.two_af.holds && self.collider_dependence.holds
    }

    pub fn two_of(&self) -> bool {
        self.two_of_i.holds && self.two_of_ii.holds
    }
}

fn set_label(o: &(impl IndependenceOracle + ?Sized), s: NodeSet) -> String {
    let names: Vec<&str> = s.iter().map(|i| o.labels()[i].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

/// Checks the Markov condition, adjacency faithfulness, 2-adjacency
/// faithfulness, orientation faithfulness, both conditions of 2-orientation
/// faithfulness and collider dependence of `o` against `g`.
pub fn audit<O: IndependenceOracle + ?Sized>(o: &O, g: &Dag) -> Result<Annotations, OracleError> {
    let n = g.len();
    if o.num_vars() != n || o.labels() != g.labels() {
        return Err(OracleError::InvalidConfig("oracle and graph disagree on the variables".into()));
    }
    let exhaustive = n <= AUDIT_MAX_NODES;
    let budget = if exhaustive { Budget::UNBOUNDED } else { Budget::limit(PARTIAL_AUDIT_BUDGET) };
    let all = g.nodes();
    let l = g.labels();

    let mut cmc = AssumptionCheck::new();
    for x in 0..n {
        for y in x + 1..n {
            for s in budget.subsets(all.without(x).without(y)).0 {
                if g.d_separated_pair(x, y, s)? {
                    let indep = o.query(x, y, s)?;
                    cmc.record(indep, || format!("{}-{}", l[x], l[y]), Some(CiStatement::new(o, x, y, s, false)));
                }
            }
        }
    }

    let mut af = AssumptionCheck::new();
    let mut two_af = AssumptionCheck::new();
    for (p, c) in g.edges() {
        let scan = scan_one(o, p, c, budget)?;
        let sep = scan.separation.map(|s| CiStatement::new(o, s.x, s.y, s.given, true));
        af.record(sep.is_none(), || format!("{}->{}", l[p], l[c]), sep);
        for (a, b) in [(p, c), (c, p)] {
            let mut ok = is_one(o, a, b, budget)?;
            if !ok {
                for u in g.markov_blanket(a)?.without(b) {
                    if is_strict_two(o, a, b, u, budget, StrictReading::Neither)? {
                        ok = true;
                        break;
                    }
                }
            }
            two_af.record(ok, || format!("{}~{}", l[a], l[b]), None);
        }
    }

    let mut of = AssumptionCheck::new();
    for c in 0..n {
        let nbrs = g.parent_set(c).union(g.child_set(c)).to_vec();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if g.is_adjacent(a, b) {
                    continue;
                }
                let collider = g.has_edge(a, c) && g.has_edge(b, c);
                let pool = all.without(a).without(b);
                let sets = if collider { budget.supersets(NodeSet::singleton(c), pool).0 } else { budget.subsets(pool.without(c)).0 };
                let mut bad = None;
                for s in sets {
                    if o.query(a, b, s)? {
                        bad = Some(CiStatement::new(o, a, b, s, true));
                        break;
                    }
                }
                let (into, from) = if collider { ("->", "<-") } else { ("-", "-") };
                of.record(bad.is_none(), || format!("{}{into}{}{from}{}", l[a], l[c], l[b]), bad);
            }
        }
    }

    let mut two_of_i = AssumptionCheck::new();
    let mut two_of_ii = AssumptionCheck::new();
    let mut collider_dependence = AssumptionCheck::new();
    for y in 0..n {
        let sides = candidate_sides(o, y, budget)?;
        for (i, &left) in sides.iter().enumerate() {
            for &right in &sides[i + 1..] {
                if !left.is_disjoint(right) {
                    continue;
                }
                let q = OrientationQuery { center: y, left, right, budget };
                let subject = || format!("{} - {} - {}", set_label(o, left), l[y], set_label(o, right));
                let collider = left.union(right).is_subset(g.parent_set(y));
                let unshielded = left.iter().all(|x| right.iter().all(|z| !g.is_adjacent(x, z)));
                if collider {
                    let (ok, cx) = rule_holds(o, &q, true)?;
                    collider_dependence.record(ok, subject, cx.clone());
                    if unshielded {
                        two_of_i.record(ok, subject, cx);
                    }
                } else if unshielded {
                    let (ok, cx) = rule_holds(o, &q, false)?;
                    two_of_ii.record(ok, subject, cx);
                }
            }
        }
    }

    Ok(Annotations { exhaustive, cmc, af, two_af, of, two_of_i, two_of_ii, collider_dependence })
}

/// A ground-truth graph with a distribution and its verified annotations.
#[derive(Debug, Clone)]
pub struct Scenario {
    name: String,
    dag: Dag,
    payload: Payload,
    params: BTreeMap<String, String>,
    annotations: Annotations,
    oracle: Arc<Oracle>,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.dag == other.dag
            && self.payload == other.payload
            && self.params == other.params
            && self.annotations == other.annotations
    }
}

impl Scenario {
    /// Validates the payload against the graph, builds the exact oracle and
    /// audits it. Discrete payloads must satisfy the Markov condition.
    pub fn new(name: impl Into<String>, dag: Dag, payload: Payload, params: BTreeMap<String, String>) -> Result<Self, ScenarioError> {
        let oracle = match &payload {
            Payload::Discrete(cpts) => Oracle::discrete(DiscreteJoint::from_cpts(&dag, cpts)?),
            Payload::Gaussian(sys) => {
                if sys.labels() != dag.labels() || sys.dag().edges() != dag.edges() {
                    return Err(field_err("payload.coefficients", "nonzero coefficients must match the edge list"));
                }
                Oracle::gaussian(sys.clone())
            }
            Payload::Graph => Oracle::graph(dag.clone()),
        };
        let annotations = audit(&oracle, &dag)?;
        if !annotations.cmc.holds {
            let w = annotations.cmc.witnesses.first().and_then(|w| w.statement.as_ref()).map(|s| s.to_string()).unwrap_or_default();
            return Err(ScenarioError::MarkovViolation(w));
        }
        Ok(Scenario { name: name.into(), dag, payload, params, annotations, oracle: Arc::new(oracle) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn params(&self) -> &BTreeMap<String, String> {
        &self.params
    }

    pub fn annotations(&self) -> &Annotations {
        &self.annotations
    }

    /// The exact oracle for the payload (d-separation for graph-only payloads).
    pub fn oracle(&self) -> &Oracle {
        &self.oracle
    }

    pub fn joint(&self) -> Option<&DiscreteJoint> {
        self.oracle.joint()
    }

    /// Forward samples from a discrete payload.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset, ScenarioError> {
        let joint = self.joint().ok_or(OracleError::Unsupported(self.oracle.backend().name()))?;
        Ok(joint.sample(n, seed)?)
    }

    pub fn to_json(&self) -> String {
        let payload = match &self.payload {
            Payload::Discrete(cpts) => PayloadFile::Discrete {
                cpts: cpts
                    .iter()
                    .map(|c| CptFile {
                        child: c.child.clone(),
                        parents: c.parents.clone(),
                        rows: c.rows.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
                    })
                    .collect(),
            },
            Payload::Gaussian(sys) => PayloadFile::Gaussian {
                coefficients: sys.coefficients().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
                noise: sys.noise().iter().map(format_rational).collect(),
            },
            Payload::Graph => PayloadFile::Graph,
        };
        let file = ScenarioFile {
            name: self.name.clone(),
            nodes: self.dag.labels().to_vec(),
            edges: self.dag.edge_strings(),
            payload,
            params: self.params.clone(),
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Json(e.to_string()))?;
        let dag = Dag::parse(&file.nodes, &file.edges).map_err(|e| field_err("edges", e))?;
        let rationals = |field: &str, v: &[String]| -> Result<Vec<Rational>, ScenarioError> {
            v.iter()
                .enumerate()
                .map(|(j, s)| parse_rational(s).map_err(|e| field_err(format!("{field}[{j}]"), e)))
                .collect()
        };
        let payload = match file.payload {
            PayloadFile::Graph => Payload::Graph,
            PayloadFile::Discrete { cpts } => {
                let mut out = Vec::with_capacity(cpts.len());
                for (i, c) in cpts.into_iter().enumerate() {
                    let rows = c
                        .rows
                        .iter()
                        .enumerate()
                        .map(|(r, row)| rationals(&format!("payload.cpts[{i}].rows[{r}]"), row))
                        .collect::<Result<_, _>>()?;
                    out.push(Cpt::new(c.child, c.parents, rows));
                }
                Payload::Discrete(out)
            }
            PayloadFile::Gaussian { coefficients, noise } => {
                let b = coefficients
                    .iter()
                    .enumerate()
                    .map(|(r, row)| rationals(&format!("payload.coefficients[{r}]"), row))
                    .collect::<Result<_, _>>()?;
                let d = rationals("payload.noise", &noise)?;
                Payload::Gaussian(GaussianSystem::new(file.nodes.clone(), b, d).map_err(|e| field_err("payload", e))?)
            }
        };
        Scenario::new(file.name, dag, payload, file.params).map_err(|e| match e {
            ScenarioError::Distribution(d) => field_err("payload.cpts", d),
            other => other,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Scenario::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_json()).map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    nodes: Vec<String>,
    edges: Vec<String>,
    payload: PayloadFile,
    #[serde(default)]
    params: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum PayloadFile {
    Discrete { cpts: Vec<CptFile> },
    Gaussian { coefficients: Vec<Vec<String>>, noise: Vec<String> },
    Graph,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CptFile {
    child: String,
    #[serde(default)]
    parents: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn half() -> Rational {
    ratio(1, 2)
}

/// `P(child = 1 | parent) = 1 - flip` if the parent is 1, else `flip`.
fn noisy_copy(child: &str, parent: &str, flip: &Rational) -> Cpt {
    let flip = flip.clone();
    Cpt::binary_fn(child, &[parent], move |s| if s[0] == 1 { Rational::one() - &flip } else { flip.clone() })
}

/// `P(child = 1 | a, b) = 1 - noise` if `a ⊕ b = 1`, else `noise`.
fn noisy_xor(child: &str, a: &str, b: &str, noise: &Rational) -> Cpt {
    let noise = noise.clone();
    Cpt::binary_fn(child, &[a, b], move |s| if s[0] ^ s[1] == 1 { Rational::one() - &noise } else { noise.clone() })
}

fn check_open(name: &str, v: &Rational, lo: Rational, hi: Rational, lo_inclusive: bool) -> Result<(), ScenarioError> {
    let lo_ok = if lo_inclusive { *v >= lo } else { *v > lo };
    if !lo_ok || *v >= hi {
        let open = if lo_inclusive { "[" } else { "(" };
        return Err(ScenarioError::Parameter(format!(
            "{name} = {} outside {open}{}, {})",
            format_rational(v),
            format_rational(&lo),
            format_rational(&hi)
        )));
    }
    Ok(())
}

/// Noisy xor collider: `X, Z` fair coins, `Y = (X ⊕ Z) ⊕ E` with `P(E = 1) = p`.
pub fn noisy_xor_scenario(p: Rational) -> Result<Scenario, ScenarioError> {
    check_open("p", &p, Rational::zero(), half(), true)?;
    let dag = Dag::parse(&["X", "Z", "Y"], &["X->Y", "Z->Y"])?;
    let cpts = vec![Cpt::coin("X", half()), Cpt::coin("Z", half()), noisy_xor("Y", "X", "Z", &p)];
    Scenario::new("example1", dag, Payload::Discrete(cpts), params(&[("p", format_rational(&p))]))
}

/// Xor gated by a context coin: `Y = ((X ⊕ Z) ∧ W) ⊕ E` with
/// `P(W = 1) = p` and `P(E = 1) = q`.
pub fn xor_with_context(p: Rational, q: Rational) -> Result<Scenario, ScenarioError> {
    check_open("p", &p, Rational::zero(), Rational::one(), false)?;
    check_open("q", &q, Rational::zero(), half(), false)?;
    let dag = Dag::parse(&["X", "Z", "W", "Y"], &["X->Y", "Z->Y", "W->Y"])?;
    let qq = q.clone();
    let y = Cpt::binary_fn("Y", &["X", "Z", "W"], move |s| {
        if (s[0] ^ s[1]) & s[2] == 1 {
            Rational::one() - &qq
        } else {
            qq.clone()
        }
    });
    let cpts = vec![Cpt::coin("X", half()), Cpt::coin("Z", half()), Cpt::coin("W", p.clone()), y];
    Scenario::new("example2", dag, Payload::Discrete(cpts), params(&[("p", format_rational(&p)), ("q", format_rational(&q))]))
}

fn nonzero(name: &str, v: &Rational) -> Result<(), ScenarioError> {
    if v.is_zero() {
        return Err(ScenarioError::Parameter(format!("{name} must be nonzero")));
    }
    Ok(())
}

/// `Z = αX`, `Y = βZ − αβX` with unit noise: the two paths from `X` to `Y` cancel.
pub fn cancelling_paths_3(alpha: Rational, beta: Rational) -> Result<Scenario, ScenarioError> {
    nonzero("alpha", &alpha)?;
    nonzero("beta", &beta)?;
    let gamma = &alpha * &beta;
    let sys = GaussianSystem::from_edges(
        &["X", "Z", "Y"],
        &[("X", "Z", alpha.clone()), ("Z", "Y", beta.clone()), ("X", "Y", -gamma.clone())],
        vec![Rational::one(); 3],
    )?;
    let dag = sys.dag().clone();
    let p = params(&[
        ("alpha", format_rational(&alpha)),
        ("beta", format_rational(&beta)),
        ("gamma", format_rational(&gamma)),
        ("note", "undetectable: the implied independencies also fit a graph without the X->Y edge".into()),
    ]);
    Scenario::new("cancelling3", dag, Payload::Gaussian(sys), p)
}

/// `X → Z → W → Y` with weights `a, b, c` plus `X → Y` with weight `−abc`.
pub fn cancelling_paths_4(a: Rational, b: Rational, c: Rational) -> Result<Scenario, ScenarioError> {
    for (n, v) in [("a", &a), ("b", &b), ("c", &c)] {
        nonzero(n, v)?;
    }
    let direct = -(&a * &b * &c);
    let sys = GaussianSystem::from_edges(
        &["X", "Z", "W", "Y"],
        &[("X", "Z", a.clone()), ("Z", "W", b.clone()), ("W", "Y", c.clone()), ("X", "Y", direct.clone())],
        vec![Rational::one(); 4],
    )?;
    let dag = sys.dag().clone();
    let p = params(&[
        ("a", format_rational(&a)),
        ("b", format_rational(&b)),
        ("c", format_rational(&c)),
        ("direct", format_rational(&direct)),
        ("note", "detectable: X is strictly 2-associated to {W,Y}".into()),
    ]);
    Scenario::new("cancelling4", dag, Payload::Gaussian(sys), p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    Chain,
    Fork,
    Collider,
}

/// Faithful three-node controls. Roots are coins with `P(1) = s`, copies flip
/// with probability `s`, and the collider is a noisy-or
/// `P(Y = 1 | x, z) = 1 − s(1 − s)^(x+z)`.
pub fn baseline(kind: BaselineKind, s: Rational) -> Result<Scenario, ScenarioError> {
    check_open("strength", &s, Rational::zero(), Rational::one(), false)?;
    if s == half() {
        return Err(ScenarioError::Parameter("strength 1/2 makes copies independent of their parents".into()));
    }
    let (name, dag, cpts) = match kind {
        BaselineKind::Chain => (
            "chain",
            Dag::parse(&["X", "Y", "Z"], &["X->Y", "Y->Z"])?,
            vec![Cpt::coin("X", s.clone()), noisy_copy("Y", "X", &s), noisy_copy("Z", "Y", &s)],
        ),
        BaselineKind::Fork => (
            "fork",
            Dag::parse(&["X", "Y", "Z"], &["Y->X", "Y->Z"])?,
            vec![Cpt::coin("Y", s.clone()), noisy_copy("X", "Y", &s), noisy_copy("Z", "Y", &s)],
        ),
        BaselineKind::Collider => {
            let ss = s.clone();
            let y = Cpt::binary_fn("Y", &["X", "Z"], move |st| {
                let keep = Rational::one() - &ss;
                let mut off = ss.clone();
                for _ in 0..st[0] + st[1] {
                    off *= &keep;
                }
                Rational::one() - off
            });
            ("collider", Dag::parse(&["X", "Y", "Z"], &["X->Y", "Z->Y"])?, vec![Cpt::coin("X", s.clone()), Cpt::coin("Z", s.clone()), y])
        }
    };
    Scenario::new(name, dag, Payload::Discrete(cpts), params(&[("strength", format_rational(&s))]))
}

/// `X → U → W ← Z`, `W → Y`: fair roots, noisy copies flipping with
/// probability 1/4 on `X → U` and `W → Y`, and a noisy xor (noise 1/4) at `W`.
pub fn xor_chain_fig3() -> Result<Scenario, ScenarioError> {
    let flip = ratio(1, 4);
    let dag = Dag::parse(&["X", "U", "Z", "W", "Y"], &["X->U", "U->W", "Z->W", "W->Y"])?;
    let cpts = vec![
        Cpt::coin("X", half()),
        noisy_copy("U", "X", &flip),
        Cpt::coin("Z", half()),
        noisy_xor("W", "U", "Z", &flip),
        noisy_copy("Y", "W", &flip),
    ];
    let p = params(&[
        ("copy_flip", format_rational(&flip)),
        ("xor_noise", format_rational(&flip)),
        ("note", "mechanisms chosen by the implementer; verified: only {U,W,Z} is a minimal unfaithful triple".into()),
    ]);
    Scenario::new("fig3", dag, Payload::Discrete(cpts), p)
}

/// `W → Y → X ← Z`: `W, Z` fair, `Y` a noisy copy of `W` (flip 1/4), `X` a
/// noisy xor of `Y` and `Z` (noise 1/4). `Y` is a non-collider between `X` and `W`.
pub fn fig4b() -> Result<Scenario, ScenarioError> {
    let flip = ratio(1, 4);
    let dag = Dag::parse(&["X", "Z", "W", "Y"], &["W->Y", "Y->X", "Z->X"])?;
    let cpts = vec![Cpt::coin("W", half()), noisy_copy("Y", "W", &flip), Cpt::coin("Z", half()), noisy_xor("X", "Y", "Z", &flip)];
    let p = params(&[
        ("copy_flip", format_rational(&flip)),
        ("xor_noise", format_rational(&flip)),
        ("note", "noise levels chosen by the implementer".into()),
    ]);
    Scenario::new("fig4b", dag, Payload::Discrete(cpts), p)
}

/// Failure of transitivity on `X → Y → Z`: `Y = 2X' + U` with `X'` a noisy
/// copy of `X` (flip 1/4) and `U` a fair coin, and `Z` a noisy copy of `U`
/// (flip 1/4). `X ⊥ Z` and `X ⊥ Z | Y`, so neither orientation rule fires.
pub fn transitivity_failure() -> Result<Scenario, ScenarioError> {
    let dag = Dag::parse(&["X", "Y", "Z"], &["X->Y", "Y->Z"])?;
    let (hi, lo) = (ratio(3, 8), ratio(1, 8));
    let y_rows = vec![vec![hi.clone(), hi.clone(), lo.clone(), lo.clone()], vec![lo.clone(), lo, hi.clone(), hi]];
    let z_rows = (0..4)
        .map(|y| if y % 2 == 1 { vec![ratio(1, 4), ratio(3, 4)] } else { vec![ratio(3, 4), ratio(1, 4)] })
        .collect();
    let cpts = vec![
        Cpt::coin("X", half()),
        Cpt::new("Y", vec!["X".into()], y_rows),
        Cpt::new("Z", vec!["Y".into()], z_rows),
    ];
    let p = params(&[("note", "Y has four states (copy of X, independent coin); Z reads only the coin".into())]);
    Scenario::new("transitivity", dag, Payload::Discrete(cpts), p)
}

/// Random binary network: edges with probability `edge_prob` along a random
/// order, CPT entries drawn from `{1/8, …, 7/8}`.
pub fn random_discrete(n: usize, edge_prob: f64, seed: u64) -> Result<Scenario, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dag = random_dag(n, edge_prob, &mut rng);
    let cpts = (0..n)
        .map(|i| {
            let parents: Vec<&str> = dag.parent_set(i).iter().map(|p| dag.label(p)).collect();
            let draws: Vec<i64> = (0..1usize << parents.len()).map(|_| rng.gen_range(1..8)).collect();
            Cpt::binary_fn(dag.label(i), &parents, |s| {
                let row = s.iter().fold(0, |acc, &b| acc * 2 + b);
                ratio(draws[row], 8)
            })
        })
        .collect();
    Scenario::new(format!("random-{seed}"), dag, Payload::Discrete(cpts), params(&[("seed", seed.to_string())]))
}

/// Looks up a built-in scenario by name, with its default parameters.
pub fn builtin(name: &str) -> Result<Scenario, ScenarioError> {
    match name {
        "example1" => noisy_xor_scenario(ratio(1, 4)),
        "example2" => xor_with_context(ratio(1, 2), ratio(1, 4)),
        "fig3" => xor_chain_fig3(),
        "fig4b" => fig4b(),
        "transitivity" => transitivity_failure(),
        "chain" => baseline(BaselineKind::Chain, ratio(1, 4)),
        "fork" => baseline(BaselineKind::Fork, ratio(1, 4)),
        "collider" => baseline(BaselineKind::Collider, ratio(1, 4)),
        "cancelling3" => cancelling_paths_3(Rational::one(), Rational::one()),
        "cancelling4" => cancelling_paths_4(Rational::one(), Rational::one(), Rational::one()),
        other => Err(ScenarioError::UnknownBuiltin(other.to_string())),
    }
}

/// Every built-in scenario, in registry order.
pub fn all_builtins() -> Result<Vec<Scenario>, ScenarioError> {
    BUILTIN_NAMES.iter().map(|n| builtin(n)).collect()
}

/// Continuous draws of `X, Z ~ N(0, 1)` and `Y = sign(XZ)·E`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSample {
    pub labels: [String; 3],
    pub rows: Vec<[f64; 3]>,
}

impl ContinuousSample {
    /// Binary dataset of signs (1 for positive).
    pub fn sign_buckets(&self) -> Dataset {
        Dataset {
            variables: self.labels.iter().map(|l| Variable::new(l.clone(), 2)).collect(),
            rows: self.rows.iter().map(|r| r.iter().map(|&v| usize::from(v > 0.0)).collect()).collect(),
        }
    }

    pub fn correlation(&self, a: usize, b: usize) -> f64 {
        let n = self.rows.len() as f64;
        let mean = |i: usize| self.rows.iter().map(|r| r[i]).sum::<f64>() / n;
        let (ma, mb) = (mean(a), mean(b));
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for r in &self.rows {
            let (da, db) = (r[a] - ma, r[b] - mb);
            sab += da * db;
            saa += da * da;
            sbb += db * db;
        }
        sab / (saa * sbb).sqrt()
    }
}

/// Sign-product collider: `X, Z` standard normal, `Y = sign(XZ)·E` with `E`
/// exponential of rate `1/√2`. Columns are `X, Z, Y`.
pub fn sign_product_sampler(n: usize, seed: u64) -> Result<ContinuousSample, ScenarioError> {
    if n == 0 {
        return Err(ScenarioError::Parameter("sample size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exp = Exp::new(std::f64::consts::FRAC_1_SQRT_2).expect("positive rate");
    let rows = (0..n)
        .map(|_| {
            let x: f64 = StandardNormal.sample(&mut rng);
            let z: f64 = StandardNormal.sample(&mut rng);
            let e = exp.sample(&mut rng);
            let sign = if (x * z).is_sign_negative() { -1.0 } else { 1.0 };
            [x, z, sign * e]
        })
        .collect();
    Ok(ContinuousSample { labels: ["X".into(), "Z".into(), "Y".into()], rows })
}

/// Parses a `"n/d"` parameter, naming it in the error.
pub fn parse_param(name: &str, s: &str) -> Result<Rational, ScenarioError> {
    parse_rational(s).map_err(|e| field_err(name, e))
}
