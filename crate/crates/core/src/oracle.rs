//! Conditional-independence oracles.
//!
//! [`IndependenceOracle`] is the one capability every algorithm in this crate
//! consumes. [`Oracle`] implements it over four backends:
//!
//! * graph truth: d-separation in a [`Dag`];
//! * exact discrete: factorization checks on a [`DiscreteJoint`];
//! * exact linear-Gaussian: vanishing partial correlation in a rational
//!   covariance matrix;
//! * sample-based: the G-test on a [`Dataset`].
//!
//! Answers are memoized per `(xs, ys, zs)` triple and every call increments a
//! query counter, cached or not.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::distribution::{format_rational, Dataset, DiscreteJoint, DistributionError, Rational};
use crate::graph::{Dag, GraphError};
use crate::nodeset::NodeSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("query variables must be distinct and disjoint from the conditioning set")]
    Overlap,
    #[error("covariance submatrix over {0:?} is singular")]
    Singular(Vec<usize>),
    #[error("invalid linear system: {0}")]
    InvalidSystem(String),
    #[error("invalid G-test configuration: {0}")]
    InvalidConfig(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("operation not supported by the {0} backend")]
    Unsupported(&'static str),
}

/// Answers "is `xs` independent of `ys` given `zs`?" over a fixed variable set.
pub trait IndependenceOracle {
    /// Variable labels, indexed by variable id.
    fn labels(&self) -> &[String];

    /// `true` means independent.
    fn query_sets(&self, xs: NodeSet, ys: NodeSet, zs: NodeSet) -> Result<bool, OracleError>;

    fn num_vars(&self) -> usize {
        self.labels().len()
    }

    fn variables(&self) -> NodeSet {
        NodeSet::full(self.num_vars())
    }

    fn index_of(&self, label: &str) -> Result<usize, OracleError> {
        self.labels()
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| OracleError::UnknownVariable(label.to_string()))
    }

    /// Single-variable query `x ⊥ y | s`.
    fn query(&self, x: usize, y: usize, s: NodeSet) -> Result<bool, OracleError> {
        if x == y || s.contains(x) || s.contains(y) {
            return Err(OracleError::Overlap);
        }
        self.query_sets(NodeSet::singleton(x), NodeSet::singleton(y), s)
    }
}

/// A conditional-independence statement `x ⊥ y | given` (or its negation),
/// rendered with variable labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CiStatement {
    pub x: String,
    pub y: String,
    pub given: Vec<String>,
    pub independent: bool,
}

impl CiStatement {
    pub fn new<O: IndependenceOracle + ?Sized>(o: &O, x: usize, y: usize, given: NodeSet, independent: bool) -> Self {
        let l = o.labels();
        CiStatement {
            x: l[x].clone(),
            y: l[y].clone(),
            given: given.iter().map(|i| l[i].clone()).collect(),
            independent,
        }
    }
}

impl std::fmt::Display for CiStatement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rel = if self.independent { "_||_" } else { "not _||_" };
        write!(f, "{} {rel} {} | {{{}}}", self.x, self.y, self.given.join(","))
    }
}

/// Square matrix of exact rationals, row-major.
pub type Matrix = Vec<Vec<Rational>>;

/// Linear structural equations `X = B X + E` with independent noise of the
/// given variances. `coefficients[i][j]` is the weight of parent `j` on child `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianSystem {
    labels: Vec<String>,
    coefficients: Matrix,
    noise: Vec<Rational>,
    dag: Dag,
}

impl GaussianSystem {
    pub fn new(labels: Vec<String>, coefficients: Matrix, noise: Vec<Rational>) -> Result<Self, OracleError> {
        let n = labels.len();
        if coefficients.len() != n || coefficients.iter().any(|r| r.len() != n) {
            return Err(OracleError::InvalidSystem(format!("coefficient matrix must be {n}x{n}")));
        }
        if noise.len() != n {
            return Err(OracleError::InvalidSystem(format!("expected {n} noise variances")));
        }
        if let Some((i, v)) = noise.iter().enumerate().find(|(_, v)| !v.is_positive()) {
            return Err(OracleError::InvalidSystem(format!(
                "noise variance of `{}` is {}, must be positive",
                labels[i],
                format_rational(v)
            )));
        }
        let mut edges = Vec::new();
        for (child, row) in coefficients.iter().enumerate() {
            for (parent, w) in row.iter().enumerate() {
                if !w.is_zero() {
                    edges.push((parent, child));
                }
            }
        }
        let dag = Dag::new(labels.clone(), &edges)?;
        Ok(GaussianSystem { labels, coefficients, noise, dag })
    }

    /// Builds the system from `(parent, child, weight)` triples over `labels`.
    pub fn from_edges(labels: &[&str], edges: &[(&str, &str, Rational)], noise: Vec<Rational>) -> Result<Self, OracleError> {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let n = labels.len();
        let find = |l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| OracleError::UnknownVariable(l.to_string()))
        };
        let mut b = vec![vec![Rational::zero(); n]; n];
        for (p, c, w) in edges {
            b[find(c)?][find(p)?] = w.clone();
        }
        GaussianSystem::new(labels, b, noise)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coefficients(&self) -> &Matrix {
        &self.coefficients
    }

    pub fn noise(&self) -> &[Rational] {
        &self.noise
    }

    /// The graph of nonzero coefficients.
    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// Same system with every noise variance multiplied by `factor`.
    pub fn scale_noise(&self, factor: &Rational) -> Result<Self, OracleError> {
        let noise = self.noise.iter().map(|v| v * factor).collect();
        GaussianSystem::new(self.labels.clone(), self.coefficients.clone(), noise)
    }
}

/// Exact covariance `(I-B)^{-1} D (I-B)^{-T}`.
pub fn covariance_of(sys: &GaussianSystem) -> Matrix {
    let n = sys.labels.len();
    let order = sys.dag.topological_order().expect("validated acyclic");
    // Row i of (I-B)^{-1}: total effect of each noise term on variable i.
    let mut total = vec![vec![Rational::zero(); n]; n];
    for &i in &order {
        let mut row = vec![Rational::zero(); n];
        row[i] = Rational::one();
        for j in sys.dag.parent_set(i) {
            let w = &sys.coefficients[i][j];
            for k in 0..n {
                if !total[j][k].is_zero() {
                    row[k] += w * &total[j][k];
                }
            }
        }
        total[i] = row;
    }
    let mut cov = vec![vec![Rational::zero(); n]; n];
    for a in 0..n {
        for b in a..n {
            let mut s = Rational::zero();
            for k in 0..n {
                if !total[a][k].is_zero() && !total[b][k].is_zero() {
                    s += &total[a][k] * &sys.noise[k] * &total[b][k];
                }
            }
            cov[b][a] = s.clone();
            cov[a][b] = s;
        }
    }
    cov
}

/// Exact inverse by Gauss-Jordan elimination; `None` when singular.
pub fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m.clone();
    let mut inv: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let da = &f * &a[col][j];
                a[r][j] -= da;
                let di = &f * &inv[col][j];
                inv[r][j] -= di;
            }
        }
    }
    Some(inv)
}

/// Whether the partial correlation of `x` and `y` given `s` is exactly zero,
/// i.e. the `(x, y)` entry of the inverse covariance over `{x, y} ∪ s` vanishes.
pub fn partial_correlation_zero(cov: &Matrix, x: usize, y: usize, s: NodeSet) -> Result<bool, OracleError> {
    let n = cov.len();
    if x >= n || y >= n || !s.is_subset(NodeSet::full(n)) {
        return Err(OracleError::UnknownVariable(format!("index out of range for {n} variables")));
    }
    if x == y || s.contains(x) || s.contains(y) {
        return Err(OracleError::Overlap);
    }
    let idx: Vec<usize> = [x, y].into_iter().chain(s.iter()).collect();
    let sub: Matrix = idx.iter().map(|&i| idx.iter().map(|&j| cov[i][j].clone()).collect()).collect();
    let inv = invert(&sub).ok_or(OracleError::Singular(idx))?;
    Ok(inv[0][1].is_zero())
}

/// How strata and sparse tables contribute degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinCountPolicy {
    /// Every conditioning assignment contributes `(|X|-1)(|Y|-1)` degrees of
    /// freedom, observed or not.
    #[default]
    CountAllStrata,
    /// Unobserved strata contribute nothing, and each observed stratum
    /// contributes `(r-1)(c-1)` over its non-empty rows and columns.
    DropEmpty,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GTestConfig {
    pub alpha: f64,
    pub min_count: MinCountPolicy,
}

impl Default for GTestConfig {
    fn default() -> Self {
        GTestConfig { alpha: 0.01, min_count: MinCountPolicy::CountAllStrata }
    }
}

impl GTestConfig {
    pub fn with_alpha(alpha: f64) -> Result<Self, OracleError> {
        let cfg = GTestConfig { alpha, ..Default::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), OracleError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(OracleError::InvalidConfig(format!("alpha = {} outside (0, 1)", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GTestOutcome {
    pub statistic: f64,
    pub df: usize,
    pub independent: bool,
}

/// G-test of `xs ⊥ ys | zs`; each variable group is treated as one joint
/// categorical variable.
pub fn g_test(data: &Dataset, xs: NodeSet, ys: NodeSet, zs: NodeSet, cfg: &GTestConfig) -> Result<GTestOutcome, OracleError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(OracleError::EmptyDataset);
    }
    let nv = data.variables.len();
    if !xs.union(ys).union(zs).is_subset(NodeSet::full(nv)) {
        return Err(OracleError::UnknownVariable(format!("index out of range for {nv} variables")));
    }
    if xs.is_empty() || ys.is_empty() || !xs.is_disjoint(ys) || !xs.is_disjoint(zs) || !ys.is_disjoint(zs) {
        return Err(OracleError::Overlap);
    }
    let card = |s: NodeSet| -> usize { s.iter().map(|i| data.variables[i].cardinality).product() };
    let code = |row: &[usize], s: NodeSet| -> usize {
        s.iter().fold(0, |acc, i| acc * data.variables[i].cardinality + row[i])
    };
    let (kx, ky, kz) = (card(xs), card(ys), card(zs));
    let mut counts = vec![0u64; kx * ky * kz];
    for row in &data.rows {
        let (a, b, c) = (code(row, xs), code(row, ys), code(row, zs));
        counts[(c * kx + a) * ky + b] += 1;
    }
    let mut statistic = 0.0;
    let mut df = 0usize;
    for c in 0..kz {
        let stratum = &counts[c * kx * ky..(c + 1) * kx * ky];
        let n_z: u64 = stratum.iter().sum();
        let row_tot: Vec<u64> = (0..kx).map(|a| (0..ky).map(|b| stratum[a * ky + b]).sum()).collect();
        let col_tot: Vec<u64> = (0..ky).map(|b| (0..kx).map(|a| stratum[a * ky + b]).sum()).collect();
        match cfg.min_count {
            MinCountPolicy::CountAllStrata => df += (kx - 1) * (ky - 1),
            MinCountPolicy::DropEmpty => {
                if n_z > 0 {
                    let r = row_tot.iter().filter(|&&t| t > 0).count();
                    let k = col_tot.iter().filter(|&&t| t > 0).count();
                    df += r.saturating_sub(1) * k.saturating_sub(1);
                }
            }
        }
        if n_z == 0 {
            continue;
        }
        for a in 0..kx {
            for b in 0..ky {
                let o = stratum[a * ky + b];
                if o == 0 {
                    continue;
                }
                let expected = row_tot[a] as f64 * col_tot[b] as f64 / n_z as f64;
                statistic += 2.0 * o as f64 * (o as f64 / expected).ln();
            }
        }
    }
    let statistic = statistic.max(0.0);
    let independent = if df == 0 {
        true
    } else {
        let chi = ChiSquared::new(df as f64).expect("df > 0");
        statistic < chi.inverse_cdf(1.0 - cfg.alpha)
    };
    Ok(GTestOutcome { statistic, df, independent })
}

/// Backend payload of an [`Oracle`].
#[derive(Debug, Clone)]
pub enum Backend {
    Graph(Dag),
    Discrete(DiscreteJoint),
    Gaussian { system: GaussianSystem, covariance: Matrix },
    Sample { data: Dataset, config: GTestConfig },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Graph(_) => "graph",
            Backend::Discrete(_) => "discrete",
            Backend::Gaussian { .. } => "gaussian",
            Backend::Sample { .. } => "gtest",
        }
    }
}

/// An [`IndependenceOracle`] over one of the four backends, with memoization
/// and a query counter. Safe to share across threads.
#[derive(Debug)]
pub struct Oracle {
    backend: Backend,
    labels: Vec<String>,
    queries: AtomicU64,
    cache: RwLock<HashMap<(u32, u32, u32), bool>>,
}

impl Oracle {
    fn with_backend(backend: Backend, labels: Vec<String>) -> Self {
        Oracle { backend, labels, queries: AtomicU64::new(0), cache: RwLock::new(HashMap::new()) }
    }

    pub fn graph(dag: Dag) -> Self {
        let labels = dag.labels().to_vec();
        Oracle::with_backend(Backend::Graph(dag), labels)
    }

    pub fn discrete(joint: DiscreteJoint) -> Self {
        let labels = joint.labels();
        Oracle::with_backend(Backend::Discrete(joint), labels)
    }

    pub fn gaussian(system: GaussianSystem) -> Self {
        let covariance = covariance_of(&system);
        let labels = system.labels().to_vec();
        Oracle::with_backend(Backend::Gaussian { system, covariance }, labels)
    }

    pub fn sample(data: Dataset, config: GTestConfig) -> Result<Self, OracleError> {
        config.validate()?;
        if data.is_empty() {
            return Err(OracleError::EmptyDataset);
        }
        let labels = data.variables.iter().map(|v| v.label.clone()).collect();
        Ok(Oracle::with_backend(Backend::Sample { data, config }, labels))
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    /// The exact joint, when this is a discrete oracle.
    pub fn joint(&self) -> Option<&DiscreteJoint> {
        match &self.backend {
            Backend::Discrete(j) => Some(j),
            _ => None,
        }
    }

    /// Number of queries answered so far, including cache hits.
    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset_query_count(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }

    fn evaluate(&self, xs: NodeSet, ys: NodeSet, zs: NodeSet) -> Result<bool, OracleError> {
        match &self.backend {
            Backend::Graph(g) => Ok(g.d_separated(xs, ys, zs)?),
            Backend::Discrete(j) => Ok(j.is_independent_sets(xs, ys, zs)?),
            Backend::Gaussian { covariance, .. } => {
                if xs.is_empty() || ys.is_empty() || !xs.is_disjoint(ys) || !xs.union(ys).is_disjoint(zs) {
                    return Err(OracleError::Overlap);
                }
                for x in xs {
                    for y in ys {
                        if !partial_correlation_zero(covariance, x, y, zs)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Backend::Sample { data, config } => Ok(g_test(data, xs, ys, zs, config)?.independent),
        }
    }
}

impl IndependenceOracle for Oracle {
    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn query_sets(&self, xs: NodeSet, ys: NodeSet, zs: NodeSet) -> Result<bool, OracleError> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let key = (xs.bits(), ys.bits(), zs.bits());
        if let Some(&hit) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(hit);
        }
        let answer = self.evaluate(xs, ys, zs)?;
        self.cache.write().expect("cache lock").insert(key, answer);
        Ok(answer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{ratio, Variable};

    fn hesslow(alpha: Rational, beta: Rational) -> GaussianSystem {
        let gamma = &alpha * &beta;
        GaussianSystem::from_edges(
            &["X", "Z", "Y"],
            &[("X", "Z", alpha), ("Z", "Y", beta), ("X", "Y", -gamma)],
            vec![Rational::one(); 3],
        )
        .unwrap()
    }

    #[test]
    fn single_node_variance() {
        let sys = GaussianSystem::from_edges(&["A"], &[], vec![ratio(5, 3)]).unwrap();
        assert_eq!(covariance_of(&sys), vec![vec![ratio(5, 3)]]);
    }

    #[test]
    fn cancellation_zeroes_covariance() {
        let sys = hesslow(ratio(1, 1), ratio(1, 1));
        let cov = covariance_of(&sys);
        // X = E1, Z = X + E2, Y = Z - X + E3 = E2 + E3.
        assert!(cov[0][2].is_zero());
        assert_eq!(cov[1][1], ratio(2, 1));
        assert_eq!(cov[1][2], ratio(1, 1));
        assert_eq!(cov[2][2], ratio(2, 1));
        assert!(partial_correlation_zero(&cov, 0, 2, NodeSet::EMPTY).unwrap());
        assert!(!partial_correlation_zero(&cov, 0, 2, NodeSet::singleton(1)).unwrap());
    }

    #[test]
    fn relabeling_preserves_covariances() {
        let a = hesslow(ratio(2, 3), ratio(-5, 7));
        let cov_a = covariance_of(&a);
        let gamma = ratio(2, 3) * ratio(-5, 7);
        let b = GaussianSystem::from_edges(
            &["Y", "X", "Z"],
            &[("X", "Z", ratio(2, 3)), ("Z", "Y", ratio(-5, 7)), ("X", "Y", -gamma)],
            vec![Rational::one(); 3],
        )
        .unwrap();
        let cov_b = covariance_of(&b);
        let pos_a = |l: &str| a.labels().iter().position(|x| x == l).unwrap();
        let pos_b = |l: &str| b.labels().iter().position(|x| x == l).unwrap();
        for p in ["X", "Y", "Z"] {
            for q in ["X", "Y", "Z"] {
                assert_eq!(cov_a[pos_a(p)][pos_a(q)], cov_b[pos_b(p)][pos_b(q)]);
            }
        }
    }

    #[test]
    fn diagonal_covariance_always_zero() {
        let cov: Matrix = (0..4)
            .map(|i| (0..4).map(|j| if i == j { ratio(i as i64 + 1, 1) } else { Rational::zero() }).collect())
            .collect();
        for s in NodeSet::full(4).without(0).without(3).subsets() {
            assert!(partial_correlation_zero(&cov, 0, 3, s).unwrap());
        }
    }

    #[test]
    fn singular_submatrix_is_an_error() {
        let one = Rational::one();
        let cov = vec![vec![one.clone(), one.clone()], vec![one.clone(), one]];
        assert!(matches!(partial_correlation_zero(&cov, 0, 1, NodeSet::EMPTY), Err(OracleError::Singular(_))));
        assert_eq!(partial_correlation_zero(&cov, 0, 0, NodeSet::EMPTY), Err(OracleError::Overlap));
    }

    #[test]
    fn system_validation() {
        assert!(GaussianSystem::from_edges(&["A"], &[], vec![Rational::zero()]).is_err());
        assert!(GaussianSystem::from_edges(
            &["A", "B"],
            &[("A", "B", ratio(1, 1)), ("B", "A", ratio(1, 1))],
            vec![Rational::one(); 2]
        )
        .is_err());
    }

    fn table(counts: &[(usize, usize, usize)]) -> Dataset {
        let mut rows = Vec::new();
        for &(a, b, n) in counts {
            for _ in 0..n {
                rows.push(vec![a, b]);
            }
        }
        Dataset { variables: vec![Variable::new("A", 2), Variable::new("B", 2)], rows }
    }

    #[test]
    fn g_test_uniform_table() {
        let d = table(&[(0, 0, 25), (0, 1, 25), (1, 0, 25), (1, 1, 25)]);
        let out = g_test(&d, NodeSet::singleton(0), NodeSet::singleton(1), NodeSet::EMPTY, &GTestConfig::default()).unwrap();
        assert_eq!(out.statistic, 0.0);
        assert_eq!(out.df, 1);
        assert!(out.independent);
    }

    #[test]
    fn g_test_copy_is_dependent() {
        let d = table(&[(0, 0, 500), (1, 1, 500)]);
        let out = g_test(&d, NodeSet::singleton(0), NodeSet::singleton(1), NodeSet::EMPTY, &GTestConfig::default()).unwrap();
        // 2 * 1000 * ln 2
        assert!((out.statistic - 2000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!(!out.independent);
    }

    #[test]
    fn g_test_value_against_hand_computation() {
        // Observed [[30, 10], [20, 40]], n = 100; expected [[20, 20], [30, 30]].
        let d = table(&[(0, 0, 30), (0, 1, 10), (1, 0, 20), (1, 1, 40)]);
        let out = g_test(&d, NodeSet::singleton(0), NodeSet::singleton(1), NodeSet::EMPTY, &GTestConfig::default()).unwrap();
        let expect = 2.0
            * (30.0 * (30.0f64 / 20.0).ln()
                + 10.0 * (10.0f64 / 20.0).ln()
                + 20.0 * (20.0f64 / 30.0).ln()
                + 40.0 * (40.0f64 / 30.0).ln());
        assert!((out.statistic - expect).abs() < 1e-9);
    }

    #[test]
    fn g_test_policies_and_errors() {
        let d = table(&[(0, 0, 10), (0, 1, 10)]);
        let (a, b) = (NodeSet::singleton(0), NodeSet::singleton(1));
        let drop = GTestConfig { alpha: 0.05, min_count: MinCountPolicy::DropEmpty };
        let out = g_test(&d, a, b, NodeSet::EMPTY, &drop).unwrap();
        assert_eq!(out.df, 0);
        assert!(out.independent);
        assert!(GTestConfig::with_alpha(1.5).is_err());
        assert!(g_test(&d, a, a, NodeSet::EMPTY, &GTestConfig::default()).is_err());
        let empty = Dataset { variables: d.variables.clone(), rows: vec![] };
        assert_eq!(g_test(&empty, a, b, NodeSet::EMPTY, &GTestConfig::default()), Err(OracleError::EmptyDataset));
    }

    #[test]
    fn graph_backend_and_counter() {
        let g = Dag::parse(&["X", "Y", "Z"], &["X->Y", "Z->Y"]).unwrap();
        let o = Oracle::graph(g);
        assert!(o.query(0, 2, NodeSet::EMPTY).unwrap());
        assert!(!o.query(0, 2, NodeSet::singleton(1)).unwrap());
        assert!(o.query(0, 2, NodeSet::EMPTY).unwrap());
        assert_eq!(o.query_count(), 3);
        assert_eq!(o.query(0, 0, NodeSet::EMPTY), Err(OracleError::Overlap));
        assert!(o.index_of("Q").is_err());
    }

    #[test]
    fn gaussian_backend_hesslow() {
        let o = Oracle::gaussian(hesslow(ratio(1, 1), ratio(1, 1)));
        let (x, z, y) = (0, 1, 2);
        assert!(o.query(x, y, NodeSet::EMPTY).unwrap());
        assert!(!o.query(x, y, NodeSet::singleton(z)).unwrap());
    }
}
