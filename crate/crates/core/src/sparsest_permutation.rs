//! Brute-force Sparsest Permutation: build the DAG induced by every variable
//! ordering and keep the ones with the fewest edges.

use itertools::Itertools;
use serde::Serialize;

use crate::graph::Dag;
use crate::nodeset::NodeSet;
use crate::oracle::{IndependenceOracle, OracleError};

pub const MAX_SP_VARS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermutationDag {
    /// Ordering as variable indices.
    #[serde(skip)]
    pub order: Vec<usize>,
    pub permutation: Vec<String>,
    /// Edges as `"A->B"`, in discovery order.
    pub edges: Vec<String>,
    pub edge_count: usize,
    #[serde(skip)]
    pub pairs: Vec<(usize, usize)>,
}

impl PermutationDag {
    pub fn to_dag(&self, labels: &[String]) -> Dag {
        Dag::new(labels.to_vec(), &self.pairs).expect("permutation edges follow the ordering")
    }
}

/// Edge `π(j) → π(k)` for `j < k` iff the two stay dependent given every
/// earlier variable other than `π(j)`.
pub fn dag_from_permutation<O: IndependenceOracle + ?Sized>(o: &O, pi: &[usize]) -> Result<PermutationDag, OracleError> {
    let n = o.num_vars();
    let as_set: NodeSet = pi.iter().copied().collect();
    if pi.len() != n || as_set != NodeSet::full(n) {
        return Err(OracleError::InvalidConfig("permutation must list every variable exactly once".into()));
    }
    let l = o.labels();
    let mut pairs = Vec::new();
    for k in 1..n {
        let before: NodeSet = pi[..k].iter().copied().collect();
        for &a in &pi[..k] {
            if !o.query(a, pi[k], before.without(a))? {
                pairs.push((a, pi[k]));
            }
        }
    }
    Ok(PermutationDag {
        order: pi.to_vec(),
        permutation: pi.iter().map(|&i| l[i].clone()).collect(),
        edges: pairs.iter().map(|&(a, b)| format!("{}->{}", l[a], l[b])).collect(),
        edge_count: pairs.len(),
        pairs,
    })
}

/// Every permutation's DAG, in lexicographic order of index sequences.
pub fn all_permutation_dags<O: IndependenceOracle + ?Sized>(o: &O) -> Result<Vec<PermutationDag>, OracleError> {
    let n = o.num_vars();
    if n > MAX_SP_VARS {
        return Err(OracleError::InvalidConfig(format!("sparsest permutation enumerates n! orderings; at most {MAX_SP_VARS} variables")));
    }
    (0..n).permutations(n).map(|pi| dag_from_permutation(o, &pi)).collect()
}

/// All minimizers of the edge count, in lexicographic order.
pub fn sparsest_permutations<O: IndependenceOracle + ?Sized>(o: &O) -> Result<Vec<PermutationDag>, OracleError> {
    let all = all_permutation_dags(o)?;
    let min = all.iter().map(|d| d.edge_count).min().unwrap_or(0);
    Ok(all.into_iter().filter(|d| d.edge_count == min).collect())
}

/// Unshielded colliders `(a, c, b)` with `a < b`.
pub fn v_structures(g: &Dag) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for c in 0..g.len() {
        let ps = g.parent_set(c).to_vec();
        for (i, &a) in ps.iter().enumerate() {
            for &b in &ps[i + 1..] {
                if !g.is_adjacent(a, b) {
                    out.push((a, c, b));
                }
            }
        }
    }
    out
}

/// Same skeleton and same unshielded colliders.
pub fn markov_equivalent(a: &Dag, b: &Dag) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    for i in 0..n {
        for j in i + 1..n {
            if a.is_adjacent(i, j) != b.is_adjacent(i, j) {
                return false;
            }
        }
    }
    v_structures(a) == v_structures(b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureProbe {
    pub minimizers: usize,
    pub min_edges: usize,
    /// Minimizing orderings whose DAG is not Markov equivalent to the truth.
    pub counterexamples: Vec<Vec<String>>,
}

impl ConjectureProbe {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks whether every sparsest permutation recovers the pattern of `truth`.
pub fn probe_collider_conjecture<O: IndependenceOracle + ?Sized>(o: &O, truth: &Dag) -> Result<ConjectureProbe, OracleError> {
    let mins = sparsest_permutations(o)?;
    let labels = o.labels().to_vec();
    Ok(ConjectureProbe {
        minimizers: mins.len(),
        min_edges: mins.first().map_or(0, |d| d.edge_count),
        counterexamples: mins.iter().filter(|d| !markov_equivalent(&d.to_dag(&labels), truth)).map(|d| d.permutation.clone()).collect(),
    })
}
