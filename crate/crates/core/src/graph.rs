//! Directed acyclic graphs, reachability relations, and d-separation.
//!
//! Nodes are identified by their dense index `0..n`; labels are for display
//! and parsing only. Every node set is a [`NodeSet`] bitmask, which caps a
//! graph at 32 nodes.
//!
//! Two d-separation routines are provided: [`Dag::d_separated`] runs the
//! reachability ("Bayes ball") pass, and [`Dag::d_separated_bruteforce`]
//! enumerates every simple path and checks the blocking clauses one by one.
//! The second exists to validate the first.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::nodeset::{NodeSet, MAX_NODES};

/// Largest graph the path enumerator accepts.
pub const BRUTEFORCE_MAX_NODES: usize = 12;

/// Largest node count [`enumerate_dags`] accepts.
pub const ENUMERATE_MAX_NODES: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("duplicate node label `{0}`")]
    DuplicateLabel(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0}->{1}")]
    DuplicateEdge(String, String),
    #[error("edge set contains a directed cycle")]
    Cycle,
    #[error("graph has {0} nodes; at most {1} are supported here")]
    TooLarge(usize, usize),
    #[error("malformed edge `{0}`; expected `parent->child`")]
    MalformedEdge(String),
    #[error("query sets must be pairwise disjoint")]
    Overlap,
    #[error("query sets must be non-empty")]
    EmptySet,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("position {0} is not an interior position of the path")]
    EndpointPosition(usize),
}

/// A directed acyclic graph over labelled nodes.
#[derive(Clone, PartialEq, Eq)]
pub struct Dag {
    labels: Vec<String>,
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
}

impl Dag {
    /// Builds a graph from labels and `(parent, child)` index pairs.
    pub fn new(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let n = labels.len();
        if n > MAX_NODES {
            return Err(GraphError::TooLarge(n, MAX_NODES));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        let mut parents = vec![NodeSet::EMPTY; n];
        let mut children = vec![NodeSet::EMPTY; n];
        for &(p, c) in edges {
            if p >= n {
                return Err(GraphError::UnknownNode(p.to_string()));
            }
            if c >= n {
                return Err(GraphError::UnknownNode(c.to_string()));
            }
            if p == c {
                return Err(GraphError::SelfLoop(labels[p].clone()));
            }
            if parents[c].contains(p) {
                return Err(GraphError::DuplicateEdge(labels[p].clone(), labels[c].clone()));
            }
            parents[c].insert(p);
            children[p].insert(c);
        }
        let dag = Dag { labels, parents, children };
        if dag.topological_order().is_none() {
            return Err(GraphError::Cycle);
        }
        Ok(dag)
    }

    /// Builds a graph from node labels and `"parent->child"` edge strings.
    pub fn parse<S: AsRef<str>, E: AsRef<str>>(nodes: &[S], edges: &[E]) -> Result<Self, GraphError> {
        let labels: Vec<String> = nodes.iter().map(|s| s.as_ref().trim().to_string()).collect();
        let lookup = |name: &str| {
            labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
        };
        let mut pairs = Vec::with_capacity(edges.len());
        for e in edges {
            let e = e.as_ref();
            let (p, c) = e
                .split_once("->")
                .ok_or_else(|| GraphError::MalformedEdge(e.to_string()))?;
            let (p, c) = (p.trim(), c.trim());
            if p.is_empty() || c.is_empty() {
                return Err(GraphError::MalformedEdge(e.to_string()));
            }
            pairs.push((lookup(p)?, lookup(c)?));
        }
        Dag::new(labels, &pairs)
    }

    /// A graph with `n` nodes labelled `V0..V{n-1}` and no edges.
    pub fn empty(n: usize) -> Self {
        let labels = (0..n).map(|i| format!("V{i}")).collect();
        Dag::new(labels, &[]).expect("edgeless graph is acyclic")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, GraphError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| GraphError::UnknownNode(label.to_string()))
    }

    /// Resolves a list of labels into a node set.
    pub fn set_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<NodeSet, GraphError> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    pub fn nodes(&self) -> NodeSet {
        NodeSet::full(self.len())
    }

    /// Edges as `(parent, child)`, sorted by parent then child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.len() {
            for c in self.children[p] {
                out.push((p, c));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    /// Edges rendered as `"parent->child"`.
    pub fn edge_strings(&self) -> Vec<String> {
        self.edges()
            .into_iter()
            .map(|(p, c)| format!("{}->{}", self.labels[p], self.labels[c]))
            .collect()
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        child < self.len() && self.parents[child].contains(parent)
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    fn check(&self, x: usize) -> Result<(), GraphError> {
        if x < self.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(x.to_string()))
        }
    }

    fn check_set(&self, s: NodeSet) -> Result<(), GraphError> {
        if s.is_subset(self.nodes()) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(format!("{s:?}")))
        }
    }

    pub fn parents(&self, x: usize) -> Result<NodeSet, GraphError> {
        self.check(x)?;
        Ok(self.parents[x])
    }

    pub fn children(&self, x: usize) -> Result<NodeSet, GraphError> {
        self.check(x)?;
        Ok(self.children[x])
    }

    /// Parents of `x`. Panics if `x` is out of range.
    pub fn parent_set(&self, x: usize) -> NodeSet {
        self.parents[x]
    }

    /// Children of `x`. Panics if `x` is out of range.
    pub fn child_set(&self, x: usize) -> NodeSet {
        self.children[x]
    }

    fn closure(&self, start: NodeSet, step: &[NodeSet]) -> NodeSet {
        let mut seen = start;
        let mut stack: Vec<usize> = start.to_vec();
        while let Some(v) = stack.pop() {
            for w in step[v].difference(seen) {
                seen.insert(w);
                stack.push(w);
            }
        }
        seen
    }

    /// Ancestors of `x`, including `x` itself.
    pub fn ancestors(&self, x: usize) -> Result<NodeSet, GraphError> {
        self.check(x)?;
        Ok(self.closure(NodeSet::singleton(x), &self.parents))
    }

    /// Descendants of `x`, including `x` itself.
    pub fn descendants(&self, x: usize) -> Result<NodeSet, GraphError> {
        self.check(x)?;
        Ok(self.closure(NodeSet::singleton(x), &self.children))
    }

    pub fn non_descendants(&self, x: usize) -> Result<NodeSet, GraphError> {
        Ok(self.nodes().difference(self.descendants(x)?))
    }

    /// Union of the ancestor sets of every node in `s` (reflexive).
    pub fn ancestors_of_set(&self, s: NodeSet) -> NodeSet {
        self.closure(s, &self.parents)
    }

    /// Parents, children, and spouses of `x`, without `x`.
    pub fn markov_blanket(&self, x: usize) -> Result<NodeSet, GraphError> {
        self.check(x)?;
        let ch = self.children[x];
        let mut mb = self.parents[x].union(ch);
        for c in ch {
            mb = mb.union(self.parents[c]);
        }
        Ok(mb.without(x))
    }

    /// A topological order, or `None` when the edge set has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(|p| p.len()).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for c in self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// `true` iff `path.nodes()[position]` has both path neighbours pointing into it.
    pub fn is_collider(&self, path: &Path, position: usize) -> Result<bool, GraphError> {
        let nodes = path.nodes();
        if position == 0 || position + 1 >= nodes.len() {
            return Err(GraphError::EndpointPosition(position));
        }
        let v = nodes[position];
        Ok(self.has_edge(nodes[position - 1], v) && self.has_edge(nodes[position + 1], v))
    }

    fn check_query(&self, xs: NodeSet, ys: NodeSet, zs: NodeSet) -> Result<(), GraphError> {
        self.check_set(xs.union(ys).union(zs))?;
        if xs.is_empty() || ys.is_empty() {
            return Err(GraphError::EmptySet);
        }
        if !xs.is_disjoint(ys) || !xs.is_disjoint(zs) || !ys.is_disjoint(zs) {
            return Err(GraphError::Overlap);
        }
        Ok(())
    }

    /// Whether every `x ∈ xs` is d-separated from every `y ∈ ys` given `zs`.
    pub fn d_separated(&self, xs: NodeSet, ys: NodeSet, zs: NodeSet) -> Result<bool, GraphError> {
        self.check_query(xs, ys, zs)?;
        let an_z = self.ancestors_of_set(zs);
        Ok(xs
            .iter()
            .all(|x| self.reachable(x, zs, an_z).is_disjoint(ys)))
    }

    /// Single-pair convenience wrapper around [`Dag::d_separated`].
    pub fn d_separated_pair(&self, x: usize, y: usize, zs: NodeSet) -> Result<bool, GraphError> {
        self.d_separated(NodeSet::singleton(x), NodeSet::singleton(y), zs)
    }

    /// Nodes d-connected to `x` given `zs`. `an_z` must be the ancestral closure of `zs`.
    fn reachable(&self, x: usize, zs: NodeSet, an_z: NodeSet) -> NodeSet {
        // Visit states: (node, arrived-from-child). Arriving "up" means we came
        // against an edge direction (from a child), "down" means along an edge.
        let n = self.len();
        let mut visited_up = vec![false; n];
        let mut visited_down = vec![false; n];
        let mut reached = NodeSet::EMPTY;
        let mut queue = VecDeque::new();
        queue.push_back((x, true));
        while let Some((v, up)) = queue.pop_front() {
            let seen = if up { &mut visited_up[v] } else { &mut visited_down[v] };
            if *seen {
                continue;
            }
            *seen = true;
            let in_z = zs.contains(v);
            if !in_z {
                reached.insert(v);
            }
            if up {
                if !in_z {
                    for p in self.parents[v] {
                        queue.push_back((p, true));
                    }
                    for c in self.children[v] {
                        queue.push_back((c, false));
                    }
                }
            } else {
                if !in_z {
                    for c in self.children[v] {
                        queue.push_back((c, false));
                    }
                }
                if an_z.contains(v) {
                    for p in self.parents[v] {
                        queue.push_back((p, true));
                    }
                }
            }
        }
        reached.without(x)
    }

    /// Same contract as [`Dag::d_separated`], decided by enumerating every
    /// simple path and testing each interior node against the blocking rules.
    pub fn d_separated_bruteforce(&self, xs: NodeSet, ys: NodeSet, zs: NodeSet) -> Result<bool, GraphError> {
        if self.len() > BRUTEFORCE_MAX_NODES {
            return Err(GraphError::TooLarge(self.len(), BRUTEFORCE_MAX_NODES));
        }
        self.check_query(xs, ys, zs)?;
        for x in xs {
            for y in ys {
                let mut path = vec![x];
                let mut on_path = NodeSet::singleton(x);
                if self.connecting_path_exists(y, zs, &mut path, &mut on_path) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn connecting_path_exists(&self, target: usize, zs: NodeSet, path: &mut Vec<usize>, on_path: &mut NodeSet) -> bool {
        let last = *path.last().expect("path starts non-empty");
        if last == target {
            return self.path_is_connecting(path, zs);
        }
        let neighbours = self.parents[last].union(self.children[last]).difference(*on_path);
        for next in neighbours {
            path.push(next);
            on_path.insert(next);
            let found = self.connecting_path_exists(target, zs, path, on_path);
            path.pop();
            on_path.remove(next);
            if found {
                return true;
            }
        }
        false
    }

    fn path_is_connecting(&self, path: &[usize], zs: NodeSet) -> bool {
        for i in 1..path.len() - 1 {
            let v = path[i];
            let collider = self.has_edge(path[i - 1], v) && self.has_edge(path[i + 1], v);
            if collider {
                // A collider must be an ancestor of some member of zs.
                let de = self.closure(NodeSet::singleton(v), &self.children);
                if de.is_disjoint(zs) {
                    return false;
                }
            } else if zs.contains(v) {
                return false;
            }
        }
        true
    }

    /// Render the graph as `label[a,b] ; a->b ; ...` for diagnostics.
    pub fn describe(&self) -> String {
        format!("[{}] {}", self.labels.join(","), self.edge_strings().join(" "))
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag({})", self.describe())
    }
}

/// A sequence of distinct nodes, consecutive ones adjacent in the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path(Vec<usize>);

impl Path {
    pub fn new(g: &Dag, nodes: Vec<usize>) -> Result<Self, GraphError> {
        if nodes.len() < 2 {
            return Err(GraphError::InvalidPath("fewer than two nodes".into()));
        }
        let mut seen = NodeSet::EMPTY;
        for &v in &nodes {
            g.check(v)?;
            if seen.contains(v) {
                return Err(GraphError::InvalidPath(format!("node {} repeats", g.label(v))));
            }
            seen.insert(v);
        }
        for w in nodes.windows(2) {
            if !g.is_adjacent(w[0], w[1]) {
                return Err(GraphError::InvalidPath(format!(
                    "{} and {} are not adjacent",
                    g.label(w[0]),
                    g.label(w[1])
                )));
            }
        }
        Ok(Path(nodes))
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }
}

/// Every labelled DAG on `n` nodes, each exactly once.
///
/// Each unordered node pair independently takes one of three states (absent,
/// forward, backward); cyclic assignments are skipped.
pub fn enumerate_dags(n: usize) -> Result<impl Iterator<Item = Dag>, GraphError> {
    if n > ENUMERATE_MAX_NODES {
        return Err(GraphError::TooLarge(n, ENUMERATE_MAX_NODES));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3u64.pow(pairs.len() as u32);
    let labels: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    Ok((0..total).filter_map(move |mut code| {
        let mut edges = Vec::with_capacity(pairs.len());
        for &(i, j) in &pairs {
            match code % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            code /= 3;
        }
        Dag::new(labels.clone(), &edges).ok()
    }))
}

/// A random DAG: nodes are shuffled into a causal order and each forward pair
/// gets an edge with probability `edge_prob`.
pub fn random_dag<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_prob) {
                edges.push((order[i], order[j]));
            }
        }
    }
    let labels = (0..n).map(|i| format!("V{i}")).collect();
    Dag::new(labels, &edges).expect("forward edges in a fixed order are acyclic")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(nodes: &[&str], edges: &[&str]) -> Dag {
        Dag::parse(nodes, edges).unwrap()
    }

    fn set(d: &Dag, labels: &[&str]) -> NodeSet {
        d.set_of(labels).unwrap()
    }

    #[test]
    fn parents_readout() {
        let d = g(&["X", "Y", "Z"], &["X->Y", "Z->Y"]);
        assert_eq!(d.parents(1).unwrap(), set(&d, &["X", "Z"]));
        let e = g(&["X", "Y", "Z", "W"], &["X->Y", "Z->Y", "W->Y"]);
        assert_eq!(e.parents(1).unwrap(), set(&e, &["X", "Z", "W"]));
        let empty = g(&["X"], &[] as &[&str]);
        assert_eq!(empty.parents(0).unwrap(), NodeSet::EMPTY);
        assert!(matches!(d.parents(7), Err(GraphError::UnknownNode(_))));
    }

    #[test]
    fn reflexive_closures() {
        let d = g(&["X", "Y", "Z"], &["X->Y", "Y->Z"]);
        assert_eq!(d.ancestors(2).unwrap(), NodeSet::full(3));
        assert_eq!(d.descendants(0).unwrap(), NodeSet::full(3));
        assert_eq!(d.non_descendants(1).unwrap(), set(&d, &["X"]));
    }

    #[test]
    fn markov_blanket_examples() {
        let e = g(&["X", "Y", "Z", "W"], &["X->Y", "Z->Y", "W->Y"]);
        assert_eq!(e.markov_blanket(3).unwrap(), set(&e, &["X", "Y", "Z"]));
        let iso = g(&["A", "B"], &[] as &[&str]);
        assert_eq!(iso.markov_blanket(0).unwrap(), NodeSet::EMPTY);
    }

    #[test]
    fn collider_positions() {
        let c = g(&["X", "Y", "Z"], &["X->Y", "Z->Y"]);
        let chain = g(&["X", "Y", "Z"], &["X->Y", "Y->Z"]);
        let fork = g(&["X", "Y", "Z"], &["Y->X", "Y->Z"]);
        for (d, expect) in [(&c, true), (&chain, false), (&fork, false)] {
            let p = Path::new(d, vec![0, 1, 2]).unwrap();
            assert_eq!(d.is_collider(&p, 1).unwrap(), expect);
            assert!(matches!(d.is_collider(&p, 0), Err(GraphError::EndpointPosition(0))));
            assert!(d.is_collider(&p, 2).is_err());
        }
    }

    #[test]
    fn path_validation() {
        let d = g(&["X", "Y", "Z"], &["X->Y"]);
        assert!(Path::new(&d, vec![0]).is_err());
        assert!(Path::new(&d, vec![0, 2]).is_err());
        assert!(Path::new(&d, vec![0, 1, 0]).is_err());
        assert!(Path::new(&d, vec![1, 0]).is_ok());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Dag::parse(&["A", "B"], &["A->B", "B->A"]), Err(GraphError::Cycle));
        assert!(matches!(Dag::parse(&["A", "B"], &["A->A"]), Err(GraphError::SelfLoop(_))));
        assert!(matches!(Dag::parse(&["A", "B"], &["A->B", "A->B"]), Err(GraphError::DuplicateEdge(..))));
        assert!(matches!(Dag::parse(&["A", "A"], &[] as &[&str]), Err(GraphError::DuplicateLabel(_))));
        assert!(matches!(Dag::parse(&["A", "B"], &["A-B"]), Err(GraphError::MalformedEdge(_))));
        assert!(matches!(Dag::parse(&["A", "B"], &["A->C"]), Err(GraphError::UnknownNode(_))));
    }

    #[test]
    fn collider_activation() {
        let d = g(&["X", "Y", "Z"], &["X->Y", "Z->Y"]);
        assert!(d.d_separated_pair(0, 2, NodeSet::EMPTY).unwrap());
        assert!(!d.d_separated_pair(0, 2, set(&d, &["Y"])).unwrap());
        assert!(d.d_separated_bruteforce(set(&d, &["X"]), set(&d, &["Z"]), NodeSet::EMPTY).unwrap());
        assert!(!d.d_separated_bruteforce(set(&d, &["X"]), set(&d, &["Z"]), set(&d, &["Y"])).unwrap());
    }

    #[test]
    fn descendant_of_collider_activates() {
        let d = g(&["X", "Y", "Z", "D"], &["X->Y", "Z->Y", "Y->D"]);
        let s = set(&d, &["D"]);
        assert!(!d.d_separated_pair(0, 2, s).unwrap());
        assert!(!d.d_separated_bruteforce(NodeSet::singleton(0), NodeSet::singleton(2), s).unwrap());
    }

    #[test]
    fn query_validation() {
        let d = g(&["X", "Y", "Z"], &["X->Y", "Z->Y"]);
        let x = NodeSet::singleton(0);
        assert_eq!(d.d_separated(x, x, NodeSet::EMPTY), Err(GraphError::Overlap));
        assert_eq!(d.d_separated(x, NodeSet::singleton(1), x), Err(GraphError::Overlap));
        assert_eq!(d.d_separated(NodeSet::EMPTY, x, NodeSet::EMPTY), Err(GraphError::EmptySet));
        assert!(d.d_separated(x, NodeSet::singleton(9), NodeSet::EMPTY).is_err());
        let big = Dag::empty(13);
        assert!(matches!(
            big.d_separated_bruteforce(x, NodeSet::singleton(1), NodeSet::EMPTY),
            Err(GraphError::TooLarge(13, _))
        ));
    }

    #[test]
    fn small_enumeration_counts() {
        assert_eq!(enumerate_dags(0).unwrap().count(), 1);
        assert_eq!(enumerate_dags(1).unwrap().count(), 1);
        assert_eq!(enumerate_dags(2).unwrap().count(), 3);
        assert!(enumerate_dags(6).is_err());
    }
}
