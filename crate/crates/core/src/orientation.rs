//! Sound collider orientation around strict 2-associations.
//!
//! Given a center `Y` and two disjoint side sets `X̄`, `Z̄` (one or two nodes
//! each) with `Y` 1-associated or strictly 2-associated to each side, the rule
//! concludes `X̄ → Y ← Z̄` when every cross pair stays dependent under every
//! conditioning set that contains `Y` and the other side members, and
//! concludes that `Y` is a non-collider on some path when every cross pair
//! stays dependent under every such set that excludes `Y`. When neither
//! holds, a 2-orientation-faithfulness failure has been detected.
//!
//! Adjacency between the sides is not observable directly. A 1-association
//! between cross nodes proves adjacency and is rejected; a strict
//! 2-association through a third node is only evidence, because that third
//! node may be the collider of an unshielded triple. Such queries still run
//! but carry `shielding_caveat`.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::association::{is_one, is_strict_le_two, is_strict_two, Budget, StrictReading};
use crate::nodeset::NodeSet;
use crate::oracle::{CiStatement, IndependenceOracle, OracleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrientationError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid orientation query: {0}")]
    InvalidQuery(String),
    #[error("center `{center}` is not 1- or strictly 2-associated to {side:?}")]
    NotAssociated { center: String, side: Vec<String> },
    #[error("`{0}` and `{1}` are 1-associated, hence adjacent")]
    Adjacent(String, String),
    #[error("adjacency of `{0}` and `{1}` is ambiguous (strict 2-association through a third node)")]
    AmbiguousAdjacency(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientationQuery {
    pub center: usize,
    pub left: NodeSet,
    pub right: NodeSet,
    pub budget: Budget,
}

impl OrientationQuery {
    pub fn new(center: usize, left: NodeSet, right: NodeSet) -> Self {
        OrientationQuery { center, left, right, budget: Budget::UNBOUNDED }
    }

    /// Resolves labels against the oracle's variables.
    pub fn from_labels<O: IndependenceOracle + ?Sized>(o: &O, center: &str, left: &[&str], right: &[&str]) -> Result<Self, OracleError> {
        let set = |ls: &[&str]| -> Result<NodeSet, OracleError> { ls.iter().map(|l| o.index_of(l)).collect() };
        Ok(OrientationQuery::new(o.index_of(center)?, set(left)?, set(right)?))
    }

    fn validate_shape(&self, n: usize) -> Result<(), OrientationError> {
        let all = NodeSet::full(n);
        if self.center >= n || !self.left.is_subset(all) || !self.right.is_subset(all) {
            return Err(OrientationError::InvalidQuery("node out of range".into()));
        }
        for side in [self.left, self.right] {
            if !(1..=2).contains(&side.len()) {
                return Err(OrientationError::InvalidQuery("each side must hold one or two nodes".into()));
            }
            if side.contains(self.center) {
                return Err(OrientationError::InvalidQuery("center belongs to a side set".into()));
            }
        }
        if !self.left.is_disjoint(self.right) {
            return Err(OrientationError::InvalidQuery("side sets overlap".into()));
        }
        Ok(())
    }
}

/// What the oracle says about whether two nodes might be adjacent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjacencyEvidence {
    None,
    /// Dependent under every conditioning set.
    OneAssociated,
    /// `target` is strictly 2-associated to `{other, via}`.
    StrictTwo { target: usize, other: usize, via: usize },
}

/// Adjacency evidence between `x` and `z`, checking the 1-association first
/// and then strict 2-associations of either node to a pair containing the other.
pub fn adjacency_evidence<O: IndependenceOracle + ?Sized>(o: &O, x: usize, z: usize, budget: Budget) -> Result<AdjacencyEvidence, OracleError> {
    Ok(all_adjacency_evidence(o, x, z, budget, true)?.into_iter().next().unwrap_or(AdjacencyEvidence::None))
}

fn all_adjacency_evidence<O: IndependenceOracle + ?Sized>(
    o: &O,
    x: usize,
    z: usize,
    budget: Budget,
    stop_at_first: bool,
) -> Result<Vec<AdjacencyEvidence>, OracleError> {
    if x == z {
        return Err(OracleError::Overlap);
    }
    if is_one(o, x, z, budget)? {
        return Ok(vec![AdjacencyEvidence::OneAssociated]);
    }
    let mut out = Vec::new();
    for u in o.variables().without(x).without(z) {
        for (t, other) in [(x, z), (z, x)] {
            if is_strict_two(o, t, other, u, budget, StrictReading::Neither)? {
                out.push(AdjacencyEvidence::StrictTwo { target: t, other, via: u });
                if stop_at_first {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// `true` iff no association evidence of adjacency between `x` and `z` exists.
///
/// Conservative: a strict 2-association through a third node counts as
/// evidence even though the triple may be unshielded.
pub fn check_nonadjacency<O: IndependenceOracle + ?Sized>(o: &O, x: usize, z: usize, budget: Budget) -> Result<bool, OracleError> {
    Ok(adjacency_evidence(o, x, z, budget)? == AdjacencyEvidence::None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Collider,
    NonCollider,
    Inconclusive,
}

/// One "dependent under every admissible conditioning set" family for a cross pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependenceFamily {
    pub x: String,
    pub z: String,
    /// Every conditioning set contains these.
    pub contains: Vec<String>,
    /// Every conditioning set avoids this node.
    pub excludes: Option<String>,
    pub sets_checked: usize,
    pub holds: bool,
    /// The independence that defeated the family.
    pub counterexample: Option<CiStatement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrientationVerdict {
    pub center: String,
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub outcome: Outcome,
    /// Edges asserted by a collider verdict, as `"A->B"`.
    pub oriented_edges: Vec<String>,
    /// Rule i dependence families, one per cross pair checked.
    pub collider_checks: Vec<DependenceFamily>,
    /// Rule ii dependence families; empty when rule i fired.
    pub non_collider_checks: Vec<DependenceFamily>,
    /// The pair blocked by the center, for non-collider verdicts.
    pub blocked_pair: Option<CiStatement>,
    /// Neither rule fired on a query whose cross pairs are all unshielded.
    pub failure_detected: bool,
    /// Some cross pair is strictly 2-associated through a third node, so the
    /// triple might be shielded.
    pub shielding_caveat: bool,
    pub truncated: bool,
}

impl OrientationVerdict {
    /// Edges asserted by a collider verdict, as `(parent, child)` labels.
    pub fn edge_pairs(&self) -> Vec<(String, String)> {
        self.oriented_edges
            .iter()
            .filter_map(|e| e.split_once("->").map(|(a, b)| (a.to_string(), b.to_string())))
            .collect()
    }
}

fn labels<O: IndependenceOracle + ?Sized>(o: &O, s: NodeSet) -> Vec<String> {
    s.iter().map(|i| o.labels()[i].clone()).collect()
}

fn check_family<O: IndependenceOracle + ?Sized>(
    o: &O,
    x: usize,
    z: usize,
    base: NodeSet,
    excluded: Option<usize>,
    budget: Budget,
) -> Result<(DependenceFamily, bool), OracleError> {
    let mut pool = o.variables().without(x).without(z);
    if let Some(e) = excluded {
        pool.remove(e);
    }
    let (sets, truncated) = budget.supersets(base, pool);
    let mut fam = DependenceFamily {
        x: o.labels()[x].clone(),
        z: o.labels()[z].clone(),
        contains: labels(o, base),
        excludes: excluded.map(|e| o.labels()[e].clone()),
        sets_checked: 0,
        holds: true,
        counterexample: None,
    };
    for s in sets {
        fam.sets_checked += 1;
        if o.query(x, z, s)? {
            fam.holds = false;
            fam.counterexample = Some(CiStatement::new(o, x, z, s, true));
            break;
        }
    }
    Ok((fam, truncated))
}

fn rule_families<O: IndependenceOracle + ?Sized>(
    o: &O,
    q: &OrientationQuery,
    with_center: bool,
) -> Result<(Vec<DependenceFamily>, bool, bool), OracleError> {
    let mut fams = Vec::new();
    let mut truncated = false;
    for x in q.left {
        for z in q.right {
            let mut base = q.left.without(x).union(q.right.without(z));
            let excluded = if with_center {
                base.insert(q.center);
                None
            } else {
                Some(q.center)
            };
            let (fam, t) = check_family(o, x, z, base, excluded, q.budget)?;
            truncated |= t;
            let failed = !fam.holds;
            fams.push(fam);
            if failed {
                return Ok((fams, false, truncated));
            }
        }
    }
    Ok((fams, true, truncated))
}

/// Evaluates rule i (`with_center`) or rule ii on `q` without checking its
/// premises. Returns whether every cross pair stayed dependent, and the
/// first defeating independence otherwise.
pub fn rule_holds<O: IndependenceOracle + ?Sized>(o: &O, q: &OrientationQuery, with_center: bool) -> Result<(bool, Option<CiStatement>), OracleError> {
    let (fams, holds, _) = rule_families(o, q, with_center)?;
    Ok((holds, fams.last().and_then(|f| f.counterexample.clone())))
}

/// Checks the query's association premises and cross-pair adjacency.
/// Returns whether any cross pair only has strict-2 adjacency evidence.
fn check_premises<O: IndependenceOracle + ?Sized>(o: &O, q: &OrientationQuery) -> Result<bool, OrientationError> {
    q.validate_shape(o.num_vars())?;
    for side in [q.left, q.right] {
        if !is_strict_le_two(o, q.center, side, q.budget)? {
            return Err(OrientationError::NotAssociated { center: o.labels()[q.center].clone(), side: labels(o, side) });
        }
    }
    let mut caveat = false;
    for x in q.left {
        for z in q.right {
            match adjacency_evidence(o, x, z, q.budget)? {
                AdjacencyEvidence::None => {}
                AdjacencyEvidence::OneAssociated => {
                    return Err(OrientationError::Adjacent(o.labels()[x].clone(), o.labels()[z].clone()));
                }
                AdjacencyEvidence::StrictTwo { .. } => caveat = true,
            }
        }
    }
    Ok(caveat)
}

fn apply_rules<O: IndependenceOracle + ?Sized>(o: &O, q: &OrientationQuery, caveat: bool) -> Result<OrientationVerdict, OracleError> {
    let (collider_checks, rule_i, t1) = rule_families(o, q, true)?;
    let mut verdict = OrientationVerdict {
        center: o.labels()[q.center].clone(),
        left: labels(o, q.left),
        right: labels(o, q.right),
        outcome: Outcome::Collider,
        oriented_edges: Vec::new(),
        collider_checks,
        non_collider_checks: Vec::new(),
        blocked_pair: None,
        failure_detected: false,
        shielding_caveat: caveat,
        truncated: t1,
    };
    if rule_i {
        let y = &o.labels()[q.center];
        verdict.oriented_edges = q.left.union(q.right).iter().map(|p| format!("{}->{y}", o.labels()[p])).collect();
        return Ok(verdict);
    }
    verdict.blocked_pair = verdict.collider_checks.last().and_then(|f| f.counterexample.clone());
    let (non_collider_checks, rule_ii, t2) = rule_families(o, q, false)?;
    verdict.non_collider_checks = non_collider_checks;
    verdict.truncated |= t2;
    if rule_ii {
        verdict.outcome = Outcome::NonCollider;
    } else {
        verdict.outcome = Outcome::Inconclusive;
        verdict.blocked_pair = None;
        verdict.failure_detected = !caveat;
    }
    Ok(verdict)
}

/// Applies the orientation rule after verifying its premises.
pub fn orient<O: IndependenceOracle + ?Sized>(o: &O, q: &OrientationQuery) -> Result<OrientationVerdict, OrientationError> {
    let caveat = check_premises(o, q)?;
    Ok(apply_rules(o, q, caveat)?)
}

/// Whether a 2-orientation-faithfulness failure is detected on `q`: neither
/// rule fires although every cross pair is unshielded by the association evidence.
pub fn detect_of_failure<O: IndependenceOracle + ?Sized>(o: &O, q: &OrientationQuery) -> Result<bool, OrientationError> {
    check_premises(o, q)?;
    for x in q.left {
        for z in q.right {
            if !check_nonadjacency(o, x, z, q.budget)? {
                return Err(OrientationError::AmbiguousAdjacency(o.labels()[x].clone(), o.labels()[z].clone()));
            }
        }
    }
    Ok(apply_rules(o, q, false)?.outcome == Outcome::Inconclusive)
}

/// Side sets `Y` is 1-associated or strictly 2-associated to, in index order.
pub fn candidate_sides<O: IndependenceOracle + ?Sized>(o: &O, center: usize, budget: Budget) -> Result<Vec<NodeSet>, OracleError> {
    let others = o.variables().without(center).to_vec();
    let mut out = Vec::new();
    for &a in &others {
        if is_one(o, center, a, budget)? {
            out.push(NodeSet::singleton(a));
        }
    }
    for (i, &a) in others.iter().enumerate() {
        for &b in &others[i + 1..] {
            if is_strict_two(o, center, a, b, budget, StrictReading::Neither)? {
                out.push(NodeSet::singleton(a).with(b));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DriverReport {
    pub verdicts: Vec<OrientationVerdict>,
    /// Edges from collider verdicts without a shielding caveat, as `"A->B"`.
    pub oriented_edges: Vec<String>,
    /// Edges oriented both ways by different verdicts.
    pub conflicts: Vec<String>,
    pub rounds: usize,
}

/// Runs the rule over every candidate query, re-trying queries whose cross
/// pairs were ambiguous once enough colliders are oriented to explain the
/// ambiguity, until no new edge is oriented.
///
/// A cross pair `(x, z)` whose only adjacency evidence is strict
/// 2-associations through third nodes `u` is treated as unshielded once every
/// such `u` has been oriented as a collider `x → u ← z`. Queries still
/// ambiguous at the fixed point are reported with `shielding_caveat` and do
/// not contribute edges.
pub fn orient_all<O: IndependenceOracle + ?Sized>(o: &O, budget: Budget) -> Result<DriverReport, OracleError> {
    let n = o.num_vars();
    let mut queries = Vec::new();
    for y in 0..n {
        let sides = candidate_sides(o, y, budget)?;
        for (i, &a) in sides.iter().enumerate() {
            for &b in &sides[i + 1..] {
                if a.is_disjoint(b) {
                    queries.push(OrientationQuery { center: y, left: a, right: b, budget });
                }
            }
        }
    }
    // Evidence per cross pair, computed once.
    let mut pair_evidence: HashMap<(usize, usize), Vec<AdjacencyEvidence>> = HashMap::new();
    let mut usable = Vec::new();
    for q in &queries {
        let mut rejected = false;
        for x in q.left {
            for z in q.right {
                let key = (x.min(z), x.max(z));
                let ev = match pair_evidence.entry(key) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => e.insert(all_adjacency_evidence(o, key.0, key.1, budget, false)?),
                };
                if ev.first() == Some(&AdjacencyEvidence::OneAssociated) {
                    rejected = true;
                }
            }
        }
        if !rejected {
            usable.push(*q);
        }
    }

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut done = vec![false; usable.len()];
    let mut verdicts = Vec::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let before = edges.len();
        for (k, q) in usable.iter().enumerate() {
            if done[k] {
                continue;
            }
            let resolved = q.left.iter().all(|x| {
                q.right.iter().all(|z| {
                    pair_evidence[&(x.min(z), x.max(z))].iter().all(|ev| match *ev {
                        AdjacencyEvidence::StrictTwo { via, .. } => edges.contains(&(x, via)) && edges.contains(&(z, via)),
                        _ => false,
                    })
                })
            });
            if !resolved {
                continue;
            }
            done[k] = true;
            let v = apply_rules(o, q, false)?;
            if v.outcome == Outcome::Collider {
                for p in q.left.union(q.right) {
                    edges.insert((p, q.center));
                }
            }
            verdicts.push(v);
        }
        if edges.len() == before {
            break;
        }
    }
    for (k, q) in usable.iter().enumerate() {
        if !done[k] {
            verdicts.push(apply_rules(o, q, true)?);
        }
    }
    let l = o.labels();
    let conflicts = edges
        .iter()
        .filter(|&&(a, b)| a < b && edges.contains(&(b, a)))
        .map(|&(a, b)| format!("{}--{}", l[a], l[b]))
        .collect();
    Ok(DriverReport {
        verdicts,
        oriented_edges: edges.iter().map(|&(a, b)| format!("{}->{}", l[a], l[b])).collect(),
        conflicts,
        rounds,
    })
}
