//! 1-associations, 2-associations, strict 2-associations, and unfaithful
//! triples, decided by exhaustive enumeration of conditioning sets.
//!
//! Conditioning sets are scanned smallest first and, within a size, in
//! lexicographic order of node indices, so the separating witness attached to
//! a negative answer is always one of minimum size.

use serde::{Deserialize, Serialize};

use crate::nodeset::NodeSet;
use crate::oracle::{CiStatement, IndependenceOracle, Oracle, OracleError};

/// Caps the size of conditioning sets an association scan will try.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Budget {
    /// `None` means every subset is tried.
    pub max_size: Option<usize>,
}

impl Budget {
    pub const UNBOUNDED: Budget = Budget { max_size: None };

    pub fn limit(max_size: usize) -> Self {
        Budget { max_size: Some(max_size) }
    }

    /// Conditioning sets drawn from `pool`, in scan order, plus whether the
    /// budget cut the enumeration short.
    pub fn subsets(&self, pool: NodeSet) -> (Vec<NodeSet>, bool) {
        let cap = self.max_size.unwrap_or(usize::MAX).min(pool.len());
        (pool.subsets_by_size(cap), cap < pool.len())
    }

    /// Supersets of `base` inside `base ∪ pool` whose total size fits the budget.
    pub fn supersets(&self, base: NodeSet, pool: NodeSet) -> (Vec<NodeSet>, bool) {
        let pool = pool.difference(base);
        if self.max_size.is_some_and(|m| m < base.len()) {
            return (Vec::new(), true);
        }
        let room = self.max_size.map_or(usize::MAX, |m| m - base.len());
        let cap = room.min(pool.len());
        let sets = pool.subsets_by_size(cap).into_iter().map(|s| s.union(base)).collect();
        (sets, cap < pool.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssociationKind {
    One,
    Two,
    StrictTwo,
}

/// How "not 1-associated to `Y1` or `Y2`" is read for strict 2-associations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrictReading {
    /// 1-associated to neither partner.
    #[default]
    Neither,
    /// Not 1-associated to at least one partner.
    AtLeastOne,
}

/// Why an association does not hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum Witness {
    /// An independence that breaks the universally quantified dependence.
    Separated { statement: CiStatement },
    /// The target is 1-associated to this partner, so the association is not strict.
    OneAssociated { partner: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationReport {
    pub target: String,
    pub partners: Vec<String>,
    pub kind: AssociationKind,
    pub holds: bool,
    pub witness: Option<Witness>,
    /// The budget stopped the scan before all subsets were tried; a positive
    /// answer only holds up to the budget.
    pub truncated: bool,
}

/// A separating statement found during a scan, in index form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Separation {
    pub x: usize,
    pub y: usize,
    pub given: NodeSet,
}

/// Outcome of a ∀-subset dependence scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scan {
    pub separation: Option<Separation>,
    pub truncated: bool,
}

impl Scan {
    pub fn holds(&self) -> bool {
        self.separation.is_none()
    }
}

fn check_distinct(nodes: &[usize], n: usize) -> Result<(), OracleError> {
    for (i, &a) in nodes.iter().enumerate() {
        if a >= n {
            return Err(OracleError::UnknownVariable(a.to_string()));
        }
        if nodes[..i].contains(&a) {
            return Err(OracleError::Overlap);
        }
    }
    Ok(())
}

/// Scans `x ⊥̸ y | S` over every `S ⊆ V \ {x, y}` within budget.
pub fn scan_one<O: IndependenceOracle + ?Sized>(o: &O, x: usize, y: usize, budget: Budget) -> Result<Scan, OracleError> {
    check_distinct(&[x, y], o.num_vars())?;
    let pool = o.variables().without(x).without(y);
    let (sets, truncated) = budget.subsets(pool);
    for s in sets {
        if o.query(x, y, s)? {
            return Ok(Scan { separation: Some(Separation { x, y, given: s }), truncated });
        }
    }
    Ok(Scan { separation: None, truncated })
}

/// Scans the three clause families of a 2-association of `x` to `{y1, y2}`.
pub fn scan_two<O: IndependenceOracle + ?Sized>(o: &O, x: usize, y1: usize, y2: usize, budget: Budget) -> Result<Scan, OracleError> {
    check_distinct(&[x, y1, y2], o.num_vars())?;
    let pool = o.variables().without(x).without(y1).without(y2);
    let (sets, truncated) = budget.subsets(pool);
    for s in sets {
        let clauses = [(x, y1, s.with(y2)), (x, y2, s.with(y1)), (y1, y2, s.with(x))];
        for (a, b, given) in clauses {
            if o.query(a, b, given)? {
                return Ok(Scan { separation: Some(Separation { x: a, y: b, given }), truncated });
            }
        }
    }
    Ok(Scan { separation: None, truncated })
}

pub fn is_one<O: IndependenceOracle + ?Sized>(o: &O, x: usize, y: usize, budget: Budget) -> Result<bool, OracleError> {
    Ok(scan_one(o, x, y, budget)?.holds())
}

pub fn is_two<O: IndependenceOracle + ?Sized>(o: &O, x: usize, y1: usize, y2: usize, budget: Budget) -> Result<bool, OracleError> {
    Ok(scan_two(o, x, y1, y2, budget)?.holds())
}

pub fn is_strict_two<O: IndependenceOracle + ?Sized>(
    o: &O,
    x: usize,
    y1: usize,
    y2: usize,
    budget: Budget,
    reading: StrictReading,
) -> Result<bool, OracleError> {
    if !is_two(o, x, y1, y2, budget)? {
        return Ok(false);
    }
    let (a, b) = (is_one(o, x, y1, budget)?, is_one(o, x, y2, budget)?);
    Ok(match reading {
        StrictReading::Neither => !a && !b,
        StrictReading::AtLeastOne => !(a && b),
    })
}

/// `x` is 1-associated to the single member of `side`, or strictly
/// 2-associated to its two members.
pub fn is_strict_le_two<O: IndependenceOracle + ?Sized>(o: &O, x: usize, side: NodeSet, budget: Budget) -> Result<bool, OracleError> {
    let m = side.to_vec();
    match m.as_slice() {
        [y] => is_one(o, x, *y, budget),
        [y1, y2] => is_strict_two(o, x, *y1, *y2, budget, StrictReading::Neither),
        _ => Ok(false),
    }
}

fn separated_witness<O: IndependenceOracle + ?Sized>(o: &O, scan: &Scan) -> Option<Witness> {
    scan.separation.map(|s| Witness::Separated { statement: CiStatement::new(o, s.x, s.y, s.given, true) })
}

fn labels_of<O: IndependenceOracle + ?Sized>(o: &O, nodes: &[usize]) -> Vec<String> {
    nodes.iter().map(|&i| o.labels()[i].clone()).collect()
}

/// Whether `x` stays dependent on `y` under every conditioning set.
pub fn is_1_associated<O: IndependenceOracle + ?Sized>(o: &O, x: usize, y: usize, budget: Budget) -> Result<AssociationReport, OracleError> {
    let scan = scan_one(o, x, y, budget)?;
    Ok(AssociationReport {
        target: o.labels()[x].clone(),
        partners: labels_of(o, &[y]),
        kind: AssociationKind::One,
        holds: scan.holds(),
        witness: separated_witness(o, &scan),
        truncated: scan.truncated,
    })
}

/// Whether `x` is 2-associated to `{y1, y2}`.
pub fn is_2_associated<O: IndependenceOracle + ?Sized>(
    o: &O,
    x: usize,
    y1: usize,
    y2: usize,
    budget: Budget,
) -> Result<AssociationReport, OracleError> {
    let scan = scan_two(o, x, y1, y2, budget)?;
    Ok(AssociationReport {
        target: o.labels()[x].clone(),
        partners: labels_of(o, &[y1, y2]),
        kind: AssociationKind::Two,
        holds: scan.holds(),
        witness: separated_witness(o, &scan),
        truncated: scan.truncated,
    })
}

/// Whether `x` is strictly 2-associated to `{y1, y2}` under `reading`.
pub fn is_strictly_2_associated<O: IndependenceOracle + ?Sized>(
    o: &O,
    x: usize,
    y1: usize,
    y2: usize,
    budget: Budget,
    reading: StrictReading,
) -> Result<AssociationReport, OracleError> {
    let two = scan_two(o, x, y1, y2, budget)?;
    let mut report = AssociationReport {
        target: o.labels()[x].clone(),
        partners: labels_of(o, &[y1, y2]),
        kind: AssociationKind::StrictTwo,
        holds: false,
        witness: separated_witness(o, &two),
        truncated: two.truncated,
    };
    if !two.holds() {
        return Ok(report);
    }
    let one1 = scan_one(o, x, y1, budget)?;
    let one2 = scan_one(o, x, y2, budget)?;
    report.truncated |= one1.truncated || one2.truncated;
    let blocking = match reading {
        StrictReading::Neither => [(one1, y1), (one2, y2)].into_iter().find(|(s, _)| s.holds()).map(|(_, y)| y),
        StrictReading::AtLeastOne => (one1.holds() && one2.holds()).then_some(y1),
    };
    match blocking {
        Some(y) => report.witness = Some(Witness::OneAssociated { partner: o.labels()[y].clone() }),
        None => {
            report.holds = true;
            report.witness = None;
        }
    }
    Ok(report)
}

/// Every 1-association and strict 2-association of `target`, in index order.
pub fn associations_of<O: IndependenceOracle + ?Sized>(o: &O, target: usize, budget: Budget) -> Result<Vec<AssociationReport>, OracleError> {
    let others = o.variables().without(target).to_vec();
    let mut out = Vec::new();
    for &y in &others {
        let r = is_1_associated(o, target, y, budget)?;
        if r.holds {
            out.push(r);
        }
    }
    for (i, &a) in others.iter().enumerate() {
        for &b in &others[i + 1..] {
            let r = is_strictly_2_associated(o, target, a, b, budget, StrictReading::Neither)?;
            if r.holds {
                out.push(r);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnfaithfulTriple {
    #[serde(skip)]
    pub nodes: [usize; 3],
    pub labels: [String; 3],
    pub minimal: bool,
}

/// Triples that are pairwise marginally independent but whose joint does not
/// factorize, each flagged with whether it is minimal.
///
/// Needs the exact joint table, so only the discrete backend is supported.
pub fn find_unfaithful_triples(o: &Oracle, budget: Budget) -> Result<Vec<UnfaithfulTriple>, OracleError> {
    let joint = o.joint().ok_or(OracleError::Unsupported(o.backend().name()))?;
    let n = o.num_vars();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !o.query(a, b, NodeSet::EMPTY)? {
                continue;
            }
            for c in b + 1..n {
                if !o.query(a, c, NodeSet::EMPTY)? || !o.query(b, c, NodeSet::EMPTY)? {
                    continue;
                }
                let triple = NodeSet::singleton(a).with(b).with(c);
                let m = joint.marginalize(triple)?;
                let singles: Vec<_> = (0..3).map(|k| m.marginalize(NodeSet::singleton(k))).collect::<Result<_, _>>()?;
                let factorizes = m.table().iter().enumerate().all(|(cell, p)| {
                    let s = m.assignment(cell);
                    let prod = &singles[0].table()[s[0]] * &singles[1].table()[s[1]] * &singles[2].table()[s[2]];
                    *p == prod
                });
                if factorizes {
                    continue;
                }
                let minimal = is_minimal_triple(o, [a, b, c], budget)?;
                out.push(UnfaithfulTriple { nodes: [a, b, c], labels: [0, 1, 2].map(|k| o.labels()[[a, b, c][k]].clone()), minimal });
            }
        }
    }
    Ok(out)
}

/// Each pair stays dependent given the third node plus any subset of the rest.
pub fn is_minimal_triple<O: IndependenceOracle + ?Sized>(o: &O, t: [usize; 3], budget: Budget) -> Result<bool, OracleError> {
    let triple = NodeSet::singleton(t[0]).with(t[1]).with(t[2]);
    let (sets, _) = budget.subsets(o.variables().difference(triple));
    for (a, b, c) in [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])] {
        for &s in &sets {
            if o.query(a, b, s.with(c))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The disjunctive reading of "not mutually independent": some member is
/// dependent on the pair formed by the other two.
pub fn not_mutually_independent_disjunction<O: IndependenceOracle + ?Sized>(o: &O, t: [usize; 3]) -> Result<bool, OracleError> {
    for (a, b, c) in [(t[0], t[1], t[2]), (t[1], t[0], t[2]), (t[2], t[0], t[1])] {
        if !o.query_sets(NodeSet::singleton(a), NodeSet::singleton(b).with(c), NodeSet::EMPTY)? {
            return Ok(true);
        }
    }
    Ok(false)
}
