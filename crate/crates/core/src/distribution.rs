//! Exact discrete joint distributions.
//!
//! All probabilities are arbitrary-precision rationals. Independence is
//! decided by exact equality, so there is no tolerance anywhere in this module
//! except in [`DiscreteJoint::sample`], which draws floating-point cell weights.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Dag;
use crate::nodeset::NodeSet;

pub type Rational = BigRational;

/// Dense tables are capped at this many cells.
pub const MAX_CELLS: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistributionError {
    #[error("no CPT for variable `{0}`")]
    MissingCpt(String),
    #[error("CPT for `{0}` does not match any graph node or is given twice")]
    ExtraCpt(String),
    #[error("CPT parents of `{0}` do not match the graph")]
    ParentMismatch(String),
    #[error("CPT for `{child}` has {got} rows, expected {expected}")]
    RowCount { child: String, got: usize, expected: usize },
    #[error("CPT row {row} of `{child}` sums to {sum}, not 1")]
    RowNotNormalized { child: String, row: usize, sum: String },
    #[error("CPT rows of `{0}` have inconsistent or zero width")]
    RowWidth(String),
    #[error("negative probability {0}")]
    NegativeProbability(String),
    #[error("table sums to {0}, not 1")]
    NotNormalized(String),
    #[error("table has {got} cells, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("table would need {0} cells; the cap is {MAX_CELLS}")]
    TooManyCells(u128),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("query variables must be distinct and disjoint from the conditioning set")]
    Overlap,
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("cannot parse rational `{0}`")]
    ParseRational(String),
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational, DistributionError> {
    let err = || DistributionError::ParseRational(s.to_string());
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

/// Formats as `"num/den"` in lowest terms, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Shorthand for small rational literals.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    BigRational::new(numer.into(), denom.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub label: String,
    pub cardinality: usize,
}

impl Variable {
    pub fn new(label: impl Into<String>, cardinality: usize) -> Self {
        Variable { label: label.into(), cardinality }
    }
}

/// Conditional probability table of one child given an ordered parent list.
///
/// `rows[k]` is the distribution over the child's states for the `k`-th
/// parent assignment, enumerated with the last parent varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cpt {
    pub child: String,
    pub parents: Vec<String>,
    pub rows: Vec<Vec<Rational>>,
}

impl Cpt {
    pub fn new(child: impl Into<String>, parents: Vec<String>, rows: Vec<Vec<Rational>>) -> Self {
        Cpt { child: child.into(), parents, rows }
    }

    /// A parentless binary variable with `P(child = 1) = p`.
    pub fn coin(child: impl Into<String>, p: Rational) -> Self {
        let q = Rational::one() - &p;
        Cpt::new(child, Vec::new(), vec![vec![q, p]])
    }

    /// A binary child of binary parents, with `P(child = 1 | parents)` given by
    /// `p_one` evaluated on the parent states.
    pub fn binary_fn(child: impl Into<String>, parents: &[&str], p_one: impl Fn(&[usize]) -> Rational) -> Self {
        let k = parents.len();
        let rows = (0..1usize << k)
            .map(|code| {
                let states: Vec<usize> = (0..k).map(|i| (code >> (k - 1 - i)) & 1).collect();
                let p = p_one(&states);
                vec![Rational::one() - &p, p]
            })
            .collect();
        Cpt::new(child, parents.iter().map(|s| s.to_string()).collect(), rows)
    }

    pub fn child_cardinality(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }
}

/// Exact joint probability table over finite-domain variables.
#[derive(Clone, PartialEq, Eq)]
pub struct DiscreteJoint {
    vars: Vec<Variable>,
    table: Vec<Rational>,
}

fn cell_count(vars: &[Variable]) -> Result<usize, DistributionError> {
    let mut n: u128 = 1;
    for v in vars {
        n = n.saturating_mul(v.cardinality as u128);
    }
    if n > MAX_CELLS as u128 {
        return Err(DistributionError::TooManyCells(n));
    }
    Ok(n as usize)
}

impl DiscreteJoint {
    pub fn new(vars: Vec<Variable>, table: Vec<Rational>) -> Result<Self, DistributionError> {
        let expected = cell_count(&vars)?;
        if table.len() != expected {
            return Err(DistributionError::TableSize { got: table.len(), expected });
        }
        if let Some(neg) = table.iter().find(|p| p.is_negative()) {
            return Err(DistributionError::NegativeProbability(format_rational(neg)));
        }
        let total: Rational = table.iter().sum();
        if !total.is_one() {
            return Err(DistributionError::NotNormalized(format_rational(&total)));
        }
        Ok(DiscreteJoint { vars, table })
    }

    /// Product of the CPTs over every full assignment, with variables in the
    /// graph's node order.
    pub fn from_cpts(g: &Dag, cpts: &[Cpt]) -> Result<Self, DistributionError> {
        let n = g.len();
        let mut by_node: Vec<Option<&Cpt>> = vec![None; n];
        for cpt in cpts {
            let i = g
                .index_of(&cpt.child)
                .map_err(|_| DistributionError::ExtraCpt(cpt.child.clone()))?;
            if by_node[i].replace(cpt).is_some() {
                return Err(DistributionError::ExtraCpt(cpt.child.clone()));
            }
        }
        let mut vars = Vec::with_capacity(n);
        let mut parent_idx = Vec::with_capacity(n);
        for i in 0..n {
            let cpt = by_node[i].ok_or_else(|| DistributionError::MissingCpt(g.label(i).to_string()))?;
            let card = cpt.child_cardinality();
            if card == 0 || cpt.rows.iter().any(|r| r.len() != card) {
                return Err(DistributionError::RowWidth(cpt.child.clone()));
            }
            vars.push(Variable::new(g.label(i), card));
            let idx: Vec<usize> = cpt
                .parents
                .iter()
                .map(|p| g.index_of(p).map_err(|_| DistributionError::ParentMismatch(cpt.child.clone())))
                .collect::<Result<_, _>>()?;
            let as_set: NodeSet = idx.iter().copied().collect();
            if as_set != g.parent_set(i) || as_set.len() != idx.len() {
                return Err(DistributionError::ParentMismatch(cpt.child.clone()));
            }
            parent_idx.push(idx);
        }
        for i in 0..n {
            let cpt = by_node[i].expect("checked above");
            let expected: usize = parent_idx[i].iter().map(|&p| vars[p].cardinality).product();
            if cpt.rows.len() != expected {
                return Err(DistributionError::RowCount {
                    child: cpt.child.clone(),
                    got: cpt.rows.len(),
                    expected,
                });
            }
            for (r, row) in cpt.rows.iter().enumerate() {
                if let Some(neg) = row.iter().find(|p| p.is_negative()) {
                    return Err(DistributionError::NegativeProbability(format_rational(neg)));
                }
                let sum: Rational = row.iter().sum();
                if !sum.is_one() {
                    return Err(DistributionError::RowNotNormalized {
                        child: cpt.child.clone(),
                        row: r,
                        sum: format_rational(&sum),
                    });
                }
            }
        }
        let cells = cell_count(&vars)?;
        let mut table = Vec::with_capacity(cells);
        let mut assignment = vec![0usize; n];
        for cell in 0..cells {
            decode_into(&vars, cell, &mut assignment);
            let mut p = Rational::one();
            for i in 0..n {
                let cpt = by_node[i].expect("checked above");
                let mut row = 0;
                for &pa in &parent_idx[i] {
                    row = row * vars[pa].cardinality + assignment[pa];
                }
                let entry = &cpt.rows[row][assignment[i]];
                if entry.is_zero() {
                    p = Rational::zero();
                    break;
                }
                p *= entry;
            }
            table.push(p);
        }
        DiscreteJoint::new(vars, table)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.label.clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize, DistributionError> {
        self.vars
            .iter()
            .position(|v| v.label == label)
            .ok_or_else(|| DistributionError::UnknownVariable(label.to_string()))
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    /// Full assignment of a cell index (last variable fastest).
    pub fn assignment(&self, cell: usize) -> Vec<usize> {
        let mut a = vec![0; self.vars.len()];
        decode_into(&self.vars, cell, &mut a);
        a
    }

    fn check_set(&self, s: NodeSet) -> Result<(), DistributionError> {
        if s.is_subset(NodeSet::full(self.vars.len())) {
            Ok(())
        } else {
            Err(DistributionError::UnknownVariable(format!("{s:?}")))
        }
    }

    /// Probability of a partial assignment given as `(label, state)` pairs.
    pub fn probability(&self, event: &[(&str, usize)]) -> Result<Rational, DistributionError> {
        let fixed: Vec<(usize, usize)> = event
            .iter()
            .map(|&(l, s)| self.index_of(l).map(|i| (i, s)))
            .collect::<Result<_, _>>()?;
        let mut a = vec![0; self.vars.len()];
        let mut total = Rational::zero();
        for (cell, p) in self.table.iter().enumerate() {
            decode_into(&self.vars, cell, &mut a);
            if fixed.iter().all(|&(i, s)| a[i] == s) {
                total += p;
            }
        }
        Ok(total)
    }

    /// Sums out every variable not in `keep`; kept variables retain their order.
    pub fn marginalize(&self, keep: NodeSet) -> Result<DiscreteJoint, DistributionError> {
        self.check_set(keep)?;
        let kept: Vec<usize> = keep.to_vec();
        let vars: Vec<Variable> = kept.iter().map(|&i| self.vars[i].clone()).collect();
        let mut table = vec![Rational::zero(); cell_count(&vars)?];
        let mut a = vec![0; self.vars.len()];
        for (cell, p) in self.table.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            decode_into(&self.vars, cell, &mut a);
            let mut idx = 0;
            for &i in &kept {
                idx = idx * self.vars[i].cardinality + a[i];
            }
            table[idx] += p;
        }
        Ok(DiscreteJoint { vars, table })
    }

    /// `X ⊥ Y | Z` for single variables.
    pub fn is_independent(&self, x: usize, y: usize, s: NodeSet) -> Result<bool, DistributionError> {
        if x == y {
            return Err(DistributionError::Overlap);
        }
        self.is_independent_sets(NodeSet::singleton(x), NodeSet::singleton(y), s)
    }

    /// `Xs ⊥ Ys | Zs`: for every cell, `P(x,y,z)·P(z) = P(x,z)·P(y,z)`.
    ///
    /// Cross-multiplying avoids dividing by `P(z)`; strata of probability zero
    /// satisfy the identity trivially.
    pub fn is_independent_sets(&self, xs: NodeSet, ys: NodeSet, zs: NodeSet) -> Result<bool, DistributionError> {
        self.check_set(xs.union(ys).union(zs))?;
        if xs.is_empty() || ys.is_empty() || !xs.is_disjoint(ys) || !xs.is_disjoint(zs) || !ys.is_disjoint(zs) {
            return Err(DistributionError::Overlap);
        }
        let all = xs.union(ys).union(zs);
        let m = self.marginalize(all)?;
        // Positions of each group inside the marginal.
        let pos: Vec<usize> = all.to_vec();
        let local = |s: NodeSet| -> NodeSet { pos.iter().enumerate().filter(|(_, v)| s.contains(**v)).map(|(k, _)| k).collect() };
        let (lx, ly, lz) = (local(xs), local(ys), local(zs));
        let p_xz = m.marginalize(lx.union(lz))?;
        let p_yz = m.marginalize(ly.union(lz))?;
        let p_z = m.marginalize(lz)?;
        let mut a = vec![0; m.vars.len()];
        for (cell, p_xyz) in m.table.iter().enumerate() {
            decode_into(&m.vars, cell, &mut a);
            let pz = &p_z.table[sub_index(&m.vars, &a, lz)];
            if pz.is_zero() {
                continue;
            }
            let lhs = p_xyz * pz;
            let rhs = &p_xz.table[sub_index(&m.vars, &a, lx.union(lz))] * &p_yz.table[sub_index(&m.vars, &a, ly.union(lz))];
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `n` i.i.d. full assignments drawn with a ChaCha8 stream seeded by `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset, DistributionError> {
        if n == 0 {
            return Err(DistributionError::EmptySample);
        }
        let weights: Vec<f64> = self.table.iter().map(|p| p.to_f64().unwrap_or(0.0)).collect();
        let dist = WeightedIndex::new(&weights).expect("normalized table has positive mass");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..n).map(|_| self.assignment(dist.sample(&mut rng))).collect();
        Ok(Dataset { variables: self.vars.clone(), rows })
    }
}

impl fmt::Debug for DiscreteJoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.vars.iter().map(|v| v.label.as_str()).collect();
        let cells: Vec<String> = self.table.iter().map(format_rational).collect();
        write!(f, "DiscreteJoint({labels:?}: {})", cells.join(" "))
    }
}

fn decode_into(vars: &[Variable], mut cell: usize, out: &mut [usize]) {
    for i in (0..vars.len()).rev() {
        let c = vars[i].cardinality;
        out[i] = cell % c;
        cell /= c;
    }
}

fn sub_index(vars: &[Variable], a: &[usize], s: NodeSet) -> usize {
    let mut idx = 0;
    for i in s {
        idx = idx * vars[i].cardinality + a[i];
    }
    idx
}

/// Discrete observations; `rows[k][i]` is the state of variable `i` in draw `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub variables: Vec<Variable>,
    pub rows: Vec<Vec<usize>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Comma-separated values with a header line of labels.
    pub fn to_csv(&self) -> String {
        let mut out = self.variables.iter().map(|v| v.label.as_str()).collect::<Vec<_>>().join(",");
        out.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|s| s.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}
