//! Markov blanket recovery by Grow-Shrink, with the pair-conditioning grow
//! clause that picks up strictly 2-associated partners.

use serde::{Deserialize, Serialize};

use crate::association::Budget;
use crate::nodeset::NodeSet;
use crate::oracle::{IndependenceOracle, OracleError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Grow also adds `X` when `T` depends on `X` given `S ∪ {Z}`.
    #[default]
    Modified,
    /// Plain grow: singleton clause only.
    Classic,
}

/// Where the pair partner `Z` may come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairRange {
    /// `Z` outside `S ∪ {T, X}`.
    #[default]
    Outside,
    /// `Z` anywhere except `T` and `X`. Partners already in `S` repeat the
    /// singleton query, so the fixpoint is unchanged.
    Anywhere,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GsConfig {
    pub mode: Mode,
    /// Caps the conditioning-set size of grow queries; larger ones are skipped.
    pub budget: Budget,
    /// Candidate scan order; defaults to ascending index.
    pub order: Option<Vec<usize>>,
    pub pair_range: PairRange,
}

impl GsConfig {
    pub fn new(mode: Mode) -> Self {
        GsConfig { mode, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Grow,
    Shrink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Add,
    Remove,
    Keep,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub phase: Phase,
    pub candidate: String,
    pub partner: Option<String>,
    pub conditioning: Vec<String>,
    pub independent: bool,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GsTrace {
    pub target: String,
    pub entries: Vec<TraceEntry>,
    pub truncated: bool,
}

impl GsTrace {
    /// Re-asks every logged query; `Ok(true)` iff all answers match.
    pub fn replay<O: IndependenceOracle + ?Sized>(&self, o: &O) -> Result<bool, OracleError> {
        let t = o.index_of(&self.target)?;
        for e in &self.entries {
            let x = o.index_of(&e.candidate)?;
            let s = e.conditioning.iter().map(|l| o.index_of(l)).collect::<Result<NodeSet, _>>()?;
            if o.query(t, x, s)? != e.independent {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

struct Run<'a, O: ?Sized> {
    o: &'a O,
    t: usize,
    trace: GsTrace,
}

impl<O: IndependenceOracle + ?Sized> Run<'_, O> {
    fn ask(&mut self, phase: Phase, x: usize, partner: Option<usize>, s: NodeSet, dependent_action: Action, independent_action: Action) -> Result<bool, OracleError> {
        let independent = self.o.query(self.t, x, s)?;
        let l = self.o.labels();
        self.trace.entries.push(TraceEntry {
            phase,
            candidate: l[x].clone(),
            partner: partner.map(|z| l[z].clone()),
            conditioning: s.iter().map(|i| l[i].clone()).collect(),
            independent,
            action: if independent { independent_action } else { dependent_action },
        });
        Ok(independent)
    }

    fn grow(&mut self, vars: NodeSet, order: &[usize], cfg: &GsConfig) -> Result<NodeSet, OracleError> {
        let cap = cfg.budget.max_size.unwrap_or(usize::MAX);
        let mut s = NodeSet::EMPTY;
        'pass: loop {
            let outside: Vec<usize> = order.iter().copied().filter(|&v| vars.contains(v) && v != self.t && !s.contains(v)).collect();
            for &x in &outside {
                if s.len() > cap {
                    self.trace.truncated = true;
                    break;
                }
                if !self.ask(Phase::Grow, x, None, s, Action::Add, Action::Skip)? {
                    s.insert(x);
                    continue 'pass;
                }
            }
            if cfg.mode == Mode::Classic {
                break;
            }
            let partners: Vec<usize> = match cfg.pair_range {
                PairRange::Outside => outside.clone(),
                PairRange::Anywhere => order.iter().copied().filter(|&v| vars.contains(v) && v != self.t).collect(),
            };
            for &x in &outside {
                for &z in &partners {
                    if z == x {
                        continue;
                    }
                    let cond = s.with(z);
                    if cond.len() > cap {
                        self.trace.truncated = true;
                        continue;
                    }
                    if !self.ask(Phase::Grow, x, Some(z), cond, Action::Add, Action::Skip)? {
                        s.insert(x);
                        continue 'pass;
                    }
                }
            }
            break;
        }
        Ok(s)
    }

    fn shrink(&mut self, mut s: NodeSet, order: &[usize]) -> Result<NodeSet, OracleError> {
        'pass: loop {
            for &x in order.iter().filter(|&&v| s.contains(v)) {
                if self.ask(Phase::Shrink, x, None, s.without(x), Action::Keep, Action::Remove)? {
                    s.remove(x);
                    continue 'pass;
                }
            }
            return Ok(s);
        }
    }
}

fn scan_order<O: IndependenceOracle + ?Sized>(o: &O, cfg: &GsConfig) -> Result<Vec<usize>, OracleError> {
    let n = o.num_vars();
    match &cfg.order {
        None => Ok((0..n).collect()),
        Some(ord) => {
            let set: NodeSet = ord.iter().copied().collect();
            if ord.len() != n || set != NodeSet::full(n) {
                return Err(OracleError::InvalidConfig("scan order must be a permutation of all variables".into()));
            }
            Ok(ord.clone())
        }
    }
}

fn check_target<O: IndependenceOracle + ?Sized>(o: &O, t: usize, vars: NodeSet) -> Result<(), OracleError> {
    if t >= o.num_vars() || !vars.contains(t) || !vars.is_subset(o.variables()) {
        return Err(OracleError::InvalidConfig("target must belong to the variable set".into()));
    }
    Ok(())
}

/// Grow phase only.
pub fn grow<O: IndependenceOracle + ?Sized>(o: &O, t: usize, vars: NodeSet, cfg: &GsConfig) -> Result<(NodeSet, GsTrace), OracleError> {
    check_target(o, t, vars)?;
    let order = scan_order(o, cfg)?;
    let mut run = Run { o, t, trace: GsTrace { target: o.labels()[t].clone(), ..Default::default() } };
    let s = run.grow(vars, &order, cfg)?;
    Ok((s, run.trace))
}

/// Shrink phase only: removes any `X` with `T ⊥ X | S \ {X}` until none is left.
pub fn shrink<O: IndependenceOracle + ?Sized>(o: &O, t: usize, s: NodeSet) -> Result<(NodeSet, GsTrace), OracleError> {
    if t >= o.num_vars() || s.contains(t) || !s.is_subset(o.variables()) {
        return Err(OracleError::InvalidConfig("shrink set must exclude the target".into()));
    }
    let order: Vec<usize> = (0..o.num_vars()).collect();
    let mut run = Run { o, t, trace: GsTrace { target: o.labels()[t].clone(), ..Default::default() } };
    let s = run.shrink(s, &order)?;
    Ok((s, run.trace))
}

/// Grow followed by shrink, with the full query trace.
pub fn markov_blanket<O: IndependenceOracle + ?Sized>(o: &O, t: usize, vars: NodeSet, cfg: &GsConfig) -> Result<(NodeSet, GsTrace), OracleError> {
    check_target(o, t, vars)?;
    let order = scan_order(o, cfg)?;
    let mut run = Run { o, t, trace: GsTrace { target: o.labels()[t].clone(), ..Default::default() } };
    let grown = run.grow(vars, &order, cfg)?;
    let s = run.shrink(grown, &order)?;
    Ok((s, run.trace))
}
