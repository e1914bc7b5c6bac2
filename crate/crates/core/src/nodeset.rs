//! Compact node sets over at most 32 nodes.

use std::fmt;

/// Largest number of nodes a [`NodeSet`] can address.
pub const MAX_NODES: usize = 32;

/// A set of node indices stored as a 32-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NodeSet(u32);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn from_bits(bits: u32) -> Self {
        NodeSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// The set `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_NODES);
        if n == MAX_NODES {
            NodeSet(u32::MAX)
        } else {
            NodeSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_NODES);
        NodeSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_NODES && self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < MAX_NODES);
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        if i < MAX_NODES {
            self.0 &= !(1 << i);
        }
    }

    pub fn with(self, i: usize) -> Self {
        let mut s = self;
        s.insert(i);
        s
    }

    pub fn without(self, i: usize) -> Self {
        let mut s = self;
        s.remove(i);
        s
    }

    pub fn union(self, other: NodeSet) -> Self {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> Self {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> Self {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: NodeSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Smallest element, if any.
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Elements in ascending order.
    pub fn iter(self) -> NodeSetIter {
        NodeSetIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self`, in no particular order.
    pub fn subsets(self) -> impl Iterator<Item = NodeSet> {
        // Standard sub-mask walk; yields the empty set last.
        let full = self.0;
        let mut cur = Some(full);
        std::iter::from_fn(move || {
            let out = cur?;
            cur = if out == 0 { None } else { Some((out - 1) & full) };
            Some(NodeSet(out))
        })
    }

    /// Subsets of `self` with at most `max_size` elements, ordered by size and
    /// then lexicographically by their ascending element lists.
    pub fn subsets_by_size(self, max_size: usize) -> Vec<NodeSet> {
        let elems = self.to_vec();
        let mut out = Vec::new();
        for k in 0..=max_size.min(elems.len()) {
            push_combinations(&elems, k, 0, NodeSet::EMPTY, &mut out);
        }
        out
    }
}

fn push_combinations(elems: &[usize], k: usize, start: usize, acc: NodeSet, out: &mut Vec<NodeSet>) {
    if k == 0 {
        out.push(acc);
        return;
    }
    for i in start..elems.len() {
        if elems.len() - i < k {
            break;
        }
        push_combinations(elems, k - 1, i + 1, acc.with(elems[i]), out);
    }
}

pub struct NodeSetIter(u32);

impl Iterator for NodeSetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = NodeSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl IntoIterator for NodeSet {
    type Item = usize;
    type IntoIter = NodeSetIter;

    fn into_iter(self) -> NodeSetIter {
        self.iter()
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
