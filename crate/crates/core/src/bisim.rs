//! Bisimulation quotients by partition refinement.
//!
//! Two states are bisimilar when every transition of one can be matched by
//! a transition of the other with the *same supremum on every equivalence
//! class simultaneously*. Refinement therefore splits blocks by whole
//! value vectors over the current blocks, not by one scalar per block:
//! per-block scalar splitting cannot tell apart states whose per-class
//! value sets coincide but pair up differently across classes (see
//! `vector_signatures_beat_scalar_splitting` in the tests).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::{Fts, LabelId, StateId};
use crate::rational::UnitRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("blocks do not form a partition of the {0}-element state set")]
    NotAPartition(usize),
}

/// A partition of the state set into disjoint nonempty blocks.
///
/// Canonical form: each block sorted ascending, blocks ordered by their
/// smallest member. Two equal partitions compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<StateId>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// The one-block partition (no blocks when the state set is empty).
    pub fn trivial(states: usize) -> Self {
        if states == 0 {
            return Partition {
                blocks: Vec::new(),
                block_of: Vec::new(),
            };
        }
        Partition {
            blocks: vec![(0..states).map(StateId).collect()],
            block_of: vec![0; states],
        }
    }

    /// The all-singletons partition.
    pub fn discrete(states: usize) -> Self {
        Partition {
            blocks: (0..states).map(|s| vec![StateId(s)]).collect(),
            block_of: (0..states).collect(),
        }
    }

    /// Builds a partition from blocks, validating disjoint coverage and
    /// canonicalising the order.
    pub fn from_blocks(
        states: usize,
        blocks: impl IntoIterator<Item = Vec<StateId>>,
    ) -> Result<Self, PartitionError> {
        let mut blocks: Vec<Vec<StateId>> = blocks.into_iter().collect();
        let mut seen = vec![false; states];
        for block in &mut blocks {
            block.sort();
            if block.is_empty() {
                return Err(PartitionError::NotAPartition(states));
            }
            for s in block.iter() {
                if s.0 >= states || seen[s.0] {
                    return Err(PartitionError::NotAPartition(states));
                }
                seen[s.0] = true;
            }
        }
        if !seen.into_iter().all(|covered| covered) {
            return Err(PartitionError::NotAPartition(states));
        }
        blocks.sort_by_key(|block| block[0]);
        let mut block_of = vec![0; states];
        for (index, block) in blocks.iter().enumerate() {
            for s in block {
                block_of[s.0] = index;
            }
        }
        Ok(Partition { blocks, block_of })
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, s: StateId) -> usize {
        self.block_of[s.0]
    }

    pub fn same_block(&self, s: StateId, t: StateId) -> bool {
        self.block_of[s.0] == self.block_of[t.0]
    }

    /// Whether `self` refines `other`: every block of `self` is contained
    /// in a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.blocks
            .iter()
            .all(|block| block.iter().all(|s| other.same_block(block[0], *s)))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{")?;
            for (j, s) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", s.0)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// The refinement signature of a state: per label, the set of value
/// vectors its transitions induce over the current blocks (in canonical
/// block order). Labels with no transition contribute the empty set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StateSignature {
    per_label: BTreeMap<LabelId, Vec<Vec<UnitRational>>>,
}

/// Computes the signature of `s` with respect to `part`.
pub fn signature(m: &Fts, s: StateId, part: &Partition) -> StateSignature {
    let mut per_label = BTreeMap::new();
    for a in m.labels() {
        let mut vectors: Vec<Vec<UnitRational>> = m
            .successors(s, a)
            .iter()
            .map(|&dist| {
                part.blocks()
                    .iter()
                    .map(|block| m.distribution(dist).sup_over(block.iter().copied()))
                    .collect()
            })
            .collect();
        vectors.sort();
        vectors.dedup();
        per_label.insert(a, vectors);
    }
    StateSignature { per_label }
}

impl StateSignature {
    /// The value-vector set for one label, each vector indexed by block.
    pub fn vectors(&self, label: LabelId) -> &[Vec<UnitRational>] {
        self.per_label
            .get(&label)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }
}

/// Splits every block of `part` into maximal groups of states with equal
/// signatures. The result refines `part` and never merges blocks.
pub fn refine_once(m: &Fts, part: &Partition) -> Partition {
    let mut new_blocks = Vec::new();
    for block in part.blocks() {
        let mut groups: BTreeMap<StateSignature, Vec<StateId>> = BTreeMap::new();
        for &s in block {
            groups.entry(signature(m, s, part)).or_default().push(s);
        }
        new_blocks.extend(groups.into_values());
    }
    Partition::from_blocks(m.state_count(), new_blocks)
        .expect("splitting a partition yields a partition")
}

/// The bisimulation quotient: refines the one-block partition until
/// stable. Terminates within `|S| - 1` refining passes since every
/// non-final pass increases the block count.
pub fn quotient(m: &Fts) -> Partition {
    let mut part = Partition::trivial(m.state_count());
    loop {
        let next = refine_once(m, &part);
        if next == part {
            return part;
        }
        part = next;
    }
}

/// Whether `s` and `t` are bisimilar, i.e. share a block of the quotient.
pub fn bisimilar(m: &Fts, s: StateId, t: StateId) -> bool {
    quotient(m).same_block(s, t)
}
