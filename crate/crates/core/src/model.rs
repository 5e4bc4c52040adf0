//! The fuzzy transition system model: states, labels, possibility
//! distributions, the JSON file format, and the size measures.
//!
//! A model maps a `(state, label)` pair to a finite *set* of possibility
//! distributions. Distributions are stored with explicit support (zero
//! memberships are rejected, not dropped) and are interned: structurally
//! equal distributions share a [`DistId`], which the distance algorithms
//! use to deduplicate work.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{Literal, RationalError, UnitRational};

/// Dense index of a state; display names live in the owning [`Fts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Dense index of a transition label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelId(pub usize);

/// Index into the interned distribution pool of an [`Fts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DistId(pub usize);

/// Errors raised while parsing or assembling a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("duplicate label name `{0}`")]
    DuplicateLabel(String),
    #[error("membership for state `{state}`: {source}")]
    InvalidMembership {
        state: String,
        source: RationalError,
    },
    #[error("explicit zero membership for state `{0}`: supports are listed without zero entries")]
    ZeroMembership(String),
    #[error("duplicate entry for state `{0}` in a distribution")]
    DuplicateEntry(String),
    #[error("duplicate distribution for state `{from}` under label `{label}`")]
    DuplicateDistribution { from: String, label: String },
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("label index {0} out of range")]
    LabelOutOfRange(usize),
}

/// A possibility distribution: a map from states to strictly positive
/// memberships. Looking up a state outside the support yields 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FuzzySubset {
    memberships: BTreeMap<StateId, UnitRational>,
}

impl FuzzySubset {
    /// The empty fuzzy set (empty support).
    pub fn empty() -> Self {
        FuzzySubset::default()
    }

    /// Builds a distribution from `(state, membership)` entries. Rejects
    /// zero memberships and repeated states.
    pub fn from_entries(
        entries: impl IntoIterator<Item = (StateId, UnitRational)>,
    ) -> Result<Self, ModelError> {
        let mut memberships = BTreeMap::new();
        for (state, value) in entries {
            if value.is_zero() {
                return Err(ModelError::ZeroMembership(format!("#{}", state.0)));
            }
            if memberships.insert(state, value).is_some() {
                return Err(ModelError::DuplicateEntry(format!("#{}", state.0)));
            }
        }
        Ok(FuzzySubset { memberships })
    }

    /// Membership of `state`; 0 when outside the support.
    pub fn get(&self, state: StateId) -> UnitRational {
        self.memberships
            .get(&state)
            .cloned()
            .unwrap_or_else(UnitRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.memberships.keys().copied()
    }

    pub fn support_size(&self) -> usize {
        self.memberships.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memberships.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &UnitRational)> {
        self.memberships.iter().map(|(s, v)| (*s, v))
    }

    /// The supremum over the whole state set (`mu(S)`); 0 for the empty set.
    pub fn sup(&self) -> UnitRational {
        self.memberships
            .values()
            .max()
            .cloned()
            .unwrap_or_else(UnitRational::zero)
    }

    /// The supremum of the memberships over `states` (`mu(U)`); 0 when the
    /// set misses the support entirely.
    pub fn sup_over(&self, states: impl IntoIterator<Item = StateId>) -> UnitRational {
        states
            .into_iter()
            .filter_map(|s| self.memberships.get(&s))
            .max()
            .cloned()
            .unwrap_or_else(UnitRational::zero)
    }
}

/// One parsed transition: the source state, the label, and the
/// distribution both as written (literals) and as an interned value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub label: LabelId,
    entries: Vec<(StateId, Literal)>,
    pub dist: DistId,
}

impl Transition {
    pub fn entries(&self) -> &[(StateId, Literal)] {
        &self.entries
    }

    /// Total encoding size in bits of the distribution's literals as they
    /// were written in the source.
    pub fn literal_bits(&self) -> u64 {
        self.entries.iter().map(|(_, lit)| lit.bit_size()).sum()
    }
}

/// A finite fuzzy transition system.
///
/// Immutable after construction; build one with [`FtsBuilder`] or parse it
/// from JSON with [`Fts::parse`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fts {
    state_names: Vec<String>,
    label_names: Vec<String>,
    transitions: Vec<Transition>,
    dist_pool: Vec<FuzzySubset>,
    delta: BTreeMap<(StateId, LabelId), Vec<DistId>>,
}

impl Fts {
    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn label_count(&self) -> usize {
        self.label_names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.state_names.len()).map(StateId)
    }

    pub fn labels(&self) -> impl Iterator<Item = LabelId> {
        (0..self.label_names.len()).map(LabelId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s.0]
    }

    pub fn label_name(&self, a: LabelId) -> &str {
        &self.label_names[a.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name).map(StateId)
    }

    pub fn label_id(&self, name: &str) -> Option<LabelId> {
        self.label_names.iter().position(|n| n == name).map(LabelId)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// The interned distribution pool; indices are [`DistId`]s.
    pub fn distributions(&self) -> &[FuzzySubset] {
        &self.dist_pool
    }

    pub fn distribution(&self, id: DistId) -> &FuzzySubset {
        &self.dist_pool[id.0]
    }

    /// The set `delta(s, a)` as interned ids; empty when no transition exists.
    pub fn successors(&self, s: StateId, a: LabelId) -> &[DistId] {
        self.delta
            .get(&(s, a))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Labels enabled in `s`: those with a nonempty transition set.
    pub fn enabled_actions(&self, s: StateId) -> Vec<LabelId> {
        self.labels()
            .filter(|a| !self.successors(s, *a).is_empty())
            .collect()
    }

    /// Arithmetic size: `|S|` plus the number of support entries across all
    /// transitions.
    pub fn size_arith(&self) -> u64 {
        self.state_names.len() as u64
            + self
                .transitions
                .iter()
                .map(|t| t.entries.len() as u64)
                .sum::<u64>()
    }

    /// Bit size: `|S|` plus the encoding size of every membership literal
    /// as written in the source.
    pub fn size_bits(&self) -> u64 {
        self.state_names.len() as u64
            + self
                .transitions
                .iter()
                .map(Transition::literal_bits)
                .sum::<u64>()
    }

    /// The ascending set of membership values occurring in the model,
    /// together with 0 and 1.
    pub fn theta(&self) -> Vec<UnitRational> {
        let mut values: BTreeSet<UnitRational> = self
            .dist_pool
            .iter()
            .flat_map(|dist| dist.iter().map(|(_, v)| v.clone()))
            .collect();
        values.insert(UnitRational::zero());
        values.insert(UnitRational::one());
        values.into_iter().collect()
    }

    /// Parses the JSON model format. See the crate README for the schema;
    /// membership values are rational literals (`"p/q"` or `"0.d...d"`).
    pub fn parse(text: &str) -> Result<Fts, ModelError> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut builder = FtsBuilder::new(raw.states, raw.labels)?;
        for t in raw.transitions {
            let from = builder
                .state_id(&t.from)
                .ok_or_else(|| ModelError::UnknownState(t.from.clone()))?;
            let label = builder
                .label_id(&t.label)
                .ok_or_else(|| ModelError::UnknownLabel(t.label.clone()))?;
            let mut entries = Vec::with_capacity(t.distribution.len());
            for (state_name, literal_text) in &t.distribution {
                let state = builder
                    .state_id(state_name)
                    .ok_or_else(|| ModelError::UnknownState(state_name.clone()))?;
                let literal: Literal =
                    literal_text
                        .parse()
                        .map_err(|source| ModelError::InvalidMembership {
                            state: state_name.clone(),
                            source,
                        })?;
                entries.push((state, literal));
            }
            builder.add_transition_literals(from, label, entries)?;
        }
        Ok(builder.build())
    }

    /// Serialises back to the JSON model format. Literal fractions are kept
    /// as written (`8/10` stays `8/10`), so parsing the output reproduces
    /// this value exactly, including the size measures.
    pub fn to_json(&self) -> String {
        let raw = RawModel {
            states: self.state_names.clone(),
            labels: self.label_names.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| RawTransition {
                    from: self.state_name(t.from).to_string(),
                    label: self.label_name(t.label).to_string(),
                    distribution: t
                        .entries
                        .iter()
                        .map(|(s, lit)| (self.state_name(*s).to_string(), lit.to_string()))
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("model serialisation cannot fail")
    }
}

impl fmt::Display for Fts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FTS with {} states, {} labels, {} transitions",
            self.state_count(),
            self.label_count(),
            self.transitions.len()
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    states: Vec<String>,
    labels: Vec<String>,
    transitions: Vec<RawTransition>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    from: String,
    label: String,
    distribution: BTreeMap<String, String>,
}

/// Incremental constructor for [`Fts`] values.
pub struct FtsBuilder {
    state_names: Vec<String>,
    label_names: Vec<String>,
    transitions: Vec<Transition>,
    dist_pool: Vec<FuzzySubset>,
    delta: BTreeMap<(StateId, LabelId), Vec<DistId>>,
}

impl FtsBuilder {
    /// Starts a model over the given state and label names; names must be
    /// unique within their kind.
    pub fn new(
        states: impl IntoIterator<Item = impl Into<String>>,
        labels: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, ModelError> {
        let state_names: Vec<String> = states.into_iter().map(Into::into).collect();
        let label_names: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for name in &state_names {
            if !seen.insert(name) {
                return Err(ModelError::DuplicateState(name.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for name in &label_names {
            if !seen.insert(name) {
                return Err(ModelError::DuplicateLabel(name.clone()));
            }
        }
        Ok(FtsBuilder {
            state_names,
            label_names,
            transitions: Vec::new(),
            dist_pool: Vec::new(),
            delta: BTreeMap::new(),
        })
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name).map(StateId)
    }

    pub fn label_id(&self, name: &str) -> Option<LabelId> {
        self.label_names.iter().position(|n| n == name).map(LabelId)
    }

    /// Adds a transition from already-reduced membership values; the
    /// literal of each entry is the reduced fraction itself.
    pub fn add_transition(
        &mut self,
        from: StateId,
        label: LabelId,
        memberships: impl IntoIterator<Item = (StateId, UnitRational)>,
    ) -> Result<&mut Self, ModelError> {
        let entries = memberships
            .into_iter()
            .map(|(s, v)| {
                let lit = Literal::from_value(&v);
                (s, lit)
            })
            .collect();
        self.add_transition_literals(from, label, entries)
    }

    /// Adds a transition whose memberships are given as literals (possibly
    /// unreduced), preserving them for size measurement and serialisation.
    pub fn add_transition_literals(
        &mut self,
        from: StateId,
        label: LabelId,
        mut entries: Vec<(StateId, Literal)>,
    ) -> Result<&mut Self, ModelError> {
        if from.0 >= self.state_names.len() {
            return Err(ModelError::StateOutOfRange(from.0));
        }
        if label.0 >= self.label_names.len() {
            return Err(ModelError::LabelOutOfRange(label.0));
        }
        entries.sort_by_key(|(s, _)| *s);
        for (state, literal) in &entries {
            if state.0 >= self.state_names.len() {
                return Err(ModelError::StateOutOfRange(state.0));
            }
            if literal.value().is_zero() {
                return Err(ModelError::ZeroMembership(
                    self.state_names[state.0].clone(),
                ));
            }
        }
        let dist = FuzzySubset::from_entries(
            entries.iter().map(|(s, lit)| (*s, lit.value())),
        )
        .map_err(|e| match e {
            ModelError::DuplicateEntry(_) => {
                // report with the display name instead of the raw index
                let dup = entries
                    .windows(2)
                    .find(|w| w[0].0 == w[1].0)
                    .map(|w| self.state_names[w[0].0 .0].clone())
                    .unwrap_or_default();
                ModelError::DuplicateEntry(dup)
            }
            other => other,
        })?;

        let dist_id = match self.dist_pool.iter().position(|d| *d == dist) {
            Some(i) => DistId(i),
            None => {
                self.dist_pool.push(dist);
                DistId(self.dist_pool.len() - 1)
            }
        };
        let cell = self.delta.entry((from, label)).or_default();
        if cell.contains(&dist_id) {
            return Err(ModelError::DuplicateDistribution {
                from: self.state_names[from.0].clone(),
                label: self.label_names[label.0].clone(),
            });
        }
        cell.push(dist_id);
        cell.sort();
        self.transitions.push(Transition {
            from,
            label,
            entries,
            dist: dist_id,
        });
        Ok(self)
    }

    pub fn build(self) -> Fts {
        Fts {
            state_names: self.state_names,
            label_names: self.label_names,
            transitions: self.transitions,
            dist_pool: self.dist_pool,
            delta: self.delta,
        }
    }
}
