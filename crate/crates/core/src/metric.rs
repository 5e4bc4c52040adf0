//! Distance matrices, the Hausdorff lifting to sets of distributions, the
//! one-step refinement functional, and the fixpoint drivers.
//!
//! The behavioural distance of a model is the least fixpoint of
//!
//! ```text
//! delta(d)(s, t) = gamma * max_a H(lift(d), delta(s,a), delta(t,a))
//! ```
//!
//! where `H` is the two-sided Hausdorff distance between the transition
//! sets. [`delta_core`] computes the undiscounted (`gamma = 1`) functional;
//! each driver applies its own discount once per step:
//!
//! * [`fixpoint_undiscounted`] iterates to exact stabilisation, which is
//!   reached in polynomially many steps because every iterate entry stays
//!   within the model's value set,
//! * [`fixpoint_discounted_approx`] runs the contraction for exactly
//!   `ceil(log eps / log gamma)` steps, giving an `eps`-close matrix,
//! * [`fixpoint_discounted_exact`] tightens the approximation below the
//!   resolution of a caller-supplied denominator bound, rounds every entry
//!   to the smallest-denominator rational nearby, and verifies the result
//!   against the fixpoint equation.

use std::collections::{BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::lifting::lift;
use crate::model::{DistId, Fts, FuzzySubset, StateId};
use crate::rational::{smallest_denominator_in, RationalError, UnitRational};

/// Errors from matrix validation, parsing, and the discounted drivers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("metric syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("metric matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("metric matrix has dimension {dim} but {states} states are listed")]
    DimensionMismatch { states: usize, dim: usize },
    #[error("reflexivity violated: d({state},{state}) must be 0")]
    NonzeroDiagonal { state: usize },
    #[error("symmetry violated: d({s},{t}) differs from d({t},{s})")]
    Asymmetric { s: usize, t: usize },
    #[error(
        "strong triangle inequality violated at ({s},{t},{u}): \
         d({s},{u}) exceeds max(d({s},{t}), d({t},{u}))"
    )]
    TriangleViolation { s: usize, t: usize, u: usize },
    #[error("invalid distance value: {0}")]
    InvalidValue(#[from] RationalError),
    #[error("discount factor must lie strictly between 0 and 1, got {0}")]
    InvalidGamma(String),
    #[error("tolerance must lie strictly between 0 and 1, got {0}")]
    InvalidEpsilon(String),
    #[error("denominator bound must be a positive integer")]
    InvalidDenominatorBound,
    #[error(
        "verification failed: denominator bound {bound} too small, \
         the recovered matrix is not an exact fixpoint"
    )]
    DenominatorBoundTooSmall { bound: u64 },
}

/// A symmetric matrix of unit-interval distances with zero diagonal,
/// satisfying the strong triangle inequality: a candidate
/// pseudo-ultrametric on the state set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    dim: usize,
    entries: Vec<UnitRational>,
}

impl DistanceMatrix {
    /// The all-zeros matrix, the bottom of the pointwise order.
    pub fn bottom(dim: usize) -> Self {
        DistanceMatrix {
            dim,
            entries: vec![UnitRational::zero(); dim * dim],
        }
    }

    /// The discrete metric: 0 on the diagonal, 1 everywhere else.
    pub fn discrete(dim: usize) -> Self {
        let mut m = DistanceMatrix::bottom(dim);
        for s in 0..dim {
            for t in 0..dim {
                if s != t {
                    m.entries[s * dim + t] = UnitRational::one();
                }
            }
        }
        m
    }

    /// Builds a matrix from rows, validating all pseudo-ultrametric axioms.
    pub fn from_rows(rows: Vec<Vec<UnitRational>>) -> Result<Self, MetricError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (row, values) in rows.into_iter().enumerate() {
            if values.len() != dim {
                return Err(MetricError::NotSquare {
                    row,
                    len: values.len(),
                    dim,
                });
            }
            entries.extend(values);
        }
        let m = DistanceMatrix { dim, entries };
        m.validate()?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, s: StateId, t: StateId) -> &UnitRational {
        &self.entries[s.0 * self.dim + t.0]
    }

    /// Sets `d(s,t)` and `d(t,s)` at once.
    pub fn set_symmetric(&mut self, s: StateId, t: StateId, value: UnitRational) {
        self.entries[s.0 * self.dim + t.0] = value.clone();
        self.entries[t.0 * self.dim + s.0] = value;
    }

    /// Checks reflexivity, symmetry, and the strong triangle inequality,
    /// reporting a witness on failure.
    pub fn validate(&self) -> Result<(), MetricError> {
        let n = self.dim;
        for s in 0..n {
            if !self.entries[s * n + s].is_zero() {
                return Err(MetricError::NonzeroDiagonal { state: s });
            }
            for t in (s + 1)..n {
                if self.entries[s * n + t] != self.entries[t * n + s] {
                    return Err(MetricError::Asymmetric { s, t });
                }
            }
        }
        for s in 0..n {
            for t in 0..n {
                for u in 0..n {
                    let d_su = &self.entries[s * n + u];
                    let d_st = &self.entries[s * n + t];
                    let d_tu = &self.entries[t * n + u];
                    if d_su > d_st.max(d_tu) {
                        return Err(MetricError::TriangleViolation { s, t, u });
                    }
                }
            }
        }
        Ok(())
    }

    /// Entrywise product with a factor in `[0, 1]`.
    pub fn scale(&self, factor: &UnitRational) -> DistanceMatrix {
        DistanceMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    /// The infinity-norm distance `max_{s,t} |self(s,t) - other(s,t)|`.
    pub fn max_abs_diff(&self, other: &DistanceMatrix) -> UnitRational {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.abs_diff(b))
            .max()
            .unwrap_or_else(UnitRational::zero)
    }

    /// Entrywise `self <= other`.
    pub fn le_pointwise(&self, other: &DistanceMatrix) -> bool {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }

    /// Parses the JSON metric file `{"states": [...], "matrix": [[...]]}`,
    /// returning the state names alongside the validated matrix.
    pub fn parse_json(text: &str) -> Result<(Vec<String>, DistanceMatrix), MetricError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawMetric {
            states: Vec<String>,
            matrix: Vec<Vec<String>>,
        }
        let raw: RawMetric = serde_json::from_str(text).map_err(|e| MetricError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if raw.matrix.len() != raw.states.len() {
            return Err(MetricError::DimensionMismatch {
                states: raw.states.len(),
                dim: raw.matrix.len(),
            });
        }
        let rows = raw
            .matrix
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|text| text.parse::<UnitRational>().map_err(MetricError::from))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let matrix = DistanceMatrix::from_rows(rows)?;
        Ok((raw.states, matrix))
    }
}

/// Result of a fixpoint computation: the final matrix, the number of
/// functional applications performed, and whether an exact fixpoint was
/// reached (as opposed to an iteration budget running out).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointReport {
    pub distances: DistanceMatrix,
    pub iterations: u64,
    pub converged: bool,
}

/// Distance from the point `x` to the set: the minimum of `dhat(x, y)`
/// over the set, or 1 when the set is empty.
pub fn point_to_set<F>(dhat: F, x: &FuzzySubset, set: &[FuzzySubset]) -> UnitRational
where
    F: Fn(&FuzzySubset, &FuzzySubset) -> UnitRational,
{
    set.iter()
        .map(|y| dhat(x, y))
        .min()
        .unwrap_or_else(UnitRational::one)
}

/// The two-sided Hausdorff distance between two finite sets of
/// distributions under the lifted distance `dhat`; 0 when both are empty.
pub fn hausdorff<F>(dhat: F, ys: &[FuzzySubset], zs: &[FuzzySubset]) -> UnitRational
where
    F: Fn(&FuzzySubset, &FuzzySubset) -> UnitRational,
{
    if ys.is_empty() && zs.is_empty() {
        return UnitRational::zero();
    }
    let forward = ys
        .iter()
        .map(|y| point_to_set(&dhat, y, zs))
        .max()
        .unwrap_or_else(UnitRational::zero);
    let backward = zs
        .iter()
        .map(|z| point_to_set(&dhat, z, ys))
        .max()
        .unwrap_or_else(UnitRational::zero);
    forward.max(backward)
}

/// One application of the undiscounted refinement functional: for each
/// state pair, 1 when the enabled-action sets differ, otherwise the
/// largest Hausdorff distance between the per-label transition sets under
/// the lifting of `d`.
///
/// Lifted distances are computed once per distinct distribution pair,
/// in parallel; the result is symmetric with zero diagonal and satisfies
/// all pseudo-ultrametric axioms whenever `d` does.
pub fn delta_core(m: &Fts, d: &DistanceMatrix) -> DistanceMatrix {
    assert_eq!(m.state_count(), d.dim(), "model/matrix dimension mismatch");
    let n = m.state_count();
    let acts: Vec<Vec<_>> = m.states().map(|s| m.enabled_actions(s)).collect();

    // distinct distribution pairs that need a lifted distance
    let mut needed: BTreeSet<(DistId, DistId)> = BTreeSet::new();
    for s in 0..n {
        for t in (s + 1)..n {
            if acts[s] != acts[t] {
                continue;
            }
            for a in &acts[s] {
                for &i in m.successors(StateId(s), *a) {
                    for &j in m.successors(StateId(t), *a) {
                        if i != j {
                            needed.insert((i.min(j), i.max(j)));
                        }
                    }
                }
            }
        }
    }
    let needed: Vec<(DistId, DistId)> = needed.into_iter().collect();
    let computed: Vec<UnitRational> = needed
        .par_iter()
        .map(|(i, j)| lift(d, m.distribution(*i), m.distribution(*j)))
        .collect();
    let lifts: HashMap<(DistId, DistId), UnitRational> =
        needed.into_iter().zip(computed).collect();
    let zero = UnitRational::zero();
    let lifted = |i: DistId, j: DistId| -> &UnitRational {
        if i == j {
            &zero
        } else {
            &lifts[&(i.min(j), i.max(j))]
        }
    };

    let mut out = DistanceMatrix::bottom(n);
    for s in 0..n {
        for t in (s + 1)..n {
            let value = if acts[s] != acts[t] {
                UnitRational::one()
            } else {
                let mut best = UnitRational::zero();
                for a in &acts[s] {
                    let ys = m.successors(StateId(s), *a);
                    let zs = m.successors(StateId(t), *a);
                    // two-sided Hausdorff over the memoised lifts
                    for &i in ys {
                        let to_zs = zs.iter().map(|&j| lifted(i, j)).min().unwrap();
                        if *to_zs > best {
                            best = to_zs.clone();
                        }
                    }
                    for &j in zs {
                        let to_ys = ys.iter().map(|&i| lifted(i, j)).min().unwrap();
                        if *to_ys > best {
                            best = to_ys.clone();
                        }
                    }
                }
                best
            };
            out.set_symmetric(StateId(s), StateId(t), value);
        }
    }
    debug_assert_eq!(out.validate(), Ok(()));
    out
}

/// Iterates the undiscounted functional from the all-zeros matrix until
/// the matrix stabilises exactly. Every entry of the result lies in the
/// model's value set, which bounds the number of iterations by
/// `|Theta| * |S|^2`.
///
/// # Panics
///
/// Panics when the iteration count exceeds that bound, which would
/// indicate an implementation bug.
pub fn fixpoint_undiscounted(m: &Fts) -> FixpointReport {
    let n = m.state_count() as u64;
    let bound = (m.theta().len() as u64 * n * n).max(1);
    let mut current = DistanceMatrix::bottom(m.state_count());
    let mut iterations = 0u64;
    loop {
        let next = delta_core(m, &current);
        iterations += 1;
        if next == current {
            break;
        }
        current = next;
        assert!(
            iterations <= bound,
            "fixpoint iteration exceeded the |Theta|*|S|^2 bound ({bound})"
        );
    }
    FixpointReport {
        distances: current,
        iterations,
        converged: true,
    }
}

fn check_open_unit(
    value: &UnitRational,
    err: impl Fn(String) -> MetricError,
) -> Result<(), MetricError> {
    if value.is_zero() || value.is_one() {
        return Err(err(value.to_string()));
    }
    Ok(())
}

/// The number of discounted iterations needed to come within `epsilon` of
/// the fixpoint: the smallest `N` with `gamma^N <= epsilon`, i.e.
/// `ceil(log epsilon / log gamma)`, computed exactly.
pub fn discount_steps(
    gamma: &UnitRational,
    epsilon: &UnitRational,
) -> Result<u64, MetricError> {
    check_open_unit(gamma, MetricError::InvalidGamma)?;
    check_open_unit(epsilon, MetricError::InvalidEpsilon)?;
    let mut power = gamma.clone();
    let mut steps = 1u64;
    while &power > epsilon {
        power = &power * gamma;
        steps += 1;
    }
    Ok(steps)
}

/// Runs exactly `steps` iterations of `d <- gamma * delta(d)` from the
/// all-zeros matrix.
pub fn iterate_discounted(
    m: &Fts,
    gamma: &UnitRational,
    steps: u64,
) -> Result<DistanceMatrix, MetricError> {
    check_open_unit(gamma, MetricError::InvalidGamma)?;
    let mut current = DistanceMatrix::bottom(m.state_count());
    for _ in 0..steps {
        current = delta_core(m, &current).scale(gamma);
    }
    Ok(current)
}

/// The discounted approximation driver: performs exactly
/// `N = ceil(log epsilon / log gamma)` iterations of
/// `d <- gamma * delta(d)` from the all-zeros matrix. The result is within
/// `epsilon` of the discounted fixpoint in the infinity norm. `converged`
/// reports whether the final step was already a no-op, i.e. whether the
/// exact fixpoint was reached within the budget.
pub fn fixpoint_discounted_approx(
    m: &Fts,
    gamma: &UnitRational,
    epsilon: &UnitRational,
) -> Result<FixpointReport, MetricError> {
    let steps = discount_steps(gamma, epsilon)?;
    let mut previous = DistanceMatrix::bottom(m.state_count());
    let mut current = previous.clone();
    for _ in 0..steps {
        previous = current;
        current = delta_core(m, &previous).scale(gamma);
    }
    let converged = current == previous;
    Ok(FixpointReport {
        distances: current,
        iterations: steps,
        converged,
    })
}

/// Recovers the exact discounted fixpoint, assuming its entries have
/// denominators at most `denominator_bound`.
///
/// Runs the approximation with `epsilon < 1 / (2 * bound^2)`, narrow
/// enough that each entry's interval contains at most one rational with a
/// denominator within the bound, rounds every entry to the
/// smallest-denominator rational in its interval, and verifies
/// `d = gamma * delta(d)` exactly. A failed verification means the bound
/// was too small.
/// The tolerance used by exact recovery for a given denominator bound:
/// `1 / (2 * bound^2 + 1)`, just below the minimal gap `1 / bound^2`
/// between distinct rationals with denominators within the bound.
pub fn recovery_epsilon(denominator_bound: u64) -> Result<UnitRational, MetricError> {
    if denominator_bound == 0 {
        return Err(MetricError::InvalidDenominatorBound);
    }
    let bound = BigUint::from(denominator_bound);
    let den = 2u32 * &bound * &bound + 1u32;
    Ok(UnitRational::new(BigInt::from(1), BigInt::from(den))
        .expect("epsilon construction cannot fail"))
}

pub fn fixpoint_discounted_exact(
    m: &Fts,
    gamma: &UnitRational,
    denominator_bound: u64,
) -> Result<DistanceMatrix, MetricError> {
    let epsilon = recovery_epsilon(denominator_bound)?;
    let approx = fixpoint_discounted_approx(m, gamma, &epsilon)?;

    let n = m.state_count();
    let mut recovered = DistanceMatrix::bottom(n);
    for s in 0..n {
        for t in (s + 1)..n {
            let value = approx.distances.get(StateId(s), StateId(t));
            let lo = value.saturating_sub(&epsilon);
            let hi = value.saturating_add(&epsilon);
            recovered.set_symmetric(StateId(s), StateId(t), smallest_denominator_in(&lo, &hi));
        }
    }
    let too_small = MetricError::DenominatorBoundTooSmall {
        bound: denominator_bound,
    };
    // a matrix violating the axioms cannot be the fixpoint
    if recovered.validate().is_err() {
        return Err(too_small);
    }
    if delta_core(m, &recovered).scale(gamma) != recovered {
        return Err(too_small);
    }
    Ok(recovered)
}
