//! Lifting a state distance to a distance between possibility
//! distributions.
//!
//! For a pseudo-ultrametric `d` on states, the lifted distance between two
//! distributions `mu` and `eta` with equal suprema is the optimum of the
//! max-min program
//!
//! ```text
//! minimise   max_{s,t} min(d(s,t), x_st)
//! subject to max_t x_st = mu(s)   for all s
//!            max_s x_st = eta(t)  for all t
//!            x_st >= 0
//! ```
//!
//! (distributions with different suprema are at distance 1).
//!
//! The optimum always lies in the finite candidate set consisting of 0, the
//! memberships of `mu` and `eta`, and the distances between their support
//! states. For a fixed candidate `c`, the constraint "objective <= c"
//! reduces to the upper bounds `x_st <= c` for every pair with
//! `d(s,t) > c`: pairs at distance `<= c` can never push a min-term above
//! `c`, however large their coupling value. A sup-equation system with
//! upper bounds is feasible exactly when its canonical valuation (each
//! variable at the minimum right-hand side over the constraints
//! mentioning it) satisfies every equation, so each candidate is decided
//! by one linear pass and [`lift`] returns the first feasible candidate
//! in ascending order.

use std::collections::BTreeSet;
use std::fmt;

use crate::metric::DistanceMatrix;
use crate::model::{FuzzySubset, StateId};
use crate::rational::UnitRational;

/// Dense index of a coupling variable within an [`EquationSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// How a sup-constraint binds: as an equation (`sup of the variables equals
/// the right-hand side`) or as an upper bound (`sup <= rhs`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    Equation,
    UpperBound,
}

/// One sup-constraint over a set of variables. The supremum of an empty
/// variable set is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupConstraint {
    pub vars: Vec<VarId>,
    pub rhs: UnitRational,
    pub kind: ConstraintKind,
}

/// A conjunction of sup-constraints over coupling variables indexed by
/// ordered state pairs.
#[derive(Debug, Clone, Default)]
pub struct EquationSystem {
    pairs: Vec<(StateId, StateId)>,
    constraints: Vec<SupConstraint>,
}

impl EquationSystem {
    pub fn new() -> Self {
        EquationSystem::default()
    }

    /// Registers a coupling variable for the pair `(s, t)`.
    pub fn add_variable(&mut self, s: StateId, t: StateId) -> VarId {
        self.pairs.push((s, t));
        VarId(self.pairs.len() - 1)
    }

    pub fn add_equation(&mut self, vars: Vec<VarId>, rhs: UnitRational) {
        self.constraints.push(SupConstraint {
            vars,
            rhs,
            kind: ConstraintKind::Equation,
        });
    }

    pub fn add_upper_bound(&mut self, vars: Vec<VarId>, rhs: UnitRational) {
        self.constraints.push(SupConstraint {
            vars,
            rhs,
            kind: ConstraintKind::UpperBound,
        });
    }

    /// The ordered state pair a variable stands for.
    pub fn variables(&self) -> &[(StateId, StateId)] {
        &self.pairs
    }

    pub fn var_of(&self, s: StateId, t: StateId) -> Option<VarId> {
        self.pairs.iter().position(|p| *p == (s, t)).map(VarId)
    }

    pub fn constraints(&self) -> &[SupConstraint] {
        &self.constraints
    }

    /// The greatest assignment respecting all right-hand sides: every
    /// variable at the minimum rhs over the constraints that mention it
    /// (1 for a variable mentioned nowhere).
    pub fn canonical_valuation(&self) -> Valuation {
        let mut values = vec![UnitRational::one(); self.pairs.len()];
        for constraint in &self.constraints {
            for var in &constraint.vars {
                if constraint.rhs < values[var.0] {
                    values[var.0] = constraint.rhs.clone();
                }
            }
        }
        Valuation { values }
    }

    /// Whether the canonical valuation satisfies the whole system. Since
    /// the canonical valuation dominates every solution, this decides
    /// feasibility.
    pub fn is_feasible(&self) -> bool {
        let valuation = self.canonical_valuation();
        self.constraints.iter().all(|constraint| {
            let sup = constraint
                .vars
                .iter()
                .map(|v| &valuation.values[v.0])
                .max();
            let zero = UnitRational::zero();
            let sup = sup.unwrap_or(&zero);
            match constraint.kind {
                ConstraintKind::Equation => *sup == constraint.rhs,
                ConstraintKind::UpperBound => *sup <= constraint.rhs,
            }
        })
    }
}

/// A total assignment of the variables of an [`EquationSystem`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    values: Vec<UnitRational>,
}

impl Valuation {
    pub fn get(&self, var: VarId) -> &UnitRational {
        &self.values[var.0]
    }

    pub fn values(&self) -> &[UnitRational] {
        &self.values
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Builds the feasibility system for the candidate objective value `c`:
/// one row equation per state (`sup_t x_st = mu(s)`), one column equation
/// per state (`sup_s x_st = eta(t)`), and the objective bound
/// `x_st <= c` over the pairs with `d(s,t) > c`.
///
/// Pairs whose row and column right-hand sides are both zero are omitted;
/// they are forced to zero and contribute nothing to any supremum.
pub fn build_system(
    d: &DistanceMatrix,
    mu: &FuzzySubset,
    eta: &FuzzySubset,
    c: &UnitRational,
) -> EquationSystem {
    let n = d.dim();
    let mut sys = EquationSystem::new();
    let mut row_vars: Vec<Vec<VarId>> = vec![Vec::new(); n];
    let mut col_vars: Vec<Vec<VarId>> = vec![Vec::new(); n];
    let mut bounded = Vec::new();
    for s in 0..n {
        let (s, mu_s) = (StateId(s), mu.get(StateId(s)));
        for t in 0..n {
            let (t, eta_t) = (StateId(t), eta.get(StateId(t)));
            if mu_s.is_zero() && eta_t.is_zero() {
                continue;
            }
            let var = sys.add_variable(s, t);
            row_vars[s.0].push(var);
            col_vars[t.0].push(var);
            if d.get(s, t) > c {
                bounded.push(var);
            }
        }
    }
    sys.add_upper_bound(bounded, c.clone());
    for (s, vars) in row_vars.into_iter().enumerate() {
        sys.add_equation(vars, mu.get(StateId(s)));
    }
    for (t, vars) in col_vars.into_iter().enumerate() {
        sys.add_equation(vars, eta.get(StateId(t)));
    }
    sys
}

/// The lifted distance between two distributions under the state distance
/// `d` (which must be a pseudo-ultrametric over the same state space).
///
/// Returns 1 outright when the suprema of `mu` and `eta` differ; otherwise
/// scans the candidate values in ascending order and returns the first
/// feasible one, which is the optimum of the max-min program.
pub fn lift(d: &DistanceMatrix, mu: &FuzzySubset, eta: &FuzzySubset) -> UnitRational {
    if mu.sup() != eta.sup() {
        return UnitRational::one();
    }
    if mu == eta {
        // the identity coupling achieves objective 0
        return UnitRational::zero();
    }
    let mut candidates: BTreeSet<UnitRational> = BTreeSet::new();
    candidates.insert(UnitRational::zero());
    for (_, v) in mu.iter() {
        candidates.insert(v.clone());
    }
    for (_, v) in eta.iter() {
        candidates.insert(v.clone());
    }
    for (s, _) in mu.iter() {
        for (t, _) in eta.iter() {
            candidates.insert(d.get(s, t).clone());
        }
    }
    for c in &candidates {
        if feasible_at(d, mu, eta, c) {
            return c.clone();
        }
    }
    unreachable!("the largest candidate is feasible whenever the suprema agree");
}

/// Decides feasibility of the candidate `c` directly on the supports,
/// without materialising an [`EquationSystem`]. Equivalent to
/// `build_system(d, mu, eta, c).is_feasible()`; this is the hot path of
/// the fixpoint iteration.
fn feasible_at(d: &DistanceMatrix, mu: &FuzzySubset, eta: &FuzzySubset, c: &UnitRational) -> bool {
    // canonical value of x_st: min(mu(s), eta(t), c if d(s,t) > c)
    let eta_entries: Vec<(StateId, &UnitRational)> = eta.iter().collect();
    let mut col_attained = vec![false; eta_entries.len()];
    for (s, mu_s) in mu.iter() {
        let mut row_attained = false;
        for (k, (t, eta_t)) in eta_entries.iter().enumerate() {
            let mut x = if mu_s <= *eta_t { mu_s } else { *eta_t };
            if d.get(s, *t) > c && c < x {
                x = c;
            }
            row_attained |= x == mu_s;
            col_attained[k] |= x == *eta_t;
        }
        if !row_attained {
            return false;
        }
    }
    col_attained.into_iter().all(|attained| attained)
}
