//! Brute-force reference implementations.
//!
//! These solve the same problems as the production algorithms by direct
//! enumeration, deliberately sharing none of the candidate-scan machinery.
//! They are exponential and capped to small instances; their purpose is
//! cross-validation in tests and on user models.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bisim::Partition;
use crate::metric::DistanceMatrix;
use crate::model::{Fts, FuzzySubset, StateId};
use crate::rational::UnitRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for brute force: {0}")]
    InstanceTooLarge(String),
}

/// Largest number of coupling variables (support pairs) the grid search
/// will enumerate.
const MAX_COUPLING_VARS: usize = 9;

/// Largest state count for the equivalence-relation enumeration.
const MAX_BISIM_STATES: usize = 6;

/// Solves the lifting program by exhaustive grid search.
///
/// Any feasible coupling can be rounded down entrywise to the grid
/// consisting of 0, the memberships of both distributions, and the
/// distance values: each row and column supremum is attained at an entry
/// equal to one of those constants, so the rounding preserves the
/// constraints and never increases the objective. The minimum over grid
/// assignments therefore equals the continuous optimum.
pub fn lift_bruteforce(
    d: &DistanceMatrix,
    mu: &FuzzySubset,
    eta: &FuzzySubset,
) -> Result<UnitRational, OracleError> {
    if mu.sup() != eta.sup() {
        return Ok(UnitRational::one());
    }
    let rows: Vec<(StateId, UnitRational)> = mu.iter().map(|(s, v)| (s, v.clone())).collect();
    let cols: Vec<(StateId, UnitRational)> = eta.iter().map(|(s, v)| (s, v.clone())).collect();
    if rows.len() * cols.len() > MAX_COUPLING_VARS {
        return Err(OracleError::InstanceTooLarge(format!(
            "{} coupling variables exceed the cap of {MAX_COUPLING_VARS}",
            rows.len() * cols.len()
        )));
    }
    if rows.is_empty() {
        // both distributions are empty: the only coupling is empty, with
        // an empty supremum as objective
        return Ok(UnitRational::zero());
    }

    let mut grid: BTreeSet<UnitRational> = BTreeSet::new();
    grid.insert(UnitRational::zero());
    for (_, v) in rows.iter().chain(cols.iter()) {
        grid.insert(v.clone());
    }
    for s in 0..d.dim() {
        for t in 0..d.dim() {
            grid.insert(d.get(StateId(s), StateId(t)).clone());
        }
    }
    let grid: Vec<UnitRational> = grid.into_iter().collect();

    let col_count = cols.len();
    let var_count = rows.len() * col_count;
    // pair distance and admissible grid values per variable
    let mut distances = Vec::with_capacity(var_count);
    let mut allowed: Vec<Vec<UnitRational>> = Vec::with_capacity(var_count);
    for (s, mu_s) in &rows {
        for (t, eta_t) in &cols {
            let cap = mu_s.min(eta_t);
            allowed.push(grid.iter().filter(|v| *v <= cap).cloned().collect());
            distances.push(d.get(*s, *t).clone());
        }
    }

    struct Search<'a> {
        rows: &'a [(StateId, UnitRational)],
        cols: &'a [(StateId, UnitRational)],
        distances: &'a [UnitRational],
        allowed: &'a [Vec<UnitRational>],
        assignment: Vec<UnitRational>,
        best: Option<UnitRational>,
    }

    impl Search<'_> {
        fn descend(&mut self, var: usize, objective: UnitRational) {
            if let Some(best) = &self.best {
                if &objective >= best {
                    return; // cannot improve on the incumbent
                }
            }
            if var == self.assignment.len() {
                // rows were checked on completion; verify the columns
                let col_count = self.cols.len();
                for (k, (_, eta_t)) in self.cols.iter().enumerate() {
                    let sup = (0..self.rows.len())
                        .map(|r| &self.assignment[r * col_count + k])
                        .max()
                        .unwrap();
                    if sup != eta_t {
                        return;
                    }
                }
                self.best = Some(objective);
                return;
            }
            let col_count = self.cols.len();
            for value in &self.allowed[var] {
                self.assignment[var] = value.clone();
                if (var + 1).is_multiple_of(col_count) {
                    let row = var / col_count;
                    let sup = self.assignment[row * col_count..=var].iter().max().unwrap();
                    if sup != &self.rows[row].1 {
                        continue;
                    }
                }
                let term = value.clone().min(self.distances[var].clone());
                self.descend(var + 1, objective.clone().max(term));
            }
        }
    }

    let mut search = Search {
        rows: &rows,
        cols: &cols,
        distances: &distances,
        allowed: &allowed,
        assignment: vec![UnitRational::zero(); var_count],
        best: None,
    };
    search.descend(0, UnitRational::zero());
    Ok(search
        .best
        .expect("a coupling exists whenever the suprema agree"))
}

/// One refinement step computed entirely from [`lift_bruteforce`] and the
/// two-sided Hausdorff definition.
pub fn delta_bruteforce(m: &Fts, d: &DistanceMatrix) -> Result<DistanceMatrix, OracleError> {
    let n = m.state_count();
    let mut out = DistanceMatrix::bottom(n);
    for s in 0..n {
        for t in (s + 1)..n {
            let (s, t) = (StateId(s), StateId(t));
            let value = if m.enabled_actions(s) != m.enabled_actions(t) {
                UnitRational::one()
            } else {
                let mut best = UnitRational::zero();
                for a in m.enabled_actions(s) {
                    let ys = m.successors(s, a);
                    let zs = m.successors(t, a);
                    for &y in ys {
                        let mut nearest = UnitRational::one();
                        for &z in zs {
                            let v =
                                lift_bruteforce(d, m.distribution(y), m.distribution(z))?;
                            nearest = nearest.min(v);
                        }
                        best = best.max(nearest);
                    }
                    for &z in zs {
                        let mut nearest = UnitRational::one();
                        for &y in ys {
                            let v =
                                lift_bruteforce(d, m.distribution(y), m.distribution(z))?;
                            nearest = nearest.min(v);
                        }
                        best = best.max(nearest);
                    }
                }
                best
            };
            out.set_symmetric(s, t, value);
        }
    }
    Ok(out)
}

/// Iterates `gamma * delta` from the all-zeros matrix at most `iterations`
/// times, stopping early on exact stability (which for `gamma = 1` is the
/// least fixpoint).
pub fn fixpoint_bruteforce(
    m: &Fts,
    gamma: &UnitRational,
    iterations: u64,
) -> Result<DistanceMatrix, OracleError> {
    let mut current = DistanceMatrix::bottom(m.state_count());
    for _ in 0..iterations {
        let next = delta_bruteforce(m, &current)?.scale(gamma);
        if next == current {
            break;
        }
        current = next;
    }
    Ok(current)
}

/// Finds the coarsest bisimulation by enumerating every equivalence
/// relation on the state set, keeping those that are bisimulations, and
/// joining them. The join is checked to be a bisimulation itself.
pub fn bisim_bruteforce(m: &Fts) -> Result<Partition, OracleError> {
    let n = m.state_count();
    if n > MAX_BISIM_STATES {
        return Err(OracleError::InstanceTooLarge(format!(
            "{n} states exceed the cap of {MAX_BISIM_STATES}"
        )));
    }
    if n == 0 {
        return Ok(Partition::trivial(0));
    }

    // all set partitions via restricted growth strings
    let mut assignments: Vec<Vec<usize>> = Vec::new();
    let mut stack = vec![vec![0usize]];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == n {
            assignments.push(prefix);
            continue;
        }
        let max = *prefix.iter().max().unwrap();
        for next in 0..=max + 1 {
            let mut extended = prefix.clone();
            extended.push(next);
            stack.push(extended);
        }
    }

    let mut related = vec![false; n * n];
    for assignment in &assignments {
        let block_count = assignment.iter().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); block_count];
        for (state, block) in assignment.iter().enumerate() {
            blocks[*block].push(StateId(state));
        }
        let part = Partition::from_blocks(n, blocks).expect("growth string is a partition");
        if is_bisimulation(m, &part) {
            for s in 0..n {
                for t in 0..n {
                    if part.same_block(StateId(s), StateId(t)) {
                        related[s * n + t] = true;
                    }
                }
            }
        }
    }

    // the union of all bisimulations, closed transitively
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for s in 0..n {
        for t in 0..n {
            if related[s * n + t] {
                let (a, b) = (find(&mut parent, s), find(&mut parent, t));
                parent[a] = b;
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<StateId>> = Default::default();
    for s in 0..n {
        let root = find(&mut parent, s);
        blocks.entry(root).or_default().push(StateId(s));
    }
    let coarsest = Partition::from_blocks(n, blocks.into_values())
        .expect("union-find classes partition the states");
    assert!(
        is_bisimulation(m, &coarsest),
        "the union of bisimulations must be a bisimulation"
    );
    Ok(coarsest)
}

/// Whether the equivalence induced by `part` is a bisimulation: every
/// transition of `s` is matched by a transition of `t` with the same
/// supremum on every block simultaneously.
fn is_bisimulation(m: &Fts, part: &Partition) -> bool {
    for block in part.blocks() {
        for &s in block {
            for &t in block {
                if s == t {
                    continue;
                }
                for a in m.labels() {
                    for &mu in m.successors(s, a) {
                        let matched = m.successors(t, a).iter().any(|&eta| {
                            part.blocks().iter().all(|c| {
                                m.distribution(mu).sup_over(c.iter().copied())
                                    == m.distribution(eta).sup_over(c.iter().copied())
                            })
                        });
                        if !matched {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::delta_core;
    use crate::model::{FtsBuilder, LabelId};

    const DEMO: &str = r#"{
      "states": ["s1", "s2", "s3", "s4"],
      "labels": ["a"],
      "transitions": [
        {"from": "s1", "label": "a", "distribution": {"s3": "0.9", "s4": "0.8"}},
        {"from": "s2", "label": "a", "distribution": {"s3": "0.6", "s4": "0.9"}},
        {"from": "s3", "label": "a", "distribution": {"s4": "0.9"}}
      ]
    }"#;

    fn ur(num: u64, den: u64) -> UnitRational {
        UnitRational::from_u64(num, den).unwrap()
    }

    fn demo() -> Fts {
        Fts::parse(DEMO).unwrap()
    }

    #[test]
    fn grid_search_reproduces_the_demo_lift() {
        let m = demo();
        let a = LabelId(0);
        let mu = m.distribution(m.successors(StateId(0), a)[0]);
        let eta = m.distribution(m.successors(StateId(1), a)[0]);
        let d = DistanceMatrix::discrete(4);
        assert_eq!(lift_bruteforce(&d, mu, eta).unwrap(), ur(9, 10));
        assert_eq!(
            lift_bruteforce(&d, mu, mu).unwrap(),
            UnitRational::zero()
        );
    }

    #[test]
    fn grid_search_guards_on_sup_mismatch() {
        let d = DistanceMatrix::discrete(2);
        let mu = FuzzySubset::from_entries([(StateId(0), ur(1, 2))]).unwrap();
        let eta = FuzzySubset::from_entries([(StateId(1), ur(3, 4))]).unwrap();
        assert_eq!(lift_bruteforce(&d, &mu, &eta).unwrap(), UnitRational::one());
    }

    #[test]
    fn grid_search_rejects_large_instances() {
        let d = DistanceMatrix::discrete(8);
        let entries: Vec<_> = (0..4).map(|s| (StateId(s), UnitRational::one())).collect();
        let mu = FuzzySubset::from_entries(entries.clone()).unwrap();
        let eta = FuzzySubset::from_entries(
            (4..7)
                .map(|s| (StateId(s), UnitRational::one()))
                .chain([(StateId(0), UnitRational::one())]),
        )
        .unwrap();
        assert!(matches!(
            lift_bruteforce(&d, &mu, &eta),
            Err(OracleError::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn delta_bruteforce_agrees_with_delta_core_on_the_demo() {
        let m = demo();
        let bottom = DistanceMatrix::bottom(4);
        assert_eq!(delta_bruteforce(&m, &bottom).unwrap(), delta_core(&m, &bottom));
    }

    #[test]
    fn trivial_brute_force_fixpoints() {
        let single = Fts::parse(r#"{"states":["x"],"labels":[],"transitions":[]}"#).unwrap();
        assert_eq!(
            delta_bruteforce(&single, &DistanceMatrix::bottom(1)).unwrap(),
            DistanceMatrix::bottom(1)
        );

        let m = demo();
        // zero iterations yield the bottom matrix
        assert_eq!(
            fixpoint_bruteforce(&m, &UnitRational::one(), 0).unwrap(),
            DistanceMatrix::bottom(4)
        );

        let empty = Fts::parse(r#"{"states":["x","y"],"labels":["a"],"transitions":[]}"#).unwrap();
        assert_eq!(
            fixpoint_bruteforce(&empty, &UnitRational::one(), 10).unwrap(),
            DistanceMatrix::bottom(2)
        );
    }

    #[test]
    fn brute_force_fixpoint_matches_the_fast_driver() {
        let m = demo();
        let budget = (m.theta().len() * 16) as u64;
        let slow = fixpoint_bruteforce(&m, &UnitRational::one(), budget).unwrap();
        let fast = crate::metric::fixpoint_undiscounted(&m);
        assert_eq!(slow, fast.distances);
    }

    #[test]
    fn bisim_bruteforce_on_the_demo_is_discrete() {
        assert_eq!(bisim_bruteforce(&demo()).unwrap(), Partition::discrete(4));
    }

    #[test]
    fn bisim_bruteforce_groups_duplicates_and_transitionless_models() {
        let mut b = FtsBuilder::new(["x", "y", "z"], ["a"]).unwrap();
        b.add_transition(StateId(0), LabelId(0), [(StateId(2), ur(1, 2))])
            .unwrap();
        b.add_transition(StateId(1), LabelId(0), [(StateId(2), ur(1, 2))])
            .unwrap();
        let m = b.build();
        let q = bisim_bruteforce(&m).unwrap();
        assert!(q.same_block(StateId(0), StateId(1)));
        assert!(!q.same_block(StateId(0), StateId(2)));

        let empty = Fts::parse(r#"{"states":["x","y"],"labels":["a"],"transitions":[]}"#).unwrap();
        assert_eq!(bisim_bruteforce(&empty).unwrap(), Partition::trivial(2));
    }

    #[test]
    fn bisim_bruteforce_rejects_large_state_sets() {
        let names: Vec<String> = (0..7).map(|i| format!("s{i}")).collect();
        let m = FtsBuilder::new(names, ["a"]).unwrap().build();
        assert!(matches!(
            bisim_bruteforce(&m),
            Err(OracleError::InstanceTooLarge(_))
        ));
    }
}
