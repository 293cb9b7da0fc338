//! The weighted envy graph of an allocation and what it decides.
//!
//! For a fixed allocation, whether a payment vector makes it WEF depends
//! only on the pairwise *envy costs*
//!
//! ```text
//! c[i][j] = v_i(A_j) / w_j - v_i(A_i) / w_i
//! ```
//!
//! because the WEF inequality for `(i, j)` rearranges to the difference
//! constraint `t_i - t_j >= c[i][j]` on the entitlement-scaled payments
//! `t_i = p_i / w_i`. Such a system is satisfiable if and only if the
//! complete digraph with arc weights `c[i][j]` has no directed cycle of
//! strictly positive total weight; this cycle criterion is the feasibility
//! test used throughout the crate (cross-checked against the LP solver in
//! the test suite).
//!
//! When feasible, the pointwise-least nonnegative solution is
//! `L_i = ` the maximum total weight of any path starting at `i` (the empty
//! path counts as 0), computed by longest-path relaxation. The payment
//! vector `s*_i = w_i * L_i` is then the pointwise-minimal WEF subsidy
//! vector, from which several payment objectives have closed forms.

use std::fmt;

use num_traits::Zero;

use crate::model::{Allocation, Instance, ModelError, PaymentVector, Rational};

/// A directed cycle of agents whose envy costs sum to a strictly positive
/// total, certifying that no payment vector can make the allocation WEF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveCycle {
    /// The agents along the cycle; the arc from the last back to the first
    /// closes it. Always at least two agents.
    pub agents: Vec<usize>,
    /// The cycle's total envy cost, strictly positive.
    pub weight: Rational,
}

impl fmt::Display for PositiveCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "positive envy cycle ")?;
        for agent in &self.agents {
            write!(f, "{} -> ", agent)?;
        }
        write!(f, "{} (weight {})", self.agents[0], self.weight)
    }
}

/// Whether some payment vector can make the allocation WEF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible(PositiveCycle),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Errors from the graph-based computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnvyGraphError {
    Model(ModelError),
    /// No payment vector works; carries the certifying cycle.
    Infeasible(PositiveCycle),
}

impl fmt::Display for EnvyGraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvyGraphError::Model(e) => e.fmt(f),
            EnvyGraphError::Infeasible(c) => write!(f, "infeasible: {}", c),
        }
    }
}

impl std::error::Error for EnvyGraphError {}

impl From<ModelError> for EnvyGraphError {
    fn from(e: ModelError) -> Self {
        EnvyGraphError::Model(e)
    }
}

/// The complete digraph of envy costs for one (instance, allocation) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvyGraph {
    costs: Vec<Vec<Rational>>,
}

impl EnvyGraph {
    /// Computes all pairwise envy costs. Diagonal entries are zero.
    pub fn build(instance: &Instance, allocation: &Allocation) -> Result<Self, ModelError> {
        allocation.matches(instance)?;
        let n = instance.num_agents();
        let bundles = allocation.bundles();
        let mut costs = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            let own = instance.bundle_value(i, &bundles[i]).expect("validated indices")
                / instance.weight(i);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let other = instance.bundle_value(i, &bundles[j]).expect("validated indices")
                    / instance.weight(j);
                costs[i][j] = other - &own;
            }
        }
        Ok(EnvyGraph { costs })
    }

    pub fn num_agents(&self) -> usize {
        self.costs.len()
    }

    /// The envy cost `c[i][j]`.
    pub fn cost(&self, i: usize, j: usize) -> &Rational {
        &self.costs[i][j]
    }

    /// Whether `payments` satisfies every difference constraint
    /// `p_i/w_i - p_j/w_j >= c[i][j]`; equivalent to the full WEF check.
    pub fn satisfied_by(&self, weights: &[Rational], payments: &PaymentVector) -> bool {
        let n = self.num_agents();
        assert_eq!(weights.len(), n, "weights for a different agent count");
        assert_eq!(payments.len(), n, "payments for a different agent count");
        let t: Vec<Rational> = (0..n).map(|i| payments.get(i) / &weights[i]).collect();
        for i in 0..n {
            for j in 0..n {
                if i != j && &t[i] - &t[j] < self.costs[i][j] {
                    return false;
                }
            }
        }
        true
    }

    /// Longest path weights `L_i` from every agent (empty path = 0), or the
    /// positive cycle that makes them unbounded.
    ///
    /// Relaxes `L_i = max(0, max_j c[i][j] + L_j)` for `n` rounds with early
    /// exit; an improvement in round `n` proves a positive cycle, which is
    /// recovered by walking the predecessor chain.
    pub fn longest_paths(&self) -> Result<Vec<Rational>, PositiveCycle> {
        let n = self.num_agents();
        let mut dist = vec![Rational::zero(); n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        for round in 0..n {
            let mut last_updated = None;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let candidate = &self.costs[i][j] + &dist[j];
                    if candidate > dist[i] {
                        dist[i] = candidate;
                        pred[i] = Some(j);
                        last_updated = Some(i);
                    }
                }
            }
            match last_updated {
                None => return Ok(dist),
                Some(start) if round == n - 1 => {
                    return Err(self.extract_cycle(start, &pred));
                }
                Some(_) => {}
            }
        }
        Ok(dist)
    }

    /// Recovers a positive cycle from the predecessor chain of a node that
    /// still improved in the final relaxation round.
    fn extract_cycle(&self, start: usize, pred: &[Option<usize>]) -> PositiveCycle {
        let n = self.num_agents();
        // After n steps along predecessors we are inside a cycle.
        let mut v = start;
        for _ in 0..n {
            v = pred[v].expect("improved nodes have predecessors");
        }
        let mut agents = vec![v];
        let mut u = pred[v].expect("improved nodes have predecessors");
        while u != v {
            agents.push(u);
            u = pred[u].expect("improved nodes have predecessors");
        }
        let mut weight = Rational::zero();
        for k in 0..agents.len() {
            weight += &self.costs[agents[k]][agents[(k + 1) % agents.len()]];
        }
        assert!(
            weight > Rational::zero(),
            "predecessor walk produced a non-positive cycle; this is a bug"
        );
        PositiveCycle { agents, weight }
    }

    /// Decides whether any payment vector can make the allocation WEF.
    pub fn feasibility(&self) -> Feasibility {
        match self.longest_paths() {
            Ok(_) => Feasibility::Feasible,
            Err(cycle) => Feasibility::Infeasible(cycle),
        }
    }
}

/// The pointwise-minimal WEF subsidy vector `s*_i = w_i * L_i`: every WEF
/// subsidy vector dominates it coordinatewise, and it is itself WEF and
/// nonnegative. Fails with the certifying cycle when no payment vector
/// works.
pub fn minimal_subsidy(
    instance: &Instance,
    allocation: &Allocation,
) -> Result<PaymentVector, EnvyGraphError> {
    let graph = EnvyGraph::build(instance, allocation)?;
    let dist = graph.longest_paths().map_err(EnvyGraphError::Infeasible)?;
    Ok(PaymentVector::new(
        dist.into_iter().zip(instance.weights()).map(|(l, w)| l * w).collect(),
    ))
}

/// Optimal values with closed forms in terms of the minimal subsidy vector.
///
/// For the subsidy-class objectives, pointwise minimality of `s*` makes the
/// optimum a direct function of `s*`; the balanced-class min-max normalized
/// charge coincides with the total minimal subsidy (the bound-checking and
/// LP test suites verify this equality independently).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedForms {
    /// Smallest possible maximum subsidy, `max_i s*_i`.
    pub p1: Rational,
    /// Smallest possible maximum entitlement-scaled subsidy,
    /// `max_i s*_i / w_i`.
    pub p1w: Rational,
    /// Smallest possible total subsidy, `sum_i s*_i`.
    pub p2: Rational,
    /// Smallest possible maximum normalized charge over balanced vectors,
    /// `min_p max_i (W / w_i) * (-p_i)`; equals `p2`.
    pub p3norm: Rational,
}

/// Computes the closed-form optima for one (instance, allocation) pair.
pub fn opt_closed_forms(
    instance: &Instance,
    allocation: &Allocation,
) -> Result<ClosedForms, EnvyGraphError> {
    let graph = EnvyGraph::build(instance, allocation)?;
    let dist = graph.longest_paths().map_err(EnvyGraphError::Infeasible)?;
    let subsidies: Vec<Rational> =
        dist.iter().zip(instance.weights()).map(|(l, w)| l * w).collect();
    let p1 = subsidies.iter().max().expect("at least one agent").clone();
    let p1w = dist.into_iter().max().expect("at least one agent");
    let p2: Rational = subsidies.iter().sum();
    let p3norm = p2.clone();
    Ok(ClosedForms { p1, p1w, p2, p3norm })
}
