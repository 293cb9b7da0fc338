//! Named instance families with known exact optima, plus a seeded random
//! generator for cross-checking the closed-form and LP routes.
//!
//! Each family constructor returns a [`Fixture`]: an instance, a
//! designated allocation, and the expectations that provably hold for it.
//! The deterministic families are extremal cases — they attain the provable
//! bounds with equality — so they double as regression anchors for the
//! optimizers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::envy_graph::EnvyGraph;
use crate::model::{Allocation, Instance, ModelError, Rational};
use crate::optimize::ObjectiveKind;

/// A value the optimizers must reproduce on a fixture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    /// The optimum on the designated allocation equals the value.
    Opt(ObjectiveKind, Rational),
    /// The exhaustive-search optimum over all allocations equals the value.
    SearchMin(ObjectiveKind, Rational),
    /// The exhaustive-search optimum is at least the value.
    SearchMinAtLeast(ObjectiveKind, Rational),
}

impl Expectation {
    /// Stable string key, e.g. `"P2"`, `"search_min_P1"`,
    /// `"search_min_P1_at_least"`; used by the instance-file format.
    pub fn key(&self) -> String {
        match self {
            Expectation::Opt(o, _) => o.name().to_string(),
            Expectation::SearchMin(o, _) => format!("search_min_{}", o),
            Expectation::SearchMinAtLeast(o, _) => format!("search_min_{}_at_least", o),
        }
    }

    pub fn value(&self) -> &Rational {
        match self {
            Expectation::Opt(_, v)
            | Expectation::SearchMin(_, v)
            | Expectation::SearchMinAtLeast(_, v) => v,
        }
    }
}

/// An instance, a designated allocation, and what must hold for them.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub label: String,
    pub instance: Instance,
    pub allocation: Allocation,
    pub expectations: Vec<Expectation>,
}

/// Errors from fixture construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixtureError {
    TooFewAgents { minimum: usize, got: usize },
    AgentCountNotEven { got: usize },
    /// The amount parameter must be positive.
    NonPositiveAmount,
    /// Random generation is capped at 6 agents and 8 items.
    RandomGuard { num_agents: usize, num_items: usize },
    /// No feasible allocation was drawn within the attempt budget.
    NoFeasibleDraw { attempts: u32 },
    Model(ModelError),
}

impl fmt::Display for FixtureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureError::TooFewAgents { minimum, got } => {
                write!(f, "family needs at least {} agents, got {}", minimum, got)
            }
            FixtureError::AgentCountNotEven { got } => {
                write!(f, "family needs an even number of agents, got {}", got)
            }
            FixtureError::NonPositiveAmount => write!(f, "amount parameter must be positive"),
            FixtureError::RandomGuard { num_agents, num_items } => write!(
                f,
                "random generation is capped at 6 agents and 8 items, got {} and {}",
                num_agents, num_items
            ),
            FixtureError::NoFeasibleDraw { attempts } => {
                write!(f, "no feasible allocation drawn in {} attempts", attempts)
            }
            FixtureError::Model(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for FixtureError {}

impl From<ModelError> for FixtureError {
    fn from(e: ModelError) -> Self {
        FixtureError::Model(e)
    }
}

fn rat_usize(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn require_amount(amount: &Rational) -> Result<(), FixtureError> {
    if amount.is_positive() {
        Ok(())
    } else {
        Err(FixtureError::NonPositiveAmount)
    }
}

fn require_agents(minimum: usize, got: usize) -> Result<(), FixtureError> {
    if got >= minimum {
        Ok(())
    } else {
        Err(FixtureError::TooFewAgents { minimum, got })
    }
}

/// Two unit-entitlement agents and one item they value 20 and 30. The item
/// must go to agent 1; the minimal subsidy is (20, 0) and the best
/// balanced vector is (10, -10).
pub fn two_agent_transfer() -> Fixture {
    let instance = Instance::new(
        vec![rat_usize(1); 2],
        vec![vec![rat_usize(20)], vec![rat_usize(30)]],
    )
    .expect("valid by construction");
    let allocation = Allocation::new(vec![1], 2).expect("valid by construction");
    let twenty = rat_usize(20);
    Fixture {
        label: "two-agent-transfer".to_string(),
        instance,
        allocation,
        expectations: vec![
            Expectation::Opt(ObjectiveKind::P1, twenty.clone()),
            Expectation::Opt(ObjectiveKind::P2, twenty.clone()),
            Expectation::Opt(ObjectiveKind::P3max, rat_usize(10)),
            Expectation::SearchMin(ObjectiveKind::P2, twenty),
        ],
    }
}

/// One item that all `n` unit-entitlement agents value `amount`, given to
/// agent 0. Everyone else needs subsidy `amount`, so the total subsidy is
/// `(n - 1) * amount` — the worst possible relative to the max subsidy.
pub fn single_prize(n: usize, amount: &Rational) -> Result<Fixture, FixtureError> {
    require_agents(2, n)?;
    require_amount(amount)?;
    let instance = Instance::new(vec![rat_usize(1); n], vec![vec![amount.clone()]; n])?;
    let allocation = Allocation::new(vec![0], n)?;
    let n_minus_1 = rat_usize(n - 1);
    Ok(Fixture {
        label: format!("single-prize(n={}, T={})", n, amount),
        instance,
        allocation,
        expectations: vec![
            Expectation::Opt(ObjectiveKind::P1, amount.clone()),
            Expectation::Opt(ObjectiveKind::P1w, amount.clone()),
            Expectation::Opt(ObjectiveKind::P2, &n_minus_1 * amount),
            Expectation::Opt(ObjectiveKind::P3max, &n_minus_1 * amount / rat_usize(n)),
        ],
    })
}

/// One item of value `w_min * amount`, common to all agents, given to the
/// (first) smallest-entitlement agent. Each other agent `i` needs subsidy
/// `w_i * amount`, so the total is `(W - w_min) * amount` while the largest
/// entitlement-scaled subsidy stays `amount`.
pub fn weighted_prize(weights: &[Rational], amount: &Rational) -> Result<Fixture, FixtureError> {
    require_agents(2, weights.len())?;
    require_amount(amount)?;
    let n = weights.len();
    let w_min = weights.iter().min().expect("at least one agent").clone();
    let owner = weights.iter().position(|w| w == &w_min).expect("minimum is present");
    let value = &w_min * amount;
    let instance = Instance::new(weights.to_vec(), vec![vec![value]; n])?;
    let allocation = Allocation::new(vec![owner], n)?;
    let total_weight = instance.total_weight().clone();
    let weight_text: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
    Ok(Fixture {
        label: format!("weighted-prize(w=[{}], T={})", weight_text.join(","), amount),
        instance,
        allocation,
        expectations: vec![
            Expectation::Opt(ObjectiveKind::P1w, amount.clone()),
            Expectation::Opt(ObjectiveKind::P2, (total_weight - w_min) * amount),
        ],
    })
}

/// `n - 1` identical items of value `(n - 1) * amount` among `n`
/// unit-entitlement agents, item k to agent k. Exactly one agent misses
/// out under every allocation, so even exhaustive search cannot push the
/// max subsidy below `(n - 1) * amount`.
pub fn missing_one(n: usize, amount: &Rational) -> Result<Fixture, FixtureError> {
    require_agents(2, n)?;
    require_amount(amount)?;
    let value = rat_usize(n - 1) * amount;
    let instance = Instance::new(vec![rat_usize(1); n], vec![vec![value.clone(); n - 1]; n])?;
    let allocation = Allocation::new((0..n - 1).collect(), n)?;
    Ok(Fixture {
        label: format!("missing-one(n={}, T={})", n, amount),
        instance,
        allocation,
        expectations: vec![
            Expectation::Opt(ObjectiveKind::P1, value.clone()),
            Expectation::Opt(ObjectiveKind::P2, value.clone()),
            Expectation::Opt(ObjectiveKind::P3max, &value / rat_usize(n)),
            Expectation::SearchMin(ObjectiveKind::P1, value),
        ],
    })
}

/// `n / 2` identical items of value `amount` among an even number of
/// unit-entitlement agents, item k to agent k. Half the agents pay half a
/// prize each, so the minimal total charge is `n * amount / 4` — tight for
/// the equal-entitlement total-charge bound.
pub fn half_prizes(n: usize, amount: &Rational) -> Result<Fixture, FixtureError> {
    require_agents(2, n)?;
    if !n.is_multiple_of(2) {
        return Err(FixtureError::AgentCountNotEven { got: n });
    }
    require_amount(amount)?;
    let instance = Instance::new(vec![rat_usize(1); n], vec![vec![amount.clone(); n / 2]; n])?;
    let allocation = Allocation::new((0..n / 2).collect(), n)?;
    Ok(Fixture {
        label: format!("half-prizes(n={}, T={})", n, amount),
        instance,
        allocation,
        expectations: vec![
            Expectation::Opt(ObjectiveKind::P1, amount.clone()),
            Expectation::Opt(ObjectiveKind::P2, rat_usize(n) * amount / rat_usize(2)),
            Expectation::Opt(ObjectiveKind::P4, rat_usize(n) * amount / rat_usize(4)),
        ],
    })
}

/// `n - 1` identical items of value `amount * n^2 / (4 (n - 1))` among `n`
/// unit-entitlement agents, item k to agent k. The minimal total charge is
/// `n * amount / 4`, yet every allocation leaves some agent needing a
/// subsidy of a full item value — the two optima cannot be approached
/// simultaneously.
pub fn inflated_prizes(n: usize, amount: &Rational) -> Result<Fixture, FixtureError> {
    require_agents(2, n)?;
    require_amount(amount)?;
    let value = amount * rat_usize(n * n) / (rat_usize(4) * rat_usize(n - 1));
    let instance = Instance::new(vec![rat_usize(1); n], vec![vec![value.clone(); n - 1]; n])?;
    let allocation = Allocation::new((0..n - 1).collect(), n)?;
    Ok(Fixture {
        label: format!("inflated-prizes(n={}, T={})", n, amount),
        instance,
        allocation,
        expectations: vec![
            Expectation::Opt(ObjectiveKind::P4, rat_usize(n) * amount / rat_usize(4)),
            Expectation::SearchMinAtLeast(ObjectiveKind::P1, value),
        ],
    })
}

/// How [`gen_random`] draws entitlements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// All entitlements 1; consumes no draws.
    Equal,
    /// Integer entitlements drawn uniformly from 1..=4.
    IntegerRange,
}

/// A 64-bit linear congruential generator with Knuth's MMIX constants,
/// fixed here so that identical seeds reproduce identical instances across
/// platforms and bindings.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(Self::MULTIPLIER).wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform-ish draw from `0..bound` using the upper bits (the low bits
    /// of an LCG cycle with short periods). The slight modulo bias is
    /// irrelevant for generating test instances.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty draw range");
        (self.next_u64() >> 33) % bound
    }
}

const RANDOM_MAX_AGENTS: usize = 6;
const RANDOM_MAX_ITEMS: usize = 8;
const FEASIBLE_DRAW_ATTEMPTS: u32 = 1000;

fn check_random_guard(n: usize, m: usize) -> Result<(), FixtureError> {
    if n == 0 || n > RANDOM_MAX_AGENTS || m > RANDOM_MAX_ITEMS {
        return Err(FixtureError::RandomGuard { num_agents: n, num_items: m });
    }
    Ok(())
}

fn draw_instance(
    rng: &mut Lcg,
    n: usize,
    m: usize,
    max_value: u64,
    mode: WeightMode,
) -> Result<Instance, FixtureError> {
    let weights = match mode {
        WeightMode::Equal => vec![rat_usize(1); n],
        WeightMode::IntegerRange => {
            (0..n).map(|_| Rational::from_integer(BigInt::from(1 + rng.below(4)))).collect()
        }
    };
    let valuations = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| Rational::from_integer(BigInt::from(rng.below(max_value.saturating_add(1)))))
                .collect()
        })
        .collect();
    Ok(Instance::new(weights, valuations)?)
}

/// Seeded random instance: entitlements per `mode`, then integer item
/// values in `0..=max_value`, drawn row by row (agent-major). Guarded to 6
/// agents and 8 items.
pub fn gen_random(
    seed: u64,
    n: usize,
    m: usize,
    max_value: u64,
    mode: WeightMode,
) -> Result<Instance, FixtureError> {
    check_random_guard(n, m)?;
    draw_instance(&mut Lcg::new(seed), n, m, max_value, mode)
}

/// Seeded random instance plus a feasible allocation: after the instance,
/// owner vectors are drawn item by item until one admits WEF payments.
pub fn gen_random_pair(
    seed: u64,
    n: usize,
    m: usize,
    max_value: u64,
    mode: WeightMode,
) -> Result<(Instance, Allocation), FixtureError> {
    check_random_guard(n, m)?;
    let mut rng = Lcg::new(seed);
    let instance = draw_instance(&mut rng, n, m, max_value, mode)?;
    for _ in 0..FEASIBLE_DRAW_ATTEMPTS {
        let owner = (0..m).map(|_| rng.below(n as u64) as usize).collect();
        let allocation = Allocation::new(owner, n)?;
        let graph = EnvyGraph::build(&instance, &allocation)?;
        if graph.longest_paths().is_ok() {
            return Ok((instance, allocation));
        }
    }
    Err(FixtureError::NoFeasibleDraw { attempts: FEASIBLE_DRAW_ATTEMPTS })
}
