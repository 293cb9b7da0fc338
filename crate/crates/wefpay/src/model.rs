//! Core data model: exact rationals, instances, allocations, payment
//! vectors, and the weighted envy-freeness check.
//!
//! Conventions used throughout the crate:
//!
//! - `n` agents are indexed `0..n`, `m` items are indexed `0..m`;
//! - entitlements (weights) are strictly positive rationals, item values are
//!   nonnegative rationals, payments may have either sign;
//! - utilities are quasilinear: with payment `p_i`, agent `i` enjoys
//!   `v_i(A_i) + p_i`;
//! - an allocation with payments is *weighted envy-free* (WEF) when for
//!   every ordered pair of agents `(i, j)`:
//!
//!   ```text
//!   (v_i(A_i) + p_i) / w_i  >=  (v_i(A_j) + p_j) / w_j
//!   ```
//!
//! Everything is computed in exact rational arithmetic; floating point never
//! enters any computation. [`decimal_approx`] renders a rounded decimal
//! string for display only, using integer arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact arbitrary-precision rational, the only scalar type used in
/// computations. Kept in canonical form (reduced, positive denominator) by
/// construction.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued [`Rational`]. Convenience for tests and
/// fixtures.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `numer/denom` as a [`Rational`].
///
/// # Panics
///
/// Panics if `denom == 0`. For untrusted input use [`parse_rational`].
pub fn ratio(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "ratio: zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Error produced by [`parse_rational`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError {
    input: String,
    reason: &'static str,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational {:?}: {}", self.input, self.reason)
    }
}

impl std::error::Error for ParseRationalError {}

/// Parses a rational from the strict external syntax `-?digits(/digits)?`.
///
/// The denominator, when present, must be a positive integer; `"1/0"` and
/// anything containing whitespace, exponents, or decimal points is rejected.
/// Accepted examples: `"3"`, `"-7"`, `"3/4"`, `"-10/4"` (normalized to
/// `-5/2`).
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError { input: s.to_string(), reason };
    let (numer_text, denom_text) = match s.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    };
    let unsigned = numer_text.strip_prefix('-').unwrap_or(numer_text);
    if unsigned.is_empty() || !unsigned.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("expected an integer or numerator/denominator"));
    }
    let numer: BigInt = numer_text.parse().expect("validated digits");
    let denom: BigInt = match denom_text {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err("denominator must be an unsigned integer"));
            }
            let d: BigInt = d.parse().expect("validated digits");
            if d.is_zero() {
                return Err(err("zero denominator"));
            }
            d
        }
    };
    Ok(Rational::new(numer, denom))
}

/// Renders `r` as a decimal string rounded to six significant digits.
///
/// Display-only: exact values stay [`Rational`] everywhere else. Computed in
/// pure integer arithmetic (round half up, trailing zeros trimmed), e.g.
/// `4/3` renders as `1.33333` and `1/1000` as `0.001`.
pub fn decimal_approx(r: &Rational) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let a = r.numer().abs();
    let b = r.denom().clone();
    let ten = BigInt::from(10);
    // Order of magnitude: the unique e with 10^e <= a/b < 10^(e+1).
    let mut e: i64 = 0;
    if a >= b {
        let mut pow = b.clone();
        loop {
            let next = &pow * &ten;
            if next > a {
                break;
            }
            pow = next;
            e += 1;
        }
    } else {
        let mut scaled = &a * &ten;
        e = -1;
        while scaled < b {
            scaled *= &ten;
            e -= 1;
        }
    }
    // Six-digit mantissa m = round(a * 10^(5-e) / b), half away from zero.
    let (num, den) = if e <= 5 {
        (a * ten.pow((5 - e) as u32), b)
    } else {
        (a, b * ten.pow((e - 5) as u32))
    };
    let mut m = (BigInt::from(2) * num + &den) / (BigInt::from(2) * den);
    if m == BigInt::from(1_000_000) {
        m /= &ten;
        e += 1;
    }
    let digits = m.to_string();
    debug_assert_eq!(digits.len(), 6);
    let mut out = String::new();
    if r.is_negative() {
        out.push('-');
    }
    if e >= 5 {
        out.push_str(&digits);
        for _ in 0..(e - 5) {
            out.push('0');
        }
    } else if e >= 0 {
        let split = (e + 1) as usize;
        out.push_str(&digits[..split]);
        let frac = digits[split..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else {
        out.push_str("0.");
        for _ in 0..(-e - 1) {
            out.push('0');
        }
        out.push_str(digits.trim_end_matches('0'));
    }
    out
}

/// Validation and dimension errors for the core model types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// An instance must have at least one agent.
    NoAgents,
    /// Entitlements must be strictly positive.
    NonPositiveWeight { agent: usize },
    /// The valuation matrix must have one row per agent.
    ValuationRows { expected: usize, got: usize },
    /// All valuation rows must have the same length.
    RaggedValuations { agent: usize, expected: usize, got: usize },
    /// Item values must be nonnegative.
    NegativeValuation { agent: usize, item: usize },
    /// Agent index out of range.
    AgentOutOfRange { agent: usize, num_agents: usize },
    /// Item index out of range.
    ItemOutOfRange { item: usize, num_items: usize },
    /// An allocation names an owner that is not an agent.
    OwnerOutOfRange { item: usize, owner: usize, num_agents: usize },
    /// Allocation covers a different number of items than the instance.
    ItemCountMismatch { expected: usize, got: usize },
    /// Allocation or payment vector built for a different number of agents.
    AgentCountMismatch { expected: usize, got: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModelError::NoAgents => write!(f, "instance must have at least one agent"),
            ModelError::NonPositiveWeight { agent } => {
                write!(f, "agent {} has a non-positive entitlement", agent)
            }
            ModelError::ValuationRows { expected, got } => write!(
                f,
                "valuation matrix has {} rows but the instance has {} agents",
                got, expected
            ),
            ModelError::RaggedValuations { agent, expected, got } => write!(
                f,
                "valuation row for agent {} has {} entries, expected {}",
                agent, got, expected
            ),
            ModelError::NegativeValuation { agent, item } => {
                write!(f, "agent {} values item {} negatively", agent, item)
            }
            ModelError::AgentOutOfRange { agent, num_agents } => {
                write!(f, "agent index {} out of range (instance has {} agents)", agent, num_agents)
            }
            ModelError::ItemOutOfRange { item, num_items } => {
                write!(f, "item index {} out of range (instance has {} items)", item, num_items)
            }
            ModelError::OwnerOutOfRange { item, owner, num_agents } => write!(
                f,
                "item {} is assigned to agent {} but the instance has {} agents",
                item, owner, num_agents
            ),
            ModelError::ItemCountMismatch { expected, got } => {
                write!(f, "allocation covers {} items, expected {}", got, expected)
            }
            ModelError::AgentCountMismatch { expected, got } => {
                write!(f, "expected a vector over {} agents, got {}", expected, got)
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// A fair-division instance: `n` agents with positive entitlements and
/// additive nonnegative valuations over `m` indivisible items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    weights: Vec<Rational>,
    /// `valuations[i][o]` is agent `i`'s value for item `o`.
    valuations: Vec<Vec<Rational>>,
    total_weight: Rational,
}

impl Instance {
    /// Validates and builds an instance. Requires at least one agent,
    /// strictly positive weights, a rectangular valuation matrix with one
    /// row per agent, and nonnegative values. `m == 0` items is allowed.
    pub fn new(weights: Vec<Rational>, valuations: Vec<Vec<Rational>>) -> Result<Self, ModelError> {
        let n = weights.len();
        if n == 0 {
            return Err(ModelError::NoAgents);
        }
        for (agent, w) in weights.iter().enumerate() {
            if !w.is_positive() {
                return Err(ModelError::NonPositiveWeight { agent });
            }
        }
        if valuations.len() != n {
            return Err(ModelError::ValuationRows { expected: n, got: valuations.len() });
        }
        let m = valuations[0].len();
        for (agent, row) in valuations.iter().enumerate() {
            if row.len() != m {
                return Err(ModelError::RaggedValuations { agent, expected: m, got: row.len() });
            }
            for (item, v) in row.iter().enumerate() {
                if v.is_negative() {
                    return Err(ModelError::NegativeValuation { agent, item });
                }
            }
        }
        let total_weight = weights.iter().sum();
        Ok(Instance { weights, valuations, total_weight })
    }

    pub fn num_agents(&self) -> usize {
        self.weights.len()
    }

    pub fn num_items(&self) -> usize {
        self.valuations[0].len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, agent: usize) -> &Rational {
        &self.weights[agent]
    }

    /// Sum of all entitlements, `W`.
    pub fn total_weight(&self) -> &Rational {
        &self.total_weight
    }

    /// Agent `i`'s value for a single item.
    pub fn value(&self, agent: usize, item: usize) -> &Rational {
        &self.valuations[agent][item]
    }

    /// Additive value `v_agent(bundle)`; the empty bundle is worth zero.
    /// Items may repeat in `bundle` (each occurrence counts), though
    /// callers built from [`Allocation`] never repeat items.
    pub fn bundle_value(&self, agent: usize, bundle: &[usize]) -> Result<Rational, ModelError> {
        if agent >= self.num_agents() {
            return Err(ModelError::AgentOutOfRange { agent, num_agents: self.num_agents() });
        }
        let mut total = Rational::zero();
        for &item in bundle {
            if item >= self.num_items() {
                return Err(ModelError::ItemOutOfRange { item, num_items: self.num_items() });
            }
            total += &self.valuations[agent][item];
        }
        Ok(total)
    }
}

/// A complete assignment of the items to agents: `owner[o]` is the agent
/// holding item `o`. Bundles may be empty; every item has exactly one owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    owner: Vec<usize>,
    num_agents: usize,
}

impl Allocation {
    pub fn new(owner: Vec<usize>, num_agents: usize) -> Result<Self, ModelError> {
        if num_agents == 0 {
            return Err(ModelError::NoAgents);
        }
        for (item, &o) in owner.iter().enumerate() {
            if o >= num_agents {
                return Err(ModelError::OwnerOutOfRange { item, owner: o, num_agents });
            }
        }
        Ok(Allocation { owner, num_agents })
    }

    pub fn num_items(&self) -> usize {
        self.owner.len()
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn owner(&self, item: usize) -> usize {
        self.owner[item]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    /// The items held by `agent`, in ascending item order.
    pub fn bundle(&self, agent: usize) -> Vec<usize> {
        self.owner
            .iter()
            .enumerate()
            .filter(|&(_, &o)| o == agent)
            .map(|(item, _)| item)
            .collect()
    }

    /// All bundles, indexed by agent.
    pub fn bundles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_agents];
        for (item, &o) in self.owner.iter().enumerate() {
            out[o].push(item);
        }
        out
    }

    /// Checks that this allocation has the same agent and item counts as
    /// `instance`.
    pub fn matches(&self, instance: &Instance) -> Result<(), ModelError> {
        if self.num_agents != instance.num_agents() {
            return Err(ModelError::AgentCountMismatch {
                expected: instance.num_agents(),
                got: self.num_agents,
            });
        }
        if self.owner.len() != instance.num_items() {
            return Err(ModelError::ItemCountMismatch {
                expected: instance.num_items(),
                got: self.owner.len(),
            });
        }
        Ok(())
    }
}

/// How a payment vector relates to the two classes studied here: *balanced*
/// (payments sum to zero) and *subsidy* (every payment nonnegative). The
/// all-zero vector is both; a vector can also be neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub balanced: bool,
    pub subsidy: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.balanced, self.subsidy) {
            (true, true) => write!(f, "balanced and subsidy"),
            (true, false) => write!(f, "balanced"),
            (false, true) => write!(f, "subsidy"),
            (false, false) => write!(f, "neither"),
        }
    }
}

/// One payment per agent. Positive entries are money given to the agent
/// (subsidies), negative entries are charges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaymentVector {
    amounts: Vec<Rational>,
}

impl PaymentVector {
    pub fn new(amounts: Vec<Rational>) -> Self {
        PaymentVector { amounts }
    }

    /// The all-zero vector over `n` agents.
    pub fn zero(n: usize) -> Self {
        PaymentVector { amounts: vec![Rational::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn get(&self, agent: usize) -> &Rational {
        &self.amounts[agent]
    }

    pub fn amounts(&self) -> &[Rational] {
        &self.amounts
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.amounts.iter()
    }

    /// Sum of all payments.
    pub fn total(&self) -> Rational {
        self.amounts.iter().sum()
    }

    pub fn classify(&self) -> Classification {
        Classification {
            balanced: self.total().is_zero(),
            subsidy: self.amounts.iter().all(|p| !p.is_negative()),
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.classify().balanced
    }

    pub fn is_subsidy(&self) -> bool {
        self.classify().subsidy
    }
}

impl fmt::Display for PaymentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, p) in self.amounts.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, "]")
    }
}

/// A concrete violation of weighted envy-freeness: `envious` would gain
/// `deficit > 0` (in scaled utility) by swapping to `envied`'s bundle and
/// payment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WefWitness {
    pub envious: usize,
    pub envied: usize,
    /// `(v_i(A_j) + p_j)/w_j - (v_i(A_i) + p_i)/w_i`, strictly positive.
    pub deficit: Rational,
}

impl fmt::Display for WefWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "agent {} envies agent {} (deficit {})",
            self.envious, self.envied, self.deficit
        )
    }
}

/// Outcome of [`check_wef`]: either every ordered pair satisfies the WEF
/// inequality, or a maximal-deficit witness pair is reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WefCheck {
    Wef,
    Envy(WefWitness),
}

impl WefCheck {
    pub fn is_wef(&self) -> bool {
        matches!(self, WefCheck::Wef)
    }

    pub fn witness(&self) -> Option<&WefWitness> {
        match self {
            WefCheck::Wef => None,
            WefCheck::Envy(w) => Some(w),
        }
    }
}

/// Checks weighted envy-freeness of `(allocation, payments)` on `instance`.
///
/// Evaluates the WEF inequality for every ordered pair of distinct agents.
/// If any pair fails, reports the pair with the largest deficit, breaking
/// ties lexicographically by `(envious, envied)`. Single-agent instances are
/// trivially WEF.
pub fn check_wef(
    instance: &Instance,
    allocation: &Allocation,
    payments: &PaymentVector,
) -> Result<WefCheck, ModelError> {
    allocation.matches(instance)?;
    if payments.len() != instance.num_agents() {
        return Err(ModelError::AgentCountMismatch {
            expected: instance.num_agents(),
            got: payments.len(),
        });
    }
    let n = instance.num_agents();
    let bundles = allocation.bundles();
    // scaled[i][j] = (v_i(A_j) + p_j) / w_j, agent i's scaled view of seat j.
    let mut scaled = vec![Vec::with_capacity(n); n];
    for (i, view) in scaled.iter_mut().enumerate() {
        for (j, bundle) in bundles.iter().enumerate() {
            let v = instance.bundle_value(i, bundle).expect("validated indices");
            view.push((v + payments.get(j)) / instance.weight(j));
        }
    }
    let mut worst: Option<WefWitness> = None;
    for (i, view) in scaled.iter().enumerate() {
        for j in 0..n {
            if i == j {
                continue;
            }
            let deficit = &view[j] - &view[i];
            if deficit.is_positive() && worst.as_ref().is_none_or(|w| deficit > w.deficit) {
                worst = Some(WefWitness { envious: i, envied: j, deficit });
            }
        }
    }
    Ok(match worst {
        None => WefCheck::Wef,
        Some(w) => WefCheck::Envy(w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn intro_instance() -> Instance {
        // Two unit-entitlement agents, one item worth 20 to agent 0 and 30
        // to agent 1.
        Instance::new(vec![rat(1), rat(1)], vec![vec![rat(20)], vec![rat(30)]]).unwrap()
    }

    #[test]
    fn parse_rational_accepts_integers_and_fractions() {
        assert_eq!(parse_rational("3").unwrap(), rat(3));
        assert_eq!(parse_rational("-7").unwrap(), rat(-7));
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("-10/4").unwrap(), ratio(-5, 2));
        assert_eq!(parse_rational("0").unwrap(), Rational::zero());
    }

    #[test]
    fn parse_rational_rejects_bad_syntax() {
        for bad in ["", "1/0", "1.5", "1e3", " 3", "3 ", "+3", "3/-4", "a", "1/", "/2", "--1"] {
            assert!(parse_rational(bad).is_err(), "accepted {:?}", bad);
        }
    }

    #[test]
    fn decimal_approx_examples() {
        assert_eq!(decimal_approx(&Rational::zero()), "0");
        assert_eq!(decimal_approx(&rat(20)), "20");
        assert_eq!(decimal_approx(&ratio(4, 3)), "1.33333");
        assert_eq!(decimal_approx(&ratio(1, 1000)), "0.001");
        assert_eq!(decimal_approx(&ratio(2, 3)), "0.666667");
        assert_eq!(decimal_approx(&ratio(-1, 8)), "-0.125");
        assert_eq!(decimal_approx(&ratio(25, 2)), "12.5");
        assert_eq!(decimal_approx(&rat(1_234_567)), "1234570");
        assert_eq!(decimal_approx(&ratio(999_999_999, 1000)), "1000000");
    }

    #[test]
    fn instance_validation() {
        assert_eq!(Instance::new(vec![], vec![]), Err(ModelError::NoAgents));
        assert_eq!(
            Instance::new(vec![rat(0)], vec![vec![]]),
            Err(ModelError::NonPositiveWeight { agent: 0 })
        );
        assert_eq!(
            Instance::new(vec![rat(1)], vec![]),
            Err(ModelError::ValuationRows { expected: 1, got: 0 })
        );
        assert_eq!(
            Instance::new(vec![rat(1), rat(1)], vec![vec![rat(1)], vec![]]),
            Err(ModelError::RaggedValuations { agent: 1, expected: 1, got: 0 })
        );
        assert_eq!(
            Instance::new(vec![rat(1)], vec![vec![rat(-1)]]),
            Err(ModelError::NegativeValuation { agent: 0, item: 0 })
        );
    }

    #[test]
    fn bundle_value_examples() {
        let intro = intro_instance();
        assert_eq!(intro.bundle_value(0, &[0]).unwrap(), rat(20));
        assert_eq!(intro.bundle_value(1, &[]).unwrap(), rat(0));

        let thirds = Instance::new(
            vec![rat(1)],
            vec![vec![rat(1), ratio(1, 2), ratio(1, 3)]],
        )
        .unwrap();
        assert_eq!(thirds.bundle_value(0, &[0, 1, 2]).unwrap(), ratio(11, 6));

        assert_eq!(
            intro.bundle_value(2, &[]),
            Err(ModelError::AgentOutOfRange { agent: 2, num_agents: 2 })
        );
        assert_eq!(
            intro.bundle_value(0, &[1]),
            Err(ModelError::ItemOutOfRange { item: 1, num_items: 1 })
        );
    }

    #[test]
    fn allocation_bundles_and_matching() {
        let alloc = Allocation::new(vec![1, 0, 1], 2).unwrap();
        assert_eq!(alloc.bundle(0), vec![1]);
        assert_eq!(alloc.bundle(1), vec![0, 2]);
        assert_eq!(alloc.bundles(), vec![vec![1], vec![0, 2]]);

        assert_eq!(
            Allocation::new(vec![2], 2),
            Err(ModelError::OwnerOutOfRange { item: 0, owner: 2, num_agents: 2 })
        );

        let intro = intro_instance();
        let wrong_items = Allocation::new(vec![0, 0], 2).unwrap();
        assert_eq!(
            wrong_items.matches(&intro),
            Err(ModelError::ItemCountMismatch { expected: 1, got: 2 })
        );
        let wrong_agents = Allocation::new(vec![0], 3).unwrap();
        assert_eq!(
            wrong_agents.matches(&intro),
            Err(ModelError::AgentCountMismatch { expected: 2, got: 3 })
        );
    }

    #[test]
    fn check_wef_intro_examples() {
        let intro = intro_instance();
        let to_agent_1 = Allocation::new(vec![1], 2).unwrap();

        // Transfer of 15 from agent 1 to agent 0 removes all envy.
        let p = PaymentVector::new(vec![rat(15), rat(-15)]);
        assert_eq!(check_wef(&intro, &to_agent_1, &p).unwrap(), WefCheck::Wef);

        // A transfer of only 9 leaves agent 0 envious by 2.
        let p = PaymentVector::new(vec![rat(9), rat(-9)]);
        assert_eq!(
            check_wef(&intro, &to_agent_1, &p).unwrap(),
            WefCheck::Envy(WefWitness { envious: 0, envied: 1, deficit: rat(2) })
        );
    }

    #[test]
    fn check_wef_trivial_cases() {
        // No items, no payments: nothing to envy.
        let empty = Instance::new(vec![rat(1), rat(2)], vec![vec![], vec![]]).unwrap();
        let alloc = Allocation::new(vec![], 2).unwrap();
        let verdict = check_wef(&empty, &alloc, &PaymentVector::zero(2)).unwrap();
        assert!(verdict.is_wef());

        // A single agent is trivially WEF even with a wild payment.
        let solo = Instance::new(vec![rat(3)], vec![vec![rat(5)]]).unwrap();
        let alloc = Allocation::new(vec![0], 1).unwrap();
        let p = PaymentVector::new(vec![rat(-100)]);
        assert!(check_wef(&solo, &alloc, &p).unwrap().is_wef());
    }

    #[test]
    fn check_wef_respects_entitlements() {
        // Same bundles, different entitlements: agent 0 with double weight
        // tolerates half as much on its own side.
        let inst = Instance::new(
            vec![rat(2), rat(1)],
            vec![vec![rat(6), rat(6)], vec![rat(6), rat(6)]],
        )
        .unwrap();
        let alloc = Allocation::new(vec![0, 1], 2).unwrap();
        // Agent 0: own (6+0)/2 = 3 vs other (6+0)/1 = 6 -> deficit 3.
        let verdict = check_wef(&inst, &alloc, &PaymentVector::zero(2)).unwrap();
        assert_eq!(
            verdict,
            WefCheck::Envy(WefWitness { envious: 0, envied: 1, deficit: rat(3) })
        );
    }

    #[test]
    fn check_wef_picks_max_deficit_lex_witness() {
        // Three agents, one item worth 12 to everyone, given to agent 2 with
        // no payments: agents 0 and 1 tie at deficit 12; lexicographically
        // smallest envious agent wins.
        let inst = Instance::new(
            vec![rat(1), rat(1), rat(1)],
            vec![vec![rat(12)], vec![rat(12)], vec![rat(12)]],
        )
        .unwrap();
        let alloc = Allocation::new(vec![2], 3).unwrap();
        let verdict = check_wef(&inst, &alloc, &PaymentVector::zero(3)).unwrap();
        assert_eq!(
            verdict,
            WefCheck::Envy(WefWitness { envious: 0, envied: 2, deficit: rat(12) })
        );
    }

    #[test]
    fn check_wef_dimension_errors() {
        let intro = intro_instance();
        let alloc = Allocation::new(vec![1], 2).unwrap();
        assert_eq!(
            check_wef(&intro, &alloc, &PaymentVector::zero(3)),
            Err(ModelError::AgentCountMismatch { expected: 2, got: 3 })
        );
    }

    #[test]
    fn classification_examples() {
        let transfer = PaymentVector::new(vec![rat(15), rat(-15)]);
        let c = transfer.classify();
        assert!(c.balanced && !c.subsidy);
        assert_eq!(c.to_string(), "balanced");

        let subsidy = PaymentVector::new(vec![rat(0), rat(6), rat(6)]);
        let c = subsidy.classify();
        assert!(!c.balanced && c.subsidy);
        assert_eq!(c.to_string(), "subsidy");

        let zero = PaymentVector::zero(2);
        let c = zero.classify();
        assert!(c.balanced && c.subsidy);
        assert_eq!(c.to_string(), "balanced and subsidy");

        let neither = PaymentVector::new(vec![rat(-1), rat(2)]);
        assert_eq!(neither.classify().to_string(), "neither");
    }

    #[test]
    fn payment_vector_display() {
        let p = PaymentVector::new(vec![rat(20), rat(0), ratio(-5, 2)]);
        assert_eq!(p.to_string(), "[20, 0, -5/2]");
    }

    mod proptests {
        use super::*;
        use proptest::prelude::*;

        fn arb_nonneg() -> impl Strategy<Value = Rational> {
            (0i64..=40, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
        }

        fn arb_signed() -> impl Strategy<Value = Rational> {
            (-40i64..=40, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
        }

        fn arb_setup() -> impl Strategy<Value = (Instance, Allocation, PaymentVector)> {
            (1usize..=4, 0usize..=4).prop_flat_map(|(n, m)| {
                (
                    proptest::collection::vec((1i64..=5, 1i64..=3).prop_map(|(a, b)| ratio(a, b)), n),
                    proptest::collection::vec(proptest::collection::vec(arb_nonneg(), m), n),
                    proptest::collection::vec(0..n, m),
                    proptest::collection::vec(arb_signed(), n),
                )
                    .prop_map(move |(w, v, owner, p)| {
                        (
                            Instance::new(w, v).unwrap(),
                            Allocation::new(owner, n).unwrap(),
                            PaymentVector::new(p),
                        )
                    })
            })
        }

        proptest! {
            // Shifting every payment by z * w_i changes neither the verdict
            // nor the witness: all scaled utilities move by the same z.
            #[test]
            fn wef_invariant_under_weight_proportional_shift(
                (inst, alloc, p) in arb_setup(),
                zn in -9i64..=9,
                zd in 1i64..=4,
            ) {
                let z = ratio(zn, zd);
                let shifted = PaymentVector::new(
                    p.iter()
                        .zip(inst.weights())
                        .map(|(pi, wi)| pi + &z * wi)
                        .collect(),
                );
                let before = check_wef(&inst, &alloc, &p).unwrap();
                let after = check_wef(&inst, &alloc, &shifted).unwrap();
                prop_assert_eq!(before, after);
            }

            // A balanced vector with a negative entry must also have a
            // positive entry.
            #[test]
            fn balanced_with_charge_has_subsidy(p in proptest::collection::vec(arb_signed(), 1..6)) {
                let mut v = p;
                let correction: Rational = -v.iter().sum::<Rational>();
                v.push(correction);
                let pv = PaymentVector::new(v);
                prop_assert!(pv.is_balanced());
                if pv.iter().any(|x| x.is_negative()) {
                    prop_assert!(pv.iter().any(|x| x.is_positive()));
                }
            }

            // Bundle values add over disjoint bundles.
            #[test]
            fn bundle_value_is_additive((inst, alloc, _p) in arb_setup()) {
                for agent in 0..inst.num_agents() {
                    let mut whole = Rational::zero();
                    for bundle in alloc.bundles() {
                        whole += inst.bundle_value(agent, &bundle).unwrap();
                    }
                    let all_items: Vec<usize> = (0..inst.num_items()).collect();
                    prop_assert_eq!(whole, inst.bundle_value(agent, &all_items).unwrap());
                }
            }
        }
    }
}
