//! The payment objective catalog, per-allocation optima, exhaustive
//! allocation search, and provable bound checking.
//!
//! Each objective fixes a payment class (subsidy or balanced) and a scalar
//! to minimize over all WEF payment vectors of that class. Four objectives
//! have closed forms in terms of the pointwise-minimal subsidy vector and
//! are solved through the envy graph; the rest go through the exact LP. The
//! two routes agree wherever both apply, which the test suites verify
//! systematically.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::envy_graph::{self, EnvyGraph, EnvyGraphError, Feasibility, PositiveCycle};
use crate::lp::{build_payment_lp, LpOutcome};
use crate::model::{Allocation, Instance, ModelError, PaymentVector, Rational};
use crate::transforms;

/// Whether an objective ranges over subsidy vectors (all payments
/// nonnegative) or balanced vectors (payments sum to zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaymentClass {
    Subsidy,
    Balanced,
}

/// The catalog of payment objectives, all minimized over WEF payment
/// vectors of the objective's class for a fixed allocation.
///
/// | Name    | Class    | Minimizes                                      |
/// |---------|----------|------------------------------------------------|
/// | `P1`    | subsidy  | `max_i p_i`                                    |
/// | `P1w`   | subsidy  | `max_i p_i / w_i`                              |
/// | `P2`    | subsidy  | `sum_i p_i`                                    |
/// | `P3max` | balanced | `max_i (-p_i)` (worst charge)                  |
/// | `P3norm`| balanced | `max_i (W / w_i) * (-p_i)` (normalized charge) |
/// | `P4`    | balanced | `sum_{p_i < 0} (-p_i)` (total charge)          |
/// | `P5sum` | balanced | `sum_i |p_i|`                                  |
/// | `P5max` | balanced | `max_i |p_i|`                                  |
///
/// `P5sum` and `P5max` are the two readings of "smallest payment
/// magnitude"; both are provided because they genuinely differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    P1,
    P1w,
    P2,
    P3max,
    P3norm,
    P4,
    P5sum,
    P5max,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 8] = [
        ObjectiveKind::P1,
        ObjectiveKind::P1w,
        ObjectiveKind::P2,
        ObjectiveKind::P3max,
        ObjectiveKind::P3norm,
        ObjectiveKind::P4,
        ObjectiveKind::P5sum,
        ObjectiveKind::P5max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::P1 => "P1",
            ObjectiveKind::P1w => "P1w",
            ObjectiveKind::P2 => "P2",
            ObjectiveKind::P3max => "P3max",
            ObjectiveKind::P3norm => "P3norm",
            ObjectiveKind::P4 => "P4",
            ObjectiveKind::P5sum => "P5sum",
            ObjectiveKind::P5max => "P5max",
        }
    }

    /// One-line description for the CLI catalog.
    pub fn describe(self) -> &'static str {
        match self {
            ObjectiveKind::P1 => "smallest maximum subsidy (subsidy class)",
            ObjectiveKind::P1w => "smallest maximum entitlement-scaled subsidy (subsidy class)",
            ObjectiveKind::P2 => "smallest total subsidy (subsidy class)",
            ObjectiveKind::P3max => "smallest worst charge (balanced class)",
            ObjectiveKind::P3norm => "smallest worst normalized charge (balanced class)",
            ObjectiveKind::P4 => "smallest total charge (balanced class)",
            ObjectiveKind::P5sum => "smallest total absolute payment (balanced class)",
            ObjectiveKind::P5max => "smallest maximum absolute payment (balanced class)",
        }
    }

    pub fn payment_class(self) -> PaymentClass {
        match self {
            ObjectiveKind::P1 | ObjectiveKind::P1w | ObjectiveKind::P2 => PaymentClass::Subsidy,
            _ => PaymentClass::Balanced,
        }
    }

    /// Whether the optimum is a closed form of the minimal subsidy vector
    /// (`P1`, `P1w`, `P2` directly; `P3norm` equals `P2`).
    pub fn has_closed_form(self) -> bool {
        matches!(
            self,
            ObjectiveKind::P1 | ObjectiveKind::P1w | ObjectiveKind::P2 | ObjectiveKind::P3norm
        )
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error for an unrecognized objective name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownObjective {
    pub input: String,
}

impl fmt::Display for UnknownObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown objective {:?}: expected one of", self.input)?;
        for (k, o) in ObjectiveKind::ALL.iter().enumerate() {
            write!(f, "{} {}", if k == 0 { "" } else { "," }, o)?;
        }
        Ok(())
    }
}

impl std::error::Error for UnknownObjective {}

impl FromStr for ObjectiveKind {
    type Err = UnknownObjective;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ObjectiveKind::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| UnknownObjective { input: s.to_string() })
    }
}

/// Errors from optimization and search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OptimizeError {
    Model(ModelError),
    /// No payment vector works for this allocation; carries the cycle.
    Infeasible(PositiveCycle),
    /// `num_agents ^ num_items` exceeds the exhaustive-search guard.
    SearchSpaceTooLarge { states: u128, limit: u128 },
    /// Every allocation of the instance is infeasible.
    NoFeasibleAllocation,
}

impl fmt::Display for OptimizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizeError::Model(e) => e.fmt(f),
            OptimizeError::Infeasible(c) => write!(f, "infeasible: {}", c),
            OptimizeError::SearchSpaceTooLarge { states, limit } => {
                write!(f, "search space has {} allocations, exceeding the guard of {}", states, limit)
            }
            OptimizeError::NoFeasibleAllocation => {
                write!(f, "no allocation of this instance admits a WEF payment vector")
            }
        }
    }
}

impl std::error::Error for OptimizeError {}

impl From<ModelError> for OptimizeError {
    fn from(e: ModelError) -> Self {
        OptimizeError::Model(e)
    }
}

impl From<EnvyGraphError> for OptimizeError {
    fn from(e: EnvyGraphError) -> Self {
        match e {
            EnvyGraphError::Model(m) => OptimizeError::Model(m),
            EnvyGraphError::Infeasible(c) => OptimizeError::Infeasible(c),
        }
    }
}

/// An optimal objective value together with a payment vector attaining it.
/// The witness is one optimum of possibly many; it is always WEF and of the
/// objective's payment class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub value: Rational,
    pub payments: PaymentVector,
}

/// Optimal payments for `objective` on a fixed allocation.
///
/// Uses the minimal-subsidy closed form when one exists and the exact LP
/// otherwise; [`opt_for_allocation_lp`] forces the LP route for
/// cross-checking. Fails with the positive-cycle witness when no payment
/// vector works.
pub fn opt_for_allocation(
    instance: &Instance,
    allocation: &Allocation,
    objective: ObjectiveKind,
) -> Result<Optimum, OptimizeError> {
    if !objective.has_closed_form() {
        return opt_for_allocation_lp(instance, allocation, objective);
    }
    let minimal = envy_graph::minimal_subsidy(instance, allocation)?;
    Ok(match objective {
        ObjectiveKind::P1 => Optimum {
            value: minimal.iter().max().expect("at least one agent").clone(),
            payments: minimal,
        },
        ObjectiveKind::P1w => Optimum {
            value: minimal
                .iter()
                .zip(instance.weights())
                .map(|(p, w)| p / w)
                .max()
                .expect("at least one agent"),
            payments: minimal,
        },
        ObjectiveKind::P2 => Optimum { value: minimal.total(), payments: minimal },
        // The normalized-charge optimum equals the total minimal subsidy,
        // attained by balancing it.
        ObjectiveKind::P3norm => {
            let value = minimal.total();
            let payments = transforms::balance(instance, &minimal)
                .expect("minimal subsidy has matching length");
            Optimum { value, payments }
        }
        _ => unreachable!("remaining objectives have no closed form"),
    })
}

/// Optimal payments for `objective` via the exact LP, regardless of whether
/// a closed form exists.
pub fn opt_for_allocation_lp(
    instance: &Instance,
    allocation: &Allocation,
    objective: ObjectiveKind,
) -> Result<Optimum, OptimizeError> {
    let graph = EnvyGraph::build(instance, allocation)?;
    if let Feasibility::Infeasible(cycle) = graph.feasibility() {
        return Err(OptimizeError::Infeasible(cycle));
    }
    let lp = build_payment_lp(instance, allocation, objective)?;
    match lp.solve() {
        LpOutcome::Optimal { value, point } => {
            let n = instance.num_agents();
            Ok(Optimum { value, payments: PaymentVector::new(point[..n].to_vec()) })
        }
        // Feasibility was established above and every objective is bounded
        // below by zero on its class.
        other => unreachable!("payment program cannot be {:?} on a feasible allocation", other),
    }
}

/// Best allocation found by exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub allocation: Allocation,
    pub optimum: Optimum,
}

/// Hard cap on `num_agents ^ num_items` for [`search_allocations`].
pub const SEARCH_GUARD: u128 = 10_000_000;

/// Exhaustively minimizes `objective` over all complete allocations.
///
/// Enumerates owner vectors in lexicographic order (item 0 most
/// significant, agent indices ascending), skips infeasible allocations, and
/// returns the first allocation attaining the minimum objective value.
/// Guarded to [`SEARCH_GUARD`] allocations; an instance with no items has
/// exactly one (empty) allocation.
pub fn search_allocations(
    instance: &Instance,
    objective: ObjectiveKind,
) -> Result<SearchOutcome, OptimizeError> {
    let n = instance.num_agents();
    let m = instance.num_items();
    // Saturates on overflow; the exact count is then irrelevant.
    let states = u32::try_from(m)
        .ok()
        .and_then(|exp| (n as u128).checked_pow(exp))
        .unwrap_or(u128::MAX);
    if states > SEARCH_GUARD {
        return Err(OptimizeError::SearchSpaceTooLarge { states, limit: SEARCH_GUARD });
    }

    let mut best: Option<SearchOutcome> = None;
    let mut owner = vec![0usize; m];
    loop {
        let allocation = Allocation::new(owner.clone(), n).expect("owners below n");
        match opt_for_allocation(instance, &allocation, objective) {
            Ok(optimum) => {
                if best.as_ref().is_none_or(|b| optimum.value < b.optimum.value) {
                    best = Some(SearchOutcome { allocation, optimum });
                }
            }
            Err(OptimizeError::Infeasible(_)) => {}
            Err(e) => return Err(e),
        }
        // Odometer increment, least significant item last.
        let mut o = m;
        let exhausted = loop {
            if o == 0 {
                break true;
            }
            o -= 1;
            owner[o] += 1;
            if owner[o] < n {
                break false;
            }
            owner[o] = 0;
        };
        if exhausted {
            break;
        }
    }
    best.ok_or(OptimizeError::NoFeasibleAllocation)
}

/// Relation asserted by a [`BoundRow`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundRelation {
    /// `lhs <= rhs`.
    AtMost,
    /// `lhs == rhs`.
    Equal,
}

/// One provable bound, instantiated with exact values on a concrete
/// allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub name: &'static str,
    pub relation: BoundRelation,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl BoundRow {
    pub fn holds(&self) -> bool {
        match self.relation {
            BoundRelation::AtMost => self.lhs <= self.rhs,
            BoundRelation::Equal => self.lhs == self.rhs,
        }
    }

    /// Whether the bound is attained with equality.
    pub fn tight(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// All bound rows for one (instance, allocation) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub rows: Vec<BoundRow>,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(BoundRow::holds)
    }
}

/// Instantiates every provable bound between the payment optima on one
/// feasible allocation:
///
/// - `total-vs-max`: `OPT_P2 <= (n - 1) * OPT_P1`;
/// - `total-vs-scaled-max`: `OPT_P2 <= (W - w_min) * OPT_P1w`;
/// - `total-equals-norm-charge`: `OPT_P2 == OPT_P3norm`, with the
///   right-hand side computed independently by the LP;
/// - `charge-vs-max`: for the balanced slide `p` of the minimal subsidy
///   vector, `max_i (W / w_i) * (-p_i) <= (n - 1) * OPT_P1`;
/// - `scaled-charge-vs-scaled-max`: for the same `p`,
///   `max_i (-p_i) / w_i <= (1 - w_min / W) * OPT_P1w`;
/// - `total-charge-vs-max` (equal entitlements only):
///   `OPT_P4 <= (n / 4) * OPT_P1`.
///
/// Every row provably holds, so a violation indicates a defect; callers
/// treat it as a checked outcome rather than trusting this blindly.
pub fn check_bounds(
    instance: &Instance,
    allocation: &Allocation,
) -> Result<BoundsReport, OptimizeError> {
    let n = instance.num_agents();
    let forms = envy_graph::opt_closed_forms(instance, allocation)?;
    let minimal = envy_graph::minimal_subsidy(instance, allocation)?;
    let balanced =
        transforms::balance(instance, &minimal).expect("minimal subsidy has matching length");
    let w_total = instance.total_weight();
    let w_min = instance.weights().iter().min().expect("at least one agent");
    let n_minus_1 = Rational::from_integer((n as i64 - 1).into());

    let mut rows = Vec::new();
    rows.push(BoundRow {
        name: "total-vs-max",
        relation: BoundRelation::AtMost,
        lhs: forms.p2.clone(),
        rhs: &n_minus_1 * &forms.p1,
    });
    rows.push(BoundRow {
        name: "total-vs-scaled-max",
        relation: BoundRelation::AtMost,
        lhs: forms.p2.clone(),
        rhs: (w_total - w_min) * &forms.p1w,
    });
    let p3norm_lp = opt_for_allocation_lp(instance, allocation, ObjectiveKind::P3norm)?;
    rows.push(BoundRow {
        name: "total-equals-norm-charge",
        relation: BoundRelation::Equal,
        lhs: forms.p2.clone(),
        rhs: p3norm_lp.value,
    });
    let norm_charge = balanced
        .iter()
        .zip(instance.weights())
        .map(|(p, w)| -p * w_total / w)
        .max()
        .expect("at least one agent");
    rows.push(BoundRow {
        name: "charge-vs-max",
        relation: BoundRelation::AtMost,
        lhs: norm_charge,
        rhs: &n_minus_1 * &forms.p1,
    });
    let scaled_charge = balanced
        .iter()
        .zip(instance.weights())
        .map(|(p, w)| -p / w)
        .max()
        .expect("at least one agent");
    rows.push(BoundRow {
        name: "scaled-charge-vs-scaled-max",
        relation: BoundRelation::AtMost,
        lhs: scaled_charge,
        rhs: (Rational::from_integer(1.into()) - w_min / w_total) * &forms.p1w,
    });
    if instance.weights().iter().all(|w| w == w_min) {
        let p4 = opt_for_allocation_lp(instance, allocation, ObjectiveKind::P4)?;
        rows.push(BoundRow {
            name: "total-charge-vs-max",
            relation: BoundRelation::AtMost,
            lhs: p4.value,
            rhs: Rational::new((n as i64).into(), 4.into()) * &forms.p1,
        });
    }
    Ok(BoundsReport { rows })
}

/// A labeled (instance, allocation) pair for [`explore_open`].
#[derive(Debug, Clone)]
pub struct ExploreCase {
    pub label: String,
    pub instance: Instance,
    pub allocation: Allocation,
}

/// Exact optima gathered for one explore case. `charge_to_total` is
/// `P4 / P2` when the total subsidy is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExploreRow {
    pub label: String,
    pub p2: Rational,
    pub p4: Rational,
    pub p5sum: Rational,
    pub p5max: Rational,
    pub charge_to_total: Option<Rational>,
}

/// Tabulates the balanced-class optima whose general behavior is not
/// pinned down by any proved bound. Gathers data only: no relation between
/// `P4`, `P5sum`, and `P5max` is asserted here beyond what each LP solve
/// guarantees.
pub fn explore_open(cases: &[ExploreCase]) -> Result<Vec<ExploreRow>, OptimizeError> {
    let mut rows = Vec::with_capacity(cases.len());
    for case in cases {
        let forms = envy_graph::opt_closed_forms(&case.instance, &case.allocation)?;
        let p4 = opt_for_allocation_lp(&case.instance, &case.allocation, ObjectiveKind::P4)?;
        let p5sum = opt_for_allocation_lp(&case.instance, &case.allocation, ObjectiveKind::P5sum)?;
        let p5max = opt_for_allocation_lp(&case.instance, &case.allocation, ObjectiveKind::P5max)?;
        let charge_to_total = if forms.p2.is_zero() {
            None
        } else {
            Some(&p4.value / &forms.p2)
        };
        rows.push(ExploreRow {
            label: case.label.clone(),
            p2: forms.p2,
            p4: p4.value,
            p5sum: p5sum.value,
            p5max: p5max.value,
            charge_to_total,
        });
    }
    Ok(rows)
}
