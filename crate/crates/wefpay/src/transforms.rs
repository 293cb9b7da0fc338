//! Entitlement-proportional transformations of WEF payment vectors.
//!
//! The WEF inequality compares `(v_i(A_i) + p_i) / w_i` across agents, so
//! adding `z * w_i` to every payment shifts all scaled utilities by the same
//! `z` and preserves weighted envy-freeness exactly. Every transform here is
//! such a slide for a particular choice of `z`:
//!
//! - [`slide`] — the raw operation, any `z`;
//! - [`balance`] — `z = total / W`, yielding a balanced vector;
//! - [`normalize_subsidy`] — `z = min_i s_i / w_i`, yielding a subsidy
//!   vector with at least one zero entry (no uniform reduction possible);
//! - [`balanced_to_subsidy`] — `z = -T / W` where
//!   `T = max_i (W / w_i) * (-p_i)`, turning a balanced vector into a
//!   subsidy vector of total exactly `T`.

use std::fmt;

use num_traits::Zero;

use crate::model::{Instance, ModelError, PaymentVector, Rational};

/// Errors from the payment transforms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformError {
    Model(ModelError),
    /// [`normalize_subsidy`] requires a nonnegative vector.
    NotASubsidy { agent: usize },
    /// [`balanced_to_subsidy`] requires payments summing to zero.
    NotBalanced { total: Rational },
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformError::Model(e) => e.fmt(f),
            TransformError::NotASubsidy { agent } => {
                write!(f, "not a subsidy vector: agent {} has a negative payment", agent)
            }
            TransformError::NotBalanced { total } => {
                write!(f, "not a balanced vector: payments sum to {}", total)
            }
        }
    }
}

impl std::error::Error for TransformError {}

impl From<ModelError> for TransformError {
    fn from(e: ModelError) -> Self {
        TransformError::Model(e)
    }
}

fn check_len(instance: &Instance, payments: &PaymentVector) -> Result<(), TransformError> {
    if payments.len() != instance.num_agents() {
        return Err(TransformError::Model(ModelError::AgentCountMismatch {
            expected: instance.num_agents(),
            got: payments.len(),
        }));
    }
    Ok(())
}

/// Subtracts `z * w_i` from every payment. Preserves weighted
/// envy-freeness for any `z` (in both directions: the slide is invertible).
pub fn slide(
    instance: &Instance,
    payments: &PaymentVector,
    z: &Rational,
) -> Result<PaymentVector, TransformError> {
    check_len(instance, payments)?;
    Ok(PaymentVector::new(
        payments.iter().zip(instance.weights()).map(|(p, w)| p - z * w).collect(),
    ))
}

/// Slides by `z = total / W` so the result sums to zero. Balanced input is
/// returned unchanged.
pub fn balance(
    instance: &Instance,
    payments: &PaymentVector,
) -> Result<PaymentVector, TransformError> {
    check_len(instance, payments)?;
    let z = payments.total() / instance.total_weight();
    slide(instance, payments, &z)
}

/// Slides a subsidy vector down by `z = min_i s_i / w_i`, the largest
/// entitlement-proportional reduction that keeps every entry nonnegative.
/// The result has at least one zero entry; normalized input (in particular
/// the pointwise-minimal subsidy vector) is returned unchanged.
pub fn normalize_subsidy(
    instance: &Instance,
    payments: &PaymentVector,
) -> Result<PaymentVector, TransformError> {
    check_len(instance, payments)?;
    for (agent, p) in payments.iter().enumerate() {
        if p < &Rational::zero() {
            return Err(TransformError::NotASubsidy { agent });
        }
    }
    let z = payments
        .iter()
        .zip(instance.weights())
        .map(|(p, w)| p / w)
        .min()
        .expect("at least one agent");
    slide(instance, payments, &z)
}

/// Converts a balanced vector into a subsidy vector by sliding up by
/// `T / W`, where `T = max_i (W / w_i) * (-p_i)` is the least total subsidy
/// any entitlement-proportional slide of `payments` can reach. Returns the
/// subsidy vector together with `T`, which is exactly its total.
pub fn balanced_to_subsidy(
    instance: &Instance,
    payments: &PaymentVector,
) -> Result<(PaymentVector, Rational), TransformError> {
    check_len(instance, payments)?;
    let total = payments.total();
    if !total.is_zero() {
        return Err(TransformError::NotBalanced { total });
    }
    let w_total = instance.total_weight();
    let t = payments
        .iter()
        .zip(instance.weights())
        .map(|(p, w)| -p * w_total / w)
        .max()
        .expect("at least one agent");
    let subsidy = slide(instance, payments, &(-&t / w_total))?;
    debug_assert_eq!(subsidy.total(), t);
    Ok((subsidy, t))
}
