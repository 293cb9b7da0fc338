//! Exact computation of weighted envy-free allocations with payments.
//!
//! Agents have positive entitlements (weights) and additive valuations over
//! indivisible items. Given an allocation, a payment vector makes it
//! *weighted envy-free* (WEF) when no agent prefers another agent's bundle
//! plus payment, with both sides scaled by entitlement. This crate computes,
//! transforms, and verifies such payment vectors:
//!
//! - [`model`] — instances, allocations, payment vectors, the WEF check;
//! - [`envy_graph`] — the pairwise envy-cost graph, feasibility with
//!   positive-cycle witnesses, pointwise-minimal subsidies via longest paths;
//! - [`transforms`] — entitlement-proportional slides between subsidy and
//!   balanced payment vectors;
//! - [`lp`] — exact rational linear programming (two-phase simplex with
//!   Bland's rule) plus a brute-force vertex oracle for cross-checking;
//! - [`optimize`] — the payment objective catalog, per-allocation optima,
//!   exhaustive allocation search, and bound checking;
//! - [`fixtures`] — generators for the named worst-case families and seeded
//!   random instances;
//! - [`io`] — the JSON instance-file format shared by the CLI and C API.
//!
//! All arithmetic is exact: every quantity is a [`model::Rational`], and
//! floating point appears nowhere (decimal strings are rendered for display
//! only, by integer arithmetic).

pub mod envy_graph;
pub mod fixtures;
pub mod io;
pub mod lp;
pub mod model;
pub mod optimize;
pub mod transforms;

pub use model::{Allocation, Instance, PaymentVector, Rational};
pub use optimize::ObjectiveKind;
