//! Confidence-based belief updating.
//!
//! A learner updates a belief state from an observation held with some
//! confidence. Confidences live in a [`domain::ConfidenceDomain`]; beliefs are
//! [`belief::BeliefPoint`]s; learners implement [`learners::Learner`]. The
//! [`flow`] module turns learners into vector fields that can be added and
//! integrated, and [`axioms`] checks the commitment axioms on random instances.

pub mod axioms;
pub mod belief;
pub mod cli;
pub mod domain;
pub mod error;
pub mod flow;
pub mod learners;
pub mod persist;
pub mod sampling;

pub use belief::{BeliefPoint, EventSet, FiniteSimplex, GaussianBelief, MassFunction};
pub use domain::{ConfidenceDomain, ConfidenceValue};
pub use error::{Error, Result};
pub use learners::{Learner, Observation};
