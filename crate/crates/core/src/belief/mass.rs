//! Dempster–Shafer mass functions.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{shared_labels, EventSet, FiniteSimplex, EPS, NORMALIZATION_TOL};
use crate::error::{Error, Result};

/// Largest supported frame for mass functions.
pub const MAX_MASS_WORLDS: usize = 20;

/// A basic probability assignment: mass on nonempty subsets of the frame,
/// summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    labels: Arc<[String]>,
    masses: BTreeMap<EventSet, f64>,
}

impl MassFunction {
    pub fn new(labels: Vec<String>, masses: BTreeMap<EventSet, f64>) -> Result<Self> {
        let labels = shared_labels(labels, MAX_MASS_WORLDS)?;
        let full = EventSet::full(labels.len());
        let mut total = 0.0;
        for (set, &m) in &masses {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidBelief(format!("mass {m} is not in [0,1]")));
            }
            if set.is_empty() && m > 0.0 {
                return Err(Error::InvalidBelief("the empty set carries mass".into()));
            }
            if !set.is_subset(full) {
                return Err(Error::InvalidBelief("focal set outside the frame".into()));
            }
            total += m;
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidBelief(format!("masses sum to {total}")));
        }
        Ok(Self::normalized(labels, masses))
    }

    fn normalized(labels: Arc<[String]>, masses: BTreeMap<EventSet, f64>) -> Self {
        let total: f64 = masses.values().sum();
        let masses = masses
            .into_iter()
            .filter(|(s, m)| *m > 0.0 && !s.is_empty())
            .map(|(s, m)| (s, m / total))
            .collect();
        MassFunction { labels, masses }
    }

    /// Builds from `(world names, mass)` pairs; repeated sets accumulate.
    pub fn from_named<S: AsRef<str>>(labels: Vec<String>, table: &[(Vec<S>, f64)]) -> Result<Self> {
        let mut masses = BTreeMap::new();
        for (names, m) in table {
            let mut set = EventSet::empty();
            for name in names {
                let i = labels
                    .iter()
                    .position(|l| l == name.as_ref())
                    .ok_or_else(|| Error::InvalidBelief(format!("unknown world `{}`", name.as_ref())))?;
                set = set.union(EventSet::singleton(i));
            }
            *masses.entry(set).or_insert(0.0) += m;
        }
        Self::new(labels, masses)
    }

    /// The Bayesian mass function of a probability distribution.
    pub fn from_probability(p: &FiniteSimplex) -> Result<Self> {
        let masses = (0..p.len())
            .map(|i| (EventSet::singleton(i), p.probs()[i]))
            .collect();
        Self::new(p.labels().to_vec(), masses)
    }

    /// All mass on the whole frame.
    pub fn vacuous(labels: Vec<String>) -> Result<Self> {
        let full = EventSet::full(labels.len());
        Self::new(labels, BTreeMap::from([(full, 1.0)]))
    }

    /// Simple support function: `alpha` on `a`, the rest on the frame.
    pub fn simple_support(labels: Vec<String>, alpha: f64, a: EventSet) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::param("alpha", format!("{alpha} outside [0,1]")));
        }
        if a.is_empty() {
            return Err(Error::InvalidBelief("support event is empty".into()));
        }
        let full = EventSet::full(labels.len());
        let mut masses = BTreeMap::new();
        *masses.entry(a).or_insert(0.0) += alpha;
        *masses.entry(full).or_insert(0.0) += 1.0 - alpha;
        Self::new(labels, masses)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn full_event(&self) -> EventSet {
        EventSet::full(self.len())
    }

    pub fn mass(&self, set: EventSet) -> f64 {
        self.masses.get(&set).copied().unwrap_or(0.0)
    }

    /// Focal sets with their masses, in mask order.
    pub fn focal_masses(&self) -> impl Iterator<Item = (EventSet, f64)> + '_ {
        self.masses.iter().map(|(s, m)| (*s, *m))
    }

    /// `Bel(U) = Σ_{V ⊆ U} m(V)`.
    pub fn bel(&self, u: EventSet) -> f64 {
        self.focal_masses()
            .filter(|(v, _)| v.is_subset(u))
            .map(|(_, m)| m)
            .sum()
    }

    /// `Plaus(U) = Σ_{V ∩ U ≠ ∅} m(V) = 1 − Bel(¬U)`.
    pub fn plaus(&self, u: EventSet) -> f64 {
        self.focal_masses()
            .filter(|(v, _)| !v.intersect(u).is_empty())
            .map(|(_, m)| m)
            .sum()
    }

    /// True when every focal set is a singleton.
    pub fn is_probability(&self) -> bool {
        self.masses.keys().all(|s| s.len() == 1)
    }

    /// The distribution of a Bayesian mass function.
    pub fn to_probability(&self) -> Option<FiniteSimplex> {
        if !self.is_probability() {
            return None;
        }
        let probs = (0..self.len()).map(|i| self.mass(EventSet::singleton(i))).collect();
        Some(FiniteSimplex::project(self.labels.clone(), probs))
    }

    /// Dempster's rule of combination.
    pub fn dempster(&self, other: &MassFunction) -> Result<MassFunction> {
        if self.labels != other.labels {
            return Err(Error::InvalidBelief("mass functions on different frames".into()));
        }
        let mut masses: BTreeMap<EventSet, f64> = BTreeMap::new();
        let mut normalizer = 0.0;
        for (b, mb) in self.focal_masses() {
            for (c, mc) in other.focal_masses() {
                let bc = b.intersect(c);
                if !bc.is_empty() {
                    *masses.entry(bc).or_insert(0.0) += mb * mc;
                    normalizer += mb * mc;
                }
            }
        }
        if normalizer <= EPS {
            return Err(Error::TotalConflict { normalizer });
        }
        Ok(Self::normalized(self.labels.clone(), masses))
    }

    /// `"a|b"` naming of a subset.
    pub fn event_key(&self, set: EventSet) -> String {
        set.indices()
            .map(|i| self.labels[i].as_str())
            .collect::<Vec<_>>()
            .join("|")
    }

    /// Same focal sets, new masses (clamped and renormalized).
    pub(crate) fn with_focal_masses(&self, values: &[f64]) -> Result<MassFunction> {
        let masses: BTreeMap<_, _> = self
            .masses
            .keys()
            .zip(values)
            .map(|(s, v)| (*s, v.max(0.0)))
            .collect();
        if masses.values().sum::<f64>() <= 0.0 {
            return Err(Error::Numerical("all mass vanished".into()));
        }
        Ok(Self::normalized(self.labels.clone(), masses))
    }

    /// Max-abs mass difference over the union of focal sets.
    pub fn distance(&self, other: &MassFunction) -> Option<f64> {
        if self.labels != other.labels {
            return None;
        }
        Some(
            self.masses
                .keys()
                .chain(other.masses.keys())
                .map(|s| (self.mass(*s) - other.mass(*s)).abs())
                .fold(0.0, f64::max),
        )
    }
}

/// Updates `bel` toward `a` with fractional confidence `alpha`: Dempster
/// combination with the simple support function for `(alpha, a)`.
///
/// The resulting plausibility is
/// `Plaus'(U) = (α·Plaus(U ∩ A) + (1−α)·Plaus(U)) / (1 − α + α·Plaus(A))`.
pub fn ds_plaus_update(bel: &MassFunction, a: EventSet, alpha: f64) -> Result<MassFunction> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("{alpha} outside [0,1]")));
    }
    if !a.is_subset(bel.full_event()) {
        return Err(Error::InvalidBelief("event outside the frame".into()));
    }
    if alpha == 0.0 {
        return Ok(bel.clone());
    }
    let normalizer = 1.0 - alpha + alpha * bel.plaus(a);
    if normalizer <= EPS {
        return Err(Error::TotalConflict { normalizer });
    }
    let support = MassFunction::simple_support(bel.labels().to_vec(), alpha, a)?;
    bel.dempster(&support)
}
