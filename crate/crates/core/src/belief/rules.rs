//! Full-confidence update rules on finite simplices.

use super::{EventSet, FiniteSimplex, EPS};
use crate::error::{Error, Result};

/// `P | A`.
pub fn condition(p: &FiniteSimplex, a: EventSet) -> Result<FiniteSimplex> {
    p.check_event(a)?;
    let mass = p.prob(a);
    if mass <= EPS {
        return Err(Error::ZeroMassEvent { mass });
    }
    let probs = (0..p.len())
        .map(|i| if a.contains(i) { p.probs()[i] / mass } else { 0.0 })
        .collect();
    Ok(FiniteSimplex::project(p.shared_labels(), probs))
}

/// Imaging: moves the mass of each world `w` to `f[w]`, the closest
/// `A`-world. `f` must map into `A` and be idempotent.
pub fn image(p: &FiniteSimplex, f: &[usize], a: EventSet) -> Result<FiniteSimplex> {
    p.check_event(a)?;
    let n = p.len();
    if f.len() != n {
        return Err(Error::InvalidImagingMap(format!("map has {} entries for {n} worlds", f.len())));
    }
    for (w, &fw) in f.iter().enumerate() {
        if fw >= n || !a.contains(fw) {
            return Err(Error::InvalidImagingMap(format!(
                "world {w} maps to {fw}, outside the event"
            )));
        }
        if f[fw] != fw {
            return Err(Error::InvalidImagingMap(format!(
                "not idempotent: {w} -> {fw} -> {}",
                f[fw]
            )));
        }
    }
    let mut probs = vec![0.0; n];
    for (w, &fw) in f.iter().enumerate() {
        probs[fw] += p.probs()[w];
    }
    Ok(FiniteSimplex::project(p.shared_labels(), probs))
}

/// Checks that `parts` are disjoint, nonempty and cover the worlds.
fn check_partition(p: &FiniteSimplex, parts: &[EventSet]) -> Result<()> {
    let mut seen = EventSet::empty();
    for part in parts {
        if part.is_empty() {
            return Err(Error::InvalidPartition("empty part".into()));
        }
        if !part.intersect(seen).is_empty() {
            return Err(Error::InvalidPartition("parts overlap".into()));
        }
        seen = seen.union(*part);
    }
    if seen != p.full_event() {
        return Err(Error::InvalidPartition("parts do not cover the worlds".into()));
    }
    Ok(())
}

/// Jeffrey's rule `Σₓ π(x)·(P | X = x)` for a partition `parts` with target
/// marginal `pi`.
pub fn jeffrey(p: &FiniteSimplex, parts: &[EventSet], pi: &[f64]) -> Result<FiniteSimplex> {
    check_partition(p, parts)?;
    if pi.len() != parts.len() {
        return Err(Error::InvalidPartition(format!(
            "{} target weights for {} parts",
            pi.len(),
            parts.len()
        )));
    }
    if pi.iter().any(|x| !x.is_finite() || *x < 0.0) || (pi.iter().sum::<f64>() - 1.0).abs() > 1e-10
    {
        return Err(Error::InvalidPartition("target marginal is not a distribution".into()));
    }
    let mut probs = vec![0.0; p.len()];
    for (part, &target) in parts.iter().zip(pi) {
        if target <= EPS {
            continue;
        }
        let mass = p.prob(*part);
        if mass <= EPS {
            return Err(Error::ZeroMassEvent { mass });
        }
        for i in part.indices() {
            probs[i] = target * p.probs()[i] / mass;
        }
    }
    Ok(FiniteSimplex::project(p.shared_labels(), probs))
}
