//! Seeded random instance generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use sha2::{Digest, Sha256};

use crate::belief::{EventSet, FiniteSimplex, RandomVariable};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable sub-seed from a base seed and a path of names.
pub fn derive_seed(base: u64, path: &[&str]) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    for part in path {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 digest has 32 bytes"))
}

/// A draw from Dirichlet(1, …, 1), bounded away from the simplex boundary by
/// a relative floor of `1e-9` so that every world has usable mass.
pub fn dirichlet_simplex(rng: &mut impl Rng, n: usize) -> FiniteSimplex {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            let x: f64 = Exp1.sample(rng);
            x.max(1e-9)
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    FiniteSimplex::from_weights(crate::belief::default_labels(n), w)
        .expect("positive finite weights")
}

/// A uniformly random nonempty event with `P(A) > min_mass`.
pub fn random_event(rng: &mut impl Rng, p: &FiniteSimplex, min_mass: f64) -> EventSet {
    let full = p.full_event().mask();
    loop {
        let a = EventSet::from_mask(rng.random::<u64>() & full);
        if !a.is_empty() && p.prob(a) > min_mass {
            return a;
        }
    }
}

/// A random event `A` with `P(A) > min_mass` and `P(¬A) > min_mass`, or `None`
/// when one world holds at least `1 - min_mass` (no such event exists then).
/// `min_mass` must be below `1/3`.
pub fn random_proper_event(rng: &mut impl Rng, p: &FiniteSimplex, min_mass: f64) -> Option<EventSet> {
    assert!(min_mass < 1.0 / 3.0, "min_mass must be below 1/3");
    let top = p.probs().iter().copied().fold(0.0, f64::max);
    if p.len() < 2 || top >= 1.0 - min_mass {
        return None;
    }
    let full = p.full_event();
    loop {
        let a = random_event(rng, p, min_mass);
        if a != full && p.prob(a.complement(p.len())) > min_mass {
            return Some(a);
        }
    }
}

/// Log-uniform on `[lo, hi]`.
pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// Entries uniform on `[lo, hi]`.
pub fn random_variable(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> RandomVariable {
    RandomVariable::new((0..n).map(|_| rng.random_range(lo..=hi)).collect())
        .expect("finite entries")
}
