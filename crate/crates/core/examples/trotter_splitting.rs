//! Alternating small updates converge to the parallel flow at first order.

use std::sync::Arc;

use conflearn::flow::{integrate, trotter_interleave, IntegratorConfig, ParallelObservation};
use conflearn::learners::InterpLearner;
use conflearn::{BeliefPoint, ConfidenceDomain, EventSet, FiniteSimplex, Observation};

fn main() -> conflearn::Result<()> {
    let p: BeliefPoint = FiniteSimplex::from_probs(vec![0.4, 0.3, 0.2, 0.1])?.into();
    let a = Observation::Event(EventSet::from_indices([0, 1]));
    let b = Observation::Event(EventSet::from_indices([1, 2]));
    let field = ParallelObservation::new(vec![(a.clone(), 1.0), (b.clone(), 1.0)])?.field(Arc::new(InterpLearner))?;
    let cfg = IntegratorConfig { step: 1e-4, ..IntegratorConfig::default() };
    let reference = integrate(&field, &p, &ConfidenceDomain::Add.value(1.0)?, &cfg)?;
    let mut last = None;
    for n in [16u64, 32, 64, 128, 256, 512] {
        let err = trotter_interleave(&InterpLearner, &a, &b, 1.0, n, &p)?
            .distance(&reference)
            .expect("same space");
        let ratio = last.map(|l: f64| format!("{:.3}", err / l)).unwrap_or_default();
        println!("n={n:<4} error {err:.3e} {ratio}");
        last = Some(err);
    }
    Ok(())
}
