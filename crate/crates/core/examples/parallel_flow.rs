//! Holding an event and its negation in parallel: the summed field flows to
//! the even mixture of the two conditionals.

use std::sync::Arc;

use conflearn::flow::{integrate, trajectory, IntegratorConfig, ParallelObservation};
use conflearn::learners::InterpLearner;
use conflearn::{ConfidenceDomain, EventSet, FiniteSimplex, Observation};

fn main() -> conflearn::Result<()> {
    let p = FiniteSimplex::new(vec!["a".into(), "b".into(), "c".into()], vec![0.8, 0.1, 0.1])?;
    let a = EventSet::singleton(0);
    let field = ParallelObservation::new(vec![(Observation::Event(a), 1.0), (Observation::Event(a.complement(3)), 1.0)])?
        .field(Arc::new(InterpLearner))?;
    let cfg = IntegratorConfig::default();
    let path = trajectory(&field, &p.clone().into(), 5.0, 1.0, &cfg)?;
    print!("{}", String::from_utf8_lossy(&path.to_csv()?));
    let limit = integrate(&field, &p.into(), &ConfidenceDomain::Add.top(), &cfg)?;
    println!("limit {:?}", limit.as_simplex()?.probs());
    Ok(())
}
