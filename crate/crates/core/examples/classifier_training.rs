//! Training steps as a confidence: `n` gradient steps, or `⊤` to convergence.

use conflearn::belief::ParamVector;
use conflearn::learners::{Classifier, ClassifierConfig};
use conflearn::{BeliefPoint, ConfidenceDomain, Learner, Observation};

fn main() -> conflearn::Result<()> {
    let c = Classifier::new(ClassifierConfig::default())?;
    let count = ConfidenceDomain::Count;
    let theta: BeliefPoint = ParamVector::new(vec![0.0; c.config().param_len()])?.into();
    let phi = Observation::Example { x: vec![1.0, -0.5], y: 2 };
    for n in [0.0, 1.0, 5.0, 50.0] {
        let t = c.observe(&phi, &count.value(n)?, &theta)?;
        let p = c.predict(&t.as_params()?.values, &[1.0, -0.5]);
        println!("{n:>4} steps: Bel {:.6}, p(y=2) {:.6}", c.bel(&phi, &t)?, p[2]);
    }
    let limit = c.observe(&phi, &count.top(), &theta)?;
    println!(" top: Bel {:.6}", c.bel(&phi, &limit)?);
    Ok(())
}
