//! Tempered Bayesian updates are Boltzmann updates with `V = -log P(e|h)`,
//! and any set of potentials can be encoded as a Bayes model.

use conflearn::belief::RandomVariable;
use conflearn::learners::{boltzmann_observe, potential_to_likelihood, BayesLearner, BayesModel};
use conflearn::{BeliefPoint, ConfidenceDomain, FiniteSimplex, Learner, Observation};

fn main() -> conflearn::Result<()> {
    let add = ConfidenceDomain::Add;
    let prior = FiniteSimplex::new(vec!["fair".into(), "loaded".into()], vec![0.9, 0.1])?;
    let model = BayesModel::new(
        prior.labels().to_vec(),
        vec!["six".into()],
        vec![vec![1.0 / 6.0, 0.5]],
    )?;
    let bayes = BayesLearner::new(model);
    let theta: BeliefPoint = prior.clone().into();
    for beta in [0.5, 1.0, 3.0] {
        let post = bayes.observe(&Observation::Evidence("six".into()), &add.value(beta)?, &theta)?;
        let v = RandomVariable::new(vec![-(1.0f64 / 6.0).ln(), -(0.5f64).ln()])?;
        let boltz = boltzmann_observe(&v, &add.value(beta)?, &prior)?;
        println!("beta={beta}: bayes {:?} boltzmann {:?}", post.as_simplex()?.probs(), boltz.probs());
    }

    let u = vec![vec![0.0, 1.0], vec![2.0, 0.5]];
    let built = potential_to_likelihood(&u)?;
    for (j, e) in built.evidence().iter().enumerate() {
        let v = RandomVariable::new(u[j].clone())?;
        println!(
            "{e}: bayes {:?} boltzmann {:?}",
            built.observe(e, &prior)?.probs(),
            boltzmann_observe(&v, built.star(), &prior)?.probs()
        );
    }
    Ok(())
}
