//! Named equivalence experiments between learners.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::belief::{ds_plaus_update, BeliefPoint, EventSet, FiniteSimplex, GaussianBelief, MassFunction};
use crate::domain::{kalman_combine, ConfidenceDomain};
use crate::error::{Error, Result};
use crate::flow::{integrate, trotter_interleave, IntegratorConfig, ParallelObservation};
use crate::learners::{
    boltzmann_observe, interp_observe, kalman_observe, potential_to_likelihood, BayesLearner, BayesModel,
    BoltzmannLearner, InterpLearner, KalmanLearner, Learner, Observation,
};
use crate::sampling::{derive_seed, dirichlet_simplex, log_uniform, rng, random_variable};

pub const EXPERIMENTS: [&str; 4] = ["bayes-boltzmann", "kalman-sequential", "interp-vs-ds", "trotter-convergence"];

#[derive(Clone, Debug, Serialize)]
pub struct EquivReport {
    pub experiment: String,
    /// The largest discrepancy, or for `interp-vs-ds` the disagreement that
    /// must stay above the tolerance.
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub details: Value,
}

pub fn run_experiment(name: &str, instances: usize, seed: u64) -> Result<EquivReport> {
    let seed = derive_seed(seed, &["equiv", name]);
    match name {
        "bayes-boltzmann" => bayes_boltzmann(instances, seed),
        "kalman-sequential" => kalman_sequential(instances, seed),
        "interp-vs-ds" => interp_vs_ds(instances, seed),
        "trotter-convergence" => trotter_convergence(),
        other => Err(Error::Config(format!(
            "unknown experiment `{other}`; expected one of {}",
            EXPERIMENTS.join(", ")
        ))),
    }
}

fn tv(a: &FiniteSimplex, b: &FiniteSimplex) -> f64 {
    a.tv_distance(b)
}

/// Tempered Bayes against Boltzmann with `V = -log P(e|·)`, and the potential
/// construction against Boltzmann with the original potentials.
fn bayes_boltzmann(instances: usize, seed: u64) -> Result<EquivReport> {
    let mut r = rng(seed);
    let add = ConfidenceDomain::Add;
    let (mut forward, mut round_trip) = (0.0f64, 0.0f64);
    for _ in 0..instances {
        let n_h = r.random_range(2..=8);
        let n_e = r.random_range(1..=3);
        let prior = dirichlet_simplex(&mut r, n_h);
        let rows: Vec<Vec<f64>> = (0..n_e)
            .map(|_| (0..n_h).map(|_| r.random_range(0.05..=1.0)).collect())
            .collect();
        let evidence: Vec<String> = (0..n_e).map(|i| format!("e{i}")).collect();
        let model = BayesModel::new(prior.labels().to_vec(), evidence.clone(), rows.clone())?;
        let learner = BayesLearner::new(model);
        let theta: BeliefPoint = prior.clone().into();
        for (e, row) in evidence.iter().zip(&rows) {
            for beta in [1.0, log_uniform(&mut r, 1e-2, 10.0)] {
                let b = add.value(beta)?;
                let bayes = learner.observe(&Observation::Evidence(e.clone()), &b, &theta)?;
                let v = learner.potential(&Observation::Likelihood(row.clone()))?;
                let boltz = boltzmann_observe(&v, &b, &prior)?;
                forward = forward.max(tv(bayes.as_simplex()?, &boltz));
            }
        }
        let m = r.random_range(1..=4);
        let u: Vec<Vec<f64>> = (0..m)
            .map(|_| random_variable(&mut r, n_h, 0.0, 3.0).values().to_vec())
            .collect();
        let built = potential_to_likelihood(&u)?;
        for (j, row) in u.iter().enumerate() {
            let bayes = built.observe(&built.evidence()[j], &prior)?;
            let v = crate::belief::RandomVariable::new(row.clone())?;
            let boltz = boltzmann_observe(&v, built.star(), &prior)?;
            round_trip = round_trip.max(tv(&bayes, &boltz));
        }
    }
    let worst = forward.max(round_trip);
    Ok(EquivReport {
        experiment: "bayes-boltzmann".into(),
        max_discrepancy: worst,
        tolerance: 1e-12,
        passed: worst <= 1e-12,
        details: json!({"instances": instances, "forward": forward, "round_trip": round_trip}),
    })
}

/// Two sequential Kalman updates against one update with the combined pair,
/// and optimal-gain updates against added precisions.
fn kalman_sequential(instances: usize, seed: u64) -> Result<EquivReport> {
    let mut r = rng(seed);
    let kd = ConfidenceDomain::Kalman;
    let (mut combined, mut precision) = (0.0f64, 0.0f64);
    for _ in 0..instances {
        let b = GaussianBelief::new(r.random_range(-5.0..5.0), log_uniform(&mut r, 1e-2, 10.0))?;
        let z = r.random_range(-5.0..5.0);
        let c1 = kd.pair(r.random_range(0.0..=1.0), log_uniform(&mut r, 1e-2, 1e2))?;
        let c2 = kd.pair(r.random_range(0.0..=1.0), log_uniform(&mut r, 1e-2, 1e2))?;
        let seq = kalman_observe(z, &c2, &kalman_observe(z, &c1, &b)?)?;
        let one = kalman_observe(z, &kalman_combine(&c1, &c2)?, &b)?;
        combined = combined
            .max((seq.mean - one.mean).abs())
            .max((seq.variance - one.variance).abs());

        let (r1, r2) = (log_uniform(&mut r, 1e-2, 1e2), log_uniform(&mut r, 1e-2, 1e2));
        let mid = kalman_observe(z, &KalmanLearner::optimal_confidence(&b, r1)?, &b)?;
        let end = kalman_observe(z, &KalmanLearner::optimal_confidence(&mid, r2)?, &mid)?;
        let expected = 1.0 / b.variance + 1.0 / r1 + 1.0 / r2;
        precision = precision.max(((1.0 / end.variance) - expected).abs() / expected);
    }
    let worst = combined.max(precision);
    Ok(EquivReport {
        experiment: "kalman-sequential".into(),
        max_discrepancy: worst,
        tolerance: 1e-10,
        passed: worst <= 1e-10,
        details: json!({"instances": instances, "combined": combined, "relative_precision": precision}),
    })
}

/// Interpolation and DS plausibility updates on probability priors: equal at
/// `α ∈ {0, 1}`, different in between.
fn interp_vs_ds(instances: usize, seed: u64) -> Result<EquivReport> {
    let p = FiniteSimplex::from_probs(vec![0.7, 0.3])?;
    let a = EventSet::singleton(0);
    let interp = interp_observe(a, 0.5, &p)?.prob(a);
    let ds = ds_plaus_update(&MassFunction::from_probability(&p)?, a, 0.5)?.bel(a);

    let mut r = rng(seed);
    let mut endpoint = 0.0f64;
    let mut smallest_gap = f64::INFINITY;
    for _ in 0..instances {
        let n = r.random_range(2..=6);
        let q = dirichlet_simplex(&mut r, n);
        let ev = loop {
            let ev = EventSet::from_mask(r.random_range(1..(1u64 << n) - 1));
            if q.prob(ev) > 1e-3 && q.prob(ev) < 1.0 - 1e-3 {
                break ev;
            }
        };
        let m = MassFunction::from_probability(&q)?;
        for alpha in [0.0, 1.0] {
            let i = interp_observe(ev, alpha, &q)?;
            let d = ds_plaus_update(&m, ev, alpha)?.to_probability().ok_or_else(|| {
                Error::Numerical("DS update of a probability left the probabilities".into())
            })?;
            endpoint = endpoint.max(tv(&i, &d));
        }
        let gap = (1..100)
            .map(|k| -> Result<f64> {
                let alpha = k as f64 / 100.0;
                let i = interp_observe(ev, alpha, &q)?.prob(ev);
                Ok((i - ds_plaus_update(&m, ev, alpha)?.bel(ev)).abs())
            })
            .try_fold(0.0f64, |acc, g| g.map(|g| acc.max(g)))?;
        smallest_gap = smallest_gap.min(gap);
    }
    let disagreement = (interp - ds).abs();
    let passed = disagreement >= 1e-3 && endpoint <= 1e-12;
    Ok(EquivReport {
        experiment: "interp-vs-ds".into(),
        max_discrepancy: disagreement,
        tolerance: 1e-3,
        passed,
        details: json!({
            "prior": [0.7, 0.3],
            "alpha": 0.5,
            "interp_posterior": interp,
            "ds_belief": ds,
            "instances": instances,
            "endpoint_discrepancy": endpoint,
            "smallest_interior_gap": smallest_gap,
        }),
    })
}

pub(crate) const TROTTER_ROUNDS: [u64; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

/// Errors of Trotter interleaving against the integral of the summed field.
pub fn trotter_errors(
    learner: Arc<dyn Learner>,
    phi1: &Observation,
    phi2: &Observation,
    chi: f64,
    theta0: &BeliefPoint,
    rounds: &[u64],
    cfg: &IntegratorConfig,
) -> Result<(BeliefPoint, Vec<f64>)> {
    let field = ParallelObservation::new(vec![(phi1.clone(), 1.0), (phi2.clone(), 1.0)])?.field(learner.clone())?;
    let reference = integrate(&field, theta0, &ConfidenceDomain::Add.value(chi)?, cfg)?;
    let errors = rounds
        .iter()
        .map(|&n| {
            let t = trotter_interleave(learner.as_ref(), phi1, phi2, chi, n, theta0)?;
            t.distance(&reference)
                .ok_or_else(|| Error::InvalidBelief("interleaving changed the belief space".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((reference, errors))
}

fn trotter_convergence() -> Result<EquivReport> {
    let p: BeliefPoint = FiniteSimplex::from_probs(vec![0.4, 0.3, 0.2, 0.1])?.into();
    let a = Observation::Event(EventSet::from_indices([0, 1]));
    let b = Observation::Event(EventSet::from_indices([1, 2]));
    let cfg = IntegratorConfig {
        step: 1e-4,
        ..IntegratorConfig::default()
    };
    let (_, errors) = trotter_errors(
        Arc::new(InterpLearner),
        &a,
        &b,
        1.0,
        &p,
        &TROTTER_ROUNDS,
        &cfg,
    )?;
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    let ratio_ok = ratios.iter().all(|r| (0.3..=0.7).contains(r));

    let q = FiniteSimplex::from_probs(vec![0.2, 0.5, 0.3])?;
    let u = crate::belief::RandomVariable::new(vec![1.0, 0.0, 2.0])?;
    let v = crate::belief::RandomVariable::new(vec![0.5, 1.5, -1.0])?;
    let exact = boltzmann_observe(&u.plus(&v)?, &ConfidenceDomain::Add.value(1.2)?, &q)?;
    let one = trotter_interleave(
        &BoltzmannLearner,
        &Observation::Potential(u),
        &Observation::Potential(v),
        1.2,
        1,
        &q.into(),
    )?;
    let commuting = tv(one.as_simplex()?, &exact);
    let worst_ratio_miss = ratios
        .iter()
        .map(|r| (0.3 - r).max(r - 0.7).max(0.0))
        .fold(0.0, f64::max);
    Ok(EquivReport {
        experiment: "trotter-convergence".into(),
        max_discrepancy: worst_ratio_miss.max(commuting),
        tolerance: 1e-12,
        passed: ratio_ok && commuting <= 1e-12,
        details: json!({
            "rounds": TROTTER_ROUNDS,
            "errors": errors,
            "ratios": ratios,
            "commuting_error": commuting,
        }),
    })
}
