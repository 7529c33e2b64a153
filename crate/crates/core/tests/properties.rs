use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::Config;

use conflearn::axioms::{run_suite, CheckConfig};
use conflearn::belief::{
    condition, default_labels, image, jeffrey, GradedBeliefTable, ParamVector, RandomVariable,
};
use conflearn::domain::{confidence_distance, frac_to_add, kalman_combine, list_extend, registered_domains};
use conflearn::flow::{
    combine_fields, derivative_field, integrate, natural_gradient, trajectory, IntegratorConfig,
};
use conflearn::learners::{
    boltzmann_observe, interp_observe, kalman_observe, learner, BoltzmannLearner, Classifier,
    ClassifierConfig, InterpLearner, KalmanLearner, ListLifted, MaxGradedLearner,
};
use conflearn::{
    BeliefPoint, ConfidenceDomain, ConfidenceValue, EventSet, FiniteSimplex, GaussianBelief, Learner,
    MassFunction, Observation,
};

fn simplex(weights: &[f64]) -> FiniteSimplex {
    FiniteSimplex::from_weights(default_labels(weights.len()), weights.to_vec()).unwrap()
}

fn prior() -> impl Strategy<Value = FiniteSimplex> {
    prop::collection::vec(0.05f64..1.0, 2..=6).prop_map(|w| simplex(&w))
}

/// A prior with a proper event.
fn prior_event() -> impl Strategy<Value = (FiniteSimplex, EventSet)> {
    prior().prop_flat_map(|p| {
        let n = p.len();
        (Just(p), (1u64..(1 << n) - 1).prop_map(EventSet::from_mask))
    })
}

fn prior_potential() -> impl Strategy<Value = (FiniteSimplex, Vec<f64>)> {
    prior().prop_flat_map(|p| {
        let n = p.len();
        (Just(p), prop::collection::vec(-2.0f64..2.0, n))
    })
}

/// Draws a domain element: `⊥` or `⊤` now and then, otherwise an interior value.
fn element(d: &ConfidenceDomain, tag: u8, x: f64, y: f64) -> ConfidenceValue {
    match tag % 8 {
        0 => d.bot(),
        1 => d.top(),
        _ => match d {
            ConfidenceDomain::Frac | ConfidenceDomain::Max => d.value(x * 0.999).unwrap(),
            ConfidenceDomain::Add => d.value(x * 20.0).unwrap(),
            ConfidenceDomain::Count => d.value((x * 50.0).floor()).unwrap(),
            ConfidenceDomain::Kalman => d.pair(0.1 + 0.9 * x, 0.01 + 10.0 * y).unwrap(),
            ConfidenceDomain::List(inner) => {
                let items = (0..tag % 3 + 1).map(|i| element(inner, tag / 3 + i, (x + 0.37 * f64::from(i)) % 1.0, y));
                d.list(items.collect()).unwrap()
            }
        },
    }
}

fn element_strategy() -> impl Strategy<Value = (u8, f64, f64)> {
    (any::<u8>(), 0.0f64..1.0, 0.0f64..1.0)
}

fn sums_to_one(p: &FiniteSimplex) -> bool {
    let s: f64 = p.probs().iter().sum();
    (s - 1.0).abs() <= 1e-10 && p.probs().iter().all(|x| *x >= 0.0)
}

proptest! {
    #![proptest_config(Config::with_cases(1000))]

    #[test]
    fn domains_are_associative(a in element_strategy(), b in element_strategy(), c in element_strategy()) {
        for d in registered_domains() {
            let (a, b, c) = (element(&d, a.0, a.1, a.2), element(&d, b.0, b.1, b.2), element(&d, c.0, c.1, c.2));
            let left = d.combine(&d.combine(&a, &b).unwrap(), &c).unwrap();
            let right = d.combine(&a, &d.combine(&b, &c).unwrap()).unwrap();
            let err = confidence_distance(&left, &right).unwrap();
            prop_assert!(err <= 1e-12, "{}: {} vs {}", d.id(), left.display_value(), right.display_value());
        }
    }
}

proptest! {
    #![proptest_config(Config::with_cases(256))]

    #[test]
    fn bot_is_neutral_and_top_absorbing(a in element_strategy()) {
        for d in registered_domains() {
            let a = element(&d, a.0, a.1, a.2);
            prop_assert_eq!(d.combine(&d.bot(), &a).unwrap(), a.clone());
            prop_assert_eq!(d.combine(&a, &d.bot()).unwrap(), a.clone());
            prop_assert!(d.combine(&a, &d.top()).unwrap().is_top());
            prop_assert!(d.combine(&d.top(), &a).unwrap().is_top());
        }
    }

    #[test]
    fn max_is_idempotent_and_commutative(a in element_strategy(), b in element_strategy()) {
        let d = ConfidenceDomain::Max;
        let (a, b) = (element(&d, a.0, a.1, a.2), element(&d, b.0, b.1, b.2));
        prop_assert_eq!(d.combine(&a, &a).unwrap(), a.clone());
        prop_assert_eq!(d.combine(&a, &b).unwrap(), d.combine(&b, &a).unwrap());
    }

    #[test]
    fn isomorphism_is_monotone(x in 0.0f64..1.0, y in 0.0f64..1.0, beta in 0.1f64..5.0) {
        let d = ConfidenceDomain::Frac;
        let (lo, hi) = (x.min(y), x.max(y));
        let a = frac_to_add(beta, &d.value(lo).unwrap()).unwrap();
        let b = frac_to_add(beta, &d.value(hi).unwrap()).unwrap();
        prop_assert!(ConfidenceDomain::Add.leq(&a, &b).unwrap());
    }

    #[test]
    fn list_lifting_is_combinative(
        (p, a) in prior_event(), x in 0.0f64..0.99, y in 0.0f64..0.99, z in 0.0f64..0.99,
    ) {
        let lifted = ListLifted::new(Box::new(InterpLearner));
        let d = list_extend(&ConfidenceDomain::Frac);
        let f = |s: f64| ConfidenceDomain::Frac.value(s).unwrap();
        let c1 = d.list(vec![f(x), f(y)]).unwrap();
        let c2 = d.list(vec![f(z)]).unwrap();
        let phi = Observation::Event(a);
        let theta: BeliefPoint = p.into();
        let seq = lifted.observe(&phi, &c2, &lifted.observe(&phi, &c1, &theta).unwrap()).unwrap();
        let one = lifted.observe(&phi, &d.combine(&c1, &c2).unwrap(), &theta).unwrap();
        prop_assert!(seq.distance(&one).unwrap() <= 1e-10);
    }

    #[test]
    fn simplex_updates_stay_normalized((p, a) in prior_event(), alpha in 0.0f64..=1.0, seed in any::<u64>()) {
        let n = p.len();
        prop_assert!(sums_to_one(&condition(&p, a).unwrap()));
        prop_assert!(sums_to_one(&interp_observe(a, alpha, &p).unwrap()));
        let members: Vec<usize> = a.indices().collect();
        let f: Vec<usize> = (0..n)
            .map(|w| if a.contains(w) { w } else { members[(seed as usize + w) % members.len()] })
            .collect();
        let im = image(&p, &f, a).unwrap();
        prop_assert!(sums_to_one(&im));
        prop_assert!(im.tv_distance(&image(&im, &f, a).unwrap()) <= 1e-10);
        let parts = [a, a.complement(n)];
        let pi = [alpha, 1.0 - alpha];
        if (0.0..1.0).contains(&alpha) && alpha > 0.0 {
            let j = jeffrey(&p, &parts, &pi).unwrap();
            prop_assert!(sums_to_one(&j));
            prop_assert!(j.tv_distance(&jeffrey(&j, &parts, &pi).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn boltzmann_stays_normalized((p, v) in prior_potential(), beta in 0.0f64..50.0) {
        let v = RandomVariable::new(v).unwrap();
        let q = boltzmann_observe(&v, &ConfidenceDomain::Add.value(beta).unwrap(), &p).unwrap();
        prop_assert!(sums_to_one(&q));
    }

    #[test]
    fn belief_below_plausibility(
        n in 2usize..=5,
        sets in prop::collection::vec((1u64..32, 0.01f64..1.0), 1..6),
        u in 1u64..32,
    ) {
        let full = (1u64 << n) - 1;
        let mut masses = BTreeMap::new();
        for (s, w) in &sets {
            let s = s & full;
            let s = if s == 0 { full } else { s };
            *masses.entry(EventSet::from_mask(s)).or_insert(0.0) += w;
        }
        let z: f64 = masses.values().sum();
        masses.values_mut().for_each(|w| *w /= z);
        let m = MassFunction::new(default_labels(n), masses).unwrap();
        let u = EventSet::from_mask(u & full);
        prop_assert!(m.bel(u) <= m.plaus(u) + 1e-12);
    }

    #[test]
    fn simple_supports_combine_fractionally(n in 2usize..=5, mask in 1u64..32, a1 in 0.0f64..1.0, a2 in 0.0f64..1.0) {
        let full = (1u64 << n) - 1;
        let a = EventSet::from_mask(if mask & full == 0 { 1 } else { mask & full });
        let s1 = MassFunction::simple_support(default_labels(n), a1, a).unwrap();
        let s2 = MassFunction::simple_support(default_labels(n), a2, a).unwrap();
        let both = s1.dempster(&s2).unwrap();
        let expected = a1 + a2 - a1 * a2;
        let want = if a == EventSet::full(n) { 1.0 } else { expected };
        prop_assert!((both.bel(a) - want).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(Config::with_cases(500))]

    #[test]
    fn interp_is_combinative((p, a) in prior_event(), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let d = ConfidenceDomain::Frac;
        let (c1, c2) = (d.value(x).unwrap(), d.value(y).unwrap());
        let phi = Observation::Event(a);
        let theta: BeliefPoint = p.into();
        let seq = InterpLearner.observe(&phi, &c2, &InterpLearner.observe(&phi, &c1, &theta).unwrap()).unwrap();
        let one = InterpLearner.observe(&phi, &d.combine(&c1, &c2).unwrap(), &theta).unwrap();
        prop_assert!(seq.distance(&one).unwrap() <= 1e-10);
    }

    #[test]
    fn boltzmann_is_combinative((p, v) in prior_potential(), x in 0.0f64..5.0, y in 0.0f64..5.0) {
        let d = ConfidenceDomain::Add;
        let phi = Observation::Potential(RandomVariable::new(v).unwrap());
        let theta: BeliefPoint = p.into();
        let (c1, c2) = (d.value(x).unwrap(), d.value(y).unwrap());
        let seq = BoltzmannLearner
            .observe(&phi, &c2, &BoltzmannLearner.observe(&phi, &c1, &theta).unwrap())
            .unwrap();
        let one = BoltzmannLearner.observe(&phi, &d.value(x + y).unwrap(), &theta).unwrap();
        prop_assert!(seq.distance(&one).unwrap() <= 1e-10);
    }

    #[test]
    fn kalman_is_combinative(
        mean in -5.0f64..5.0, var in 0.01f64..10.0, z in -5.0f64..5.0,
        k1 in 0.0f64..=1.0, r1 in 0.01f64..100.0, k2 in 0.0f64..=1.0, r2 in 0.01f64..100.0,
    ) {
        let d = ConfidenceDomain::Kalman;
        let b = GaussianBelief::new(mean, var).unwrap();
        let (c1, c2) = (d.pair(k1, r1).unwrap(), d.pair(k2, r2).unwrap());
        let seq = kalman_observe(z, &c2, &kalman_observe(z, &c1, &b).unwrap()).unwrap();
        let one = kalman_observe(z, &kalman_combine(&c1, &c2).unwrap(), &b).unwrap();
        prop_assert!((seq.mean - one.mean).abs() <= 1e-10);
        prop_assert!((seq.variance - one.variance).abs() <= 1e-10 * seq.variance.max(1.0));
    }

    #[test]
    fn max_graded_is_combinative(deg in 0.0f64..1.0, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let d = ConfidenceDomain::Max;
        let theta: BeliefPoint = GradedBeliefTable::new(BTreeMap::from([("q".to_string(), deg)])).unwrap().into();
        let phi = Observation::Prop("q".into());
        let (c1, c2) = (d.value(x).unwrap(), d.value(y).unwrap());
        let seq = MaxGradedLearner
            .observe(&phi, &c2, &MaxGradedLearner.observe(&phi, &c1, &theta).unwrap())
            .unwrap();
        let one = MaxGradedLearner.observe(&phi, &d.combine(&c1, &c2).unwrap(), &theta).unwrap();
        prop_assert_eq!(seq, one);
    }

    #[test]
    fn natural_gradient_matches_closed_form((p, v) in prior_potential()) {
        let rv = RandomVariable::new(v.clone()).unwrap();
        let g = natural_gradient(&p, |q| q.expectation(&rv)).unwrap();
        let mean = p.expectation(&rv).unwrap();
        for ((c, pi), vi) in g.components.iter().zip(p.probs()).zip(&v) {
            prop_assert!((c - pi * (vi - mean)).abs() <= 1e-8);
        }
    }

    #[test]
    fn field_sums_commute((p, a) in prior_event(), (q, v) in prior_potential()) {
        let interp: Arc<dyn Learner> = Arc::new(InterpLearner);
        let f1 = derivative_field(interp.clone(), Observation::Event(a));
        let f2 = derivative_field(interp, Observation::Event(a.complement(p.len())));
        let ab = combine_fields(&[f1.clone(), f2.clone()], &[1.0, 2.0]).unwrap();
        let ba = combine_fields(&[f2, f1], &[2.0, 1.0]).unwrap();
        let theta: BeliefPoint = p.into();
        prop_assert_eq!(ab.components(&theta).unwrap(), ba.components(&theta).unwrap());

        let boltz: Arc<dyn Learner> = Arc::new(BoltzmannLearner);
        let w: Vec<f64> = v.iter().rev().copied().collect();
        let g1 = derivative_field(boltz.clone(), Observation::Potential(RandomVariable::new(v).unwrap()));
        let g2 = derivative_field(boltz, Observation::Potential(RandomVariable::new(w).unwrap()));
        let theta: BeliefPoint = q.into();
        let x = combine_fields(&[g1.clone(), g2.clone()], &[1.0, 1.0]).unwrap().components(&theta).unwrap();
        let y = combine_fields(&[g2, g1], &[1.0, 1.0]).unwrap().components(&theta).unwrap();
        prop_assert_eq!(x, y);
    }
}

proptest! {
    #![proptest_config(Config::with_cases(64))]

    #[test]
    fn flows_are_additive((p, a) in prior_event(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let n = p.len();
        let field = combine_fields(
            &[
                derivative_field(Arc::new(InterpLearner), Observation::Event(a)),
                derivative_field(Arc::new(InterpLearner), Observation::Event(a.complement(n))),
            ],
            &[1.0, 0.5],
        )
        .unwrap();
        let add = |x: f64| ConfidenceDomain::Add.value(x).unwrap();
        let cfg = IntegratorConfig::default();
        let theta: BeliefPoint = p.into();
        let whole = integrate(&field, &theta, &add(s + t), &cfg).unwrap();
        let split = integrate(&field, &integrate(&field, &theta, &add(t), &cfg).unwrap(), &add(s), &cfg).unwrap();
        prop_assert!(whole.distance(&split).unwrap() <= 1e-8);
    }

    #[test]
    fn optimizing_flows_raise_belief((p, v) in prior_potential()) {
        let phi = Observation::Potential(RandomVariable::new(v).unwrap());
        let field = derivative_field(Arc::new(BoltzmannLearner), phi.clone());
        let path = trajectory(&field, &p.into(), 3.0, 0.1, &IntegratorConfig::default()).unwrap();
        let bel: Vec<f64> = path.points.iter().map(|q| BoltzmannLearner.bel(&phi, q).unwrap()).collect();
        prop_assert!(bel.windows(2).all(|w| w[1] >= w[0] - 1e-10));
    }

    #[test]
    fn interp_residual_closes_the_gap((p, a) in prior_event(), x in 0.0f64..0.99, y in 0.0f64..0.99) {
        let (lo, hi) = (x.min(y), x.max(y));
        let delta = (hi - lo) / (1.0 - lo);
        let d = ConfidenceDomain::Frac;
        let phi = Observation::Event(a);
        let theta: BeliefPoint = p.into();
        let at_lo = InterpLearner.observe(&phi, &d.value(lo).unwrap(), &theta).unwrap();
        let via = InterpLearner.observe(&phi, &d.value(delta).unwrap(), &at_lo).unwrap();
        let at_hi = InterpLearner.observe(&phi, &d.value(hi).unwrap(), &theta).unwrap();
        prop_assert!(via.distance(&at_hi).unwrap() <= 1e-10);
    }

    #[test]
    fn classifier_is_combinative(
        theta in prop::collection::vec(-1.0f64..1.0, 9),
        x in prop::collection::vec(-2.0f64..2.0, 2),
        y in 0usize..3, m in 0u64..10, n in 0u64..10,
    ) {
        let c = Classifier::new(ClassifierConfig::default()).unwrap();
        let d = ConfidenceDomain::Count;
        let phi = Observation::Example { x, y };
        let theta: BeliefPoint = ParamVector::new(theta).unwrap().into();
        let (cm, cn) = (d.value(m as f64).unwrap(), d.value(n as f64).unwrap());
        let seq = c.observe(&phi, &cn, &c.observe(&phi, &cm, &theta).unwrap()).unwrap();
        let one = c.observe(&phi, &d.combine(&cm, &cn).unwrap(), &theta).unwrap();
        prop_assert!(seq.distance(&one).unwrap() <= 1e-10);
    }
}

#[test]
fn kalman_optimal_gain_adds_precision() {
    let b = GaussianBelief::new(1.0, 2.0).unwrap();
    let c = KalmanLearner::optimal_confidence(&b, 0.5).unwrap();
    let after = kalman_observe(3.0, &c, &b).unwrap();
    assert!((1.0 / after.variance - (0.5 + 2.0)).abs() < 1e-12);
}

#[test]
fn axiom_reports_are_deterministic() {
    let cfg = CheckConfig { samples: 30, ..CheckConfig::default() };
    for id in ["interp", "kalman", "mutant-squared"] {
        let l = learner(id).unwrap();
        let a = serde_json::to_string(&run_suite(l.as_ref(), &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(l.as_ref(), &cfg).unwrap()).unwrap();
        assert_eq!(a, b, "{id}");
    }
}
