//! Max-domain updates on a graded table and their additive form.

use std::collections::BTreeMap;

use conflearn::belief::GradedBeliefTable;
use conflearn::learners::MaxGradedLearner;
use conflearn::{BeliefPoint, ConfidenceDomain, Learner, Observation};

fn main() -> conflearn::Result<()> {
    let table = GradedBeliefTable::new(BTreeMap::from([("rain".to_string(), 0.4), ("wind".to_string(), 0.1)]))?;
    let theta: BeliefPoint = table.into();
    let phi = Observation::Prop("rain".into());
    let max = ConfidenceDomain::Max;
    for chi in [0.2, 0.4, 0.7, 0.95] {
        let chi = max.value(chi)?;
        let direct = MaxGradedLearner.observe(&phi, &chi, &theta)?;
        let g = MaxGradedLearner.translate(&phi, &chi, &theta)?;
        let flowed = MaxGradedLearner.flow(&phi, &g, &theta)?;
        println!(
            "chi {:<5} g {:<22} rain {} (flow {})",
            chi.display_value(),
            g.display_value(),
            direct.as_graded()?.get("rain"),
            flowed.as_graded()?.get("rain")
        );
    }
    Ok(())
}
