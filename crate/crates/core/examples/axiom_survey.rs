//! Runs the axiom suite on every built-in learner and mutant.

use conflearn::axioms::{run_suite, CheckConfig};
use conflearn::learners::{learner, BUILTIN_LEARNERS, MUTANT_LEARNERS};

fn main() -> conflearn::Result<()> {
    let cfg = CheckConfig::default();
    let only: Vec<String> = std::env::args().skip(1).collect();
    for id in BUILTIN_LEARNERS.iter().chain(&MUTANT_LEARNERS).chain(&["list:interp", "list:kalman"]) {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let l = learner(id)?;
        let t = std::time::Instant::now();
        for r in run_suite(l.as_ref(), &cfg)? {
            println!("{r}");
        }
        eprintln!("{id}: {:?}", t.elapsed());
    }
    Ok(())
}
