//! Interpolation and the Dempster-Shafer plausibility update agree at full
//! and zero confidence but not in between.

use conflearn::belief::ds_plaus_update;
use conflearn::learners::interp_observe;
use conflearn::{EventSet, FiniteSimplex, MassFunction};

fn main() -> conflearn::Result<()> {
    let p = FiniteSimplex::from_probs(vec![0.7, 0.3])?;
    let m = MassFunction::from_probability(&p)?;
    let a = EventSet::singleton(0);
    println!("{:>5} {:>10} {:>10}", "alpha", "interp", "ds");
    for k in 0..=10 {
        let alpha = k as f64 / 10.0;
        let i = interp_observe(a, alpha, &p)?.prob(a);
        let d = ds_plaus_update(&m, a, alpha)?.bel(a);
        println!("{alpha:>5.1} {i:>10.6} {d:>10.6}");
    }
    Ok(())
}
