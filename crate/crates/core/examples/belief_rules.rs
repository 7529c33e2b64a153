//! Conditioning, imaging, Jeffrey updates and Dempster-Shafer mass functions.

use conflearn::belief::{condition, ds_plaus_update, image, jeffrey};
use conflearn::{EventSet, FiniteSimplex, MassFunction};

fn labels() -> Vec<String> {
    ["rain", "snow", "sun"].iter().map(|s| s.to_string()).collect()
}

fn main() -> conflearn::Result<()> {
    let p = FiniteSimplex::new(labels(), vec![0.5, 0.2, 0.3])?;
    let wet = p.event(&["rain", "snow"])?;
    println!("P               {:?}", p.probs());
    println!("P | wet         {:?}", condition(&p, wet)?.probs());
    // sun moves to its nearest wet world, rain
    println!("image on wet    {:?}", image(&p, &[0, 1, 0], wet)?.probs());
    println!("jeffrey 0.9/0.1 {:?}", jeffrey(&p, &[wet, wet.complement(3)], &[0.9, 0.1])?.probs());

    let m = MassFunction::from_named(labels(), &[(vec!["rain", "snow"], 0.6), (vec!["rain", "snow", "sun"], 0.4)])?;
    let cold = MassFunction::simple_support(labels(), 0.5, EventSet::from_indices([1, 2]))?;
    let both = m.dempster(&cold)?;
    let snow = EventSet::singleton(1);
    println!("Bel(snow) {:.4}  Plaus(snow) {:.4}", both.bel(snow), both.plaus(snow));

    let updated = ds_plaus_update(&m, EventSet::singleton(0), 0.5)?;
    for (set, mass) in updated.focal_masses() {
        println!("m'({}) = {mass:.4}", updated.event_key(set));
    }
    Ok(())
}
