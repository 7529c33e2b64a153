//! Combining confidences in each registered domain, and moving between the
//! fractional and additive scales.

use conflearn::domain::{add_to_frac, frac_to_add, kalman_combine, list_extend, registered_domains};
use conflearn::ConfidenceDomain;

fn main() -> conflearn::Result<()> {
    let frac = ConfidenceDomain::Frac;
    let (a, b) = (frac.value(0.5)?, frac.value(0.2)?);
    println!("frac: 0.5 * 0.2 = {}", frac.combine(&a, &b)?.display_value());

    for beta in [0.5, 1.0, 2.0] {
        let t = frac_to_add(beta, &a)?;
        let back = add_to_frac(beta, &t)?;
        println!("beta={beta}: 0.5 -> {} -> {}", t.display_value(), back.display_value());
    }

    let max = ConfidenceDomain::Max;
    println!("max: 0.3 * 0.7 = {}", max.combine(&max.value(0.3)?, &max.value(0.7)?)?.display_value());

    let kd = ConfidenceDomain::Kalman;
    let c = kalman_combine(&kd.pair(0.5, 1.0)?, &kd.pair(0.5, 2.0)?)?;
    println!("kalman: (0.5, 1) then (0.5, 2) = {}", c.display_value());

    let lists = list_extend(&frac);
    let xs = lists.list(vec![a.clone(), b.clone()])?;
    let ys = lists.list(vec![frac.top()])?;
    println!("list: {} ++ {} = {}", xs.display_value(), ys.display_value(), lists.combine(&xs, &ys)?.display_value());

    for d in registered_domains() {
        println!("{:<10} bot={:<6} top={:<6} commutative={}", d.id(), d.bot().display_value(), d.top().display_value(), d.is_commutative());
    }
    Ok(())
}
