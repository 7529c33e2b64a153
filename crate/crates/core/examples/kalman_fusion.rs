//! Sequential Kalman measurement updates against a single fused update.

use conflearn::domain::kalman_combine;
use conflearn::learners::{kalman_observe, KalmanLearner};
use conflearn::{ConfidenceDomain, GaussianBelief};

fn main() -> conflearn::Result<()> {
    let kd = ConfidenceDomain::Kalman;
    let prior = GaussianBelief::new(0.0, 4.0)?;
    let z = 10.0;
    let (c1, c2) = (kd.pair(0.8, 1.0)?, kd.pair(0.3, 2.0)?);
    let seq = kalman_observe(z, &c2, &kalman_observe(z, &c1, &prior)?)?;
    let fused = kalman_combine(&c1, &c2)?;
    let once = kalman_observe(z, &fused, &prior)?;
    println!("sequential {:.12} {:.12}", seq.mean, seq.variance);
    println!("fused {}  {:.12} {:.12}", fused.display_value(), once.mean, once.variance);

    // optimal gains add precisions
    let mut b = prior;
    for r2 in [1.0, 0.5, 2.0] {
        b = kalman_observe(z, &KalmanLearner::optimal_confidence(&b, r2)?, &b)?;
        println!("after r2={r2}: mean {:.6}, precision {:.6}", b.mean, 1.0 / b.variance);
    }
    Ok(())
}
