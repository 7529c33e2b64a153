//! Fixed-step ODE integration of vector fields, with projection back onto the
//! belief space after every stage.

use std::collections::BTreeMap;
use std::path::Path;

use crate::belief::BeliefPoint;
use crate::domain::{ConfidenceValue, Payload};
use crate::error::{Error, Result};
use crate::persist::{format_float, write_atomic};

use super::VectorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Rk4,
    Euler,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub step: f64,
    /// Horizon for trajectories whose end time is `⊤`.
    pub t_max: f64,
    /// `‖field‖∞` below which a `⊤` integration has reached its limit.
    pub limit_tol: f64,
    /// Consecutive steps below `limit_tol` required to stop.
    pub limit_streak: u32,
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            scheme: Scheme::Rk4,
            step: 1e-3,
            t_max: 10.0,
            limit_tol: 1e-9,
            limit_streak: 10,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::param("step", format!("{} must be positive", self.step)));
        }
        if !(self.limit_tol.is_finite() && self.limit_tol > 0.0) {
            return Err(Error::param("limit_tol", format!("{} must be positive", self.limit_tol)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::param("t_max", format!("{} must be positive", self.t_max)));
        }
        if self.max_steps == 0 || self.limit_streak == 0 {
            return Err(Error::param("max_steps", "step cap and streak must be positive"));
        }
        Ok(())
    }
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn eval(field: &VectorField, theta: &BeliefPoint) -> Result<Vec<f64>> {
    let v = field.components(theta)?;
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numerical(format!("field `{}` is not finite", field.label())));
    }
    Ok(v)
}

/// One step of size `h`; returns the new point.
fn step(field: &VectorField, theta: &BeliefPoint, h: f64, scheme: Scheme) -> Result<BeliefPoint> {
    let y = theta.coords();
    let k1 = eval(field, theta)?;
    if k1.len() != y.len() {
        return Err(Error::Numerical("field dimension differs from belief".into()));
    }
    let next = match scheme {
        Scheme::Euler => axpy(&y, h, &k1),
        Scheme::Rk4 => {
            let k2 = eval(field, &theta.with_coords(&axpy(&y, h / 2.0, &k1))?)?;
            let k3 = eval(field, &theta.with_coords(&axpy(&y, h / 2.0, &k2))?)?;
            let k4 = eval(field, &theta.with_coords(&axpy(&y, h, &k3))?)?;
            (0..y.len())
                .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect()
        }
    };
    theta.with_coords(&next)
}

/// Integrates over `[0, t]` with uniform steps no longer than `cfg.step`.
fn integrate_finite(field: &VectorField, theta0: &BeliefPoint, t: f64, cfg: &IntegratorConfig) -> Result<BeliefPoint> {
    if t == 0.0 {
        return Ok(theta0.clone());
    }
    let n = ((t / cfg.step) * (1.0 - 1e-12)).ceil().max(1.0);
    if n > cfg.max_steps as f64 {
        return Err(Error::param("t", format!("{n} steps exceed the cap of {}", cfg.max_steps)));
    }
    let h = t / n;
    let mut theta = theta0.clone();
    for _ in 0..n as u64 {
        theta = step(field, &theta, h, cfg.scheme)?;
    }
    Ok(theta)
}

/// Runs until `‖field‖∞ < limit_tol` on `limit_streak` consecutive steps.
fn integrate_to_limit(field: &VectorField, theta0: &BeliefPoint, cfg: &IntegratorConfig) -> Result<BeliefPoint> {
    let mut theta = theta0.clone();
    let mut streak = 0;
    let mut norm = f64::INFINITY;
    for _ in 0..cfg.max_steps {
        norm = eval(field, &theta)?.iter().map(|c| c.abs()).fold(0.0, f64::max);
        if norm < cfg.limit_tol {
            streak += 1;
            if streak >= cfg.limit_streak {
                return Ok(theta);
            }
        } else {
            streak = 0;
        }
        theta = step(field, &theta, cfg.step, cfg.scheme)?;
    }
    Err(Error::NoLimit {
        steps: cfg.max_steps,
        norm,
    })
}

/// Flows `theta0` along `field` for additive time `t`; `t = ⊤` runs to the
/// limit point or fails with [`Error::NoLimit`].
pub fn integrate(
    field: &VectorField,
    theta0: &BeliefPoint,
    t: &ConfidenceValue,
    cfg: &IntegratorConfig,
) -> Result<BeliefPoint> {
    cfg.validate()?;
    match t.payload() {
        Payload::Bot => Ok(theta0.clone()),
        Payload::Top => integrate_to_limit(field, theta0, cfg),
        Payload::Real(r) if t.domain() == &crate::domain::ConfidenceDomain::Add => {
            integrate_finite(field, theta0, *r, cfg)
        }
        _ => Err(Error::DomainMismatch {
            expected: "add".into(),
            found: t.domain().id(),
        }),
    }
}

/// A sampled path: one row per sample key (time or confidence) with belief
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub key_label: String,
    pub labels: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
    pub points: Vec<BeliefPoint>,
    pub meta: BTreeMap<String, String>,
}

impl TrajectoryRecord {
    /// Builds rows from belief points. Columns are the union of coordinate
    /// names in first-seen order; absent coordinates read as 0.
    pub fn from_points(key_label: &str, keys: Vec<String>, points: Vec<BeliefPoint>) -> Self {
        let mut labels: Vec<String> = Vec::new();
        for p in &points {
            for l in p.coord_labels() {
                if !labels.contains(&l) {
                    labels.push(l);
                }
            }
        }
        let rows = keys
            .into_iter()
            .zip(&points)
            .map(|(k, p)| {
                let named: BTreeMap<String, f64> = p.coord_labels().into_iter().zip(p.coords()).collect();
                (k, labels.iter().map(|l| named.get(l).copied().unwrap_or(0.0)).collect())
            })
            .collect();
        TrajectoryRecord {
            key_label: key_label.to_string(),
            labels,
            rows,
            points,
            meta: BTreeMap::new(),
        }
    }

    pub fn final_point(&self) -> Option<&BeliefPoint> {
        self.points.last()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.key_label.clone()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (key, values) in &self.rows {
            let mut rec = vec![key.clone()];
            rec.extend(values.iter().map(|v| format_float(*v)));
            w.write_record(&rec)?;
        }
        w.into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_csv()?)
    }
}

/// Samples the flow at times `0, Δ, 2Δ, …` up to `t_end` (the last sample is
/// clipped to `t_end`): `⌈t_end/Δ⌉ + 1` rows.
pub fn trajectory(
    field: &VectorField,
    theta0: &BeliefPoint,
    t_end: f64,
    step_out: f64,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    if !(t_end.is_finite() && t_end >= 0.0) || !(step_out.is_finite() && step_out > 0.0) {
        return Err(Error::param("t_end", "need finite t_end >= 0 and step_out > 0"));
    }
    let samples = (t_end / step_out * (1.0 - 1e-12)).ceil() as usize;
    let mut times = vec![0.0];
    let mut points = vec![theta0.clone()];
    let mut theta = theta0.clone();
    for k in 1..=samples {
        let t = (k as f64 * step_out).min(t_end);
        let dt = t - times[k - 1];
        theta = integrate_finite(field, &theta, dt, cfg)?;
        times.push(t);
        points.push(theta.clone());
    }
    let keys = times.iter().map(|t| format_float(*t)).collect();
    let mut rec = TrajectoryRecord::from_points("t", keys, points);
    rec.meta.insert("field".into(), field.label().to_string());
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{EventSet, FiniteSimplex};
    use crate::domain::ConfidenceDomain;
    use crate::flow::{combine_fields, derivative_field};
    use crate::learners::{InterpLearner, Learner, Observation};
    use std::sync::Arc;

    fn p(v: &[f64]) -> BeliefPoint {
        FiniteSimplex::from_probs(v.to_vec()).unwrap().into()
    }

    fn interp_field(idx: &[usize]) -> VectorField {
        derivative_field(Arc::new(InterpLearner), Observation::Event(EventSet::from_indices(idx.iter().copied())))
    }

    #[test]
    fn zero_time_is_identity() {
        let f = interp_field(&[0, 1]);
        let cfg = IntegratorConfig::default();
        let theta = p(&[0.5, 0.3, 0.2]);
        assert_eq!(integrate(&f, &theta, &ConfidenceDomain::Add.bot(), &cfg).unwrap(), theta);
    }

    #[test]
    fn limit_of_interp_field_is_conditioning() {
        let f = interp_field(&[0, 1]);
        let cfg = IntegratorConfig::default();
        let out = integrate(&f, &p(&[0.5, 0.3, 0.2]), &ConfidenceDomain::Add.top(), &cfg).unwrap();
        assert!(out.distance(&p(&[0.625, 0.375, 0.0])).unwrap() < 1e-6);
    }

    #[test]
    fn finite_time_matches_closed_form() {
        let f = interp_field(&[0, 2]);
        let cfg = IntegratorConfig::default();
        let theta = p(&[0.2, 0.5, 0.3]);
        let t = ConfidenceDomain::Add.value(1.3).unwrap();
        let num = integrate(&f, &theta, &t, &cfg).unwrap();
        let exact = InterpLearner.flow(&Observation::Event(EventSet::from_indices([0, 2])), &t, &theta).unwrap();
        assert!(num.distance(&exact).unwrap() < 1e-10);
    }

    #[test]
    fn contradictory_limit() {
        let a = interp_field(&[0]);
        let b = interp_field(&[1, 2]);
        let f = combine_fields(&[a, b], &[1.0, 1.0]).unwrap();
        let out = integrate(&f, &p(&[0.8, 0.1, 0.1]), &ConfidenceDomain::Add.top(), &IntegratorConfig::default()).unwrap();
        assert!(out.distance(&p(&[0.5, 0.25, 0.25])).unwrap() < 1e-6);
    }

    #[test]
    fn no_limit_is_flagged() {
        let spin = VectorField::new("spin", crate::belief::BeliefKind::Simplex, |theta| {
            let q = theta.coords();
            Ok(vec![q[1] - 0.5, 0.5 - q[0]])
        });
        let cfg = IntegratorConfig {
            max_steps: 1000,
            ..IntegratorConfig::default()
        };
        let out = integrate(&spin, &p(&[0.9, 0.1]), &ConfidenceDomain::Add.top(), &cfg);
        assert!(matches!(out, Err(Error::NoLimit { steps: 1000, .. })));
    }

    #[test]
    fn trajectory_row_count_and_csv() {
        let f = interp_field(&[0]);
        let rec = trajectory(&f, &p(&[0.5, 0.5]), 1.0, 0.3, &IntegratorConfig::default()).unwrap();
        assert_eq!(rec.rows.len(), 5);
        let csv = String::from_utf8(rec.to_csv().unwrap()).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,w0,w1");
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.lines().last().unwrap().starts_with("1.0000000000000000e0,"));
    }
}
