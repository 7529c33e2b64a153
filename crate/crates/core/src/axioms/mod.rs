//! Randomized checks of the learner axioms.
//!
//! | id | property                                                       | tolerance |
//! |----|----------------------------------------------------------------|-----------|
//! | L1 | `⊥` leaves the belief unchanged                                | 1e-12     |
//! | L2 | continuity in the confidence (difference-quotient ratio)       | 1e-6      |
//! | L3 | every larger confidence is reachable by a further update       | 1e-8      |
//! | L4 | no cycles: a state left along the axis is never returned to    | 1e-9      |
//! | L5 | sequential updates equal one update with the combined value    | 1e-10     |
//! | FC | `⊤` is a fixed point of itself                                 | 1e-10     |
//! | B1 | `Bel` is monotone in the confidence                            | 1e-10     |
//! | B2 | states at the top belief level stay put                        | 1e-10     |
//! | B3 | `⊤` reaches the top belief level                               | 1e-10     |
//! | LB | path velocity equals the metric gradient of `Bel`              | 1e-5      |
//!
//! Each check draws instances from a per-learner probe with a seed derived
//! from `(seed, learner id, axiom id)`, so reports are reproducible and do not
//! depend on which other checks run.

mod probes;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::belief::BeliefPoint;
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::sampling::{derive_seed, rng, SeededRng};

use probes::{probe_for, Instance, Probe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    L1,
    L2,
    L3,
    L4,
    L5,
    FC,
    B1,
    B2,
    B3,
    LB,
}

impl Axiom {
    pub const ALL: [Axiom; 10] = [
        Axiom::L1,
        Axiom::L2,
        Axiom::L3,
        Axiom::L4,
        Axiom::L5,
        Axiom::FC,
        Axiom::B1,
        Axiom::B2,
        Axiom::B3,
        Axiom::LB,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Axiom::L1 => "L1",
            Axiom::L2 => "L2",
            Axiom::L3 => "L3",
            Axiom::L4 => "L4",
            Axiom::L5 => "L5",
            Axiom::FC => "FC",
            Axiom::B1 => "B1",
            Axiom::B2 => "B2",
            Axiom::B3 => "B3",
            Axiom::LB => "LB",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Axiom::L1 => 1e-12,
            Axiom::L2 => 1e-6,
            Axiom::L3 => 1e-8,
            Axiom::L4 => 1e-9,
            Axiom::L5 | Axiom::FC | Axiom::B1 | Axiom::B2 | Axiom::B3 => 1e-10,
            Axiom::LB => 1e-5,
        }
    }

    /// Checks that walk the confidence grid and are skipped when it is empty.
    pub fn uses_grid(self) -> bool {
        matches!(self, Axiom::L2 | Axiom::L3 | Axiom::L4)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown axiom `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub seed: u64,
    /// Random instances per check.
    pub samples: usize,
    /// Positions `s ∈ [0, 1]` on each learner's confidence axis.
    pub grid: Vec<f64>,
    /// Overrides every per-axiom tolerance.
    pub tolerance: Option<f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 0,
            samples: 200,
            grid: (0..=16).map(|k| k as f64 / 16.0).collect(),
            tolerance: None,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::param("samples", "need at least one sample"));
        }
        if let Some(s) = self.grid.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::param("grid", format!("{s} is outside [0, 1]")));
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::param("tolerance", format!("{t} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    fn sorted_grid(&self) -> Vec<f64> {
        let mut g = self.grid.clone();
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub learner: String,
    pub axiom: Axiom,
    pub status: Status,
    /// `false` only for failed checks.
    pub passed: bool,
    /// Largest violation seen; non-finite values serialize as `null`.
    #[serde(serialize_with = "finite_or_null")]
    pub worst_violation: f64,
    pub tolerance: f64,
    pub samples: usize,
    /// The instance behind the worst violation.
    pub witness: Value,
    pub note: Option<String>,
}

impl Serialize for Axiom {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

impl AxiomReport {
    fn skipped(learner: &dyn Learner, axiom: Axiom, tolerance: f64, note: impl Into<String>) -> Self {
        AxiomReport {
            learner: learner.id().to_string(),
            axiom,
            status: Status::Skipped,
            passed: true,
            worst_violation: 0.0,
            tolerance,
            samples: 0,
            witness: Value::Null,
            note: Some(note.into()),
        }
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Passed => "pass",
            Status::Failed => "FAIL",
            Status::Skipped => "skip",
        };
        write!(
            f,
            "{:<20} {:<3} {status}  worst={:.3e} tol={:.0e}",
            self.learner, self.axiom, self.worst_violation, self.tolerance
        )?;
        if let Some(note) = &self.note {
            write!(f, "  ({note})")?;
        }
        Ok(())
    }
}

/// Tracks the worst violation and its witness.
struct Worst {
    value: f64,
    witness: Value,
    counted: usize,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: 0.0,
            witness: Value::Null,
            counted: 0,
        }
    }

    fn record(&mut self, violation: Result<f64>, witness: impl FnOnce() -> Value) {
        self.counted += 1;
        let (v, err) = match violation {
            Ok(v) if v.is_nan() => (f64::INFINITY, Some("NaN".to_string())),
            Ok(v) => (v, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        if v > self.value || (v == f64::INFINITY && self.witness.is_null()) {
            self.value = v;
            let mut w = witness();
            if let (Some(e), Value::Object(map)) = (err, &mut w) {
                map.insert("error".into(), Value::String(e));
            }
            self.witness = w;
        }
    }
}

fn dist(a: &BeliefPoint, b: &BeliefPoint) -> Result<f64> {
    a.distance(b)
        .ok_or_else(|| Error::InvalidBelief("states live in different spaces".into()))
}

/// `a - b` where equal infinities differ by zero.
fn gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        a - b
    }
}

struct Ctx<'a> {
    learner: &'a dyn Learner,
    probe: &'a dyn Probe,
    grid: Vec<f64>,
}

impl Ctx<'_> {
    fn at(&self, inst: &Instance, theta: &BeliefPoint, s: f64) -> Result<BeliefPoint> {
        let chi = self.probe.axis(&inst.phi, theta, s)?;
        self.learner.observe(&inst.phi, &chi, theta)
    }

    fn top(&self, inst: &Instance, theta: &BeliefPoint) -> Result<BeliefPoint> {
        self.learner.observe(&inst.phi, &self.learner.domain().top(), theta)
    }

    fn bel(&self, inst: &Instance, theta: &BeliefPoint) -> Result<f64> {
        self.learner.bel(&inst.phi, theta)
    }
}

const L2_STEPS: [f64; 2] = [1e-2, 1e-4];
const L2_RATIO: f64 = 10.0;
const RESIDUAL_SCAN: usize = 257;
const GOLDEN_ITERS: usize = 80;

/// `d(state(s+h), state(s-h)) / 2h`, one-sided at the ends.
fn quotient(ctx: &Ctx, inst: &Instance, s: f64, h: f64) -> Result<f64> {
    let th = &inst.theta;
    if s - h >= 0.0 && s + h <= 1.0 {
        Ok(dist(&ctx.at(inst, th, s + h)?, &ctx.at(inst, th, s - h)?)? / (2.0 * h))
    } else if s + h <= 1.0 {
        Ok(dist(&ctx.at(inst, th, s + h)?, &ctx.at(inst, th, s)?)? / h)
    } else {
        Ok(dist(&ctx.at(inst, th, s)?, &ctx.at(inst, th, s - h)?)? / h)
    }
}

fn continuity(ctx: &Ctx, inst: &Instance, s: f64) -> Result<f64> {
    let coarse = quotient(ctx, inst, s, L2_STEPS[0])?;
    let fine = quotient(ctx, inst, s, L2_STEPS[1])?;
    Ok((fine - L2_RATIO * coarse).max(0.0))
}

/// `min_u d(observe(axis(u), from), target)`: a scan, then golden-section
/// refinement around the best scan point.
fn residual(ctx: &Ctx, inst: &Instance, from: &BeliefPoint, target: &BeliefPoint) -> Result<f64> {
    let r = |u: f64| -> Result<f64> { dist(&ctx.at(inst, from, u)?, target) };
    if let Some(points) = ctx.probe.residual_points() {
        return points.into_iter().try_fold(f64::INFINITY, |m, u| Ok(m.min(r(u)?)));
    }
    let n = RESIDUAL_SCAN - 1;
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..=n {
        let v = r(k as f64 / n as f64)?;
        if v < best.0 {
            best = (v, k);
        }
    }
    let (mut lo, mut hi) = (
        best.1.saturating_sub(1) as f64 / n as f64,
        (best.1 + 1).min(n) as f64 / n as f64,
    );
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut min = best.0;
    for _ in 0..GOLDEN_ITERS {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        let (ra, rb) = (r(a)?, r(b)?);
        min = min.min(ra).min(rb);
        if ra < rb {
            hi = b;
        } else {
            lo = a;
        }
    }
    Ok(min)
}

/// Largest departure between two grid states that match each other.
fn cycles(ctx: &Ctx, inst: &Instance, tol: f64) -> Result<f64> {
    let states = ctx
        .grid
        .iter()
        .map(|&s| ctx.at(inst, &inst.theta, s))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..states.len() {
        for j in i + 2..states.len() {
            if dist(&states[i], &states[j])? <= tol {
                for k in &states[i + 1..j] {
                    worst = worst.max(dist(k, &states[i])?);
                }
            }
        }
    }
    Ok(worst)
}

fn composition(ctx: &Ctx, inst: &Instance, rng: &mut SeededRng) -> Result<(f64, Value)> {
    let a = ctx.probe.sample_confidence(rng, inst)?;
    let b = ctx.probe.sample_confidence(rng, inst)?;
    let l = ctx.learner;
    let seq = l.observe(&inst.phi, &b, &l.observe(&inst.phi, &a, &inst.theta)?)?;
    let one = l.observe(&inst.phi, &l.domain().combine(&a, &b)?, &inst.theta)?;
    Ok((dist(&seq, &one)?, json!({"a": a, "b": b})))
}

/// Largest drop of `Bel` along increasing axis positions.
fn monotonicity(ctx: &Ctx, inst: &Instance, positions: &[f64]) -> Result<f64> {
    let bels = positions
        .iter()
        .map(|&s| ctx.bel(inst, &ctx.at(inst, &inst.theta, s)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(bels
        .windows(2)
        .map(|w| gap(w[0], w[1]))
        .fold(0.0, f64::max))
}

fn alignment_gap(velocity: &[f64], gradient: &[f64]) -> Result<f64> {
    if velocity.len() != gradient.len() {
        return Err(Error::Numerical("velocity and gradient dimensions differ".into()));
    }
    Ok(velocity
        .iter()
        .zip(gradient)
        .map(|(v, g)| (v - g).abs())
        .fold(0.0, f64::max))
}

fn skip_reason(learner: &dyn Learner, probe: &dyn Probe, axiom: Axiom, cfg: &CheckConfig) -> Option<String> {
    if axiom.uses_grid() && cfg.grid.is_empty() {
        return Some("empty confidence grid".into());
    }
    let bel = learner.has_bel();
    match axiom {
        Axiom::L2 if !probe.continuous() => Some("discrete confidence axis".into()),
        Axiom::L3 | Axiom::L4 => probe.unordered().map(str::to_string),
        Axiom::B1 | Axiom::B2 | Axiom::B3 | Axiom::LB if !bel => Some("learner has no Bel".into()),
        Axiom::B2 | Axiom::B3 => probe.no_levels().map(str::to_string),
        Axiom::LB => probe.no_metric().map(str::to_string),
        _ => None,
    }
}

/// Runs one axiom check on `cfg.samples` random instances.
pub fn check_axiom(learner: &dyn Learner, axiom: Axiom, cfg: &CheckConfig) -> Result<AxiomReport> {
    cfg.validate()?;
    let mut tol = cfg.tolerance.unwrap_or(axiom.default_tolerance());
    let Some(probe) = probe_for(learner) else {
        return Ok(AxiomReport::skipped(learner, axiom, tol, "no probe registered for this learner"));
    };
    if axiom == Axiom::FC && cfg.tolerance.is_none() {
        tol = probe.fixed_point_tolerance().unwrap_or(tol);
    }
    if let Some(note) = skip_reason(learner, probe.as_ref(), axiom, cfg) {
        return Ok(AxiomReport::skipped(learner, axiom, tol, note));
    }
    let ctx = Ctx {
        learner,
        probe: probe.as_ref(),
        grid: cfg.sorted_grid(),
    };
    let mut r = rng(derive_seed(cfg.seed, &[learner.id(), axiom.id()]));
    let mut worst = Worst::new();
    let mut vacuous = 0usize;
    for i in 0..cfg.samples {
        let inst = probe.sample(&mut r);
        if !learner.in_domain(&inst.phi, &inst.theta) {
            vacuous += 1;
            continue;
        }
        let base = || inst.witness();
        match axiom {
            Axiom::L1 => {
                let v = learner
                    .observe(&inst.phi, &learner.domain().bot(), &inst.theta)
                    .and_then(|b| dist(&b, &inst.theta));
                worst.record(v, base);
            }
            Axiom::L2 => {
                let interior: Vec<f64> = ctx.grid.iter().copied().filter(|s| *s < 1.0).collect();
                let mut points = vec![r.random_range(0.0..0.95)];
                if !interior.is_empty() {
                    points.push(interior[i % interior.len()]);
                }
                for s in points {
                    worst.record(continuity(&ctx, &inst, s), || with(base(), "s", json!(s)));
                }
            }
            Axiom::L3 => {
                let m = ctx.grid.len();
                let (a, b) = {
                    let x = r.random_range(0..m);
                    let y = r.random_range(0..m);
                    (x.min(y), x.max(y))
                };
                let (s0, s1) = (ctx.grid[a], ctx.grid[b]);
                let v = (|| {
                    let from = ctx.at(&inst, &inst.theta, s0)?;
                    let target = ctx.at(&inst, &inst.theta, s1)?;
                    residual(&ctx, &inst, &from, &target)
                })();
                worst.record(v, || with(base(), "s", json!([s0, s1])));
            }
            Axiom::L4 => worst.record(cycles(&ctx, &inst, tol), base),
            Axiom::L5 => match composition(&ctx, &inst, &mut r) {
                Ok((v, w)) => worst.record(Ok(v), || merge(base(), w)),
                Err(e) => worst.record(Err(e), base),
            },
            Axiom::FC => {
                let v = ctx
                    .top(&inst, &inst.theta)
                    .and_then(|t| dist(&ctx.top(&inst, &t)?, &t));
                worst.record(v, base);
            }
            Axiom::B1 => {
                let mut pair = [r.random_range(0.0..=1.0), r.random_range(0.0..=1.0)];
                pair.sort_by(f64::total_cmp);
                let mut positions = ctx.grid.clone();
                if positions.is_empty() {
                    positions = vec![0.0, 1.0];
                }
                worst.record(monotonicity(&ctx, &inst, &positions), base);
                worst.record(monotonicity(&ctx, &inst, &pair), || with(base(), "s", json!(pair)));
            }
            Axiom::B2 => {
                let top = learner.bel_top(&inst.phi).expect("checked by skip_reason");
                let t = match ctx.top(&inst, &inst.theta) {
                    Ok(t) => t,
                    Err(e) => {
                        worst.record(Err(e), base);
                        continue;
                    }
                };
                match ctx.bel(&inst, &t) {
                    Ok(b) if gap(b, top).abs() <= tol => {}
                    _ => {
                        vacuous += 1;
                        continue;
                    }
                }
                let mut positions = ctx.grid.clone();
                positions.push(r.random_range(0.0..=1.0));
                for s in positions {
                    let v = ctx.at(&inst, &t, s).and_then(|b| dist(&b, &t));
                    worst.record(v, || with(base(), "s", json!(s)));
                }
            }
            Axiom::B3 => {
                let Some(top) = learner.bel_top(&inst.phi) else {
                    vacuous += 1;
                    continue;
                };
                let v = ctx
                    .top(&inst, &inst.theta)
                    .and_then(|t| ctx.bel(&inst, &t))
                    .map(|b| gap(b, top).abs());
                worst.record(v, base);
            }
            Axiom::LB => match probe.alignment(learner, &inst, &mut r) {
                Ok(a) => worst.record(alignment_gap(&a.velocity, &a.gradient), || {
                    with(
                        with(with(base(), "at", a.at), "velocity", json!(a.velocity)),
                        "gradient",
                        json!(a.gradient),
                    )
                }),
                Err(e) => worst.record(Err(e), base),
            },
        }
    }
    let passed = worst.value <= tol;
    let note = (vacuous > 0).then(|| format!("{vacuous} of {} samples not applicable", cfg.samples));
    if worst.counted == 0 {
        return Ok(AxiomReport::skipped(learner, axiom, tol, "no applicable samples"));
    }
    Ok(AxiomReport {
        learner: learner.id().to_string(),
        axiom,
        status: if passed { Status::Passed } else { Status::Failed },
        passed,
        worst_violation: worst.value,
        tolerance: tol,
        samples: cfg.samples - vacuous,
        witness: worst.witness,
        note,
    })
}

fn with(mut v: Value, key: &str, x: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert(key.to_string(), x);
    }
    v
}

fn merge(mut v: Value, extra: Value) -> Value {
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    v
}

/// Every axiom, in [`Axiom::ALL`] order. Checks run in parallel.
pub fn run_suite(learner: &dyn Learner, cfg: &CheckConfig) -> Result<Vec<AxiomReport>> {
    run_axioms(learner, &Axiom::ALL, cfg)
}

pub fn run_axioms(learner: &dyn Learner, axioms: &[Axiom], cfg: &CheckConfig) -> Result<Vec<AxiomReport>> {
    cfg.validate()?;
    axioms
        .par_iter()
        .map(|a| check_axiom(learner, *a, cfg))
        .collect()
}

/// Axioms each mutant is built to break.
pub fn mutant_targets(id: &str) -> &'static [Axiom] {
    match id {
        "mutant-leaky" => &[Axiom::L1],
        "mutant-threshold" => &[Axiom::L2],
        "mutant-boomerang" => &[Axiom::L3, Axiom::L4],
        "mutant-squared" => &[Axiom::L5],
        "mutant-rotator" => &[Axiom::FC, Axiom::B2],
        "mutant-contrarian" => &[Axiom::B1, Axiom::B3],
        "mutant-double-speed" => &[Axiom::LB],
        _ => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::learner;

    fn quick() -> CheckConfig {
        CheckConfig {
            samples: 40,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn interp_passes_everything() {
        let l = learner("interp").unwrap();
        for r in run_suite(l.as_ref(), &quick()).unwrap() {
            assert_eq!(r.status, Status::Passed, "{r}");
        }
    }

    #[test]
    fn each_mutant_fails_its_target() {
        for id in crate::learners::MUTANT_LEARNERS {
            let l = learner(id).unwrap();
            let reports = run_axioms(l.as_ref(), mutant_targets(id), &quick()).unwrap();
            assert!(reports.iter().any(|r| r.status == Status::Failed), "{id}");
        }
    }

    #[test]
    fn empty_grid_skips_grid_checks() {
        let l = learner("interp").unwrap();
        let cfg = CheckConfig {
            grid: vec![],
            ..quick()
        };
        let r = check_axiom(l.as_ref(), Axiom::L4, &cfg).unwrap();
        assert_eq!(r.status, Status::Skipped);
        assert_eq!(check_axiom(l.as_ref(), Axiom::L1, &cfg).unwrap().status, Status::Passed);
    }

    #[test]
    fn reports_are_reproducible() {
        let l = learner("boltzmann").unwrap();
        let a = check_axiom(l.as_ref(), Axiom::L5, &quick()).unwrap();
        let b = check_axiom(l.as_ref(), Axiom::L5, &quick()).unwrap();
        assert_eq!(a.worst_violation, b.worst_violation);
    }

    #[test]
    fn non_finite_violation_serializes_as_null() {
        let l = learner("interp").unwrap();
        let mut r = check_axiom(l.as_ref(), Axiom::L1, &quick()).unwrap();
        r.worst_violation = f64::INFINITY;
        let v = serde_json::to_value(&r).unwrap();
        assert!(v["worst_violation"].is_null());
        assert_eq!(v["axiom"], "L1");
    }
}
