//! Command-line front end. Every command reads one JSON config; see the
//! README for the keys each command uses.

pub mod equiv;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::axioms::{run_axioms, Axiom, AxiomReport, CheckConfig, Status};
use crate::belief::{BeliefPoint, EventSet, RandomVariable};
use crate::domain::{parse_confidence, ConfidenceDomain, ConfidenceValue};
use crate::error::{Error, Result};
use crate::flow::{integrate, trajectory, IntegratorConfig, ParallelObservation, Scheme, TrajectoryRecord};
use crate::learners::{build_learner, KalmanLearner, Learner, Observation, BUILTIN_LEARNERS};
use crate::persist::write_atomic;

pub use equiv::{run_experiment, trotter_errors, EquivReport, EXPERIMENTS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Observe once per confidence on a grid.
    Learn,
    /// Integrate the sum of several observation fields.
    Combine,
    /// Compare Trotter interleaving against the summed field.
    Trotter,
    /// Run the axiom suite.
    Axioms,
    /// Run named equivalence experiments.
    Equiv,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Learn => "learn",
            Command::Combine => "combine",
            Command::Trotter => "trotter",
            Command::Axioms => "axioms",
            Command::Equiv => "equiv",
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "conflearn", version, about = "Confidence-based belief updating")]
pub struct Args {
    pub command: Command,
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for output files; overrides `output` in the config.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub scheme: Option<String>,
    pub step: Option<f64>,
    pub t_max: Option<f64>,
    pub limit_tol: Option<f64>,
    pub limit_streak: Option<u32>,
    pub max_steps: Option<u64>,
}

impl IntegratorSpec {
    pub fn build(&self) -> Result<IntegratorConfig> {
        let mut cfg = IntegratorConfig::default();
        if let Some(s) = &self.scheme {
            cfg.scheme = match s.as_str() {
                "rk4" => Scheme::Rk4,
                "euler" => Scheme::Euler,
                other => return Err(Error::Config(format!("unknown scheme `{other}`"))),
            };
        }
        cfg.step = self.step.unwrap_or(cfg.step);
        cfg.t_max = self.t_max.unwrap_or(cfg.t_max);
        cfg.limit_tol = self.limit_tol.unwrap_or(cfg.limit_tol);
        cfg.limit_streak = self.limit_streak.unwrap_or(cfg.limit_streak);
        cfg.max_steps = self.max_steps.unwrap_or(cfg.max_steps);
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }
}

/// The JSON config shared by all commands. Keys a command does not use are
/// accepted and ignored; unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub learner: Option<String>,
    #[serde(default)]
    pub params: Value,
    pub belief: Option<Value>,
    pub observation: Option<Value>,
    #[serde(default)]
    pub observations: Vec<Value>,
    /// A single confidence literal (`learn`) or the integration time
    /// (`combine`, `trotter`).
    pub confidence: Option<Value>,
    /// Confidence literals for `learn`.
    pub grid: Option<Vec<Value>>,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    /// Sampling interval of `combine` trajectories.
    pub sample_every: Option<f64>,
    pub rounds: Option<Vec<u64>>,
    #[serde(default)]
    pub learners: Vec<String>,
    #[serde(default)]
    pub axioms: Vec<String>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub confidence_grid: Option<Vec<f64>>,
    pub experiment: Option<String>,
    #[serde(default)]
    pub experiments: Vec<String>,
    pub instances: Option<usize>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    fn learner(&self) -> Result<Box<dyn Learner>> {
        let id = self
            .learner
            .as_deref()
            .ok_or_else(|| Error::Config("config needs `learner`".into()))?;
        build_learner(id, &self.params).map_err(config_error)
    }

    fn belief(&self) -> Result<BeliefPoint> {
        let v = self
            .belief
            .as_ref()
            .ok_or_else(|| Error::Config("config needs `belief`".into()))?;
        BeliefPoint::from_json(v).map_err(config_error)
    }

    fn observation_values(&self) -> Vec<&Value> {
        self.observation.iter().chain(&self.observations).collect()
    }

    fn r2(&self) -> Result<f64> {
        self.params
            .get("r2")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Config("numeric Kalman confidences need `params.r2`".into()))
    }

    /// Reads a confidence literal. For Kalman, a bare number is a gain paired
    /// with `params.r2`, and `"opt"` is the optimal gain for that variance.
    fn confidence(&self, d: &ConfidenceDomain, v: &Value, theta: &BeliefPoint) -> Result<ConfidenceValue> {
        if *d == ConfidenceDomain::Kalman {
            match v {
                Value::Number(n) => {
                    let gain = n.as_f64().ok_or_else(|| Error::Config(format!("bad gain `{v}`")))?;
                    return d.pair(gain, self.r2()?).map_err(config_error);
                }
                Value::String(s) if s == "opt" => {
                    return KalmanLearner::optimal_confidence(theta.as_gaussian().map_err(config_error)?, self.r2()?);
                }
                _ => {}
            }
        }
        parse_confidence(d, v).map_err(config_error)
    }
}

/// Errors in the inputs themselves (not in the math) are config errors.
fn config_error(e: Error) -> Error {
    if e.is_domain_error() || matches!(e, Error::Config(_)) {
        e
    } else {
        Error::Config(e.to_string())
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_domain_error() {
        EXIT_DOMAIN
    } else {
        EXIT_CONFIG
    }
}

fn labels_of(theta: &BeliefPoint) -> Option<&[String]> {
    match theta {
        BeliefPoint::Simplex(p) => Some(p.labels()),
        BeliefPoint::Mass(m) => Some(m.labels()),
        _ => None,
    }
}

fn floats(v: &Value, what: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::Config(format!("`{what}` must be an array")))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| Error::Config(format!("`{what}` must hold numbers"))))
        .collect()
}

/// Parses an observation object; returns it with its `weight` (default 1).
pub fn parse_observation(v: &Value, theta: &BeliefPoint) -> Result<(Observation, f64)> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Config(format!("observation must be an object, got `{v}`")))?;
    let weight = match obj.get("weight") {
        None => 1.0,
        Some(w) => w
            .as_f64()
            .ok_or_else(|| Error::Config("`weight` must be a number".into()))?,
    };
    let bad = |m: &str| Error::Config(m.to_string());
    let phi = if let Some(names) = obj.get("event") {
        let labels = labels_of(theta).ok_or_else(|| bad("events need a simplex or mass belief"))?;
        let names = names.as_array().ok_or_else(|| bad("`event` must list world names"))?;
        let mut set = EventSet::empty();
        for n in names {
            let n = n.as_str().ok_or_else(|| bad("world names are strings"))?;
            let i = labels
                .iter()
                .position(|l| l == n)
                .ok_or_else(|| Error::Config(format!("unknown world `{n}`")))?;
            set = set.union(EventSet::singleton(i));
        }
        Observation::Event(set)
    } else if let Some(u) = obj.get("potential") {
        Observation::Potential(RandomVariable::new(floats(u, "potential")?).map_err(config_error)?)
    } else if let Some(z) = obj.get("z") {
        Observation::Measurement(z.as_f64().ok_or_else(|| bad("`z` must be a number"))?)
    } else if let Some(e) = obj.get("evidence") {
        Observation::Evidence(e.as_str().ok_or_else(|| bad("`evidence` must be a string"))?.to_string())
    } else if let Some(l) = obj.get("likelihood") {
        Observation::Likelihood(floats(l, "likelihood")?)
    } else if let Some(p) = obj.get("prop") {
        Observation::Prop(p.as_str().ok_or_else(|| bad("`prop` must be a string"))?.to_string())
    } else if let (Some(x), Some(y)) = (obj.get("x"), obj.get("y")) {
        Observation::Example {
            x: floats(x, "x")?,
            y: y.as_u64().ok_or_else(|| bad("`y` must be a class index"))? as usize,
        }
    } else {
        return Err(Error::Config(format!("cannot read observation `{v}`")));
    };
    Ok((phi, weight))
}

fn single_observation(cfg: &RunConfig, theta: &BeliefPoint) -> Result<Observation> {
    match cfg.observation_values().as_slice() {
        [one] => Ok(parse_observation(one, theta)?.0),
        other => Err(Error::Config(format!("`learn` needs exactly one observation, got {}", other.len()))),
    }
}

fn check_domain(learner: &dyn Learner, phi: &Observation, theta: &BeliefPoint) -> Result<()> {
    if learner.in_domain(phi, theta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("belief is outside the domain of `{}` for {phi}", learner.id())))
    }
}

/// Observes the initial belief once per grid confidence.
pub fn run_learn(cfg: &RunConfig) -> Result<TrajectoryRecord> {
    let learner = cfg.learner()?;
    let theta = cfg.belief()?;
    let phi = single_observation(cfg, &theta)?;
    let literals: Vec<Value> = match (&cfg.grid, &cfg.confidence) {
        (Some(g), _) => g.clone(),
        (None, Some(c)) => vec![c.clone()],
        (None, None) => return Err(Error::Config("`learn` needs `grid` or `confidence`".into())),
    };
    check_domain(learner.as_ref(), &phi, &theta)?;
    let d = learner.domain().clone();
    let mut keys = Vec::new();
    let mut points = Vec::new();
    for lit in &literals {
        let chi = cfg.confidence(&d, lit, &theta)?;
        points.push(learner.observe(&phi, &chi, &theta)?);
        keys.push(chi.display_value());
    }
    Ok(TrajectoryRecord::from_points("confidence", keys, points))
}

fn parallel(cfg: &RunConfig, theta: &BeliefPoint) -> Result<ParallelObservation> {
    let terms = cfg
        .observation_values()
        .into_iter()
        .map(|v| parse_observation(v, theta))
        .collect::<Result<Vec<_>>>()?;
    ParallelObservation::new(terms).map_err(config_error)
}

fn integration_time(cfg: &RunConfig) -> Result<ConfidenceValue> {
    let v = cfg
        .confidence
        .as_ref()
        .ok_or_else(|| Error::Config("config needs `confidence` (the integration time)".into()))?;
    parse_confidence(&ConfidenceDomain::Add, v).map_err(config_error)
}

/// Integrates the sum of the observation fields. A finite time gives a
/// sampled trajectory; `⊤` gives the initial point and the limit.
pub fn run_combine(cfg: &RunConfig) -> Result<TrajectoryRecord> {
    let learner: Arc<dyn Learner> = cfg.learner()?.into();
    let theta = cfg.belief()?;
    let obs = parallel(cfg, &theta)?;
    for (phi, _) in obs.terms() {
        check_domain(learner.as_ref(), phi, &theta)?;
    }
    let field = obs.field(learner).map_err(config_error)?;
    let icfg = cfg.integrator.build()?;
    let t = integration_time(cfg)?;
    match t.as_extended_real() {
        Some(t_end) if t_end.is_finite() => {
            let every = cfg.sample_every.unwrap_or(if t_end > 0.0 { t_end / 10.0 } else { 1.0 });
            trajectory(&field, &theta, t_end, every, &icfg).map_err(|e| match e {
                Error::Parameter { .. } => config_error(e),
                e => e,
            })
        }
        _ => {
            let limit = integrate(&field, &theta, &t, &icfg)?;
            let mut rec = TrajectoryRecord::from_points("t", vec!["0".into(), "top".into()], vec![theta, limit]);
            rec.meta.insert("limit".into(), "true".into());
            Ok(rec)
        }
    }
}

/// Trotter interleaving of two observations for each round count, against
/// the integral of their summed field.
pub fn run_trotter(cfg: &RunConfig) -> Result<Value> {
    let learner: Arc<dyn Learner> = cfg.learner()?.into();
    let theta = cfg.belief()?;
    let obs = parallel(cfg, &theta)?;
    let [(phi1, _), (phi2, _)] = obs.terms() else {
        return Err(Error::Config("`trotter` needs exactly two observations".into()));
    };
    let chi = integration_time(cfg)?
        .as_extended_real()
        .filter(|t| t.is_finite())
        .ok_or_else(|| Error::Config("`trotter` needs a finite additive `confidence`".into()))?;
    let rounds = cfg.rounds.clone().unwrap_or_else(|| equiv::TROTTER_ROUNDS.to_vec());
    if rounds.is_empty() || rounds.contains(&0) {
        return Err(Error::Config("`rounds` must be nonempty and positive".into()));
    }
    if !learner.has_additive_form() {
        return Err(Error::Config(format!("`{}` has no additive form", learner.id())));
    }
    check_domain(learner.as_ref(), phi1, &theta)?;
    check_domain(learner.as_ref(), phi2, &theta)?;
    let icfg = cfg.integrator.build()?;
    let (reference, errors) = trotter_errors(learner, phi1, phi2, chi, &theta, &rounds, &icfg)?;
    let rows: Vec<Value> = rounds
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (n, e))| {
            let ratio = (i > 0).then(|| e / errors[i - 1]);
            json!({"n": n, "error": e, "ratio": ratio})
        })
        .collect();
    Ok(json!({"confidence": chi, "reference": reference.to_json(), "rounds": rows}))
}

fn check_config(cfg: &RunConfig, seed: u64) -> Result<CheckConfig> {
    let mut c = CheckConfig {
        seed,
        ..CheckConfig::default()
    };
    if let Some(n) = cfg.samples {
        c.samples = n;
    }
    if let Some(g) = &cfg.confidence_grid {
        c.grid = g.clone();
    }
    c.tolerance = cfg.tol;
    c.validate().map_err(config_error)?;
    Ok(c)
}

/// The axiom suite for each configured learner (default: all built-ins).
pub fn run_axiom_suite(cfg: &RunConfig, seed: u64) -> Result<Vec<AxiomReport>> {
    let check = check_config(cfg, seed)?;
    let ids: Vec<String> = if !cfg.learners.is_empty() {
        cfg.learners.clone()
    } else if let Some(id) = &cfg.learner {
        vec![id.clone()]
    } else {
        BUILTIN_LEARNERS.iter().map(|s| s.to_string()).collect()
    };
    let axioms = if cfg.axioms.is_empty() {
        Axiom::ALL.to_vec()
    } else {
        cfg.axioms
            .iter()
            .map(|a| a.parse())
            .collect::<Result<Vec<Axiom>>>()?
    };
    let learners = ids
        .iter()
        .map(|id| build_learner(id, &cfg.params).map_err(config_error))
        .collect::<Result<Vec<_>>>()?;
    let per: Vec<Vec<AxiomReport>> = learners
        .par_iter()
        .map(|l| run_axioms(l.as_ref(), &axioms, &check))
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Named experiments (default: all), run in parallel.
pub fn run_equiv(cfg: &RunConfig, seed: u64) -> Result<Vec<EquivReport>> {
    let mut names: Vec<String> = cfg.experiment.iter().cloned().collect();
    names.extend(cfg.experiments.iter().cloned());
    if names.is_empty() {
        names = EXPERIMENTS.iter().map(|s| s.to_string()).collect();
    }
    if let Some(bad) = names.iter().find(|n| !EXPERIMENTS.contains(&n.as_str())) {
        return Err(Error::Config(format!(
            "unknown experiment `{bad}`; expected one of {}",
            EXPERIMENTS.join(", ")
        )));
    }
    let instances = cfg.instances.unwrap_or(100);
    names
        .par_iter()
        .map(|n| run_experiment(n, instances, seed))
        .collect()
}

/// What a command produced: files to write, text for stdout, and whether
/// every check passed.
pub struct Outcome {
    pub files: Vec<(String, Vec<u8>)>,
    pub stdout: String,
    pub passed: bool,
}

fn pretty(v: &impl serde::Serialize) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

pub fn execute(command: Command, cfg: &RunConfig, seed: u64) -> Result<Outcome> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(Error::Config(format!("config is for `{c}`, not `{command}`")));
        }
    }
    Ok(match command {
        Command::Learn | Command::Combine => {
            let rec = if command == Command::Learn {
                run_learn(cfg)?
            } else {
                run_combine(cfg)?
            };
            let last = rec.final_point().map(BeliefPoint::to_json).unwrap_or(Value::Null);
            Outcome {
                files: vec![(format!("{command}.csv"), rec.to_csv()?)],
                stdout: serde_json::to_string(&last)?,
                passed: true,
            }
        }
        Command::Trotter => {
            let report = run_trotter(cfg)?;
            let body = pretty(&report)?;
            Outcome {
                stdout: String::from_utf8_lossy(&body).trim_end().to_string(),
                files: vec![("trotter.json".into(), body)],
                passed: true,
            }
        }
        Command::Axioms => {
            let reports = run_axiom_suite(cfg, seed)?;
            let body = pretty(&reports)?;
            Outcome {
                passed: reports.iter().all(|r| r.status != Status::Failed),
                stdout: reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n"),
                files: vec![("axioms.json".into(), body)],
            }
        }
        Command::Equiv => {
            let reports = run_equiv(cfg, seed)?;
            let body = pretty(&reports)?;
            Outcome {
                passed: reports.iter().all(|r| r.passed),
                stdout: String::from_utf8_lossy(&body).trim_end().to_string(),
                files: vec![("equiv.json".into(), body)],
            }
        }
    })
}

/// Runs parsed arguments and returns the process exit code.
pub fn run(args: &Args) -> i32 {
    let result = (|| -> Result<Outcome> {
        let cfg = RunConfig::load(&args.config)?;
        let seed = args.seed.or(cfg.seed).unwrap_or(0);
        let outcome = execute(args.command, &cfg, seed)?;
        if let Some(dir) = args.output.as_ref().or(cfg.output.as_ref()) {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
            for (name, bytes) in &outcome.files {
                write_atomic(&dir.join(name), bytes)
                    .map_err(|e| Error::Config(format!("cannot write {name}: {e}")))?;
            }
        }
        Ok(outcome)
    })();
    match result {
        Ok(outcome) => {
            if !args.quiet && !outcome.stdout.is_empty() {
                // A closed pipe (`| head`) is not an error worth reporting.
                let _ = writeln!(std::io::stdout(), "{}", outcome.stdout);
            }
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
